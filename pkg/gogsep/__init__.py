"""
gogsep - residual p-separation for graphs of finite p-groups

Decides the chief-series compatibility conditions on a finite graph of finite
p-groups and, when they hold, separates any nontrivial element of the
fundamental group into a finite p-quotient with a replayable certificate.
"""

__version__ = "1.0.0"

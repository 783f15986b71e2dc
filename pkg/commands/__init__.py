"""
CLI Commands Module
"""

# Import all command modules
from . import validate
from . import check
from . import search
from . import separate
from . import cover
from . import tree
from . import freesep
from . import run

__all__ = ['validate', 'check', 'search', 'separate', 'cover', 'tree', 'freesep', 'run']

"""
Explicit finite-group arithmetic on Cayley tables

Groups are multiplication tables over element indices 0..n-1 with the identity
fixed at index 0. Everything here is brute force on purpose: orders stay at desk
scale (p^6 and below) so every predicate can be checked exhaustively.
"""

import itertools
import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from sympy.combinatorics import Permutation, PermutationGroup

from gogsep.errors import InvariantBreach, NotNormalError, ProblemFileError, ValidationReport

logger = logging.getLogger(__name__)

# Elements of F_p are plain ints in range(p).
FpScalar = int


def fp_inv(value: FpScalar, p: int) -> FpScalar:
    return pow(value % p, -1, p)


class FiniteGroup:
    """
    A finite group given by its multiplication table.

    The table is stored as a read-only numpy array (`mul`) for vectorised
    validation and mirrored as nested lists for scalar lookups in hot loops.
    """

    identity = 0

    def __init__(self, table, labels: Optional[Sequence[str]] = None, name: Optional[str] = None,
                 inv: Optional[Sequence[int]] = None):
        arr = np.asarray(table, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise ProblemFileError(f"Group '{name or '?'}': multiplication table must be a non-empty square")
        n = arr.shape[0]
        if arr.min() < 0 or arr.max() >= n:
            raise ProblemFileError(f"Group '{name or '?'}': table entries must lie in 0..{n - 1}")
        if labels is not None and len(labels) != n:
            raise ProblemFileError(f"Group '{name or '?'}': expected {n} labels, got {len(labels)}")
        arr.flags.writeable = False
        self.mul = arr
        self.order = n
        self.name = name
        self.labels = tuple(str(label) for label in labels) if labels is not None else None
        self._rows: List[List[int]] = arr.tolist()
        if inv is None:
            inv = [next((b for b in range(n) if self._rows[a][b] == 0), -1) for a in range(n)]
        if len(inv) != n:
            raise ProblemFileError(f"Group '{name or '?'}': inverse table must have {n} entries")
        self.inv_table: Tuple[int, ...] = tuple(int(x) for x in inv)
        self._label_index = {label: i for i, label in enumerate(self.labels)} if self.labels else {}

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name or 'anonymous'}, order={self.order})"

    def elements(self) -> range:
        return range(self.order)

    def op(self, a: int, b: int) -> int:
        return self._rows[a][b]

    def inv(self, a: int) -> int:
        return self.inv_table[a]

    def product(self, elements: Iterable[int]) -> int:
        result = 0
        for x in elements:
            result = self._rows[result][x]
        return result

    def power(self, a: int, n: int) -> int:
        if n < 0:
            a, n = self.inv(a), -n
        result = 0
        for _ in range(n % self.element_order(a)):
            result = self._rows[result][a]
        return result

    def conj(self, g: int, x: int) -> int:
        """Left conjugation g x g^-1"""
        return self._rows[self._rows[g][x]][self.inv(g)]

    def element_order(self, a: int) -> int:
        n, x = 1, a
        while x != 0:
            x = self._rows[x][a]
            n += 1
            if n > self.order:
                raise InvariantBreach(f"Element {a} of {self!r} has no finite order; validate the table")
        return n

    def label(self, a: int) -> str:
        return self.labels[a] if self.labels else str(a)

    def index_of(self, token: str) -> int:
        """Resolve an element written as a label or as a decimal index"""
        if token in self._label_index:
            return self._label_index[token]
        if token.isdigit() and int(token) < self.order:
            return int(token)
        raise KeyError(token)

    def rows(self) -> List[List[int]]:
        return [list(row) for row in self._rows]


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup
    elements: Tuple[int, ...]

    def __contains__(self, a: int) -> bool:
        return a in self.as_set

    @property
    def as_set(self) -> frozenset:
        cached = self.__dict__.get("_as_set")
        if cached is None:
            cached = frozenset(self.elements)
            object.__setattr__(self, "_as_set", cached)
        return cached

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def is_trivial(self) -> bool:
        return self.elements == (0,)

    def issubset(self, other: "Subgroup") -> bool:
        return self.as_set <= other.as_set


def make_subgroup(g: FiniteGroup, elements: Iterable[int]) -> Subgroup:
    return Subgroup(g, tuple(sorted(set(int(x) for x in elements))))


def whole_group(g: FiniteGroup) -> Subgroup:
    return Subgroup(g, tuple(range(g.order)))


def trivial_subgroup(g: FiniteGroup) -> Subgroup:
    return Subgroup(g, (0,))


@dataclass(frozen=True)
class GroupHom:
    source: FiniteGroup
    target: FiniteGroup
    map: Tuple[int, ...]

    def __call__(self, a: int) -> int:
        return self.map[a]

    @property
    def is_injective(self) -> bool:
        return len(set(self.map)) == len(self.map)

    def image(self, sub: Optional[Subgroup] = None) -> Subgroup:
        domain = sub.elements if sub is not None else range(self.source.order)
        return make_subgroup(self.target, (self.map[a] for a in domain))

    def kernel(self) -> Subgroup:
        return make_subgroup(self.source, (a for a in range(self.source.order) if self.map[a] == 0))

    def preimage(self, sub: Subgroup) -> Subgroup:
        return make_subgroup(self.source, (a for a in range(self.source.order) if self.map[a] in sub))

    def inverse_on_image(self) -> Dict[int, int]:
        return {b: a for a, b in enumerate(self.map)}

    def validate(self) -> ValidationReport:
        report = ValidationReport("homomorphism")
        if len(self.map) != self.source.order:
            report.add("not_total", f"map has {len(self.map)} entries, source has order {self.source.order}")
            return report
        if any(b < 0 or b >= self.target.order for b in self.map):
            report.add("out_of_range", "map sends an element outside the target group")
            return report
        for a in range(self.source.order):
            for b in range(self.source.order):
                lhs = self.map[self.source.op(a, b)]
                rhs = self.target.op(self.map[a], self.map[b])
                if lhs != rhs:
                    report.add("not_multiplicative", f"f({a}*{b}) != f({a})*f({b})", pair=[a, b])
                    return report
        seen: Dict[int, int] = {}
        for a, b in enumerate(self.map):
            if b in seen:
                report.facts["injective"] = False
                report.facts["collision"] = [seen[b], a]
                break
            seen[b] = a
        else:
            report.facts["injective"] = True
        return report


def compose(inner: GroupHom, outer: GroupHom) -> GroupHom:
    """outer after inner"""
    if inner.target is not outer.source:
        raise InvariantBreach("Cannot compose homomorphisms with mismatched groups")
    return GroupHom(inner.source, outer.target, tuple(outer.map[b] for b in inner.map))


def validate_group(g: FiniteGroup, p: Optional[int] = None) -> ValidationReport:
    """
    Check identity, inverse table and associativity; extract (p, m) when the
    order is a prime power.
    """
    report = ValidationReport(f"group {g.name or ''}".strip())
    n = g.order
    mul = g.mul
    idx = np.arange(n)
    report.facts["order"] = n

    bad = np.nonzero((mul[0, :] != idx) | (mul[:, 0] != idx))[0]
    if bad.size:
        report.add("identity", f"index 0 is not a two-sided identity (element {int(bad[0])})", element=int(bad[0]))

    inv = np.asarray(g.inv_table)
    if (inv < 0).any() or (inv >= n).any():
        a = int(np.nonzero((inv < 0) | (inv >= n))[0][0])
        report.add("inverse", f"element {a} has no inverse", element=a)
    else:
        bad = np.nonzero((mul[idx, inv] != 0) | (mul[inv, idx] != 0))[0]
        if bad.size:
            a = int(bad[0])
            report.add("inverse", f"inverse table entry for {a} is not a two-sided inverse", element=a)

    for a in range(n):
        left = mul[mul[a, :], :]
        right = mul[a, mul]
        diff = np.argwhere(left != right)
        if diff.size:
            b, c = (int(x) for x in diff[0])
            report.add("associativity", f"({a}*{b})*{c} != {a}*({b}*{c})", triple=[a, b, c])
            break

    factors = sympy.factorint(n)
    if len(factors) == 1:
        (prime, m), = factors.items()
        report.facts.update({"is_prime_power": True, "p": int(prime), "m": int(m)})
    elif n == 1:
        report.facts.update({"is_prime_power": True, "p": p, "m": 0})
    else:
        report.facts["is_prime_power"] = False
    if p is not None:
        report.facts["is_p_group"] = n == 1 or factors.keys() == {p}
    return report


def subgroup_closure(g: FiniteGroup, seed: Iterable[int]) -> Subgroup:
    gens = sorted({int(s) for s in seed} - {0})
    for s in gens:
        if s < 0 or s >= g.order:
            raise ProblemFileError(f"Element {s} is not an element of {g!r}")
    found = {0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = g.op(x, s)
            if y not in found:
                found.add(y)
                queue.append(y)
    return Subgroup(g, tuple(sorted(found)))


def normal_closure(g: FiniteGroup, seed: Iterable[int]) -> Subgroup:
    conjugates = {g.conj(h, s) for s in seed for h in range(g.order)}
    return subgroup_closure(g, conjugates)


def normality_witness(h: Subgroup) -> Optional[Tuple[int, int]]:
    g = h.parent
    for x in range(g.order):
        for a in h.elements:
            if g.conj(x, a) not in h:
                return x, a
    return None


def is_normal(h: Subgroup) -> bool:
    return normality_witness(h) is None


def quotient_group(g: FiniteGroup, n: Subgroup) -> Tuple[FiniteGroup, GroupHom]:
    witness = normality_witness(n)
    if witness is not None:
        x, a = witness
        raise NotNormalError(
            f"Subgroup is not normal: {x}*{a}*{x}^-1 leaves it",
            {"conjugator": x, "element": a, "conjugate": g.conj(x, a)},
        )
    coset_of: Dict[int, int] = {}
    reps: List[int] = []
    for a in range(g.order):
        if a in coset_of:
            continue
        index = len(reps)
        reps.append(a)
        for b in n.elements:
            coset_of[g.op(a, b)] = index
    table = [[coset_of[g.op(r, s)] for s in reps] for r in reps]
    labels = [g.label(r) for r in reps] if g.labels else None
    name = f"{g.name}/N" if g.name else None
    q = FiniteGroup(table, labels=labels, name=name)
    projection = GroupHom(g, q, tuple(coset_of[a] for a in range(g.order)))
    return q, projection


def subgroup_as_group(h: Subgroup, name: Optional[str] = None) -> Tuple[FiniteGroup, GroupHom]:
    """Relabel a subgroup as a standalone table; returns it with its inclusion"""
    g = h.parent
    index = {a: i for i, a in enumerate(h.elements)}
    table = [[index[g.op(a, b)] for b in h.elements] for a in h.elements]
    labels = [g.label(a) for a in h.elements] if g.labels else None
    k = FiniteGroup(table, labels=labels, name=name)
    return k, GroupHom(k, g, tuple(h.elements))


def generating_set(g: FiniteGroup) -> List[int]:
    gens: List[int] = []
    span = trivial_subgroup(g)
    for a in range(g.order):
        if a not in span:
            gens.append(a)
            span = subgroup_closure(g, gens)
    return gens


def conjugacy_class(g: FiniteGroup, a: int) -> frozenset:
    return frozenset(g.conj(h, a) for h in range(g.order))


def normal_subgroups(g: FiniteGroup) -> List[Subgroup]:
    trivial = trivial_subgroup(g)
    found = {trivial.elements: trivial}
    # conjugation-closed generating seeds, kept small so closures stay cheap
    seeds: Dict[Tuple[int, ...], frozenset] = {trivial.elements: frozenset()}
    queue = deque([trivial])
    while queue:
        n = queue.popleft()
        covered = set(n.elements)
        for a in range(g.order):
            if a in covered:
                continue
            covered.update(g.op(a, b) for b in n.elements)
            seed = seeds[n.elements] | conjugacy_class(g, a)
            m = subgroup_closure(g, seed)
            if m.elements not in found:
                found[m.elements] = m
                seeds[m.elements] = seed
                queue.append(m)
    return sorted(found.values(), key=lambda s: (s.order, s.elements))


class FactorKind(Enum):
    TRIVIAL = "trivial"
    ORDER_P = "order_p"


@dataclass(frozen=True)
class ChiefFactor:
    kind: FactorKind
    generator_coset: Optional[int] = None

    @property
    def is_trivial(self) -> bool:
        return self.kind is FactorKind.TRIVIAL


@dataclass(frozen=True)
class ChiefSeries:
    """
    Terms S_0 >= S_1 >= ... >= S_n of one group. Indices past the end read as
    the trivial subgroup, which realises the non-terminating formalism.
    """

    group: FiniteGroup
    terms: Tuple[Subgroup, ...]

    def term(self, k: int) -> Subgroup:
        if k < len(self.terms):
            return self.terms[k]
        return trivial_subgroup(self.group)

    @property
    def length(self) -> int:
        for k, s in enumerate(self.terms):
            if s.is_trivial:
                return k
        return len(self.terms)

    def shifted(self) -> "ChiefSeries":
        rest = self.terms[1:] or (trivial_subgroup(self.group),)
        return ChiefSeries(self.group, rest)

    def padded(self, steps: int) -> "ChiefSeries":
        """Prepend repeats of S_0 so that the series has `steps` steps"""
        missing = steps - (len(self.terms) - 1)
        if missing <= 0:
            return self
        return ChiefSeries(self.group, (self.terms[0],) * missing + self.terms)

    def as_lists(self) -> List[List[int]]:
        return [list(s.elements) for s in self.terms]


def series_from_lists(g: FiniteGroup, terms: Sequence[Iterable[int]]) -> ChiefSeries:
    return ChiefSeries(g, tuple(make_subgroup(g, t) for t in terms))


def verify_chief_series(s: ChiefSeries, p: int) -> ValidationReport:
    report = ValidationReport("chief series")
    g = s.group
    if not s.terms:
        report.add("empty", "series has no terms")
        return report
    if s.terms[0].order != g.order:
        report.add("head", "S_0 is not the whole group", order=s.terms[0].order)
    if not s.terms[-1].is_trivial:
        report.add("tail", "the last listed term is not trivial", index=len(s.terms) - 1)
    for k, term in enumerate(s.terms):
        witness = normality_witness(term)
        if witness is not None:
            report.add("not_normal", f"S_{k} is not normal", level=k, conjugator=witness[0], element=witness[1])
            return report
        if k + 1 < len(s.terms):
            nxt = s.terms[k + 1]
            if not nxt.issubset(term):
                report.add("not_descending", f"S_{k + 1} is not contained in S_{k}", level=k)
                return report
            ratio = term.order // nxt.order
            if ratio not in (1, p):
                report.add("factor_order", f"factor S_{k}/S_{k + 1} has order {ratio}", level=k, order=ratio)
    report.facts["length"] = s.length
    return report


def chief_factor(s: ChiefSeries, k: int) -> ChiefFactor:
    upper, lower = s.term(k), s.term(k + 1)
    if upper.order == lower.order:
        return ChiefFactor(FactorKind.TRIVIAL)
    generator = min(a for a in upper.elements if a not in lower)
    return ChiefFactor(FactorKind.ORDER_P, generator)


def factor_coordinate(s: ChiefSeries, k: int, element: int, p: int) -> FpScalar:
    """The c in F_p with element = generator^c modulo S_{k+1}"""
    upper, lower = s.term(k), s.term(k + 1)
    if element not in upper:
        raise InvariantBreach(f"Element {element} does not lie in S_{k}")
    factor = chief_factor(s, k)
    if factor.is_trivial:
        return 0
    g = s.group
    shift = element
    for c in range(p):
        if shift in lower:
            return c
        shift = g.op(g.inv(factor.generator_coset), shift)
    raise InvariantBreach(f"Factor S_{k}/S_{k + 1} is not cyclic of order {p}")


def enumerate_chief_series(g: FiniteGroup, p: int, steps: int) -> Iterator[ChiefSeries]:
    """
    Every chief series of g with exactly `steps` steps: each proper series
    (index-p steps through normal subgroups) combined with every placement of
    the repeated terms.
    """
    normals = normal_subgroups(g)
    children: Dict[Tuple[int, ...], List[Subgroup]] = {}
    for upper in normals:
        children[upper.elements] = [
            n for n in normals if n.order * p == upper.order and n.issubset(upper)
        ]

    def proper_chains(top: Subgroup) -> Iterator[Tuple[Subgroup, ...]]:
        if top.is_trivial:
            yield (top,)
            return
        for child in children[top.elements]:
            for rest in proper_chains(child):
                yield (top,) + rest

    whole = whole_group(g)
    for chain in proper_chains(whole):
        strict = len(chain) - 1
        if strict > steps:
            continue
        for positions in itertools.combinations(range(steps), strict):
            terms = [whole]
            cursor = 0
            for step in range(steps):
                if cursor < strict and positions[cursor] == step:
                    cursor += 1
                terms.append(chain[cursor])
            yield ChiefSeries(g, tuple(terms))


# Constructors for the standard groups used by problem files and tests.

def from_function(elements: Sequence, mul: Callable, identity=None, labels: Optional[Sequence[str]] = None,
                  name: Optional[str] = None) -> FiniteGroup:
    elements = list(elements)
    if identity is not None:
        k = elements.index(identity)
        order = [k] + [i for i in range(len(elements)) if i != k]
        elements = [elements[i] for i in order]
        if labels is not None:
            labels = [labels[i] for i in order]
    position = {e: i for i, e in enumerate(elements)}
    table = [[position[mul(a, b)] for b in elements] for a in elements]
    return FiniteGroup(table, labels=labels, name=name)


def cyclic_group(n: int, symbol: str = "a", name: Optional[str] = None) -> FiniteGroup:
    labels = ["1", symbol] + [f"{symbol}^{i}" for i in range(2, n)]
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return FiniteGroup(table, labels=labels[:n], name=name or f"C{n}")


def elementary_abelian(p: int, m: int, name: Optional[str] = None) -> FiniteGroup:
    vectors = list(itertools.product(range(p), repeat=m))
    return from_function(vectors, lambda u, v: tuple((a + b) % p for a, b in zip(u, v)),
                         identity=(0,) * m, name=name or f"C{p}^{m}")


def direct_product(g: FiniteGroup, h: FiniteGroup, name: Optional[str] = None) -> FiniteGroup:
    pairs = [(a, b) for a in range(g.order) for b in range(h.order)]
    labels = [f"({g.label(a)},{h.label(b)})" for a, b in pairs]
    return from_function(pairs, lambda u, v: (g.op(u[0], v[0]), h.op(u[1], v[1])),
                         labels=labels, name=name or f"{g.name}x{h.name}")


def dihedral_group(n: int, name: Optional[str] = None) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n; rotation r, reflection s"""
    elements = [(i, j) for j in range(2) for i in range(n)]

    def label(i, j):
        rotation = {0: "", 1: "r"}.get(i, f"r^{i}")
        return rotation + ("s" if j else "") or "1"

    labels = [label(i, j) for i, j in elements]

    def mul(u, v):
        (i, j), (k, l) = u, v
        return ((i + (k if j == 0 else -k)) % n, (j + l) % 2)

    return from_function(elements, mul, labels=labels, name=name or f"D{n}")


def heisenberg_group(p: int, name: Optional[str] = None) -> FiniteGroup:
    """Upper unitriangular 3x3 matrices over F_p"""
    triples = list(itertools.product(range(p), repeat=3))
    return from_function(
        triples,
        lambda u, v: ((u[0] + v[0]) % p, (u[1] + v[1]) % p, (u[2] + v[2] + u[0] * v[1]) % p),
        identity=(0, 0, 0),
        name=name or f"Heis{p}",
    )


def permutation_group_elements(generators: Sequence[Sequence[int]]) -> List[Permutation]:
    """All elements of the generated permutation group, sorted by array form"""
    degree = max(len(gen) for gen in generators)
    group = PermutationGroup([Permutation(list(gen), size=degree) for gen in generators])
    return sorted(group.generate(), key=lambda q: tuple(q.array_form))


def from_permutations(generators: Sequence[Sequence[int]], name: Optional[str] = None) -> FiniteGroup:
    """
    Compile a permutation group into a table; elements sorted by array form,
    so the identity lands at index 0. Products compose right-to-left: (ab)(x) = a(b(x)).
    """
    elements = permutation_group_elements(generators)
    position = {tuple(q.array_form): i for i, q in enumerate(elements)}
    # sympy multiplies left-to-right, so a∘b is b*a
    table = [[position[tuple((b * a).array_form)] for b in elements] for a in elements]
    return FiniteGroup(table, name=name)


def quaternion_group(name: Optional[str] = None) -> FiniteGroup:
    i = [2, 3, 1, 0, 6, 7, 5, 4]
    j = [4, 5, 7, 6, 1, 0, 2, 3]
    return from_permutations([i, j], name=name or "Q8")


GROUP_CONSTRUCTORS: Dict[str, Callable[..., FiniteGroup]] = {
    "cyclic": lambda n: cyclic_group(int(n)),
    "dihedral": lambda n: dihedral_group(int(n)),
    "elementary_abelian": lambda args: elementary_abelian(int(args[0]), int(args[1])),
    "heisenberg": lambda p: heisenberg_group(int(p)),
    "quaternion": lambda _: quaternion_group(),
}

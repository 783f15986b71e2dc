"""
Independent oracles: normal forms of the small amalgam / HNN fixtures,
homomorphism enumeration into small p-groups and the Nielsen-Schreier rank.
None of these use the reduction or descent code under test.
"""

import itertools
from typing import Dict, Iterator, List, Tuple

from gogsep.gog import GWord, StableLetter, VertexLetter
from gogsep.pgroups import (
    FiniteGroup,
    cyclic_group,
    dihedral_group,
    direct_product,
    elementary_abelian,
    from_function,
    heisenberg_group,
    quaternion_group,
)


def amalgam_normal_form(w: GWord) -> Tuple[Tuple[str, ...], int]:
    """
    C4 *_{C2} C4 with a^2 = b^2 (vertex u carries a, v carries b). An element
    is written t1...tn * c with t_i alternating in {a, b} and c in {1, a^2};
    the pair (sides, c) is unique.
    """
    sides: List[str] = []
    eps = 0
    for letter in w.letters:
        if not isinstance(letter, VertexLetter):
            raise ValueError("the amalgam has no stable letters")
        side = "A" if letter.vertex == "u" else "B"
        h = 2 * eps + letter.element
        if sides and sides[-1] == side:
            sides.pop()
            h += 1
        h %= 4
        rep = h % 2
        eps = (h - rep) // 2 % 2
        if rep:
            sides.append(side)
    return tuple(sides), eps


def hnn_normal_form(w: GWord) -> Tuple[int, int]:
    """<a, t | a^3, t a t^-1 = a^2> is C3 x| Z; every element is a^i t^n uniquely"""
    i, n = 0, 0
    for letter in w.letters:
        if isinstance(letter, VertexLetter):
            j, m = letter.element, 0
        elif isinstance(letter, StableLetter):
            j, m = 0, letter.exponent
        else:
            raise ValueError("not a word letter")
        i = (i + (j if n % 2 == 0 else -j)) % 3
        n += m
    return i, n


def metacyclic_27() -> FiniteGroup:
    """C9 x| C3 with the generator of C3 acting by x -> x^4"""
    elements = [(i, j) for i in range(9) for j in range(3)]

    def mul(u, v):
        (i, j), (k, l) = u, v
        return ((i + pow(4, j, 9) * k) % 9, (j + l) % 3)

    return from_function(elements, mul, identity=(0, 0), name="M27")


def three_groups_up_to_27() -> List[FiniteGroup]:
    """Every group of order 3, 9 and 27 up to isomorphism"""
    return [
        cyclic_group(3),
        cyclic_group(9),
        elementary_abelian(3, 2),
        cyclic_group(27),
        direct_product(cyclic_group(9), cyclic_group(3)),
        elementary_abelian(3, 3),
        heisenberg_group(3),
        metacyclic_27(),
    ]


def hnn_homomorphisms(target: FiniteGroup) -> Iterator[Tuple[int, int]]:
    """Images (a, t) of every homomorphism <a, t | a^3, t a t^-1 = a^2> -> target"""
    for a, t in itertools.product(range(target.order), repeat=2):
        if target.power(a, 3) != 0:
            continue
        if target.conj(t, a) == target.op(a, a):
            yield a, t


def nielsen_schreier_rank(rank: int, index: int) -> int:
    """Rank of an index-`index` subgroup of the free group of rank `rank`"""
    return index * (rank - 1) + 1


def _order_16_maximal_class(twist: int, square: int) -> FiniteGroup:
    """<r, s | r^8, s^2 = r^square, s r s^-1 = r^twist>, elements r^i s^j"""
    elements = [(i, j) for j in range(2) for i in range(8)]

    def mul(u, v):
        (i, j), (k, l) = u, v
        rotation = i + (twist * k if j else k) + (square if j and l else 0)
        return (rotation % 8, (j + l) % 2)

    return from_function(elements, mul, identity=(0, 0))


def small_two_groups() -> List[FiniteGroup]:
    """Every 2-group of order at most 8, and the dihedral, semidihedral and quaternion groups of order 16"""
    return [
        cyclic_group(2),
        cyclic_group(4),
        elementary_abelian(2, 2),
        cyclic_group(8),
        direct_product(cyclic_group(4), cyclic_group(2)),
        elementary_abelian(2, 3),
        dihedral_group(4),
        quaternion_group(),
        dihedral_group(8),
        _order_16_maximal_class(3, 0),
        _order_16_maximal_class(7, 4),
    ]


def vertex_homomorphisms(target: FiniteGroup, order: int, amalgamated: bool) -> Iterator[Dict[str, int]]:
    """
    Images of the generators of C_n * C_n (vertices u, v) in target, or of
    C_n *_{C_2} C_n with the squares identified when `amalgamated`
    """
    roots = [g for g in range(target.order) if target.power(g, order) == 0]
    for a, b in itertools.product(roots, repeat=2):
        if amalgamated and target.power(a, order // 2) != target.power(b, order // 2):
            continue
        yield {"u": a, "v": b}


def evaluate(target: FiniteGroup, images: Dict[str, int], w: GWord) -> int:
    value = 0
    for letter in w.letters:
        value = target.op(value, target.power(images[letter.vertex], letter.element))
    return value

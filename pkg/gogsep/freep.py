"""
Free groups are residually p: the Magnus map x_i -> 1 + X_i into truncated
noncommutative polynomials over F_p. The unit group of the truncated algebra
is a finite p-group, so a nonconstant term in the image of w separates w.
"""

import logging
import re
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import sympy

from gogsep.errors import BudgetExceeded, InputError, MalformedWordError, TrivialWordError

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]


@dataclass(frozen=True)
class TruncatedPoly:
    rank: int
    degree: int
    prime: int
    coefficients: Dict[Monomial, int]

    @classmethod
    def one(cls, rank: int, degree: int, prime: int) -> "TruncatedPoly":
        return cls(rank, degree, prime, {(): 1})

    @classmethod
    def generator(cls, i: int, exponent: int, rank: int, degree: int, prime: int) -> "TruncatedPoly":
        """Image of x_i (1 + X_i) or of x_i^-1 (1 - X_i + X_i^2 - ...)"""
        if exponent == 1:
            coefficients = {(): 1}
            if degree >= 1:
                coefficients[(i,)] = 1
            return cls(rank, degree, prime, coefficients)
        coefficients = {}
        for j in range(degree + 1):
            c = (-1) ** j % prime
            if c:
                coefficients[(i,) * j] = c
        return cls(rank, degree, prime, coefficients)

    def __mul__(self, other: "TruncatedPoly") -> "TruncatedPoly":
        product: Dict[Monomial, int] = {}
        for m1, c1 in self.coefficients.items():
            for m2, c2 in other.coefficients.items():
                if len(m1) + len(m2) > self.degree:
                    continue
                m = m1 + m2
                product[m] = (product.get(m, 0) + c1 * c2) % self.prime
        return TruncatedPoly(self.rank, self.degree, self.prime, {m: c for m, c in product.items() if c})

    def __sub__(self, other: "TruncatedPoly") -> "TruncatedPoly":
        difference = dict(self.coefficients)
        for m, c in other.coefficients.items():
            difference[m] = (difference.get(m, 0) - c) % self.prime
        return TruncatedPoly(self.rank, self.degree, self.prime, {m: c for m, c in difference.items() if c})

    def coefficient(self, m: Monomial) -> int:
        return self.coefficients.get(tuple(m), 0)

    @property
    def is_one(self) -> bool:
        return self.coefficients == {(): 1}

    def nonconstant_terms(self) -> List[Tuple[Monomial, int]]:
        return sorted(((m, c) for m, c in self.coefficients.items() if m), key=lambda t: (len(t[0]), t[0]))

    def format(self) -> str:
        def term(m, c):
            body = "".join(f"X{i}" for i in m) or "1"
            return body if c == 1 else f"{c}*{body}"
        return " + ".join(term(m, c) for m, c in sorted(self.coefficients.items(), key=lambda t: (len(t[0]), t[0])))


@dataclass(frozen=True)
class MagnusWitness:
    prime: int
    rank: int
    degree: int
    monomial: Monomial
    coefficient: int

    def to_dict(self) -> Dict:
        return {"prime": self.prime, "rank": self.rank, "degree": self.degree,
                "monomial": list(self.monomial), "coefficient": self.coefficient}

    @classmethod
    def from_dict(cls, data: Dict) -> "MagnusWitness":
        return cls(int(data["prime"]), int(data["rank"]), int(data["degree"]),
                   tuple(int(i) for i in data["monomial"]), int(data["coefficient"]))


def free_reduce(word: Sequence[int]) -> List[int]:
    stack: List[int] = []
    for letter in word:
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return stack


def check_free_word(word: Sequence[int], rank: int) -> None:
    for letter in word:
        if letter == 0 or abs(letter) > rank:
            raise MalformedWordError(f"letter {letter} is not a generator of the free group of rank {rank}")


def magnus_image(word: Sequence[int], rank: int, degree: int, prime: int) -> TruncatedPoly:
    """Letters are +-i for x_i^(+-1), 1 <= i <= rank"""
    if degree < 1:
        raise MalformedWordError("Magnus degree must be at least 1")
    check_free_word(word, rank)
    image = TruncatedPoly.one(rank, degree, prime)
    for letter in word:
        image = image * TruncatedPoly.generator(abs(letter), 1 if letter > 0 else -1, rank, degree, prime)
    return image


def separate_free(word: Sequence[int], rank: int, prime: int, cap: int = 64) -> MagnusWitness:
    """Deepen the truncation until the image of w differs from 1"""
    if not sympy.isprime(prime):
        raise InputError(f"{prime} is not a prime")
    check_free_word(word, rank)
    reduced = free_reduce(word)
    if not reduced:
        raise TrivialWordError("free word reduces to the identity")
    for degree in range(1, cap + 1):
        terms = magnus_image(reduced, rank, degree, prime).nonconstant_terms()
        if terms:
            monomial, coefficient = terms[0]
            logger.debug("Magnus witness at degree %d: %s", degree, monomial)
            return MagnusWitness(prime, rank, degree, monomial, coefficient)
    raise BudgetExceeded(f"no Magnus witness up to degree {cap} for a word of length {len(reduced)}")


def verify_magnus_witness(word: Sequence[int], witness: MagnusWitness) -> bool:
    image = magnus_image(free_reduce(word), witness.rank, witness.degree, witness.prime)
    if witness.coefficient % witness.prime == 0 or not witness.monomial:
        return False
    return image.coefficient(witness.monomial) == witness.coefficient % witness.prime


_TOKEN = re.compile(r"^x(\d+)(?:\^(-?1))?$")


def parse_free_word(text: str, rank: int) -> List[int]:
    """`x1 x2^-1 x1` style free words"""
    word = []
    for token in text.split():
        match = _TOKEN.match(token)
        if not match:
            raise MalformedWordError(f"token '{token}' is not of the form xI or xI^-1")
        letter = int(match.group(1))
        word.append(-letter if match.group(2) == "-1" else letter)
    check_free_word(word, rank)
    return word


def format_free_word(word: Sequence[int]) -> str:
    return " ".join(f"x{abs(i)}" if i > 0 else f"x{abs(i)}^-1" for i in word) or "1"

"""
Inductive descent separating a nontrivial element into a finite p-quotient

Each step evaluates the level homomorphism Phi on the current word. A nonzero
value separates the word. Otherwise the word is rewritten into the index-p
kernel cover, whose chief series are one level shorter, and the descent
continues; once every vertex group is trivial the word lies in a free group
and the Magnus map finishes the job. The certificate records every step so
that it can be replayed independently.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple, Union

import sympy
from sympy.combinatorics import Permutation, PermutationGroup

from gogsep.compat import LevelMaps, SeriesAssignment, check_compliance
from gogsep.cover import (
    KernelCover,
    LevelHom,
    build_kernel_cover,
    build_level_hom,
    embed_word,
    eval_level_hom,
    rewrite_into_kernel,
    shift_series,
)
from gogsep.errors import (
    BudgetExceeded,
    ConditionError,
    GogSepError,
    InvariantBreach,
    ProblemFileError,
    TrivialWordError,
)
from gogsep.freep import MagnusWitness, magnus_image, separate_free, verify_magnus_witness
from gogsep.gog import (
    GraphOfGroups,
    GWord,
    SpanningData,
    StableLetter,
    VertexLetter,
    check_word,
    free_word,
    invert_word,
    reduce_word,
    relation_words,
    word_from_tokens,
    word_to_tokens,
    words_equal,
)
from gogsep.pgroups import FiniteGroup, from_permutations, generating_set

logger = logging.getLogger(__name__)

CERTIFICATE_FORMAT = 1


class Outcome(Enum):
    SEPARATED = "separated"
    SHIFTED = "shifted"
    DESCENDED = "descended"


@dataclass(frozen=True)
class DescentStep:
    level: int
    word: GWord
    level_hom: Dict[str, Any]
    value: int
    outcome: Outcome
    rewritten: Optional[GWord] = None

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "level": self.level,
            "outcome": self.outcome.value,
            "basepoint": self.word.basepoint,
            "word": word_to_tokens(self.word),
            "value": self.value,
            "level_hom": self.level_hom,
        }
        if self.rewritten is not None:
            data["rewritten"] = {"basepoint": self.rewritten.basepoint, "word": word_to_tokens(self.rewritten)}
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DescentStep":
        rewritten = data.get("rewritten")
        return cls(
            level=int(data["level"]),
            word=word_from_tokens(data["word"], data["basepoint"]),
            level_hom=data["level_hom"],
            value=int(data["value"]),
            outcome=Outcome(data["outcome"]),
            rewritten=word_from_tokens(rewritten["word"], rewritten["basepoint"]) if rewritten else None,
        )


@dataclass(frozen=True)
class LevelWitness:
    scalar: int

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": "level", "scalar": self.scalar}


@dataclass(frozen=True)
class FreeWitness:
    generators: Tuple[str, ...]
    letters: Tuple[int, ...]
    magnus: MagnusWitness

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": "free", "generators": list(self.generators), "letters": list(self.letters),
                "magnus": self.magnus.to_dict()}


Terminal = Union[LevelWitness, FreeWitness]


@dataclass(frozen=True)
class SeparationCertificate:
    prime: int
    word: GWord
    steps: Tuple[DescentStep, ...]
    terminal: Terminal
    covers: Tuple[KernelCover, ...] = field(default=(), compare=False, repr=False)

    @property
    def depth(self) -> int:
        return len(self.steps) + (1 if isinstance(self.terminal, FreeWitness) else 0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "format_version": CERTIFICATE_FORMAT,
            "prime": self.prime,
            "basepoint": self.word.basepoint,
            "word": word_to_tokens(self.word),
            "depth": self.depth,
            "steps": [s.to_dict() for s in self.steps],
            "terminal": self.terminal.to_dict(),
        }


def certificate_to_dict(cert: SeparationCertificate) -> Dict[str, Any]:
    """JSON form of a certificate, read back by certificate_from_dict"""
    return cert.to_dict()


def certificate_from_dict(data: Dict[str, Any]) -> SeparationCertificate:
    try:
        if data.get("format_version") != CERTIFICATE_FORMAT:
            raise ProblemFileError(f"unsupported certificate format_version {data.get('format_version')!r}")
        terminal_data = data["terminal"]
        if terminal_data["kind"] == "level":
            terminal: Terminal = LevelWitness(int(terminal_data["scalar"]))
        elif terminal_data["kind"] == "free":
            terminal = FreeWitness(
                tuple(terminal_data["generators"]),
                tuple(int(i) for i in terminal_data["letters"]),
                MagnusWitness.from_dict(terminal_data["magnus"]),
            )
        else:
            raise ProblemFileError(f"unknown terminal witness kind {terminal_data['kind']!r}")
        return SeparationCertificate(
            prime=int(data["prime"]),
            word=word_from_tokens(data["word"], data["basepoint"]),
            steps=tuple(DescentStep.from_dict(s) for s in data["steps"]),
            terminal=terminal,
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ProblemFileError(f"malformed certificate: {e}")


@dataclass
class _Stage:
    """One level of the descent: the group data in force and what was done there"""

    gg: GraphOfGroups
    sd: SpanningData
    sa: SeriesAssignment
    lm: LevelMaps


def separate(gg: GraphOfGroups, sd: SpanningData, sa: SeriesAssignment, lm: LevelMaps, w: GWord,
             magnus_cap: int = 64) -> SeparationCertificate:
    check_word(gg, w)
    word = reduce_word(gg, sd, w)
    if word.is_empty:
        raise TrivialWordError("word reduces to the identity; there is nothing to separate")
    if not check_compliance(gg, sd, sa, lm).ok:
        raise ConditionError("conditions I and II do not hold for the given series and level maps")

    guard = sa.length_bound + 1
    stage = _Stage(gg, sd, sa, lm)
    steps: List[DescentStep] = []
    covers: List[KernelCover] = []
    while True:
        if stage.gg.is_free():
            letters, generators = free_word(stage.gg, stage.sd, word)
            witness = separate_free(letters, len(generators), gg.prime, cap=magnus_cap)
            terminal: Terminal = FreeWitness(tuple(generators), tuple(letters), witness)
            break
        if len(steps) >= guard:
            raise InvariantBreach(f"descent did not reach the free stage within {guard} steps")
        ph = build_level_hom(stage.gg, stage.sd, stage.sa, stage.lm, force_surjective=True)
        value = eval_level_hom(ph, word)
        level = len(steps)
        if value:
            steps.append(DescentStep(level, word, ph.to_dict(), value, Outcome.SEPARATED))
            terminal = LevelWitness(value)
            break
        if not ph.is_surjective:
            sa_next, lm_next = shift_series(stage.sa, stage.lm)
            steps.append(DescentStep(level, word, ph.to_dict(), 0, Outcome.SHIFTED))
            stage = _Stage(stage.gg, stage.sd, sa_next, lm_next)
            logger.debug("level %d: every level-0 factor is trivial, series shifted", level)
            continue
        kc = build_kernel_cover(stage.gg, stage.sd, stage.sa, stage.lm, ph)
        rewritten = rewrite_into_kernel(kc, word)
        steps.append(DescentStep(level, word, ph.to_dict(), 0, Outcome.DESCENDED, rewritten))
        covers.append(kc)
        logger.info("level %d: descended into a cover with %d vertices", level, len(kc.cover_gg.graph.vertices))
        stage = _Stage(kc.cover_gg, kc.cover_sd, kc.shifted_series, kc.level_maps)
        word = rewritten

    return SeparationCertificate(gg.prime, w, tuple(steps), terminal, tuple(covers))


@dataclass(frozen=True)
class VerificationResult:
    ok: bool
    step: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> Dict[str, Any]:
        return {"valid": self.ok, "step": self.step, "reason": self.reason}


def verify_certificate(gg: GraphOfGroups, sd: SpanningData, sa: SeriesAssignment, lm: LevelMaps, w: GWord,
                       cert: SeparationCertificate) -> VerificationResult:
    """Replay every step from scratch; the first discrepancy is reported"""
    index = 0
    try:
        if cert.prime != gg.prime:
            return VerificationResult(False, 0, f"certificate is for p={cert.prime}, group data for p={gg.prime}")
        if not cert.steps and not isinstance(cert.terminal, FreeWitness):
            return VerificationResult(False, 0, "certificate has neither steps nor a free witness")
        if reduce_word(gg, sd, w).is_empty:
            return VerificationResult(False, 0, "word is trivial")
        if not check_compliance(gg, sd, sa, lm).ok:
            return VerificationResult(False, 0, "conditions I and II do not hold")
        stage = _Stage(gg, sd, sa, lm)
        current = w
        for index, step in enumerate(cert.steps):
            if stage.gg.is_free():
                return VerificationResult(False, index, "descent step recorded after the free stage")
            if not words_equal(stage.gg, stage.sd, step.word, current):
                return VerificationResult(False, index, "step word does not represent the current element")
            ph = build_level_hom(stage.gg, stage.sd, stage.sa, stage.lm, force_surjective=True)
            if ph.to_dict() != step.level_hom:
                return VerificationResult(False, index, "level homomorphism does not match")
            value = eval_level_hom(ph, step.word)
            if value != step.value % gg.prime:
                return VerificationResult(False, index, f"level value is {value}, certificate says {step.value}")
            if step.outcome is Outcome.SEPARATED:
                last = index == len(cert.steps) - 1
                if not value or not last or cert.terminal != LevelWitness(value):
                    return VerificationResult(False, index, "separating step does not end the certificate with its scalar")
                return VerificationResult(True)
            if value:
                return VerificationResult(False, index, "nonzero level value on a non-separating step")
            if step.outcome is Outcome.SHIFTED:
                if ph.is_surjective:
                    return VerificationResult(False, index, "series shifted although the level homomorphism is surjective")
                stage = _Stage(stage.gg, stage.sd, *shift_series(stage.sa, stage.lm))
                continue
            kc = build_kernel_cover(stage.gg, stage.sd, stage.sa, stage.lm, ph)
            if step.rewritten is None or not words_equal(stage.gg, stage.sd, embed_word(kc, step.rewritten), step.word):
                return VerificationResult(False, index, "rewritten word does not embed onto the step word")
            stage = _Stage(kc.cover_gg, kc.cover_sd, kc.shifted_series, kc.level_maps)
            current = step.rewritten

        index = len(cert.steps)
        terminal = cert.terminal
        if not isinstance(terminal, FreeWitness):
            return VerificationResult(False, index, "level witness without a separating step")
        if not stage.gg.is_free():
            return VerificationResult(False, index, "free witness before the vertex groups became trivial")
        letters, generators = free_word(stage.gg, stage.sd, current)
        if tuple(generators) != terminal.generators or tuple(letters) != terminal.letters:
            return VerificationResult(False, index, "free word does not match the terminal witness")
        if not verify_magnus_witness(letters, terminal.magnus):
            return VerificationResult(False, index, "Magnus coefficient does not reproduce")
        return VerificationResult(True)
    except GogSepError as e:
        return VerificationResult(False, index, f"{type(e).__name__}: {e}")


# Explicit finite p-quotient by coset action

class _Replay:
    """Membership in the terminal subgroup U, decided by replaying the descent"""

    def __init__(self, gg, sd, sa, lm, cert: SeparationCertificate):
        self.prime = gg.prime
        self.stages: List[Tuple[Outcome, LevelHom, Optional[KernelCover]]] = []
        stage = _Stage(gg, sd, sa, lm)
        for step in cert.steps:
            ph = build_level_hom(stage.gg, stage.sd, stage.sa, stage.lm, force_surjective=True)
            kc = None
            if step.outcome is Outcome.SHIFTED:
                stage = _Stage(stage.gg, stage.sd, *shift_series(stage.sa, stage.lm))
            elif step.outcome is Outcome.DESCENDED:
                kc = build_kernel_cover(stage.gg, stage.sd, stage.sa, stage.lm, ph)
                stage = _Stage(kc.cover_gg, kc.cover_sd, kc.shifted_series, kc.level_maps)
            self.stages.append((step.outcome, ph, kc))
        self.final = stage
        self.terminal = cert.terminal
        self.first = self.stages[0][1] if self.stages else None

    def level0(self, u: GWord) -> int:
        return eval_level_hom(self.first, u) if self.first is not None else 0

    def contains(self, u: GWord) -> bool:
        word = u
        for outcome, ph, kc in self.stages:
            if eval_level_hom(ph, word):
                return False
            if outcome is Outcome.DESCENDED:
                word = rewrite_into_kernel(kc, word)
        if isinstance(self.terminal, FreeWitness):
            letters, generators = free_word(self.final.gg, self.final.sd, word)
            witness = self.terminal.magnus
            return not letters or magnus_image(letters, len(generators), witness.degree, self.prime).is_one
        return True


@dataclass
class ExplicitQuotient:
    group: FiniteGroup
    cosets: int
    generator_map: Dict[str, List[int]]
    word_image: List[int]
    relations_checked: int

    @property
    def order(self) -> int:
        return self.group.order

    def to_dict(self) -> Dict[str, Any]:
        return {
            "order": self.order,
            "cosets": self.cosets,
            "generator_map": self.generator_map,
            "word_image": self.word_image,
            "word_image_is_identity": self.word_image == list(range(self.cosets)),
            "relations_checked": self.relations_checked,
        }


def _letter_name(gg: GraphOfGroups, letter) -> str:
    if isinstance(letter, VertexLetter):
        return f"{letter.vertex}:{gg.vertex_group(letter.vertex).label(letter.element)}"
    return letter.edge if letter.exponent == 1 else f"{letter.edge}^-1"


def build_explicit_quotient(gg: GraphOfGroups, sd: SpanningData, sa: SeriesAssignment, lm: LevelMaps, w: GWord,
                            cert: SeparationCertificate, max_cosets: int = 64,
                            max_order: int = 512) -> ExplicitQuotient:
    """
    Left action of G on G/U for the certificate's terminal subgroup U. The
    image is G/core(U), a finite p-group in which w acts nontrivially.
    """
    replay = _Replay(gg, sd, sa, lm, cert)
    base = sd.base
    letters: List = []
    for x in gg.graph.vertices:
        for g in generating_set(gg.vertex_group(x)):
            letters.append(VertexLetter(x, g))
    for y in sd.non_tree_generators():
        letters.extend((StableLetter(y, 1), StableLetter(y, -1)))
    words = [GWord(base, (letter,)) for letter in letters]

    reps: List[GWord] = [GWord(base)]
    level0 = [0]
    action: List[List[int]] = [[] for _ in words]
    i = 0
    while i < len(reps):
        for j, s in enumerate(words):
            candidate = s + reps[i]
            value = replay.level0(candidate)
            target = None
            for r, rep in enumerate(reps):
                if level0[r] == value and replay.contains(invert_word(gg, rep) + candidate):
                    target = r
                    break
            if target is None:
                if len(reps) >= max_cosets:
                    raise BudgetExceeded(f"coset enumeration exceeded {max_cosets} cosets")
                target = len(reps)
                reps.append(reduce_word(gg, sd, candidate))
                level0.append(value)
            action[j].append(target)
        i += 1
    n = len(reps)
    logger.info("coset enumeration closed with %d cosets", n)

    perms = {j: Permutation(action[j], size=n) for j in range(len(words))}
    group = PermutationGroup(list(perms.values()) or [Permutation(list(range(n)))])
    order = int(group.order())
    if order > max_order:
        raise BudgetExceeded(f"quotient of order {order} exceeds {max_order}")
    factors = sympy.factorint(order)
    if order > 1 and set(factors) != {gg.prime}:
        raise InvariantBreach(f"quotient has order {order}, not a power of {gg.prime}")

    cache: Dict = {letter: action[j] for j, letter in enumerate(letters)}

    def act(word: GWord) -> List[int]:
        image = list(range(n))
        for letter in reversed(word.letters):
            if letter not in cache:
                cache[letter] = _letter_action(gg, replay, reps, level0, letter)
            moved = cache[letter]
            image = [moved[r] for r in image]
        return image

    generator_map = {_letter_name(gg, letter): action[j] for j, letter in enumerate(letters)}
    for x in gg.graph.vertices:
        for g in range(1, gg.vertex_group(x).order):
            letter = VertexLetter(x, g)
            generator_map.setdefault(_letter_name(gg, letter), act(GWord(base, (letter,))))

    relations = relation_words(gg, sd)
    for relation in relations:
        if act(relation) != list(range(n)):
            raise InvariantBreach("a defining relation acts nontrivially on the cosets")
    word_image = act(w)
    if word_image == list(range(n)):
        raise InvariantBreach("the separated word acts trivially on the cosets")

    quotient = from_permutations([list(p.array_form) for p in perms.values()] or [list(range(n))])
    return ExplicitQuotient(quotient, n, generator_map, word_image, len(relations))


def _letter_action(gg: GraphOfGroups, replay: _Replay, reps: List[GWord], level0: List[int], letter) -> List[int]:
    """Coset permutation of one letter: r -> index of letter * reps[r]"""
    moved = []
    for rep in reps:
        candidate = GWord(rep.basepoint, (letter,)) + rep
        value = replay.level0(candidate)
        target = next(
            (k for k, other in enumerate(reps)
             if level0[k] == value and replay.contains(invert_word(gg, other) + candidate)),
            None,
        )
        if target is None:
            raise InvariantBreach("coset table is not closed under a letter")
        moved.append(target)
    return moved

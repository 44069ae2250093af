"""Words of the asymptotic free algebra and their rewriting rules.

A word is a product of letters ``X_j``: an observable of a single model placed
in copy ``j`` of the free product.  Reduction drops identity letters, pulls
scalars out of one-term letters and merges neighbouring letters of the same
copy with the model's operator product.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .models.base import Element, ModelSystem
from .scalars import conj, format_scalar, parse_scalar


@dataclass(frozen=True)
class Letter:
    observable: Element
    copy: int

    def __post_init__(self):
        if not isinstance(self.copy, int) or self.copy < 1:
            raise ValueError(f"copy index must be a positive integer, got {self.copy!r}")

    def __str__(self):
        return f"{self.observable.model.format_element(self.observable)}@{self.copy}"


@dataclass(frozen=True)
class Word:
    letters: tuple[Letter, ...] = ()
    scalar: object = Fraction(1)

    @property
    def model(self):
        return self.letters[0].observable.model if self.letters else None

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(letter.copy for letter in self.letters)

    def is_zero(self) -> bool:
        return self.scalar == 0

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters, self.scalar * other.scalar)

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return format_word(self)


def word(*pairs, scalar=Fraction(1)) -> Word:
    """Build a word from (observable, copy) pairs."""
    return Word(tuple(Letter(x, j) for x, j in pairs), scalar)


@dataclass(frozen=True)
class LabelMap:
    """Copy-index sequence nu(1..n) of a word."""

    nu: tuple[int, ...]

    def is_normalized(self) -> bool:
        seen: set[int] = set()
        for value in self.nu:
            if any(ell not in seen for ell in range(1, value)):
                return False
            seen.add(value)
        return True

    @property
    def arity(self) -> int:
        return max(self.nu, default=0)


@dataclass(frozen=True)
class MultiTimeShift:
    """Integer time shifts per copy index; copies not listed are not moved."""

    shifts: Mapping[int, int] = field(default_factory=dict)

    def __getitem__(self, j: int) -> int:
        return self.shifts.get(j, 0)


class FreeElement:
    """Finite linear combination of reduced words with merged like terms."""

    def __init__(self, terms=None):
        self.terms: dict[tuple[Letter, ...], object] = {}
        for w in terms or ():
            self.add(w)

    def add(self, w: Word):
        w = reduce(w)
        if w.is_zero():
            return
        total = self.terms.get(w.letters, 0) + w.scalar
        if total == 0:
            self.terms.pop(w.letters, None)
        else:
            self.terms[w.letters] = total

    def words(self) -> list[Word]:
        return [Word(letters, c) for letters, c in self.terms.items()]

    def __add__(self, other: "FreeElement") -> "FreeElement":
        out = FreeElement(self.words())
        for w in other.words():
            out.add(w)
        return out

    def __mul__(self, other: "FreeElement") -> "FreeElement":
        return FreeElement(u * v for u in self.words() for v in other.words())

    def adjoint(self) -> "FreeElement":
        return FreeElement(adjoint(w) for w in self.words())

    def __len__(self):
        return len(self.terms)


def _model_of(letters: Sequence[Letter]) -> ModelSystem | None:
    model = None
    for letter in letters:
        m = letter.observable.model
        if model is None:
            model = m
        elif m is not model:
            raise ValueError(
                f"word mixes observables of different models ({model.kind} and {m.kind})"
            )
    return model


def reduce(w: Word) -> Word:
    """Reduced form: identities dropped, scalars factored, same-copy neighbours merged."""
    _model_of(w.letters)
    scalar = w.scalar
    if scalar == 0:
        return Word((), scalar)
    stack: list[Letter] = []
    for letter in w.letters:
        x, j = letter.observable, letter.copy
        while True:
            if stack and stack[-1].copy == j:
                x = x.model.product(stack.pop().observable, x)
            if x.is_zero():
                return Word((), Fraction(0))
            single = x.single_term()
            if single is not None:
                c, b = single
                if c != 1:
                    scalar = scalar * c
                    x = x.model.basis_element(b)
                if b == x.model.identity_basis:
                    x = None
                    break
            if stack and stack[-1].copy == j:
                continue
            break
        if x is not None:
            stack.append(Letter(x, j))
    return Word(tuple(stack), scalar)


def is_reduced(w: Word) -> bool:
    for a, b in zip(w.letters, w.letters[1:]):
        if a.copy == b.copy:
            return False
    for letter in w.letters:
        single = letter.observable.single_term()
        if letter.observable.is_zero():
            return False
        if single is not None and (single[0] != 1 or single[1] == letter.observable.model.identity_basis):
            return False
    return True


def expand(w: Word) -> FreeElement:
    """Distribute multi-term letters into a sum of words with one-term letters."""
    partial = [((), w.scalar)]
    for letter in w.letters:
        nxt = []
        for letters, c in partial:
            for b, coef in letter.observable.terms.items():
                x = letter.observable.model.basis_element(b)
                nxt.append((letters + (Letter(x, letter.copy),), c * coef))
        partial = nxt
    return FreeElement(Word(letters, c) for letters, c in partial)


def adjoint(w: Word) -> Word:
    letters = tuple(
        Letter(letter.observable.model.adjoint(letter.observable), letter.copy)
        for letter in reversed(w.letters)
    )
    return Word(letters, conj(w.scalar))


def normalize_labels(w: Word) -> tuple[Word, LabelMap]:
    """Pad with identity letters so every smaller label occurs earlier."""
    model = _model_of(w.letters)
    seen: set[int] = set()
    letters: list[Letter] = []
    for letter in w.letters:
        for ell in range(1, letter.copy):
            if ell not in seen:
                letters.append(Letter(model.one(), ell))
                seen.add(ell)
        letters.append(letter)
        seen.add(letter.copy)
    padded = Word(tuple(letters), w.scalar)
    return padded, LabelMap(padded.labels)


def relabel(w: Word, mapping: Callable[[int], int]) -> Word:
    letters = tuple(Letter(letter.observable, mapping(letter.copy)) for letter in w.letters)
    return reduce(Word(letters, w.scalar))


def _as_function(pi) -> Callable[[int], int]:
    if callable(pi):
        return pi
    return lambda j: pi.get(j, j)


def apply_permutation(w: Word, pi: Mapping[int, int]) -> Word:
    """Relabel copy indices by a local permutation given on its moved points."""
    keys, values = set(pi), set(pi.values())
    if keys != values or any(j < 1 for j in keys):
        raise ValueError(f"{dict(pi)!r} is not a bijection of the positive integers")
    return relabel(w, _as_function(pi))


def apply_injection(w: Word, theta: Mapping[int, int]) -> Word:
    """Relabel by an order preserving injection given on the labels of ``w``."""
    domain = sorted(set(w.labels))
    missing = [j for j in domain if j not in theta]
    if missing:
        raise ValueError(f"injection undefined on labels {missing}")
    images = [theta[j] for j in sorted(theta)]
    if any(a >= b for a, b in zip(images, images[1:])) or any(v < 1 for v in images):
        raise ValueError(f"{dict(theta)!r} is not an order preserving injection")
    return relabel(w, _as_function(theta))


def apply_multitime_shift(w: Word, s: MultiTimeShift | Mapping[int, int]) -> Word:
    if not isinstance(s, MultiTimeShift):
        s = MultiTimeShift(dict(s))
    letters = tuple(
        Letter(letter.observable.model.evolve(letter.observable, s[letter.copy]), letter.copy)
        for letter in w.letters
    )
    return Word(letters, w.scalar)


# -- canonical text form ---------------------------------------------------------

_TOKEN = re.compile(r"(?P<obs>\S+?)@(?P<copy>\d+)$")


def format_word(w: Word) -> str:
    parts = [f"[{format_scalar(w.scalar)}]"] if w.scalar != 1 else []
    parts += [str(letter) for letter in w.letters]
    return " ".join(parts) if parts else "[1]"


def parse_word(text: str, model: ModelSystem) -> Word:
    """Parse ``[scalar] X@j Y@k ...`` with observables resolved by ``model``."""
    text = text.strip()
    scalar = Fraction(1)
    if text.startswith("["):
        end = text.index("]")
        scalar = parse_scalar(text[1:end])
        text = text[end + 1 :]
    letters = []
    for token in text.split():
        m = _TOKEN.match(token)
        if m is None:
            raise ValueError(f"malformed letter {token!r}; expected NAME@COPY")
        letters.append(Letter(model.observable(m.group("obs")), int(m.group("copy"))))
    return Word(tuple(letters), scalar)

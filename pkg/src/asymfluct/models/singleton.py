"""Koopman-quantized mixing system, described through its singleton factorization rule.

Compact observables are noncommutative polynomials without constant term in
named generators whose moments phi(X^k) are given.  The asymptotic state
obeys phi_inf(w X_j w') = phi(X) phi_inf(w) phi_inf(w') for compact X whenever
the neighbours of X_j sit in other copies.  Identity components are not
compact, so letters are first split as lambda 1 + K.
"""

from __future__ import annotations

import itertools
import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .base import Element, ModelSystem

_FACTOR = re.compile(r"^([A-Za-z]\w*)(?:\^(\d+))?$")


def _merge(monomial) -> tuple[tuple[str, int], ...]:
    out: list[list] = []
    for gen, power in monomial:
        if out and out[-1][0] == gen:
            out[-1][1] += power
        else:
            out.append([gen, power])
    return tuple((g, p) for g, p in out if p)


class SingletonFactorizationModel(ModelSystem):
    kind = "singleton"
    is_exact = True
    supports_time = False
    identity_basis = ()

    def __init__(self, moments: Mapping[str, Sequence] | None = None):
        super().__init__()
        if moments is None:
            moments = {
                "X": [Fraction(1, k + 1) for k in range(1, 13)],
                "Y": [Fraction(1, 2 * k + 2) for k in range(1, 13)],
            }
        self.moments = {g: tuple(Fraction(m) for m in seq) for g, seq in moments.items()}
        for g in self.moments:
            self.register(g, self.generator(g))

    def generator(self, name: str, power: int = 1) -> Element:
        if name not in self.moments:
            raise KeyError(f"unknown generator {name!r}")
        return self.basis_element(((name, power),))

    def moment(self, name: str, k: int) -> Fraction:
        if k == 0:
            return Fraction(1)
        seq = self.moments[name]
        if k > len(seq):
            raise ValueError(f"moment phi({name}^{k}) not supplied (have {len(seq)})")
        return seq[k - 1]

    def basis_product(self, a, b):
        return ((1, _merge(a + b)),)

    def basis_adjoint(self, b):
        return 1, tuple(reversed(b))

    def basis_state(self, b):
        # mixed monomials: generators treated as independent and commuting in phi
        powers: dict[str, int] = {}
        for g, p in b:
            powers[g] = powers.get(g, 0) + p
        return math.prod((self.moment(g, p) for g, p in powers.items()), start=Fraction(1))

    def format_basis(self, b) -> str:
        return "*".join(g if p == 1 else f"{g}^{p}" for g, p in b) if b else "1"

    def parse_observable(self, text: str):
        if text == "1":
            return self.one()
        factors = []
        for token in text.split("*"):
            m = _FACTOR.match(token)
            if m is None or m.group(1) not in self.moments:
                return None
            factors.append((m.group(1), int(m.group(2) or 1)))
        return self.basis_element(_merge(factors))

    def phi_infinity(self, word):
        return singleton_evaluate(word)

    def describe(self) -> dict:
        return {"kind": self.kind, "moments": {g: [str(m) for m in seq] for g, seq in self.moments.items()}}


def _compact_product_state(letters) -> object:
    """Singleton factorization on a reduced word of compact letters: the product of their states."""
    value = Fraction(1)
    for letter in letters:
        value = value * letter.observable.model.state(letter.observable)
    return value


def singleton_evaluate(w):
    """Asymptotic state of a word under the singleton factorization rule.

    Each letter is split as lambda 1 + compact part; the sum over which letters
    keep their compact part is walked depth first so prefix products are shared.
    """
    from ..words import Letter, reduce

    letters = reduce(w)
    if letters.scalar == 0:
        return 0
    parts = [(_split(letter.observable), letter.copy) for letter in letters.letters]
    n = len(parts)
    total = 0

    def walk(i: int, coef, chosen: tuple):
        nonlocal total
        if i == n:
            value = _compact_word_value(chosen)
            if value != 0:
                total = total + coef * value
            return
        (lam, compact), copy = parts[i]
        if lam != 0:
            walk(i + 1, coef * lam, chosen)
        if compact is not None:
            walk(i + 1, coef, chosen + (Letter(compact, copy),))

    walk(0, letters.scalar, ())
    return total


@lru_cache(maxsize=4096)
def _split(x: Element):
    lam = x.identity_coefficient()
    compact = x - lam if lam != 0 else x
    return lam, (None if compact.is_zero() else compact)


def _compact_word_value(letters) -> object:
    # the value only sees which neighbours share a copy, so copies are relabelled
    # by first occurrence before the cache lookup
    first: dict[int, int] = {}
    key = tuple((letter.observable, first.setdefault(letter.copy, len(first) + 1)) for letter in letters)
    return _compact_value_cached(key)


@lru_cache(maxsize=200_000)
def _compact_value_cached(key) -> object:
    from ..words import Letter, Word, reduce

    reduced = reduce(Word(tuple(Letter(x, j) for x, j in key)))
    return reduced.scalar * _compact_product_state(reduced.letters)


def removal_order_evaluate(w, order) -> object:
    """Evaluate a reduced word of compact letters by removing letters in ``order``.

    Each removal of X_j splits the remaining word into the parts left and right
    of it; used to check that the factorization rule is order independent.
    """
    letters = list(w.letters)
    value = w.scalar
    segments = [list(range(len(letters)))]
    for pos in order:
        for seg in segments:
            if pos in seg:
                i = seg.index(pos)
                x = letters[pos].observable
                value = value * x.model.state(x)
                segments.remove(seg)
                segments += [part for part in (seg[:i], seg[i + 1 :]) if part]
                break
        else:
            raise ValueError(f"position {pos} already removed")
    return value

"""Free shift: self-adjoint involutions e_i, e_i -> e_{i+1}, state zero on nontrivial monomials."""

from __future__ import annotations

import re
from fractions import Fraction

from .base import Element, ModelSystem

_MONOMIAL = re.compile(r"^(?:e(-?\d+))+$")
_GENERATOR = re.compile(r"e(-?\d+)")


def cancel(indices) -> tuple[int, ...]:
    """Concatenate-and-cancel: drop equal neighbours until none remain."""
    out: list[int] = []
    for i in indices:
        if out and out[-1] == i:
            out.pop()
        else:
            out.append(i)
    return tuple(out)


class FreeShiftModel(ModelSystem):
    kind = "freeshift"
    is_exact = True
    fluctuation_law = "semicircle"
    identity_basis = ()

    def __init__(self, generators: range | None = None):
        super().__init__()
        for i in generators if generators is not None else range(0, 3):
            self.register(f"e{i}", self.generator(i))

    def generator(self, i: int) -> Element:
        return self.basis_element((i,))

    def monomial(self, indices) -> Element:
        return self.basis_element(cancel(indices))

    def basis_product(self, a, b):
        return ((1, cancel(a + b)),)

    def basis_adjoint(self, b):
        return 1, tuple(reversed(b))

    def basis_evolve(self, b, t):
        return 1, tuple(i + t for i in b)

    def basis_state(self, b):
        return Fraction(1) if not b else Fraction(0)

    def format_basis(self, b) -> str:
        return "".join(f"e{i}" for i in b) if b else "1"

    def parse_observable(self, text: str):
        if text == "1":
            return self.one()
        if _MONOMIAL.match(text):
            return self.monomial(int(i) for i in _GENERATOR.findall(text))
        return None

    def correlate_monomials(self, timed) -> Fraction:
        """State of a product of evolved monomials (index tuples with integer times)."""
        indices: list[int] = []
        for b, t in timed:
            indices.extend(i + t for i in b)
        return Fraction(1) if not cancel(indices) else Fraction(0)

    def phi_infinity(self, word):
        return free_product_state(word)


def free_product_state(w):
    """Free product of copies of the model state, evaluated on a word.

    Alternating products of centred letters vanish; a non-centred letter is
    split as phi(X) 1 + (X - phi(X) 1) and both parts are evaluated again.
    """
    from ..words import Letter, Word, reduce

    cache: dict = {}

    def evaluate(letters: tuple) -> object:
        if letters in cache:
            return cache[letters]
        reduced = reduce(Word(letters))
        scalar, letters_r = reduced.scalar, reduced.letters
        if scalar == 0:
            return 0
        if not letters_r:
            return scalar
        for pos, letter in enumerate(letters_r):
            model = letter.observable.model
            mean = model.state(letter.observable)
            if mean != 0:
                removed = letters_r[:pos] + letters_r[pos + 1 :]
                centred = Letter(letter.observable - mean, letter.copy)
                replaced = letters_r[:pos] + (centred,) + letters_r[pos + 1 :]
                value = scalar * (mean * evaluate(removed) + evaluate(replaced))
                break
        else:
            value = 0
        cache[letters] = value
        return value

    return w.scalar * evaluate(tuple(w.letters))

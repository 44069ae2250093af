"""Bernoulli shift on A^Z with cylinder-function observables (commutative, mixing)."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Mapping, Sequence

from .base import Element, ModelSystem


class BernoulliModel(ModelSystem):
    """Product measure on {0..m-1}^Z with the left shift.

    Observables are cylinder functions written in the basis of products of
    site indicators ``[x_n = s]`` for symbols s >= 1 on distinct sites (the
    indicator of symbol 0 is 1 minus the others), which makes every cylinder
    function's expansion unique.  A basis label is a sorted tuple of
    ``(site, symbol)`` pairs; the empty tuple is the constant 1.
    """

    kind = "bernoulli"
    is_exact = True
    fluctuation_law = "gaussian"
    identity_basis = ()

    def __init__(self, probabilities: Sequence = (Fraction(1, 2), Fraction(1, 2))):
        super().__init__()
        probs = tuple(Fraction(p) for p in probabilities)
        if len(probs) < 2 or sum(probs) != 1 or any(p < 0 for p in probs):
            raise ValueError("symbol probabilities must be nonnegative and sum to 1")
        self.probabilities = probs
        self.alphabet = len(probs)
        coin = self.indicator(0, 1) - probs[1]
        self.register("X", coin)
        self.register("Xnext", self.evolve(coin, 1))

    def indicator(self, site: int, symbol: int) -> Element:
        if symbol == 0:
            return self.one() - sum(
                (self.basis_element(((site, s),)) for s in range(1, self.alphabet)), self.zero()
            )
        return self.basis_element(((site, symbol),))

    def cylinder(self, sites: Sequence[int], table: Mapping[tuple, object]) -> Element:
        """Function of (x_{sites[0]}, ...) given by ``table`` (missing configs are 0)."""
        acc = self.zero()
        for config, value in table.items():
            if value == 0:
                continue
            term = self.scalar(Fraction(value) if not isinstance(value, complex) else value)
            for site, sym in zip(sites, config):
                term = term * self.indicator(site, sym)
            acc = acc + term
        return acc

    def basis_product(self, a, b):
        merged = dict(a)
        for site, sym in b:
            if merged.get(site, sym) != sym:
                return ()
            merged[site] = sym
        return ((1, tuple(sorted(merged.items()))),)

    def basis_adjoint(self, b):
        return 1, b

    def basis_evolve(self, b, t):
        return 1, tuple((site + t, sym) for site, sym in b)

    def basis_state(self, b):
        return math.prod((self.probabilities[sym] for _, sym in b), start=Fraction(1))

    def format_basis(self, b) -> str:
        return "*".join(f"[x{site}={sym}]" for site, sym in b) if b else "1"

    def phi_infinity(self, word):
        return factorized_state(word)

    def expectation_by_enumeration(self, x: Element):
        """Direct sum over all configurations of the sites x depends on."""
        sites = sorted({site for b in x.terms for site, _ in b})
        total = 0
        for config in itertools.product(range(self.alphabet), repeat=len(sites)):
            weight = math.prod((self.probabilities[s] for s in config), start=Fraction(1))
            assignment = dict(zip(sites, config))
            value = sum(
                (c for b, c in x.terms.items() if all(assignment[site] == sym for site, sym in b)),
                Fraction(0),
            )
            total += weight * value
        return total

    def describe(self) -> dict:
        return {"kind": self.kind, "probabilities": [str(p) for p in self.probabilities]}


def factorized_state(w):
    """Product over copies of the state of each copy's ordered letter product."""
    groups: dict[int, Element] = {}
    for letter in w.letters:
        x = letter.observable
        groups[letter.copy] = x.model.product(groups[letter.copy], x) if letter.copy in groups else x
    value = w.scalar
    for x in groups.values():
        value = value * x.model.state(x)
    return value

"""Abstract dynamical system (A, Theta, phi) and its linear observable elements."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable


class Element:
    """Finite linear combination of basis observables of one model.

    Elements are immutable and hashable.  ``terms`` maps a model-specific,
    hashable basis label to a nonzero coefficient.
    """

    __slots__ = ("model", "terms", "_hash")

    def __init__(self, model: "ModelSystem", terms: dict):
        self.model = model
        self.terms = {b: c for b, c in terms.items() if c != 0}
        self._hash = None

    # -- structure -----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def identity_coefficient(self):
        """Coefficient of the identity basis label (0 when absent)."""
        return self.terms.get(self.model.identity_basis, 0)

    def scalar_value(self):
        """Return lambda when the element is lambda * identity, else None."""
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1 and self.model.identity_basis in self.terms:
            return self.terms[self.model.identity_basis]
        return None

    def single_term(self):
        """Return (coef, basis) for one-term elements, else None."""
        if len(self.terms) == 1:
            ((b, c),) = self.terms.items()
            return c, b
        return None

    # -- linear structure ----------------------------------------------------
    def _check(self, other: "Element"):
        if other.model is not self.model:
            raise ValueError("cannot combine observables of different models")

    def __add__(self, other):
        if not isinstance(other, Element):
            other = self.model.scalar(other)
        self._check(other)
        terms = dict(self.terms)
        for b, c in other.terms.items():
            terms[b] = terms.get(b, 0) + c
        return Element(self.model, terms)

    __radd__ = __add__

    def __neg__(self):
        return Element(self.model, {b: -c for b, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Element):
            return self.model.product(self, other)
        return Element(self.model, {b: c * other for b, c in self.terms.items()})

    def __rmul__(self, other):
        return Element(self.model, {b: other * c for b, c in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.model is other.model and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((id(self.model), frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return self.model.format_element(self)


class ModelSystem:
    """A discrete-time dynamical system (A, Theta, phi) with exact correlations.

    Subclasses supply the algebra on basis labels; everything else (products of
    linear combinations, time evolution, the state on elements and multi-time
    correlations) is derived here.
    """

    kind = "abstract"
    is_exact = True
    supports_time = True
    fluctuation_law = "none"
    identity_basis: object = ()

    def __init__(self):
        self.registry: dict[str, Element] = {}

    # -- basis-level algebra (override) --------------------------------------
    def basis_product(self, a, b) -> Iterable[tuple[object, object]]:
        raise NotImplementedError

    def basis_adjoint(self, b) -> tuple[object, object]:
        raise NotImplementedError

    def basis_evolve(self, b, t: int) -> tuple[object, object]:
        raise NotImplementedError

    def basis_state(self, b):
        raise NotImplementedError

    def format_basis(self, b) -> str:
        return repr(b)

    # -- constructors ----------------------------------------------------------
    def element(self, terms: dict) -> Element:
        return Element(self, terms)

    def basis_element(self, b, coef=1) -> Element:
        return Element(self, {b: Fraction(coef) if isinstance(coef, int) else coef})

    def one(self) -> Element:
        return self.basis_element(self.identity_basis)

    def zero(self) -> Element:
        return Element(self, {})

    def scalar(self, c) -> Element:
        return Element(self, {self.identity_basis: c})

    def owns(self, x) -> bool:
        return isinstance(x, Element) and x.model is self

    # -- element-level operations ---------------------------------------------
    def product(self, x: Element, y: Element) -> Element:
        terms: dict = {}
        for a, ca in x.terms.items():
            for b, cb in y.terms.items():
                for c, basis in self.basis_product(a, b):
                    terms[basis] = terms.get(basis, 0) + ca * cb * c
        return Element(self, terms)

    def adjoint(self, x: Element) -> Element:
        terms: dict = {}
        for b, c in x.terms.items():
            phase, basis = self.basis_adjoint(b)
            conj_c = c.conjugate() if hasattr(c, "conjugate") else c
            terms[basis] = terms.get(basis, 0) + phase * conj_c
        return Element(self, terms)

    def evolve(self, x: Element, t: int) -> Element:
        if not self.supports_time:
            raise NotImplementedError(f"{self.kind} model has no finite-time dynamics")
        if t == 0:
            return x
        terms: dict = {}
        for b, c in x.terms.items():
            phase, basis = self.basis_evolve(b, t)
            terms[basis] = terms.get(basis, 0) + phase * c
        return Element(self, terms)

    def state(self, x: Element):
        total = 0
        for b, c in x.terms.items():
            total = total + c * self.basis_state(b)
        return total

    def centred(self, x: Element) -> Element:
        return x - self.state(x)

    def correlate(self, timed: Iterable[tuple[Element, int]]):
        """phi(X1(t1) X2(t2) ... Xn(tn)) for (observable, time) pairs."""
        if not self.supports_time:
            raise NotImplementedError(f"{self.kind} model has no finite-time correlations")
        acc = self.one()
        for x, t in timed:
            acc = self.product(acc, self.evolve(x, t))
        return self.state(acc)

    def phi_infinity(self, word):
        """Exact asymptotic state on a word of A_infinity (None when unavailable)."""
        return None

    # -- observable registry ---------------------------------------------------
    def register(self, name: str, x: Element) -> Element:
        if not self.owns(x):
            raise ValueError(f"observable {name!r} does not belong to this model")
        self.registry[name] = x
        return x

    def observable(self, name: str) -> Element:
        try:
            return self.registry[name]
        except KeyError:
            parsed = self.parse_observable(name)
            if parsed is None:
                raise KeyError(f"unknown observable {name!r} for {self.kind} model") from None
            return parsed

    def parse_observable(self, text: str):
        return None

    def name_of(self, x: Element):
        for name, y in self.registry.items():
            if y == x:
                return name
        return None

    def format_element(self, x: Element) -> str:
        name = self.name_of(x) if self.registry else None
        if name is not None:
            return name
        if not x.terms:
            return "0"
        parts = []
        for b, c in x.terms.items():
            label = self.format_basis(b)
            parts.append(label if c == 1 else f"({c})*{label}")
        return " + ".join(parts)

    def describe(self) -> dict:
        return {"kind": self.kind}

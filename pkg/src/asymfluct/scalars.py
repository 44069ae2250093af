"""Exact scalars for the models whose correlations are sums of roots of unity.

Rational numbers are plain :class:`fractions.Fraction`.  Phases produced by the
Weyl relations at rational deformation parameter live in a cyclotomic field
Q(zeta_n); :class:`Cyclotomic` stores such numbers in the power basis
``1, z, ..., z^(d-1)`` with ``d = deg Phi_n`` so that equality is exact and
canonical.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from sympy import Symbol, cyclotomic_poly

_x = Symbol("x")


@lru_cache(maxsize=None)
def _phi_coeffs(n: int) -> tuple[int, ...]:
    """Coefficients of the n-th cyclotomic polynomial, lowest degree first."""
    coeffs = cyclotomic_poly(n, _x, polys=True).all_coeffs()
    return tuple(int(c) for c in reversed(coeffs))


def _reduce(vec: list, n: int) -> tuple[Fraction, ...]:
    """Reduce a polynomial in z (lowest degree first) modulo Phi_n."""
    phi = _phi_coeffs(n)
    d = len(phi) - 1
    vec = list(vec)
    for i in range(len(vec) - 1, d - 1, -1):
        c = vec[i]
        if c:
            shift = i - d
            for j, p in enumerate(phi):
                if p:
                    vec[shift + j] -= c * p
    out = vec[:d] + [Fraction(0)] * max(0, d - len(vec))
    return tuple(Fraction(c) for c in out)


class Cyclotomic:
    """Element of Q(zeta_n), zeta_n = exp(2 pi i / n), in canonical form."""

    __slots__ = ("order", "coeffs", "_hash")

    def __init__(self, order: int, coeffs):
        if order < 1:
            raise ValueError("cyclotomic order must be positive")
        self.order = order
        self.coeffs = _reduce(list(coeffs), order)
        self._hash = None

    @classmethod
    def root(cls, k: int, n: int) -> "Cyclotomic":
        """zeta_n ** k."""
        k %= n
        vec = [Fraction(0)] * (k + 1)
        vec[k] = Fraction(1)
        return cls(n, vec)

    @classmethod
    def rational(cls, q, n: int = 1) -> "Cyclotomic":
        return cls(n, [Fraction(q)])

    def _lift(self, n: int) -> list:
        # n must be a multiple of self.order
        step = n // self.order
        vec = [Fraction(0)] * ((len(self.coeffs) - 1) * step + 1 if self.coeffs else 1)
        for i, c in enumerate(self.coeffs):
            vec[i * step] = c
        return vec

    def _coerce(self, other):
        if isinstance(other, Cyclotomic):
            return other
        if isinstance(other, (int, Rational)):
            return Cyclotomic(1, [Fraction(other)])
        return NotImplemented

    def _common(self, other: "Cyclotomic"):
        if other.order == self.order:
            return self.order, list(self.coeffs), list(other.coeffs)
        n = math.lcm(self.order, other.order)
        return n, self._lift(n), other._lift(n)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return complex(self) + other
        n, a, b = self._common(other)
        size = max(len(a), len(b))
        a += [Fraction(0)] * (size - len(a))
        b += [Fraction(0)] * (size - len(b))
        return Cyclotomic(n, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.order, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return complex(self) * other
        n, a, b = self._common(other)
        if not a or not b:
            return Cyclotomic(n, [])
        prod = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return Cyclotomic(n, prod)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            q = Fraction(other)
            return Cyclotomic(self.order, [c / q for c in self.coeffs])
        if isinstance(other, Cyclotomic):
            if other.is_rational():
                return self / other.rational_value()
            return self * other.inverse()
        return complex(self) / other

    def __rtruediv__(self, other):
        return self.inverse() * other

    def _galois(self, k: int) -> "Cyclotomic":
        n = self.order
        vec = [Fraction(0)] * n
        for i, c in enumerate(self.coeffs):
            vec[(i * k) % n] += c
        return Cyclotomic(n, vec)

    def inverse(self) -> "Cyclotomic":
        """Exact inverse: the product of the other Galois conjugates over the norm."""
        if not self:
            raise ZeroDivisionError("inverse of zero")
        n = self.order
        others = Cyclotomic.rational(1, n)
        for k in range(2, n):
            if math.gcd(k, n) == 1:
                others = others * self._galois(k)
        norm = self * others
        return others / norm.rational_value()

    def conjugate(self) -> "Cyclotomic":
        n = self.order
        vec = [Fraction(0)] * n
        for i, c in enumerate(self.coeffs):
            vec[(-i) % n] += c
        return Cyclotomic(n, vec)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def as_root_of_unity(self):
        """Return k/n as a Fraction when self == exp(2 pi i k/n), else None."""
        n = self.order
        for k in range(n):
            if Cyclotomic.root(k, n) == self:
                return Fraction(k, n)
        return None

    def __complex__(self):
        z = cmath.exp(2j * math.pi / self.order)
        return complex(sum(float(c) * z**i for i, c in enumerate(self.coeffs) if c))

    def __abs__(self):
        return abs(complex(self))

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            try:
                return complex(self) == complex(other)
            except TypeError:
                return NotImplemented
        _, a, b = self._common(other)
        size = max(len(a), len(b))
        a += [Fraction(0)] * (size - len(a))
        b += [Fraction(0)] * (size - len(b))
        return a == b

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.rational_value())
            else:
                self._hash = hash((self.order, self.coeffs))
        return self._hash

    def __repr__(self):
        if self.is_rational():
            return f"Cyclotomic({self.rational_value()})"
        return f"Cyclotomic(order={self.order}, coeffs={[str(c) for c in self.coeffs]})"

    def __str__(self):
        if self.is_rational():
            return str(self.rational_value())
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if i == 0 else f"{c}*z{self.order}^{i}")
        return " + ".join(terms)


def is_exact(value) -> bool:
    return isinstance(value, (int, Rational, Cyclotomic))


def to_complex(value) -> complex:
    return complex(value)


def exact_zero(value) -> bool:
    """True when value is exactly zero (exact scalars) or compares equal to 0."""
    return value == 0


def conj(value):
    if isinstance(value, (int, Rational)):
        return value
    return value.conjugate()


def format_scalar(value) -> str:
    if isinstance(value, Cyclotomic) and value.is_rational():
        value = value.rational_value()
    if isinstance(value, (int, Fraction)):
        return str(Fraction(value))
    if isinstance(value, complex):
        return repr(value)
    return str(value)


def parse_scalar(text: str):
    text = text.strip()
    try:
        return Fraction(text)
    except ValueError:
        return complex(text.replace(" ", ""))

"""Quantized cat map on the noncommutative two-torus at rational deformation."""

from __future__ import annotations

import cmath
import itertools
import math
import re
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ..scalars import Cyclotomic
from .base import Element, ModelSystem

DEFAULT_T = ((1, 1), (1, 2))

_WEYL = re.compile(r"^W\((-?\d+),(-?\d+)\)$")


def symplectic(p, q) -> int:
    return p[0] * q[1] - p[1] * q[0]


def _matmul(a, b):
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


class CatMapModel(ModelSystem):
    """Weyl unitaries W(p), p in Z^2, with W(p)W(q) = e^{i pi theta sigma(p,q)} W(p+q).

    The dynamics is W(p) -> W(T p) for a hyperbolic T in SL(2, Z) and the state
    is the trace phi(W(p)) = delta_{p,0}.  With theta = a/b every phase is a
    power of zeta_{2b}, so all arithmetic is exact in Q(zeta_{2b}).
    """

    kind = "catmap"
    is_exact = True
    identity_basis = (0, 0)

    def __init__(self, theta=Fraction(1, 3), T=DEFAULT_T):
        super().__init__()
        theta = Fraction(theta)
        if not 0 <= theta < 1:
            raise ValueError("theta must lie in [0, 1)")
        T = tuple(tuple(int(v) for v in row) for row in T)
        det = T[0][0] * T[1][1] - T[0][1] * T[1][0]
        if det != 1:
            raise ValueError(f"T must have determinant 1, got {det}")
        if abs(T[0][0] + T[1][1]) <= 2:
            raise ValueError("T must be hyperbolic (|trace| > 2)")
        self.theta = theta
        self.T = T
        self.T_inv = ((T[1][1], -T[0][1]), (-T[1][0], T[0][0]))
        self.phase_order = 2 * theta.denominator
        self._power = lru_cache(maxsize=4096)(self._power_uncached)
        for name, p in (("Wp", (1, 0)), ("Wq", (0, 1)), ("Wmp", (-1, 0)), ("Wmq", (0, -1))):
            self.register(name, self.weyl(p))

    def weyl(self, p) -> Element:
        return self.basis_element((int(p[0]), int(p[1])))

    def phase(self, sigma: int) -> Cyclotomic:
        """exp(i pi theta sigma) as an exact root of unity."""
        return Cyclotomic.root(self.theta.numerator * sigma, self.phase_order)

    def _power_uncached(self, t: int):
        base = self.T if t >= 0 else self.T_inv
        result = ((1, 0), (0, 1))
        square = base
        k = abs(t)
        while k:
            if k & 1:
                result = _matmul(result, square)
            square = _matmul(square, square)
            k >>= 1
        return result

    def evolve_label(self, p, t: int):
        m = self._power(t)
        return (m[0][0] * p[0] + m[0][1] * p[1], m[1][0] * p[0] + m[1][1] * p[1])

    def basis_product(self, a, b):
        return ((self.phase(symplectic(a, b)), (a[0] + b[0], a[1] + b[1])),)

    def basis_adjoint(self, b):
        return 1, (-b[0], -b[1])

    def basis_evolve(self, b, t):
        return 1, self.evolve_label(b, t)

    def basis_state(self, b):
        return Fraction(1) if b == (0, 0) else Fraction(0)

    def format_basis(self, b) -> str:
        return f"W({b[0]},{b[1]})"

    def parse_observable(self, text: str):
        m = _WEYL.match(text.replace(" ", ""))
        if m:
            return self.weyl((int(m.group(1)), int(m.group(2))))
        return None

    def correlate_labels(self, timed) -> object:
        """phi(W(T^{t1} p1) ... W(T^{tn} pn)) accumulating the exact phase."""
        total = (0, 0)
        sigma = 0
        for p, t in timed:
            q = self.evolve_label(p, t)
            sigma += symplectic(total, q)
            total = (total[0] + q[0], total[1] + q[1])
        if total != (0, 0):
            return Fraction(0)
        return self.phase(sigma)

    def correlate(self, timed):
        # expand into Weyl monomials; each is a single phase times a delta
        timed = list(timed)
        total = 0
        for combo in itertools.product(*[tuple(x.terms.items()) for x, _ in timed]):
            labels = [(b, t) for (b, _), (_, t) in zip(combo, timed)]
            value = self.correlate_labels(labels)
            if value != 0:
                for _, c in combo:
                    value = value * c
                total = total + value
        return total

    def period_mod(self, modulus: int) -> int:
        """Smallest P >= 1 with T^P = I modulo ``modulus``."""
        m = ((1, 0), (0, 1))
        for P in range(1, 6 * modulus * modulus + 2):
            m = tuple(tuple(v % modulus for v in row) for row in _matmul(m, self.T))
            if m == ((1 % modulus, 0), (0, 1 % modulus)):
                return P
        raise RuntimeError("no period found")

    def describe(self) -> dict:
        return {"kind": self.kind, "theta": str(self.theta), "T": [list(r) for r in self.T]}


# -- clock-and-shift matrix oracle -------------------------------------------------


def clock_shift_trace(theta, labels, aux_dim: int | None = None) -> complex:
    """Normalised trace of W(p1)...W(pn) in a finite-dimensional representation.

    W(p) = exp(-i pi theta p1 p2) U^{p1} V^{p2} with U = Z (x) C (x) 1 and
    V = X (x) 1 (x) C, where Z, X are the b x b clock and shift matrices
    (theta = a/b) and C is an auxiliary clock of dimension ``aux_dim``.  The
    auxiliary factors make the normalised trace vanish on every nonzero total
    label with components smaller than ``aux_dim``.
    """
    theta = Fraction(theta)
    d = theta.denominator
    omega = cmath.exp(2j * math.pi * theta.numerator / d)
    Z = np.diag([omega**k for k in range(d)])
    X = np.roll(np.eye(d), 1, axis=0)
    total = [0, 0]
    for p in labels:
        total[0] += p[0]
        total[1] += p[1]
    if aux_dim is None:
        aux_dim = max(abs(total[0]), abs(total[1])) + 1
    mat = np.eye(d, dtype=complex)
    for p1, p2 in labels:
        scale = cmath.exp(-1j * math.pi * ((theta.numerator * p1 * p2) % (2 * d)) / d)
        mat = mat @ (scale * np.linalg.matrix_power(Z, p1 % d) @ np.linalg.matrix_power(X, p2 % d))
    aux = np.exp(2j * math.pi * np.arange(aux_dim) / aux_dim)
    aux_u = np.mean(aux ** (total[0] % aux_dim))
    aux_v = np.mean(aux ** (total[1] % aux_dim))
    return complex(np.trace(mat) / d * aux_u * aux_v)

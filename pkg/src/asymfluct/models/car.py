"""CAR algebra over l^2(Z) with a shift-invariant quasi-free state."""

from __future__ import annotations

import cmath
import itertools
import re
from fractions import Fraction
from typing import Mapping

import numpy as np

from .base import Element, ModelSystem

_FIELD = re.compile(r"^a(\*?)\((-?\d+)\)$")


def _is_finite(c) -> bool:
    if isinstance(c, (int, Fraction)):
        return True
    try:
        return cmath.isfinite(complex(c))
    except (TypeError, ValueError):
        return False


def _conj(c):
    return c.conjugate() if hasattr(c, "conjugate") else c


class CarModel(ModelSystem):
    """Fermionic fields a(f), a*(f) on finitely supported f: Z -> C.

    Basis labels are words of site fields ``(creation, site)``; a*(f) expands
    as sum_x f(x) a*(delta_x) and a(f) as sum_x conj(f(x)) a(delta_x).  The
    state is quasi-free with a Toeplitz covariance rho(x, y) = symbol[x - y]
    (Hermitian, 0 <= rho <= 1), so that

        phi(a*(f) a(g)) = <g, rho f>,   phi(a(g) a*(f)) = <g, (1 - rho) f>,

    and all aa, a*a* two-point values vanish.  Higher moments follow from the
    Wick (Pfaffian) expansion.  The dynamics shifts sites by one.
    """

    kind = "car"
    is_exact = False
    identity_basis = ()

    def __init__(self, symbol: Mapping[int, object] | None = None):
        super().__init__()
        symbol = {0: Fraction(1, 2)} if symbol is None else dict(symbol)
        for k, v in symbol.items():
            if not _is_finite(v):
                raise ValueError(f"covariance symbol entry {k} is not finite")
            back = symbol.get(-k, 0)
            if abs(complex(v) - complex(_conj(back))) > 1e-12:
                raise ValueError("covariance symbol must satisfy symbol[-k] = conj(symbol[k])")
        self.symbol = {int(k): v for k, v in symbol.items() if v != 0}
        for name, x in (("a0", self.annihilation({0: 1})), ("ad0", self.creation({0: 1}))):
            self.register(name, x)

    # -- fields ---------------------------------------------------------------
    def _vector(self, f) -> dict[int, object]:
        items = f.items() if isinstance(f, Mapping) else enumerate(f)
        vec = {}
        for site, c in items:
            if not _is_finite(c):
                raise ValueError(f"vector entry at site {site} is not finite")
            if c != 0:
                vec[int(site)] = Fraction(c) if isinstance(c, int) else c
        return vec

    def creation(self, f) -> Element:
        return self.element({((True, x),): c for x, c in self._vector(f).items()})

    def annihilation(self, f) -> Element:
        return self.element({((False, x),): _conj(c) for x, c in self._vector(f).items()})

    def covariance(self, x: int, y: int):
        """rho(x, y) = <delta_x, rho delta_y>."""
        return self.symbol.get(x - y, 0)

    def two_point(self, a, b):
        """phi(c_a c_b) for site fields a = (creation, site), b likewise."""
        (ca, xa), (cb, xb) = a, b
        if ca == cb:
            return 0
        if ca:  # a*(x) a(y) -> <y, rho x>
            return self.covariance(xb, xa)
        # a(x) a*(y) -> <x, (1 - rho) y>
        return (1 if xa == xb else 0) - self.covariance(xa, xb)

    # -- basis algebra ----------------------------------------------------------
    def basis_product(self, a, b):
        return ((1, a + b),)

    def basis_adjoint(self, b):
        return 1, tuple((not c, x) for c, x in reversed(b))

    def basis_evolve(self, b, t):
        return 1, tuple((c, x + t) for c, x in b)

    def basis_state(self, b):
        return wick(b, self.two_point)

    def format_basis(self, b) -> str:
        return "*".join(f"a{'*' if c else ''}({x})" for c, x in b) if b else "1"

    def parse_observable(self, text: str):
        if text == "1":
            return self.one()
        m = _FIELD.match(text.replace(" ", ""))
        if m is None:
            return None
        site = int(m.group(2))
        return self.creation({site: 1}) if m.group(1) else self.annihilation({site: 1})

    def phi_infinity(self, word):
        return graded_factorized_state(word)

    def parity_parts(self, x: Element) -> tuple[Element, Element]:
        """Split x into its even and odd parts."""
        even = {b: c for b, c in x.terms.items() if len(b) % 2 == 0}
        odd = {b: c for b, c in x.terms.items() if len(b) % 2 == 1}
        return self.element(even), self.element(odd)

    def describe(self) -> dict:
        return {"kind": self.kind, "symbol": {str(k): str(v) for k, v in sorted(self.symbol.items())}}


def wick(fields, two_point):
    """Pfaffian expansion of a quasi-free expectation of a product of fields.

    Pairing the first field with the k-th remaining one carries sign (-1)^(k-1);
    unrolled, this is the sum over pair partitions weighted by (-1)^crossings.
    """
    fields = tuple(fields)
    if len(fields) % 2:
        return 0
    cache: dict = {}

    def pf(idx: tuple) -> object:
        if not idx:
            return 1
        if idx in cache:
            return cache[idx]
        first, rest = idx[0], idx[1:]
        total = 0
        for k, j in enumerate(rest):
            value = two_point(fields[first], fields[j])
            if value == 0:
                continue
            sign = -1 if k % 2 else 1
            total = total + sign * value * pf(rest[:k] + rest[k + 1 :])
        cache[idx] = total
        return total

    return pf(tuple(range(len(fields))))


def car_correlate(model: CarModel, timed) -> object:
    """phi(X1(t1) ... Xn(tn)) for CAR elements with integer times."""
    return model.correlate(timed)


def graded_factorized_state(w):
    """Signed factorization over copies for words of CAR elements.

    Each letter is split into even and odd parts; for every parity-homogeneous
    choice the odd letters are permuted into copy-grouped order and the sign of
    that permutation multiplies the product of per-copy states.
    """
    letters = w.letters
    if not letters:
        return w.scalar
    model = letters[0].observable.model
    parts = [model.parity_parts(letter.observable) for letter in letters]
    order = sorted(range(len(letters)), key=lambda i: (letters[i].copy, i))
    total = 0
    for choice in itertools.product((0, 1), repeat=len(letters)):
        chosen = [parts[i][choice[i]] for i in range(len(letters))]
        if any(x.is_zero() for x in chosen):
            continue
        odd_in_group_order = [i for i in order if choice[i]]
        sign = _permutation_sign(odd_in_group_order)
        groups: dict[int, Element] = {}
        for letter, x in zip(letters, chosen):
            groups[letter.copy] = groups[letter.copy] * x if letter.copy in groups else x
        value = sign
        for g in groups.values():
            value = value * model.state(g)
            if value == 0:
                break
        total = total + value
    return w.scalar * total


def _permutation_sign(seq) -> int:
    inversions = sum(1 for a, b in itertools.combinations(seq, 2) if a > b)
    return -1 if inversions % 2 else 1


# -- Jordan-Wigner matrix oracle -------------------------------------------------


def jordan_wigner_expectation(model: CarModel, fields, sites=None) -> complex:
    """Expectation of a product of site fields in an explicit matrix representation.

    The modes are the distinct sites involved (or ``sites``).  With
    R[i, j] = phi(a*(x_i) a(x_j)) = rho(x_j, x_i) the density is the Gibbs state
    exp(-sum H[i, j] a*_i a_j)/Z with H = log(R^{-1} - 1).
    """
    fields = list(fields)
    if sites is None:
        sites = sorted({x for _, x in fields})
    m = len(sites)
    if m > 3:
        raise ValueError("the matrix oracle is limited to 3 modes")
    pos = {x: i for i, x in enumerate(sites)}
    dim = 2**m
    z = np.diag([1.0, -1.0])
    lower = np.array([[0.0, 1.0], [0.0, 0.0]])  # |0> <- |1>, annihilates occupation
    eye = np.eye(2)

    def annihilator(i: int) -> np.ndarray:
        mats = [z] * i + [lower] + [eye] * (m - i - 1)
        out = np.array([[1.0]])
        for mat in mats:
            out = np.kron(out, mat)
        return out

    ann = [annihilator(i) for i in range(m)]
    # the Gibbs state of a* H a has <a*_i a_j> = ((1 + e^H)^{-1})[i, j] = R[i, j]
    R = np.array([[complex(model.covariance(y, x)) for y in sites] for x in sites])
    evals, evecs = np.linalg.eigh(R)
    if np.any(evals <= 0) or np.any(evals >= 1):
        # boundary covariances: take the limit through a pure-state projector
        evals = np.clip(evals, 1e-15, 1 - 1e-15)
    H = evecs @ np.diag(np.log(1 / evals - 1)) @ evecs.conj().T
    quad = sum(H[j, i] * ann[i].conj().T @ ann[j] for i in range(m) for j in range(m))
    w, v = np.linalg.eigh(quad)
    density = v @ np.diag(np.exp(-(w - w.min()))) @ v.conj().T
    density /= np.trace(density)
    op = np.eye(dim, dtype=complex)
    for creation, x in fields:
        a = ann[pos[x]]
        op = op @ (a.conj().T if creation else a)
    return complex(np.trace(density @ op))


def wick_by_crossings(fields, two_point):
    """Reference Wick sum written directly over ordered pair partitions."""
    from ..partitions import crossing_number, enumerate_pair_partitions

    fields = tuple(fields)
    if len(fields) % 2:
        return 0
    total = 0
    for p in enumerate_pair_partitions(len(fields) // 2):
        value = -1 if crossing_number(p) % 2 else 1
        for a, b in p.pairs:
            value = value * two_point(fields[a - 1], fields[b - 1])
        total = total + value
    return total


__all__ = [
    "CarModel",
    "car_correlate",
    "graded_factorized_state",
    "jordan_wigner_expectation",
    "wick",
    "wick_by_crossings",
]

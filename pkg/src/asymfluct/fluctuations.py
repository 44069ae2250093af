"""Moments of local fluctuations F_N(X) = N^{-1/2} sum_i (X_i - phi(X)).

Finite-N moments are exact sums of the asymptotic state over index tuples,
either enumerated directly or grouped by the pattern of equal indices.  Their
N -> infinity limits are pair-partition sums, compared against the Gaussian
and semicircle moment sequences.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .models.base import Element, ModelSystem
from .partitions import (
    SizeGuardError,
    catalan,
    count_multiplicity_bounded_maps,
    double_factorial,
    enumerate_pair_partitions,
    is_noncrossing,
    surjections,
)
from .scalars import format_scalar, is_exact, to_complex
from .words import Letter, Word, reduce

BRUTE_FORCE_BUDGET = 10**7
CENTRED_TOLERANCE = 1e-12


@dataclass(frozen=True)
class FluctuationSpec:
    """Observables X^(1..r) entering F_N(X^(1)) ... F_N(X^(r)) and the block size N."""

    observables: tuple
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be positive")
        if not self.observables:
            raise ValueError("at least one observable is required")

    @property
    def r(self) -> int:
        return len(self.observables)


@dataclass(frozen=True)
class MomentValue:
    """N^{-r/2} * total, kept exact: ``total`` is the unnormalised tuple sum."""

    total: object
    N: int
    r: int

    @property
    def value(self):
        if self.r % 2 == 0:
            return self.total / Fraction(self.N) ** (self.r // 2) if is_exact(self.total) else self.total / self.N ** (self.r // 2)
        if is_exact(self.total) and self.total == 0:
            return Fraction(0)
        return to_complex(self.total) / self.N ** (self.r / 2)

    def __complex__(self):
        return to_complex(self.value)


@dataclass
class MomentReport:
    order: int
    N: int
    value: object
    asymptotic: object
    reference: object
    law: str
    residual_reference: float | None
    residual_asymptotic: float | None
    envelope: float | None = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "N": self.N,
            "value": format_scalar(self.value),
            "asymptotic": None if self.asymptotic is None else format_scalar(self.asymptotic),
            "reference": None if self.reference is None else format_scalar(self.reference),
            "law": self.law,
            "residual_reference": self.residual_reference,
            "residual_asymptotic": self.residual_asymptotic,
            "envelope": self.envelope,
            "notes": list(self.notes),
        }


def centre(model: ModelSystem, x: Element) -> tuple[Element, object]:
    """X - phi(X) 1 and the shift phi(X)."""
    shift = model.state(x)
    return x - shift, shift


def _phi_inf(model: ModelSystem, w: Word):
    value = model.phi_infinity(reduce(w))
    if value is None:
        raise NotImplementedError(f"{model.kind} model has no exact asymptotic state")
    return value


def _labelled_word(observables: Sequence[Element], labels: Sequence[int]) -> Word:
    return Word(tuple(Letter(x, j) for x, j in zip(observables, labels)))


def block_sums(model: ModelSystem, observables: Sequence[Element], max_blocks: int | None = None) -> dict[int, object]:
    """S_s = sum over surjections nu: {1..r} -> {1..s} of phi_inf(X_nu), s = 1..r."""
    r = len(observables)
    top = r if max_blocks is None else min(r, max_blocks)
    cache: dict = {}
    out = {}
    for s in range(1, top + 1):
        total = 0
        for nu in surjections(r, s):
            key = nu
            if key not in cache:
                cache[key] = _phi_inf(model, _labelled_word(observables, nu))
            total = total + cache[key]
        out[s] = total
    return out


def finite_n_moment(
    model: ModelSystem, spec: FluctuationSpec, method: str = "grouped", centred: bool = True
) -> MomentValue:
    """phi_inf(F_N(X^(1)) ... F_N(X^(r))) exactly.

    ``grouped`` writes every index tuple as k = theta o nu with theta increasing,
    so the sum is sum_s binom(N, s) S_s.  ``brute`` evaluates all N^r tuples.
    With ``centred`` the observables are centred first, as in F_N.
    """
    obs = [centre(model, x)[0] if centred else x for x in spec.observables]
    r, N = spec.r, spec.N
    if method == "grouped":
        sums = block_sums(model, obs, max_blocks=N)
        total = 0
        for s, S in sums.items():
            total = total + math.comb(N, s) * S
        return MomentValue(total, N, r)
    if method == "brute":
        if N**r > BRUTE_FORCE_BUDGET:
            raise SizeGuardError(f"N^r = {N**r} exceeds the brute-force budget {BRUTE_FORCE_BUDGET}; lower N or r")
        total = 0
        for k in itertools.product(range(1, N + 1), repeat=r):
            total = total + _phi_inf(model, _labelled_word(obs, k))
        return MomentValue(total, N, r)
    raise ValueError(f"unknown method {method!r}")


def moment_sequence(model: ModelSystem, x: Element, orders: Sequence[int], N_values: Sequence[int]) -> dict:
    """{(N, r): MomentValue} for one observable, reusing block sums across N."""
    xc, _ = centre(model, x)
    out = {}
    for r in orders:
        sums = block_sums(model, [xc] * r)
        for N in N_values:
            total = 0
            for s, S in sums.items():
                if s <= N:
                    total = total + math.comb(N, s) * S
            out[(N, r)] = MomentValue(total, N, r)
    return out


# -- N -> infinity -----------------------------------------------------------------


def _check_centred(model: ModelSystem, observables: Sequence[Element]):
    for i, x in enumerate(observables, start=1):
        mean = model.state(x)
        if abs(to_complex(mean)) > CENTRED_TOLERANCE:
            raise ValueError(f"observable {i} ({model.format_element(x)}) is not centred: phi = {format_scalar(mean)}")


def asymptotic_moment_pair_sum(model: ModelSystem, observables: Sequence[Element], ordered: bool = True):
    """Pair-partition sum for lim_N phi_inf(F_N(X^(1)) ... F_N(X^(2n))).

    ordered=True sums phi_inf(X_nu) over ordered pair partitions (the limit for
    permutation invariant states); ordered=False averages over all labelled
    pair partitions with weight 1/n!.
    """
    _check_centred(model, observables)
    r = len(observables)
    if r % 2:
        return Fraction(0)
    n = r // 2
    total = 0
    for p in enumerate_pair_partitions(n, ordered=ordered):
        total = total + _phi_inf(model, _labelled_word(observables, p.label_map()))
    return total if ordered else total / math.factorial(n)


def _two_point_lookup(two_point) -> Callable[[int, int], object]:
    if callable(two_point):
        return two_point
    return lambda a, b: two_point[a - 1][b - 1]


def noncrossing_moment(two_point, n: int):
    """Sum over ordered non-crossing pair partitions of prod_k phi(X^(a_k) X^(b_k))."""
    lookup = _two_point_lookup(two_point)
    total = 0
    for p in enumerate_pair_partitions(n):
        if is_noncrossing(p):
            value = 1
            for a, b in p.pairs:
                value = value * lookup(a, b)
            total = total + value
    return total


def gaussian_moment(n: int, sigma=1):
    """(2n-1)!! sigma^(2n), the 2n-th Gaussian moment."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    return double_factorial(2 * n - 1) * sigma ** (2 * n)


def semicircle_moment(n: int, sigma=1):
    """C_n sigma^(2n), the 2n-th moment of the semicircle law of variance sigma^2."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    return catalan(n) * sigma ** (2 * n)


def semicircle_density(t: float, sigma: float = 1.0) -> float:
    if abs(t) >= 2 * sigma:
        return 0.0
    return math.sqrt(4 * sigma**2 - t**2) / (2 * math.pi * sigma**2)


def semicircle_moment_quadrature(order: int, sigma: float = 1.0) -> float:
    """int t^order gamma_{0,sigma}(t) dt over |t| <= 2 sigma."""
    value, _ = integrate.quad(lambda t: t**order * semicircle_density(t, sigma), -2 * sigma, 2 * sigma, limit=200)
    return value


def reference_moment(law: str, order: int, variance=1):
    """Moment of the given law by order; odd orders vanish.  None for law "none"."""
    if law == "none":
        return None
    if order % 2:
        return Fraction(0)
    n = order // 2
    if law == "gaussian":
        return double_factorial(2 * n - 1) * variance**n
    if law == "semicircle":
        return catalan(n) * variance**n
    raise ValueError(f"unknown law {law!r}")


def subpair_bound(r: int, N: int, norms: Sequence[float]) -> float:
    """sum_{s < r/2} A_s binom(N, s) prod ||X|| / N^{r/2}: the budget of sub-pair terms."""
    prod = math.prod(norms)
    total = sum(count_multiplicity_bounded_maps(r, s) * math.comb(N, s) for s in range(1, (r + 1) // 2) if 2 * s < r)
    return total * prod / N ** (r / 2)


def convergence_table(
    model: ModelSystem, x: Element, n_max: int, N_ladder: Sequence[int], include_odd: bool = True
) -> list[MomentReport]:
    """Finite-N moments of F_N(X) next to the pair-partition limit and the model's law."""
    xc, shift = centre(model, x)
    variance = model.state(xc * xc)
    law = model.fluctuation_law
    orders = [r for r in range(1, 2 * n_max + 1) if include_odd or r % 2 == 0]
    values = moment_sequence(model, x, orders, N_ladder)
    notes = [f"centred by subtracting phi(X) = {format_scalar(shift)}"] if shift != 0 else []
    limits = {}
    for r in orders:
        if r % 2 == 0:
            limits[r] = asymptotic_moment_pair_sum(model, [xc] * r, ordered=False)
    rows = []
    for N in N_ladder:
        for r in orders:
            mv = values[(N, r)]
            value = mv.value
            reference = reference_moment(law, r, variance)
            asym = limits.get(r)
            envelope = None
            if r % 2:
                envelope = abs(to_complex(mv.total)) / N ** (r / 2) * math.sqrt(N)
            rows.append(
                MomentReport(
                    r,
                    N,
                    value,
                    asym,
                    reference,
                    law,
                    None if reference is None else _res(value, reference),
                    None if asym is None else _res(value, asym),
                    envelope,
                    notes,
                )
            )
    return rows


def _res(a, b) -> float:
    return abs(to_complex(a) - to_complex(b))


def hankel_positive(moments: Sequence, tol: float = 1e-12) -> bool:
    """Nonnegativity of the Hankel matrices [m_{i+j}] built from m_0, m_1, ..."""
    size = (len(moments) + 1) // 2
    for k in range(1, size + 1):
        H = np.array([[to_complex(moments[i + j]).real for j in range(k)] for i in range(k)])
        if np.linalg.eigvalsh(H).min() < -tol:
            return False
    return True


# -- Koopman third moment --------------------------------------------------------------

DISPLAYED_THIRD_MOMENT_TEXT = (
    "phi_inf(F_N(X)) = (1/sqrt N) phi(X~^3) - ((N-1)/sqrt N) phi(X) (phi(X^2) - phi(X)^2)"
)


def koopman_third_moment_report(model: ModelSystem, x: Element, N_ladder: Sequence[int]) -> dict:
    """Exact phi_inf(F_N(X)^3) for the singleton-factorization model.

    Rows list the exact value, the displayed formula (read as the third moment)
    and the decay term phi(X~^3)/sqrt N.  The displayed formula is reproduced
    verbatim; it is written as a first moment but is a third-moment statement.
    """
    m1 = model.state(x)
    m2 = model.state(x * x)
    xc = x - m1
    c3 = model.state(xc * xc * xc)
    rows = []
    for N in N_ladder:
        mv = finite_n_moment(model, FluctuationSpec((x, x, x), N), "grouped")
        value = complex(mv).real
        formula = float(c3) / math.sqrt(N) - (N - 1) / math.sqrt(N) * float(m1 * (m2 - m1 * m1))
        decay = float(c3) / math.sqrt(N)
        rows.append(
            {
                "N": N,
                "value_times_sqrtN": format_scalar(mv.total / N),
                "value": value,
                "displayed_formula": formula,
                "decay_term": decay,
                "residual_formula": abs(value - formula),
                "residual_decay": abs(value - decay),
            }
        )
    return {
        "observable": model.format_element(x),
        "phi_X": format_scalar(m1),
        "phi_X2": format_scalar(m2),
        "phi_Xc3": format_scalar(c3),
        "displayed_formula_verbatim": DISPLAYED_THIRD_MOMENT_TEXT,
        "note": (
            "The displayed left-hand side is a first moment; the right-hand side is the exact "
            "third moment phi_inf(F_N(X)^3). It reduces to phi(X~^3)/sqrt N only when phi(X) = 0."
        ),
        "rows": rows,
    }


__all__ = [
    "BRUTE_FORCE_BUDGET",
    "FluctuationSpec",
    "MomentReport",
    "MomentValue",
    "DISPLAYED_THIRD_MOMENT_TEXT",
    "asymptotic_moment_pair_sum",
    "block_sums",
    "centre",
    "convergence_table",
    "finite_n_moment",
    "gaussian_moment",
    "hankel_positive",
    "koopman_third_moment_report",
    "moment_sequence",
    "noncrossing_moment",
    "reference_moment",
    "semicircle_density",
    "semicircle_moment",
    "semicircle_moment_quadrature",
    "subpair_bound",
]

"""Cesaro time averages, nested multi-time averages and the asymptotic state.

Exact-valued correlation functions of the shipped models are eventually
periodic in each time variable.  For those the limit of the Cesaro mean is
computed exactly from a certified period on a tail window; everything else
falls back to a horizon-doubling ladder of finite means.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .models.base import ModelSystem
from .scalars import format_scalar, is_exact, to_complex
from .words import (
    Word,
    apply_injection,
    apply_permutation,
    normalize_labels,
    reduce,
)


@dataclass(frozen=True)
class AverageConfig:
    """Averaging horizon, probe horizons for the convergence ladder and tolerance."""

    horizon: int = 256
    probes: tuple[int, ...] = ()
    tolerance: float = 1e-6
    min_window: int = 16

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be positive")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        ladder = self.ladder()
        if any(a >= b for a, b in zip(ladder, ladder[1:])):
            raise ValueError(f"probe horizons must be strictly increasing, got {ladder}")

    def ladder(self) -> tuple[int, ...]:
        if self.probes:
            return tuple(self.probes)
        return tuple(h for h in (self.horizon // 4, self.horizon // 2, self.horizon) if h > 0)


@dataclass
class AverageResult:
    value: object
    converged: bool
    exact: bool
    horizon: int
    ladder: list = field(default_factory=list)
    period: int | None = None
    failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "value": format_scalar(self.value),
            "value_complex": [to_complex(self.value).real, to_complex(self.value).imag],
            "converged": self.converged,
            "exact": self.exact,
            "horizon": self.horizon,
            "ladder": [[T, format_scalar(v)] for T, v in self.ladder],
            "period": self.period,
            "failures": list(self.failures),
        }


def _mean(values: Sequence) -> object:
    if all(is_exact(v) for v in values):
        total = sum(values, Fraction(0))
        return total / len(values)
    zs = [to_complex(v) for v in values]
    re = math.fsum(z.real for z in zs) / len(zs)
    im = math.fsum(z.imag for z in zs) / len(zs)
    return complex(re, im) if im else re


def _close(a, b, eps: float) -> bool:
    return abs(to_complex(a) - to_complex(b)) <= eps


def eventual_period(values: Sequence) -> tuple[int, object] | None:
    """Smallest period P holding on the tail half of ``values`` with two full repeats.

    Returns (P, mean over one period) or None.
    """
    H = len(values)
    start = H // 2
    for P in range(1, (H - start) // 2 + 1):
        if all(values[s] == values[s + P] for s in range(start, H - P)):
            return P, _mean(values[start : start + P])
    return None


def cesaro_average(f: Callable[[int], object], cfg: AverageConfig | None = None, direction: int = 1) -> AverageResult:
    """lim (1/T) sum_{s=0}^{T-1} f(direction * s).

    Exact values: the window is doubled from ``cfg.min_window`` until two
    successive windows certify the same eventual period and mean.  Otherwise
    the finite means along the probe ladder are reported and the result is
    converged when the last two agree within the tolerance.
    """
    cfg = cfg or AverageConfig()
    values: list = []

    def extend(n: int):
        while len(values) < n:
            values.append(f(direction * len(values)))

    extend(1)
    if is_exact(values[0]):
        previous = None
        # at least two windows, so that a period can be certified within the horizon
        H = max(2, min(cfg.min_window, cfg.horizon // 2))
        while True:
            extend(H)
            if not all(is_exact(v) for v in values):
                break
            found = eventual_period(values)
            if found is not None and previous is not None and found == previous:
                period, value = found
                return AverageResult(value, True, True, H, [(H, value)], period)
            previous = found
            if H >= cfg.horizon:
                break
            H = min(2 * H, cfg.horizon)
    ladder = []
    for T in cfg.ladder():
        extend(T)
        ladder.append((T, _mean(values[:T])))
    value = ladder[-1][1]
    converged = len(ladder) >= 2 and _close(ladder[-1][1], ladder[-2][1], cfg.tolerance)
    return AverageResult(value, converged, False, ladder[-1][0], ladder)


def corridor(d: int, times: Sequence[int]) -> int:
    """0 if two of the times are within distance d of each other, else 1."""
    for a, b in itertools.combinations(times, 2):
        if abs(a - b) <= d:
            return 0
    return 1


class CorrelationFunction:
    """t -> phi(X1(t_{nu(1)}) ... Xn(t_{nu(n)})) for a word with normalised labels."""

    def __init__(self, model: ModelSystem, w: Word, arity: int | None = None):
        if not model.supports_time:
            raise NotImplementedError(f"{model.kind} model has no finite-time correlations")
        padded, nu = normalize_labels(w)
        self.model = model
        self.word = padded
        self.nu = nu
        self.arity = max(nu.arity, arity or 0)
        self._cache: dict = {}

    def __call__(self, *times: int):
        if times in self._cache:
            return self._cache[times]
        timed = [(letter.observable, times[letter.copy - 1]) for letter in self.word.letters]
        value = self.word.scalar * self.model.correlate(timed)
        if len(self._cache) < 200_000:
            self._cache[times] = value
        return value


def nested_average(
    cf,
    cfg: AverageConfig | None = None,
    arity: int | None = None,
    order: Sequence[int] | None = None,
    corridor_d: int | None = None,
    directions: Sequence[int] | None = None,
) -> AverageResult:
    """Average over t_1 first, then t_2, ..., t_k last.

    ``cf`` is a CorrelationFunction or a callable of ``arity`` integer times.
    ``order`` lists the time indices from innermost to outermost (default
    1..k).  Each inner variable is averaged over a window starting at the
    largest time already fixed by the outer levels, which leaves Cesaro limits
    unchanged.  ``corridor_d`` multiplies the function by the corridor
    indicator; ``directions`` picks forward (+1) or backward (-1) means per
    time index.
    """
    cfg = cfg or AverageConfig()
    k = arity if arity is not None else cf.arity
    order = tuple(order) if order is not None else tuple(range(1, k + 1))
    if sorted(order) != list(range(1, k + 1)):
        raise ValueError(f"order {order} is not a permutation of 1..{k}")
    directions = tuple(directions) if directions is not None else (1,) * k
    failures: list = []

    def f(times: dict):
        t = tuple(times[j] for j in range(1, k + 1))
        value = cf(*t)
        if corridor_d is not None and not corridor(corridor_d, t):
            return 0 * value
        return value

    exact_all = True

    def level(depth: int, fixed: dict) -> object:
        nonlocal exact_all
        if depth < 0:
            return f(fixed)
        idx = order[depth]
        sign = directions[idx - 1]
        offset = max((abs(v) for v in fixed.values()), default=0)
        result = cesaro_average(lambda s: level(depth - 1, {**fixed, idx: sign * offset + s}), cfg, sign)
        if not result.exact:
            exact_all = False
        if not result.converged and (idx, "not converged") not in failures:
            failures.append((idx, "not converged"))
        return result.value

    if k == 0:
        value = cf()
        return AverageResult(value, True, is_exact(value), 0, [(0, value)])
    idx = order[-1]
    sign = directions[idx - 1]
    top = cesaro_average(lambda s: level(k - 2, {idx: s}), cfg, sign)
    if not top.exact:
        exact_all = False
    if not top.converged and (idx, "not converged") not in failures:
        failures.append((idx, "not converged"))
    top.failures = sorted(failures)
    top.exact = exact_all and top.exact
    top.converged = not failures
    return top


# -- asymptotic state --------------------------------------------------------------


@dataclass
class PhiResult:
    value: object
    method: str
    exact_value: object = None
    average: AverageResult | None = None
    agree: bool | None = None

    def to_dict(self) -> dict:
        out = {"value": format_scalar(self.value), "method": self.method}
        if self.exact_value is not None:
            out["exact_value"] = format_scalar(self.exact_value)
        if self.average is not None:
            out["average"] = self.average.to_dict()
        if self.agree is not None:
            out["agree"] = self.agree
        return out


def evaluate_phi_infinity(model: ModelSystem, w: Word, cfg: AverageConfig | None = None, method: str = "auto") -> PhiResult:
    """phi_inf(w) through the model's exact evaluator, nested averaging, or both.

    ``method`` is ``auto`` (exact when available), ``exact``, ``average`` or
    ``both``; ``both`` records whether the two values agree within tolerance.
    """
    cfg = cfg or AverageConfig()
    if method not in ("auto", "exact", "average", "both"):
        raise ValueError(f"unknown method {method!r}")
    reduced = reduce(w)
    exact_value = None
    if method in ("auto", "exact", "both"):
        exact_value = model.phi_infinity(reduced)
        if exact_value is None and method == "exact":
            raise ValueError(f"{model.kind} model has no exact asymptotic evaluator")
        if exact_value is not None and method in ("auto", "exact"):
            return PhiResult(exact_value, "exact", exact_value)
    avg = nested_average(CorrelationFunction(model, reduced), cfg)
    if exact_value is None:
        return PhiResult(avg.value, "average", None, avg)
    agree = _close(exact_value, avg.value, cfg.tolerance)
    return PhiResult(exact_value, "both", exact_value, avg, agree)


def phi_infinity(model: ModelSystem, w: Word, cfg: AverageConfig | None = None):
    return evaluate_phi_infinity(model, w, cfg).value


# -- checks ------------------------------------------------------------------------


@dataclass
class CheckReport:
    name: str
    ok: bool
    tolerance: float
    cases: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "ok": self.ok,
            "tolerance": self.tolerance,
            "cases": self.cases,
            "violations": self.violations,
        }


def order_preserving_injections(k: int, m: int):
    """All strictly increasing maps {1..k} -> {1..m} as dicts."""
    for image in itertools.combinations(range(1, m + 1), k):
        yield dict(zip(range(1, k + 1), image))


def check_strong_compatibility(
    model: ModelSystem, w: Word, paddings: int = 2, cfg: AverageConfig | None = None
) -> CheckReport:
    """Average of w against every relabelling by an order preserving injection.

    Each relabelled word is averaged as a function of k + paddings times, the
    unused ones acting as dummy variables.
    """
    cfg = cfg or AverageConfig()
    base_word, nu = normalize_labels(reduce(w))
    k = nu.arity
    base = nested_average(CorrelationFunction(model, base_word), cfg)
    cases, violations = [], []
    for theta in order_preserving_injections(k, k + paddings):
        image = apply_injection(base_word, theta) if k else base_word
        g = CorrelationFunction(model, image, arity=k + paddings)
        avg = nested_average(g, cfg)
        case = {"injection": [theta[j] for j in range(1, k + 1)], "value": format_scalar(avg.value)}
        cases.append(case)
        if not _equal(avg.value, base.value, base.exact and avg.exact, cfg.tolerance):
            violations.append(case)
    return CheckReport("strong_compatibility", not violations, cfg.tolerance, cases, violations)


def _equal(a, b, exact: bool, eps: float) -> bool:
    if exact:
        return a == b
    return _close(a, b, eps)


def check_product_property(
    f1: Callable, k1: int, f2: Callable, k2: int, cfg: AverageConfig | None = None
) -> CheckReport:
    """Avg(f1 f2) = Avg(f1) Avg(f2) for functions of disjoint time sets.

    f1 uses t_1..t_k1 and f2 uses the next k2 times.
    """
    cfg = cfg or AverageConfig()
    a1 = nested_average(f1, cfg, arity=k1)
    a2 = nested_average(f2, cfg, arity=k2)
    joint = nested_average(lambda *t: f1(*t[:k1]) * f2(*t[k1:]), cfg, arity=k1 + k2)
    product = a1.value * a2.value
    exact = a1.exact and a2.exact and joint.exact
    ok = _equal(joint.value, product, exact, cfg.tolerance)
    case = {
        "joint": format_scalar(joint.value),
        "product": format_scalar(product),
        "exact": exact,
    }
    return CheckReport("product_property", ok, cfg.tolerance, [case], [] if ok else [case])


def check_permutation_invariance(
    model: ModelSystem, w: Word, permutations: Sequence[dict], cfg: AverageConfig | None = None, method: str = "auto"
) -> CheckReport:
    cfg = cfg or AverageConfig()
    base = evaluate_phi_infinity(model, w, cfg, method)
    exact = base.method == "exact"
    cases, violations = [], []
    for pi in permutations:
        other = evaluate_phi_infinity(model, apply_permutation(w, pi), cfg, method)
        case = {"permutation": {str(a): b for a, b in pi.items()}, "value": format_scalar(other.value)}
        cases.append(case)
        if not _equal(other.value, base.value, exact and other.method == "exact", cfg.tolerance):
            violations.append(case)
    return CheckReport("permutation_invariance", not violations, cfg.tolerance, cases, violations)


def compatibility_failure_demo(cfg: AverageConfig | None = None) -> dict:
    """Two different single-time means break strong compatibility.

    With a forward Cesaro mean on t_1 and a backward one on t_2, the step
    function f(t) = [t >= 0] averages to 0 as a function of t_2 alone but to 1
    as a function of t_1 alone, although both are the same function with a
    dummy variable added.
    """
    cfg = cfg or AverageConfig(horizon=64)

    def step(t: int) -> Fraction:
        return Fraction(1) if t >= 0 else Fraction(0)

    directions = (1, -1)
    via_t2 = nested_average(lambda t1, t2: step(t2), cfg, arity=2, directions=directions)
    via_t1 = nested_average(lambda t1, t2: step(t1), cfg, arity=2, directions=directions)
    return {
        "avg_of_f_in_t2": via_t2.value,
        "avg_of_f_in_t1": via_t1.value,
        "compatible": via_t1.value == via_t2.value,
    }


__all__ = [
    "AverageConfig",
    "AverageResult",
    "CheckReport",
    "CorrelationFunction",
    "PhiResult",
    "cesaro_average",
    "check_permutation_invariance",
    "check_product_property",
    "check_strong_compatibility",
    "compatibility_failure_demo",
    "corridor",
    "evaluate_phi_infinity",
    "eventual_period",
    "nested_average",
    "order_preserving_injections",
    "phi_infinity",
]

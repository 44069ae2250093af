"""Testers for the clustering hierarchy and asymptotic Abelianess.

Every probe is a linear combination of products of observables placed in time
groups: group 0 stays at time 0 and group j >= 1 runs along the ray
t_j = j (d + 1) tau.  Limits are read off the tail window tau in [T/2, T],
means are Cesaro averages in tau.  Models without finite-time dynamics (the
singleton-factorization model) are probed through their asymptotic state, with
group g placed in copy g + 1.

Condition ids used throughout (and by the command line):

    4    clustering in the mean
    5    weak clustering
    6a   strong clustering
    6b   hyper-clustering along rays
    8a   asymptotic Abelianess in the mean
    8b   weak asymptotic Abelianess
    8c   strong asymptotic Abelianess
    20   centred insertions between time-shifted letters vanish along rays
    24   mean of centred double insertions vanishes
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .averaging import AverageConfig, cesaro_average
from .models.base import Element, ModelSystem
from .scalars import format_scalar, is_exact, to_complex
from .words import Letter, Word, normalize_labels

CONDITIONS = ("4", "5", "6a", "6b", "8a", "8b", "8c", "20", "24")
NUMERIC_TOLERANCE = 1e-6


@dataclass(frozen=True)
class Probe:
    """sum_i coef_i * phi(prod_k X_ik(t_{g_ik})) compared against ``target``."""

    label: str
    terms: tuple
    target: object

    @classmethod
    def single(cls, label: str, factors: Sequence[tuple[Element, int]], target) -> "Probe":
        return cls(label, ((1, tuple(factors)),), target)


@dataclass
class ClusterReport:
    condition: str
    model: str
    verdict: str
    max_residual: float
    tolerance: float
    exact: bool
    horizon: int
    probes: list = field(default_factory=list)
    witness: dict | None = None

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "model": self.model,
            "verdict": self.verdict,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "exact": self.exact,
            "horizon": self.horizon,
            "probes": self.probes,
            "witness": self.witness,
        }


def _slope(group: int, d: int) -> int:
    return group * (d + 1)


def _value_at(model: ModelSystem, probe: Probe, tau: int, d: int):
    total = 0
    for coef, factors in probe.terms:
        timed = [(x, _slope(g, d) * tau) for x, g in factors]
        total = total + coef * model.correlate(timed)
    return total


def _asymptotic_value(model: ModelSystem, probe: Probe):
    total = 0
    for coef, factors in probe.terms:
        letters = tuple(Letter(x, g + 1) for x, g in factors)
        value = model.phi_infinity(Word(letters))
        if value is None:
            raise NotImplementedError(f"{model.kind} model has no asymptotic evaluator")
        total = total + coef * value
    return total


def _residual(value, target) -> float:
    return abs(to_complex(value) - to_complex(target))


def _verdict(values: Sequence, target, tol: float) -> tuple[str, float, bool]:
    exact = all(is_exact(v) for v in values) and is_exact(target)
    residual = max((_residual(v, target) for v in values), default=0.0)
    if exact:
        return ("holds" if all(v == target for v in values) else "fails"), residual, True
    if residual < tol:
        return "holds", residual, False
    if residual > 10 * tol:
        return "fails", residual, False
    return "inconclusive", residual, False


def evaluate_probe(
    model: ModelSystem, probe: Probe, mode: str, horizon: int = 64, d: int = 1, tolerance: float = NUMERIC_TOLERANCE
) -> dict:
    """Verdict for one probe; ``mode`` is ``limit`` or ``mean``."""
    if not model.supports_time:
        values = [_asymptotic_value(model, probe)]
    elif mode == "limit":
        values = [_value_at(model, probe, tau, d) for tau in range(horizon // 2, horizon + 1)]
    elif mode == "mean":
        avg = cesaro_average(lambda tau: _value_at(model, probe, tau, d), AverageConfig(horizon=horizon, tolerance=tolerance))
        # an uncertified finite mean is only an estimate
        values = [avg.value if avg.exact else to_complex(avg.value)]
    else:
        raise ValueError(f"unknown probe mode {mode!r}")
    verdict, residual, exact = _verdict(values, probe.target, tolerance)
    worst = max(values, key=lambda v: _residual(v, probe.target))
    return {
        "probe": probe.label,
        "verdict": verdict,
        "residual": residual,
        "exact": exact,
        "value": format_scalar(worst),
        "target": format_scalar(probe.target),
    }


def _report(
    condition: str, model: ModelSystem, probes: Iterable[Probe], mode: str, horizon: int, d: int, tolerance: float
) -> ClusterReport:
    rows = [evaluate_probe(model, p, mode, horizon, d, tolerance) for p in probes]
    verdicts = {r["verdict"] for r in rows}
    if "fails" in verdicts:
        verdict = "fails"
    elif verdicts <= {"holds"}:
        verdict = "holds"
    else:
        verdict = "inconclusive"
    witness = max((r for r in rows if r["verdict"] == "fails"), key=lambda r: r["residual"], default=None)
    return ClusterReport(
        condition,
        model.kind,
        verdict,
        max((r["residual"] for r in rows), default=0.0),
        0.0 if all(r["exact"] for r in rows) else tolerance,
        all(r["exact"] for r in rows),
        horizon,
        rows,
        witness,
    )


def _name(model: ModelSystem, x: Element) -> str:
    return model.format_element(x)


def _state(model: ModelSystem, *xs: Element):
    acc = model.one()
    for x in xs:
        acc = acc * x
    return model.state(acc)


# -- condition testers -------------------------------------------------------------


def _triple_probes(model: ModelSystem, probes) -> list[Probe]:
    out = []
    for X, Y, Z in probes:
        label = f"phi({_name(model, X)} {_name(model, Y)}(t) {_name(model, Z)})"
        out.append(Probe.single(label, [(X, 0), (Y, 1), (Z, 0)], _state(model, X, Z) * model.state(Y)))
    return out


def test_clustering_in_mean(model, probes=None, horizon: int = 64, tolerance: float = NUMERIC_TOLERANCE):
    """Avg_t phi(X Y(t) Z) = phi(XZ) phi(Y) on triples (X, Y, Z)."""
    probes = probes if probes is not None else probe_catalog(model, "4")
    return _report("4", model, _triple_probes(model, probes), "mean", horizon, 0, tolerance)


def test_weak_clustering(model, probes=None, horizon: int = 64, tolerance: float = NUMERIC_TOLERANCE):
    """lim_t phi(X Y(t) Z) = phi(XZ) phi(Y) on triples (X, Y, Z)."""
    probes = probes if probes is not None else probe_catalog(model, "5")
    return _report("5", model, _triple_probes(model, probes), "limit", horizon, 0, tolerance)


def test_strong_clustering(model, probes=None, horizon: int = 64, tolerance: float = NUMERIC_TOLERANCE):
    """lim_t phi(X Y(t) Z S(t) T) = phi(XZT) phi(YS) on 5-tuples."""
    probes = probes if probes is not None else probe_catalog(model, "6a")
    out = []
    for X, Y, Z, S, T in probes:
        label = (
            f"phi({_name(model, X)} {_name(model, Y)}(t) {_name(model, Z)} "
            f"{_name(model, S)}(t) {_name(model, T)})"
        )
        target = _state(model, X, Z, T) * _state(model, Y, S)
        out.append(Probe.single(label, [(X, 0), (Y, 1), (Z, 0), (S, 1), (T, 0)], target))
    return _report("6a", model, out, "limit", horizon, 0, tolerance)


def test_hyper_clustering(model, words=None, horizon: int = 64, d: int = 1, tolerance: float = NUMERIC_TOLERANCE):
    """Multi-time limit along rays t_j = j (d+1) tau against the grouped product.

    ``words`` is a Word or a list of Words; their copy labels are the time
    labels nu.
    """
    if words is None:
        words = probe_catalog(model, "6b")
    if isinstance(words, Word):
        words = [words]
    out = []
    for w in words:
        padded, _ = normalize_labels(w)
        groups: dict[int, list[Element]] = {}
        for letter in padded.letters:
            groups.setdefault(letter.copy, []).append(letter.observable)
        target = w.scalar
        for j in sorted(groups):
            target = target * _state(model, *groups[j])
        factors = [(letter.observable, letter.copy) for letter in padded.letters]
        label = " ".join(f"{_name(model, x)}@{g}" for x, g in factors)
        out.append(Probe(label, ((w.scalar, tuple(factors)),), target))
    return _report("6b", model, out, "limit", horizon, d, tolerance)


def test_condition_20(model, probes=None, horizon: int = 64, d: int = 1, tolerance: float = NUMERIC_TOLERANCE):
    """phi(Z_1(t_nu(1)) ... Y ... Z_n(t_nu(n))) -> 0 for centred Y at time 0.

    A probe is (left, Y, right) with left/right lists of (Z, label >= 1); Y is
    centred here.
    """
    probes = probes if probes is not None else probe_catalog(model, "20")
    out = []
    for left, Y, right in probes:
        Yc = model.centred(Y)
        factors = list(left) + [(Yc, 0)] + list(right)
        label = " ".join(
            f"{_name(model, x)}@{g}" if g else f"~{_name(model, Y)}" for x, g in factors
        )
        out.append(Probe.single(label, factors, Fraction(0)))
    return _report("20", model, out, "limit", horizon, d, tolerance)


def test_condition_24(model, probes=None, horizon: int = 64, tolerance: float = NUMERIC_TOLERANCE):
    """Avg_t phi(A X(t) B Y(t) C) = 0 for centred X, B, Y (centred here)."""
    probes = probes if probes is not None else probe_catalog(model, "24")
    out = []
    for A, X, B, Y, C in probes:
        Xc, Bc, Yc = model.centred(X), model.centred(B), model.centred(Y)
        label = (
            f"Avg phi({_name(model, A)} ~{_name(model, X)}(t) ~{_name(model, B)} "
            f"~{_name(model, Y)}(t) {_name(model, C)})"
        )
        out.append(Probe.single(label, [(A, 0), (Xc, 1), (Bc, 0), (Yc, 1), (C, 0)], Fraction(0)))
    return _report("24", model, out, "mean", horizon, 0, tolerance)


def test_asymptotic_abelianess(model, level: str = "weak", probes=None, horizon: int = 64, tolerance: float = NUMERIC_TOLERANCE):
    """Commutators [X, Y(t)] in the mean (8.a), weakly (8.b) or strongly (8.c).

    mean/weak probes are (S, X, Y, Z) for phi(S [X, Y(t)] Z); strong probes are
    (S, X, Y) for phi(S* [X, Y(t)]* [X, Y(t)] S).
    """
    condition = {"mean": "8a", "weak": "8b", "strong": "8c"}.get(level)
    if condition is None:
        raise ValueError(f"level must be mean, weak or strong, got {level!r}")
    probes = probes if probes is not None else probe_catalog(model, condition)
    out = []
    if level in ("mean", "weak"):
        for S, X, Y, Z in probes:
            terms = (
                (1, ((S, 0), (X, 0), (Y, 1), (Z, 0))),
                (-1, ((S, 0), (Y, 1), (X, 0), (Z, 0))),
            )
            label = f"phi({_name(model, S)} [{_name(model, X)}, {_name(model, Y)}(t)] {_name(model, Z)})"
            out.append(Probe(label, terms, Fraction(0)))
        mode = "mean" if level == "mean" else "limit"
    else:
        for S, X, Y in probes:
            Sa, Xa, Ya = model.adjoint(S), model.adjoint(X), model.adjoint(Y)
            # [X,Y]*[X,Y] = Y*X*XY - Y*X*YX - X*Y*XY + X*Y*YX
            terms = (
                (1, ((Sa, 0), (Ya, 1), (Xa, 0), (X, 0), (Y, 1), (S, 0))),
                (-1, ((Sa, 0), (Ya, 1), (Xa, 0), (Y, 1), (X, 0), (S, 0))),
                (-1, ((Sa, 0), (Xa, 0), (Ya, 1), (X, 0), (Y, 1), (S, 0))),
                (1, ((Sa, 0), (Xa, 0), (Ya, 1), (Y, 1), (X, 0), (S, 0))),
            )
            label = f"phi(S* |[{_name(model, X)}, {_name(model, Y)}(t)]|^2 S), S={_name(model, S)}"
            out.append(Probe(label, terms, Fraction(0)))
        mode = "limit"
    return _report(condition, model, out, mode, horizon, 0, tolerance)


for _tester in (
    test_clustering_in_mean,
    test_weak_clustering,
    test_strong_clustering,
    test_hyper_clustering,
    test_condition_20,
    test_condition_24,
    test_asymptotic_abelianess,
):
    _tester.__test__ = False  # keep pytest from collecting these when imported


# -- probe catalogs ----------------------------------------------------------------


def observable_pool(model: ModelSystem) -> list[Element]:
    """A small set of observables per model from which catalogs are drawn."""
    kind = model.kind
    if kind == "freeshift":
        names = ["e0", "e1", "e0e1"]
    elif kind == "catmap":
        names = ["W(1,0)", "W(0,1)", "W(-1,0)", "W(1,1)"]
    elif kind == "bernoulli":
        names = ["X", "Xnext"]
        extra = [model.indicator(0, 1) * model.indicator(1, 1)]
        return [model.one()] + [model.observable(n) for n in names] + extra
    elif kind == "singleton":
        names = ["X", "Y", "X*Y"]
    elif kind == "car":
        names = ["a(0)", "a*(0)", "a*(1)"]
        return [model.one()] + [model.observable(n) for n in names] + [model.observable("a*(0)") * model.observable("a(0)")]
    else:
        return [model.one()] + list(model.registry.values())
    return [model.one()] + [model.observable(n) for n in names]


def witness_probes(model: ModelSystem, condition: str = "6a") -> list[tuple]:
    """Hand-picked 5-tuples exposing non-commutativity.

    For "6a" they are (X, Y, Z, S, T); for "24" they are (A, X, B, Y, C).
    """
    one = model.one()
    if model.kind == "catmap":
        W = model.weyl
        if condition == "24":
            return [(W((1, 0)), W((0, 1)), W((-1, 0)), W((0, -1)), one)]
        return [(W((1, 0)), W((0, 1)), W((-1, 0)), W((0, -1)), one), (one, W((0, 1)), W((1, 0)), W((0, -1)), W((-1, 0)))]
    if model.kind == "freeshift":
        e0 = model.observable("e0")
        return [(one, e0, e0, e0, e0)]
    if model.kind == "car":
        a, ad = model.observable("a(0)"), model.observable("a*(0)")
        if condition == "24":
            return [(ad, ad, a, a, one)]
        return [(ad, a, a, ad, one)]
    return []


def probe_catalog(model: ModelSystem, condition: str, seed: int = 7, size: int = 40) -> list:
    """Deterministic probes for a condition.

    Weak and mean probes are all triples from the pool; strong probes contain
    every weak probe padded with S = T = 1 plus random 5-tuples, and
    hyper-clustering words contain every strong probe written as
    X@1 Y@2 Z@1 S@2 T@1 plus random three-label words, so that verdicts on the
    stronger conditions constrain the weaker ones probe by probe.
    """
    pool = observable_pool(model)
    one = model.one()
    triples = list(itertools.product(pool, repeat=3))
    if condition in ("4", "5"):
        return triples
    # the strong list is shared by 6a and 6b
    rng = random.Random(f"{seed}:{model.kind}:6a")
    strong = [(X, Y, Z, one, one) for X, Y, Z in triples]
    strong += [tuple(rng.choice(pool) for _ in range(5)) for _ in range(size)]
    strong += witness_probes(model, "6a")
    rng = random.Random(f"{seed}:{model.kind}:{condition}")
    if condition == "6a":
        return strong
    if condition == "6b":
        words = [
            Word(tuple(Letter(x, g) for x, g in zip(t, (1, 2, 1, 2, 1)))) for t in strong
        ]
        for _ in range(size // 2):
            n = rng.randint(2, 5)
            labels = [rng.randint(1, 3) for _ in range(n)]
            words.append(Word(tuple(Letter(rng.choice(pool), g) for g in labels)))
        return words
    if condition == "20":
        probes = [([(X, 1)], Y, [(Z, 1)]) for X, Y, Z in triples]
        for _ in range(size):
            left = [(rng.choice(pool), rng.randint(1, 3)) for _ in range(rng.randint(0, 2))]
            right = [(rng.choice(pool), rng.randint(1, 3)) for _ in range(rng.randint(0, 2))]
            probes.append((left, rng.choice(pool), right))
        return probes
    if condition == "24":
        probes = [(one, X, B, Y, one) for X, B, Y in triples]
        probes += [tuple(rng.choice(pool) for _ in range(5)) for _ in range(size)]
        return probes + witness_probes(model, "24")
    if condition in ("8a", "8b"):
        return [(one, X, Y, Z) for X, Y, Z in triples] + [
            tuple(rng.choice(pool) for _ in range(4)) for _ in range(size)
        ]
    if condition == "8c":
        return [(S, X, Y) for S, X, Y in triples]
    raise ValueError(f"unknown condition {condition!r}; expected one of {CONDITIONS}")


def run_condition(model: ModelSystem, condition: str, horizon: int = 64, tolerance: float = NUMERIC_TOLERANCE, probes=None):
    if condition == "4":
        return test_clustering_in_mean(model, probes, horizon, tolerance)
    if condition == "5":
        return test_weak_clustering(model, probes, horizon, tolerance)
    if condition == "6a":
        return test_strong_clustering(model, probes, horizon, tolerance)
    if condition == "6b":
        return test_hyper_clustering(model, probes, horizon, tolerance=tolerance)
    if condition == "20":
        return test_condition_20(model, probes, horizon, tolerance=tolerance)
    if condition == "24":
        return test_condition_24(model, probes, horizon, tolerance)
    level = {"8a": "mean", "8b": "weak", "8c": "strong"}.get(condition)
    if level is not None:
        return test_asymptotic_abelianess(model, level, probes, horizon, tolerance)
    raise ValueError(f"unknown condition {condition!r}; expected one of {CONDITIONS}")


def run_all_conditions(model: ModelSystem, horizon: int = 64, conditions: Sequence[str] = CONDITIONS) -> dict:
    return {c: run_condition(model, c, horizon) for c in conditions}


IMPLICATIONS = (
    ("6b", "6a"),
    ("6a", "6b"),
    ("6a", "5"),
    ("5", "4"),
    ("20", "5"),
    ("4", "8a"),
    ("5", "8b"),
    ("6a", "8c"),
)


def check_implication_chain(reports: dict) -> list[str]:
    """Violations of 6b <=> 6a => 5 => 4 and of the implied Abelianess conditions.

    A violation is a condition that holds while one it implies fails;
    inconclusive verdicts constrain nothing.
    """
    violations = []
    for strong, weak in IMPLICATIONS:
        if strong in reports and weak in reports:
            if reports[strong].verdict == "holds" and reports[weak].verdict == "fails":
                violations.append(f"({strong}) holds but ({weak}) fails on {reports[weak].model}")
    return violations


# -- cat-map counterexample ------------------------------------------------------------


def catmap_counterexample(model=None, p=(1, 0), q=(0, 1), horizon: int = 720, oracle_range: int = 2) -> dict:
    """Condition 20 without condition 24 on the cat map.

    g(t1, t2) = phi(W(p) W(T^t1 q) W(-p) W(-T^t2 q)) vanishes along the ray
    (tau, 2 tau) for tau > 0, while the diagonal f(t) = g(t, t) is a root of
    unity whose Cesaro mean is nonzero.  Every value used is also compared with
    the clock-and-shift trace, as are all commutator words over labels with
    components bounded by ``oracle_range``.
    """
    from .models.catmap import CatMapModel, clock_shift_trace

    model = model or CatMapModel()
    p = tuple(int(v) for v in p)
    q = tuple(int(v) for v in q)
    mp = (-p[0], -p[1])
    mq = (-q[0], -q[1])

    def g(t1: int, t2: int):
        return model.correlate_labels([(p, 0), (q, t1), (mp, 0), (mq, t2)])

    tail = range(max(1, horizon // 2), horizon + 1)
    ray = [g(tau, 2 * tau) for tau in tail]
    ray_limit = ray[0] if all(v == ray[0] for v in ray) else None
    avg = cesaro_average(lambda t: g(t, t), AverageConfig(horizon=horizon))
    period = avg.period or 1

    def oracle_gap(labels, value) -> float:
        return abs(clock_shift_trace(model.theta, labels) - to_complex(value))

    gaps = []
    for t in range(period):
        Tq = model.evolve_label(q, t)
        gaps.append(oracle_gap([p, Tq, mp, (-Tq[0], -Tq[1])], g(t, t)))
    for tau in range(1, 4):
        a, b = model.evolve_label(q, tau), model.evolve_label(q, 2 * tau)
        gaps.append(oracle_gap([p, a, mp, (-b[0], -b[1])], g(tau, 2 * tau)))
    span = range(-oracle_range, oracle_range + 1)
    labels = list(itertools.product(span, span))
    for a in labels:
        for b in labels:
            gaps.append(oracle_gap([a, b], model.correlate_labels([(a, 0), (b, 0)])))
            word = [a, b, (-a[0], -a[1]), (-b[0], -b[1])]
            gaps.append(oracle_gap(word, model.correlate_labels([(x, 0) for x in word])))
    oracle_max = max(gaps)
    return {
        "model": model.describe(),
        "p": list(p),
        "q": list(q),
        "horizon": horizon,
        "ray": "(tau, 2 tau)",
        "tail_window": [tail.start, tail.stop - 1],
        "ray_limit": None if ray_limit is None else format_scalar(ray_limit),
        "ray_limit_is_zero": ray_limit == 0,
        "cesaro_average": format_scalar(avg.value),
        "cesaro_average_complex": [to_complex(avg.value).real, to_complex(avg.value).imag],
        "cesaro_exact": avg.exact,
        "period": avg.period,
        "cesaro_nonzero": avg.value != 0,
        "diagonal_values": [format_scalar(g(t, t)) for t in range(period)],
        "oracle_cases": len(gaps),
        "oracle_max_error": oracle_max,
        "oracle_agrees": oracle_max < 1e-10,
        "independent": ray_limit == 0 and avg.value != 0,
    }


__all__ = [
    "CONDITIONS",
    "catmap_counterexample",
    "ClusterReport",
    "IMPLICATIONS",
    "Probe",
    "check_implication_chain",
    "evaluate_probe",
    "witness_probes",
    "observable_pool",
    "probe_catalog",
    "run_all_conditions",
    "run_condition",
    "test_asymptotic_abelianess",
    "test_clustering_in_mean",
    "test_condition_20",
    "test_condition_24",
    "test_hyper_clustering",
    "test_strong_clustering",
    "test_weak_clustering",
]

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asymfluct.averaging import (
    AverageConfig,
    CorrelationFunction,
    cesaro_average,
    check_permutation_invariance,
    check_product_property,
    check_strong_compatibility,
    compatibility_failure_demo,
    corridor,
    evaluate_phi_infinity,
    eventual_period,
    nested_average,
    order_preserving_injections,
)
from asymfluct.scalars import Cyclotomic
from asymfluct.words import word


def test_constant_average():
    res = cesaro_average(lambda t: Fraction(3))
    assert res.value == 3 and res.exact and res.period == 1


def test_roots_of_unity_average_to_zero():
    res = cesaro_average(lambda t: Cyclotomic.root(t, 5))
    assert res.value == 0 and res.period == 5


def test_transient_is_ignored():
    res = cesaro_average(lambda t: Fraction(1) if t == 0 else Fraction(0))
    assert res.value == 0


def test_numeric_sequence_uses_ladder():
    cfg = AverageConfig(horizon=4096, tolerance=1e-3)
    res = cesaro_average(lambda t: math.cos(math.sqrt(2) * t), cfg)
    assert not res.exact and res.converged
    assert abs(res.value) < 1e-2
    assert [T for T, _ in res.ladder] == [1024, 2048, 4096]


def test_config_validation():
    with pytest.raises(ValueError):
        AverageConfig(horizon=0)
    with pytest.raises(ValueError):
        AverageConfig(tolerance=0)
    with pytest.raises(ValueError):
        AverageConfig(probes=(8, 4))


def test_eventual_period():
    values = [Fraction(9)] * 3 + [Fraction(k % 3) for k in range(30)]
    P, mean = eventual_period(values)
    assert P == 3 and mean == 1


def test_corridor():
    assert corridor(1, (0, 3, 6)) == 1
    assert corridor(2, (0, 3, 5)) == 0


def test_order_preserving_injections_count():
    assert len(list(order_preserving_injections(2, 4))) == 6


def test_nested_average_separates_times():
    # f(t1, t2) = zeta_4^(t1 - t2) averages to 0; |.|^2 averages to 1
    res = nested_average(lambda t1, t2: Cyclotomic.root(t1 - t2, 4), arity=2)
    assert res.value == 0 and res.exact
    res = nested_average(lambda t1, t2: Fraction(1) if t1 == t2 else Fraction(0), arity=2)
    assert res.value == 0


def test_free_shift_phi_infinity_exact_and_averaged(free):
    e0 = free.observable("e0")
    cfg = AverageConfig(horizon=64)
    for w, expected in [
        (word((e0, 1), (e0, 2), (e0, 2), (e0, 1)), 1),
        (word((e0, 1), (e0, 2), (e0, 1), (e0, 2)), 0),
        (word((e0 + 1, 1), (e0 + 1, 2)), 1),
    ]:
        res = evaluate_phi_infinity(free, w, cfg, "both")
        assert res.value == expected and res.agree


def test_bernoulli_phi_infinity_factorizes(coin):
    X = coin.observable("X")
    w = word((X, 1), (X, 2), (X, 1), (X, 2))
    res = evaluate_phi_infinity(coin, w, AverageConfig(horizon=32), "both")
    assert res.value == Fraction(1, 16) and res.agree


def test_catmap_uses_averaging(cat):
    p, q = cat.weyl((1, 0)), cat.weyl((0, 1))
    mp, mq = cat.weyl((-1, 0)), cat.weyl((0, -1))
    res = evaluate_phi_infinity(cat, word((p, 1), (q, 2), (mp, 1), (mq, 2)), AverageConfig(horizon=64))
    assert res.method == "average" and res.average.exact
    # the commutator phase does not average out
    assert res.value == Fraction(-1, 2)


def test_exact_method_requires_evaluator(cat):
    with pytest.raises(ValueError):
        evaluate_phi_infinity(cat, word((cat.weyl((1, 0)), 1)), method="exact")


def test_singleton_has_no_time(singleton):
    with pytest.raises(NotImplementedError):
        CorrelationFunction(singleton, word((singleton.observable("X"), 1)))


def test_strong_compatibility_on_free_shift(free):
    e0, e1 = free.observable("e0"), free.observable("e1")
    w = word((e0, 1), (e1, 2), (e0, 1), (e1, 2))
    report = check_strong_compatibility(free, w, paddings=1, cfg=AverageConfig(horizon=32))
    assert report.ok and len(report.cases) == 3
    assert all(case["value"] == "0" for case in report.cases)


def test_product_property():
    f1 = lambda t: Cyclotomic.root(t, 3) + 1  # noqa: E731
    f2 = lambda t1, t2: Fraction((t1 + t2) % 2)  # noqa: E731
    report = check_product_property(f1, 1, f2, 2, AverageConfig(horizon=64))
    assert report.ok


def test_permutation_invariance(free):
    e0, e1 = free.observable("e0"), free.observable("e1")
    w = word((e0, 1), (e1, 2), (e1, 3), (e0, 1))
    report = check_permutation_invariance(free, w, [{1: 2, 2: 1}, {1: 3, 3: 1}, {2: 3, 3: 2}])
    assert report.ok


def test_direction_mismatch_breaks_compatibility():
    demo = compatibility_failure_demo()
    assert demo["avg_of_f_in_t1"] == 1 and demo["avg_of_f_in_t2"] == 0
    assert not demo["compatible"]


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 12), st.integers(0, 11), st.integers(0, 5))
def test_periodic_average_is_period_mean(P, k, transient):
    values = [Fraction((j * k) % P) for j in range(P)]
    res = cesaro_average(lambda t: Fraction(7) if t < transient else values[t % P])
    assert res.value == sum(values, Fraction(0)) / P


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 5))
def test_root_average_is_delta(n, k):
    res = cesaro_average(lambda t: Cyclotomic.root(k * t, n))
    assert res.value == (1 if k % n == 0 else 0)

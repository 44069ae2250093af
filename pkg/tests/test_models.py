import cmath
import itertools
import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asymfluct.models import (
    BernoulliModel,
    CarModel,
    CatMapModel,
    FreeShiftModel,
    SingletonFactorizationModel,
    build_model,
    cancel,
    clock_shift_trace,
    free_product_state,
    jordan_wigner_expectation,
    resolve_model,
    singleton_evaluate,
    removal_order_evaluate,
    wick,
)
from asymfluct.models.car import wick_by_crossings
from asymfluct.scalars import Cyclotomic, format_scalar, parse_scalar, to_complex
from asymfluct.words import Word, reduce, word


# -- scalars -------------------------------------------------------------------------


def test_cyclotomic_roots_multiply_exactly():
    z = Cyclotomic.root(1, 6)
    acc = Cyclotomic.rational(1)
    for _ in range(6):
        acc = acc * z
    assert acc == 1
    assert z * z.conjugate() == 1


def test_cyclotomic_sum_of_roots_vanishes():
    total = sum((Cyclotomic.root(k, 5) for k in range(5)), Cyclotomic.rational(0))
    assert total == 0


def test_cyclotomic_inverse_is_exact():
    x = Cyclotomic.root(1, 5) + 2
    assert x * x.inverse() == 1
    assert abs(complex(Fraction(1) / x) - 1 / complex(x)) < 1e-14
    with pytest.raises(ZeroDivisionError):
        Cyclotomic.rational(0, 5).inverse()


def test_cyclotomic_complex_value():
    z = Cyclotomic.root(1, 3)
    assert abs(complex(z) - cmath.exp(2j * math.pi / 3)) < 1e-15
    assert (z + z.conjugate()) == Fraction(-1)


def test_parse_format_scalar():
    assert parse_scalar("3/4") == Fraction(3, 4)
    assert parse_scalar("0.5+1j") == 0.5 + 1j
    assert format_scalar(Fraction(-1, 2)) == "-1/2"


# -- free shift ----------------------------------------------------------------------


def test_cancel_reduces_free_group_words():
    assert cancel((0, 0, 1)) == (1,)
    assert cancel((0, 1, 1, 0)) == ()


def test_free_shift_state_and_dynamics(free):
    e0 = free.observable("e0")
    assert free.state(e0) == 0
    assert free.state(e0 * e0) == 1
    assert free.evolve(e0, 3) == free.generator(3)
    assert free.correlate([(e0, 0), (e0, 5), (e0, 5), (e0, 0)]) == 1
    assert free.correlate([(e0, 0), (e0, 5), (e0, 0), (e0, 5)]) == 0


def test_free_product_state_alternating_centred_word(free):
    e0 = free.observable("e0")
    assert free_product_state(word((e0, 1), (e0, 2), (e0, 1), (e0, 2))) == 0
    assert free_product_state(word((e0, 1), (e0, 2), (e0, 2), (e0, 1))) == 1


# -- cat map -------------------------------------------------------------------------


def test_catmap_rejects_bad_matrices():
    with pytest.raises(ValueError):
        CatMapModel(T=((1, 1), (0, 1)))
    with pytest.raises(ValueError):
        CatMapModel(T=((2, 1), (1, 2)))


def test_catmap_weyl_relation(cat):
    p, q = cat.weyl((1, 0)), cat.weyl((0, 1))
    # W(p) W(q) = omega W(q) W(p) with omega = e^{2 pi i theta sigma(p, q)}
    lhs, rhs = p * q, q * p
    ratio = lhs.single_term()[0] / rhs.single_term()[0]
    assert abs(complex(ratio) - cmath.exp(2j * math.pi / 3)) < 1e-15


def test_catmap_state_is_invariant(cat):
    for t in range(-3, 4):
        for p in [(1, 0), (0, 1), (2, -1)]:
            x = cat.weyl(p) * cat.weyl((-p[0], -p[1]))
            assert cat.state(cat.evolve(x, t)) == cat.state(x) == 1


def test_catmap_period(cat):
    P = cat.period_mod(3)
    assert cat._power(P) != ((1, 0), (0, 1))
    assert all(v % 3 == int(i == j) for i, row in enumerate(cat._power(P)) for j, v in enumerate(row))


@pytest.mark.parametrize("labels", [[(1, 0), (0, 1), (-1, 0), (0, -1)], [(2, 1), (-1, 1), (-1, -2)], [(1, 1), (1, 1)]])
def test_clock_shift_oracle(cat, labels):
    exact = cat.correlate_labels([(p, 0) for p in labels])
    assert abs(clock_shift_trace(cat.theta, labels) - to_complex(exact)) < 1e-12


# -- Bernoulli -------------------------------------------------------------------------


def test_bernoulli_centred_coin(coin):
    X = coin.observable("X")
    assert coin.state(X) == 0
    assert coin.state(X * X) == Fraction(1, 4)
    assert coin.expectation_by_enumeration(X * X * X * X) == Fraction(1, 16)


def test_bernoulli_factorizes_over_sites(coin):
    X = coin.observable("X")
    assert coin.correlate([(X, 0), (X, 1), (X, 0), (X, 1)]) == Fraction(1, 16)
    assert coin.correlate([(X, 0), (X, 1)]) == 0


def test_bernoulli_cylinder_matches_enumeration():
    m = BernoulliModel([Fraction(1, 3), Fraction(2, 3)])
    f = m.cylinder([0, 2], {(0, 1): 3, (1, 1): Fraction(-1, 2)})
    assert m.state(f) == m.expectation_by_enumeration(f) == 3 * Fraction(2, 9) - Fraction(1, 2) * Fraction(4, 9)


def test_bernoulli_rejects_bad_probabilities():
    with pytest.raises(ValueError):
        BernoulliModel([Fraction(1, 2), Fraction(1, 3)])


# -- singleton ---------------------------------------------------------------------------


def test_singleton_parse_and_moments(singleton):
    x = singleton.observable("X*Y^2")
    assert singleton.format_element(x) == "X*Y^2"
    assert singleton.state(singleton.observable("X^2")) == Fraction(1, 3)


def test_singleton_weak_clustering_witness_value(singleton):
    X, Y = singleton.observable("X"), singleton.observable("Y")
    # phi_inf(X_1 Y_2 X_1) = phi(X)^2 phi(Y) while weak clustering wants phi(X^2) phi(Y)
    value = singleton.phi_infinity(word((X, 1), (Y, 2), (X, 1)))
    assert value == singleton.state(X) ** 2 * singleton.state(Y) == Fraction(1, 16)
    assert value != singleton.state(X * X) * singleton.state(Y)


def test_singleton_removal_order_independent(singleton):
    X, Y = singleton.observable("X"), singleton.observable("Y")
    Xc, Yc = X - singleton.state(X), Y - singleton.state(Y)
    w = reduce(word((Xc, 1), (Yc, 2), (Xc, 3), (Yc, 1)))
    values = {removal_order_evaluate(w, order) for order in itertools.permutations(range(len(w)))}
    assert len(values) == 1


# -- CAR -----------------------------------------------------------------------------------

SYMBOLS = [None, {0: 0.3, 1: 0.1 + 0.05j, -1: 0.1 - 0.05j}]


def test_car_rejects_non_hermitian_or_nonfinite_symbol():
    with pytest.raises(ValueError):
        CarModel({0: 0.5, 1: 0.2})
    with pytest.raises(ValueError):
        CarModel({0: float("nan")})
    with pytest.raises(ValueError):
        CarModel().creation({0: float("inf")})


@pytest.mark.parametrize("symbol", SYMBOLS)
def test_car_wick_matches_crossing_sum_and_matrices(symbol):
    m = CarModel(symbol)
    fields = [(c, x) for c in (True, False) for x in range(3)]
    for n in (2, 4):
        for mono in itertools.product(fields, repeat=n):
            w = wick(mono, m.two_point)
            assert abs(complex(w) - complex(wick_by_crossings(mono, m.two_point))) < 1e-12
            assert abs(complex(w) - jordan_wigner_expectation(m, mono, sites=[0, 1, 2])) < 1e-10


def test_car_anticommutation(car):
    a0, ad0 = car.observable("a0"), car.observable("ad0")
    anti = a0 * ad0 + ad0 * a0
    assert abs(complex(car.state(anti)) - 1) < 1e-15
    assert complex(car.state(a0 * a0)) == 0


# -- config loading --------------------------------------------------------------------------


def test_build_model_from_config(tmp_path):
    cfg = {
        "kind": "bernoulli",
        "params": {"probabilities": ["1/4", "3/4"]},
        "observables": {"Z": "X"},
    }
    m = build_model(cfg)
    assert m.probabilities == (Fraction(1, 4), Fraction(3, 4))
    assert m.state(m.observable("Z")) == 0
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"kind": "freeshift", "observables": {"u": [["2", "e0"], ["1/2", "e1"]]}}))
    fm = resolve_model(str(path))
    assert fm.observable("u") == 2 * fm.observable("e0") + Fraction(1, 2) * fm.observable("e1")


def test_yaml_config(tmp_path):
    path = tmp_path / "m.yaml"
    path.write_text("kind: catmap\nparams:\n  theta: 1/5\n")
    m = resolve_model(str(path))
    assert m.theta == Fraction(1, 5)


def test_unknown_kind():
    with pytest.raises(ValueError):
        build_model({"kind": "nope"})


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(["e0", "e1", "e0e1", "1"]), min_size=1, max_size=5), st.integers(-4, 4))
def test_free_shift_state_is_time_invariant(names, t):
    m = FreeShiftModel()
    xs = [m.observable(n) for n in names]
    prod = xs[0]
    for x in xs[1:]:
        prod = prod * x
    assert m.state(m.evolve(prod, t)) == m.state(prod)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(-2, 2), st.integers(-2, 2)), min_size=1, max_size=4))
def test_catmap_adjoint_gives_positive_state(labels):
    m = CatMapModel()
    x = m.zero()
    for p in labels:
        x = x + m.weyl(p)
    v = m.state(m.adjoint(x) * x)
    assert to_complex(v).real >= 0 and abs(to_complex(v).imag) < 1e-12

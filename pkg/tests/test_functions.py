import math

import numpy as np
import pytest

from orlicz_interp.functions import (
    OrliczFunction,
    conjugate,
    delta2_probe,
    legendre_transform,
    make_function,
    phi0,
    phi1,
    phi2,
    power,
    power_log,
    psi1,
    psi2,
    tabulated,
    validate,
)


def registry_functions():
    return [power(1.0), power(1.5), power(2.0), power(4.0),
            phi1(), phi2(), psi1(), psi2()]


# -- evaluate -----------------------------------------------------------------


def test_power_evaluate():
    assert power(2).evaluate(3.0) == 9.0


@pytest.mark.parametrize("phi", registry_functions(), ids=lambda f: f.label)
def test_zero_at_zero(phi):
    assert phi.evaluate(0.0) == 0.0


def test_phi1_evaluate_matches_direct_arithmetic():
    # independent evaluation of 5^-2 t^2 |log t|^4 at t = 1e-3
    expected = 0.04 * 1e-6 * math.log(1e3) ** 4
    assert phi1().evaluate(1e-3) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(9.107680037941787e-05, rel=1e-12)


def test_evaluate_rejects_bad_arguments():
    with pytest.raises(ValueError):
        power(2).evaluate(-1.0)
    with pytest.raises(ValueError):
        power(2).evaluate(float("nan"))
    with pytest.raises(ValueError):
        power(2).evaluate(float("inf"))


def test_extension_is_continuous_and_affine():
    f = phi1()
    v0 = f.evaluate(f.t0)
    assert f.evaluate(f.t0 * (1 + 1e-12)) == pytest.approx(v0, rel=1e-9)
    t = 3.7
    assert f.evaluate(t) == pytest.approx(
        v0 + f.extension_slope * (t - f.t0), rel=1e-14)


def test_evaluate_many_matches_scalar():
    for f in [power(2), phi1(), phi2(), psi2()]:
        ts = np.concatenate([[0.0], np.exp(np.linspace(-40, 1.2, 30))])
        vec = f.evaluate_many(ts)
        scal = np.array([f.evaluate(float(t)) for t in ts])
        assert np.allclose(vec, scal, rtol=1e-12, atol=0.0)


# -- inverse ------------------------------------------------------------------


def test_power_inverse():
    assert power(2).inverse(9.0) == pytest.approx(3.0, rel=1e-12)


@pytest.mark.parametrize("phi", registry_functions(), ids=lambda f: f.label)
def test_inverse_at_zero(phi):
    assert phi.inverse(0.0) == 0.0


def test_phi1_inverse_round_trip():
    f = phi1()
    t = f.inverse(1e-8)
    assert f.evaluate(t) == pytest.approx(1e-8, rel=1e-10)


@pytest.mark.parametrize("phi", registry_functions(), ids=lambda f: f.label)
def test_round_trip_on_log_grid(phi):
    cap = phi.value_at_t0() if math.isfinite(phi.t0) else 100.0
    for s in np.exp(np.linspace(math.log(1e-60), math.log(0.9 * cap), 25)):
        back = phi.evaluate(phi.inverse(float(s)))
        assert back == pytest.approx(s, rel=1e-9)


def test_inverse_in_extension_region():
    f = phi2()
    s = 5.0  # far beyond the germ cap
    t = f.inverse(s)
    assert t > f.t0
    assert f.evaluate(t) == pytest.approx(s, rel=1e-12)


# -- log_inverse --------------------------------------------------------------


def test_log_inverse_power_halves_logs():
    assert power(2).log_inverse(-10.0) == pytest.approx(-5.0, abs=1e-14)


def test_log_inverse_identity_function():
    f = power(1)
    for x in [-300.0, -12.345, 0.7]:
        assert f.log_inverse(x) == pytest.approx(x, abs=1e-12)


@pytest.mark.parametrize("phi", [phi1(), phi2(), psi1(), psi2()],
                         ids=lambda f: f.label)
def test_log_inverse_agrees_with_inverse(phi):
    for s in [1e-8, 1e-3 * phi.value_at_t0()]:
        a = phi.log_inverse(math.log(s))
        b = math.log(phi.inverse(s))
        assert a == pytest.approx(b, abs=1e-9)


def test_log_inverse_resolves_tiny_arguments():
    f = phi1()
    lt = f.log_inverse(math.log(1e-120))
    assert math.isfinite(lt)
    assert f.log_evaluate(lt) == pytest.approx(math.log(1e-120), abs=1e-10)


# -- conjugate ----------------------------------------------------------------


def _scaled_power(p):
    return OrliczFunction(
        label=f"t^p/p[{p}]", kind="custom", params={"p": p}, t0=math.inf,
        germ=lambda t: t ** p / p,
        log_germ=lambda lt: p * lt - math.log(p),
        extension_slope=math.inf)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_conjugate_of_holder_pair(p):
    q = p / (p - 1.0)
    conj = conjugate(_scaled_power(p))
    for y in [1e-4, 0.03, 0.8]:
        assert conj.evaluate(y) == pytest.approx(y ** q / q, rel=1e-8)


def test_conjugate_at_zero():
    assert conjugate(phi1()).evaluate(0.0) == 0.0


@pytest.mark.parametrize("phi", [power(3), phi1(), phi2()],
                         ids=lambda f: f.label)
def test_conjugate_validates_as_convex(phi):
    report = validate(conjugate(phi), grid_size=32)
    assert report.passed, report.violations()


@pytest.mark.parametrize("phi", [power(1.5), power(3), phi1(), phi2()],
                         ids=lambda f: f.label)
def test_youngs_inequality(phi):
    conj = conjugate(phi)
    rng = np.random.default_rng(3)
    t_hi = phi.t0 if math.isfinite(phi.t0) else 10.0
    s_hi = 0.9 * phi.extension_slope if math.isfinite(phi.extension_slope) \
        else 10.0
    for _ in range(50):
        t = math.exp(rng.uniform(math.log(1e-9), math.log(t_hi)))
        s = math.exp(rng.uniform(math.log(1e-9), math.log(s_hi)))
        assert t * s <= phi.evaluate(t) + conj.evaluate(s) + 1e-12


def test_power_two_attains_product_bound_exactly():
    # t^2 pairs with y^2/4: the inverse product equals 2t identically, so
    # the strict upper sandwich degenerates to equality at p = 2
    f = power(2)
    conj = conjugate(f)
    for t in [1e-8, 1e-3, 0.4]:
        prod = f.inverse(t) * conj.inverse(t)
        assert prod == pytest.approx(2.0 * t, rel=1e-9)


def test_conjugate_of_capped_concave_germ_vanishes_below_slope():
    # psi1's germ slope decreases to its tangent slope; for y below that
    # slope the inner sup is attained in the limit x -> 0
    f = psi1()
    conj = conjugate(f)
    assert conj.evaluate(0.5 * f.extension_slope) == 0.0


def test_legendre_transform_matches_dense_scan():
    # brute-force oracle: dense maximization over a fixed grid
    for s in [0.01, 0.05, 0.1]:
        val, arg = legendre_transform(
            lambda t: t * math.log(t) ** 2, s, 8.0)
        xs = np.linspace(1e-6, 8.0, 400001)
        brute = float(np.max(xs * s - xs * np.log(xs) ** 2))
        assert val == pytest.approx(brute, rel=1e-6)
        assert 1.0 < arg < 1.1


# -- validate -----------------------------------------------------------------


def test_validate_power():
    assert validate(power(2)).passed


def test_validate_phi1_at_default_threshold():
    assert validate(phi1()).passed


def test_validate_power_log_fails_beyond_convexity_window():
    # the same germ as phi1 stops being midpoint convex above exp(-(3+sqrt 3))
    loose = power_log(2.0, 4.0, 0.04, t0=math.exp(-4.0))
    report = validate(loose)
    assert not report.passed
    assert report.worst_convexity > 1e-9


def test_validate_rejects_decreasing_germ():
    bad = OrliczFunction(
        label="t2-t", kind="custom", params={}, t0=1.0,
        germ=lambda t: t * t - t,
        log_germ=lambda lt: math.nan,
        extension_slope=1.0)
    report = validate(bad)
    assert not report.passed
    assert report.worst_positivity <= 0.0


def test_validate_reports_concavity_of_psi_germs():
    assert not validate(psi1()).passed
    assert not validate(psi2()).passed


def test_validate_rejects_tiny_grid():
    with pytest.raises(ValueError):
        validate(power(2), grid_size=8)


# -- delta2 -------------------------------------------------------------------


def test_delta2_power_two():
    report = delta2_probe(power(2))
    ratios = [r for _, r in report.grid]
    assert report.sup_ratio == pytest.approx(4.0, rel=1e-12)
    assert min(ratios) == pytest.approx(4.0, rel=1e-12)


def test_delta2_power_one():
    assert delta2_probe(power(1)).sup_ratio == pytest.approx(2.0, rel=1e-12)


def test_delta2_phi1_bounded_by_five():
    report = delta2_probe(phi1())
    assert report.sup_ratio <= 5.0
    # ratio 4 (|log 2t| / |log t|)^4 approaches 4 from below
    assert report.sup_ratio == pytest.approx(4.0, abs=0.2)


@pytest.mark.parametrize("phi", [power(1), power(2), phi1(), phi2()],
                         ids=lambda f: f.label)
def test_delta2_at_least_two_for_convex(phi):
    assert delta2_probe(phi).sup_ratio >= 2.0 - 1e-12


# -- registry -----------------------------------------------------------------


def test_make_function_kinds():
    assert make_function({"kind": "power", "p": 2.0}).evaluate(3.0) == 9.0
    f = make_function({"kind": "power-log", "p": 2, "q": 4, "scale": 0.04})
    assert f.kind == "power-log"
    for name in ["phi0", "phi1", "phi2", "psi1", "psi2"]:
        assert make_function({"kind": name}).label == name


def test_make_function_rejects_unknown_kind():
    with pytest.raises(ValueError):
        make_function({"kind": "mystery"})
    with pytest.raises(ValueError):
        make_function({})


def test_tabulated_round_trip():
    base = phi1()
    ts = np.exp(np.linspace(math.log(1e-10), math.log(base.t0), 200))
    tab = tabulated([[t, base.evaluate(float(t))] for t in ts])
    for t in [1e-8, 1e-5, 1e-3]:
        assert tab.evaluate(t) == pytest.approx(base.evaluate(t), rel=1e-6)


def test_tabulated_rejects_non_monotone():
    with pytest.raises(ValueError):
        tabulated([[0.1, 1.0], [0.2, 0.5]])


def test_power_rejects_sublinear():
    with pytest.raises(ValueError):
        power(0.5)

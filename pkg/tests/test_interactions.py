import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from zetaladder.errors import CoefficientBlowUp, SharedBetaError, WindowError
from zetaladder.interactions import (IDENTITIES, IdentityReport, _check_shared, evaluate,
                                     pairwise_interaction, power_bound, power_ratio,
                                     second_level, second_level_pair, trig_identity,
                                     triple_denominator, triple_interaction, zt_power_signal)

L, U, MU = 700, 0.5, 0.3


@pytest.fixture(scope="module")
def trig(fz):
    return trig_identity(fz, L, U, MU, 1, 1)


def test_trig_minimal_case(trig):
    assert trig.corrected_residual <= 1e-4
    assert trig.extras["P1"] > 0 and trig.extras["P2"] > 0
    assert math.isfinite(trig.lhs) and trig.rhs == 1.0


def test_pair_cos_is_trig_rearranged(fz, trig):
    rep = pairwise_interaction(fz, L, U, MU, 1, 1, "cos")
    c2 = trig.extras["cos2_a2"]
    assert rep.raw_residual == pytest.approx(trig.raw_residual / c2, abs=1e-10)
    assert rep.corrected_residual <= 1e-4


def test_pair_sin_mirror(fz, trig):
    rep = pairwise_interaction(fz, L, U, MU, 1, 1, "sin")
    s1 = trig.extras["sin2_a1"]
    assert rep.raw_residual == pytest.approx(trig.raw_residual / s1, abs=1e-10)
    cos = pairwise_interaction(fz, L, U, MU, 1, 1, "cos")
    assert rep.raw_residual * s1 == pytest.approx(cos.raw_residual * trig.extras["cos2_a2"], abs=1e-10)
    with pytest.raises(ValueError):
        pairwise_interaction(fz, L, U, MU, 1, 1, "tan")


def test_triple(fz):
    rep = triple_interaction(fz, L, U, MU, 1, 1, 1)
    assert rep.corrected_residual <= 1e-4
    assert rep.extras["closure"] <= 1e-10
    for form in ("triple_cos", "triple_sin"):
        other = triple_interaction(fz, L, U, MU, 1, 1, 1, form=form)
        assert other.raw_residual == rep.extras[f"raw_{form}"]
        assert other.corrected_residual <= 1e-4


def test_triple_window_boundary(fz):
    mu = 0.3
    with pytest.raises(WindowError):
        triple_interaction(fz, L, math.pi / 2 - 2 * mu, mu)
    with pytest.raises(ValueError):
        triple_interaction(fz, L, U, MU, form="quad")


def test_triple_coefficient_blow_up():
    assert triple_denominator(U, MU, 0.05) == pytest.approx(
        math.cos(1.1) * math.cos(0.8) * math.cos(0.3), rel=1e-15)
    with pytest.raises(CoefficientBlowUp):
        triple_denominator(U, MU, 1.2)
    assert issubclass(CoefficientBlowUp, WindowError)


def test_second_level(fz):
    rep = second_level(fz, 350, U, MU, 1)
    assert abs(rep.extras["beta_cancellation"] - 1.0) <= 1e-10
    assert rep.corrected_residual <= 1e-4
    assert rep.extras["quotient_defect"] <= 1e-12
    # under the sin reading the printed coefficient is the mean-value ratio
    assert rep.extras["printed_coefficient"] == pytest.approx(rep.rhs, rel=1e-12)
    assert rep.extras["f5_variant"] == "sin"


def test_second_level_pair(fz):
    rep = second_level_pair(fz, 350, U, MU, 1, 1)
    assert rep.corrected_residual <= 1e-4 and rep.extras["coefficient"] > 0


def test_shared_beta_guard(fz):
    from zetaladder.functions import F1_SIN2, PI

    a = fz.factorization_check(F1_SIN2, PI * L + MU, U, 1)
    b = fz.factorization_check(F1_SIN2, PI * (L + 1) + MU, U, 1)
    _check_shared((a, a), (1, 1))
    with pytest.raises(SharedBetaError):
        _check_shared((a, b), (1, 1))


def test_corrected_not_above_raw(fz, trig):
    reps = [trig, pairwise_interaction(fz, L, U, MU, 1, 1, "cos"),
            triple_interaction(fz, L, U, MU), second_level(fz, 350, U, MU, 1)]
    for r in reps:
        assert r.corrected_residual <= r.raw_residual + 1e-12


def test_corrected_residual_independent_of_depth(fz):
    for k in (1, 2, 3):
        assert trig_identity(fz, L, U, MU, k, k).corrected_residual <= 1e-9


def test_power_examples():
    assert zt_power_signal(0, 10 ** 6, U).lhs == 1.0
    bound = power_bound(1000, 1e6, U)
    assert bound == pytest.approx(5.0e-4, rel=1e-3)
    for d in (1000, -1000):
        rep = zt_power_signal(d, 1e6, U)
        assert rep.raw_residual <= bound and rep.extras["within_bound"]


def test_power_ratio_against_mpmath():
    with mpmath.workdps(40):
        for d, a in [(1000, 1e6 + 0.2), (-1000, 1e6 + 0.4), (-1, 1e6 + 0.1), (7, 1e6)]:
            Lm, Um, am = mpmath.mpf(10) ** 6, mpmath.mpf(U), mpmath.mpf(a)
            if d == -1:
                H = mpmath.log1p(Um / Lm) / Um
            else:
                H = ((Lm + Um) ** (d + 1) - Lm ** (d + 1)) / ((d + 1) * Um)
            ref = float(H / am ** d)
            assert power_ratio(d, 1e6, U, a) == pytest.approx(ref, rel=1e-12)


def test_power_errors():
    with pytest.raises(WindowError):
        zt_power_signal(1, 1e6, 1.5)
    with pytest.raises(WindowError):
        zt_power_signal(1, 1e6, U, alpha0=2e6)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-5000, max_value=5000), st.floats(min_value=1e4, max_value=1e9),
       st.floats(min_value=1e-3, max_value=0.999), st.floats(min_value=0, max_value=1))
def test_power_ratio_within_bound(delta, Lp, Up, frac):
    r = power_ratio(delta, Lp, Up, Lp + frac * Up)
    assert abs(r - 1.0) <= power_bound(delta, Lp, Up) * (1 + 1e-9) + 1e-15


def test_report_serialization(trig):
    again = IdentityReport.from_json(trig.to_json())
    assert again == trig
    assert "identity = trig" in trig.to_kv()


def test_evaluate_dispatch(fz, trig):
    assert evaluate(fz, "trig", L, U, MU) == trig
    assert evaluate(fz, "power_signal", 1e6, U, delta=2).identity == "power_signal"
    assert set(IDENTITIES) >= {"trig", "second_level", "power_signal"}
    with pytest.raises(KeyError):
        evaluate(fz, "nope", L, U, MU)


def test_power_bound_saturates():
    assert power_bound(1e9, 10.0, 0.5) == math.inf

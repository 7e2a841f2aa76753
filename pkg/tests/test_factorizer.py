import math
import warnings

import numpy as np
import pytest

from zetaladder.errors import DomainError, WindowError
from zetaladder.factorizer import (Factorizer, FactorizationRecord, ZeroProximityWarning,
                                   mean_value_H)
from zetaladder.functions import F1_SIN2, F2_COS2, F3_SEC2, F4_COS, F5_COS, ONE, PI, library
from zetaladder.hl_integral import IntegralCheckpointTable
from zetaladder.ladder import Ladder
from zetaladder.zeta_eval import hardy_Z

T_PI = PI * 700 + 0.3
T_2PI = 2 * PI * 350 + 0.3
U = 0.5


@pytest.fixture(scope="module")
def rec1(fz):
    return fz.factorization_check(F1_SIN2, T_PI, U, 1)


def test_pipeline_residuals(rec1):
    assert rec1.residual_exact <= 1e-4
    assert rec1.residual_zeta_corrected <= 1e-4
    Om = rec1.omega_correction
    assert Om * (1 - 1e-4) <= rec1.raw_ratio <= Om * (1 + 1e-4)


def test_record_inclusions(fz, rec1):
    chain = fz.chain(T_PI, U, 1)
    assert T_PI < rec1.alpha[0] < T_PI + U
    assert 0.3 < rec1.alpha[0] - PI * 700 < 0.3 + U
    for r in range(1, 2):
        lo, hi = chain.segment(r)
        assert lo < rec1.alpha[r] < hi and lo < rec1.beta[r - 1] < hi
    assert min(abs(hardy_Z(x)) for x in rec1.alpha[1:] + rec1.beta) > 0


def test_product_zeta_is_exact_times_omega(fz):
    for fn in library("sin").values():
        T = T_PI if fn.base == PI else T_2PI
        for k in (1, 2):
            r = fz.factorization_check(fn, T, U, k)
            assert r.product_zeta == pytest.approx(r.product_exact * r.omega_correction, rel=1e-8)


def test_beta_shared_across_functions(fz):
    for k in (1, 2):
        b = [np.array(fz.factorization_check(fn, T_PI, U, k).beta) for fn in (F1_SIN2, F2_COS2, F3_SEC2)]
        assert np.allclose(b[0], b[1], rtol=1e-8, atol=0)
        assert np.allclose(b[0], b[2], rtol=1e-8, atol=0)


def test_beta_comes_from_f_equal_one(fz, rec1):
    es = fz.e_set(T_PI, U, 1)
    assert rec1.e == es.representative
    assert rec1.beta == (es.representative,)
    ones = fz.solve_mean_abscissae(ONE, T_PI, U, 1)
    assert ones.roots == es.roots


def test_largest_root_policy(fz):
    r = fz.factorization_check(F1_SIN2, T_PI, U, 2, policy="largest")
    assert r.d == r.d_roots[-1] and r.d_policy == "largest"
    assert r.residual_exact <= 1e-4


def test_root_tolerance_and_mean_value(fz):
    for k in (1, 2):
        ds = fz.solve_mean_abscissae(F2_COS2, T_PI, U, k)
        g = fz.weighted_integrand(F2_COS2, T_PI, U, k)
        lo, hi = ds.segment
        for d in ds.roots:
            assert abs(g(d) - ds.mean) <= 1e-10 * ds.mean
        assert lo < ds.representative < hi
        integral = fz.integrate_weighted(F2_COS2, T_PI, U, k)
        assert g(ds.representative) * (hi - lo) == pytest.approx(integral, rel=1e-8)


def test_scan_counts_every_sign_change(fz):
    # a denser scan does not find more roots
    ds = fz.solve_mean_abscissae(F1_SIN2, T_PI, U, 1)
    dense = Factorizer(fz.ladder)
    dense.cfg = fz.cfg.replace(**{"factor.scan_density": 256, "factor.min_scan_points": 1024})
    assert len(dense.solve_mean_abscissae(F1_SIN2, T_PI, U, 1).roots) == len(ds.roots)


def test_weighted_integrand(fz):
    g0 = fz.weighted_integrand(F1_SIN2, T_PI, U, 0)
    t = np.linspace(T_PI, T_PI + U, 5)
    assert np.array_equal(g0(t), F1_SIN2(t))
    with pytest.raises(DomainError):
        g0(T_PI - 1)
    g1 = fz.weighted_integrand(ONE, T_PI, U, 1)
    lo, hi = fz.chain(T_PI, U, 1).segment(1)
    x = 0.5 * (lo + hi)
    assert g1(x) == pytest.approx(fz.ladder.z_tilde_sq(x), rel=1e-10)
    assert g1(np.array([lo, hi])).shape == (2,)
    with pytest.raises(DomainError):
        g1(hi + 1.0)


@pytest.mark.parametrize("fn", [ONE, F1_SIN2, F3_SEC2, F4_COS], ids=lambda f: f.id)
@pytest.mark.parametrize("k", [1, 2, 3])
def test_change_of_variables(fz, fn, k):
    T = T_2PI if fn.base == 2 * PI else T_PI
    exact = fn.increment(T, U)
    assert abs(fz.integrate_weighted(fn, T, U, k) - exact) <= 1e-4 * exact


def test_alpha_gaps_at_5000(fz, cfg):
    L = round((5000 - 0.3) / PI)
    T = PI * L + 0.3
    r = fz.factorization_check(F1_SIN2, T, U, 3)
    c = cfg.constants.c
    for j in range(3):
        gap = r.alpha[j + 1] - r.alpha[j]
        assert gap == pytest.approx((1 - c) * T / math.log(T), rel=0.35)
        assert gap > 0.4 * T / math.log(T)


def test_f5_cos_variant(fz):
    r = fz.factorization_check(F5_COS, T_2PI, U, 1)
    assert r.f_id == "f5_cos" and r.residual_exact <= 1e-4
    assert r.f_alpha0 == pytest.approx(math.cos(r.alpha[0]), rel=1e-15)


def test_depth_and_window_errors(fz):
    with pytest.raises(WindowError):
        fz.solve_mean_abscissae(F1_SIN2, T_PI, U, 0)
    with pytest.raises(WindowError):
        fz.factorization_check(F3_SEC2, PI * 700 + 0.6, U, 1)
    with pytest.raises(WindowError):
        mean_value_H(F1_SIN2, PI * 700 + 0.001, U)


def test_serialization_round_trip(rec1):
    assert FactorizationRecord.from_kv(rec1.to_kv()) == rec1
    import json

    assert FactorizationRecord.from_dict(json.loads(rec1.to_json())) == rec1
    assert "residual_zeta_corrected = " in rec1.to_kv()
    assert rec1.id.startswith("f1_sin2@T=")
    assert rec1.target == rec1.H / rec1.f_alpha0


def test_zero_proximity_warning(table, cfg):
    loose = cfg.replace(**{"factor.zero_warn": 1e6})
    fz = Factorizer(Ladder(IntegralCheckpointTable(loose, table.path)))
    with pytest.warns(ZeroProximityWarning):
        fz.factorization_check(F1_SIN2, T_PI, U, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        Factorizer(Ladder(table)).factorization_check(F1_SIN2, T_PI, U, 1)

import random

import mpmath
import pytest
from mpmath import mp

from etaforge.cyclotomic import QQ, CyclotomicNumber as C
from etaforge.elliptic import (
    FracVector,
    gamma0_transport_check,
    h_n_series,
    siegel_series,
    translate_factor,
    wp_difference_via_siegel,
    wp_lattice_sum,
    wp_series,
)
from etaforge.errors import CongruentVectors, IntegerVector, NotInGamma0, PoleAtLatticePoint
from etaforge.etaq import eta_quotient_series, eta_series, h_eta_quotient
from etaforge.matrices import Mat2
from etaforge.cm import eval_qseries

HALF0 = (QQ(1, 2), QQ(0))
HALFHALF = (QQ(1, 2), QQ(1, 2))
ZEROHALF = (QQ(0), QQ(1, 2))

# wp_{(1/2,0)}(2i), stabilized between radius 100 and 200 at 100 digits
WP_HALF0_AT_2I = "-3.43759290901018641374504788990527859895042823"


def test_siegel_leading_term():
    g = siegel_series(HALF0, 30)
    assert g.leading_exponent() == QQ(-1, 24)
    assert g.leading_coefficient() == -1


def test_siegel_rejects_integral_vector():
    with pytest.raises(IntegerVector):
        siegel_series((1, 2), 10)


def test_siegel_equals_eta_ratio():
    g = siegel_series(HALF0, 40)
    ratio = -(eta_series(QQ(1, 2), 42) ** 2) * (eta_series(1, 42) ** 2).inverse()
    assert (g - ratio.truncated(40)).is_zero()


def test_siegel_triple_product_constant():
    prod = (
        siegel_series(HALF0, 25) * siegel_series(HALFHALF, 25) * siegel_series(ZEROHALF, 25)
    )
    assert prod.coefficient(0) == 2 * C.zeta(8)
    assert all(e == 0 for e, _ in prod.terms())


def test_siegel_odd_in_v():
    for v in (HALF0, (QQ(1, 3), QQ(1, 4))):
        a = siegel_series((-v[0], -v[1]), 8)
        b = siegel_series(v, 8)
        assert (a + b).is_zero()


def test_translate_factor_values():
    assert translate_factor(HALFHALF, (0, 0)) == 1
    assert translate_factor(HALFHALF, (1, 0)) == C.zeta(4)


def test_translate_factor_matches_series():
    rng = random.Random(31)
    done = 0
    while done < 20:
        v = (QQ(rng.randrange(0, 12), 12), QQ(rng.randrange(0, 12), 12))
        if v[0].denominator == 1 and v[1].denominator == 1:
            continue
        s = (rng.randrange(-5, 6), rng.randrange(-5, 6))
        lhs = siegel_series((v[0] + s[0], v[1] + s[1]), 6)
        rhs = siegel_series(v, 6).scaled(translate_factor(v, s))
        assert (lhs - rhs).is_zero(), (v, s)
        done += 1


def test_wp_series_even_and_periodic():
    w = wp_series(HALFHALF, 12)
    assert w == wp_series((QQ(-1, 2), QQ(-1, 2)), 12)
    assert w == wp_series((QQ(3, 2), QQ(5, 2)), 12)
    w2 = wp_series((QQ(1, 3), QQ(1, 4)), 9)
    assert w2 == wp_series((QQ(-1, 3), QQ(-1, 4)), 9)
    assert w2 == wp_series((QQ(4, 3), QQ(-3, 4)), 9)


def test_wp_series_rejects_integral():
    with pytest.raises(IntegerVector):
        wp_series((2, -1), 5)


def test_wp_series_vs_lattice_sum_oracle():
    tau = mpmath.mpc(0, 2)
    with mp.workdps(140):
        analytic = wp_lattice_sum(HALF0, tau, radius=80, digits=100).to_mpc()
        series_val = eval_qseries(wp_series(HALF0, 14), tau, 100).to_mpc()
        bridge = (2j * mp.pi) ** 2  # the recorded series <-> analytic constant
        assert abs(analytic - bridge * series_val) / abs(analytic) < mp.mpf("1e-20")


def test_wp_lattice_sum_regression_fixture():
    tau = mpmath.mpc(0, 2)
    with mp.workdps(80):
        v100 = wp_lattice_sum(HALF0, tau, radius=100, digits=60).to_mpc()
        v200 = wp_lattice_sum(HALF0, tau, radius=200, digits=60).to_mpc()
        assert abs(v100 - v200) < mp.mpf("1e-25")
        assert abs(v200 - mp.mpf(WP_HALF0_AT_2I)) < mp.mpf("1e-44")
        assert abs(v200.imag) < mp.mpf("1e-50")


def test_wp_lattice_sum_evenness_and_pole():
    tau = mpmath.mpc("0.3", "1.1")
    with mp.workdps(80):
        a = wp_lattice_sum((QQ(1, 3), QQ(1, 5)), tau, radius=60, digits=60).to_mpc()
        b = wp_lattice_sum((QQ(-1, 3), QQ(-1, 5)), tau, radius=60, digits=60).to_mpc()
        assert abs(a - b) < mp.mpf("1e-50")
    with pytest.raises(PoleAtLatticePoint):
        wp_lattice_sum((1, 0), tau, radius=10, digits=60)


def test_wp_transformation_formula():
    # wp_v(alpha tau) (c tau + d)^{-2} = wp_{alpha^T v}(tau)
    tau = mpmath.mpc(0, 2)
    v = FracVector(QQ(1, 2), QQ(0))
    with mp.workdps(120):
        for alpha in (Mat2(1, 1, 0, 1), Mat2(0, -1, 1, 0)):
            at = (alpha.a * tau + alpha.b) / (alpha.c * tau + alpha.d)
            lhs = wp_lattice_sum(v, at, radius=120, digits=100).to_mpc()
            lhs /= (alpha.c * tau + alpha.d) ** 2
            vt = (alpha.a * v.v1 + alpha.c * v.v2, alpha.b * v.v1 + alpha.d * v.v2)
            rhs = wp_lattice_sum(vt, tau, radius=120, digits=100).to_mpc()
            assert abs(lhs - rhs) / abs(rhs) < mp.mpf("1e-20")


def test_wp_difference_antisymmetric():
    a = wp_difference_via_siegel(HALFHALF, ZEROHALF, 10)
    b = wp_difference_via_siegel(ZEROHALF, HALFHALF, 10)
    assert (a + b).is_zero()


def test_wp_difference_rejects_congruent():
    with pytest.raises(CongruentVectors):
        wp_difference_via_siegel(HALFHALF, (QQ(3, 2), QQ(-1, 2)), 8)
    with pytest.raises(CongruentVectors):
        wp_difference_via_siegel(HALFHALF, (QQ(-1, 2), QQ(1, 2)), 8)
    with pytest.raises(IntegerVector):
        wp_difference_via_siegel((1, 0), HALFHALF, 8)


def test_wp_difference_equals_wp_series_difference():
    # the bridge constant between the two exact routes is 1, globally
    pairs = [
        (HALFHALF, ZEROHALF),
        (HALF0, ZEROHALF),
        ((QQ(1, 3), QQ(0)), (QQ(0), QQ(1, 3))),
        ((QQ(1, 4), QQ(1, 2)), (QQ(1, 2), QQ(1, 4))),
        ((QQ(1, 6), QQ(1, 6)), (QQ(1, 2), QQ(1, 3))),
        ((QQ(5, 6), QQ(0)), (QQ(1, 6), QQ(1, 2))),
        ((QQ(1, 12), QQ(0)), (QQ(5, 12), QQ(0))),
        ((QQ(1, 4), QQ(1, 4)), (QQ(3, 4), QQ(1, 2))),
        ((QQ(1, 3), QQ(2, 3)), (QQ(1, 3), QQ(1, 3))),
        ((QQ(0), QQ(1, 4)), (QQ(0), QQ(1, 3))),
        ((QQ(1, 2), QQ(1, 6)), (QQ(1, 6), QQ(0))),
    ]
    for u, v in pairs:
        lhs = wp_series(u, 6) - wp_series(v, 6)
        rhs = wp_difference_via_siegel(u, v, 6)
        assert (lhs - rhs).is_zero(), (u, v)


def test_h_n_routes_agree():
    for n in (3, 4, 5):
        eta_route = h_n_series(n, 40, "eta")
        def_route = h_n_series(n, 40, "definition")
        assert (eta_route - def_route).is_zero()
        assert def_route.coefficient(0) == 1
        assert def_route.support_is_integral()
        for _, c in def_route.terms():
            assert c.is_rational() and c.rational_value().denominator == 1


def test_h3_is_the_level8_quotient():
    direct = eta_quotient_series(h_eta_quotient(3), 25)
    assert (h_n_series(3, 25, "eta") - direct).is_zero()


def test_h_n_ratio_reproduces_wp_difference_scales():
    base = wp_difference_via_siegel(HALFHALF, ZEROHALF, 10)
    num = base.rescale(4)
    den = base.rescale(2)
    ratio = (num * den.inverse()).truncated(16)
    assert (ratio - h_n_series(3, 16, "eta")).is_zero()


def test_gamma0_transport():
    tau = mpmath.mpc(0, 2)
    assert gamma0_transport_check(3, Mat2.identity(), HALFHALF, tau, radius=80)
    assert gamma0_transport_check(3, Mat2(1, 0, 4, 1), HALFHALF, tau, radius=80)
    assert gamma0_transport_check(3, Mat2(1, 0, 8, 1), HALFHALF, tau, radius=80)
    assert gamma0_transport_check(2, Mat2(3, 1, 2, 1), HALF0, tau, radius=80)
    with pytest.raises(NotInGamma0):
        gamma0_transport_check(3, Mat2(1, 0, 2, 1), HALF0, tau)
    with pytest.raises(NotInGamma0):
        gamma0_transport_check(3, Mat2(2, 0, 4, 1), HALF0, tau)


def test_h_conjugate_negates_at_points():
    # h_n((tau)/(2^{n-1} tau + 1)) = -h_n(tau) numerically
    from etaforge.cm import eval_eta_quotient

    rng = random.Random(37)
    for n in (3, 4, 5, 6):
        quot = h_eta_quotient(n)
        half = 1 << (n - 1)
        for _ in range(10):
            tau = mpmath.mpc(rng.uniform(-0.8, 0.8), rng.uniform(0.7, 1.6))
            with mp.workdps(90):
                moved = tau / (half * tau + 1)
                a = eval_eta_quotient(quot, moved, 70).to_mpc()
                b = eval_eta_quotient(quot, tau, 70).to_mpc()
                assert abs(a + b) < mp.mpf("1e-20"), (n, tau)

import json
import random

import mpmath
import pytest
from mpmath import mp

from etaforge.bigcomplex import BigComplex
from etaforge.cm import (
    ImagQuadOrder,
    class_invariant,
    eval_eta,
    eval_eta_quotient,
    eval_qseries,
    integrality_check,
    tau_point,
)
from etaforge.errors import (
    ConductorNotDivisibleBy4,
    NonPositiveImaginaryPart,
    NotFundamental,
)
from etaforge.etaq import EtaQuotient, eta_quotient_series, h_eta_quotient


def test_order_datum():
    o = ImagQuadOrder(-7, 12)
    assert (o.B, o.C) == (1, 2)
    assert ImagQuadOrder(-4, 4).B == 0 and ImagQuadOrder(-4, 4).C == 1
    assert ImagQuadOrder(-8, 8).C == 2
    with pytest.raises(NotFundamental):
        ImagQuadOrder(-12, 4)
    with pytest.raises(NotFundamental):
        ImagQuadOrder(-9, 4)
    with pytest.raises(NotFundamental):
        ImagQuadOrder(5, 4)


def test_tau_point_values():
    with mp.workdps(80):
        t4 = tau_point(ImagQuadOrder(-4, 4), 60).to_mpc()
        assert abs(t4 - mp.mpc(0, 1)) < mp.mpf("1e-55")
        t7 = tau_point(ImagQuadOrder(-7, 12), 60).to_mpc()
        assert abs(t7 - mp.mpc(-0.5, 0) - mp.mpc(0, 1) * mp.sqrt(7) / 2) < mp.mpf("1e-55")
        t8 = tau_point(ImagQuadOrder(-8, 4), 60).to_mpc()
        assert abs(t8 - mp.mpc(0, 1) * mp.sqrt(2)) < mp.mpf("1e-55")


def test_eval_eta_gamma_quarter_closed_form():
    with mp.workdps(140):
        v = eval_eta(mpmath.mpc(0, 1), 120).to_mpc()
        expect = mp.gamma(mp.mpf(1) / 4) / (2 * mp.pi ** (mp.mpf(3) / 4))
        assert abs(v - expect) < mp.mpf("1e-115")


def test_eval_eta_translation_phase():
    rng = random.Random(5)
    with mp.workdps(90):
        for _ in range(5):
            tau = mpmath.mpc(rng.uniform(-2, 2), rng.uniform(0.2, 2.5))
            lhs = eval_eta(tau + 1, 70).to_mpc()
            rhs = mp.expjpi(mp.mpf(1) / 12) * eval_eta(tau, 70).to_mpc()
            assert abs(lhs - rhs) < mp.mpf("1e-60")


def test_eval_eta_dual_route_agreement():
    with mp.workdps(90):
        # eta(2i)^8/eta(i/2)^8 both via reduction and directly
        direct = (
            eval_eta(mpmath.mpc(0, 2), 70, reduce=False).to_mpc() ** 8
            / eval_eta(mpmath.mpc(0, 0.5), 70, reduce=False).to_mpc() ** 8
        )
        reduced = (
            eval_eta(mpmath.mpc(0, 2), 70).to_mpc() ** 8
            / eval_eta(mpmath.mpc(0, 0.5), 70).to_mpc() ** 8
        )
        assert abs(direct - reduced) / abs(direct) < mp.mpf("1e-64")


def test_eval_eta_direct_vs_reduced_low_imaginary():
    rng = random.Random(11)
    with mp.workdps(80):
        for _ in range(4):
            tau = mpmath.mpc(rng.uniform(-1, 1), rng.uniform(0.05, 0.2))
            a = eval_eta(tau, 60, reduce=False).to_mpc()
            b = eval_eta(tau, 60, reduce=True).to_mpc()
            assert abs(a - b) / abs(b) < mp.mpf("1e-55")


def test_eval_eta_rejections():
    with pytest.raises(NonPositiveImaginaryPart):
        eval_eta(mpmath.mpc(1, -0.5), 60)
    with pytest.raises(NonPositiveImaginaryPart):
        eval_eta(mpmath.mpc(0.2, 0.0001), 60, reduce=False)


def test_eval_quotient_empty_and_leading_behavior():
    with mp.workdps(70):
        one = eval_eta_quotient(EtaQuotient(4, {}), mpmath.mpc(0.3, 1.2), 60).to_mpc()
        assert one == 1
        tau = mpmath.mpc(0, 6)
        g = eval_eta_quotient(EtaQuotient(4, {1: -8, 4: 8}), tau, 60).to_mpc()
        q = mp.exp(2j * mp.pi * tau)
        assert abs(g - q) / abs(q) < 0.01


def test_series_vs_product_evaluation():
    # agreement to 10^-(digits-5) whenever Im tau >= 1/2
    rng = random.Random(19)
    quots = [
        EtaQuotient(4, {1: -8, 4: 8}),
        h_eta_quotient(3),
        EtaQuotient(4, {1: -8, 2: 24, 4: -16}),
        EtaQuotient(2, {1: 8, 2: 8}),
    ]
    with mp.workdps(80):
        for _ in range(20):
            quot = rng.choice(quots)
            tau = mpmath.mpc(rng.uniform(-0.5, 0.5), rng.uniform(0.5, 2.0))
            series = eta_quotient_series(quot, 60)
            sv = eval_qseries(series, tau, 60).to_mpc()
            pv = eval_eta_quotient(quot, tau, 60).to_mpc()
            assert abs(sv - pv) / abs(pv) < mp.mpf("1e-55")


def test_h3_series_vs_product_at_2i():
    with mp.workdps(90):
        tau = mpmath.mpc(0, 2)
        series = eta_quotient_series(h_eta_quotient(3), 40)
        sv = eval_qseries(series, tau, 70).to_mpc()
        pv = eval_eta_quotient(h_eta_quotient(3), tau, 70).to_mpc()
        assert abs(sv - pv) < mp.mpf("1e-30")


def test_class_invariant_real_and_scaling():
    with mp.workdps(140):
        for d, n in ((-7, 12), (-4, 4), (-8, 8), (-11, 4), (-15, 16)):
            order = ImagQuadOrder(d, n)
            val = class_invariant(order, 120)
            assert val.im == 0
            tau = tau_point(order, 120).to_mpc()
            x = 4 * eval_eta(n * tau, 120).to_mpc() ** 2 / eval_eta(n * tau / 4, 120).to_mpc() ** 2
            assert abs(val.to_mpc() - x ** 4) < mp.mpf("1e-100") * max(1, abs(x) ** 4)


def test_class_invariant_conductor_check():
    with pytest.raises(ConductorNotDivisibleBy4):
        class_invariant(ImagQuadOrder(-7, 6), 60)


def test_class_invariant_precision_stability():
    a = class_invariant(ImagQuadOrder(-7, 12), 150)
    b = class_invariant(ImagQuadOrder(-7, 12), 300)
    with mp.workdps(320):
        assert abs(a.to_mpc() - b.to_mpc()) < mp.mpf("1e-140")


def test_h_values_nonzero_at_cm_points():
    with mp.workdps(80):
        for d in (-7, -8):
            for m in (3, 4):
                order = ImagQuadOrder(d, 1 << m)
                tau = tau_point(order, 60).to_mpc()
                val = eval_eta_quotient(h_eta_quotient(m), tau, 60).to_mpc()
                assert abs(val) > mp.mpf("1e-10")


def test_integrality_m4_d7():
    rep = integrality_check(4, ImagQuadOrder(-7, 4), digits=120)
    assert rep.monic_integral
    assert rep.constant_divides_power
    assert rep.coefficients[0] == 1
    assert (4 ** rep.degree) % abs(rep.coefficients[-1]) == 0


def test_integrality_m2_d4_closed_form():
    # 2 eta(2i)^2/eta(i)^2 = 2^{1/4}, so the polynomial is X^4 - 2
    rep = integrality_check(2, ImagQuadOrder(-4, 2), digits=120)
    assert rep.coefficients == (1, 0, 0, 0, -2)
    assert rep.monic_integral and rep.constant_divides_power


def test_class_invariant_is_fourth_power_of_integrality_value():
    with mp.workdps(140):
        order = ImagQuadOrder(-7, 12)
        tau0 = 3 * tau_point(order, 120).to_mpc()
        x = 4 * eval_eta(4 * tau0, 120).to_mpc() ** 2 / eval_eta(tau0, 120).to_mpc() ** 2
        assert abs(x ** 4 - class_invariant(order, 120).to_mpc()) < mp.mpf("1e-100")


def test_bigcomplex_precision_rules():
    a = BigComplex.make(mpmath.mpf(2), 60)
    b = BigComplex.make(mpmath.mpf(3), 90)
    assert (a * b).digits == 90
    assert (a + 1).digits == 60
    with pytest.raises(ValueError):
        BigComplex.make(1, 10)


def test_bigcomplex_json_round_trip():
    a = BigComplex.make(mpmath.mpc("1.25", "-0.5"), 60)
    d = a.to_json_dict()
    assert d["digits"] == 60
    b = BigComplex.from_json_dict(d)
    with mp.workdps(70):
        assert abs(a.to_mpc() - b.to_mpc()) < mp.mpf("1e-55")
    assert json.dumps(d, sort_keys=True) == json.dumps(a.to_json_dict(), sort_keys=True)

import random

import mpmath
import pytest
from mpmath import mp

from etaforge.cyclotomic import QQ
from etaforge.decompose import (
    G04,
    LEVEL4_UNIT,
    LEVEL4_UNIT_INV,
    EtaCombination,
    decompose_form,
    decompose_weight0,
    generator_set,
    j4_hauptmodul_relation,
    j_series,
    sturm_truncation,
)
from etaforge.errors import InsufficientBasis, InsufficientTruncation
from etaforge.etaq import (
    EtaQuotient,
    enumerate_holomorphic,
    eta_quotient_series,
    h_eta_quotient,
    index_gamma0,
    ligozat_check,
)
from etaforge.qseries import QSeries


def test_generator_set_level4():
    gens = generator_set(2)
    assert gens == [G04, LEVEL4_UNIT, LEVEL4_UNIT_INV]


def test_generator_set_level8_and_weights():
    gens = generator_set(3)
    assert len(gens) == 4
    assert gens[3].exps == h_eta_quotient(3).exps
    for n in range(2, 9):
        for g in generator_set(n):
            rep = ligozat_check(g)
            assert rep.passes and rep.weight == 0


def test_sturm_truncation_examples():
    assert sturm_truncation(1, 12, 0) == 13
    assert index_gamma0(4) == 6
    assert index_gamma0(8) == 12
    for a, b in (((4, 0, 3), (4, 0, 4)), ((4, 0, 3), (8, 0, 3)), ((4, 2, 3), (4, 4, 3))):
        assert sturm_truncation(*a) <= sturm_truncation(*b)


def test_decompose_single_generator_round_trip():
    order = sturm_truncation(4, 0, 3)
    target = eta_quotient_series(G04, order + 2)
    combo = decompose_weight0(target, 2, 3)
    assert combo.terms == ((QQ(1), G04),)


def test_decompose_known_combination():
    order = sturm_truncation(8, 0, 3)
    gens = generator_set(3)
    target = (eta_quotient_series(gens[0], order + 2) ** 2).scaled(2) + eta_quotient_series(
        gens[3], order + 2
    ).scaled(3)
    combo = decompose_weight0(target, 3, 3)
    assert {(str(c), q.exps) for c, q in combo.terms} == {
        ("2", gens[0].power(2).exps),
        ("3", gens[3].exps),
    }


def test_decompose_h3_squared_at_level4():
    h3sq = EtaQuotient(4, {1: -16, 2: 24, 4: -8})
    target = eta_quotient_series(h3sq, sturm_truncation(4, 0, 6) + 2)
    combo = decompose_weight0(target, 2, 6)
    re = combo.expand(target.trunc)
    assert (re - target).is_zero()
    assert combo.terms == ((QQ(1), EtaQuotient(4, {})), (QQ(16), G04))


def test_decompose_insufficient_truncation():
    target = eta_quotient_series(G04, 5)
    with pytest.raises(InsufficientTruncation):
        decompose_weight0(target, 2, 3)


def test_decompose_rejects_nonmodular_garbage():
    order = sturm_truncation(4, 0, 3)
    garbage = QSeries.from_terms({k: 1 for k in range(order + 2)}, order + 2)
    with pytest.raises(InsufficientBasis) as exc:
        decompose_weight0(garbage, 2, 3)
    assert exc.value.residual_exponent is not None


def test_decompose_rejects_deep_pole():
    order = sturm_truncation(4, 0, 2)
    target = QSeries.from_terms({-9: 1}, order + 2)
    with pytest.raises(InsufficientBasis):
        decompose_weight0(target, 2, 2)


def test_random_round_trips():
    from etaforge.decompose import _basis_system, _expanded_quotient

    rng = random.Random(99)
    for _ in range(12):
        n = rng.choice([2, 3])
        monos, rows, *_ = _basis_system(n, 3)
        order = sturm_truncation(1 << n, 0, 3)
        tgt = None
        for i in rng.sample(range(len(monos)), rng.randrange(1, 4)):
            c = QQ(rng.randrange(-9, 10), rng.randrange(1, 4))
            if not c:
                continue
            s = _expanded_quotient(monos[i].exps, 1 << n, order + 2).scaled(c)
            tgt = s if tgt is None else tgt + s
        if tgt is None or tgt.is_zero():
            continue
        combo = decompose_weight0(tgt, n, 3)
        assert (combo.expand(order) - tgt.truncated(order)).is_zero()


def test_decompose_form_weight0_reduces():
    order = sturm_truncation(4, 0, 3)
    target = eta_quotient_series(G04, order + 2)
    assert decompose_form(target, 2, 0, 3).terms == ((QQ(1), G04),)


def test_decompose_form_weight2_round_trip():
    rng = random.Random(5)
    quots = enumerate_holomorphic(8, 2, 16)
    order = sturm_truncation(8, 0, 6)
    target = None
    for q in rng.sample(quots, 3):
        c = QQ(rng.randrange(1, 7))
        s = eta_quotient_series(q, order + 6).scaled(c)
        target = s if target is None else target + s
    combo = decompose_form(target, 3, 2, 6)
    assert combo.weight == 2
    cutoff = order - 4
    assert (combo.expand(cutoff) - target.truncated(cutoff)).is_zero()
    for _, q in combo.terms:
        rep = ligozat_check(q)
        assert rep.passes and rep.weight == 1 * 2


def test_eta_combination_invariants():
    with pytest.raises(ValueError):
        EtaCombination(4, 0, [(1, G04), (2, G04)])
    with pytest.raises(ValueError):
        EtaCombination(8, 0, [(1, G04)])
    combo = EtaCombination(4, 0, [(0, G04), (3, LEVEL4_UNIT)])
    assert len(combo.terms) == 1


def test_eta_combination_json_round_trip():
    combo = EtaCombination(4, 2, [(QQ(-3, 2), G04), (QQ(5), LEVEL4_UNIT)])
    d = combo.to_json_dict()
    assert EtaCombination.from_json_dict(d).terms == combo.terms
    assert d["terms"][0]["coeff"] in ("-3/2", "5")


def test_j_series_paper_values():
    j = j_series(4)
    assert j.coefficient(-1) == 1
    assert j.coefficient(0) == 744
    assert j.coefficient(1) == 196884
    assert j.coefficient(2) == 21493760
    assert j.coefficient(3) == 864299970


def test_j_rescale_four():
    j4 = j_series(3).rescale(4)
    assert j4.leading_exponent() == -4
    assert j4.coefficient(-4) == 1
    assert j4.coefficient(0) == 744


def test_j4_relation_residual_and_pole_orders():
    rel = j4_hauptmodul_relation(6)
    assert rel.ord_at_zero("denom") - rel.ord_at_zero("numer") == 4
    g = eta_quotient_series(G04, 66)
    j4 = j_series(QQ(70, 4)).rescale(4).truncated(66)
    a, b = rel.evaluate_series(g)
    resid = a - j4 * b
    assert resid.trunc >= 61
    assert resid.is_zero()


def test_j4_relation_requires_degree_six():
    with pytest.raises(ValueError):
        j4_hauptmodul_relation(5)


def test_j4_relation_stable_under_degree_raise():
    assert j4_hauptmodul_relation(6) == j4_hauptmodul_relation(8)


def test_j4_relation_numeric_at_cm_point():
    from etaforge.cm import ImagQuadOrder, eval_eta_quotient, eval_qseries, tau_point

    rel = j4_hauptmodul_relation(6)
    order = ImagQuadOrder(-7, 12)
    with mp.workdps(340):
        tau = tau_point(order, 300).to_mpc()
        g_val = eval_eta_quotient(EtaQuotient(12, {12: 8, 3: -8}), tau, 300).to_mpc()
        lhs = rel.evaluate_mpc(g_val, mp)
        j12 = eval_qseries(j_series(40), 12 * tau, 300).to_mpc()
        assert abs(lhs - j12) / abs(j12) < mp.mpf("1e-30")

from math import gcd

import pytest

from exactflat.errors import NotDiagonalCase
from exactflat.hodge import (
    WimanModel,
    adapted_block_check,
    ahlfors_offblock_derivative,
    eigenform_relation_check,
    period_matrix,
    phi_homology,
    psi_blocks,
    rm_verdict,
    wiman_model,
)
from exactflat.numfield import CycNum, in_subfield, real_sign, sin2pi
from exactflat.homology import char_poly, is_quasi_unipotent


MODELS = {}


def model(g):
    if g not in MODELS:
        MODELS[g] = wiman_model(g)
    return MODELS[g]


def test_model_g2():
    m = model(2)
    assert m.complex.n_faces == 10
    assert m.basis.genus == 2
    # construction already checks boundary sums and phi-equivariance exactly


def test_model_g3_equivariance_all_k():
    m = model(3)
    for k in (1, 2, 3):
        assert eigenform_relation_check(m, k)


def test_holonomies_span_expected_field():
    m = model(3)
    for k in (1, 2, 3):
        gen = m.holonomy_field_generator(k)
        for dev in m.devs[k]:
            assert in_subfield(dev, gen)


@pytest.mark.parametrize("g", [2, 3, 4])
def test_phi_order(g):
    act = phi_homology(model(g))
    assert act.multiplicative_order() == 2 * g + 1
    assert not act.is_identity()
    poly = char_poly(act.matrix)
    assert is_quasi_unipotent(poly)


def test_psi_blocks_g2():
    rm = psi_blocks(model(2))
    assert sorted(rm.blocks) == [1, 2]
    for k, vecs in rm.blocks.items():
        assert len(vecs) == 2
    assert rm.groupings == {1: [1, 2]}


def test_psi_blocks_g3():
    rm = psi_blocks(model(3))
    assert sorted(rm.blocks) == [1, 2, 3]
    assert rm.groupings == {1: [1, 2, 3]}


def test_psi_blocks_g4_grouping():
    rm = psi_blocks(model(4))
    # n = 9, divisors t in {1, 3}: gcd classes {1,2,4} and {3}
    assert rm.groupings == {1: [1, 2, 4], 3: [3]}


@pytest.mark.parametrize("g,k", [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3),
                                 (4, 1), (4, 2), (4, 3), (4, 4),
                                 (5, 2), (5, 3)])
def test_eigenform_relations(g, k):
    assert eigenform_relation_check(model(g), k)


@pytest.mark.parametrize("g", [2, 3])
def test_period_matrix(g):
    res = period_matrix(model(g), 128)
    assert res.symmetric_defect() <= 2 * res.err + 1e-14
    assert res.imag_min_eigenvalue > res.err * g
    # doubling the precision at least halves the certified error
    res256 = period_matrix(model(g), 256)
    assert res256.err <= res.err / 2
    # exact symmetry of the algebraic matrix was asserted inside


def test_adapted_blocks():
    for g, t in ((2, 1), (3, 1)):
        rep = adapted_block_check(model(g), t)
        assert rep.off_diagonal_zero_exact
        assert rep.diagonal_imag_positive
        assert len(rep.diagonal) == g


def test_adapted_blocks_g4_t3():
    rep = adapted_block_check(model(4), 3)
    assert rep.off_diagonal_zero_exact
    assert rep.diagonal_imag_positive


def test_ahlfors_diagonal_cases():
    m = model(3)
    v = ahlfors_offblock_derivative(m, 2, 1, 3)
    assert real_sign(v) > 0
    assert v == 7 * sin2pi(2, 7)
    assert abs(v.ball().center.real - 6.8239) < 1e-3
    # independence of the decomposition i + j = 2k
    assert ahlfors_offblock_derivative(m, 2, 2, 2) == v
    assert ahlfors_offblock_derivative(m, 2, 3, 1) == v
    with pytest.raises(NotDiagonalCase):
        ahlfors_offblock_derivative(m, 2, 1, 2)


def test_ahlfors_g2():
    m = model(2)
    v = ahlfors_offblock_derivative(m, 1, 1, 1)
    assert v == 5 * sin2pi(1, 5)


def test_rm_verdict_g3():
    m = model(3)
    res = rm_verdict(3, 2, m)
    assert res.verdict == "violated"
    assert res.witness[0] == 1 and res.witness[1] == (1, 3)
    assert res.witness[2] == 7 * sin2pi(2, 7)
    assert rm_verdict(3, 1, m).verdict == "preserved_consistent"
    assert rm_verdict(3, 3, m).verdict == "preserved_consistent"


def test_rm_verdict_g4():
    m = model(4)
    res = rm_verdict(4, 2, m)
    assert res.verdict == "violated"
    assert res.witness[0] == 1 and res.witness[1] == (1, 3)
    assert res.witness[2] == 9 * sin2pi(2, 9)
    # gcd(3, 9) = 3 = t and rt = 3, so k = t = rt: the Veech (covering) case
    assert rm_verdict(4, 3, m).verdict == "preserved_consistent"


def test_rm_verdict_pattern_all_g():
    """violated exactly for t < k < rt; preserved for k in {t, rt}."""
    for g in (3, 4, 5, 6):
        n = 2 * g + 1
        m = None
        for k in range(1, g + 1):
            t = gcd(k, n)
            rt = (g // t) * t
            expected = "preserved_consistent" if k in (t, rt) else "violated"
            if expected == "violated" and m is None:
                m = model(g)
            res = rm_verdict(g, k, m)
            assert res.verdict == expected, (g, k, res.verdict)
            if expected == "violated":
                lo, hi = res.witness[1]
                assert lo + hi == 2 * k
                assert gcd(lo, n) == t or gcd(hi, n) == t
                assert real_sign(res.witness[2]) > 0

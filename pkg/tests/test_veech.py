import math
import random
from fractions import Fraction

import pytest

from exactflat.errors import PrimitiveSearchFailed, TooFewSlopes
from exactflat.flow import Direction, cylinder_decomposition, saddle_connections
from exactflat.numfield import (
    CycNum,
    cos2pi,
    cot2pi,
    euler_phi,
    in_subfield,
    min_poly,
    min_poly_degree,
)
from exactflat.surface import Mat2, build_2ngon, build_double_ngon, build_origami, build_wiman
from exactflat.veech import (
    classify,
    cayley,
    cot_geodesic,
    cross_ratio_field,
    default_rotation_candidates,
    iota0,
    lambda0,
    mirror,
    mu0,
    multitwist_auto,
    parabolic_element,
    symmetry_search,
    trace_field,
    trace_field_from_hyperbolic,
    verify_affine_auto,
    wiman_generators,
)


def torus():
    return build_origami([1], [1])


def test_parabolic_torus_horizontal():
    el = parabolic_element(torus(), Direction.horizontal())
    assert el.matrix == Mat2(1, 1, 0, 1)
    assert el.twist.powers == [1]


def test_parabolic_2ngon_vertical():
    el = parabolic_element(build_2ngon(5), Direction.vertical())
    mu = 2 * cot2pi(1, 20)
    assert el.matrix == Mat2(CycNum.rational(1), CycNum.rational(0), -mu, CycNum.rational(1))
    assert sorted(el.twist.powers) == [1, 1, 2]
    assert el.twist.total_modulus == mu
    cls = classify(el.matrix)
    assert cls.kind == "parabolic"
    assert cls.trace == 2


def test_parabolic_double_ngon_vertical():
    el = parabolic_element(build_double_ngon(7), Direction.vertical())
    mu = 2 * cot2pi(1, 14)
    assert el.matrix == Mat2(CycNum.rational(1), CycNum.rational(0), -mu, CycNum.rational(1))
    assert el.twist.powers == [1, 1, 1]


def test_parabolic_slanted_direction_exact():
    # exactness holds for arbitrary representable directions
    el = parabolic_element(torus(), Direction(1, 1))
    m = el.matrix
    assert m.det() == CycNum.rational(1)
    assert m.trace() == 2
    assert classify(m).kind == "parabolic"


def test_multitwist_record():
    el = parabolic_element(build_double_ngon(9), Direction.vertical())
    record = multitwist_auto(build_double_ngon(9), el.twist)
    assert len(record) == 4
    assert [p for _, p in record] == [1, 1, 1, 1]


def test_symmetry_search_2ngon_rotation():
    s = build_2ngon(5)
    rot = Mat2.rotation(1, 10)  # rotation by pi/5
    autos = symmetry_search(s, [rot])
    assert autos, "order-10 elliptic symmetry not found"
    for auto in autos:
        assert verify_affine_auto(s, auto)


def test_symmetry_search_wiman_rotation():
    s = build_wiman(3, 2)
    rot = Mat2.rotation(2, 7)  # rotation by 4 pi / 7
    autos = symmetry_search(s, [rot])
    assert autos
    auto = autos[0]
    # T_{m,eps} -> T_{m+1,eps}
    assert auto.polygon_map["Tp0"] == "Tp1"
    assert auto.polygon_map["Tm3"] == "Tm4"
    assert verify_affine_auto(s, auto)


def test_symmetry_search_torus_no_order6():
    autos = symmetry_search(torus(), [Mat2.rotation(1, 6)])
    assert autos == []


def test_classify():
    assert classify(Mat2(1, 1, 0, 1)).kind == "parabolic"
    assert classify(Mat2.rotation(1, 10)).kind == "elliptic"
    p, r = wiman_generators(2, "omegag")
    # the plain product p*r is the other cusp: trace exactly -2
    assert classify(p * r).kind == "parabolic"
    assert classify(p * r).trace == -2
    cls = classify(p * r * r)
    assert cls.kind == "hyperbolic"
    assert cls.leading_eigenvalue > 1
    tf = cls.trace.ball().center.real
    assert abs(tf) > 2


def test_mirror():
    assert mirror(Mat2.identity()) == Mat2.identity()
    mu = CycNum.rational(Fraction(7, 2))
    assert mirror(Mat2(1, mu, 0, 1)) == Mat2(1, -mu, 0, 1)
    rot = Mat2.rotation(1, 12)
    assert mirror(rot) == Mat2.rotation(11, 12)
    # involution
    assert mirror(mirror(rot)) == rot


def test_mirror_of_generators_are_veech_elements():
    # the mirror of each generator is the (unmirrored) twist/rotation element
    p, r = wiman_generators(2, "omegag")
    mu = 2 * cot2pi(1, 20)
    assert mirror(p) == Mat2(CycNum.rational(1), CycNum.rational(0), mu, CycNum.rational(1))
    assert mirror(r) == Mat2.rotation(1, 10)


def test_wiman_generator_matrices():
    p, r = wiman_generators(2, "omegag")
    assert p == Mat2(CycNum.rational(1), CycNum.rational(0), -2 * cot2pi(1, 20),
                     CycNum.rational(1))
    c, s = cos2pi(1, 10), __import__("exactflat.numfield", fromlist=["sin2pi"]).sin2pi(1, 10)
    assert r == Mat2(c, s, -s, c)
    p1, r1 = wiman_generators(2, "omega1")
    assert p1 == Mat2(CycNum.rational(1), CycNum.rational(0), -2 * cot2pi(1, 10),
                      CycNum.rational(1))


def test_parabolic_equals_mirror_generator():
    """The vertical multitwist matrix coincides with the first mirror-group
    generator; its mirror is the inverse (the paper's unmirrored element)."""
    for n in (5, 7):
        g = (n - 1) // 2
        el = parabolic_element(build_2ngon(n), Direction.vertical())
        gen_p, _ = wiman_generators(g, "omegag")
        assert el.matrix == gen_p
    el = parabolic_element(build_double_ngon(7), Direction.vertical())
    gen_p, _ = wiman_generators(3, "omega1")
    assert el.matrix == gen_p


def test_trace_field_rational():
    rep = trace_field([CycNum.rational(2), CycNum.rational(3)])
    assert rep.degree == 1


def test_trace_field_golden():
    p, r = wiman_generators(2, "omega1")
    h = p * r * r
    assert classify(h).kind == "hyperbolic"
    rep = trace_field_from_hyperbolic(h)
    assert rep.degree == 2  # Q(sqrt 5)
    assert in_subfield(h.trace(), rep.primitive)


@pytest.mark.parametrize("g,k,n0", [(2, 1, 5), (3, 2, 7), (4, 2, 9), (4, 3, 3)])
def test_trace_field_of_generated_elements(g, k, n0):
    n = 2 * g + 1
    which = "omegag" if k == g else "omega1"
    if k in (1, g):
        p, r = wiman_generators(g, which)
        traces = [p.trace(), r.trace(), (p * r).trace(), (r * p * r).trace()]
        rep = trace_field(traces)
        assert rep.degree == euler_phi(n0) // 2
        target = 2 * cos2pi(1, n0)
        assert in_subfield(target, rep.primitive)
        assert in_subfield(rep.primitive, target)
    else:
        # rotation by 2 pi k / n generates the right field already
        rot = Mat2.rotation(k, n)
        rep = trace_field([rot.trace()])
        assert rep.degree == euler_phi(n0) // 2


def test_iota0_antihomomorphism():
    rng = random.Random(3)
    for _ in range(50):
        a = Mat2(1, Fraction(rng.randint(-3, 3)), 0, 1) * Mat2(
            1, 0, Fraction(rng.randint(-3, 3)), 1)
        b = Mat2(1, Fraction(rng.randint(-3, 3)), 0, 1) * Mat2(
            1, 0, Fraction(rng.randint(-3, 3)), 1)
        assert iota0(a * b) == iota0(b) * iota0(a)


def test_halfplane_identity():
    ident = ((1.0, 0.0), (0.0, 1.0))
    assert abs(lambda0(ident) - 1j) < 1e-15
    assert abs(mu0(ident)) < 1e-15


def test_iota0_formula():
    m = Mat2(1, 2, 3, 7)
    assert iota0(m) == Mat2(7, 2, 3, 1)


def test_mu0_equals_cayley_of_lambda0():
    rng = random.Random(11)
    worst = 0.0
    for _ in range(100):
        # random SL2 via shear * shear * diagonal
        x, y = rng.uniform(-2, 2), rng.uniform(-2, 2)
        t = rng.uniform(0.5, 2.0)
        a = ((1, x), (0, 1))
        b = ((1, 0), (y, 1))
        d = ((t, 0), (0, 1 / t))
        m = _mul(_mul(a, b), d)
        worst = max(worst, abs(mu0(m) - cayley(lambda0(m))))
    assert worst < 1e-12


def _mul(m1, m2):
    (a, b), (c, d) = m1
    (e, f), (g, h) = m2
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


def test_cot_geodesic():
    a, b = cot_geodesic(math.pi / 4)
    assert abs(a - 1) < 1e-12
    assert abs(b - (1 + math.sqrt(2))) < 1e-12
    _, b10 = cot_geodesic(math.pi / 10)
    assert abs(b10 - 1 / math.tan(math.pi / 20)) < 1e-9
    a_near, _ = cot_geodesic(math.pi / 2 - 1e-9)
    assert abs(a_near) < 1e-8


def test_cross_ratio_rational_points():
    slopes = [Direction(1, 0), Direction(1, 1), Direction(0, 1), Direction(1, -1)]
    rep = cross_ratio_field(slopes)
    assert rep.degree == 1
    with pytest.raises(TooFewSlopes):
        cross_ratio_field(slopes[:3])


def test_cross_ratio_field_torus():
    conns = saddle_connections(torus(), 2)
    dirs = []
    for c in conns:
        x, y = c.holonomy.real_part(), c.holonomy.imag_part()
        d = Direction(x, y)
        if not any(d == e for e in dirs):
            dirs.append(d)
    rep = cross_ratio_field(dirs)
    assert rep.degree == 1


def test_cross_ratio_field_2ngon_contains_cos():
    s = build_2ngon(5)
    conns = saddle_connections(s, 2)
    dirs = []
    for c in conns:
        d = Direction(c.holonomy.real_part(), c.holonomy.imag_part())
        if not any(d == e for e in dirs):
            dirs.append(d)
    assert len(dirs) >= 4
    rep = cross_ratio_field(dirs)
    # contains Q(cos pi/5) = Q(sqrt 5)
    assert in_subfield(2 * cos2pi(1, 5), rep.primitive)


def test_default_rotation_candidates():
    s = build_2ngon(5)
    cands = default_rotation_candidates(s)
    assert len(cands) == 10
    assert any(c == Mat2.rotation(1, 10) for c in cands)

r"""Veech-group elements with verifiable witnesses, matrix classification,
half-plane model maps, and trace / cross-ratio fields.

The artifact never claims to compute a full Veech group: it produces
elements (parabolics from commensurable cylinder twists, elliptics from
polygon symmetries) together with exact witnesses, and the fields generated
by their traces.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    ExactFlatError,
    NonUnitDeterminant,
    PrimitiveSearchFailed,
    TooFewSlopes,
)
from .flow import (
    CommensurateModuli,
    Cylinder,
    Decomposition,
    Direction,
    commensurate_moduli,
    cylinder_decomposition,
)
from .numfield import (
    CycNum,
    cos2pi,
    cot2pi,
    in_subfield,
    min_poly,
    real_sign,
    sin2pi,
)
from .surface import EdgeRef, Mat2, TranslationSurface, act


class NotJSDirection(ExactFlatError):
    """The direction did not yield a complete cylinder decomposition."""

    def __init__(self, decomposition: Decomposition):
        self.decomposition = decomposition
        super().__init__(f"not a (witnessed) Jenkins-Strebel direction: "
                         f"{decomposition.status}")


@dataclass
class MulticurveTwistData:
    cylinders: list[Cylinder]
    powers: list[int]
    total_modulus: CycNum


@dataclass
class ParabolicElement:
    matrix: Mat2
    twist: MulticurveTwistData


@dataclass
class AffineAuto:
    linear: Mat2
    polygon_map: dict[str, str]
    rotations: dict[str, int]  # vertex index shift per polygon
    offsets: dict[str, CycNum]

    def edge_map(self, surface: TranslationSurface, ref: EdgeRef) -> EdgeRef:
        n = len(surface.polygons[ref.polygon])
        return EdgeRef(self.polygon_map[ref.polygon],
                       (ref.index + self.rotations[ref.polygon]) % n)


@dataclass
class TraceFieldReport:
    degree: int
    primitive: CycNum
    min_poly: tuple[int, ...]
    generator_description: str

    def to_json(self):
        return {"degree": self.degree,
                "primitive": self.primitive.to_json(),
                "min_poly": list(self.min_poly),
                "generator": self.generator_description}


# -- parabolic elements from cylinder twists ------------------------------------


def parabolic_element(surface: TranslationSurface, direction: Direction,
                      cap: int = 10_000) -> ParabolicElement:
    """The multitwist parabolic fixing ``direction``: the conjugate
    R(theta) [[1, mu], [0, 1]] R(-theta); entries are exact for every
    representable direction since only cos^2, sin^2 and cos*sin appear."""
    dec = cylinder_decomposition(surface, direction, cap)
    if dec.status != "ok":
        raise NotJSDirection(dec)
    comm = commensurate_moduli(dec.cylinders)
    mu = comm.mu
    q = direction.norm_sq
    qinv = q.inverse()
    cc = direction.dx * direction.dx * qinv
    ss = direction.dy * direction.dy * qinv
    cs = direction.dx * direction.dy * qinv
    matrix = Mat2(1 - mu * cs, mu * cc, -(mu * ss), 1 + mu * cs)
    twist = MulticurveTwistData(cylinders=dec.cylinders,
                                powers=comm.multipliers,
                                total_modulus=mu)
    return ParabolicElement(matrix=matrix, twist=twist)


def multitwist_auto(surface: TranslationSurface,
                    twist: MulticurveTwistData) -> list[tuple[tuple, int]]:
    """Witness record for the homology action of the multitwist: the core
    crossing cycles with their twist powers.  (The twist is not
    polygon-cellular, so no polygon-level map exists.)"""
    return [(cyl.core, power)
            for cyl, power in zip(twist.cylinders, twist.powers)]


# -- polygon symmetries ----------------------------------------------------------


def default_rotation_candidates(surface: TranslationSurface) -> list[Mat2]:
    """All rotations by 2 pi j / N for the surface's cyclotomic order N."""
    n = surface.order
    return [Mat2.rotation(j, n) for j in range(n)]


def symmetry_search(surface: TranslationSurface,
                    candidates: list[Mat2] | None = None) -> list[AffineAuto]:
    """Affine self-maps with the given linear parts, found by exhaustive
    matching of distorted polygons onto original ones up to translation.

    Every returned witness satisfies the vertex equations exactly and
    commutes with the gluing.
    """
    surface.ensure_valid()
    if candidates is None:
        candidates = default_rotation_candidates(surface)
    autos = []
    for mat in candidates:
        if mat.det() != CycNum.rational(1):
            raise NonUnitDeterminant("symmetry candidates must be in SL2")
        distorted = act(surface, mat)
        matches: dict[str, list[tuple[str, int, CycNum]]] = {}
        for pid in sorted(surface.polygons):
            p = distorted.polygons[pid]
            matches[pid] = []
            for qid in sorted(surface.polygons):
                q = surface.polygons[qid]
                if len(p) != len(q):
                    continue
                n = len(p)
                for r in range(n):
                    offset = q.vertex(r) - p.vertex(0)
                    if all((p.vertex(j) + offset) == q.vertex(j + r) for j in range(1, n)):
                        matches[pid].append((qid, r, offset))
        pids = sorted(surface.polygons)

        def backtrack(k, assignment, used):
            if k == len(pids):
                yield dict(assignment)
                return
            pid = pids[k]
            for (qid, r, offset) in matches[pid]:
                if qid in used:
                    continue
                assignment[pid] = (qid, r, offset)
                used.add(qid)
                yield from backtrack(k + 1, assignment, used)
                used.discard(qid)
                del assignment[pid]

        for assignment in backtrack(0, {}, set()):
            polygon_map = {pid: assignment[pid][0] for pid in pids}
            rotations = {pid: assignment[pid][1] for pid in pids}
            offsets = {pid: assignment[pid][2] for pid in pids}
            auto = AffineAuto(linear=mat, polygon_map=polygon_map,
                              rotations=rotations, offsets=offsets)
            if _gluing_equivariant(surface, auto):
                autos.append(auto)
    return autos


def _gluing_equivariant(surface: TranslationSurface, auto: AffineAuto) -> bool:
    for ref in surface.all_edge_refs():
        image = auto.edge_map(surface, ref)
        partner_image = auto.edge_map(surface, surface.gluing.partner(ref))
        if surface.gluing.partner(image) != partner_image:
            return False
    return True


def verify_affine_auto(surface: TranslationSurface, auto: AffineAuto) -> bool:
    """Exact re-verification of the witness equations."""
    distorted = act(surface, auto.linear)
    for pid in sorted(surface.polygons):
        p = distorted.polygons[pid]
        q = surface.polygons[auto.polygon_map[pid]]
        r = auto.rotations[pid]
        off = auto.offsets[pid]
        n = len(p)
        if not all((p.vertex(j) + off) == q.vertex(j + r) for j in range(n)):
            return False
    return _gluing_equivariant(surface, auto)


# -- classification ----------------------------------------------------------------


@dataclass
class Classification:
    kind: str  # "elliptic" | "parabolic" | "hyperbolic"
    trace: CycNum
    eigenvalue_min_poly: tuple | None = None  # (1, -t, 1) as CycNum coefficients
    leading_eigenvalue: float | None = None


def classify(matrix: Mat2) -> Classification:
    if matrix.det() != CycNum.rational(1):
        raise NonUnitDeterminant("classify requires det = 1")
    t = matrix.trace()
    disc = t * t - 4
    s = real_sign(disc)
    if s < 0:
        return Classification("elliptic", t)
    if s == 0:
        return Classification("parabolic", t)
    tf = t.ball().center.real
    lam = (abs(tf) + (tf * tf - 4) ** 0.5) / 2
    return Classification("hyperbolic", t,
                          eigenvalue_min_poly=(CycNum.rational(1), -t, CycNum.rational(1)),
                          leading_eigenvalue=lam)


def mirror(matrix: Mat2) -> Mat2:
    """Conjugation by diag(-1, 1): (a b; c d) -> (a -b; -c d)."""
    return Mat2(matrix.a, -matrix.b, -matrix.c, matrix.d)


# -- trace fields ---------------------------------------------------------------------


def trace_field(traces: list[CycNum],
                description: str = "traces") -> TraceFieldReport:
    """Smallest real subfield containing all traces, by primitive-element
    search over deterministic small rational combinations; every candidate
    is verified exactly via subfield membership of each trace."""
    if not traces:
        raise ValueError("need at least one trace")
    candidates = list(traces)
    rng = random.Random(0x5eed)
    for _ in range(64 - len(candidates)):
        coeffs = [rng.randint(1, 8) for _ in traces]
        combo = sum((Fraction(c) * t for c, t in zip(coeffs, traces)),
                    CycNum.rational(0))
        candidates.append(combo)
    for cand in candidates[:64]:
        if cand.is_rational():
            if all(t.is_rational() for t in traces):
                return TraceFieldReport(1, CycNum.rational(1), (-1, 1),
                                        f"Q (from {description})")
            continue
        if all(in_subfield(t, cand) for t in traces):
            poly = min_poly(cand)
            return TraceFieldReport(len(poly) - 1, cand, poly,
                                    f"primitive element for {description}")
    raise PrimitiveSearchFailed(f"no primitive element found for {description}")


def trace_field_from_hyperbolic(matrix: Mat2) -> TraceFieldReport:
    cls = classify(matrix)
    if cls.kind != "hyperbolic":
        raise ValueError("matrix is not hyperbolic")
    return trace_field([cls.trace], description="tr of a hyperbolic element")


def cross_ratio_field(slopes: list[Direction], subset_cap: int = 2000) -> TraceFieldReport:
    """Field generated by all cross-ratios of 4-subsets of the given slopes
    (as projective points), up to a deterministic subset cap."""
    distinct: list[Direction] = []
    for d in slopes:
        if not any(d == e for e in distinct):
            distinct.append(d)
    if len(distinct) < 4:
        raise TooFewSlopes(f"need >= 4 distinct slopes, got {len(distinct)}")
    values = []
    for combo in itertools.islice(itertools.combinations(range(len(distinct)), 4),
                                  subset_cap):
        p = [distinct[i] for i in combo]

        def det(u: Direction, v: Direction) -> CycNum:
            return u.dx * v.dy - u.dy * v.dx

        d13, d24 = det(p[0], p[2]), det(p[1], p[3])
        d14, d23 = det(p[0], p[3]), det(p[1], p[2])
        cr = (d13 * d24) / (d14 * d23)
        if not any(cr == v for v in values):
            values.append(cr)
    return trace_field(values, description="cross-ratios")


# -- half-plane guises ------------------------------------------------------------------


def lambda0(matrix) -> complex:
    """A(i)/A(1) for an SL2 matrix given as floats or Mat2."""
    a, b, c, d = _entries(matrix)
    return (b + 1j * d) / (a + 1j * c)


def mu0(matrix) -> complex:
    """The Beltrami coefficient (A(1) + iA(i)) / (A(1) - iA(i))."""
    a, b, c, d = _entries(matrix)
    a1 = a + 1j * c
    ai = b + 1j * d
    return (a1 + 1j * ai) / (a1 - 1j * ai)


def iota0(matrix: Mat2) -> Mat2:
    """The anti-involution (a b; c d) -> (d b; c a), exact."""
    return Mat2(matrix.d, matrix.b, matrix.c, matrix.a)


def cayley(tau: complex) -> complex:
    """The Moebius map H -> Delta, tau -> (i - tau)/(i + tau)."""
    return (1j - tau) / (1j + tau)


def _entries(matrix):
    if isinstance(matrix, Mat2):
        (a, b), (c, d) = matrix.to_floats()
        return a, b, c, d
    (a, b), (c, d) = matrix
    return a, b, c, d


def cot_geodesic(theta: float) -> tuple[float, float]:
    """Centre a = cot(theta) and endpoint b = cot(theta/2) of the geodesic
    through i meeting the imaginary axis at angle theta."""
    import math
    if not 0 < theta < math.pi / 2:
        raise ValueError("need 0 < theta < pi/2")
    return 1 / math.tan(theta), 1 / math.tan(theta / 2)


# -- the Wiman generator pairs ------------------------------------------------------------


def wiman_generators(g: int, which: str) -> tuple[Mat2, Mat2]:
    """The mirror-Veech generator pair for (W_g, omega_g) or (W_g, omega_1).

    omega_g: (1 0; -2cot(pi/2n) 1) and (cos(pi/n) sin(pi/n); -sin(pi/n) cos(pi/n));
    omega_1: the analogues with cot(pi/n) and angle 2pi/n.  Entries lie in
    the real subfield of Q(zeta_{4n}).
    """
    if g < 2:
        raise ValueError("need g >= 2")
    n = 2 * g + 1
    one = CycNum.rational(1)
    zero = CycNum.rational(0)
    if which == "omegag":
        cot = cot2pi(1, 4 * n)          # cot(pi/2n)
        c, s = cos2pi(1, 2 * n), sin2pi(1, 2 * n)   # cos, sin of pi/n
    elif which == "omega1":
        cot = cot2pi(1, 2 * n)          # cot(pi/n)
        c, s = cos2pi(1, n), sin2pi(1, n)           # cos, sin of 2pi/n
    else:
        raise ValueError("which must be 'omegag' or 'omega1'")
    parabolic = Mat2(one, zero, -2 * cot, one)
    rotation = Mat2(c, s, -s, c)
    return parabolic, rotation

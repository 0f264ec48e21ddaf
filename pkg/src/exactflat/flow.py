r"""Directional geometry: exact straight-line flow, saddle connections and
cylinder decompositions.

Everything here runs on exact cyclotomic coordinates.  A trace advances
segment by segment: inside a convex polygon the exit edge is found by sign
tests, crossing a glued edge applies the derived translation, and a trace
stops the moment it meets a vertex (all vertex classes are cone points for
this purpose, including removable angle-2pi ones; no perturbation is ever
applied).

For a direction d = (dx, dy) the transverse coordinate is tau(z) =
cross(d, z).  Cylinders report

* ``circumference`` c: the core leaf has holonomy c * d (true length c|d|),
* ``width`` w: the true width is w|d| (w = delta tau / (dx^2 + dy^2)),

so ``modulus = circumference / width`` holds exactly, and for the unit
horizontal/vertical directions both numbers are the literal Euclidean ones.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .errors import ExactFlatError
from .numfield import CycNum, real_sign
from .surface import (
    EdgeRef,
    TranslationSurface,
    cross_sign,
    cross_value,
    dot_sign,
    dot_value,
    same_direction,
)


class Incommensurable(ExactFlatError):
    """Cylinder moduli do not lie on one rational line; .ratio is a witness."""

    def __init__(self, ratio):
        self.ratio = ratio
        super().__init__("cylinder moduli are incommensurable")


class Direction:
    """A projective direction with real cyclotomic components, normalized so
    the first nonzero component is +1."""

    __slots__ = ("dx", "dy", "vec", "norm_sq")

    def __init__(self, dx, dy):
        conv = lambda t: t if isinstance(t, CycNum) else CycNum.rational(Fraction(t))
        dx, dy = conv(dx), conv(dy)
        if dx.is_zero() and dy.is_zero():
            raise ValueError("zero direction")
        if not dx.is_zero():
            scale = dx.inverse()
        else:
            scale = dy.inverse()
        dx, dy = (dx * scale).compress(), (dy * scale).compress()
        self.dx, self.dy = dx, dy
        m_i = CycNum.zeta(4, 1)
        self.vec = dx + m_i * dy
        self.norm_sq = dx * dx + dy * dy

    @classmethod
    def horizontal(cls) -> Direction:
        return cls(1, 0)

    @classmethod
    def vertical(cls) -> Direction:
        return cls(0, 1)

    def __eq__(self, other):
        return isinstance(other, Direction) and self.dx == other.dx and self.dy == other.dy

    def __repr__(self):
        return f"Direction({self.dx!r}, {self.dy!r})"

    def tau(self, z: CycNum) -> CycNum:
        """The transverse coordinate cross(d, z), exact and real."""
        return cross_value(self.vec, z)

    def is_unit(self) -> bool:
        return self.norm_sq == 1


@dataclass(frozen=True)
class SaddleConnection:
    start: int  # cone vertex-class id
    end: int
    holonomy: CycNum
    crossings: tuple[tuple[str, int], ...]  # glued edges traversed, in order
    segments: tuple[tuple[str, CycNum, CycNum], ...] = ()
    on_edge: tuple[str, int] | None = None  # set when the connection is a polygon edge
    start_corner: tuple[str, int] | None = None

    def sort_key(self):
        b = self.holonomy.ball().center
        return (self.start, self.end, round(b.real, 12), round(b.imag, 12),
                self.crossings)


@dataclass(frozen=True)
class HitsCone:
    connection: SaddleConnection


@dataclass(frozen=True)
class Closes:
    displacement: CycNum
    crossings: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class Undetermined:
    reason: str


TraceOutcome = HitsCone | Closes | Undetermined


@dataclass
class Cylinder:
    direction: Direction
    circumference: CycNum
    width: CycNum
    modulus: CycNum
    area: CycNum
    core: tuple[tuple[str, int], ...]
    boundary: tuple[list[SaddleConnection], list[SaddleConnection]]
    panes: list = field(default_factory=list)  # internal band data (rendering)


@dataclass
class Decomposition:
    status: str  # "ok" | "not_js" | "undetermined"
    cylinders: list[Cylinder] = field(default_factory=list)
    witness: object = None


# -- elementary stepping -------------------------------------------------------


def _exit_polygon(surface, pid, z, dvec):
    """First boundary point hit by the ray z + t*dvec, t > 0, in polygon pid.

    Returns (q, edge_index_or_None, vertex_index_or_None, t).
    """
    poly = surface.polygons[pid]
    n = len(poly)
    best = None  # (t, edge index, s)
    for i in range(n):
        a, b = poly.vertex(i), poly.vertex(i + 1)
        w = b - a
        den = cross_value(dvec, w)
        if real_sign(den) == 0:
            continue
        rel = a - z
        t = cross_value(rel, w) / den
        if real_sign(t) <= 0:
            continue
        s = cross_value(rel, dvec) / den
        ss = real_sign(s)
        if ss < 0 or real_sign(1 - s) < 0:
            continue
        if best is None or real_sign(best[0] - t) > 0:
            best = (t, i, s)
    if best is None:
        raise AssertionError(f"ray failed to exit polygon {pid}")
    t, i, s = best
    a, b = poly.vertex(i), poly.vertex(i + 1)
    if real_sign(s) == 0:
        return a, None, i % n, t
    if real_sign(1 - s) == 0:
        return b, None, (i + 1) % n, t
    q = z + t * dvec
    return q, i, None, t


def _corner_contains(surface, pid, i, dvec):
    """Whether direction dvec lies in the half-open corner wedge
    [outgoing edge, reversed incoming edge) at vertex i of polygon pid."""
    poly = surface.polygons[pid]
    a = poly.edge_vector(i)
    b = poly.vertex(i - 1) - poly.vertex(i)
    if same_direction(a, dvec):
        return "edge"
    if cross_sign(a, dvec) > 0 and cross_sign(dvec, b) > 0:
        return "interior"
    return None


def _trace_until_cone(surface, pid, start_index, dvec, cap):
    """Trace the separatrix leaving corner (pid, start_index) along dvec."""
    poly = surface.polygons[pid]
    mode = _corner_contains(surface, pid, start_index, dvec)
    start_class = surface.corner_class(pid, start_index)
    if mode == "edge":
        end_class = surface.corner_class(pid, start_index + 1)
        a, b = surface.edge_endpoints(EdgeRef(pid, start_index))
        conn = SaddleConnection(
            start=start_class, end=end_class, holonomy=b - a,
            crossings=((pid, start_index),),
            segments=((pid, a, b),), on_edge=(pid, start_index),
            start_corner=(pid, start_index))
        return HitsCone(conn)
    assert mode == "interior"
    z = poly.vertex(start_index)
    cur = pid
    holonomy = CycNum.rational(0, 4)
    crossings: list[tuple[str, int]] = []
    segments: list[tuple[str, CycNum, CycNum]] = []
    for _ in range(cap):
        q, edge_idx, vertex_idx, _t = _exit_polygon(surface, cur, z, dvec)
        holonomy = holonomy + (q - z)
        segments.append((cur, z, q))
        if vertex_idx is not None:
            end_class = surface.corner_class(cur, vertex_idx)
            return HitsCone(SaddleConnection(
                start=start_class, end=end_class, holonomy=holonomy,
                crossings=tuple(crossings), segments=tuple(segments),
                start_corner=(pid, start_index)))
        ref = EdgeRef(cur, edge_idx)
        crossings.append((cur, edge_idx))
        partner = surface.gluing.partner(ref)
        z = q + surface.gluing_translation(ref)
        cur = partner.polygon
    return Undetermined(f"cap {cap} exhausted from corner ({pid}, {start_index})")


def trace_ray(surface: TranslationSurface, start, direction: Direction,
              cap: int = 10_000) -> TraceOutcome:
    """Trace from ``start`` in ``direction`` until a cone point, closure, or cap.

    ``start`` is ("corner", pid, vertex_index) or ("interior", pid, point).
    """
    surface.ensure_valid()
    dvec = direction.vec
    kind = start[0]
    if kind == "corner":
        _, pid, idx = start
        if _corner_contains(surface, pid, idx, dvec) is None:
            raise ValueError(f"direction does not enter corner ({pid}, {idx})")
        return _trace_until_cone(surface, pid, idx, dvec, cap)
    _, pid0, z0 = start
    z, cur = z0, pid0
    holonomy = CycNum.rational(0, 4)
    crossings: list[tuple[str, int]] = []
    for step in range(cap):
        q, edge_idx, vertex_idx, _t = _exit_polygon(surface, cur, z, dvec)
        if step > 0 and cur == pid0 and _on_segment(z, q, z0):
            return Closes(holonomy + (z0 - z), tuple(crossings))
        holonomy = holonomy + (q - z)
        if vertex_idx is not None:
            cls = surface.corner_class(cur, vertex_idx)
            conn = SaddleConnection(
                start=-1, end=cls, holonomy=holonomy, crossings=tuple(crossings))
            return HitsCone(conn)
        ref = EdgeRef(cur, edge_idx)
        crossings.append((cur, edge_idx))
        z = q + surface.gluing_translation(ref)
        cur = surface.gluing.partner(ref).polygon
    return Undetermined(f"cap {cap} exhausted")


def _on_segment(z, q, p) -> bool:
    """Whether p lies on [z, q) (all three collinear by construction here)."""
    w = q - z
    rel = p - z
    if cross_sign(w, rel) != 0:
        return False
    t_num = dot_value(rel, w)
    if real_sign(t_num) < 0:
        return False
    return real_sign(dot_value(w, w) - t_num) > 0


# -- cylinder decomposition ------------------------------------------------------


def _band_slices(surface, pid, direction, levels):
    """Cut one polygon along the given transverse levels.

    Returns a list of bands; each band is a dict with the pane polygon, its
    tau interval, the sub-intervals of original edges on its boundary, and
    its cut segments at the two tau boundaries.
    """
    poly = surface.polygons[pid]
    n = len(poly)
    taus = [direction.tau(v) for v in poly.vertices]
    order_key = functools.cmp_to_key(lambda a, b: real_sign(a - b))
    lo_all = min(taus, key=order_key)
    hi_all = max(taus, key=order_key)
    cuts = sorted(levels, key=order_key)
    bounds = [lo_all] + cuts + [hi_all]
    bands = []
    for b in range(len(bounds) - 1):
        lo, hi = bounds[b], bounds[b + 1]
        pane_pts = []
        orig_pieces = []
        lo_pts, hi_pts = [], []
        for i in range(n):
            a, bb = poly.vertex(i), poly.vertex(i + 1)
            ta, tb = taus[i], taus[(i + 1) % n]
            dt = tb - ta
            if real_sign(dt) == 0:
                # polygon edge parallel to the direction: sits at an extreme
                if real_sign(ta - lo) == 0 or real_sign(ta - hi) == 0:
                    orig_pieces.append((i, Fraction(0), Fraction(1), a, bb, True))
                continue
            # parameter range where tau is inside [lo, hi]
            t_at_lo = (lo - ta) / dt
            t_at_hi = (hi - ta) / dt
            t0, t1 = (t_at_lo, t_at_hi) if real_sign(dt) > 0 else (t_at_hi, t_at_lo)
            t0 = _clamp01(t0)
            t1 = _clamp01(t1)
            if real_sign(t1 - t0) <= 0:
                continue
            za = a + t0 * (bb - a)
            zb = a + t1 * (bb - a)
            orig_pieces.append((i, t0, t1, za, zb, False))
            for z_end in (za, zb):
                tz = direction.tau(z_end)
                if real_sign(tz - lo) == 0:
                    lo_pts.append(z_end)
                elif real_sign(tz - hi) == 0:
                    hi_pts.append(z_end)
            pane_pts.append((i, t0, za))
            pane_pts.append((i, t1, zb))
        pane = _assemble_pane(pane_pts)
        bands.append({
            "pid": pid, "index": b, "lo": lo, "hi": hi, "pane": pane,
            "orig_pieces": orig_pieces,
            "lo_cut": _span(lo_pts, direction), "hi_cut": _span(hi_pts, direction),
        })
    return bands


def _clamp01(t: CycNum) -> CycNum:
    if real_sign(t) < 0:
        return CycNum.rational(0)
    if real_sign(t - 1) > 0:
        return CycNum.rational(1)
    return t


def _assemble_pane(pane_pts):
    """Deduplicated ccw vertex list of a pane from its edge sample points."""
    out = []
    for _i, _t, z in pane_pts:
        if not out or not (out[-1] - z).is_zero():
            out.append(z)
    if len(out) > 1 and (out[0] - out[-1]).is_zero():
        out.pop()
    return out


def _span(points, direction):
    """Extreme pair of collinear cut points (along the flow direction)."""
    if not points:
        return None
    lo = hi = points[0]
    lo_s = hi_s = dot_value(direction.vec, points[0])
    for z in points[1:]:
        s = dot_value(direction.vec, z)
        if real_sign(s - lo_s) < 0:
            lo, lo_s = z, s
        if real_sign(s - hi_s) > 0:
            hi, hi_s = z, s
    if (hi - lo).is_zero():
        return None
    return (lo, hi)


def _pane_area(pane) -> CycNum:
    total = CycNum.rational(0, 4)
    n = len(pane)
    for i in range(n):
        total = total + cross_value(pane[i], pane[(i + 1) % n])
    return total * Fraction(1, 2)


def cylinder_decomposition(surface: TranslationSurface, direction: Direction,
                           cap: int = 10_000) -> Decomposition:
    """Complete cylinder decomposition in a Jenkins-Strebel direction.

    Traces every separatrix; if all are saddle connections, cuts along the
    critical graph and reassembles the complementary panes into cylinders.
    The total cylinder area is checked against the surface area exactly.
    """
    surface.ensure_valid()
    dvec = direction.vec

    connections = []
    for pid in sorted(surface.polygons):
        for i in range(len(surface.polygons[pid])):
            mode = _corner_contains(surface, pid, i, dvec)
            if mode is None:
                continue
            outcome = _trace_until_cone(surface, pid, i, dvec, cap)
            if isinstance(outcome, Undetermined):
                return Decomposition("undetermined", witness=outcome.reason)
            if not isinstance(outcome, HitsCone):
                return Decomposition("not_js", witness=outcome)
            connections.append(outcome.connection)

    # group interior chords per polygon, keyed by exact transverse level
    chords: dict[str, list] = {pid: [] for pid in surface.polygons}
    for ci, conn in enumerate(connections):
        if conn.on_edge is not None:
            continue
        for (pid, z0, z1) in conn.segments:
            chords[pid].append((direction.tau(z0), z0, z1, ci))

    edge_conn: dict[tuple[str, int], int] = {}
    for ci, conn in enumerate(connections):
        if conn.on_edge is not None:
            ref = EdgeRef(*conn.on_edge)
            partner = surface.gluing.partner(ref)
            edge_conn[(ref.polygon, ref.index)] = ci
            edge_conn[(partner.polygon, partner.index)] = ci

    bands = []
    for pid in sorted(surface.polygons):
        levels = []
        for (tau, _z0, _z1, _ci) in chords[pid]:
            if not any(real_sign(tau - seen) == 0 for seen in levels):
                levels.append(tau)
        bands.extend(_band_slices(surface, pid, direction, levels))

    # union-find over bands glued along shared (non-parallel) edge pieces
    parent = list(range(len(bands)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    by_edge: dict[tuple[str, int], list] = {}
    for bi, band in enumerate(bands):
        for (i, t0, t1, _za, _zb, parallel) in band["orig_pieces"]:
            if parallel:
                continue
            by_edge.setdefault((band["pid"], i), []).append((t0, t1, bi))

    piece_key = functools.cmp_to_key(lambda p, q: real_sign(p[0] - q[0]))
    for ref, partner in surface.gluing:
        v = surface.edge_vector(ref)
        if cross_sign(dvec, v) == 0:
            continue  # critical edge: never glue across it
        side_a = sorted(by_edge.get((ref.polygon, ref.index), []), key=piece_key)
        side_b = [(1 - t1, 1 - t0, bi)
                  for (t0, t1, bi) in by_edge.get((partner.polygon, partner.index), [])]
        side_b.sort(key=piece_key)
        if len(side_a) != len(side_b):
            raise AssertionError(f"pane pieces mismatch across {ref} ~ {partner}")
        for (a0, a1, ba), (b0, b1, bb) in zip(side_a, side_b):
            if real_sign(a0 - b0) != 0 or real_sign(a1 - b1) != 0:
                raise AssertionError(f"pane cut points mismatch across {ref} ~ {partner}")
            union(ba, bb)

    groups: dict[int, list[int]] = {}
    for bi in range(len(bands)):
        groups.setdefault(find(bi), []).append(bi)

    q = direction.norm_sq
    cylinders = []
    total_area = CycNum.rational(0, 4)
    for root in sorted(groups):
        members = groups[root]
        widths = [bands[bi]["hi"] - bands[bi]["lo"] for bi in members]
        for wv in widths[1:]:
            if real_sign(wv - widths[0]) != 0:
                raise AssertionError("panes of one cylinder disagree on width")
        delta_tau = widths[0]
        area = sum((_pane_area(bands[bi]["pane"]) for bi in members),
                   CycNum.rational(0, 4))
        total_area = total_area + area
        circumference = area / delta_tau
        width = delta_tau / q
        modulus = circumference / width

        lo_conns, hi_conns = set(), set()
        for bi in members:
            band = bands[bi]
            for side, bag in (("lo", lo_conns), ("hi", hi_conns)):
                cut = band[side + "_cut"]
                level = band[side]
                if cut is not None:
                    for (tau, z0, z1, ci) in chords[band["pid"]]:
                        if real_sign(tau - level) == 0 and _overlaps(
                                direction, z0, z1, cut):
                            bag.add(ci)
            for (i, _t0, _t1, _za, _zb, parallel) in band["orig_pieces"]:
                if parallel:
                    tau_e = direction.tau(surface.polygons[band["pid"]].vertex(i))
                    bag = lo_conns if real_sign(tau_e - band["lo"]) == 0 else hi_conns
                    bag.add(edge_conn[(band["pid"], i)])

        core = _core_cycle(surface, bands[members[0]], direction, cap)
        cylinders.append(Cylinder(
            direction=direction,
            circumference=circumference,
            width=width,
            modulus=modulus,
            area=area,
            core=core,
            boundary=(
                sorted((connections[ci] for ci in lo_conns),
                       key=SaddleConnection.sort_key),
                sorted((connections[ci] for ci in hi_conns),
                       key=SaddleConnection.sort_key),
            ),
            panes=[bands[bi] for bi in members],
        ))
    if not (total_area - surface.area()).is_zero():
        raise AssertionError("cylinder areas do not sum to the surface area")
    return Decomposition("ok", cylinders=cylinders)


def _overlaps(direction, z0, z1, cut) -> bool:
    """Whether chord [z0,z1] and cut segment share more than a point (both
    collinear along the flow direction)."""
    s0 = dot_value(direction.vec, z0)
    s1 = dot_value(direction.vec, z1)
    c0 = dot_value(direction.vec, cut[0])
    c1 = dot_value(direction.vec, cut[1])
    lo1, hi1 = (s0, s1) if real_sign(s1 - s0) > 0 else (s1, s0)
    lo2, hi2 = (c0, c1) if real_sign(c1 - c0) > 0 else (c1, c0)
    return real_sign(_min2(hi1, hi2) - _max2(lo1, lo2)) > 0


def _min2(a, b):
    return a if real_sign(a - b) <= 0 else b


def _max2(a, b):
    return a if real_sign(a - b) >= 0 else b


def _core_cycle(surface, band, direction, cap):
    pane = band["pane"]
    centroid = sum(pane[1:], pane[0]) * Fraction(1, len(pane))
    outcome = trace_ray(surface, ("interior", band["pid"], centroid), direction, cap)
    if not isinstance(outcome, Closes):
        raise AssertionError("core leaf of a cylinder failed to close")
    return outcome.crossings


# -- saddle connections ----------------------------------------------------------


def _cone_contains(L, R, incl_L, w) -> bool:
    if same_direction(L, w):
        return incl_L
    return cross_sign(L, w) > 0 and cross_sign(w, R) > 0


def _cone_within(L, R, X) -> bool:
    """X in the closed cone [L, R] (cones are < pi throughout)."""
    if same_direction(L, X) or same_direction(R, X):
        return True
    return cross_sign(L, X) > 0 and cross_sign(X, R) > 0


def _segment_min_dist_sq(a, b):
    """Exact squared distance from the origin to segment [a, b]."""
    w = b - a
    na = dot_value(a, a)
    nb = dot_value(b, b)
    if real_sign(dot_value(w, a)) >= 0:  # closest at a
        return na
    if real_sign(dot_value(w, b)) <= 0:  # closest at b
        return nb
    c = cross_value(a, b)
    return c * c / dot_value(w, w)


def saddle_connections(surface: TranslationSurface, bound,
                       max_crossings: int = 256) -> list[SaddleConnection]:
    """All saddle connections with |holonomy| <= bound, once per orientation.

    Breadth-first over crossing sequences from every corner, pruned by the
    exact visibility cone through the accumulated edge windows; completeness
    follows from the pruning being exact.
    """
    surface.ensure_valid()
    if not isinstance(bound, CycNum):
        bound = CycNum.rational(Fraction(bound))
    bound_sq = bound * bound
    if real_sign(bound) <= 0:
        raise ValueError("bound must be positive")
    found = []
    for pid in sorted(surface.polygons):
        poly = surface.polygons[pid]
        n = len(poly)
        for i in range(n):
            start_class = surface.corner_class(pid, i)
            v0 = poly.vertex(i)
            L = poly.edge_vector(i)
            R = poly.vertex(i - 1) - poly.vertex(i)
            queue = [(pid, v0 * -1, None, L, R, True, ())]
            while queue:
                cur, offset, entry, wl, wr, incl, crossings = queue.pop(0)
                if len(crossings) > max_crossings:
                    raise AssertionError("saddle connection search exceeded hard cap")
                cpoly = surface.polygons[cur]
                m = len(cpoly)
                dev = [cpoly.vertex(j) + offset for j in range(m)]
                # vertex targets, nearest-per-direction only
                targets = []
                for j in range(m):
                    w = dev[j]
                    if w.is_zero():
                        continue
                    if not _cone_contains(wl, wr, incl, w):
                        continue
                    if real_sign(dot_value(w, w) - bound_sq) > 0:
                        continue
                    targets.append((j, w))
                kept = []
                for j, w in targets:
                    shadowed = False
                    for j2, w2 in targets:
                        if j2 == j:
                            continue
                        if same_direction(w, w2) and real_sign(
                                dot_value(w2, w2) - dot_value(w, w)) < 0:
                            shadowed = True
                            break
                    if not shadowed:
                        kept.append((j, w))
                for j, w in kept:
                    found.append(SaddleConnection(
                        start=start_class,
                        end=surface.corner_class(cur, j),
                        holonomy=w,
                        crossings=crossings,
                        start_corner=(pid, i)))
                # expand through every other edge
                for j in range(m):
                    if entry is not None and j == entry:
                        continue
                    a, b = dev[j], dev[(j + 1) % m]
                    if real_sign(_segment_min_dist_sq(a, b) - bound_sq) > 0:
                        continue
                    cs = cross_sign(a, b)
                    if cs == 0:
                        continue  # seen edge-on; blocked by its endpoints
                    first, second = (a, b) if cs > 0 else (b, a)
                    # intersect open cone (first, second) with [wl, wr, incl)
                    nl, nr, nincl = wl, wr, incl
                    if same_direction(first, wl):
                        nincl = False
                    elif _cone_contains(wl, wr, True, first):
                        nl, nincl = first, False
                    if _cone_contains(nl, wr, False, second) or same_direction(second, nl):
                        nr = second
                    if same_direction(nl, nr) or cross_sign(nl, nr) <= 0:
                        continue
                    if not (_cone_within(wl, wr, nl) and _cone_within(wl, wr, nr)):
                        continue
                    if not (_cone_within(first, second, nl)
                            and _cone_within(first, second, nr)):
                        continue
                    ref = EdgeRef(cur, j)
                    partner = surface.gluing.partner(ref)
                    queue.append((
                        partner.polygon,
                        offset - surface.gluing_translation(ref),
                        partner.index,
                        nl, nr, nincl,
                        crossings + ((cur, j),),
                    ))
    found.sort(key=SaddleConnection.sort_key)
    return found


# -- moduli ------------------------------------------------------------------------


@dataclass
class CommensurateModuli:
    mu: CycNum
    multipliers: list[int]


def commensurate_moduli(cylinders: list[Cylinder]) -> CommensurateModuli:
    """Least common integer multiple structure of the cylinder moduli.

    Raises :class:`Incommensurable` with the offending ratio when some
    modulus ratio is irrational.
    """
    if not cylinders:
        raise ValueError("need at least one cylinder")
    base = cylinders[0].modulus
    ratios = []
    for cyl in cylinders:
        r = cyl.modulus / base
        if not r.is_rational():
            raise Incommensurable(r)
        ratios.append(r.rational_value())
    num_lcm = 1
    for r in ratios:
        num_lcm = num_lcm * r.numerator // gcd(num_lcm, r.numerator)
    den_gcd = ratios[0].denominator
    for r in ratios[1:]:
        den_gcd = gcd(den_gcd, r.denominator)
    big = Fraction(num_lcm, den_gcd)
    multipliers = [int(big / r) for r in ratios]
    mu = base * big
    return CommensurateModuli(mu=mu, multipliers=multipliers)

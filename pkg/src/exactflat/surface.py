r"""Translation surfaces as glued Euclidean polygons over a cyclotomic field.

A surface is a finite list of labelled, strictly convex, counter-clockwise
polygons with vertices in Q(zeta_N), together with a fixed-point-free
involution on edges pairing parallel edges of equal length and opposite
orientation (so each pair is matched by a unique translation).  Validation
checks all of this exactly and computes the corner-walk structure: vertex
classes, cone multiplicities, genus and area.

Surfaces are immutable after validation; derived data is cached on the
instance at validation time.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import (
    BadParameter,
    Disconnected,
    InvalidSurface,
    IrrationalPolygon,
    NonPositiveDeterminant,
)
from .numfield import CycNum, join_orders, real_sign


@dataclass(frozen=True, order=True)
class EdgeRef:
    polygon: str
    index: int

    def to_json(self):
        return [self.polygon, self.index]


# -- planar helpers (points are CycNum, the plane is C = R^2) -----------------


def cross_value(a: CycNum, b: CycNum) -> CycNum:
    """The exact real number Im(conj(a) * b) = a_x b_y - a_y b_x."""
    return (a.conj() * b).imag_part()


def cross_sign(a: CycNum, b: CycNum) -> int:
    return real_sign(cross_value(a, b))


def dot_value(a: CycNum, b: CycNum) -> CycNum:
    return (a.conj() * b).real_part()


def dot_sign(a: CycNum, b: CycNum) -> int:
    return real_sign(dot_value(a, b))


def same_direction(a: CycNum, b: CycNum) -> bool:
    """Nonzero vectors pointing the same way (positive multiples)."""
    return cross_sign(a, b) == 0 and dot_sign(a, b) > 0


class Polygon:
    """A labelled polygon: cyclically ordered vertices, length >= 3."""

    __slots__ = ("id", "vertices")

    def __init__(self, pid: str, vertices):
        self.id = pid
        self.vertices = tuple(vertices)
        if len(self.vertices) < 3:
            raise BadParameter(f"polygon {pid!r} needs >= 3 vertices")

    def __len__(self):
        return len(self.vertices)

    def vertex(self, i: int) -> CycNum:
        return self.vertices[i % len(self.vertices)]

    def edge_vector(self, i: int) -> CycNum:
        n = len(self.vertices)
        return self.vertices[(i + 1) % n] - self.vertices[i % n]

    def check_convex_ccw(self):
        """Strict convexity and ccw orientation; raises on failure."""
        n = len(self.vertices)
        for i in range(n):
            e0 = self.edge_vector(i)
            e1 = self.edge_vector(i + 1)
            if e0.is_zero():
                raise InvalidSurface([f"polygon {self.id}: zero-length edge {i}"])
            if cross_sign(e0, e1) <= 0:
                raise InvalidSurface(
                    [f"polygon {self.id}: non-convex or clockwise corner at vertex {(i + 1) % n}"])

    def area(self) -> CycNum:
        """Exact area by the shoelace formula (positive for ccw polygons)."""
        n = len(self.vertices)
        total = CycNum.rational(0, 4)
        for i in range(n):
            total = total + cross_value(self.vertices[i], self.vertices[(i + 1) % n])
        return total * Fraction(1, 2)

    def to_json(self):
        return {"id": self.id, "vertices": [v.to_json() for v in self.vertices]}

    @classmethod
    def from_json(cls, data):
        return cls(data["id"], [CycNum.from_json(v) for v in data["vertices"]])


class Gluing:
    """A fixed-point-free involution on the set of all EdgeRefs."""

    def __init__(self, pairs):
        self.pairs: dict[EdgeRef, EdgeRef] = {}
        for a, b in pairs:
            if a == b:
                raise InvalidSurface([f"gluing fixes edge {a}"])
            for x in (a, b):
                if x in self.pairs:
                    raise InvalidSurface([f"edge {x} glued twice"])
            self.pairs[a] = b
            self.pairs[b] = a

    def partner(self, ref: EdgeRef) -> EdgeRef:
        return self.pairs[ref]

    def __iter__(self):
        seen = set()
        for a, b in sorted(self.pairs.items()):
            if a not in seen:
                seen.add(a)
                seen.add(b)
                yield (a, b)

    def to_json(self):
        return [[a.to_json(), b.to_json()] for a, b in self]


@dataclass(frozen=True)
class ConeClass:
    """One vertex class of the glued surface: its corner cycle and multiplicity."""

    id: int
    corners: tuple[tuple[str, int], ...]  # (polygon id, vertex index) in walk order
    multiplicity: int  # total angle is 2 pi * multiplicity


@dataclass
class SurfaceInvariants:
    genus: int
    cone_points: list[tuple[int, int]]  # (vertex class id, multiplicity)
    zero_orders: list[int]
    area: CycNum
    euler_characteristic: int

    @property
    def stratum(self) -> str:
        if not self.zero_orders:
            return "H(0)" if self.genus == 1 else "H()"
        return "H(" + ",".join(str(m) for m in sorted(self.zero_orders, reverse=True)) + ")"


class TranslationSurface:
    """Polygons + translation gluing over Q(zeta_order)."""

    def __init__(self, order: int, polygons, gluing: Gluing):
        self.order = order
        self.polygons: dict[str, Polygon] = {}
        for p in polygons:
            if p.id in self.polygons:
                raise InvalidSurface([f"duplicate polygon id {p.id!r}"])
            self.polygons[p.id] = p
        self.gluing = gluing
        self._cone_classes: list[ConeClass] | None = None
        self._corner_to_class: dict[tuple[str, int], int] | None = None

    # -- basic access --------------------------------------------------------

    def polygon(self, pid: str) -> Polygon:
        return self.polygons[pid]

    def edge_vector(self, ref: EdgeRef) -> CycNum:
        return self.polygons[ref.polygon].edge_vector(ref.index)

    def edge_endpoints(self, ref: EdgeRef) -> tuple[CycNum, CycNum]:
        p = self.polygons[ref.polygon]
        return p.vertex(ref.index), p.vertex(ref.index + 1)

    def all_edge_refs(self):
        for pid in sorted(self.polygons):
            for i in range(len(self.polygons[pid])):
                yield EdgeRef(pid, i)

    def gluing_translation(self, ref: EdgeRef) -> CycNum:
        """The translation carrying edge ``ref`` onto its partner (reversed)."""
        partner = self.gluing.partner(ref)
        a, b = self.edge_endpoints(ref)
        pa, _pb = self.edge_endpoints(partner)
        # b maps onto the partner's start vertex, a onto its end vertex
        return pa - b

    # -- validation -----------------------------------------------------------

    def validate(self) -> list[str]:
        """All structural invariants, exactly. Returns a list of defects."""
        defects: list[str] = []
        for p in self.polygons.values():
            try:
                p.check_convex_ccw()
            except InvalidSurface as err:
                defects.extend(err.defects)
        refs = list(self.all_edge_refs())
        for ref in refs:
            if ref not in self.gluing.pairs:
                defects.append(f"unglued edge {ref}")
        for ref, partner in self.gluing.pairs.items():
            if ref.polygon not in self.polygons or not (
                    0 <= ref.index < len(self.polygons[ref.polygon])):
                defects.append(f"gluing references missing edge {ref}")
                continue
        if defects:
            return defects
        for ref, partner in self.gluing.pairs.items():
            v1 = self.edge_vector(ref)
            v2 = self.edge_vector(partner)
            if not (v1 + v2).is_zero():
                defects.append(f"GluingMismatch({ref}, {partner})")
        if defects:
            return defects
        # connectivity of the polygon adjacency graph
        pids = sorted(self.polygons)
        seen = {pids[0]}
        stack = [pids[0]]
        while stack:
            pid = stack.pop()
            for i in range(len(self.polygons[pid])):
                q = self.gluing.partner(EdgeRef(pid, i)).polygon
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
        if len(seen) != len(self.polygons):
            defects.append("Disconnected")
            return defects
        try:
            self._walk_corners()
        except InvalidSurface as err:
            defects.extend(err.defects)
        return defects

    def ensure_valid(self):
        defects = self.validate()
        if defects:
            raise InvalidSurface(defects)
        return self

    def next_corner(self, pid: str, i: int) -> tuple[str, int]:
        """The next corner counterclockwise around the same surface vertex."""
        n = len(self.polygons[pid])
        partner = self.gluing.partner(EdgeRef(pid, (i - 1) % n))
        return (partner.polygon, partner.index)

    def _walk_corners(self):
        if self._cone_classes is not None:
            return
        classes: list[ConeClass] = []
        corner_to_class: dict[tuple[str, int], int] = {}
        for pid in sorted(self.polygons):
            for i in range(len(self.polygons[pid])):
                if (pid, i) in corner_to_class:
                    continue
                cycle = []
                c = (pid, i)
                while c not in corner_to_class:
                    corner_to_class[c] = len(classes)
                    cycle.append(c)
                    c = self.next_corner(*c)
                if c != (pid, i):
                    raise InvalidSurface([f"corner walk from {(pid, i)} is not closed"])
                mult = self._turning_number(cycle)
                if mult < 1:
                    raise InvalidSurface([f"BadConeAngle(class through {(pid, i)})"])
                classes.append(ConeClass(len(classes), tuple(cycle), mult))
        self._cone_classes = classes
        self._corner_to_class = corner_to_class

    def _turning_number(self, cycle) -> int:
        """Total angle of a corner cycle divided by 2 pi, counted exactly.

        Each corner sweeps ccw from its outgoing edge direction A to the
        reversed incoming direction B, an angle in (0, pi).  Consecutive
        sweeps share endpoints, so counting half-open hits of the reference
        direction (1, 0) gives the integer number of full turns.
        """
        ref = CycNum.rational(1, 4)
        hits = 0
        for pid, i in cycle:
            p = self.polygons[pid]
            a = p.edge_vector(i)
            b = p.vertex(i - 1) - p.vertex(i)
            if same_direction(a, ref):
                hits += 1
            elif cross_sign(a, ref) > 0 and cross_sign(ref, b) > 0:
                hits += 1
        return hits

    @property
    def cone_classes(self) -> list[ConeClass]:
        self._walk_corners()
        return self._cone_classes

    def corner_class(self, pid: str, i: int) -> int:
        self._walk_corners()
        return self._corner_to_class[(pid, i % len(self.polygons[pid]))]

    # -- invariants ------------------------------------------------------------

    def area(self) -> CycNum:
        total = CycNum.rational(0, 4)
        for pid in sorted(self.polygons):
            total = total + self.polygons[pid].area()
        return total

    def invariants(self) -> SurfaceInvariants:
        self.ensure_valid()
        v = len(self.cone_classes)
        e = sum(len(p) for p in self.polygons.values()) // 2
        f = len(self.polygons)
        chi = v - e + f
        genus = (2 - chi) // 2
        cone_points = [(c.id, c.multiplicity) for c in self.cone_classes]
        zero_orders = sorted(
            (c.multiplicity - 1 for c in self.cone_classes if c.multiplicity > 1),
            reverse=True)
        return SurfaceInvariants(
            genus=genus,
            cone_points=cone_points,
            zero_orders=zero_orders,
            area=self.area(),
            euler_characteristic=chi,
        )

    # -- serialization -----------------------------------------------------------

    def to_json(self):
        return {
            "order": self.order,
            "polygons": [self.polygons[pid].to_json() for pid in sorted(self.polygons)],
            "gluing": self.gluing.to_json(),
        }

    @classmethod
    def from_json(cls, data):
        polys = [Polygon.from_json(p) for p in data["polygons"]]
        pairs = [(EdgeRef(a[0], a[1]), EdgeRef(b[0], b[1])) for a, b in data["gluing"]]
        return cls(int(data["order"]), polys, Gluing(pairs))


# -- 2x2 matrices over real cyclotomics ---------------------------------------


class Mat2:
    """A 2x2 matrix with exact real cyclotomic entries."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        conv = lambda x: x if isinstance(x, CycNum) else CycNum.rational(x)
        self.a, self.b, self.c, self.d = conv(a), conv(b), conv(c), conv(d)

    @classmethod
    def identity(cls) -> Mat2:
        return cls(1, 0, 0, 1)

    @classmethod
    def diagonal(cls, x, y) -> Mat2:
        return cls(x, 0, 0, y)

    @classmethod
    def rotation(cls, p: int, q: int) -> Mat2:
        """Counterclockwise rotation by the angle 2 pi p / q, exact."""
        from .numfield import cos2pi, sin2pi
        c, s = cos2pi(p, q), sin2pi(p, q)
        return cls(c, -s, s, c)

    def det(self) -> CycNum:
        return self.a * self.d - self.b * self.c

    def trace(self) -> CycNum:
        return self.a + self.d

    def __mul__(self, other: Mat2) -> Mat2:
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> Mat2:
        det = self.det()
        inv = det.inverse()
        return Mat2(self.d * inv, -self.b * inv, -self.c * inv, self.a * inv)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat2):
            return NotImplemented
        return (self.a == other.a and self.b == other.b
                and self.c == other.c and self.d == other.d)

    def __repr__(self):
        return f"Mat2({self.a!r}, {self.b!r}, {self.c!r}, {self.d!r})"

    def apply(self, z: CycNum) -> CycNum:
        """A acting R-linearly on C: x + iy -> (ax + by) + i(cx + dy)."""
        x = z.real_part()
        y = z.imag_part()
        m = join_orders(x.order, y.order, self.a.order, self.b.order,
                        self.c.order, self.d.order, 4)
        i_unit = CycNum.zeta(m, m // 4)
        return (self.a * x + self.b * y) + i_unit * (self.c * x + self.d * y)

    def to_floats(self):
        return [[self.a.to_float().real, self.b.to_float().real],
                [self.c.to_float().real, self.d.to_float().real]]

    def to_json(self):
        return {"a": self.a.to_json(), "b": self.b.to_json(),
                "c": self.c.to_json(), "d": self.d.to_json(),
                "floats": self.to_floats()}


# -- builders -------------------------------------------------------------------


def build_origami(h: list[int], v: list[int]) -> TranslationSurface:
    """Square-tiled surface from permutations of {1..d} (1-based lists).

    Square i has its right edge glued to the left edge of square h(i) and its
    top edge glued to the bottom edge of square v(i).
    """
    d = len(h)
    if sorted(h) != list(range(1, d + 1)) or sorted(v) != list(range(1, d + 1)):
        raise BadParameter("h and v must be permutations of 1..d")
    # transitivity = connectedness
    seen = {1}
    stack = [1]
    hinv = {h[i - 1]: i for i in range(1, d + 1)}
    vinv = {v[i - 1]: i for i in range(1, d + 1)}
    while stack:
        i = stack.pop()
        for j in (h[i - 1], v[i - 1], hinv[i], vinv[i]):
            if j not in seen:
                seen.add(j)
                stack.append(j)
    if len(seen) != d:
        raise Disconnected("origami permutations do not act transitively")
    corners = [CycNum.from_xy(0, 0), CycNum.from_xy(1, 0),
               CycNum.from_xy(1, 1), CycNum.from_xy(0, 1)]
    polys = [Polygon(f"S{i}", corners) for i in range(1, d + 1)]
    pairs = []
    for i in range(1, d + 1):
        pairs.append((EdgeRef(f"S{i}", 1), EdgeRef(f"S{h[i - 1]}", 3)))
        pairs.append((EdgeRef(f"S{i}", 2), EdgeRef(f"S{v[i - 1]}", 0)))
    return TranslationSurface(4, polys, Gluing(pairs)).ensure_valid()


def build_2ngon(n: int) -> TranslationSurface:
    """Regular 2n-gon with opposite sides identified, vertices the 2n-th
    roots of unity; the flat model of (W_g, omega_g) for n = 2g + 1."""
    if n < 3 or n % 2 == 0:
        raise BadParameter("need odd n >= 3")
    m = 2 * n
    verts = [CycNum.zeta(m, j) for j in range(m)]
    poly = Polygon("P", verts)
    pairs = [(EdgeRef("P", i), EdgeRef("P", i + n)) for i in range(n)]
    return TranslationSurface(m, [poly], Gluing(pairs)).ensure_valid()


def build_double_ngon(n: int) -> TranslationSurface:
    """A regular n-gon and its point mirror image glued along parallel sides;
    the flat model of (W_g, omega_1) for n = 2g + 1."""
    if n < 5 or n % 2 == 0:
        raise BadParameter("need odd n >= 5")
    plus = Polygon("A", [CycNum.zeta(n, j) for j in range(n)])
    minus = Polygon("B", [-CycNum.zeta(n, j) for j in range(n)])
    pairs = [(EdgeRef("A", i), EdgeRef("B", i)) for i in range(n)]
    return TranslationSurface(n, [plus, minus], Gluing(pairs)).ensure_valid()


def build_wiman(g: int, k: int) -> TranslationSurface:
    """The triangle model X(g, k): 2n isosceles triangles T_{m,eps} with
    vertices (0, eps z^{k(2m-1)}, eps z^{k(2m+1)}) for z = zeta_{2n}, n = 2g+1.

    Gluing: the spoke 0 -> eps z^{k(2m+1)} joins T_{m,eps} to T_{m+1,eps};
    the outer side of T_{m,+} is translated onto the outer side of T_{m,-}.
    """
    if g < 2 or not (1 <= k <= g):
        raise BadParameter("need g >= 2 and 1 <= k <= g")
    n = 2 * g + 1
    m2 = 2 * n
    zero = CycNum.rational(0, m2)

    def tri(m: int, eps: int) -> Polygon:
        sign = 1 if eps > 0 else -1
        v1 = CycNum.zeta(m2, (k * (2 * m - 1)) % m2) * sign
        v2 = CycNum.zeta(m2, (k * (2 * m + 1)) % m2) * sign
        tag = "p" if eps > 0 else "m"
        return Polygon(f"T{tag}{m}", [zero, v1, v2])

    polys = [tri(m, +1) for m in range(n)] + [tri(m, -1) for m in range(n)]
    pairs = []
    for m in range(n):
        nxt = (m + 1) % n
        pairs.append((EdgeRef(f"Tp{m}", 2), EdgeRef(f"Tp{nxt}", 0)))
        pairs.append((EdgeRef(f"Tm{m}", 2), EdgeRef(f"Tm{nxt}", 0)))
        pairs.append((EdgeRef(f"Tp{m}", 1), EdgeRef(f"Tm{m}", 1)))
    return TranslationSurface(m2, polys, Gluing(pairs)).ensure_valid()


def build_billiard(polygon: Polygon, order: int | None = None) -> TranslationSurface:
    """Unfold a rational billiard table into a closed translation surface.

    One polygon copy per element of the group G_P generated by the linear
    parts of the side reflections; side e of copy tau is glued to side e of
    copy (sigma_e tau).  Copies with reversing linear part store the mirrored
    (hence ccw) vertex list.
    """
    verts = list(polygon.vertices)
    order = order or join_orders(*[v.order for v in verts])
    polygon.check_convex_ccw()
    nv = len(verts)
    edge_rots = []
    for i in range(nv):
        u = verts[(i + 1) % nv] - verts[i]
        edge_rots.append(u / u.conj())  # sigma_e as z -> rho * conj(z)

    # elements of G_P as (rho, flip); composition on the left
    def compose(g1, g2):
        r1, f1 = g1
        r2, f2 = g2
        if f1:
            return (r1 * r2.conj(), not f2)
        return (r1 * r2, f2)

    identity = (CycNum.rational(1, order), False)
    elements = [identity]
    frontier = [identity]
    cap = 2 * order
    while frontier:
        new_frontier = []
        for g in frontier:
            for rho in edge_rots:
                h = compose((rho, True), g)
                if not any(h[1] == e[1] and h[0] == e[0] for e in elements):
                    elements.append(h)
                    new_frontier.append(h)
                    if len(elements) > cap:
                        raise IrrationalPolygon(
                            f"reflection group exceeded {cap} elements")
        frontier = new_frontier

    def apply(g, z: CycNum) -> CycNum:
        rho, flip = g
        return rho * (z.conj() if flip else z)

    def label(idx: int) -> str:
        return f"C{idx}"

    polys = []
    index_of = {}
    for idx, g in enumerate(elements):
        imgs = [apply(g, v) for v in verts]
        if g[1]:
            imgs = imgs[::-1]  # restore ccw orientation for reflected copies
        polys.append(Polygon(label(idx), imgs))
        index_of[idx] = g

    def find_element(target) -> int:
        for idx, e in enumerate(elements):
            if e[1] == target[1] and e[0] == target[0]:
                return idx
        raise AssertionError("group closure violated")

    # side s of copy tau: original side index depends on orientation flip
    def edge_of_original_side(g, s: int) -> int:
        # with flipped (reversed) vertex list, original side s=(v_s,v_{s+1})
        # becomes edge (nv-2-s) of the reversed list, traversed backwards
        return s if not g[1] else (nv - 2 - s) % nv

    pairs = []
    seen = set()
    for idx, g in enumerate(elements):
        for s in range(nv):
            e_idx = edge_of_original_side(g, s)
            ref = EdgeRef(label(idx), e_idx)
            if ref in seen:
                continue
            # geometric edge vector of this side in copy idx
            u = polys[idx].edge_vector(e_idx)
            sigma = (u / u.conj(), True)
            tau2 = compose(sigma, g)
            jdx = find_element(tau2)
            ref2 = EdgeRef(label(jdx), edge_of_original_side(tau2, s))
            pairs.append((ref, ref2))
            seen.add(ref)
            seen.add(ref2)
    return TranslationSurface(join_orders(order, 4), polys, Gluing(pairs)).ensure_valid()


# -- the GL2+ distortion action ---------------------------------------------------


def act(surface: TranslationSurface, matrix: Mat2) -> TranslationSurface:
    """Distort every chart by the positive-determinant matrix; combinatorics
    (gluing, genus, zero orders) are untouched, area scales by det."""
    if real_sign(matrix.det()) <= 0:
        raise NonPositiveDeterminant("act requires det > 0")
    new_polys = []
    target = surface.order
    for pid in sorted(surface.polygons):
        p = surface.polygons[pid]
        imgs = [matrix.apply(v).compress() for v in p.vertices]
        target = join_orders(target, *[z.order for z in imgs])
        new_polys.append(Polygon(pid, imgs))
    lifted = [Polygon(p.id, [z.lift(target) for z in p.vertices]) for p in new_polys]
    out = TranslationSurface(target, lifted, surface.gluing)
    return out.ensure_valid()


def act_numeric(surface: TranslationSurface, matrix) -> dict:
    """Double-precision distortion for rendering/probing only.

    Returns plain float polygon data, flagged inexact; exact operations
    refuse this representation by construction (it is not a surface).
    """
    (a, b), (c, d) = matrix
    out = {"inexact": True, "polygons": {}}
    for pid in sorted(surface.polygons):
        pts = []
        for v in surface.polygons[pid].vertices:
            z = v.to_float()
            pts.append((a * z.real + b * z.imag, c * z.real + d * z.imag))
        out["polygons"][pid] = pts
    return out


def surfaces_equal_up_to_translation(
        s1: TranslationSurface, s2: TranslationSurface,
        polygon_map: dict[str, str], offsets: dict[str, CycNum]) -> bool:
    """Exact check: polygon_map + per-polygon translation matches s1 onto s2
    (vertex sequences up to cyclic rotation), compatibly with the gluings."""
    rotations: dict[str, int] = {}
    for pid, qid in polygon_map.items():
        p, q = s1.polygons[pid], s2.polygons[qid]
        if len(p) != len(q):
            return False
        n = len(p)
        offset = offsets[pid]
        rot = None
        for r in range(n):
            if all((p.vertex(i) + offset) == q.vertex(i + r) for i in range(n)):
                rot = r
                break
        if rot is None:
            return False
        rotations[pid] = rot
    for ref, partner in s1.gluing.pairs.items():
        img = EdgeRef(polygon_map[ref.polygon],
                      (ref.index + rotations[ref.polygon]) % len(s1.polygons[ref.polygon]))
        img_partner = EdgeRef(polygon_map[partner.polygon],
                              (partner.index + rotations[partner.polygon])
                              % len(s1.polygons[partner.polygon]))
        if s2.gluing.partner(img) != img_partner:
            return False
    return True

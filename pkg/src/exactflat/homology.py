r"""Cellular homology of a translation surface.

The CW model has one face per polygon, one edge per glued pair (oriented by
its lexicographically smaller occurrence) and one vertex per cone class.
The intersection pairing is computed combinatorially: contract a spanning
tree of the dual graph to merge all faces into a single boundary word, then
contract a vertex spanning tree inside the word; on the resulting one-vertex
one-face word the pairing of the surviving edge loops is the classical
chord-linking form, which is then reduced to the standard symplectic shape
over the integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import GenusZero, NotAnAutomorphism
from .numfield import CycNum, cyclotomic_polynomial, euler_phi
from .surface import EdgeRef, TranslationSurface, cross_sign


@dataclass(frozen=True)
class GluedEdge:
    rep: EdgeRef   # orientation-defining occurrence (lex smaller)
    other: EdgeRef


class CellComplex:
    def __init__(self, surface: TranslationSurface):
        surface.ensure_valid()
        self.surface = surface
        self.edges: list[GluedEdge] = []
        self.occurrence: dict[EdgeRef, tuple[int, int]] = {}
        for a, b in surface.gluing:
            idx = len(self.edges)
            self.edges.append(GluedEdge(a, b))
            self.occurrence[a] = (idx, +1)
            self.occurrence[b] = (idx, -1)
        self.faces = sorted(surface.polygons)
        self.n_vertices = len(surface.cone_classes)
        self.n_edges = len(self.edges)
        self.n_faces = len(self.faces)

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    def genus(self) -> int:
        return (2 - self.euler_characteristic()) // 2

    def edge_holonomy(self, idx: int) -> CycNum:
        return self.surface.edge_vector(self.edges[idx].rep)

    def edge_ends(self, idx: int) -> tuple[int, int]:
        """(start class, end class) of the oriented edge."""
        ref = self.edges[idx].rep
        s = self.surface.corner_class(ref.polygon, ref.index)
        e = self.surface.corner_class(ref.polygon, ref.index + 1)
        return s, e

    def boundary_2(self) -> list[list[int]]:
        """One column per face; rows indexed by edges."""
        cols = []
        for pid in self.faces:
            col = [0] * self.n_edges
            for i in range(len(self.surface.polygons[pid])):
                idx, sign = self.occurrence[EdgeRef(pid, i)]
                col[idx] += sign
            cols.append(col)
        return cols

    def boundary_1(self) -> list[list[int]]:
        """One column per edge; rows indexed by vertex classes."""
        cols = []
        for idx in range(self.n_edges):
            col = [0] * self.n_vertices
            s, e = self.edge_ends(idx)
            col[e] += 1
            col[s] -= 1
            cols.append(col)
        return cols


def build_complex(surface: TranslationSurface) -> CellComplex:
    return CellComplex(surface)


# -- surface word and linking form --------------------------------------------------


def _dual_tree(complex_: CellComplex):
    """BFS spanning tree of the face-adjacency graph.

    Returns [(edge index, child face)] in BFS order: each non-root face is
    entered through exactly one tree edge, so the dual-tree coordinates of
    the face-boundary matrix are triangular with unit pivots.
    """
    by_face: dict[str, list[int]] = {pid: [] for pid in complex_.faces}
    for idx, ge in enumerate(complex_.edges):
        by_face[ge.rep.polygon].append(idx)
        by_face[ge.other.polygon].append(idx)
    root = complex_.faces[0]
    seen = {root}
    order = []
    queue = [root]
    while queue:
        pid = queue.pop(0)
        for idx in by_face[pid]:
            ge = complex_.edges[idx]
            other_face = ge.other.polygon if ge.rep.polygon == pid else ge.rep.polygon
            if other_face not in seen:
                seen.add(other_face)
                order.append((idx, other_face))
                queue.append(other_face)
    assert len(seen) == len(complex_.faces), "dual graph disconnected"
    return order


def _vertex_tree(complex_: CellComplex, excluded: set[int]):
    """BFS spanning tree of the vertex-class graph avoiding ``excluded``
    edges (the dual-tree ones); always possible for a closed surface."""
    adj: dict[int, list[int]] = {}
    for idx in range(complex_.n_edges):
        if idx in excluded:
            continue
        s, e = complex_.edge_ends(idx)
        adj.setdefault(s, []).append(idx)
        adj.setdefault(e, []).append(idx)
    seen = {0}
    tree = []
    queue = [0]
    while queue:
        v = queue.pop(0)
        for idx in sorted(adj.get(v, [])):
            s, e = complex_.edge_ends(idx)
            w = e if s == v else s
            if w not in seen:
                seen.add(w)
                tree.append(idx)
                queue.append(w)
    assert len(seen) == complex_.n_vertices, "vertex graph disconnected off the dual tree"
    return tree


def intersection_cycles(complex_: CellComplex, z, w) -> int:
    """Algebraic intersection number of two cycles, via the rotation system.

    At every vertex class the darts (edge germs) appear in counterclockwise
    corner-walk order; with the signed flows f(d) of each cycle through the
    darts, the local contribution is half the shift-invariant double sum
    sum_{i<j} (f_z(i) f_w(j) - f_w(i) f_z(j)).
    """
    surface = complex_.surface
    total2 = 0
    for cls in surface.cone_classes:
        fz, fw = [], []
        for (pid, i) in cls.corners:
            n = len(surface.polygons[pid])
            occ = EdgeRef(pid, (i - 1) % n)
            idx, sign = complex_.occurrence[occ]
            fz.append(-sign * z[idx])
            fw.append(-sign * w[idx])
        pre_z = pre_w = 0
        local = 0
        for a, b in zip(fz, fw):
            local += pre_z * b - pre_w * a
            pre_z += a
            pre_w += b
        total2 += local
    assert total2 % 2 == 0, "odd crossing sum in the intersection pairing"
    return total2 // 2


# -- symplectic basis -----------------------------------------------------------------


@dataclass
class SymplecticBasis:
    complex: CellComplex
    cycles: list[list[int]]           # 2g integer vectors over edges
    loops: list[int]                  # free edge indices (coordinate support)
    dual_order: list                  # [(edge idx, child face)] of the dual tree
    change: list[list[int]]           # columns: symplectic basis in loop coords
    genus: int

    def normalize(self, cycle: list[int]) -> list[int]:
        """Subtract face boundaries to clear the dual-tree edge coordinates
        (a homology-preserving rewrite; leaf faces of the dual tree first)."""
        vec = list(cycle)
        d2 = {pid: col for pid, col in zip(self.complex.faces,
                                           self.complex.boundary_2())}
        # forward BFS order: clearing an edge via its child face can only
        # touch strictly deeper dual-tree edges, which are cleared later
        for idx, face in self.dual_order:
            c = vec[idx]
            if not c:
                continue
            col = d2[face]
            assert col[idx] in (1, -1), "dual tree pivot is not unimodular"
            f = c * col[idx]
            for e, x in enumerate(col):
                if x:
                    vec[e] -= f * x
        assert all(vec[idx] == 0 for idx, _ in self.dual_order)
        return vec

    def reduced(self, cycle: list[int]) -> list[int]:
        vec = self.normalize(cycle)
        return [vec[i] for i in self.loops]

    def coordinates(self, cycle: list[int]) -> list[int]:
        """Coordinates of a cycle's homology class in the symplectic basis."""
        target = self.reduced(cycle)
        sol = _solve_int(self.change, target)
        if sol is None:
            raise ValueError("vector is not an integer combination of the basis")
        return sol

    def standard_j(self) -> list[list[int]]:
        g = self.genus
        J = [[0] * (2 * g) for _ in range(2 * g)]
        for i in range(g):
            J[i][g + i] = 1
            J[g + i][i] = -1
        return J

    def intersection(self, c1: list[int], c2: list[int]) -> int:
        return intersection_cycles(self.complex, c1, c2)


def homology_basis(complex_: CellComplex) -> SymplecticBasis:
    """An integral symplectic basis of H_1, with intersection matrix exactly
    the standard J = (0 I; -I 0)."""
    g = complex_.genus()
    if g < 1:
        raise GenusZero("no symplectic basis in genus zero")
    dual = _dual_tree(complex_)
    dual_edges = {idx for idx, _ in dual}
    tree_edges = _vertex_tree(complex_, dual_edges)
    loops = sorted(set(range(complex_.n_edges)) - dual_edges - set(tree_edges))
    assert len(loops) == 2 * g
    # basis cycles on the original complex: loop edge + tree path closing it
    loop_cycles = []
    for idx in loops:
        vec = [0] * complex_.n_edges
        vec[idx] = 1
        s, e = complex_.edge_ends(idx)
        for t_idx, sign in _tree_path(complex_, tree_edges, e, s):
            vec[t_idx] += sign
        loop_cycles.append(vec)
    L = [[intersection_cycles(complex_, a, b) for b in loop_cycles]
         for a in loop_cycles]
    change = _symplectic_reduction(L)
    cycles = []
    k = 2 * g
    for col in range(k):
        vec = [0] * complex_.n_edges
        for row in range(k):
            c = change[row][col]
            if c:
                for i, x in enumerate(loop_cycles[row]):
                    vec[i] += c * x
        cycles.append(vec)
    basis = SymplecticBasis(complex=complex_, cycles=cycles, loops=loops,
                            dual_order=dual, change=change, genus=g)
    # exact verification: boundary-free, standard pairing, boundaries pair to zero
    d1 = complex_.boundary_1()
    for vec in cycles:
        bnd = [0] * complex_.n_vertices
        for i, x in enumerate(vec):
            if x:
                for v in range(complex_.n_vertices):
                    bnd[v] += x * d1[i][v]
        assert all(b == 0 for b in bnd), "basis cycle has boundary"
    J = basis.standard_j()
    for i in range(k):
        for j in range(k):
            assert basis.intersection(cycles[i], cycles[j]) == J[i][j], \
                "symplectic reduction failed"
    for col in complex_.boundary_2():
        for vec in cycles:
            assert intersection_cycles(complex_, col, vec) == 0, \
                "face boundary pairs nontrivially"
    return basis


def _tree_path(complex_: CellComplex, tree_edges: list[int], frm: int, to: int):
    """Signed tree edges of the path frm -> to in the vertex tree."""
    if frm == to:
        return []
    adj: dict[int, list[tuple[int, int, int]]] = {}
    for idx in tree_edges:
        s, e = complex_.edge_ends(idx)
        adj.setdefault(s, []).append((e, idx, +1))
        adj.setdefault(e, []).append((s, idx, -1))
    prev = {frm: None}
    queue = [frm]
    while queue:
        v = queue.pop(0)
        if v == to:
            break
        for (w, idx, sign) in adj.get(v, []):
            if w not in prev:
                prev[w] = (v, idx, sign)
                queue.append(w)
    path = []
    v = to
    while prev[v] is not None:
        u, idx, sign = prev[v]
        path.append((idx, sign))
        v = u
    return list(reversed(path))


def _xgcd(a: int, b: int):
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _xgcd(b, a % b)
    return (g, y, x - (a // b) * y)


def _symplectic_reduction(L):
    """Integer basis change S (columns) with S^T L S = (0 I; -I 0)."""
    n = len(L)
    basis = [[1 if i == j else 0 for j in range(n)] for i in range(n)]  # columns

    def form(u, v):
        total = 0
        for i, x in enumerate(u):
            if x:
                for j, y in enumerate(v):
                    if y:
                        total += x * L[i][j] * y
        return total

    a_vecs, b_vecs = [], []
    pool = [basis[i] for i in range(n)]
    while pool:
        u = pool[0]
        # accumulate v with form(u, v) = 1 via extended gcd over the pool
        g, v = 0, None
        for w in pool[1:]:
            r = form(u, w)
            if r == 0:
                continue
            if v is None:
                g, v = abs(r), [c * (1 if r > 0 else -1) for c in w]
            else:
                gn, x, y = _xgcd(g, r)
                v = [x * cv + y * cw for cv, cw in zip(v, w)]
                g = gn
            if g == 1:
                break
        assert v is not None and g == 1, "form is degenerate (not unimodular)"
        a_vecs.append(u)
        b_vecs.append(v)
        rest = []
        for w in pool[1:]:
            if w is v:
                continue
            fbv = form(w, v)
            fbu = form(w, u)
            w2 = [cw - fbv * cu + fbu * cv for cw, cu, cv in zip(w, u, v)]
            if any(w2):
                rest.append(w2)
        # keep an independent spanning subset of the projected complement
        pool = _independent_subset(rest, len(pool) - 2)
    cols = a_vecs + b_vecs
    return [[cols[c][r] for c in range(n)] for r in range(n)]


def _independent_subset(vectors, count):
    out = []
    rows = []  # echelon over Q
    for v in vectors:
        vec = [Fraction(x) for x in v]
        for rvec, p in rows:
            if vec[p]:
                f = vec[p]
                vec = [a - f * b for a, b in zip(vec, rvec)]
        if any(vec):
            p = next(i for i, c in enumerate(vec) if c)
            inv = 1 / vec[p]
            rows.append(([c * inv for c in vec], p))
            out.append(v)
        if len(out) == count:
            break
    assert len(out) == count, "projected complement rank mismatch"
    return out


def _solve_int_matrix(M):
    """Exact inverse of a unimodular integer matrix (row-major)."""
    n = len(M)
    out_cols = []
    for j in range(n):
        target = [1 if i == j else 0 for i in range(n)]
        col = _solve_int(M, target)
        if col is None:
            raise ValueError("matrix is not invertible over Z")
        out_cols.append(col)
    return [[out_cols[j][i] for j in range(n)] for i in range(n)]


def _solve_int(cols, target):
    """Solve (columns matrix) x = target over the integers, or None."""
    n = len(target)
    k = len(cols[0]) if cols else 0
    aug = [[Fraction(cols[r][c]) for c in range(k)] + [Fraction(target[r])]
           for r in range(n)]
    pivots = []
    r = 0
    for c in range(k):
        sel = next((i for i in range(r, n) if aug[i][c]), None)
        if sel is None:
            continue
        aug[r], aug[sel] = aug[sel], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(n):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    sol = [Fraction(0)] * k
    for row, c in enumerate(pivots):
        sol[c] = aug[row][k]
    for i in range(n):
        if all(aug[i][c] == 0 for c in range(k)) and aug[i][k] != 0:
            return None
    if any(s.denominator != 1 for s in sol):
        return None
    return [int(s) for s in sol]


# -- periods -----------------------------------------------------------------------


def periods(basis: SymplecticBasis, holonomy=None) -> list[CycNum]:
    """Exact periods of the flat one-form (or of a supplied edge -> CycNum
    development) over the basis cycles."""
    complex_ = basis.complex
    hol = holonomy or complex_.edge_holonomy
    out = []
    for vec in basis.cycles:
        total = CycNum.rational(0, 4)
        for i, x in enumerate(vec):
            if x:
                total = total + x * hol(i)
        out.append(total)
    return out


def face_boundary_period_checks(complex_: CellComplex, holonomy=None) -> bool:
    """Sum of the development over every face boundary vanishes exactly."""
    hol = holonomy or complex_.edge_holonomy
    for col in complex_.boundary_2():
        total = CycNum.rational(0, 4)
        for i, x in enumerate(col):
            if x:
                total = total + x * hol(i)
        if not total.is_zero():
            return False
    return True


# -- actions on H_1 ------------------------------------------------------------------


@dataclass
class H1Action:
    matrix: list[list[int]]  # columns are images of basis vectors

    def __matmul__(self, other: H1Action) -> H1Action:
        n = len(self.matrix)
        out = [[sum(self.matrix[i][k] * other.matrix[k][j] for k in range(n))
                for j in range(n)] for i in range(n)]
        return H1Action(out)

    def is_identity(self) -> bool:
        n = len(self.matrix)
        return all(self.matrix[i][j] == (1 if i == j else 0)
                   for i in range(n) for j in range(n))

    def multiplicative_order(self, cap: int = 1000) -> int | None:
        power = self
        for k in range(1, cap + 1):
            if power.is_identity():
                return k
            power = power @ self
        return None

    def inverse(self) -> H1Action:
        n = len(self.matrix)
        inv = _solve_int_matrix(self.matrix)
        return H1Action(inv)


def _check_symplectic(M, J):
    n = len(M)
    for i in range(n):
        for j in range(n):
            total = sum(M[k][i] * sum(J[k][l] * M[l][j] for l in range(n))
                        for k in range(n))
            if total != J[i][j]:
                return False
    return True


def push_cycle(basis: SymplecticBasis, auto, cycle: list[int]) -> list[int]:
    """Image of an edge-cycle under a polygon-cellular automorphism."""
    complex_ = basis.complex
    surface = complex_.surface
    out = [0] * complex_.n_edges
    for idx, coeff in enumerate(cycle):
        if not coeff:
            continue
        image_ref = auto.edge_map(surface, complex_.edges[idx].rep)
        jdx, sign = complex_.occurrence[image_ref]
        out[jdx] += sign * coeff
    return out


def auto_action(basis: SymplecticBasis, auto) -> H1Action:
    """Matrix of a verified affine automorphism on H_1 in the given basis."""
    cols = []
    for vec in basis.cycles:
        image = push_cycle(basis, auto, vec)
        cols.append(basis.coordinates(image))
    n = len(cols)
    M = [[cols[j][i] for j in range(n)] for i in range(n)]
    if not _check_symplectic(M, basis.standard_j()):
        raise NotAnAutomorphism("homology action does not preserve the pairing")
    return H1Action(M)


def core_class(basis: SymplecticBasis, core, direction) -> list[int]:
    """Coordinates of a cylinder core curve from its crossing list, solved
    through the intersection pairing with the basis."""
    complex_ = basis.complex
    surface = complex_.surface
    pairing = []
    for vec in basis.cycles:
        total = 0
        for (pid, i) in core:
            idx, sign = complex_.occurrence[EdgeRef(pid, i)]
            if vec[idx] == 0:
                continue
            u = complex_.edge_holonomy(idx)
            s = cross_sign(direction.vec, u)
            assert s != 0, "core crosses a parallel edge"
            total += vec[idx] * s * sign
        pairing.append(total)
    J = basis.standard_j()
    n = len(J)
    # <c, basis_j> = sum_k x_k J[k][j]  =>  x = J^T-solve; J^-1 = -J
    x = [sum(J[i][k] * pairing[k] for k in range(n)) for i in range(n)]
    return x


def twist_action(basis: SymplecticBasis, twist_record, direction) -> H1Action:
    """Homology action of a multitwist given as [(core crossings, power)].

    The map is y -> y + sum_i m_i <y, c_i> c_i; with disjoint cores it is
    unipotent with (M - I)^2 = 0 and symplectic, both checked exactly.
    """
    n = 2 * basis.genus
    J = basis.standard_j()
    M = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for core, power in twist_record:
        x = core_class(basis, core, direction)
        for k in range(n):
            # <e_k, c> in basis coordinates is e_k^T J x
            coeff = sum(J[k][l] * x[l] for l in range(n))
            for i in range(n):
                M[i][k] += power * coeff * x[i]
    if not _check_symplectic(M, J):
        raise NotAnAutomorphism("twist action does not preserve the pairing")
    return H1Action(M)


# -- spectral reports ---------------------------------------------------------------


@dataclass
class SpectralReport:
    char_poly: tuple[int, ...]  # low-to-high
    palindromic: bool
    quasi_unipotent: bool
    leading: float | None
    leading_simple: bool
    leading_dominant: bool

    def to_json(self):
        return {"char_poly": list(self.char_poly),
                "palindromic": self.palindromic,
                "quasi_unipotent": self.quasi_unipotent,
                "leading": self.leading,
                "leading_simple": self.leading_simple,
                "leading_dominant": self.leading_dominant}


def char_poly(M) -> tuple[int, ...]:
    """Characteristic polynomial det(xI - M), exact, by Faddeev-LeVerrier."""
    n = len(M)
    frac = [[Fraction(M[i][j]) for j in range(n)] for i in range(n)]
    coeffs = [Fraction(1)]  # leading
    N = [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        MN = [[sum(frac[i][l] * N[l][j] for l in range(n)) for j in range(n)]
              for i in range(n)]
        tr = sum(MN[i][i] for i in range(n))
        ck = -tr / k
        coeffs.append(ck)
        N = [[MN[i][j] + (ck if i == j else 0) for j in range(n)] for i in range(n)]
    assert all(c.denominator == 1 for c in coeffs)
    # coeffs are for x^n, x^{n-1}, ...; return low-to-high
    return tuple(int(c) for c in reversed(coeffs))


def is_quasi_unipotent(poly: tuple[int, ...]) -> bool:
    """True iff every root is a root of unity (poly is a product of
    cyclotomics up to sign), decided by exact division."""
    from .numfield import _poly_divmod

    f = [Fraction(c) for c in poly]
    while len(f) > 1 and f[-1] == 0:
        f.pop()
    d = 1
    while len(f) > 1 and d <= 4 * (len(poly) ** 2):
        if euler_phi(d) <= len(f) - 1:
            cyc = [Fraction(c) for c in cyclotomic_polynomial(d)]
            q, rem = _poly_divmod(f, cyc)
            if len(rem) == 1 and rem[0] == 0:
                f = q
                while len(f) > 1 and f[-1] == 0:
                    f.pop()
                continue  # retry the same d for repeated factors
        d += 1
    return len(f) == 1 and f[0] != 0


def spectral_report(action: H1Action) -> SpectralReport:
    poly = char_poly(action.matrix)
    n = len(poly) - 1
    palindromic = all(poly[i] == poly[n - i] for i in range(n + 1))
    qu = is_quasi_unipotent(poly)
    if qu:
        # all eigenvalues on the unit circle; numeric root-finding is both
        # needless and fragile for repeated roots
        return SpectralReport(poly, palindromic, True, 1.0, False, False)
    # numeric roots with certified separation for the leading-eigenvalue flags
    mpmath.mp.dps = 40
    roots, err = mpmath.mp.polyroots([mpmath.mpf(c) for c in reversed(poly)],
                                     error=True, maxsteps=200, extraprec=120)
    moduli = sorted((abs(complex(r)) for r in roots), reverse=True)
    leading = moduli[0]
    err = float(err) + 1e-25
    simple = dominant = False
    if len(moduli) > 1:
        gap = moduli[0] - moduli[1]
        simple = dominant = gap > 4 * err
    real_leads = [complex(r) for r in roots if abs(abs(complex(r)) - leading) <= 4 * err]
    return SpectralReport(
        char_poly=poly,
        palindromic=palindromic,
        quasi_unipotent=qu,
        leading=float(leading),
        leading_simple=simple and len(real_leads) == 1,
        leading_dominant=dominant,
    )


# -- canonical subspace -----------------------------------------------------------


def canonical_subspace_check(basis: SymplecticBasis, auto) -> bool:
    """Exact period identity: the pullback of (Re w, Im w) along the affine
    map acts by the linear part A on the pair, checked on every basis cycle."""
    p = periods(basis)
    action = auto_action(basis, auto)
    M = action.matrix
    n = len(M)
    q = []
    for j in range(n):
        total = CycNum.rational(0, 4)
        for k in range(n):
            if M[k][j]:
                total = total + M[k][j] * p[k]
        q.append(total)
    A = auto.linear
    for j in range(n):
        re_q, im_q = q[j].real_part(), q[j].imag_part()
        re_p, im_p = p[j].real_part(), p[j].imag_part()
        lhs_re = A.a * re_p + A.b * im_p
        lhs_im = A.c * re_p + A.d * im_p
        if not (re_q - lhs_re).is_zero() or not (im_q - lhs_im).is_zero():
            return False
    return True

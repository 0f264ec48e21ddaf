r"""Exact periods of all Wiman differentials on one combinatorial surface,
numeric period matrices, the eigenblock real-multiplication decomposition,
and the variational positivity behind the main non-preservation verdict.

One combinatorial CW surface carries g developments dev_1..dev_g: the k-th
assigns to every edge its holonomy in the k-th flat presentation (the glued
triangle model with apex angle 2 pi k / n, n = 2g+1).  The cyclic symmetry
phi shifts triangles by one step; on the k-th development it scales edge
holonomies by zeta_n^k exactly, which is the eigenform relation at period
level.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import mpmath

from .errors import (
    BlockDimensionUnexpected,
    CheckFailed,
    NotDiagonalCase,
    SingularA,
)
from .homology import (
    CellComplex,
    H1Action,
    SymplecticBasis,
    auto_action,
    build_complex,
    face_boundary_period_checks,
    homology_basis,
    push_cycle,
)
from .numfield import CycNum, cos2pi, euler_phi, real_sign, sin2pi
from .surface import EdgeRef, Mat2, TranslationSurface, build_wiman
from .veech import AffineAuto


@dataclass
class TriangleShift:
    """The combinatorial automorphism T_{m,eps} -> T_{m+1,eps}."""

    n: int

    def polygon_image(self, pid: str) -> str:
        tag, m = pid[1], int(pid[2:])
        return f"T{tag}{(m + 1) % self.n}"

    def edge_map(self, surface: TranslationSurface, ref: EdgeRef) -> EdgeRef:
        return EdgeRef(self.polygon_image(ref.polygon), ref.index)


@dataclass
class TriangleShiftInverse:
    n: int

    def polygon_image(self, pid: str) -> str:
        tag, m = pid[1], int(pid[2:])
        return f"T{tag}{(m - 1) % self.n}"

    def edge_map(self, surface: TranslationSurface, ref: EdgeRef) -> EdgeRef:
        return EdgeRef(self.polygon_image(ref.polygon), ref.index)


class WimanModel:
    """Shared combinatorics of X(g, .) with one development per k."""

    def __init__(self, g: int):
        self.g = g
        self.n = 2 * g + 1
        self.surfaces = {k: build_wiman(g, k) for k in range(1, g + 1)}
        base = self.surfaces[1]
        self.complex: CellComplex = build_complex(base)
        self.devs: dict[int, list[CycNum]] = {}
        for k in range(1, g + 1):
            s = self.surfaces[k]
            self.devs[k] = [s.edge_vector(ge.rep) for ge in self.complex.edges]
        self.phi = TriangleShift(self.n)
        self.phi_inv = TriangleShiftInverse(self.n)
        self.basis: SymplecticBasis = homology_basis(self.complex)
        self._verify()

    def _verify(self):
        n = self.n
        zeta = CycNum.zeta(2 * n, 2)  # zeta_n inside Q(zeta_2n)
        for k in range(1, self.g + 1):
            dev = self.devs[k]
            assert face_boundary_period_checks(self.complex, lambda i, d=dev: d[i])
            scale = zeta ** k
            for idx, ge in enumerate(self.complex.edges):
                image_ref = self.phi.edge_map(self.surfaces[k], ge.rep)
                jdx, sign = self.complex.occurrence[image_ref]
                lhs = sign * dev[jdx]
                rhs = scale * dev[idx]
                assert (lhs - rhs).is_zero(), "development is not phi-equivariant"

    def dev_period(self, k: int, cycle: list[int]) -> CycNum:
        total = CycNum.rational(0, 4)
        dev = self.devs[k]
        for i, x in enumerate(cycle):
            if x:
                total = total + x * dev[i]
        return total

    def holonomy_field_generator(self, k: int) -> CycNum:
        """zeta_{n0} with n0 = n/gcd(k, n): the dev_k holonomies span Q(zeta_n^k)."""
        n0 = self.n // gcd(k, self.n)
        return CycNum.zeta(n0)


def wiman_model(g: int) -> WimanModel:
    return WimanModel(g)


def phi_homology(model: WimanModel) -> H1Action:
    """Integer matrix of the triangle shift on H_1; order exactly n."""
    action = auto_action(model.basis, model.phi)
    order = action.multiplicative_order(cap=2 * model.n)
    assert order == model.n, f"phi has order {order}, expected {model.n}"
    return action


# -- exact linear algebra over the cyclotomic field ---------------------------------


def cyc_matrix_kernel(matrix: list[list[CycNum]]) -> list[list[CycNum]]:
    """Kernel basis of a CycNum matrix by exact Gaussian elimination."""
    rows = [list(r) for r in matrix]
    m = len(rows)
    n = len(rows[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n):
        sel = next((i for i in range(r, m) if not rows[i][c].is_zero()), None)
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(m):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    kernel = []
    for fc in free:
        vec = [CycNum.rational(0) for _ in range(n)]
        vec[fc] = CycNum.rational(1)
        for row_i, pc in enumerate(pivots):
            vec[pc] = -rows[row_i][fc]
        kernel.append(vec)
    return kernel


def cyc_matrix_inverse(matrix: list[list[CycNum]]) -> list[list[CycNum]]:
    n = len(matrix)
    aug = [list(row) + [CycNum.rational(1 if i == j else 0) for j in range(n)]
           for i, row in enumerate(matrix)]
    for c in range(n):
        sel = next((i for i in range(c, n) if not aug[i][c].is_zero()), None)
        if sel is None:
            raise SingularA("matrix over the cyclotomic field is singular")
        aug[c], aug[sel] = aug[sel], aug[c]
        inv = aug[c][c].inverse()
        aug[c] = [x * inv for x in aug[c]]
        for i in range(n):
            if i != c and not aug[i][c].is_zero():
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]


def cyc_matmul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    out = [[CycNum.rational(0) for _ in range(m)] for _ in range(n)]
    for i in range(n):
        for j in range(m):
            total = CycNum.rational(0)
            for l in range(k):
                if not a[i][l].is_zero() and not b[l][j].is_zero():
                    total = total + a[i][l] * b[l][j]
            out[i][j] = total
    return out


# -- the Psi eigenblock structure ------------------------------------------------------


@dataclass
class RMStructure:
    g: int
    n: int
    blocks: dict[int, list[list[CycNum]]]   # k -> two K_n-basis vectors (2g coords)
    groupings: dict[int, list[int]]         # t -> [k with gcd(k, n) = t]


def psi_blocks(model: WimanModel) -> RMStructure:
    """Eigenblocks T^k = ker(Psi - 2cos(2 pi k / n)) over K_n, with exact
    dimension and mutual orthogonality checks."""
    g, n = model.g, model.n
    action = phi_homology(model)
    M = action.matrix
    Minv = action.inverse().matrix
    dim = 2 * g
    psi = [[CycNum.rational(M[i][j] + Minv[i][j]) for j in range(dim)]
           for i in range(dim)]
    blocks = {}
    for k in range(1, g + 1):
        xi = 2 * cos2pi(k, n)
        mat = [[psi[i][j] - (xi if i == j else CycNum.rational(0))
                for j in range(dim)] for i in range(dim)]
        kernel = cyc_matrix_kernel(mat)
        if len(kernel) != 2:
            raise BlockDimensionUnexpected(
                f"T^{k} has K_n-dimension {len(kernel)}, expected 2")
        blocks[k] = kernel
    J = model.basis.standard_j()
    for k1 in sorted(blocks):
        for k2 in sorted(blocks):
            if k1 >= k2:
                continue
            for v in blocks[k1]:
                for w in blocks[k2]:
                    if not _j_pair(v, w, J).is_zero():
                        raise CheckFailed(f"blocks T^{k1}, T^{k2} not orthogonal")
    groupings = {}
    for t in range(1, g + 1):
        if n % t == 0:
            ks = [k for k in range(1, g + 1) if gcd(k, n) == t]
            if ks:
                groupings[t] = ks
    return RMStructure(g=g, n=n, blocks=blocks, groupings=groupings)


def _j_pair(v, w, J) -> CycNum:
    total = CycNum.rational(0)
    for i, vi in enumerate(v):
        if vi.is_zero():
            continue
        for j, wj in enumerate(w):
            if J[i][j] and not wj.is_zero():
                total = total + vi * J[i][j] * wj
    return total


def eigenform_relation_check(model: WimanModel, k: int) -> bool:
    """Exactly verifies, on every basis cycle c:

      period_k(phi c) = zeta_n^k period_k(c)   (the strong dev invariant), and
      period_k(phi c) + period_k(phi^-1 c) = (zeta_n^k + zeta_n^-k) period_k(c).
    """
    if not 1 <= k <= model.g:
        raise ValueError("need 1 <= k <= g")
    zeta_k = CycNum.zeta(2 * model.n, 2) ** k
    xi = zeta_k + zeta_k.conj()
    for cycle in model.basis.cycles:
        fwd = push_cycle(model.basis, model.phi, cycle)
        bwd = push_cycle(model.basis, model.phi_inv, cycle)
        p = model.dev_period(k, cycle)
        p_fwd = model.dev_period(k, fwd)
        p_bwd = model.dev_period(k, bwd)
        if not (p_fwd - zeta_k * p).is_zero():
            raise CheckFailed(f"period(phi c) != zeta^{k} period(c)")
        if not (p_fwd + p_bwd - xi * p).is_zero():
            raise CheckFailed("Psi eigenform relation failed")
    return True


# -- period matrices ---------------------------------------------------------------------


@dataclass
class PeriodMatrixResult:
    Pi: list[list[complex]]
    err: float
    basis: SymplecticBasis
    exact: list[list[CycNum]]
    imag_min_eigenvalue: float

    def symmetric_defect(self) -> float:
        g = len(self.Pi)
        return max(abs(self.Pi[i][j] - self.Pi[j][i])
                   for i in range(g) for j in range(g))


def _exact_period_matrices(model: WimanModel, cycles_a, cycles_b):
    g = model.g
    A = [[model.dev_period(j + 1, cycles_a[kk]) for kk in range(g)] for j in range(g)]
    B = [[model.dev_period(j + 1, cycles_b[kk]) for kk in range(g)] for j in range(g)]
    return A, B


def period_matrix(model: WimanModel, precision_bits: int = 128) -> PeriodMatrixResult:
    """Pi = A^{-1} B for the exact a/b-period matrices of dev_1..dev_g over
    the symplectic basis; evaluated with certified interval arithmetic.

    The unknown scalars relating dev_k to the algebraic normalization cancel
    in A^{-1} B.  Symmetry holds exactly; Im(Pi) > 0 is certified numerically.
    """
    g = model.g
    basis = model.basis
    A, B = _exact_period_matrices(model, basis.cycles[:g], basis.cycles[g:])
    Ainv = cyc_matrix_inverse(A)  # raises SingularA if degenerate
    Pi = cyc_matmul(Ainv, B)
    for i in range(g):
        for j in range(i + 1, g):
            if not (Pi[i][j] - Pi[j][i]).is_zero():
                raise CheckFailed("exact period matrix is not symmetric")
    return _evaluate_period_matrix(Pi, basis, precision_bits)


def _evaluate_period_matrix(Pi, basis, precision_bits) -> PeriodMatrixResult:
    g = len(Pi)
    centers = [[0j] * g for _ in range(g)]
    err = 0.0
    im_mid = [[0.0] * g for _ in range(g)]
    for i in range(g):
        for j in range(g):
            re, im = Pi[i][j].interval(1, precision_bits)
            c = complex((float(re.a) + float(re.b)) / 2,
                        (float(im.a) + float(im.b)) / 2)
            centers[i][j] = c
            err = max(err, float(re.delta.b) / 2, float(im.delta.b) / 2)
            im_mid[i][j] = c.imag
    # certified smallest eigenvalue of Im(Pi): Weyl perturbation bound
    mpmath.mp.dps = 40
    sym = mpmath.mp.matrix([[(im_mid[i][j] + im_mid[j][i]) / 2
                             for j in range(g)] for i in range(g)])
    eigs = mpmath.mp.eigsy(sym, eigvals_only=True)
    lam_min = min(float(e) for e in eigs)
    perturbation = g * err + 1e-15 * max(abs(im_mid[i][j])
                                         for i in range(g) for j in range(g))
    return PeriodMatrixResult(Pi=centers, err=err, basis=basis, exact=Pi,
                              imag_min_eigenvalue=lam_min - perturbation)


# -- adapted bases and block diagonality ----------------------------------------------------


@dataclass
class AdaptedBlockReport:
    t: int
    diagonal: list[complex]
    err: float
    off_diagonal_zero_exact: bool
    diagonal_imag_positive: bool
    adapted_basis: list[list[CycNum]]


def adapted_block_check(model: WimanModel, t: int = 1) -> AdaptedBlockReport:
    """Builds a symplectic basis adapted to the Psi-eigenblocks (one pair per
    T^k, normalized so <a_k, b_k> = 1 over K_n).  In that basis the period
    matrix is exactly diagonal; in particular it is block diagonal for the
    gcd-class split at every divisor t, and the diagonal entries lie in the
    upper half plane.
    """
    if model.n % t or t > model.g:
        raise ValueError("t must be a divisor of n with 1 <= t <= g")
    rm = psi_blocks(model)
    J = model.basis.standard_j()
    a_vecs, b_vecs = [], []
    for k in range(1, model.g + 1):
        u, v = rm.blocks[k]
        pairing = _j_pair(u, v, J)
        if pairing.is_zero():
            raise CheckFailed(f"block T^{k} is J-degenerate")
        v = [x * pairing.inverse() for x in v]
        a_vecs.append(u)
        b_vecs.append(v)
    # periods of the adapted cycles: K_n-linear combinations of basis periods
    g = model.g
    base_p = {j: [model.dev_period(j + 1, c) for c in model.basis.cycles]
              for j in range(g)}

    def adapted_period(j, vec):
        total = CycNum.rational(0)
        for i, coeff in enumerate(vec):
            if not coeff.is_zero():
                total = total + coeff * base_p[j][i]
        return total

    A = [[adapted_period(j, a_vecs[kk]) for kk in range(g)] for j in range(g)]
    B = [[adapted_period(j, b_vecs[kk]) for kk in range(g)] for j in range(g)]
    Ainv = cyc_matrix_inverse(A)
    Pi = cyc_matmul(Ainv, B)
    off_zero = all(Pi[i][j].is_zero() for i in range(g) for j in range(g) if i != j)
    if not off_zero:
        raise CheckFailed("adapted period matrix has off-diagonal entries",
                          witness=Pi)
    diag = []
    err = 0.0
    positive = True
    for i in range(g):
        re, im = Pi[i][i].interval(1, 128)
        diag.append(complex((float(re.a) + float(re.b)) / 2,
                            (float(im.a) + float(im.b)) / 2))
        err = max(err, float(re.delta.b) / 2, float(im.delta.b) / 2)
        if not float(im.a) > 0:
            positive = False
    return AdaptedBlockReport(t=t, diagonal=diag, err=err,
                              off_diagonal_zero_exact=off_zero,
                              diagonal_imag_positive=positive,
                              adapted_basis=a_vecs + b_vecs)


# -- the Ahlfors derivative and the main verdict ----------------------------------------------


def ahlfors_offblock_derivative(model: WimanModel, k: int, i: int, j: int) -> CycNum:
    """The exactly computable case i + j = 2k of the variational derivative:
    the value is the flat area of the k-th presentation, n sin(2 pi k / n),
    strictly positive.  (The fixed i/2 convention factor never affects sign.)
    """
    if not (1 <= i <= model.g and 1 <= j <= model.g and 1 <= k <= model.g):
        raise ValueError("indices out of range")
    if i + j != 2 * k:
        raise NotDiagonalCase(f"(i, j) = ({i}, {j}) is not a decomposition of 2k = {2 * k}")
    area = model.surfaces[k].area()
    expected = model.n * sin2pi(k % model.n, model.n)
    assert (area - expected).is_zero()
    assert real_sign(area) > 0
    return area


@dataclass
class RMVerdict:
    g: int
    k: int
    t: int
    verdict: str  # "violated" | "preserved_consistent"
    witness: tuple | None  # (ell, (i, j), area CycNum)

    def to_json(self):
        out = {"g": self.g, "k": self.k, "t": self.t, "verdict": self.verdict}
        if self.witness:
            ell, pair, area = self.witness
            out["witness"] = {"ell": ell, "indices": list(pair),
                              "area_exact": area.to_json(),
                              "area_double": area.ball().center.real}
        return out


def rm_verdict(g: int, k: int, model: WimanModel | None = None) -> RMVerdict:
    """The main theorem's test for (W_g, omega_k).

    With t = gcd(k, n) and rt the largest multiple of t at most g: if some
    ell >= 1 gives indices 1 <= k - ell t < k + ell t <= g with at least one
    of them having gcd exactly t with n, the off-block period derivative
    equals the exact positive area and the real-multiplication structure is
    violated; for k = t or k = rt no such ell exists and the computation is
    consistent with preservation (the Veech cases).
    """
    n = 2 * g + 1
    if not 1 <= k <= g:
        raise ValueError("need 1 <= k <= g")
    t = gcd(k, n)
    rt = (g // t) * t
    for ell in range(1, g + 1):
        lo, hi = k - ell * t, k + ell * t
        if lo < 1 or hi > g:
            continue
        if gcd(lo, n) == t or gcd(hi, n) == t:
            if model is None:
                model = WimanModel(g)
            area = ahlfors_offblock_derivative(model, k, lo, hi)
            return RMVerdict(g=g, k=k, t=t, verdict="violated",
                             witness=(ell, (lo, hi), area))
    assert k in (t, rt), "no witness found away from the class extremes"
    return RMVerdict(g=g, k=k, t=t, verdict="preserved_consistent", witness=None)

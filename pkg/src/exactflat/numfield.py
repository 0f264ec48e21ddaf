r"""Exact arithmetic in cyclotomic fields Q(zeta_N) and their real subfields.

Elements are stored as rational coefficient vectors over the power basis
1, zeta, ..., zeta^{phi(N)-1}, reduced modulo the N-th cyclotomic polynomial.
The representation is unique, so equality is coefficient-wise.  The canonical
embedding zeta_N -> exp(2 pi i / N) is fixed once and for all; every numeric
question (signs, balls) is answered through it with certified interval
arithmetic at escalating precision.

All values are immutable; the only shared state is a pair of memo tables for
cyclotomic polynomials and power-reduction rows, which are idempotent under
concurrent writes.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import mpmath

from .errors import (
    BadEmbedding,
    DegenerateField,
    FieldJoinOverflow,
    NotDivisible,
    OrderMismatch,
)

# Joins of cyclotomic orders are capped; anything larger is a sign of runaway
# field towers rather than a legitimate computation at desk scale.
ORDER_CAP = 10_000

_ZERO = Fraction(0)
_ONE = Fraction(1)


def euler_phi(n: int) -> int:
    result = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _poly_divmod(num: list[Fraction], den: list[Fraction]):
    """Quotient and remainder in Q[x]; coefficient lists are low-to-high."""
    num = list(num)
    q = [_ZERO] * max(1, len(num) - len(den) + 1)
    d = len(den) - 1
    lead = den[-1]
    for i in range(len(num) - 1, d - 1, -1):
        c = num[i] / lead
        if c:
            q[i - d] = c
            for j, dj in enumerate(den):
                num[i - d + j] -= c * dj
    while len(num) > 1 and not num[-1]:
        num.pop()
    return q, num


_cyclo_cache: dict[int, tuple[int, ...]] = {}
_cyclo_lock = threading.Lock()


def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, low-to-high, via Phi_n = (x^n-1)/prod."""
    cached = _cyclo_cache.get(n)
    if cached is not None:
        return cached
    num = [_ZERO] * (n + 1)
    num[0], num[n] = Fraction(-1), _ONE
    num_list = num
    for d in range(1, n):
        if n % d == 0:
            den = [Fraction(c) for c in cyclotomic_polynomial(d)]
            num_list, rem = _poly_divmod(num_list, den)
            assert len(rem) == 1 and rem[0] == 0
    coeffs = tuple(int(c) for c in num_list)
    with _cyclo_lock:
        _cyclo_cache.setdefault(n, coeffs)
    return coeffs


_reduction_cache: dict[int, tuple[tuple[Fraction, ...], ...]] = {}


def _reduction_rows(n: int) -> tuple[tuple[Fraction, ...], ...]:
    """Row j is the power-basis expansion of zeta_n^j, for 0 <= j < n."""
    cached = _reduction_cache.get(n)
    if cached is not None:
        return cached
    phi = euler_phi(n)
    cyc = cyclotomic_polynomial(n)
    rows: list[tuple[Fraction, ...]] = []
    current = [_ZERO] * phi
    current[0] = _ONE
    for _ in range(n):
        rows.append(tuple(current))
        # multiply by zeta: shift, then eliminate the zeta^phi overflow
        overflow = current[-1]
        shifted = [_ZERO] + current[:-1]
        if overflow:
            for i in range(phi):
                shifted[i] -= overflow * cyc[i]
        current = shifted
    table = tuple(rows)
    _reduction_cache.setdefault(n, table)
    return table


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def join_orders(*orders: int) -> int:
    m = 1
    for n in orders:
        m = _lcm(m, n)
        if m > ORDER_CAP:
            raise FieldJoinOverflow(f"cyclotomic order join {m} exceeds cap {ORDER_CAP}")
    return m


@dataclass(frozen=True)
class ComplexBall:
    """A complex double together with a rigorous radius containing the true value."""

    center: complex
    radius: float

    def contains_zero(self) -> bool:
        return abs(self.center) <= self.radius


class CycNum:
    """An element of Q(zeta_N), reduced over the power basis mod Phi_N.

    A ``RealCyc`` in the sense of the file formats is simply a CycNum fixed by
    complex conjugation; use :meth:`is_real` / :func:`require_real`.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs):
        if order < 1:
            raise DegenerateField(f"order must be >= 1, got {order}")
        phi = euler_phi(order)
        vec = [_ZERO] * phi
        coeffs = list(coeffs)
        if all(j < phi or not c for j, c in enumerate(coeffs)):
            for j, c in enumerate(coeffs):
                if c:
                    vec[j] += c if isinstance(c, Fraction) else Fraction(c)
        else:
            table = _reduction_rows(order)
            for j, c in enumerate(coeffs):
                if not c:
                    continue
                c = c if isinstance(c, Fraction) else Fraction(c)
                row = table[j % order]
                for i in range(phi):
                    if row[i]:
                        vec[i] += c * row[i]
        self.order = order
        self.coeffs = tuple(vec)

    # -- constructors ------------------------------------------------------

    @classmethod
    def rational(cls, value, order: int = 1) -> CycNum:
        return cls(order, [Fraction(value)])

    @classmethod
    def zeta(cls, order: int, power: int = 1) -> CycNum:
        z = [_ZERO] * (power % order + 1)
        z[power % order] = _ONE
        return cls(order, z)

    @classmethod
    def from_xy(cls, x, y) -> CycNum:
        """The planar point x + i y with rational coordinates, in Q(zeta_4)."""
        x, y = Fraction(x), Fraction(y)
        return cls(4, [x, y])

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return all(not c for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(not c for c in self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def is_real(self) -> bool:
        return self.conj() == self

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = CycNum.rational(other, self.order)
        if not isinstance(other, CycNum):
            return NotImplemented
        if self.order == other.order:
            return self.coeffs == other.coeffs
        a, b = _same_order(self, other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        # hash through a canonical minimal representation: rationals collapse
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.order, self.coeffs))

    def __repr__(self) -> str:
        if self.is_rational():
            return f"CycNum({self.coeffs[0]})"
        terms = [f"{c}*z{self.order}^{i}" for i, c in enumerate(self.coeffs) if c]
        return "CycNum(" + " + ".join(terms) + ")"

    # -- arithmetic ---------------------------------------------------------

    def lift(self, order: int) -> CycNum:
        """Rewrite in Q(zeta_M) for a multiple M of the current order."""
        if order == self.order:
            return self
        if order % self.order:
            raise NotDivisible(f"{self.order} does not divide {order}")
        if order > ORDER_CAP:
            raise FieldJoinOverflow(f"order {order} exceeds cap {ORDER_CAP}")
        step = order // self.order
        raw = [_ZERO] * (len(self.coeffs) * step)
        for j, c in enumerate(self.coeffs):
            if c:
                raw[j * step] = c
        return CycNum(order, raw)

    def __add__(self, other) -> CycNum:
        a, b = _same_order(self, _coerce(other, self.order))
        return _from_reduced(a.order, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self) -> CycNum:
        return _from_reduced(self.order, [-c for c in self.coeffs])

    def __sub__(self, other) -> CycNum:
        return self + (-_coerce(other, self.order))

    def __rsub__(self, other) -> CycNum:
        return (-self) + other

    def __mul__(self, other) -> CycNum:
        a, b = _same_order(self, _coerce(other, self.order))
        n, phi = a.order, len(a.coeffs)
        raw = [_ZERO] * (2 * phi - 1 if phi else 1)
        ac, bc = a.coeffs, b.coeffs
        for i, ci in enumerate(ac):
            if not ci:
                continue
            for j, cj in enumerate(bc):
                if cj:
                    raw[i + j] += ci * cj
        return CycNum(n, raw)

    __rmul__ = __mul__

    def inverse(self) -> CycNum:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        if self.is_rational():
            return CycNum.rational(1 / self.coeffs[0], self.order)
        # extended Euclid: u*f + v*Phi = gcd = const, so f^{-1} = u/const
        f = list(self.coeffs)
        while len(f) > 1 and not f[-1]:
            f.pop()
        g = [Fraction(c) for c in cyclotomic_polynomial(self.order)]
        r0, r1 = g, f
        s0, s1 = [_ZERO], [_ONE]
        while len(r1) > 1 or r1[0]:
            q, r = _poly_divmod(r0, r1)
            s = _poly_sub(s0, _poly_mul(q, s1))
            r0, s0 = r1, s1
            r1, s1 = r, s
        const = r0[0]
        inv_coeffs = [c / const for c in s0]
        return CycNum(self.order, inv_coeffs)

    def __truediv__(self, other) -> CycNum:
        return self * _coerce(other, self.order).inverse()

    def __rtruediv__(self, other) -> CycNum:
        return _coerce(other, self.order) * self.inverse()

    def __pow__(self, k: int) -> CycNum:
        if k < 0:
            return self.inverse() ** (-k)
        result = CycNum.rational(1, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def galois(self, k: int) -> CycNum:
        """The image under zeta -> zeta^k; requires gcd(k, order) = 1."""
        n = self.order
        if gcd(k, n) != 1:
            raise BadEmbedding(f"gcd({k}, {n}) != 1")
        raw = [_ZERO] * n
        for j, c in enumerate(self.coeffs):
            if c:
                raw[(j * k) % n] += c
        return CycNum(n, raw)

    def conj(self) -> CycNum:
        if self.order <= 2:
            return self
        return self.galois(self.order - 1)

    def real_part(self) -> CycNum:
        return (self + self.conj()) * Fraction(1, 2)

    def imag_part(self) -> CycNum:
        """Im(self) as a real element of Q(zeta_lcm(order,4))."""
        m = join_orders(self.order, 4)
        z = self.lift(m)
        i_unit = CycNum.zeta(m, m // 4)
        return (z.conj() - z) * i_unit * Fraction(1, 2)

    # -- numerics ------------------------------------------------------------

    def interval(self, k: int = 1, prec: int = 64):
        """Certified (re, im) interval enclosures of sigma_k(self)."""
        n = self.order
        if gcd(k, n) != 1:
            raise BadEmbedding(f"gcd({k}, {n}) != 1")
        ctx = mpmath.ctx_iv.MPIntervalContext()
        ctx.prec = prec
        two_pi = 2 * ctx.pi
        re = ctx.mpf(0)
        im = ctx.mpf(0)
        for j, c in enumerate(self.coeffs):
            if not c:
                continue
            cf = ctx.mpf(c.numerator) / ctx.mpf(c.denominator)
            ang = two_pi * ((j * k) % n) / n
            re += cf * ctx.cos(ang)
            im += cf * ctx.sin(ang)
        return re, im

    def ball(self, k: int = 1, bits: int = 53) -> ComplexBall:
        """A complex ball around sigma_k(self) with relative radius <= 2^(1-bits).

        The center is a double, so the radius bottoms out at the double
        rounding floor (about one ulp of the center); requests beyond 52 bits
        are served at that floor.  Callers needing genuine high precision use
        :meth:`interval` directly.
        """
        if self.is_zero():
            return ComplexBall(0j, 0.0)
        target = 2.0 ** (1 - min(bits, 52))
        prec = max(bits + 16, 64)
        center, radius = 0j, float("inf")
        for _ in range(64):
            re, im = self.interval(k, prec)
            center = complex((float(re.a) + float(re.b)) / 2, (float(im.a) + float(im.b)) / 2)
            radius = float(re.delta.b) / 2 + float(im.delta.b) / 2 + 1e-322
            # center rounding slack: one ulp in each component
            radius += abs(center) * 2.3e-16
            if radius <= target * abs(center) or prec > 8 * (bits + 64):
                return ComplexBall(center, radius)
            prec *= 2
        return ComplexBall(center, radius)

    def to_float(self) -> complex:
        return self.ball().center

    def compress(self) -> CycNum:
        """The same element in the smallest cyclotomic subfield Q(zeta_d), d | N."""
        n = self.order
        if self.is_rational():
            return self if n == 1 else CycNum.rational(self.coeffs[0])
        phi = len(self.coeffs)
        for d in sorted(_divisors(n)):
            if d in (1, 2) or d == n:
                continue
            phid = euler_phi(d)
            if phid >= phi:
                continue
            step = n // d
            basis = [_reduction_rows(n)[(j * step) % n] for j in range(phid)]
            sol = _solve_in_span(basis, list(self.coeffs))
            if sol is not None:
                return _from_reduced(d, sol)
        return self

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> CycNum:
        return cls(int(data["order"]), [Fraction(s) for s in data["coeffs"]])


# A RealCyc is a CycNum r with r.conj() == r; the alias documents intent.
RealCyc = CycNum


def _coerce(value, order: int) -> CycNum:
    if isinstance(value, CycNum):
        return value
    return CycNum.rational(value, order)


def _from_reduced(order: int, coeffs: list[Fraction]) -> CycNum:
    obj = CycNum.__new__(CycNum)
    obj.order = order
    obj.coeffs = tuple(coeffs)
    return obj


def _same_order(a: CycNum, b: CycNum):
    if a.order == b.order:
        return a, b
    m = join_orders(a.order, b.order)
    return a.lift(m), b.lift(m)


def _poly_mul(a, b):
    out = [_ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _divisors(n: int) -> list[int]:
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def _solve_in_span(basis: list, target: list):
    """Coordinates of ``target`` in the Q-span of ``basis`` vectors, or None."""
    if not basis:
        return None if any(target) else []
    width = len(target)
    rows = []  # (echelon vector, combo over basis indices)
    pivots = []
    k = len(basis)
    for idx, vec in enumerate(basis):
        v = list(vec)
        combo = [_ZERO] * k
        combo[idx] = _ONE
        for (rv, rc), p in zip(rows, pivots):
            if v[p]:
                f = v[p]
                for i in range(width):
                    v[i] -= f * rv[i]
                for i in range(k):
                    combo[i] -= f * rc[i]
        if any(v):
            p = next(i for i, c in enumerate(v) if c)
            inv = 1 / v[p]
            rows.append(([c * inv for c in v], [c * inv for c in combo]))
            pivots.append(p)
    t = list(target)
    coords = [_ZERO] * k
    for (rv, rc), p in zip(rows, pivots):
        if t[p]:
            f = t[p]
            for i in range(width):
                t[i] -= f * rv[i]
            for i in range(k):
                coords[i] += f * rc[i]
    if any(t):
        return None
    return coords


def _poly_sub(a, b):
    n = max(len(a), len(b))
    out = [_ZERO] * n
    for i, x in enumerate(a):
        out[i] += x
    for i, y in enumerate(b):
        out[i] -= y
    while len(out) > 1 and not out[-1]:
        out.pop()
    return out


# -- spec operations ---------------------------------------------------------


def cyc_arith(op: str, a: CycNum, b: CycNum | None = None) -> CycNum:
    """Same-order field arithmetic; callers lift via embed_order first."""
    if b is not None and a.order != b.order:
        raise OrderMismatch(f"orders {a.order} and {b.order} differ")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inverse()
    if op == "neg":
        return -a
    if op == "conj":
        return a.conj()
    raise ValueError(f"unknown op {op!r}")


def embed_order(a: CycNum, m: int) -> CycNum:
    return a.lift(m)


def require_real(x: CycNum, what: str = "value") -> CycNum:
    if not x.is_real():
        raise ValueError(f"{what} is not real: {x!r}")
    return x


_trig_cache: dict[int, tuple] = {}


def _trig_table(n: int):
    table = _trig_cache.get(n)
    if table is None:
        table = tuple(
            (math.cos(2 * math.pi * j / n), math.sin(2 * math.pi * j / n))
            for j in range(n))
        _trig_cache.setdefault(n, table)
    return table


def real_sign(x: CycNum) -> int:
    """Sign of a real cyclotomic number under the canonical embedding.

    Exact zero test first; then a rigorous double-precision filter (value
    compared against a generous bound on the accumulated rounding error),
    and finally interval refinement with doubling precision.  Termination is
    guaranteed because zero was excluded exactly.
    """
    if x.is_zero():
        return 0
    if x.is_rational():
        v = x.coeffs[0]
        return 1 if v > 0 else -1
    try:
        table = _trig_table(x.order)
        approx = 0.0
        scale = 1.0
        for j, c in enumerate(x.coeffs):
            if c:
                cf = float(c)
                approx += cf * table[j][0]
                scale += abs(cf)
        # each term carries a handful of ulps; 1e-12 * scale is a safe envelope
        if abs(approx) > 1e-12 * scale and math.isfinite(approx):
            return 1 if approx > 0 else -1
    except OverflowError:
        pass
    prec = 64
    while True:
        re, im = x.interval(1, prec)
        if not (im.a <= 0 <= im.b):
            raise ValueError(f"real_sign of a non-real value {x!r}")
        if re.a > 0:
            return 1
        if re.b < 0:
            return -1
        prec *= 2


def real_compare(x: CycNum, y: CycNum) -> int:
    return real_sign(x - y)


def real_abs(x: CycNum) -> CycNum:
    return x if real_sign(x) >= 0 else -x


def embed(a: CycNum, k: int, bits: int = 53) -> ComplexBall:
    return a.ball(k, bits)


def min_poly(x: CycNum) -> tuple[int, ...]:
    """Primitive integer coefficients (low-to-high) of the minimal polynomial.

    Found as the first linear dependence among the power-basis vectors of
    1, x, x^2, ...; this is the kernel of the multiplication-by-x matrix
    restricted to the powers, no factorization involved.
    """
    phi = len(x.coeffs)
    rows: list[tuple[list[Fraction], list[Fraction]]] = []  # (reduced vector, combo)
    power = CycNum.rational(1, x.order)
    for d in range(phi + 1):
        vec = list(power.coeffs)
        combo = [_ZERO] * (phi + 1)
        combo[d] = _ONE
        for rvec, rcombo in rows:
            pivot = next(i for i, c in enumerate(rvec) if c)
            factor = vec[pivot]
            if factor:
                for i in range(phi):
                    vec[i] -= factor * rvec[i]
                for i in range(phi + 1):
                    combo[i] -= factor * rcombo[i]
        if all(not c for c in vec):
            while combo and not combo[-1]:
                combo.pop()
            lead = combo[-1]
            monic = [c / lead for c in combo]
            den = math.lcm(*[c.denominator for c in monic])
            ints = [int(c * den) for c in monic]
            content = math.gcd(*[abs(v) for v in ints if v] or [1])
            return tuple(v // content for v in ints)
        pivot = next(i for i, c in enumerate(vec) if c)
        inv = 1 / vec[pivot]
        vec = [c * inv for c in vec]
        combo = [c * inv for c in combo]
        rows.append((vec, combo))
        power = power * x
    raise AssertionError("power basis exhausted without a dependence")


def min_poly_degree(x: CycNum) -> int:
    return len(min_poly(x)) - 1


def in_subfield(x: CycNum, gen: CycNum) -> bool:
    """True iff x lies in Q(gen), by exact linear algebra over Q."""
    m = join_orders(x.order, gen.order)
    x, gen = x.lift(m), gen.lift(m)
    phi = len(x.coeffs)
    rows: list[list[Fraction]] = []
    pivots: list[int] = []
    power = CycNum.rational(1, m)
    deg = min_poly_degree(gen)
    for _ in range(deg):
        vec = list(power.coeffs)
        for rvec, p in zip(rows, pivots):
            if vec[p]:
                f = vec[p]
                for i in range(phi):
                    vec[i] -= f * rvec[i]
        if any(vec):
            p = next(i for i, c in enumerate(vec) if c)
            inv = 1 / vec[p]
            rows.append([c * inv for c in vec])
            pivots.append(p)
        power = power * gen
    target = list(x.coeffs)
    for rvec, p in zip(rows, pivots):
        if target[p]:
            f = target[p]
            for i in range(phi):
                target[i] -= f * rvec[i]
    return not any(target)


def cos2pi(p: int, q: int) -> CycNum:
    """cos(2 pi p / q) as an exact real cyclotomic number."""
    if q < 3:
        raise DegenerateField(f"need q >= 3, got {q}")
    z = CycNum.zeta(q, p % q)
    return (z + z.conj()) * Fraction(1, 2)


def sin2pi(p: int, q: int) -> CycNum:
    """sin(2 pi p / q), real, represented in Q(zeta_lcm(q,4))."""
    if q < 3:
        raise DegenerateField(f"need q >= 3, got {q}")
    return CycNum.zeta(q, p % q).imag_part()


def sin_ratio(p: int, q: int) -> CycNum:
    """sin(2 pi p / q) / sin(2 pi / q), an element of Q(cos 2 pi / q)."""
    if q < 3:
        raise DegenerateField(f"need q >= 3, got {q}")
    z = CycNum.zeta(q)
    num = z ** p - z ** (-p)
    den = z - z.inverse()
    return num / den


def cot2pi(p: int, q: int) -> CycNum:
    """cot(2 pi p / q) exactly, in Q(zeta_lcm(q,4))."""
    c = cos2pi(p, q)
    s = sin2pi(p, q)
    if s.is_zero():
        raise ZeroDivisionError(f"cot(2 pi {p}/{q}) undefined")
    return c / s

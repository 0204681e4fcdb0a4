"""Hough's parameterization of k-torsion ideal pairs in Q(sqrt(-D)) and the
associated Heegner points.

For squarefree D = 2 mod 4 and odd k, a solution is (l, m, n, t) with
l m^k = l^2 n^2 + t^2 D, l | D, gcd(m, n t D) = 1.  It gives the primitive
ideal a = [lm, beta + sqrt(-D)] with beta = l * (n / t mod m), whose k-th
power is (l n + t sqrt(-D)).  The field discriminant is -4D throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numba import njit

from . import _kernels as K
from .classgroups import QuadForm, power, principal_form, reduce_form
from .maximality import is_squarefree


@dataclass(frozen=True, order=True)
class SoundararajanSolution:
    l: int
    m: int
    n: int
    t: int
    D: int
    k: int = 3

    @property
    def norm(self) -> int:
        return self.l * self.m


@dataclass(frozen=True)
class SolutionIdeal:
    """The ideal [norm, beta + sqrt(-D)]."""
    norm: int
    beta: int
    D: int
    principal: bool

    @property
    def form(self) -> QuadForm:
        return ideal_form(self.norm, self.beta, self.D)


@dataclass(frozen=True)
class HeegnerPoint:
    """A point of the upper half plane with exact data.

    (A, B, C) is the positive definite form whose upper root is the point:
    z = (-B + sqrt(B^2 - 4AC)) / (2A).
    """
    A: int
    B: int
    C: int
    source: SoundararajanSolution | None = None

    @property
    def x(self) -> Fraction:
        return Fraction(-self.B, 2 * self.A)

    @property
    def y2(self) -> Fraction:
        return Fraction(4 * self.A * self.C - self.B * self.B, 4 * self.A * self.A)

    @property
    def y(self) -> float:
        return math.sqrt(self.y2)

    def as_complex(self) -> complex:
        return complex(float(self.x), self.y)

    def in_fundamental_domain(self) -> bool:
        """-1/2 <= x < 1/2, |z| >= 1, and x >= 0 on the unit circle apart
        from the corner x = -1/2."""
        A, B, C = self.A, self.B, self.C
        return -A < B <= A and A <= C and not (A == C and 0 < B < A)


@dataclass(frozen=True)
class RegionReport:
    X: int
    Y: float
    k: int
    count: int
    expected: float
    fundamental_count: int
    torsion_sum: int
    cusp_violations: int
    discriminants: int

    @property
    def ratio(self) -> float:
        return self.count / self.expected


def _check(D, k):
    if D <= 0 or D % 4 != 2 or not is_squarefree(D):
        raise ValueError(f"D = {D} must be squarefree and 2 mod 4")
    if k < 3 or k % 2 == 0:
        raise ValueError("k must be odd and at least 3")


def _divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def soundararajan_solutions(D: int, k: int, B: int) -> list[SoundararajanSolution]:
    """All solutions with l*m <= B, in lexicographic order of (l, m, n, t)."""
    _check(D, k)
    out = []
    for l in _divisors(D):
        for m in range(1, B // l + 1):
            if math.gcd(m, D) != 1:
                continue
            L = l * m**k
            t = 1
            while t * t * D < L:
                rem = L - t * t * D
                if rem % (l * l) == 0:
                    n = math.isqrt(rem // (l * l))
                    if n > 0 and n * n * l * l == rem and math.gcd(m, n * t) == 1:
                        out.append(SoundararajanSolution(l, m, n, t, D, k))
                t += 1
    return sorted(out)


def _beta(s: SoundararajanSolution) -> int:
    if s.m == 1:
        return 0
    return s.l * (s.n * pow(s.t, -1, s.m) % s.m)


def ideal_form(norm: int, beta: int, D: int) -> QuadForm:
    return QuadForm(norm, 2 * beta, (beta * beta + D) // norm)


def ideal_of_solution(s: SoundararajanSolution) -> SolutionIdeal:
    """The ideal [lm, beta + sqrt(-D)] and whether it is principal."""
    N = s.norm
    beta = _beta(s)
    if (beta * beta + s.D) % N != 0:
        raise AssertionError(f"{s}: beta = {beta} fails beta^2 = -D mod {N}")
    f = ideal_form(N, beta, s.D)
    g = power(f, s.k)
    gen = reduce_form(g)
    if gen != principal_form(-4 * s.D):
        raise AssertionError(f"{s}: k-th power of the ideal is not principal")
    return SolutionIdeal(N, beta, s.D, reduce_form(f) == principal_form(-4 * s.D))


def principal_generator(norm: int, beta: int, D: int):
    """(u, v) with [norm, beta + sqrt(-D)] = (u + v sqrt(-D)), or None."""
    v = 0
    while D * v * v <= norm:
        u2 = norm - D * v * v
        u = math.isqrt(u2)
        if u * u == u2:
            for uu in (u, -u):
                # u + v sqrt(-D) lies in the ideal iff u - v beta = 0 mod norm
                if (uu - v * beta) % norm == 0:
                    return uu, v
        v += 1
    return None


def ideal_power_generator(s: SoundararajanSolution):
    """The generator l n + t sqrt(-D) of a^k, as (l n, t)."""
    return s.l * s.n, s.t


def reduce_point(A: int, B: int, C: int, source=None) -> HeegnerPoint:
    """Move the upper root of (A, B, C) into the fundamental domain.

    Translations z -> z + j act by B -> B - 2Aj, inversion z -> -1/z by
    (A, B, C) -> (C, -B, A).  Boundary: x in [-1/2, 1/2), and x >= 0 when |z| = 1.
    """
    while True:
        # x = -B/(2A) into [-1/2, 1/2)  <=>  B in (-A, A]
        if B > A or B <= -A:
            j = (B + A - 1) // (2 * A)
            C = A * j * j - B * j + C
            B = B - 2 * A * j
        elif A > C:
            A, B, C = C, -B, A
        elif A == C and 0 < B < A:
            B = -B
        else:
            return HeegnerPoint(A, B, C, source)


def heegner_point(s: SoundararajanSolution) -> HeegnerPoint:
    """z = (beta + sqrt(-D)) / (lm), reduced."""
    N = s.norm
    beta = _beta(s)
    return reduce_point(N, -2 * beta, (beta * beta + s.D) // N, s)


def heegner_point_raw(s: SoundararajanSolution) -> HeegnerPoint:
    """z = (beta + sqrt(-D)) / (lm) translated to -1/2 <= x < 1/2, not inverted."""
    N = s.norm
    beta = _beta(s)
    A, B, C = N, -2 * beta, (beta * beta + s.D) // N
    j = (B + A - 1) // (2 * A) if (B > A or B <= -A) else 0
    return HeegnerPoint(A, B - 2 * A * j, A * j * j - B * j + C, s)


# -- compiled bulk scans ----------------------------------------------------

@njit(cache=True)
def _isqrt(n):
    r = np.int64(math.sqrt(float(n)))
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


@njit(cache=True)
def _ipow(m, k):
    r = np.int64(1)
    for _ in range(k):
        r *= m
    return r


@njit(cache=True)
def solutions_kernel(D, k, B):
    """Rows (l, m, n, t, beta) of all solutions with l m <= B."""
    out = np.empty((64, 5), dtype=np.int64)
    cnt = 0
    for l in range(1, D + 1):
        if D % l != 0:
            continue
        for m in range(1, B // l + 1):
            if K._gcd(m, D) != 1:
                continue
            L = l * _ipow(m, k)
            t = 1
            while t * t * D < L:
                rem = L - t * t * D
                if rem % (l * l) == 0:
                    n2 = rem // (l * l)
                    n = _isqrt(n2)
                    if n > 0 and n * n == n2 and K._gcd(m, n * t) == 1:
                        if cnt == out.shape[0]:
                            nb = np.empty((2 * cnt, 5), dtype=np.int64)
                            nb[:cnt] = out[:cnt]
                            out = nb
                        if m == 1:
                            beta = 0
                        else:
                            g, inv, _ = K._xgcd(t % m, m)
                            beta = l * ((n * (inv % m)) % m)
                        out[cnt, 0] = l
                        out[cnt, 1] = m
                        out[cnt, 2] = n
                        out[cnt, 3] = t
                        out[cnt, 4] = beta
                        cnt += 1
                t += 1
    return out[:cnt].copy()


@njit(cache=True)
def ideals_kernel(D, k, B):
    """Rows (n, beta) of primitive ideals [n, beta + sqrt(-D)], 2 <= n <= B,
    whose k-th power is principal."""
    out = np.empty((64, 2), dtype=np.int64)
    cnt = 0
    for N in range(2, B + 1):
        for beta in range(N):
            if (beta * beta + D) % N != 0:
                continue
            A, Bq, C = K.qf_reduce(N, 2 * beta, (beta * beta + D) // N)
            pA, pB, pC = K.qf_power(A, Bq, C, k)
            if pA != 1:
                continue
            if cnt == out.shape[0]:
                nb = np.empty((2 * cnt, 2), dtype=np.int64)
                nb[:cnt] = out[:cnt]
                out = nb
            out[cnt, 0] = N
            out[cnt, 1] = beta
            cnt += 1
    return out[:cnt].copy()


@njit(cache=True)
def _point_in_F(A, B, C):
    # translate x = -B/(2A) into [-1/2, 1/2) and test the reduced conditions
    if B > A or B <= -A:
        j = (B + A - 1) // (2 * A)
        C = A * j * j - B * j + C
        B = B - 2 * A * j
    return A <= C and not (A == C and 0 < B < A)


@njit(cache=True)
def region_scan(Ds, k, Y):
    """Per D: (points with y > 1/Y, points in F, cusp violations).

    Only nonprincipal ideals are counted; each solution contributes its ideal
    and the conjugate.
    """
    res = np.zeros((Ds.shape[0], 3), dtype=np.int64)
    for i in range(Ds.shape[0]):
        D = Ds[i]
        Bf = _isqrt(4 * D // 3)
        Br = np.int64(math.floor(Y * math.sqrt(float(D)))) + 1
        B = max(Bf, Br)
        sols = solutions_kernel(D, k, B)
        for r in range(sols.shape[0]):
            N = sols[r, 0] * sols[r, 1]
            beta = sols[r, 4]
            C = (beta * beta + D) // N
            if _ipow(N, k) < D:
                res[i, 2] += 1
            A, Bq, Cq = K.qf_reduce(N, 2 * beta, C)
            if A == 1:
                continue
            if float(N) * float(N) < Y * Y * float(D):
                res[i, 0] += 2
            if N <= Bf:
                if _point_in_F(N, -2 * beta, C):
                    res[i, 1] += 1
                if _point_in_F(N, 2 * beta, C):
                    res[i, 1] += 1
    return res


def hough_discriminants(X: int) -> np.ndarray:
    """Squarefree D = 2 mod 4 with D < X."""
    from .census import squarefree_mask
    sf = squarefree_mask(max(X, 2))
    n = np.arange(len(sf))
    return n[(n % 4 == 2) & sf & (n < X)].astype(np.int64)


def count_in_region(X: int, Y: float, k: int = 3) -> RegionReport:
    """Nonprincipal Heegner points with y > 1/Y over squarefree D = 2 mod 4, D < X.

    The report also carries the fundamental-domain count and, for k = 3, the
    class-group side sum_D (#Cl_3(-4D) - 1) it must equal.
    """
    if k < 3 or k % 2 == 0:
        raise ValueError("k must be odd and at least 3")
    if Y <= 0:
        raise ValueError("Y must be positive")
    Ds = hough_discriminants(X)
    res = region_scan(Ds, k, float(Y))
    torsion = -1
    if k == 3 and len(Ds):
        from .classgroups import cl3_table
        torsion = int((cl3_table(-4 * Ds) - 1).sum())
    expected = 6.0 / math.pi**3 * Y * X
    return RegionReport(int(X), float(Y), k, int(res[:, 0].sum()), expected,
                        int(res[:, 1].sum()), torsion, int(res[:, 2].sum()), len(Ds))


def fundamental_points(D: int, k: int = 3) -> list[HeegnerPoint]:
    """Reduced Heegner points of nonprincipal solution ideals lying in F."""
    _check(D, k)
    Bf = math.isqrt(4 * D // 3)
    one = principal_form(-4 * D)
    out = []
    for s in soundararajan_solutions(D, k, Bf):
        beta = _beta(s)
        N = s.norm
        C = (beta * beta + D) // N
        if reduce_form((N, 2 * beta, C)) == one:
            continue
        for b in (-2 * beta, 2 * beta):
            p = reduce_point(N, b, C, s)
            if p.A == N and _point_in_F(N, b, C):
                out.append(p)
    return out


def vertical_histogram(X: int, bins: int, k: int = 3):
    """Counts of reduced nonprincipal Heegner points by imaginary part."""
    ys = []
    for D in hough_discriminants(X):
        ys.extend(p.y for p in fundamental_points(int(D), k))
    if not ys:
        return []
    lo, hi = math.sqrt(3) / 2, max(ys)
    counts, edges = np.histogram(ys, bins=bins, range=(lo, hi))
    return [(float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(bins)]


def bijection_audit(D: int, k: int, B: int):
    """Compare solution ideals with directly enumerated ideals of norm <= B.

    Returns (matches, from_solutions, direct_pairs, self_conjugate) where the
    sets hold conjugate-pair keys (N, min(beta, -beta mod N)).
    """
    sols = solutions_kernel(D, k, B)
    sol_keys = [(int(r[0] * r[1]), int(min(r[4], (-r[4]) % (r[0] * r[1])))) for r in sols]
    direct = ideals_kernel(D, k, B)
    pairs, selfconj = set(), set()
    for N, beta in direct:
        N, beta = int(N), int(beta)
        key = (N, min(beta, (-beta) % N))
        if beta == (-beta) % N:
            selfconj.add(key)
        else:
            pairs.add(key)
    sol_set = set(sol_keys)
    ok = len(sol_set) == len(sol_keys) and sol_set == pairs
    return ok, sol_set, pairs, selfconj


@dataclass(frozen=True)
class CuspReport:
    X: int
    k: int
    norm_bound: int
    solutions: int
    violations: int
    max_ratio: float

    @property
    def exponent(self) -> float:
        return 0.5 - 1.0 / self.k


def cusp_check(X: int, k: int, B: int) -> CuspReport:
    """Test lm >= D^(1/k), i.e. y = sqrt(D)/(lm) <= D^(1/2 - 1/k), on every
    solution with lm <= B over squarefree D = 2 mod 4, D < X.

    max_ratio is the largest y / D^(1/2 - 1/k) seen.
    """
    if k < 3 or k % 2 == 0:
        raise ValueError("k must be odd and at least 3")
    total = bad = 0
    worst = 0.0
    for D in hough_discriminants(X):
        D = int(D)
        sols = solutions_kernel(D, k, B)
        for row in sols:
            N = int(row[0] * row[1])
            total += 1
            if N**k < D:
                bad += 1
            worst = max(worst, math.sqrt(D) / N / D ** (0.5 - 1.0 / k))
    return CuspReport(int(X), k, int(B), total, bad, worst)

"""Integral binary cubic forms and the GL2(Z) action on them.

A form (a, b, c, d) stands for a*u^3 + b*u^2*v + c*u*v^2 + d*v^3.  A matrix
g = [[e11, e12], [e21, e22]] acts by (g.f)(u, v) = f(e11*u + e21*v,
e12*u + e22*v) / det g, which is a left action.

The public functions work on Python integers and are exact for any input
size.  Small inputs are routed through the compiled kernels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import mpmath

from . import _kernels as K

# Coefficients up to this size keep every kernel intermediate inside int64.
KERNEL_LIMIT = 1 << 12


class BinaryCubicForm(NamedTuple):
    a: int
    b: int
    c: int
    d: int

    def __call__(self, u, v):
        return self.a * u**3 + self.b * u * u * v + self.c * u * v * v + self.d * v**3


class UnimodularMap(NamedTuple):
    e11: int
    e12: int
    e21: int
    e22: int

    def det(self) -> int:
        return self.e11 * self.e22 - self.e12 * self.e21

    def is_unimodular(self) -> bool:
        return self.det() in (1, -1)

    def __matmul__(self, other: "UnimodularMap") -> "UnimodularMap":
        return UnimodularMap(*_matmul(self, other))


IDENTITY = UnimodularMap(1, 0, 0, 1)


@dataclass(frozen=True)
class CubicRingTable:
    """Multiplication table of the cubic ring on the basis (1, w, t).

    Products are stored as coordinate triples:  w*w = ww, t*t = tt, w*t = wt.
    """
    ww: tuple[int, int, int]
    tt: tuple[int, int, int]
    wt: tuple[int, int, int]

    def _basis_product(self, i, j):
        if i == 0:
            return tuple(1 if k == j else 0 for k in range(3))
        if j == 0:
            return tuple(1 if k == i else 0 for k in range(3))
        if i == 1 and j == 1:
            return self.ww
        if i == 2 and j == 2:
            return self.tt
        return self.wt

    def multiply(self, x, y):
        out = [0, 0, 0]
        for i in range(3):
            if not x[i]:
                continue
            for j in range(3):
                if not y[j]:
                    continue
                p = self._basis_product(i, j)
                for k in range(3):
                    out[k] += x[i] * y[j] * p[k]
        return tuple(out)

    def trace(self, x) -> int:
        # trace of multiplication by x, read off the diagonal
        tr = 0
        for j in range(3):
            e = tuple(1 if k == j else 0 for k in range(3))
            tr += self.multiply(x, e)[j]
        return tr

    def trace_form(self):
        basis = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
        return [[self.trace(self.multiply(u, v)) for v in basis] for u in basis]

    def discriminant(self) -> int:
        m = self.trace_form()
        return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))

    def is_associative(self) -> bool:
        basis = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
        for x in basis:
            for y in basis:
                for z in basis:
                    if self.multiply(self.multiply(x, y), z) != self.multiply(x, self.multiply(y, z)):
                        return False
        return True

    def is_commutative(self) -> bool:
        basis = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
        return all(self.multiply(x, y) == self.multiply(y, x) for x in basis for y in basis)


@dataclass(frozen=True)
class OrbitRecord:
    canonical: BinaryCubicForm
    disc: int
    stab: int
    irreducible: bool


def _as_form(f) -> BinaryCubicForm:
    if isinstance(f, BinaryCubicForm):
        return f
    a, b, c, d = (int(x) for x in f)
    return BinaryCubicForm(a, b, c, d)


def _as_map(g) -> UnimodularMap:
    if isinstance(g, UnimodularMap):
        return g
    return UnimodularMap(*(int(x) for x in g))


def _small(f) -> bool:
    return max(abs(x) for x in f) <= KERNEL_LIMIT


def _require_nondegenerate(f):
    if discriminant(f) == 0:
        raise ValueError(f"degenerate form {tuple(f)} (discriminant 0)")


# -- exact integer primitives -------------------------------------------------

def _disc(a, b, c, d):
    return b * b * c * c - 4 * a * c**3 - 4 * b**3 * d - 27 * a * a * d * d + 18 * a * b * c * d


def _act(g, f):
    p, q, r, s = g
    a, b, c, d = f
    a1 = a * p**3 + b * p * p * q + c * p * q * q + d * q**3
    b1 = (3 * a * p * p * r + b * (p * p * s + 2 * p * q * r)
          + c * (q * q * r + 2 * p * q * s) + 3 * d * q * q * s)
    c1 = (3 * a * p * r * r + b * (r * r * q + 2 * p * r * s)
          + c * (s * s * p + 2 * q * r * s) + 3 * d * q * s * s)
    d1 = a * r**3 + b * r * r * s + c * r * s * s + d * s**3
    if p * s - q * r < 0:
        return (-a1, -b1, -c1, -d1)
    return (a1, b1, c1, d1)


def _matmul(g, h):
    p1, q1, r1, s1 = g
    p2, q2, r2, s2 = h
    return (p1 * p2 + q1 * r2, p1 * q2 + q1 * s2, r1 * p2 + s1 * r2, r1 * q2 + s1 * s2)


# -- public operations --------------------------------------------------------

def discriminant(f) -> int:
    return _disc(*_as_form(f))


def apply(g, f) -> BinaryCubicForm:
    g = _as_map(g)
    if not g.is_unimodular():
        raise ValueError(f"map {tuple(g)} has determinant {g.det()}, not +-1")
    return BinaryCubicForm(*_act(g, _as_form(f)))


def hessian(f) -> tuple[int, int, int]:
    a, b, c, d = _as_form(f)
    return (b * b - 3 * a * c, b * c - 9 * a * d, c * c - 3 * b * d)


def _divisors(n):
    n = abs(n)
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def has_rational_zero(f) -> bool:
    """Whether f vanishes at some point of P^1(Q) (finite divisor test)."""
    a, b, c, d = _as_form(f)
    if a == 0 or d == 0:
        return True
    from math import gcd
    for q in _divisors(a):
        for p in _divisors(d):
            if gcd(p, q) != 1:
                continue
            for pp in (p, -p):
                if a * pp**3 + b * pp * pp * q + c * pp * q * q + d * q**3 == 0:
                    return True
    return False


def is_irreducible(f) -> bool:
    f = _as_form(f)
    _require_nondegenerate(f)
    return not has_rational_zero(f)


def ring_table(f) -> CubicRingTable:
    a, b, c, d = _as_form(f)
    return CubicRingTable(ww=(-a * c, -b, a), tt=(-b * d, -d, c), wt=(-a * d, 0, 0))


# -- canonical forms ----------------------------------------------------------

_MAPS = [tuple(int(x) for x in row) for row in K.SMALL_MAPS]


def _better(f, best):
    if not (f[0] > 0 or (f[0] == 0 and f[1] > 0)):
        return False
    return best is None or f < best


def _hessian_reduce(f):
    g = (1, 0, 0, 1)
    while True:
        P, Q, R = hessian(f)
        if Q <= -P or Q > P:
            k = (P - Q) // (2 * P)
            t = (1, 0, k, 1)
        elif P > R:
            t = (0, -1, 1, 0)
        else:
            return f, g
        f = _act(t, f)
        g = _matmul(t, g)


def _upper_root(f, dps):
    """Root in the upper half plane of a form with negative discriminant."""
    a, b, c, d = f
    with mpmath.workdps(dps):
        coeffs = [a, b, c, d] if a != 0 else [b, c, d]
        roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=4 * dps)
        z = max(roots, key=lambda r: mpmath.im(r))
        return mpmath.re(z), mpmath.im(z)


def _root_reduce(f, dps):
    g = (1, 0, 0, 1)
    with mpmath.workdps(dps):
        # points within tol of the boundary count as reduced; the candidate
        # search that follows settles ties exactly
        tol = mpmath.mpf(10) ** (10 - dps)
        while True:
            x, y = _upper_root(f, dps)
            if abs(x) > mpmath.mpf(1) / 2 + tol:
                k = int(mpmath.floor(x + mpmath.mpf(1) / 2))
                t = (1, 0, k, 1)
            elif x * x + y * y < 1 - tol:
                t = (0, -1, 1, 0)
            else:
                return f, g
            f = _act(t, f)
            g = _matmul(t, g)


def _canonical_reference(f, dps=40):
    """Exact-integer canonicalization with the covariant point at high precision.

    Follows the same recipe as the compiled kernel, so both must agree on
    every input where the kernel is not ambiguous.
    """
    f = tuple(f)
    D = _disc(*f)
    if D > 0:
        h, g0 = _hessian_reduce(f)
    else:
        h, g0 = _root_reduce(f, dps)
    best, best_map = None, None
    eps = mpmath.mpf(K.EPS)
    with mpmath.workdps(dps):
        for m in _MAPS:
            cand = _act(m, h)
            if D > 0:
                P, Q, R = hessian(cand)
                if not (abs(Q) <= P <= R):
                    continue
            else:
                x, y = _upper_root(cand, dps)
                if abs(x) > mpmath.mpf(1) / 2 + eps or x * x + y * y < 1 - eps:
                    continue
            if _better(cand, best):
                best, best_map = cand, _matmul(m, g0)
    stab = sum(1 for m in _MAPS if _act(m, best) == best)
    return best, best_map, stab


def _from_kernel(h, g0):
    # kernel result for the small form h = g0 . f, as a result for f; None if ambiguous
    r = K.canonical(*h)
    if r[9]:
        return None
    m = tuple(int(x) for x in r[4:8])
    return tuple(int(x) for x in r[:4]), _matmul(m, g0), int(r[8])


def _canonical(f):
    f = tuple(f)
    if _small(f):
        out = _from_kernel(f, (1, 0, 0, 1))
    else:
        # large coefficients: reduce exactly first, which usually makes the form small
        h, g0 = _hessian_reduce(f) if _disc(*f) > 0 else _root_reduce(f, 40)
        out = _from_kernel(h, g0) if _small(h) else None
    return out if out is not None else _canonical_reference(f)


def canonicalize(f) -> tuple[BinaryCubicForm, UnimodularMap]:
    """Canonical representative of the GL2(Z)-class of f and a map carrying f to it."""
    f = _as_form(f)
    _require_nondegenerate(f)
    rep, g, _ = _canonical(f)
    return BinaryCubicForm(*rep), UnimodularMap(*g)


def stabilizer_order(f) -> int:
    f = _as_form(f)
    _require_nondegenerate(f)
    return _canonical(f)[2]


def stabilizer_brute_force(f, bound: int = 5) -> int:
    """Count GL2(Z) maps with entries in [-bound, bound] fixing f."""
    f = tuple(_as_form(f))
    rng = range(-bound, bound + 1)
    n = 0
    for p in rng:
        for q in rng:
            for r in rng:
                for s in rng:
                    if abs(p * s - q * r) == 1 and _act((p, q, r, s), f) == f:
                        n += 1
    return n


def orbit_record(f) -> OrbitRecord:
    f = _as_form(f)
    _require_nondegenerate(f)
    rep, _, stab = _canonical(f)
    return OrbitRecord(BinaryCubicForm(*rep), _disc(*rep), stab, not has_rational_zero(rep))

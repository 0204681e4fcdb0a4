"""Class groups of imaginary quadratic orders through reduced binary
quadratic forms, and the two independent counts of their 3-torsion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from . import _kernels as K
from .census import field_discriminants, squarefree_mask
from .enumeration import FieldStream, _check_sign, enumerate_orbits
from .maximality import is_fundamental_discriminant


class QuadForm(tuple):
    """Positive definite form A x^2 + B x y + C y^2, stored as (A, B, C)."""

    def __new__(cls, A, B, C):
        return super().__new__(cls, (int(A), int(B), int(C)))

    A = property(lambda self: self[0])
    B = property(lambda self: self[1])
    C = property(lambda self: self[2])

    @property
    def disc(self) -> int:
        return self.B * self.B - 4 * self.A * self.C

    def is_reduced(self) -> bool:
        A, B, C = self
        if not (abs(B) <= A <= C):
            return False
        return B >= 0 or (abs(B) != A and A != C)

    def __repr__(self):
        return f"QuadForm{tuple(self)}"


def _check_disc(D):
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a negative discriminant")


def reduce_form(f) -> QuadForm:
    A, B, C = (int(x) for x in f)
    if A <= 0 or B * B - 4 * A * C >= 0:
        raise ValueError("form must be positive definite")
    while True:
        if B > A or B <= -A:
            k = (A - B) // (2 * A)
            C = A * k * k + B * k + C
            B = B + 2 * A * k
        elif A > C:
            A, B, C = C, -B, A
        else:
            break
    if A == C and B < 0:
        B = -B
    return QuadForm(A, B, C)


def principal_form(D) -> QuadForm:
    _check_disc(D)
    b = D % 2
    return QuadForm(1, b, (b - D) // 4)


def inverse(f) -> QuadForm:
    A, B, C = f
    return reduce_form((A, -B, C))


def reduced_forms(D) -> list[QuadForm]:
    """One reduced primitive form per class of discriminant D."""
    _check_disc(D)
    out = []
    A = 1
    while 3 * A * A <= -D:
        for B in range(-A + 1, A + 1):
            num = B * B - D
            if num % (4 * A):
                continue
            C = num // (4 * A)
            if C < A or (C == A and B < 0):
                continue
            if gcd(gcd(A, B), C) == 1:
                out.append(QuadForm(A, B, C))
        A += 1
    return out


def compose(f, g, D=None) -> QuadForm:
    """Gauss composition of primitive forms of equal discriminant (Shanks' form), reduced."""
    f, g = QuadForm(*f), QuadForm(*g)
    if D is None:
        D = f.disc
    if f.disc != D or g.disc != D:
        raise ValueError("forms have different discriminants")
    _check_disc(D)
    return QuadForm(*_compose_py(*f, *g))


def _ext(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def _compose_py(A1, B1, C1, A2, B2, C2):
    D = B1 * B1 - 4 * A1 * C1
    if A1 > A2:
        A1, B1, C1, A2, B2, C2 = A2, B2, C2, A1, B1, C1
    s = (B1 + B2) // 2
    n = B2 - s
    if A2 % A1 == 0:
        y1, d = 0, A1
    else:
        d, u, _ = _ext(A2, A1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, x2, y2 = _ext(s, d)
        y2 = -y2
    v1, v2 = A1 // d1, A2 // d1
    r = (y1 * y2 * n - x2 * C2) % v1
    B3 = B2 + 2 * v2 * r
    A3 = v1 * v2
    C3 = (B3 * B3 - D) // (4 * A3)
    return tuple(reduce_form((A3, B3, C3)))


def power(f, e: int) -> QuadForm:
    f = QuadForm(*f)
    r = principal_form(f.disc)
    while e > 0:
        if e & 1:
            r = compose(r, f)
        e >>= 1
        if e:
            f = compose(f, f)
    return r


@dataclass
class ClassGroup:
    D: int
    forms: list[QuadForm]
    table: dict = field(default_factory=dict, repr=False)

    @property
    def h(self) -> int:
        return len(self.forms)

    @property
    def identity(self) -> QuadForm:
        return principal_form(self.D)

    def mul(self, f, g) -> QuadForm:
        key = (f, g)
        if key not in self.table:
            self.table[key] = compose(f, g, self.D)
        return self.table[key]

    def order(self, f) -> int:
        e, g = 1, QuadForm(*f)
        while g != self.identity:
            g = self.mul(g, f)
            e += 1
        return e

    def torsion(self, k: int) -> list[QuadForm]:
        return [f for f in self.forms if power(f, k) == self.identity]


def class_group(D) -> ClassGroup:
    return ClassGroup(D, reduced_forms(D))


def k_torsion_count(D, k: int) -> int:
    """#{c in Cl(D) : c^k = 1} for odd k >= 3."""
    _check_disc(D)
    if k < 3 or k % 2 == 0:
        raise ValueError("k must be odd and at least 3")
    one = principal_form(D)
    return sum(1 for f in reduced_forms(D) if power(f, k) == one)


def cl3_table(discs) -> np.ndarray:
    """#Cl_3(D) for many negative discriminants at once (compiled route)."""
    discs = np.asarray(discs, dtype=np.int64)
    if len(discs) == 0:
        return np.zeros(0, dtype=np.int64)
    h = K.class_numbers(int(-discs.min()) + 1)
    return K.cl3_many(discs, h)


def class_numbers(N: int) -> np.ndarray:
    """h[n] for the discriminants -n, 0 < n < N (0 where -n is not one)."""
    return K.class_numbers(N)


def fundamental_discriminants(sign, X) -> np.ndarray:
    """Fundamental discriminants D with 0 < sign*D < X, ordered by |D|."""
    sign = _check_sign(sign)
    sf = squarefree_mask(X)
    n = np.arange(X)
    if sign < 0:
        odd = (n % 4 == 3) & sf[:X]
        m = n // 4
        even = (n % 4 == 0) & sf[m] & ((m % 4 == 1) | (m % 4 == 2))
    else:
        odd = (n % 4 == 1) & sf[:X] & (n > 1)
        m = n // 4
        even = (n % 4 == 0) & sf[m] & ((m % 4 == 2) | (m % 4 == 3))
    return sign * n[odd | even]


def cubic_field_multiplicities(sign, X, stream: FieldStream | None = None) -> dict[int, int]:
    """Number of cubic fields of each discriminant below X."""
    d = field_discriminants(sign, X, stream)
    vals, counts = np.unique(d, return_counts=True)
    return {int(v): int(c) for v, c in zip(vals, counts)}


def cl3_via_cubic(D: int, census) -> int:
    """1 + 2 m(D), m(D) being the number of cubic fields of discriminant D.

    census is a mapping from discriminant to field count or a FieldStream that
    reaches |D|.
    """
    if not is_fundamental_discriminant(D):
        raise ValueError(f"{D} is not a fundamental discriminant")
    if isinstance(census, FieldStream):
        if census.X <= abs(D):
            raise ValueError("census does not reach |D|")
        m = int(((census.discs == D) & census.maximal_mask()).sum())
    else:
        m = census.get(D, 0)
    return 1 + 2 * m


@dataclass(frozen=True)
class TorsionCensus:
    sign: int
    X: int
    discs: np.ndarray
    h: np.ndarray | None
    cl3: np.ndarray
    route: str

    @property
    def total(self) -> int:
        return int(self.cl3.sum())


def torsion_census(sign, X, route: str = "both", stream: FieldStream | None = None) -> TorsionCensus:
    """#Cl_3(D) for every fundamental D with 0 < sign*D < X.

    route 'cubic' uses 1 + 2 m(D); 'bqf' uses class groups (negative D only);
    'both' computes the two and raises on any disagreement.
    """
    sign = _check_sign(sign)
    if route not in ("cubic", "bqf", "both"):
        raise ValueError("route must be cubic, bqf or both")
    if sign > 0 and route != "cubic":
        raise ValueError("positive discriminants use the cubic route only")
    discs = fundamental_discriminants(sign, X)
    h = None
    via_cubic = via_bqf = None
    if route in ("cubic", "both"):
        if stream is None:
            stream = enumerate_orbits(sign, X)
        mult = cubic_field_multiplicities(sign, X, stream)
        via_cubic = np.array([1 + 2 * mult.get(int(D), 0) for D in discs], dtype=np.int64)
    if route in ("bqf", "both"):
        hh = K.class_numbers(int(X))
        h = hh[-discs]
        via_bqf = K.cl3_many(discs, hh)
    if route == "both" and not np.array_equal(via_cubic, via_bqf):
        bad = discs[via_cubic != via_bqf]
        raise AssertionError(f"routes disagree at D = {bad[:10].tolist()}")
    cl3 = via_bqf if via_bqf is not None else via_cubic
    return TorsionCensus(sign, int(X), discs, h, cl3, route)


def sum_cl3(sign, X, route: str = "both", stream: FieldStream | None = None) -> int:
    return torsion_census(sign, X, route, stream).total

"""Special values with error bounds, the main and secondary term constants
for cubic field and 3-torsion counts, and least-squares fitting of the
A X + B X^(5/6) model.

Arithmetic is carried out in mpmath floats; the algorithms (Euler-Maclaurin
for zeta, shifted Stirling for Gamma, accelerated Euler products) are our
own so that every value comes with an explicit truncation bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
from mpmath import mp, mpf

DEFAULT_DIGITS = 20
DEFAULT_CUTOFF = 10**7
# pi(x) < 1.25506 x / log x for x > 1 (Rosser-Schoenfeld)
_PI_CONST = 1.25506


# Bounded arithmetic runs at this many digits whatever the ambient precision,
# so combining values never loses more than the bounds allow
_ARITH_DPS = 80


@dataclass(frozen=True)
class Bounded:
    """A real value with an absolute error bound."""
    value: mpf
    bound: mpf
    method: str = ""

    def __float__(self):
        return float(self.value)

    def __neg__(self):
        return Bounded(-self.value, self.bound, self.method)

    def __add__(self, other):
        with mp.workdps(_ARITH_DPS):
            other = _lift(other)
            return Bounded(self.value + other.value, self.bound + other.bound)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        with mp.workdps(_ARITH_DPS):
            other = _lift(other)
            a, b = self.value, other.value
            ea, eb = self.bound, other.bound
            return Bounded(a * b, abs(a) * eb + abs(b) * ea + ea * eb)

    __rmul__ = __mul__

    def __truediv__(self, other):
        with mp.workdps(_ARITH_DPS):
            other = _lift(other)
            a, b = self.value, other.value
            ea, eb = self.bound, other.bound
            if eb >= abs(b):
                raise ZeroDivisionError("divisor not bounded away from zero")
            return Bounded(a / b, (abs(a) * eb / abs(b) + ea) / (abs(b) - eb))

    def __rtruediv__(self, other):
        return _lift(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 1:
            raise ValueError("only positive integer powers")
        r = self
        for _ in range(n - 1):
            r = r * self
        return r

    def contains(self, x, slack=0) -> bool:
        with mp.workdps(_ARITH_DPS):
            return abs(_real(x) - self.value) <= self.bound + _real(slack)


def _lift(x) -> Bounded:
    if isinstance(x, Bounded):
        return x
    with mp.workdps(_ARITH_DPS):
        return Bounded(_real(x), mpf(0))


def _real(x) -> mpf:
    """Convert at the current working precision; Fractions and strings stay exact until here."""
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


THIRD = Fraction(1, 3)


def _rounding(digits):
    return mpf(10) ** (-(digits + 8))


# -- zeta ------------------------------------------------------------------------

def zeta(s, digits: int = DEFAULT_DIGITS) -> Bounded:
    """zeta(s) for real s > -1, s != 1, by Euler-Maclaurin.

    zeta(s) = sum_{n<N} n^-s + N^(1-s)/(s-1) + N^-s/2
              + sum_j B_2j/(2j)! s(s+1)...(s+2j-2) N^(-s-2j+1) + R,
    and for real s the remainder is at most the first omitted term.
    """
    with mp.workdps(digits + 15):
        s = _real(s)
        if s <= -1 or s == 1:
            raise ValueError("zeta needs real s > -1 and s != 1")
        target = mpf(10) ** (-(digits + 3))
        N = 2 * digits + 20
        total = mp.fsum(mpf(n) ** (-s) for n in range(1, N))
        NN = mpf(N)
        total += NN ** (1 - s) / (s - 1) + NN ** (-s) / 2
        poch = s            # s (s+1) ... (s+2j-2)
        j = 1
        while True:
            term = mpmath.bernoulli(2 * j) / mpmath.factorial(2 * j) * poch * NN ** (-s - 2 * j + 1)
            if abs(term) < target or j > 4 * digits + 40:
                # term is the first omitted one
                return Bounded(+total, abs(term) + _rounding(digits) * N, "Euler-Maclaurin")
            total += term
            poch *= (s + 2 * j - 1) * (s + 2 * j)
            j += 1


def zeta_partial_sums(s=THIRD, digits: int = DEFAULT_DIGITS) -> Bounded:
    """zeta(s), 0 < s < 1, as the limit of sum_{a<=A} a^-s - A^(1-s)/(1-s).

    The partial sums are extrapolated in A over the basis
    {1, A^-s, A^-s-1, A^-s-3, A^-s-5} from five cutoffs; the bound is the
    change against the four-term fit on the largest cutoffs.
    """
    with mp.workdps(digits + 15):
        s = _real(s)
        if not 0 < s < 1:
            raise ValueError("partial-sum route needs 0 < s < 1")
        cuts = [1000 * 2**i for i in range(5)]
        sums = []
        acc = mpf(0)
        a = 0
        for A in cuts:
            acc += mp.fsum(mpf(n) ** (-s) for n in range(a + 1, A + 1))
            a = A
            sums.append(acc - mpf(A) ** (1 - s) / (1 - s))

        def fit(idx, exps):
            M = mpmath.matrix([[mpf(cuts[i]) ** e for e in exps] for i in idx])
            v = mpmath.matrix([sums[i] for i in idx])
            return mpmath.lu_solve(M, v)[0]

        exps = [0, -s, -s - 1, -s - 3, -s - 5]
        full = fit(range(5), exps)
        short = fit(range(1, 5), exps[:4])
        return Bounded(+full, abs(full - short) + _rounding(digits) * cuts[-1], "partial-sum extrapolation")


# -- Gamma -------------------------------------------------------------------------

def gamma(x, digits: int = DEFAULT_DIGITS) -> Bounded:
    """Gamma(x), x > 0, by Stirling's series at z = x + K and the recurrence.

    log Gamma(z) = (z - 1/2) log z - z + log(2 pi)/2
                   + sum_{j<=M} B_2j / (2j (2j-1) z^(2j-1)) + R,
    |R| <= |B_{2M+2}| / ((2M+2)(2M+1) z^(2M+1)) for z > 0.
    """
    with mp.workdps(digits + 15):
        x = _real(x)
        if x <= 0:
            raise ValueError("gamma needs x > 0")
        K = max(0, int(math.ceil(digits + 10 - float(x))))
        z = x + K
        target = mpf(10) ** (-(digits + 5))
        L = (z - mpf(1) / 2) * mp.log(z) - z + mp.log(2 * mp.pi) / 2
        j = 1
        while True:
            term = mpmath.bernoulli(2 * j) / (2 * j * (2 * j - 1) * z ** (2 * j - 1))
            if abs(term) < target:
                R = abs(term)
                break
            L += term
            j += 1
        shift = mp.fprod(x + i for i in range(K)) if K else mpf(1)
        val = mp.exp(L) / shift
        return Bounded(+val, abs(val) * 2 * R + abs(val) * _rounding(digits), "shifted Stirling")


# -- Euler products -----------------------------------------------------------------

def primes_up_to(P: int) -> np.ndarray:
    sieve = np.ones(P + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(P) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.flatnonzero(sieve)


def prime_tail(e: float, P: int) -> float:
    """Upper bound for sum_{p > P} p^-e, e > 1.

    Partial summation with pi(x) < 1.25506 x / log x gives
    e * 1.25506 * P^(1-e) / ((e-1) log P).
    """
    return _PI_CONST * e * P ** (1 - e) / ((e - 1) * math.log(P))


def _log_product(log1p_terms: np.ndarray) -> float:
    return math.fsum(log1p_terms.tolist())


def _tail_factor(c: float, e: float, P: int) -> float:
    """Relative bound on prod_{p>P} (1 + w_p) - 1 given |w_p| <= c p^-e <= 1/2."""
    tau = 2 * c * prime_tail(e, P)
    return math.expm1(tau)


def torsion_factor(p) -> float:
    return 1 - (p ** (1 / 3) + 1) / (p * (p + 1))


def torsion_partial_product(P: int) -> float:
    """prod_{p <= P} (1 - (p^(1/3) + 1) / (p (p + 1))) without acceleration."""
    p = primes_up_to(P).astype(np.float64)
    return math.exp(_log_product(np.log1p(-(np.cbrt(p) + 1) / (p * (p + 1)))))


def euler_product_torsion(cutoff: int = DEFAULT_CUTOFF, digits: int = DEFAULT_DIGITS) -> Bounded:
    """prod_p (1 - (p^(1/3) + 1) / (p (p + 1))).

    Each factor is (1 - p^-5/3)(1 - v_p) with
    v_p = (1 - p^-2/3) / (p (p+1) (1 - p^-5/3)), 0 < v_p < 1.46 p^-2, so the
    product is (1/zeta(5/3)) prod_p (1 - v_p) and the truncated tail is
    controlled by sum_{p>P} p^-2.
    """
    p = primes_up_to(cutoff).astype(np.float64)
    v = (1 - p ** (-2 / 3)) / (p * (p + 1) * (1 - p ** (-5 / 3)))
    head = math.exp(_log_product(np.log1p(-v)))
    rel = _tail_factor(1.46, 2.0, cutoff) + 1e-15 * len(p)
    prod = Bounded(mpf(head), mpf(head * rel))
    out = prod / zeta(Fraction(5, 3), digits)
    return Bounded(out.value, out.bound, f"accelerated product, primes <= {cutoff}")


def hough_product(k: int, cutoff: int = DEFAULT_CUTOFF) -> Bounded:
    """prod_{p>2} (1 + (p^-1/k - p^(-1+2/k) - p^(-1+1/k) - p^-1) / (p + 1)).

    For k = 3 the terms are O(p^-5/3) and the product is taken directly
    (|u_p| <= 2 p^-5/3).  For k >= 5 the factor (1 - p^(-1-1/k))^-1 is
    split off as zeta(1 + 1/k)(1 - 2^(-1-1/k)); what remains has
    |w_p| <= 5 p^(-2+2/k).
    """
    _check_k(k)
    p = primes_up_to(cutoff)[1:].astype(np.float64)
    u = (p ** (-1 / k) - p ** (-1 + 2 / k) - p ** (-1 + 1 / k) - 1 / p) / (p + 1)
    if k == 3:
        head = math.exp(_log_product(np.log1p(u)))
        rel = _tail_factor(2.0, 5 / 3, cutoff) + 1e-15 * len(p)
        return Bounded(mpf(head), mpf(head * rel), f"direct product, primes <= {cutoff}")
    w = (1 + u) * (1 - p ** (-1 - 1 / k)) - 1
    head = math.exp(_log_product(np.log1p(w)))
    rel = _tail_factor(5.0, 2 - 2 / k, cutoff) + 1e-15 * len(p)
    s = Fraction(k + 1, k)
    z = zeta(s) * (1 - mpf(2) ** (-_real(s)))
    out = Bounded(mpf(head), mpf(head * rel)) * z
    return Bounded(out.value, out.bound, f"accelerated product, primes <= {cutoff}")


def _check_k(k):
    if not isinstance(k, int) or k < 3 or k % 2 == 0:
        raise ValueError("k must be an odd integer >= 3")


def hough_constant(k: int, cutoff: int = DEFAULT_CUTOFF, digits: int = DEFAULT_DIGITS) -> Bounded:
    """The conjectured secondary coefficient C_{1,k} (coefficient of X^(1/2+1/k))."""
    _check_k(k)
    z = zeta(Fraction(k - 2, k), digits) / zeta(2, digits)
    g = gamma(Fraction(1, 2), digits) * gamma(Fraction(k - 2, 2 * k), digits) / gamma(Fraction(k - 1, k), digits)
    with mp.workdps(digits + 15):
        two = 1 - mpf(2) ** (mpf(1) / k) + mpf(2) ** (1 - mpf(1) / k)
        out = z * g * two * hough_product(k, cutoff) / (6 * k)
    return Bounded(out.value, out.bound, "zeta, Gamma and product")


# -- main and secondary term constants -------------------------------------------------

C_SIGN = {1: 1, -1: 3}


def K_SIGN(sign) -> mpf:
    return mpf(1) if sign > 0 else mp.sqrt(3)


@dataclass(frozen=True)
class SpecialValues:
    zeta3: Bounded
    zeta13: Bounded
    zeta53: Bounded
    gamma23: Bounded
    euler_torsion: Bounded

    def cubic_secondary(self) -> Bounded:
        """4 zeta(1/3) / (5 Gamma(2/3)^3 zeta(5/3))."""
        return 4 * self.zeta13 / (5 * self.gamma23**3 * self.zeta53)

    def torsion_secondary(self) -> Bounded:
        """8 zeta(1/3) prod_p(...) / (5 Gamma(2/3)^3)."""
        return 8 * self.zeta13 * self.euler_torsion / (5 * self.gamma23**3)


@lru_cache(maxsize=8)
def special_values(digits: int = DEFAULT_DIGITS, cutoff: int = DEFAULT_CUTOFF) -> SpecialValues:
    return SpecialValues(
        zeta(3, digits),
        zeta(THIRD, digits),
        zeta(Fraction(5, 3), digits),
        gamma(Fraction(2, 3), digits),
        euler_product_torsion(cutoff, digits),
    )


@dataclass(frozen=True)
class PredictionModel:
    sign: int
    A: float
    B: float
    provenance: str

    def __call__(self, X):
        X = np.asarray(X, dtype=np.float64)
        return self.A * X + self.B * X ** (5 / 6)


def _sign(sign) -> int:
    from .enumeration import _check_sign
    return _check_sign(sign)


def formula_model(sign, theorem: str = "cubic") -> PredictionModel:
    sign = _sign(sign)
    sv = special_values()
    with mp.workdps(30):
        if theorem == "cubic":
            A = C_SIGN[sign] / (12 * sv.zeta3.value)
            B = K_SIGN(sign) * sv.cubic_secondary().value
        elif theorem == "torsion":
            A = (3 + C_SIGN[sign]) / mp.pi**2
            B = K_SIGN(sign) * sv.torsion_secondary().value
        else:
            raise ValueError("theorem must be cubic or torsion")
    return PredictionModel(sign, float(A), float(B), "formula")


def predicted_counts(sign, X, theorem: str = "cubic") -> float:
    if X <= 0:
        raise ValueError("X must be positive")
    return float(formula_model(sign, theorem)(X))


def weighted_main_coefficient(sign) -> float:
    """Leading coefficient of the count of classes weighted by 1/|Stab|."""
    return math.pi**2 / (72 if _sign(sign) > 0 else 24)


@dataclass(frozen=True)
class FitResult:
    A: float
    B: float
    residual: float
    grid: tuple

    def model(self, sign=1) -> PredictionModel:
        return PredictionModel(sign, self.A, self.B, "fitted")


def fit_secondary(grid) -> FitResult:
    """Least squares for count ~ A X + B X^(5/6) over pairs (X, count)."""
    pts = [(float(x), float(c)) for x, c in grid]
    xs = np.array([x for x, _ in pts])
    if len(pts) < 2 or len(set(xs.tolist())) < 2:
        raise ValueError("need at least two distinct X")
    if np.any(xs <= 0):
        raise ValueError("X must be positive")
    ys = np.array([c for _, c in pts])
    M = np.column_stack([xs, xs ** (5 / 6)])
    scale = np.abs(M).max(axis=0)
    sol, *_ = np.linalg.lstsq(M / scale, ys, rcond=None)
    A, B = sol / scale
    res = float(np.linalg.norm(M @ np.array([A, B]) - ys))
    return FitResult(float(A), float(B), res, tuple(xs.tolist()))


def minkowski_bound(n: int, s: int) -> float:
    """(n^n / n!)^2 (pi/4)^(2s): a lower bound for |disc| of a degree n field
    with s pairs of complex embeddings."""
    if n < 1 or s < 0 or 2 * s > n:
        raise ValueError("need n >= 1 and 0 <= 2s <= n")
    # in logs, so that large n does not overflow the intermediate n^n
    return math.exp(2 * (n * math.log(n) - math.lgamma(n + 1)) + 2 * s * math.log(math.pi / 4))


def _named(b: Bounded, method: str) -> Bounded:
    return Bounded(b.value, b.bound, method)


def constants_report(digits: int = DEFAULT_DIGITS, cutoff: int = DEFAULT_CUTOFF) -> list[tuple[str, Bounded]]:
    """Every constant used by the predictions, in a fixed order."""
    sv = special_values(digits, cutoff)
    out = [
        ("zeta(3)", sv.zeta3),
        ("zeta(1/3)", sv.zeta13),
        ("zeta(1/3) partial sums", zeta_partial_sums(THIRD, digits)),
        ("zeta(5/3)", sv.zeta53),
        ("Gamma(2/3)", sv.gamma23),
        ("torsion Euler product", sv.euler_torsion),
        ("cubic secondary coefficient", _named(sv.cubic_secondary(), "combined from the values above")),
        ("torsion secondary coefficient", _named(sv.torsion_secondary(), "combined from the values above")),
    ]
    for k in (3, 5):
        out.append((f"C_1,{k}", hough_constant(k, cutoff, digits)))
    return out

"""Counting functions over enumerated class streams."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels as K
from .enumeration import FieldStream, _check_sign, _check_X, enumerate_orbits
from .maximality import factorize, is_prime, is_squarefree


@dataclass(frozen=True)
class CensusTable:
    sign: int
    X: int
    modulus: int
    counts: tuple[int, ...]
    total: int


@dataclass(frozen=True)
class SieveTerm:
    q: int
    mu: int
    count: int


@dataclass(frozen=True)
class WeightedCount:
    sign: int
    X: int
    value: Fraction


def mobius(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def _stream(sign, X, stream: FieldStream | None) -> FieldStream:
    """Irreducible classes below X, from the given stream when it reaches X."""
    sign, X = _check_sign(sign), _check_X(X)
    if stream is not None:
        if stream.sign != sign:
            raise ValueError("stream has the wrong sign")
        s = stream.truncate(X) if stream.X > X else stream
        if s.X < X:
            raise ValueError(f"stream only reaches {stream.X}")
        return s.irreducible_only()
    return enumerate_orbits(sign, X)


def _weight_sum(stab: np.ndarray, weights=None) -> Fraction:
    # every stabilizer order divides 6
    w = 6 // stab
    if weights is not None:
        w = w * weights
    return Fraction(int(w.sum()), 6)


def count_cubic_fields(sign, X, stream: FieldStream | None = None) -> int:
    s = _stream(sign, X, stream)
    return int(s.maximal_mask().sum())


def field_discriminants(sign, X, stream: FieldStream | None = None) -> np.ndarray:
    """Discriminants of the cubic fields with 0 < sign*disc < X (with repeats)."""
    s = _stream(sign, X, stream)
    return s.discs[s.maximal_mask()]


def count_weighted_classes(sign, X, stream: FieldStream | None = None) -> WeightedCount:
    s = _stream(sign, X, stream)
    return WeightedCount(s.sign, s.X, _weight_sum(s.stab))


def census_by_progression(sign, X, m: int, stream: FieldStream | None = None) -> CensusTable:
    if not 1 <= m <= 10**4:
        raise ValueError("modulus must lie in [1, 10000]")
    d = field_discriminants(sign, X, stream)
    counts = np.bincount(d % m, minlength=m)
    return CensusTable(_check_sign(sign), int(X), m, tuple(int(c) for c in counts), int(counts.sum()))


def count_nonmaximal_q(sign, q: int, X, stream: FieldStream | None = None) -> SieveTerm:
    """Irreducible classes nonmaximal at every prime dividing q."""
    if q < 1 or not is_squarefree(q):
        raise ValueError(f"{q} is not squarefree")
    s = _stream(sign, X, stream)
    nmq = s.nonmaximal_moduli()
    return SieveTerm(q, mobius(q), int((nmq % q == 0).sum()))


def mobius_assembly(sign, X, stream: FieldStream | None = None) -> tuple[int, list[SieveTerm]]:
    """Sum over squarefree q of mu(q) N(q, X).

    N(q, X) vanishes once q^2 exceeds X / 23 (the smallest |disc| of an
    irreducible class is 23), so the sum is finite.
    """
    s = _stream(sign, X, stream)
    terms = []
    q = 1
    while q * q * 23 <= X:
        if is_squarefree(q):
            terms.append(count_nonmaximal_q(sign, q, X, s))
        q += 1
    return sum(t.mu * t.count for t in terms), terms


# -- the nonmaximality identity -----------------------------------------------

def all_classes(sign, X) -> FieldStream:
    """Every nondegenerate class (reducible included) with 0 < sign*disc < X."""
    return enumerate_orbits(sign, X, include_reducible=True)


def _truncated(s: FieldStream, Y) -> FieldStream:
    # strict bound 0 < |disc| < Y with a possibly fractional Y
    n = int(np.searchsorted(np.abs(s.discs), Y, side="left"))
    return FieldStream(s.sign, s.X, s.forms[:n], s.discs[:n], s.stab[:n], s.irreducible[:n])


def root_incidence_count(s: FieldStream, p: int, Y) -> Fraction:
    """Sum over classes with |disc| < Y of (#zeros of f mod p in P^1(F_p)) / |Stab|."""
    t = _truncated(s, Y)
    return _weight_sum(t.stab, K.root_incidence(t.forms, p))


def verify_bst_identity(p: int, sign, X, stream: FieldStream | None = None):
    """Both sides of the nonmaximality identity at p.

    lhs: classes nonmaximal at p, weighted by 1/|Stab|.
    rhs: P(X/p^2) - P(X/p^4) + T(X/p^4), with P the root-incidence count and
    T the weighted number of classes.  All nondegenerate classes take part.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    sign, X = _check_sign(sign), _check_X(X)
    s = stream if stream is not None else all_classes(sign, X)
    if s.X < X:
        raise ValueError("stream too short")
    s = _truncated(s, X)
    nonmax = np.array([K.nonmaximal_at(*row, p) for row in s.forms], dtype=bool) \
        if len(s) else np.zeros(0, dtype=bool)
    lhs = _weight_sum(s.stab[nonmax])
    Y2 = Fraction(X, p * p)
    Y4 = Fraction(X, p**4)
    # |disc| < Y for rational Y is |disc| < ceil(Y)
    c2, c4 = -(-Y2.numerator // Y2.denominator), -(-Y4.numerator // Y4.denominator)
    rhs = (root_incidence_count(s, p, c2) - root_incidence_count(s, p, c4)
           + _weight_sum(_truncated(s, c4).stab))
    return lhs, rhs


def bst_offenders(p: int, sign, X, stream: FieldStream | None = None):
    """Classes nonmaximal at p, listed for diagnosis when the identity fails."""
    s = stream if stream is not None else all_classes(sign, X)
    s = _truncated(s, X)
    return [s.record(i) for i in range(len(s)) if K.nonmaximal_at(*s.forms[i], p)]


# -- quadratic fields -------------------------------------------------------------

def squarefree_mask(N: int) -> np.ndarray:
    """mask[n] is True iff n is squarefree (0 <= n <= N)."""
    mask = np.ones(N + 1, dtype=bool)
    mask[0] = False
    p = 2
    while p * p <= N:
        mask[p * p::p * p] = False
        p += 1
    return mask


def count_quadratic_fields(X: int) -> int:
    """Number of fundamental discriminants D with |D| < X."""
    if X < 1 or X > 10**8:
        raise ValueError("X must lie in [1, 1e8]")
    if X <= 3:
        return 0
    sf = squarefree_mask(X)
    n = np.arange(X + 1)
    total = 0
    # D = n or -n with n < X
    # D = 1 mod 4 squarefree: positive n = 1 mod 4 (n > 1), negative n = 3 mod 4
    total += int((sf[5:X:4]).sum())
    total += int((sf[3:X:4]).sum())
    # D = 4m, m = 2, 3 mod 4 squarefree: positive m = 2, 3 mod 4; negative m = 1, 2 mod 4
    M = (X - 1) // 4
    m = n[1:M + 1]
    sm = sf[1:M + 1]
    total += int((sm & ((m % 4 == 2) | (m % 4 == 3))).sum())
    total += int((sm & ((m % 4 == 1) | (m % 4 == 2))).sum())
    return total

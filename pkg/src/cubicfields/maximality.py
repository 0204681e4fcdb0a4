"""Local conditions at primes and the dual exponential sums of the
nonmaximality indicator.

The U_p test: f is nonmaximal at p exactly when p divides every coefficient,
or f has a root r in P^1(F_p) with f'(r) = 0 mod p and f(r~) = 0 mod p^2 for
a lift r~.  A double root mod p makes the second condition independent of the
lift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numba import njit

from . import _kernels as K
from .forms import _as_form, _require_nondegenerate, discriminant


@dataclass(frozen=True)
class LocalProfile:
    p: int
    maximal: bool
    totally_ramified: bool


@dataclass(frozen=True)
class MaximalityProfile:
    profiles: tuple[LocalProfile, ...]
    fundamental_disc: bool

    @property
    def maximal(self) -> bool:
        return all(pr.maximal for pr in self.profiles)


@dataclass(frozen=True)
class DualSumReport:
    q: int
    density_nonmaximal: Fraction
    abs_sum: float
    term_count: int


def factorize(n: int) -> dict[int, int]:
    n = abs(n)
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return factorize(p) == {p: 1}


def is_squarefree(n: int) -> bool:
    return n != 0 and all(e == 1 for e in factorize(n).values())


def _require_prime(p):
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")


def _require_squarefree(q):
    if q < 1 or not is_squarefree(q):
        raise ValueError(f"{q} is not a positive squarefree integer")


def _nonmaximal_residue(f, p) -> bool:
    a, b, c, d = (x % (p * p) for x in f)
    if a % p == 0 and b % p == 0 and c % p == 0 and d % p == 0:
        return True
    # the point at infinity is a root iff p | a; double iff also p | b
    if a == 0 and b % p == 0:
        return True
    p2 = p * p
    for r in range(p):
        if (((a * r + b) * r + c) * r + d) % p2 == 0 and ((3 * a * r + 2 * b) * r + c) % p == 0:
            return True
    return False


def is_maximal_at(f, p: int) -> bool:
    f = _as_form(f)
    _require_nondegenerate(f)
    _require_prime(p)
    return not _nonmaximal_residue(f, p)


def is_totally_ramified_at(f, p: int) -> bool:
    """f mod p is a nonzero multiple of the cube of a linear form."""
    f = _as_form(f)
    _require_nondegenerate(f)
    _require_prime(p)
    a, b, c, d = (x % p for x in f)
    if (a, b, c, d) == (0, 0, 0, 0):
        return False
    for lam in range(1, p):
        # lam * (u + r v)^3 and lam * v^3
        if (a, b, c, d) == (0, 0, 0, lam):
            return True
        for r in range(p):
            if (a, b, c, d) == (lam, 3 * lam * r % p, 3 * lam * r * r % p, lam * r**3 % p):
                return True
    return False


def is_fundamental_discriminant(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def maximality_profile(f) -> MaximalityProfile:
    f = _as_form(f)
    _require_nondegenerate(f)
    D = discriminant(f)
    profiles = []
    for p, e in sorted(factorize(D).items()):
        if e >= 2:
            profiles.append(LocalProfile(p, not _nonmaximal_residue(f, p),
                                         is_totally_ramified_at(f, p)))
    return MaximalityProfile(tuple(profiles), is_fundamental_discriminant(D))


# -- the indicator Phi_q and its Fourier transform ----------------------------

def phi_q(x, q: int) -> int:
    _require_squarefree(q)
    x = tuple(int(v) for v in x)
    return int(all(_nonmaximal_residue(x, p) for p in factorize(q)))


@njit(cache=True)
def _indicator_grid(q, primes):
    n = q * q
    out = np.zeros((n, n, n, n), dtype=np.uint8)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(n):
                    ok = True
                    for p in primes:
                        if not K.nonmaximal_at(a, b, c, d, p):
                            ok = False
                            break
                    if ok:
                        out[a, b, c, d] = 1
    return out


def indicator_grid(q: int) -> np.ndarray:
    """Phi_q on the whole residue grid (Z/q^2)^4."""
    _require_squarefree(q)
    primes = np.array(sorted(factorize(q)), dtype=np.int64)
    return _indicator_grid(q, primes)


def _local_count(p):
    return p**8 - (p * p - 1) * (p**3 - 1) * p**3


def nonmaximal_residue_count(q: int) -> int:
    """Number of residues mod q^2 nonmaximal at every p | q.

    Uses the exhaustive grid for q <= 7 and the local densities (each prime
    contributes p^8 (1 - (1 - p^-2)(1 - p^-3))) otherwise.
    """
    _require_squarefree(q)
    if q <= 7:
        return int(indicator_grid(q).sum(dtype=np.int64))
    out = 1
    for p in factorize(q):
        out *= _local_count(p)
    return out


def phihat_table(q: int) -> np.ndarray:
    """Phi-hat_q(x) for every x mod q^2, indexed by x.

    The FFT gives F(k) = sum_y Phi(y) e(-k.y/q^2) for every k.  The pairing is
    [x, y] = k.y with k = (x4, -x3/3, x2/3, -x1), and since Phi is real the
    positive-sign transform is the conjugate.
    """
    if math.gcd(q, 3) != 1:
        raise ValueError("q must be coprime to 3")
    _require_squarefree(q)
    n = q * q
    inv3 = pow(3, -1, n)
    r = np.arange(n)
    F = np.conj(np.fft.fftn(indicator_grid(q).astype(np.float64))) / float(q) ** 8
    H = F[np.ix_(r, (-inv3 * r) % n, (inv3 * r) % n, (-r) % n)]
    return H.transpose(3, 2, 1, 0)


def phihat_direct(q: int, x) -> complex:
    """Phi-hat_q(x) from the defining double sum (oracle)."""
    if math.gcd(q, 3) != 1:
        raise ValueError("q must be coprime to 3")
    n = q * q
    inv3 = pow(3, -1, n)
    x1, x2, x3, x4 = (int(v) % n for v in x)
    k = np.array([x4, (-inv3 * x3) % n, (inv3 * x2) % n, (-x1) % n], dtype=np.int64)
    grid = indicator_grid(q)
    ys = np.argwhere(grid)
    phase = (ys @ k) % n
    return complex(np.exp(2j * np.pi * phase / n).sum() / float(q) ** 8)


def _abs_fourier_sum(grid, single):
    """Sum of |FFT| over the full spectrum from the half spectrum of a real grid."""
    n = grid.shape[-1]
    F = np.fft.rfftn(grid.astype(np.float32 if single else np.float64))
    A = np.abs(F)
    del F
    total = 2.0 * A.sum(dtype=np.float64) - A[..., 0].sum(dtype=np.float64)
    if n % 2 == 0:
        total -= A[..., -1].sum(dtype=np.float64)
    return float(total)


def phihat_abs_sum(q: int, direct: bool = False) -> DualSumReport:
    """Sum over x of |Phi-hat_q(x)|.

    Prime q is computed from the full transform in double precision.
    Composite q is assembled from its prime factors by multiplicativity,
    unless direct=True, which transforms the whole (Z/q^2)^4 grid in single
    precision (about 40 s and 2.5 GB at q = 10).
    """
    if math.gcd(q, 3) != 1:
        raise ValueError("q must be coprime to 3")
    _require_squarefree(q)
    density = Fraction(nonmaximal_residue_count(q), q**8)
    if q == 1:
        return DualSumReport(1, Fraction(1), 1.0, 1)
    primes = sorted(factorize(q))
    if len(primes) == 1 or direct:
        total = _abs_fourier_sum(indicator_grid(q), single=len(primes) > 1) / float(q) ** 8
    else:
        total = 1.0
        for p in primes:
            total *= phihat_abs_sum(p).abs_sum
    return DualSumReport(q, density, total, q**8)

"""Compiled inner loops for binary cubic forms.

Everything here works on int64 coefficients and is only called with inputs
the Python layer has already range-checked.  The covariant point of a form is
the root in the upper half plane of its Hessian (disc > 0) or of the form
itself (disc < 0); a form is *reduced* when that point lies in the standard
fundamental domain F of SL2(Z).
"""

import math

import numpy as np
from numba import njit

# Thickening of F used to define the canonical candidate set for disc < 0.
EPS = 1e-6
# Membership tests closer than this to the thickened boundary are reported as
# ambiguous and re-decided at high precision by the caller.
AMBIG = 1e-9


def _small_maps(bound):
    maps = []
    rng = range(-bound, bound + 1)
    for p in rng:
        for q in rng:
            for r in rng:
                for s in rng:
                    if abs(p * s - q * r) == 1:
                        maps.append((p, q, r, s))
    maps.sort(key=lambda m: (max(abs(x) for x in m), m))
    return np.array(maps, dtype=np.int64)


# Every GL2(Z) element carrying a point of F into the thickened domain has
# entries bounded by 2 (checked against bound 3 in the test-suite).
SMALL_MAPS = _small_maps(2)


@njit(cache=True)
def disc(a, b, c, d):
    return b * b * c * c - 4 * a * c * c * c - 4 * b * b * b * d - 27 * a * a * d * d + 18 * a * b * c * d


@njit(cache=True)
def act(p, q, r, s, a, b, c, d):
    """(g.f)(u, v) = f(p*u + r*v, q*u + s*v) / det g  for g = [[p, q], [r, s]]."""
    a1 = a * p * p * p + b * p * p * q + c * p * q * q + d * q * q * q
    b1 = (3 * a * p * p * r + b * (p * p * s + 2 * p * q * r)
          + c * (q * q * r + 2 * p * q * s) + 3 * d * q * q * s)
    c1 = (3 * a * p * r * r + b * (r * r * q + 2 * p * r * s)
          + c * (s * s * p + 2 * q * r * s) + 3 * d * q * s * s)
    d1 = a * r * r * r + b * r * r * s + c * r * s * s + d * s * s * s
    if p * s - q * r < 0:
        return -a1, -b1, -c1, -d1
    return a1, b1, c1, d1


@njit(cache=True)
def matmul(p1, q1, r1, s1, p2, q2, r2, s2):
    return (p1 * p2 + q1 * r2, p1 * q2 + q1 * s2,
            r1 * p2 + s1 * r2, r1 * q2 + s1 * s2)


@njit(cache=True)
def hessian(a, b, c, d):
    return b * b - 3 * a * c, b * c - 9 * a * d, c * c - 3 * b * d


@njit(cache=True)
def quad_subst(P, Q, R, p, q, r, s):
    """H(p*u + r*v, q*u + s*v) for H = P x^2 + Q x y + R y^2."""
    P1 = P * p * p + Q * p * q + R * q * q
    Q1 = 2 * P * p * r + Q * (p * s + q * r) + 2 * R * q * s
    R1 = P * r * r + Q * r * s + R * s * s
    return P1, Q1, R1


@njit(cache=True)
def _cbrt(x):
    if x >= 0.0:
        return x ** (1.0 / 3.0)
    return -((-x) ** (1.0 / 3.0))


@njit(cache=True)
def _polish(a, b, c, d, t):
    for _ in range(4):
        fx = ((a * t + b) * t + c) * t + d
        dfx = (3.0 * a * t + 2.0 * b) * t + c
        if dfx == 0.0:
            break
        step = fx / dfx
        t -= step
        if abs(step) <= 1e-16 * (1.0 + abs(t)):
            break
    return t


@njit(cache=True)
def real_roots(a, b, c, d):
    """Real roots of a x^3 + b x^2 + c x + d (a != 0), as (n, r0, r1, r2)."""
    fa = float(a)
    B = b / fa
    C = c / fa
    Dd = d / fa
    p = C - B * B / 3.0
    q = 2.0 * B * B * B / 27.0 - B * C / 3.0 + Dd
    delta = q * q / 4.0 + p * p * p / 27.0
    if delta > 0.0 or p >= 0.0:
        sq = math.sqrt(max(delta, 0.0))
        u = _cbrt(-q / 2.0 + sq)
        v = _cbrt(-q / 2.0 - sq)
        t = _polish(fa, float(b), float(c), float(d), u + v - B / 3.0)
        return 1, t, 0.0, 0.0
    m = 2.0 * math.sqrt(-p / 3.0)
    arg = 3.0 * q / (p * m)
    arg = min(1.0, max(-1.0, arg))
    th = math.acos(arg) / 3.0
    r0 = _polish(fa, float(b), float(c), float(d), m * math.cos(th) - B / 3.0)
    r1 = _polish(fa, float(b), float(c), float(d), m * math.cos(th - 2.0 * math.pi / 3.0) - B / 3.0)
    r2 = _polish(fa, float(b), float(c), float(d), m * math.cos(th - 4.0 * math.pi / 3.0) - B / 3.0)
    return 3, r0, r1, r2


@njit(cache=True)
def complex_point(a, b, c, d):
    """Root in the upper half plane of a form with negative discriminant."""
    if a == 0:
        fb = float(b)
        x = -c / (2.0 * fb)
        y = math.sqrt(max(4.0 * fb * d - float(c) * c, 0.0)) / (2.0 * abs(fb))
        return x, y
    _, t, _, _ = real_roots(a, b, c, d)
    fa = float(a)
    e1 = b + fa * t
    if abs(t) > 1.0:
        e2 = -d / t
    else:
        e2 = c + e1 * t
    x = -e1 / (2.0 * fa)
    y = math.sqrt(max(4.0 * fa * e2 - e1 * e1, 0.0)) / (2.0 * abs(fa))
    return x, y


@njit(cache=True)
def mobius(p, q, r, s, x, y):
    """Image of the covariant point x+iy under the map g = [[p, q], [r, s]].

    Roots transform by the matrix [[s, -r], [-q, p]]; for det g = -1 the image
    lies in the lower half plane and is conjugated back.
    """
    # w = (s z - r) / (-q z + p)
    nr = s * x - r
    ni = s * y
    dr = -q * x + p
    di = -q * y
    den = dr * dr + di * di
    wr = (nr * dr + ni * di) / den
    wi = (ni * dr - nr * di) / den
    return wr, abs(wi)


@njit(cache=True)
def reduce_pos(a, b, c, d):
    """Hessian (Gauss) reduction; exact.  Returns reduced form and map."""
    P, Q, R = hessian(a, b, c, d)
    gp, gq, gr, gs = 1, 0, 0, 1
    for _ in range(10000):
        if Q <= -P or Q > P:
            k = (P - Q) // (2 * P)
            a, b, c, d = act(1, 0, k, 1, a, b, c, d)
            P, Q, R = quad_subst(P, Q, R, 1, 0, k, 1)
            gp, gq, gr, gs = matmul(1, 0, k, 1, gp, gq, gr, gs)
        elif P > R:
            a, b, c, d = act(0, -1, 1, 0, a, b, c, d)
            P, Q, R = R, -Q, P
            gp, gq, gr, gs = matmul(0, -1, 1, 0, gp, gq, gr, gs)
        else:
            break
    return a, b, c, d, gp, gq, gr, gs


@njit(cache=True)
def reduce_neg(a, b, c, d):
    """Move the complex root into F; the point is recomputed after every step."""
    gp, gq, gr, gs = 1, 0, 0, 1
    for _ in range(10000):
        x, y = complex_point(a, b, c, d)
        if abs(x) > 0.5 + 1e-12:
            k = np.int64(math.floor(x + 0.5))
            a, b, c, d = act(1, 0, k, 1, a, b, c, d)
            gp, gq, gr, gs = matmul(1, 0, k, 1, gp, gq, gr, gs)
        elif x * x + y * y < 1.0 - 1e-12:
            a, b, c, d = act(0, -1, 1, 0, a, b, c, d)
            gp, gq, gr, gs = matmul(0, -1, 1, 0, gp, gq, gr, gs)
        else:
            break
    return a, b, c, d, gp, gq, gr, gs


@njit(cache=True)
def _in_thick_domain(x, y):
    """(inside, ambiguous) for the thickened fundamental domain."""
    m1 = 0.5 + EPS - abs(x)
    m2 = x * x + y * y - (1.0 - EPS)
    amb = abs(m1) < AMBIG or abs(m2) < AMBIG
    return m1 >= 0.0 and m2 >= 0.0, amb


@njit(cache=True)
def _better(a, b, c, d, ba, bb, bc, bd, have):
    if not (a > 0 or (a == 0 and b > 0)):
        return False
    if not have:
        return True
    if a != ba:
        return a < ba
    if b != bb:
        return b < bb
    if c != bc:
        return c < bc
    return d < bd


@njit(cache=True)
def canonical_with(a, b, c, d, maps):
    """Canonical form using the given candidate map list (see canonical)."""
    D = disc(a, b, c, d)
    amb = False
    if D > 0:
        fa, fb, fc, fd, gp, gq, gr, gs = reduce_pos(a, b, c, d)
        P, Q, R = hessian(fa, fb, fc, fd)
    else:
        fa, fb, fc, fd, gp, gq, gr, gs = reduce_neg(a, b, c, d)
        zx, zy = complex_point(fa, fb, fc, fd)
    have = False
    ba = bb = bc = bd = np.int64(0)
    bp = bq = br = bs = np.int64(0)
    for i in range(maps.shape[0]):
        p, q, r, s = maps[i, 0], maps[i, 1], maps[i, 2], maps[i, 3]
        if D > 0:
            P1, Q1, R1 = quad_subst(P, Q, R, p, q, r, s)
            if not (abs(Q1) <= P1 and P1 <= R1):
                continue
            na, nb, nc, nd = act(p, q, r, s, fa, fb, fc, fd)
        else:
            wx, wy = mobius(p, q, r, s, zx, zy)
            if abs(wx) > 0.5 + 10 * EPS or wx * wx + wy * wy < 1.0 - 10 * EPS:
                continue
            na, nb, nc, nd = act(p, q, r, s, fa, fb, fc, fd)
            px, py = complex_point(na, nb, nc, nd)
            inside, am = _in_thick_domain(px, py)
            amb = amb or am
            if not inside:
                continue
        if _better(na, nb, nc, nd, ba, bb, bc, bd, have):
            have = True
            ba, bb, bc, bd = na, nb, nc, nd
            bp, bq, br, bs = matmul(p, q, r, s, gp, gq, gr, gs)
    stab = 0
    for i in range(maps.shape[0]):
        p, q, r, s = maps[i, 0], maps[i, 1], maps[i, 2], maps[i, 3]
        na, nb, nc, nd = act(p, q, r, s, ba, bb, bc, bd)
        if na == ba and nb == bb and nc == bc and nd == bd:
            stab += 1
    return ba, bb, bc, bd, bp, bq, br, bs, stab, amb


@njit(cache=True)
def canonical(a, b, c, d):
    """Canonical representative of the GL2(Z)-class of a nondegenerate form.

    Returns (a, b, c, d, p, q, r, s, stab, ambiguous) where [[p, q], [r, s]]
    carries the input to the representative and stab is the stabilizer order.
    """
    return canonical_with(a, b, c, d, SMALL_MAPS)


@njit(cache=True)
def canonical_batch(forms):
    n = forms.shape[0]
    out = np.empty((n, 4), dtype=np.int64)
    stab = np.empty(n, dtype=np.int64)
    amb = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        r = canonical(forms[i, 0], forms[i, 1], forms[i, 2], forms[i, 3])
        out[i, 0] = r[0]
        out[i, 1] = r[1]
        out[i, 2] = r[2]
        out[i, 3] = r[3]
        stab[i] = r[8]
        amb[i] = r[9]
    return out, stab, amb


@njit(cache=True)
def has_rational_root(a, b, c, d):
    """Exact rational-root decision for a nondegenerate integral cubic form.

    Candidate roots p/q have q | a; numerically located real roots fix p, and
    the verdict is checked exactly.
    """
    if a == 0 or d == 0:
        return True
    n, r0, r1, r2 = real_roots(a, b, c, d)
    aa = abs(a)
    for q in range(1, aa + 1):
        if aa % q != 0:
            continue
        for j in range(n):
            t = r0 if j == 0 else (r1 if j == 1 else r2)
            p = np.int64(math.floor(t * q + 0.5))
            for pp in range(p - 1, p + 2):
                if a * pp * pp * pp + b * pp * pp * q + c * pp * q * q + d * q * q * q == 0:
                    return True
    return False


@njit(cache=True)
def nonmaximal_at(a, b, c, d, p):
    """True when the form fails the Davenport-Heilbronn condition at p."""
    p2 = p * p
    a %= p2
    b %= p2
    c %= p2
    d %= p2
    if a % p == 0 and b % p == 0 and c % p == 0 and d % p == 0:
        return True
    if a == 0 and b % p == 0:
        return True
    for r in range(p):
        fr = (((a * r) % p2 + b) * r % p2 + c) * r % p2 + d
        if fr % p2 == 0:
            fu = ((3 * a * r + 2 * b) * r + c) % p
            if fu == 0:
                return True
    return False


# ---------------------------------------------------------------------------
# enumeration

Y0 = math.sqrt(3.0) / 2.0


@njit(cache=True)
def _push(buf, n, a, b, c, d):
    if n == buf.shape[0]:
        nb = np.empty((2 * buf.shape[0], 4), dtype=np.int64)
        nb[:n] = buf[:n]
        buf = nb
    buf[n, 0] = a
    buf[n, 1] = b
    buf[n, 2] = c
    buf[n, 3] = d
    return buf, n + 1


@njit(cache=True)
def _d_window(a, b, c, lo, hi):
    """Float interval of d on which lo < disc(a, b, c, d) < hi may hold.

    disc is a concave quadratic in d (linear when a = 0).  The interval is
    padded by one unit; callers recheck disc exactly.
    """
    A2 = -27.0 * a * a
    A1 = 18.0 * a * b * c - 4.0 * b * b * b
    A0 = float(b) * b * c * c - 4.0 * a * float(c) * c * c
    if a == 0:
        if A1 == 0.0:
            return 1.0, 0.0
        t1 = (lo - A0) / A1
        t2 = (hi - A0) / A1
        return min(t1, t2) - 1.0, max(t1, t2) + 1.0
    # A2 d^2 + A1 d + A0 - lo > 0
    disc2 = A1 * A1 - 4.0 * A2 * (A0 - lo)
    if disc2 < 0.0:
        return 1.0, 0.0
    sq = math.sqrt(disc2)
    r1 = (-A1 + sq) / (2.0 * A2)
    r2 = (-A1 - sq) / (2.0 * A2)
    return min(r1, r2) - 1.0, max(r1, r2) + 1.0


@njit(cache=True)
def _in_F_loose(a, b, c, d):
    x, y = complex_point(a, b, c, d)
    return abs(x) <= 0.5 + 1e-7 and x * x + y * y >= 1.0 - 1e-7


@njit(cache=True)
def _hess_reduced(a, b, c, d):
    P, Q, R = hessian(a, b, c, d)
    return abs(Q) <= P and P <= R


@njit(cache=True)
def reduced_candidates_neg(X, a_lo, a_hi):
    """Forms with a in [a_lo, a_hi], -X < disc < 0 and complex root in F.

    Every class with a representative of leading coefficient in the slice is
    hit at least once.  The root z = x + iy and the real root t give
    b = -3ax + B', c = 3ax^2 - 2xB' + ay^2, d = -ax^3 + x^2 B' - axy^2 + B'y^2
    with B' = a(x - t), and a^2 y^3 + B'^2 y = sqrt|disc| / 2.
    """
    Mx = math.sqrt(float(X)) / 2.0
    buf = np.empty((1024, 4), dtype=np.int64)
    n = 0
    for a in range(a_lo, a_hi + 1):
        rem = Mx - a * a * Y0 ** 3
        if rem < 0.0:
            break
        Bm = math.sqrt(rem / Y0) + 1e-9
        if a > 0:
            ymax2 = (Mx / (a * a)) ** (2.0 / 3.0)
        else:
            ymax2 = 0.0
        bmax = np.int64(math.floor(1.5 * a + Bm))
        for b in range(-bmax, bmax + 1):
            Bb = min(Bm, abs(b) + 1.5 * a)
            if a > 0:
                t = min(0.5, Bb / (2.0 * a))
                clo = np.int64(math.ceil(2.0 * a * t * t - 2.0 * Bb * t + a - 1e-9))
                chi = np.int64(math.floor(0.75 * a + Bb + a * ymax2 + 1e-9))
                dmax = a / 8.0 + Bb / 4.0 + a * ymax2 / 2.0 + Bb * ymax2 + 1.0
            else:
                if b == 0:
                    continue
                clo = -abs(b)
                chi = abs(b)
                dmax = 1e300
            for c in range(clo, chi + 1):
                lo, hi = _d_window(a, b, c, -float(X), 0.0)
                lo = max(lo, -dmax)
                hi = min(hi, dmax)
                if lo > hi:
                    continue
                for d in range(np.int64(math.ceil(lo)), np.int64(math.floor(hi)) + 1):
                    D = disc(a, b, c, d)
                    if D >= 0 or D <= -X:
                        continue
                    if not _in_F_loose(a, b, c, d):
                        continue
                    buf, n = _push(buf, n, a, b, c, d)
    return buf[:n].copy()


@njit(cache=True)
def reduced_candidates_pos(X, a_lo, a_hi):
    """Forms with a in [a_lo, a_hi], 0 < disc < X and reduced Hessian.

    With the Hessian root z = x + iy the form is a rotated multiple of
    Re((u + iv)^3) after moving z to i:  b = -3ax + B',
    c = 3ax^2 - 2xB' - 3ay^2, d = -ax^3 + x^2 B' + 3axy^2 - B'y^2/3 and
    a^2 y^3 + B'^2 y / 9 = (disc / 108)^(1/2).
    """
    sx = (float(X) / 108.0) ** 0.25
    buf = np.empty((1024, 4), dtype=np.int64)
    n = 0
    for a in range(a_lo, a_hi + 1):
        rem = sx * sx - a * a * Y0 ** 3
        if rem < 0.0:
            break
        Bm = 3.0 * math.sqrt(rem / Y0) + 1e-9
        if a > 0:
            ymax2 = (sx / a) ** (4.0 / 3.0)
        else:
            ymax2 = 0.0
        bmax = np.int64(math.floor(1.5 * a + Bm))
        for b in range(-bmax, bmax + 1):
            Bb = min(Bm, abs(b) + 1.5 * a)
            if a > 0:
                clo = np.int64(math.ceil(-Bb - 3.0 * a * ymax2 - 1e-9))
                chi = np.int64(math.floor(Bb - 1.5 * a + 1e-9))
                dmax = a / 8.0 + Bb / 4.0 + 1.5 * a * ymax2 + Bb * ymax2 / 3.0 + 1.0
            else:
                if b == 0:
                    continue
                clo = -abs(b)
                chi = abs(b)
                dmax = 1e300
            for c in range(clo, chi + 1):
                lo, hi = _d_window(a, b, c, 0.0, float(X))
                lo = max(lo, -dmax)
                hi = min(hi, dmax)
                if lo > hi:
                    continue
                for d in range(np.int64(math.ceil(lo)), np.int64(math.floor(hi)) + 1):
                    D = disc(a, b, c, d)
                    if D <= 0 or D >= X:
                        continue
                    if not _hess_reduced(a, b, c, d):
                        continue
                    buf, n = _push(buf, n, a, b, c, d)
    return buf[:n].copy()


@njit(cache=True)
def box_scan(sign, X, H):
    """Irreducible forms with 1 <= a <= H, |b|, |c|, |d| <= H, 0 < sign*disc < X."""
    buf = np.empty((1024, 4), dtype=np.int64)
    n = 0
    for a in range(1, H + 1):
        for b in range(-H, H + 1):
            for c in range(-H, H + 1):
                if sign > 0:
                    lo, hi = _d_window(a, b, c, 0.0, float(X))
                else:
                    lo, hi = _d_window(a, b, c, -float(X), 0.0)
                lo = max(lo, -float(H))
                hi = min(hi, float(H))
                if lo > hi:
                    continue
                for d in range(np.int64(math.ceil(lo)), np.int64(math.floor(hi)) + 1):
                    D = disc(a, b, c, d) * sign
                    if D <= 0 or D >= X:
                        continue
                    if has_rational_root(a, b, c, d):
                        continue
                    buf, n = _push(buf, n, a, b, c, d)
    return buf[:n].copy()


@njit(cache=True)
def reducible_scan(sign, X):
    """Forms (0, b, c, d) with b > 0, -b < c <= b and 0 < sign*disc < X.

    Every reducible class has such a representative (send a rational root to
    infinity, then shear), so this is an independent source of all reducible
    classes.
    """
    buf = np.empty((1024, 4), dtype=np.int64)
    n = 0
    b = 1
    while b * b <= X:
        for c in range(-b + 1, b + 1):
            if sign > 0:
                lo, hi = _d_window(0, b, c, 0.0, float(X))
            else:
                lo, hi = _d_window(0, b, c, -float(X), 0.0)
            for d in range(np.int64(math.ceil(lo)), np.int64(math.floor(hi)) + 1):
                D = disc(0, b, c, d) * sign
                if D <= 0 or D >= X:
                    continue
                buf, n = _push(buf, n, 0, b, c, d)
        b += 1
    return buf[:n].copy()


@njit(cache=True)
def irreducible_flags(forms):
    n = forms.shape[0]
    out = np.empty(n, dtype=np.bool_)
    for i in range(n):
        out[i] = not has_rational_root(forms[i, 0], forms[i, 1], forms[i, 2], forms[i, 3])
    return out


# ---------------------------------------------------------------------------
# local conditions over whole streams

@njit(cache=True)
def spf_sieve(N):
    spf = np.zeros(N + 1, dtype=np.int32)
    for i in range(2, N + 1):
        if spf[i] == 0:
            spf[i] = i
            if i * i <= N:
                for j in range(i * i, N + 1, i):
                    if spf[j] == 0:
                        spf[j] = i
    return spf


@njit(cache=True)
def nonmaximal_moduli(forms, discs, spf):
    """Product of the primes at which each form is nonmaximal."""
    n = forms.shape[0]
    out = np.ones(n, dtype=np.int64)
    for i in range(n):
        m = abs(discs[i])
        q = np.int64(1)
        while m > 1:
            p = np.int64(spf[m])
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            if e >= 2 and nonmaximal_at(forms[i, 0], forms[i, 1], forms[i, 2], forms[i, 3], p):
                q *= p
        out[i] = q
    return out


@njit(cache=True)
def root_incidence(forms, p):
    """Number of zeros in P^1(F_p) of each form reduced mod p (p + 1 if f = 0)."""
    n = forms.shape[0]
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        a = forms[i, 0] % p
        b = forms[i, 1] % p
        c = forms[i, 2] % p
        d = forms[i, 3] % p
        if a == 0 and b == 0 and c == 0 and d == 0:
            out[i] = p + 1
            continue
        k = 1 if a == 0 else 0
        for r in range(p):
            if (((a * r + b) * r + c) * r + d) % p == 0:
                k += 1
        out[i] = k
    return out


# ---------------------------------------------------------------------------
# binary quadratic forms of negative discriminant

@njit(cache=True)
def _xgcd(a, b):
    """(g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b != 0:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


@njit(cache=True)
def qf_reduce(A, B, C):
    """Reduce a positive definite form: |B| <= A <= C, B >= 0 if |B| = A or A = C."""
    while True:
        if B > A or B <= -A:
            # B -> B + 2Ak into (-A, A]
            k = (A - B) // (2 * A)
            C = A * k * k + B * k + C
            B = B + 2 * A * k
        elif A > C:
            A, B, C = C, -B, A
        else:
            break
    if A == C and B < 0:
        B = -B
    return A, B, C


@njit(cache=True)
def qf_compose(A1, B1, C1, A2, B2, C2):
    """Gauss composition of primitive forms of the same discriminant, reduced."""
    D = B1 * B1 - 4 * A1 * C1
    if A1 > A2:
        A1, B1, C1, A2, B2, C2 = A2, B2, C2, A1, B1, C1
    s = (B1 + B2) // 2
    n = B2 - s
    if A2 % A1 == 0:
        y1 = 0
        d = A1
    else:
        d, u, v = _xgcd(A2, A1)
        y1 = u
    if s % d == 0:
        y2 = -1
        x2 = 0
        d1 = d
    else:
        d1, x2, y2 = _xgcd(s, d)
        y2 = -y2
    v1 = A1 // d1
    v2 = A2 // d1
    r = (y1 * y2 * n - x2 * C2) % v1
    B3 = B2 + 2 * v2 * r
    A3 = v1 * v2
    C3 = (B3 * B3 - D) // (4 * A3)
    return qf_reduce(A3, B3, C3)


@njit(cache=True)
def qf_power(A, B, C, e):
    D = B * B - 4 * A * C
    rA = 1
    rB = D & 1
    rC = (rB * rB - D) // 4
    bA, bB, bC = A, B, C
    while e > 0:
        if e & 1:
            rA, rB, rC = qf_compose(rA, rB, rC, bA, bB, bC)
        e >>= 1
        if e:
            bA, bB, bC = qf_compose(bA, bB, bC, bA, bB, bC)
    return rA, rB, rC


@njit(cache=True)
def _gcd(a, b):
    a = abs(a)
    b = abs(b)
    while b:
        a, b = b, a % b
    return a


@njit(cache=True)
def class_numbers(N):
    """h[n] = number of reduced primitive forms of discriminant -n, n < N."""
    h = np.zeros(N, dtype=np.int64)
    A = 1
    while 3 * A * A < N:
        for B in range(-A + 1, A + 1):
            # C >= A, and C = A needs B >= 0
            C = A if B >= 0 else A + 1
            while True:
                n = 4 * A * C - B * B
                if n >= N:
                    break
                if _gcd(_gcd(A, B), C) == 1:
                    h[n] += 1
                C += 1
        A += 1
    return h


@njit(cache=True)
def _form_index(SA, SB, SC, m, A, B, C):
    for i in range(m):
        if SA[i] == A and SB[i] == B and SC[i] == C:
            return i
    return -1


@njit(cache=True)
def torsion_from_sylow(D, h, ell, k):
    """#{classes c : c^k = 1} where k is a power of the prime ell.

    The ell-Sylow subgroup is built as the span of g^m (h = ell^e m) for
    reduced forms g taken in order, until it has ell^e elements; then its
    elements are tested directly.
    """
    n = -D
    e = 0
    m = h
    while m % ell == 0:
        m //= ell
        e += 1
    size = 1
    for _ in range(e):
        size *= ell
    if size == 1:
        return 1
    SA = np.empty(size, dtype=np.int64)
    SB = np.empty(size, dtype=np.int64)
    SC = np.empty(size, dtype=np.int64)
    SA[0] = 1
    SB[0] = n & 1
    SC[0] = (SB[0] * SB[0] + n) // 4
    cnt = 1
    A = 1
    while cnt < size:
        A += 1
        if 3 * A * A > n:
            break
        for B in range(-A + 1, A + 1):
            if (B + n) % 2 != 0:
                continue
            num = B * B + n
            if num % (4 * A) != 0:
                continue
            C = num // (4 * A)
            if C < A or (C == A and B < 0) or _gcd(_gcd(A, B), C) != 1:
                continue
            sA, sB, sC = qf_power(A, B, C, m)
            if _form_index(SA, SB, SC, cnt, sA, sB, sC) >= 0:
                continue
            # extend the subgroup by powers of s
            base = cnt
            cA, cB, cC = sA, sB, sC
            while _form_index(SA, SB, SC, base, cA, cB, cC) < 0:
                for i in range(base):
                    tA, tB, tC = qf_compose(SA[i], SB[i], SC[i], cA, cB, cC)
                    SA[cnt] = tA
                    SB[cnt] = tB
                    SC[cnt] = tC
                    cnt += 1
                cA, cB, cC = qf_compose(cA, cB, cC, sA, sB, sC)
            if cnt >= size:
                break
    out = 0
    for i in range(cnt):
        tA, tB, tC = qf_power(SA[i], SB[i], SC[i], k)
        if tA == 1:
            out += 1
    return out


@njit(cache=True)
def cl3_many(discs, h):
    """#Cl_3(D) for each negative discriminant D, given h[-D]."""
    out = np.empty(discs.shape[0], dtype=np.int64)
    for i in range(discs.shape[0]):
        D = discs[i]
        hh = h[-D]
        if hh % 3 != 0:
            out[i] = 1
        else:
            out[i] = torsion_from_sylow(D, hh, 3, 3)
    return out

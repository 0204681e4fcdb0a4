"""Enumeration of GL2(Z)-classes of integral binary cubic forms by discriminant.

The production enumerator walks the forms whose covariant point lies in the
fundamental domain (coefficient loops bounded by the reduction inequalities),
canonicalizes every hit and deduplicates.  The oracle scans a plain
coefficient box and doubles the box until the counts stop moving.
"""

from __future__ import annotations

import hashlib
import io
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from . import _kernels as K
from .forms import BinaryCubicForm, OrbitRecord, _canonical_reference

CACHE_VERSION = 1
CACHE_ENV = "CUBICFIELDS_CACHE"
HEADER = "disc,a,b,c,d,stab,irreducible"


def _check_sign(sign) -> int:
    if sign in (1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise ValueError(f"sign must be + or -, got {sign!r}")


def _check_X(X) -> int:
    X = int(X)
    if X < 1 or X > 10**9:
        raise ValueError(f"discriminant bound must lie in [1, 1e9], got {X}")
    return X


class FieldStream:
    """Sorted, duplicate-free sequence of orbit records with 0 < sign*disc < X.

    Records are kept column-wise in numpy arrays; iterating yields OrbitRecord
    values.  Order: |disc| ascending, then the canonical coefficients.
    """

    def __init__(self, sign, X, forms, discs, stab, irreducible, complete=True, source="built"):
        self.sign = _check_sign(sign)
        self.X = int(X)
        self.forms = np.asarray(forms, dtype=np.int64).reshape(-1, 4)
        self.discs = np.asarray(discs, dtype=np.int64)
        self.stab = np.asarray(stab, dtype=np.int64)
        self.irreducible = np.asarray(irreducible, dtype=bool)
        self.complete = complete
        self.source = source
        self._nmq = None

    def __len__(self):
        return len(self.discs)

    def __iter__(self) -> Iterator[OrbitRecord]:
        for i in range(len(self)):
            yield self.record(i)

    def record(self, i) -> OrbitRecord:
        a, b, c, d = (int(v) for v in self.forms[i])
        return OrbitRecord(BinaryCubicForm(a, b, c, d), int(self.discs[i]),
                           int(self.stab[i]), bool(self.irreducible[i]))

    def truncate(self, X) -> "FieldStream":
        """Prefix with |disc| < X (the stream is sorted by |disc|)."""
        if X > self.X:
            raise ValueError(f"stream built to {self.X} cannot serve {X}")
        n = int(np.searchsorted(np.abs(self.discs), X, side="left"))
        return FieldStream(self.sign, X, self.forms[:n], self.discs[:n], self.stab[:n],
                           self.irreducible[:n], self.complete, self.source)

    def irreducible_only(self) -> "FieldStream":
        m = self.irreducible
        return FieldStream(self.sign, self.X, self.forms[m], self.discs[m], self.stab[m],
                           self.irreducible[m], self.complete, self.source)

    def nonmaximal_moduli(self) -> np.ndarray:
        """Per record, the product of the primes where it is nonmaximal."""
        if self._nmq is None:
            spf = K.spf_sieve(max(int(np.abs(self.discs).max(initial=1)), 2))
            self._nmq = K.nonmaximal_moduli(self.forms, self.discs, spf)
        return self._nmq

    def maximal_mask(self) -> np.ndarray:
        return self.nonmaximal_moduli() == 1

    def same_records(self, other: "FieldStream") -> bool:
        return (self.sign == other.sign and np.array_equal(self.forms, other.forms)
                and np.array_equal(self.discs, other.discs)
                and np.array_equal(self.stab, other.stab)
                and np.array_equal(self.irreducible, other.irreducible))


@dataclass(frozen=True)
class EnumerationTask:
    sign: int
    X: int
    slices: tuple[tuple[int, int], ...] = field(default=())

    @classmethod
    def make(cls, sign, X, threads: int = 1, include_reducible: bool = False):
        sign, X = _check_sign(sign), _check_X(X)
        return cls(sign, X, leading_slices(sign, X, threads, include_reducible))


def max_leading(sign, X) -> int:
    """Upper bound on the leading coefficient of a reduced form."""
    y0 = math.sqrt(3.0) / 2.0
    if sign < 0:
        return int(math.sqrt(math.sqrt(X) / 2.0 / y0**3)) + 1
    return int((X / 108.0) ** 0.25 / y0**1.5) + 1


def leading_slices(sign, X, parts: int = 1, include_reducible: bool = False):
    """Disjoint ranges of leading coefficients covering [a_min, max_leading]."""
    lo = 0 if include_reducible else 1
    hi = max_leading(sign, X)
    parts = max(1, min(parts, hi - lo + 1))
    edges = np.linspace(lo, hi + 1, parts + 1).astype(int)
    return tuple((int(edges[i]), int(edges[i + 1]) - 1) for i in range(parts)
                 if edges[i + 1] > edges[i])


def _finish(sign, X, raw, complete=True) -> FieldStream:
    """Canonicalize, deduplicate and sort raw representatives."""
    if len(raw) == 0:
        e = np.empty(0, dtype=np.int64)
        return FieldStream(sign, X, np.empty((0, 4), dtype=np.int64), e, e, e.astype(bool), complete)
    can, stab, amb = K.canonical_batch(raw)
    for i in np.flatnonzero(amb):
        rep, _, st = _canonical_reference(tuple(int(v) for v in raw[i]))
        can[i] = rep
        stab[i] = st
    can, idx = np.unique(can, axis=0, return_index=True)
    stab = stab[idx]
    discs = _discs(can)
    irr = K.irreducible_flags(can)
    order = np.lexsort((can[:, 3], can[:, 2], can[:, 1], can[:, 0], np.abs(discs)))
    return FieldStream(sign, X, can[order], discs[order], stab[order], irr[order], complete)


def _discs(forms):
    a, b, c, d = (forms[:, i] for i in range(4))
    return b * b * c * c - 4 * a * c**3 - 4 * b**3 * d - 27 * a * a * d * d + 18 * a * b * c * d


def enumerate_orbits(sign, X, include_reducible: bool = False, threads: int = 1) -> FieldStream:
    """All classes with 0 < sign*disc < X (irreducible only unless asked).

    The slices are processed one after another and merged before sorting, so
    the output does not depend on the number of slices.
    """
    task = EnumerationTask.make(sign, X, threads, include_reducible)
    gen = K.reduced_candidates_pos if task.sign > 0 else K.reduced_candidates_neg
    chunks = [gen(task.X, lo, hi) for lo, hi in task.slices]
    raw = np.concatenate(chunks) if chunks else np.empty((0, 4), dtype=np.int64)
    if not include_reducible:
        raw = raw[K.irreducible_flags(raw)]
    return _finish(task.sign, task.X, raw)


def reducible_orbits(sign, X) -> FieldStream:
    """Reducible classes from the independent (0, b, c, d) scan."""
    sign, X = _check_sign(sign), _check_X(X)
    return _finish(sign, X, K.reducible_scan(sign, X))


def oracle_enumerate(sign, X, H: int | None = None, max_H: int = 512) -> FieldStream:
    """Irreducible classes found in a coefficient box, saturated by doubling.

    Starting from H (default 2 X^(1/4)), the box is doubled until two
    consecutive doublings leave the class list unchanged.  If max_H is hit
    first the stream is returned with complete=False.
    """
    sign, X = _check_sign(sign), _check_X(X)
    if H is None:
        H = max(2, math.ceil(2 * X**0.25))
    history = []
    while True:
        s = _finish(sign, X, K.box_scan(sign, X, H))
        history.append(s)
        if len(history) >= 3 and history[-1].same_records(history[-2]) \
                and history[-2].same_records(history[-3]):
            s.complete = True
            s.source = f"oracle H={H // 4}"
            return s
        if 2 * H > max_H:
            s.complete = False
            s.source = f"oracle H={H} (unsaturated)"
            return s
        H *= 2


# -- cache ----------------------------------------------------------------

def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "cubicfields"


def _cache_name(sign, X):
    return f"fields_{'plus' if sign > 0 else 'minus'}_v{CACHE_VERSION}_{X}.csv"


def _body(stream: FieldStream) -> str:
    rows = np.column_stack([stream.discs, stream.forms, stream.stab,
                            stream.irreducible.astype(np.int64)])
    buf = io.StringIO()
    buf.write(HEADER + "\n")
    if len(rows):
        np.savetxt(buf, rows, fmt="%d", delimiter=",")
    return buf.getvalue()


def write_cache(stream: FieldStream, cache_dir) -> Path:
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    body = _body(stream)
    digest = hashlib.sha256(body.encode()).hexdigest()
    manifest = (f"# cubicfields cache\n# version={CACHE_VERSION}\n"
                f"# sign={'+' if stream.sign > 0 else '-'}\n# max_disc={stream.X}\n"
                f"# records={len(stream)}\n")
    path = cache_dir / _cache_name(stream.sign, stream.X)
    fd, tmp = tempfile.mkstemp(dir=cache_dir, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(manifest)
            fh.write(body)
            fh.write(f"#sha256:{digest}\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def read_cache(path, sign, X) -> FieldStream | None:
    """Parse a cache file; None when the manifest, version or checksum is off."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError:
        return None
    lines = text.split("\n")
    meta = {}
    i = 0
    while i < len(lines) and lines[i].startswith("# "):
        if "=" in lines[i]:
            k, v = lines[i][2:].split("=", 1)
            meta[k.strip()] = v.strip()
        i += 1
    if (meta.get("version") != str(CACHE_VERSION)
            or meta.get("sign") != ("+" if sign > 0 else "-")
            or meta.get("max_disc") != str(X)):
        return None
    tail = [j for j in range(len(lines)) if lines[j].startswith("#sha256:")]
    if not tail:
        return None
    j = tail[-1]
    body = "\n".join(lines[i:j]) + "\n"
    if hashlib.sha256(body.encode()).hexdigest() != lines[j][len("#sha256:"):].strip():
        return None
    if not body.startswith(HEADER + "\n"):
        return None
    try:
        data = np.loadtxt(io.StringIO(body), delimiter=",", dtype=np.int64, skiprows=1, ndmin=2)
    except ValueError:
        return None
    if data.size == 0:
        data = np.empty((0, 7), dtype=np.int64)
    if str(len(data)) != meta.get("records"):
        return None
    return FieldStream(sign, X, data[:, 1:5], data[:, 0], data[:, 5], data[:, 6].astype(bool),
                       True, "cache")


def load_or_build_cache(task: EnumerationTask, cache_dir=None) -> FieldStream:
    """Irreducible classes for the task, served from disk when possible.

    Any valid cache for the same sign with a larger bound serves the request by
    truncation.  Invalid files are ignored and the stream is rebuilt.
    """
    cache_dir = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    prefix = f"fields_{'plus' if task.sign > 0 else 'minus'}_v{CACHE_VERSION}_"
    candidates = []
    if cache_dir.is_dir():
        for p in cache_dir.glob(prefix + "*.csv"):
            try:
                Xc = int(p.stem[len(prefix):])
            except ValueError:
                continue
            if Xc >= task.X:
                candidates.append((Xc, p))
    for Xc, p in sorted(candidates):
        s = read_cache(p, task.sign, Xc)
        if s is not None:
            out = s.truncate(task.X) if Xc > task.X else s
            out.source = "cache"
            return out
    stream = enumerate_orbits(task.sign, task.X, threads=max(1, len(task.slices)))
    write_cache(stream, cache_dir)
    return stream

import numpy as np
import pytest

from cubicfields import enumeration as E, forms as F


def _maximal_abs_discs(s):
    return sorted(int(abs(d)) for d in s.discs[s.maximal_mask()])


def test_oracle_small_examples():
    s = E.oracle_enumerate(-1, 100)
    assert s.complete
    assert _maximal_abs_discs(s) == [23, 31, 44, 59, 76, 83, 87]
    s = E.oracle_enumerate(1, 50)
    assert _maximal_abs_discs(s) == [49]
    assert _maximal_abs_discs(E.oracle_enumerate(-1, 23)) == []


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("X", [10**3, 10**4])
def test_oracle_equivalence(sign, X):
    fast = E.enumerate_orbits(sign, X)
    slow = E.oracle_enumerate(sign, X)
    assert slow.complete
    assert fast.same_records(slow)


def test_oracle_reports_unsaturated_box():
    s = E.oracle_enumerate(-1, 10**4, H=2, max_H=4)
    assert not s.complete


@pytest.mark.parametrize("sign", [1, -1])
def test_stream_invariants(sign):
    X = 3 * 10**4
    s = E.enumerate_orbits(sign, X)
    assert np.all(sign * s.discs > 0) and np.all(np.abs(s.discs) < X)
    keys = [(abs(int(d)),) + tuple(int(v) for v in f) for d, f in zip(s.discs, s.forms)]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)
    # canonicalizing a record returns the record
    for i in range(0, len(s), max(1, len(s) // 300)):
        f = tuple(int(v) for v in s.forms[i])
        assert tuple(F.canonicalize(f)[0]) == f
        assert F.stabilizer_order(f) == int(s.stab[i])
        assert F.is_irreducible(f) == bool(s.irreducible[i])


@pytest.mark.parametrize("sign", [1, -1])
def test_threads_give_identical_streams(sign):
    base = E.enumerate_orbits(sign, 10**5, threads=1)
    for t in (4, 8):
        assert E._body(E.enumerate_orbits(sign, 10**5, threads=t)) == E._body(base)


def test_slices_disjoint_and_covering():
    for sign in (1, -1):
        for parts in (1, 3, 8):
            sl = E.leading_slices(sign, 10**6, parts)
            covered = [a for lo, hi in sl for a in range(lo, hi + 1)]
            assert covered == list(range(1, E.max_leading(sign, 10**6) + 1))


def test_counts_monotone_in_X():
    prev = 0
    for X in (100, 1000, 5000, 20000):
        n = len(E.enumerate_orbits(-1, X))
        assert n >= prev
        prev = n


def test_truncate_is_prefix():
    big = E.enumerate_orbits(1, 10**5)
    small = E.enumerate_orbits(1, 3 * 10**4)
    assert big.truncate(3 * 10**4).same_records(small)


def test_input_validation():
    with pytest.raises(ValueError):
        E.enumerate_orbits(0, 100)
    with pytest.raises(ValueError):
        E.enumerate_orbits(1, 0)
    with pytest.raises(ValueError):
        E.enumerate_orbits(1, 10**10)


def test_cache_roundtrip_and_hit(tmp_path, monkeypatch):
    task = E.EnumerationTask.make(-1, 10**4)
    first = E.load_or_build_cache(task, tmp_path)
    assert first.source == "built"
    files = list(tmp_path.glob("*.csv"))
    assert len(files) == 1
    text = files[0].read_text()
    assert "disc,a,b,c,d,stab,irreducible\n" in text and text.rstrip("\n").split("\n")[-1].startswith("#sha256:")

    # a hit must not enumerate anything
    def boom(*a, **k):
        raise AssertionError("enumerated on a cache hit")
    monkeypatch.setattr(E, "enumerate_orbits", boom)
    second = E.load_or_build_cache(task, tmp_path)
    assert second.source == "cache" and second.same_records(first)
    # smaller bound served by truncation
    third = E.load_or_build_cache(E.EnumerationTask.make(-1, 2000), tmp_path)
    monkeypatch.undo()
    assert third.same_records(E.enumerate_orbits(-1, 2000))


def test_corrupt_cache_rebuilds(tmp_path):
    task = E.EnumerationTask.make(1, 5000)
    E.load_or_build_cache(task, tmp_path)
    path = next(tmp_path.glob("*.csv"))
    lines = path.read_text().split("\n")
    # flip one stabilizer in the body
    for i, ln in enumerate(lines):
        if ln and ln[0].isdigit():
            parts = ln.split(",")
            parts[5] = "6" if parts[5] != "6" else "1"
            lines[i] = ",".join(parts)
            break
    path.write_text("\n".join(lines))
    assert E.read_cache(path, 1, 5000) is None
    s = E.load_or_build_cache(task, tmp_path)
    assert s.source == "built" and s.same_records(E.enumerate_orbits(1, 5000))
    assert E.read_cache(path, 1, 5000) is not None


def test_cache_version_mismatch_ignored(tmp_path):
    s = E.enumerate_orbits(-1, 3000)
    path = E.write_cache(s, tmp_path)
    path.write_text(path.read_text().replace("# version=1", "# version=0"))
    assert E.read_cache(path, -1, 3000) is None
    assert E.read_cache(E.write_cache(s, tmp_path), 1, 3000) is None
    assert not list(tmp_path.glob(".tmp-*"))

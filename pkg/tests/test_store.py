import json

import numpy as np
import pytest

from threerank.rank3 import RankTable, rank_table_interval
from threerank.store import (CacheError, cache_load, cache_merge, cache_store, ensure_ranks, manifest_path,
                             merge_intervals, to_csv)


@pytest.fixture
def stored(tmp_path):
    path = tmp_path / "ranks.csv"
    cache_store(rank_table_interval(-1000, 1000), path)
    return path


def test_format(stored):
    text = stored.read_bytes()
    assert text.startswith(b"D,r3\n-996,1\n") and b"\r" not in text and text.endswith(b"\n")
    assert json.loads(manifest_path(stored).read_text()) == {"intervals": [[-1000, 1000]], "format": 1}


def test_round_trip_is_byte_identical(stored, tmp_path):
    again = tmp_path / "again.csv"
    cache_store(cache_load(stored), again)
    assert again.read_bytes() == stored.read_bytes()
    assert manifest_path(again).read_bytes() == manifest_path(stored).read_bytes()


def test_merge_of_disjoint_halves():
    neg = rank_table_interval(-1000, -1)
    pos = rank_table_interval(1, 1000)
    merged = cache_merge(neg, pos)
    assert merged.intervals == [(-1000, 1000)]
    assert merged.covers(-1000, 1000)
    assert to_csv(merged) == to_csv(rank_table_interval(-1000, 1000))


def test_merge_overlapping_deduplicates():
    a = rank_table_interval(-500, 200)
    b = rank_table_interval(-100, 900)
    m = cache_merge(a, b)
    assert m.intervals == [(-500, 900)]
    assert np.all(np.diff(m.D) > 0)


def test_merge_conflict():
    a = rank_table_interval(-30, -1)
    r = a.r3.copy()
    r[a.D == -23] = 0
    with pytest.raises(CacheError, match="-23"):
        cache_merge(a, RankTable(a.D, r, a.intervals))


def test_merge_intervals_keeps_real_gaps():
    assert merge_intervals([(1, 10), (100, 200)]) == [(1, 10), (100, 200)]
    assert merge_intervals([(1, 10), (11, 20), (5, 7)]) == [(1, 20)]


@pytest.mark.parametrize("mutate", [
    lambda csv, man: ("D,r\n" + csv.split("\n", 1)[1], man),
    lambda csv, man: (csv.rstrip("\n"), man),
    lambda csv, man: (csv.replace("-996,1\n", ""), man),
    lambda csv, man: (csv.replace("-996,1\n", "-996,x\n"), man),
    lambda csv, man: (csv, man.replace('"format": 1', '"format": 2')),
    lambda csv, man: (csv, "{not json"),
    lambda csv, man: (csv, man.replace("1000]]", "2000]]")),
])
def test_malformed_caches_are_rejected(stored, mutate):
    csv, man = mutate(stored.read_text(), manifest_path(stored).read_text())
    stored.write_text(csv)
    manifest_path(stored).write_text(man)
    with pytest.raises(CacheError):
        cache_load(stored)


def test_missing_cache(tmp_path):
    with pytest.raises(CacheError):
        cache_load(tmp_path / "absent.csv")


def test_ensure_ranks_hits_and_extends(tmp_path):
    path = tmp_path / "c" / "ranks.csv"
    cold = ensure_ranks(-2000, -1, path)
    assert path.exists()
    hit = ensure_ranks(-1500, -10, path)
    assert to_csv(hit) == to_csv(cold)
    both = ensure_ranks(1, 2000, path)
    assert both.covers(-2000, 2000)
    assert cache_load(path).covers(-2000, 2000)

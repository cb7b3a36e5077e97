"""Persistent rank cache: the RankTable CSV plus a JSON manifest of covered
D-intervals.

CSV: header ``D,r3``, one row per fundamental D in ascending order, LF line
endings. The manifest sits next to it as ``<csv>.manifest.json`` with
``{"intervals": [[lo, hi], ...], "format": 1}``; intervals are closed.
"""
from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .arith import fundamental_mask, is_fundamental
from .config import CACHE_ENV
from .rank3 import RankTable

FORMAT = 1
HEADER = "D,r3"


class CacheError(Exception):
    pass


def manifest_path(path) -> Path:
    return Path(str(path) + ".manifest.json")


def default_cache_path() -> Path | None:
    root = os.environ.get(CACHE_ENV)
    return Path(root) / "ranks.csv" if root else None


def to_csv(table: RankTable) -> str:
    rows = [HEADER]
    rows += [f"{d},{r}" for d, r in zip(table.D.tolist(), table.r3.tolist())]
    return "\n".join(rows) + "\n"


def write_csv(table: RankTable, path) -> None:
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        fh.write(to_csv(table))


def _fundamentals_in(lo: int, hi: int) -> np.ndarray:
    parts = []
    if lo < 0:
        top = min(hi, -1)
        t = np.arange(-top, -lo + 1, dtype=np.int64)
        m = fundamental_mask(-top, -lo + 1, -1)
        parts.append(-t[m][::-1])
    if hi > 0:
        start = max(lo, 1)
        t = np.arange(start, hi + 1, dtype=np.int64)
        parts.append(t[fundamental_mask(start, hi + 1, 1)])
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def _free_gap(a: int, b: int) -> bool:
    # an interval gap (a, b) containing no fundamental discriminant is no gap
    return b - a <= 64 and not any(is_fundamental(x) for x in range(a + 1, b))


def merge_intervals(intervals) -> list[tuple[int, int]]:
    out: list[list[int]] = []
    for lo, hi in sorted((int(a), int(b)) for a, b in intervals):
        if out and (lo <= out[-1][1] + 1 or _free_gap(out[-1][1], lo)):
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [(a, b) for a, b in out]


def validate(table: RankTable) -> None:
    D = table.D
    if D.size and np.any(np.diff(D) <= 0):
        raise CacheError("rows are not in strictly ascending D order")
    if np.any(table.r3 < 0):
        raise CacheError("negative 3-rank")
    for lo, hi in table.intervals:
        want = _fundamentals_in(lo, hi)
        have = D[(D >= lo) & (D <= hi)]
        if have.size != want.size or not np.array_equal(have, want):
            raise CacheError(f"interval [{lo}, {hi}] is not completely tabulated")


def cache_load(path) -> RankTable:
    path = Path(path)
    try:
        text = path.read_text(encoding="ascii")
        manifest = json.loads(manifest_path(path).read_text(encoding="ascii"))
    except (OSError, ValueError) as e:
        raise CacheError(f"cannot read cache at {path}: {e}") from e
    if manifest.get("format") != FORMAT:
        raise CacheError(f"unsupported cache format {manifest.get('format')!r}")
    lines = text.split("\n")
    if lines[0] != HEADER or lines[-1] != "":
        raise CacheError("malformed CSV header or missing final newline")
    try:
        rows = [tuple(int(x) for x in ln.split(",")) for ln in lines[1:-1]]
    except ValueError as e:
        raise CacheError(f"malformed row: {e}") from e
    if any(len(r) != 2 for r in rows):
        raise CacheError("rows must have exactly two fields")
    D = np.array([r[0] for r in rows], dtype=np.int64)
    r3 = np.array([r[1] for r in rows], dtype=np.int64)
    intervals = [tuple(iv) for iv in manifest.get("intervals", [])]
    table = RankTable(D, r3, merge_intervals(intervals))
    validate(table)
    return table


def cache_store(table: RankTable, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    write_csv(table, path)
    manifest = {"intervals": [list(iv) for iv in table.intervals], "format": FORMAT}
    manifest_path(path).write_text(json.dumps(manifest) + "\n", encoding="ascii")


def cache_merge(a: RankTable, b: RankTable) -> RankTable:
    D = np.concatenate([a.D, b.D])
    r = np.concatenate([a.r3, b.r3])
    order = np.argsort(D, kind="stable")
    D, r = D[order], r[order]
    dup = np.flatnonzero(np.diff(D) == 0)
    if dup.size:
        clash = r[dup] != r[dup + 1]
        if clash.any():
            bad = int(D[dup[clash][0]])
            raise CacheError(f"conflicting r3 values for D={bad}")
        keep = np.ones(D.size, dtype=bool)
        keep[dup + 1] = False
        D, r = D[keep], r[keep]
    return RankTable(D, r, merge_intervals(list(a.intervals) + list(b.intervals)))


def ensure_ranks(lo: int, hi: int, cache=None, threads: int = 1) -> RankTable:
    """A RankTable covering [lo, hi], from the cache when possible.

    Missing coverage is computed and, when a cache path is given, merged
    back into it.
    """
    from .rank3 import rank_table_interval

    cache = Path(cache) if cache else default_cache_path()
    have = None
    if cache is not None and cache.exists():
        have = cache_load(cache)
        if have.covers(lo, hi) or (lo < 0 < hi and have.covers(lo, -1) and have.covers(1, hi)):
            return have
    fresh = rank_table_interval(lo, hi, threads)
    if cache is None:
        return fresh
    merged = cache_merge(have, fresh) if have is not None else fresh
    cache_store(merged, cache)
    return merged

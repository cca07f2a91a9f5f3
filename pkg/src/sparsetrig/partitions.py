"""Set partitions, block-intersection matrices, and exact rank censuses.

Three partition families appear throughout the probability bounds:

* partitions of ``{1..n}`` whose blocks all have at least two elements
  (counted by the associated Stirling numbers of the second kind),
* partitions of ``{1..n}`` with no circular adjacency, i.e. no block
  containing two cyclically consecutive integers,
* partitions of a ``cols x rows`` cell grid with no block containing two
  vertically consecutive cells ``(p, u)`` and ``(p, u+1)``.

Pairing a min-2 partition with a non-adjacent partition yields a small
integer matrix built from shifted block intersections.  The exact rank of
that matrix classifies the pair, and the census of ranks over all pairs is
what the random-support failure bound consumes.  All counting here is exact:
ranks come from fraction-free integer elimination, never floating point.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "CapacityError",
    "Partition",
    "GridPartition",
    "partitions_min2",
    "partitions_into",
    "nonadjacent_partitions",
    "grid_nonadjacent_partitions",
    "shift_intersection_matrix",
    "signed_shift_matrix",
    "integer_rank",
    "RankCensus",
    "rank_census",
    "grid_rank_census",
    "rank_census_cell",
    "grid_rank_census_cell",
    "closed_form_report",
    "rank_census_for_partition",
    "count_constrained_cycles",
    "count_constrained_paths",
]

# Exhaustive tuple enumeration refuses anything past this many tuples.
_BRUTE_FORCE_LIMIT = 10_000_000

# Full censuses are cubic-ish in the partition counts; these caps keep the
# supported sizes in the seconds-to-minutes range (the largest supported
# cycle census at n=10 already needs ~3.1e8 rank evaluations).
_MAX_CYCLE_ELEMENTS = 10
_MAX_GRID_CELLS = 8


class CapacityError(Exception):
    """A request exceeds the problem sizes this implementation supports."""


# ---------------------------------------------------------------------------
# partition containers


def _canonical_blocks(blocks: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted(tuple(sorted(b)) for b in blocks))


@dataclass(frozen=True)
class Partition:
    """A set partition of ``{1..n}`` in canonical form.

    Blocks are sorted internally and ordered by their minimum element, so
    equal partitions compare equal and serialization round-trips exactly.
    """

    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", _canonical_blocks(self.blocks))
        seen = sorted(e for b in self.blocks for e in b)
        if seen != list(range(1, self.n + 1)):
            raise ValueError(f"blocks do not partition 1..{self.n}: {self.blocks}")

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    def block_masks(self) -> tuple[int, ...]:
        """Bitmask per block; element ``e`` occupies bit ``e - 1``."""
        return tuple(sum(1 << (e - 1) for e in b) for b in self.blocks)


@dataclass(frozen=True)
class GridPartition:
    """A set partition of the cell grid ``{1..cols} x {1..rows}``.

    Cells are ``(p, u)`` pairs, sorted lexicographically inside blocks,
    blocks ordered by minimum cell.
    """

    cols: int
    rows: int
    blocks: tuple[tuple[tuple[int, int], ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", _canonical_blocks(self.blocks))
        seen = sorted(c for b in self.blocks for c in b)
        want = [(p, u) for p in range(1, self.cols + 1) for u in range(1, self.rows + 1)]
        if seen != want:
            raise ValueError(
                f"blocks do not partition the {self.cols}x{self.rows} grid: {self.blocks}"
            )

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    def block_masks(self) -> tuple[int, ...]:
        """Bitmask per block; cell ``(p, u)`` occupies bit ``(p-1)*rows + (u-1)``."""
        r = self.rows
        return tuple(
            sum(1 << ((p - 1) * r + (u - 1)) for (p, u) in b) for b in self.blocks
        )


def _cell_of(element: int, rows: int) -> tuple[int, int]:
    return ((element - 1) // rows + 1, (element - 1) % rows + 1)


# ---------------------------------------------------------------------------
# enumeration
#
# Both recursions extend canonical partitions in ways that preserve canonical
# form wherever possible, and the two branches produce structurally disjoint
# results (the largest element lands in a block of size >= 3 in one branch and
# in a pair block in the other), so no dedup pass is needed.


@lru_cache(maxsize=None)
def _min2_blocks(n: int, t: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    if t < 1 or n < 2 or 2 * t > n:
        return ()
    if t == 1:
        return ((tuple(range(1, n + 1)),),)
    out = []
    for part in _min2_blocks(n - 1, t):
        for j in range(t):
            out.append(part[:j] + (part[j] + (n,),) + part[j + 1 :])
    for part in _min2_blocks(n - 2, t - 1):
        for ell in range(1, n):
            shifted = tuple(
                tuple(e + 1 if e >= ell else e for e in blk) for blk in part
            )
            out.append(tuple(sorted(shifted + ((ell, n),))))
    return tuple(out)


@lru_cache(maxsize=None)
def _all_blocks(n: int, s: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    if s < 1 or s > n:
        return ()
    if s == 1:
        return ((tuple(range(1, n + 1)),),)
    if s == n:
        return (tuple((i,) for i in range(1, n + 1)),)
    out = []
    for part in _all_blocks(n - 1, s):
        for j in range(s):
            out.append(part[:j] + (part[j] + (n,),) + part[j + 1 :])
    for part in _all_blocks(n - 1, s - 1):
        out.append(part + ((n,),))
    return tuple(out)


def partitions_min2(n: int, t: int) -> list[Partition]:
    """All partitions of ``{1..n}`` into exactly ``t`` blocks of size >= 2.

    Empty when ``t > n/2``; the count equals the associated Stirling number
    of the second kind.
    """
    if n < 0 or t < 1:
        raise ValueError("need n >= 0 and t >= 1")
    return [Partition(n, b) for b in _min2_blocks(n, t)]


def partitions_into(n: int, s: int) -> list[Partition]:
    """All partitions of ``{1..n}`` into exactly ``s`` blocks (unrestricted)."""
    if n < 1 or s < 1 or s > n:
        raise ValueError("need 1 <= s <= n")
    return [Partition(n, b) for b in _all_blocks(n, s)]


def _rot1(mask: int, n: int) -> int:
    full = (1 << n) - 1
    return ((mask << 1) | (mask >> (n - 1))) & full


def _has_circular_adjacency(blocks, n: int) -> bool:
    for b in blocks:
        m = sum(1 << (e - 1) for e in b)
        if m & _rot1(m, n):
            return True
    return False


def nonadjacent_partitions(n: int, s: int) -> list[Partition]:
    """Partitions of ``{1..n}`` into ``s`` blocks with no circular adjacency.

    No block may contain two consecutive integers, where ``n`` and ``1``
    also count as consecutive.  Produced by filtering the unrestricted
    enumeration; there is no partition with a single block for n >= 2.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if s < 1 or s > n:
        return []
    return [
        Partition(n, b)
        for b in _all_blocks(n, s)
        if not _has_circular_adjacency(b, n)
    ]


def _grid_adjacency_mask(cols: int, rows: int) -> int:
    # Bits j such that cell j and cell j+1 sit in the same column.
    keep = 0
    for j in range(cols * rows):
        if j % rows != rows - 1:
            keep |= 1 << j
    return keep


def grid_nonadjacent_partitions(cols: int, rows: int, s: int) -> list[GridPartition]:
    """Partitions of the ``cols x rows`` grid into ``s`` blocks with no block
    containing vertically consecutive cells ``(p, u)`` and ``(p, u+1)``.

    The constraint is not circular: ``(p, rows)`` and ``(p, 1)`` may share a
    block.  With ``rows == 1`` every partition qualifies.
    """
    if cols < 1 or rows < 1:
        raise ValueError("need cols, rows >= 1")
    n = cols * rows
    if s < 1 or s > n:
        return []
    keep = _grid_adjacency_mask(cols, rows)
    out = []
    for blocks in _all_blocks(n, s):
        ok = True
        for b in blocks:
            m = sum(1 << (e - 1) for e in b)
            if m & (m >> 1) & keep:
                ok = False
                break
        if ok:
            out.append(
                GridPartition(
                    cols, rows, tuple(tuple(_cell_of(e, rows) for e in b) for b in blocks)
                )
            )
    return out


# ---------------------------------------------------------------------------
# block-intersection matrices and exact rank


def shift_intersection_matrix(a: Partition, b: Partition) -> list[list[int]]:
    """The ``t x s`` matrix ``|A_i & B_j| - |(A_i + 1) & B_j|``.

    ``A_i + 1`` increments every element circularly (``n + 1 == 1``).  Every
    row and every column sums to zero, so the rank is at most
    ``min(t, s) - 1``.
    """
    if a.n != b.n:
        raise ValueError(f"partitions of different ground sets: {a.n} vs {b.n}")
    n = a.n
    bmasks = b.block_masks()
    rows = []
    for am in a.block_masks():
        am1 = _rot1(am, n)
        rows.append([(am & bm).bit_count() - (am1 & bm).bit_count() for bm in bmasks])
    return rows


def _column_signs(cols: int, rows: int) -> list[int]:
    # sign of cell index j is (-1)**p where p is its column.
    return [(-1) ** (j // rows + 1) for j in range(cols * rows)]


def _signed_popcount(mask: int, signs: list[int]) -> int:
    total = 0
    while mask:
        j = (mask & -mask).bit_length() - 1
        total += signs[j]
        mask &= mask - 1
    return total


def signed_shift_matrix(a: GridPartition, b: GridPartition) -> list[list[int]]:
    """The ``t x s`` matrix of column-signed shifted intersections.

    Entry ``(i, j)`` sums ``(-1)**p`` over cells of ``A_i & B_j`` minus the
    same sum over ``(A_i - 1) & B_j``, where ``A_i - 1`` lowers every cell
    ``(p, u)`` to ``(p, u-1)`` without wrap-around; cells shifted to ``u = 0``
    fall outside the grid and intersect nothing.
    """
    if (a.cols, a.rows) != (b.cols, b.rows):
        raise ValueError("grid partitions of different shapes")
    rows_ = a.rows
    signs = _column_signs(a.cols, rows_)
    down_keep = ~sum(1 << ((p - 1) * rows_) for p in range(1, a.cols + 1))
    bmasks = b.block_masks()
    out = []
    for am in a.block_masks():
        am_shift = (am & down_keep) >> 1
        out.append(
            [
                _signed_popcount(am & bm, signs) - _signed_popcount(am_shift & bm, signs)
                for bm in bmasks
            ]
        )
    return out


def integer_rank(mat) -> int:
    """Exact rank over the rationals via fraction-free (Bareiss) elimination.

    Accepts any nested sequence (or integer ndarray); works in Python
    integers, so intermediate determinant growth can never overflow.
    """
    rows = [[int(x) for x in row] for row in mat]
    if not rows or not rows[0]:
        return 0
    nr, nc = len(rows), len(rows[0])
    rank = 0
    prev = 1
    for c in range(nc):
        piv = None
        for i in range(rank, nr):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][c]
        for i in range(rank + 1, nr):
            fi = rows[i][c]
            for j in range(c + 1, nc):
                rows[i][j] = (rows[i][j] * p - fi * rows[rank][j]) // prev
            rows[i][c] = 0
        prev = p
        rank += 1
        if rank == nr:
            break
    return rank


# ---------------------------------------------------------------------------
# rank censuses
#
# The census iterates over every (A, B) pair.  Matrix entries for a whole
# (t, s) group are assembled with numpy from per-block bitmasks, duplicates
# are collapsed with np.unique, and only the distinct matrices go through the
# exact integer rank routine.


@lru_cache(maxsize=None)
def _popcount_table(nbits: int) -> np.ndarray:
    return np.array([v.bit_count() for v in range(1 << nbits)], dtype=np.int8)


@lru_cache(maxsize=None)
def _signed_weight_table(cols: int, rows: int) -> np.ndarray:
    signs = _column_signs(cols, rows)
    size = 1 << (cols * rows)
    return np.array([_signed_popcount(v, signs) for v in range(size)], dtype=np.int8)


def _census_pairs(amasks, ashift, bmasks, weights: np.ndarray, rank_cache: dict) -> dict[int, int]:
    """Rank histogram over all (A, B) pairs for one (t, s) group."""
    if not amasks or not bmasks:
        return {}
    t = len(amasks[0])
    s = len(bmasks[0])
    a = np.asarray(amasks, dtype=np.int64)
    a1 = np.asarray(ashift, dtype=np.int64)
    bb = np.asarray(bmasks, dtype=np.int64)
    counts: dict[int, int] = {}
    chunk = max(1, 4_000_000 // max(1, len(bmasks) * t * s))
    for lo in range(0, len(amasks), chunk):
        ac = a[lo : lo + chunk, None, :, None]
        a1c = a1[lo : lo + chunk, None, :, None]
        bc = bb[None, :, None, :]
        entries = weights[ac & bc] - weights[a1c & bc]
        flat = entries.reshape(-1, t * s)
        uniq, inv = np.unique(flat, axis=0, return_inverse=True)
        per = np.bincount(inv.ravel(), minlength=uniq.shape[0])
        for row, cnt in zip(uniq, per):
            key = (t, s, row.tobytes())
            r = rank_cache.get(key)
            if r is None:
                r = integer_rank([row[i * s : (i + 1) * s] for i in range(t)])
                rank_cache[key] = r
            counts[r] = counts.get(r, 0) + int(cnt)
    return counts


def rank_census_cell(n: int, t: int, s: int, _rank_cache: dict | None = None) -> dict[int, int]:
    """Rank histogram of shift-intersection matrices over all pairs of a
    min-2 partition of ``{1..n}`` into ``t`` blocks and a non-adjacent
    partition into ``s`` blocks.  Returns ``{rank: count}``.
    """
    amasks = [
        Partition(n, b).block_masks() for b in _min2_blocks(n, t)
    ]
    ashift = [tuple(_rot1(m, n) for m in masks) for masks in amasks]
    bmasks = [p.block_masks() for p in nonadjacent_partitions(n, s)]
    cache = _rank_cache if _rank_cache is not None else {}
    return _census_pairs(amasks, ashift, bmasks, _popcount_table(n), cache)


def grid_rank_census_cell(
    cols: int, rows: int, t: int, s: int, _rank_cache: dict | None = None
) -> dict[int, int]:
    """Rank histogram of signed shifted-intersection matrices over all pairs
    of a min-2 partition of the ``cols*rows`` cells into ``t`` blocks and a
    vertically non-adjacent grid partition into ``s`` blocks.
    """
    n = cols * rows
    down_keep = ~sum(1 << ((p - 1) * rows) for p in range(1, cols + 1))
    amasks = [Partition(n, b).block_masks() for b in _min2_blocks(n, t)]
    ashift = [tuple((m & down_keep) >> 1 for m in masks) for masks in amasks]
    bmasks = [p.block_masks() for p in grid_nonadjacent_partitions(cols, rows, s)]
    cache = _rank_cache if _rank_cache is not None else {}
    return _census_pairs(amasks, ashift, bmasks, _signed_weight_table(cols, rows), cache)


@dataclass
class RankCensus:
    """Exact rank census ``(t, s, R) -> count`` for one partition-pair family.

    ``kind`` is ``"cycle"`` (circular shift on ``{1..n}``, rank bounded by
    ``min(t, s) - 1``) or ``"grid"`` (signed vertical shift on a cell grid,
    rank bounded by ``min(t, s)``).  Absent keys mean a zero count.
    """

    kind: str
    n: int | None = None
    cols: int | None = None
    rows: int | None = None
    entries: dict[tuple[int, int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("cycle", "grid"):
            raise ValueError(f"unknown census kind {self.kind!r}")
        for (t, s, r), cnt in self.entries.items():
            if cnt < 0:
                raise ValueError("negative census count")
            limit = min(t, s) - 1 if self.kind == "cycle" else min(t, s)
            if cnt and r > limit:
                raise ValueError(f"rank {r} impossible for (t={t}, s={s}) in {self.kind} census")

    def count(self, t: int, s: int, r: int) -> int:
        return self.entries.get((t, s, r), 0)

    def pair_total(self, t: int, s: int) -> int:
        return sum(c for (tt, ss, _), c in self.entries.items() if (tt, ss) == (t, s))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "s", "R", "count"])
        for (t, s, r) in sorted(self.entries):
            cnt = self.entries[(t, s, r)]
            if cnt:
                w.writerow([t, s, r, cnt])
        return buf.getvalue()

    @classmethod
    def from_csv(
        cls, text: str, kind: str, n: int | None = None,
        cols: int | None = None, rows: int | None = None,
    ) -> "RankCensus":
        entries = {}
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if header != ["t", "s", "R", "count"]:
            raise ValueError(f"unexpected census CSV header: {header}")
        for row in reader:
            if not row:
                continue
            t, s, r, cnt = (int(x) for x in row)
            entries[(t, s, r)] = cnt
        return cls(kind=kind, n=n, cols=cols, rows=rows, entries=entries)


def _cycle_cell_task(args):
    n, t, s = args
    return (t, s), rank_census_cell(n, t, s)


def _grid_cell_task(args):
    cols, rows, t, s = args
    return (t, s), grid_rank_census_cell(cols, rows, t, s)


_census_memo: dict[tuple, RankCensus] = {}


def rank_census(n: int, workers: int = 1) -> RankCensus:
    """Full census of shift-intersection ranks over every partition pair of
    ``{1..n}``.  Supports even ``n`` up to 10 (n=10 takes hours: the pair
    count is the square of 17722).  Results are memoized per process.
    """
    if n % 2:
        raise ValueError("census is only defined for an even number of elements")
    if not 2 <= n <= _MAX_CYCLE_ELEMENTS:
        raise CapacityError(
            f"cycle census supports even n in [2, {_MAX_CYCLE_ELEMENTS}], got {n}"
        )
    key = ("cycle", n)
    if key in _census_memo:
        return _census_memo[key]
    cells = [(n, t, s) for t in range(1, n // 2 + 1) for s in range(2, n + 1)]
    entries: dict[tuple[int, int, int], int] = {}
    for (t, s), hist in _run_cells(_cycle_cell_task, cells, workers):
        for r, cnt in hist.items():
            entries[(t, s, r)] = cnt
    table = RankCensus(kind="cycle", n=n, entries=entries)
    _census_memo[key] = table
    return table


def grid_rank_census(cols: int, rows: int, workers: int = 1) -> RankCensus:
    """Full census of signed-shift ranks over every pair of a min-2 partition
    of the grid cells and a vertically non-adjacent grid partition.
    Supports grids of at most 8 cells; results are memoized per process.
    """
    n = cols * rows
    if cols < 1 or rows < 1:
        raise ValueError("need cols, rows >= 1")
    if n > _MAX_GRID_CELLS:
        raise CapacityError(
            f"grid census supports at most {_MAX_GRID_CELLS} cells, got {cols}x{rows}"
        )
    key = ("grid", cols, rows)
    if key in _census_memo:
        return _census_memo[key]
    cells = [
        (cols, rows, t, s) for t in range(1, n // 2 + 1) for s in range(1, n + 1)
    ]
    entries: dict[tuple[int, int, int], int] = {}
    for (t, s), hist in _run_cells(_grid_cell_task, cells, workers):
        for r, cnt in hist.items():
            entries[(t, s, r)] = cnt
    table = RankCensus(kind="grid", cols=cols, rows=rows, entries=entries)
    _census_memo[key] = table
    return table


def _run_cells(task, cells, workers):
    if workers <= 1 or len(cells) <= 1:
        return [task(c) for c in cells]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, cells))


# ---------------------------------------------------------------------------
# closed forms and per-partition profiles


def closed_form_report(n: int) -> dict:
    """Verify the known closed-form and vanishing identities of the cycle
    census against direct enumeration, for even ``n`` with ``4 <= n <= 10``.

    Checks, with ``h = n/2``:
      a. count(1, s, 0) equals the number of non-adjacent partitions into s
         blocks, for every s;
      b. count(2, 2, 0) == C(n, h)/2 - 1 and
         count(2, 2, 1) == 2**(n-1) - n - C(n, h)/2;
      c. count(h, s, 0) == 0 whenever h > 2 and 2s >= 3h;
      d. count(t, n, 0) == 0 for every t != 1;
      e. count(t, n-1, 0) == 0 whenever h > 3 and 3t >= n.

    Returns ``{"ok": bool, "cases": [...]}`` with one entry per identity
    instance; each case records the expected and enumerated values.
    """
    import math

    if n % 2 or not 4 <= n <= _MAX_CYCLE_ELEMENTS:
        raise ValueError(f"need even n with 4 <= n <= {_MAX_CYCLE_ELEMENTS}")
    half = n // 2
    cache: dict = {}
    cases = []

    def record(label, expected, actual):
        cases.append(
            {"label": label, "expected": expected, "actual": actual, "ok": expected == actual}
        )

    for s in range(2, n + 1):
        cell = rank_census_cell(n, 1, s, cache)
        record(f"count({n},1,{s},0) == |nonadjacent|", len(nonadjacent_partitions(n, s)), cell.get(0, 0))

    central = math.comb(n, half) // 2
    cell22 = rank_census_cell(n, 2, 2, cache)
    record(f"count({n},2,2,0)", central - 1, cell22.get(0, 0))
    record(f"count({n},2,2,1)", 2 ** (n - 1) - n - central, cell22.get(1, 0))

    if half > 2:
        for s in range(2, n + 1):
            if 2 * s >= 3 * half:
                record(
                    f"count({n},{half},{s},0) == 0",
                    0,
                    rank_census_cell(n, half, s, cache).get(0, 0),
                )
    for t in range(2, half + 1):
        record(f"count({n},{t},{n},0) == 0", 0, rank_census_cell(n, t, n, cache).get(0, 0))
    if half > 3:
        for t in range(1, half + 1):
            if 3 * t >= n and t != 1:
                record(
                    f"count({n},{t},{n - 1},0) == 0",
                    0,
                    rank_census_cell(n, t, n - 1, cache).get(0, 0),
                )
    return {"ok": all(c["ok"] for c in cases), "cases": cases}


def rank_census_for_partition(a: Partition) -> dict[tuple[int, int], int]:
    """Rank histogram ``(s, R) -> count`` of the shift-intersection matrices
    of one fixed min-2 partition against every non-adjacent partition.

    These counts are the integer coefficients of the expected-count
    polynomial in the expected support size, with a dimension factor
    ``D**-R`` per rank.
    """
    if any(len(b) < 2 for b in a.blocks):
        raise ValueError("partition has a singleton block")
    out: dict[tuple[int, int], int] = {}
    for s in range(2, a.n + 1):
        for b in nonadjacent_partitions(a.n, s):
            r = integer_rank(shift_intersection_matrix(a, b))
            out[(s, r)] = out.get((s, r), 0) + 1
    return out


# ---------------------------------------------------------------------------
# exhaustive tuple-count oracles


def _as_points(support) -> list[tuple[int, ...]]:
    pts = []
    for k in support:
        if isinstance(k, (int, np.integer)):
            pts.append((int(k),))
        else:
            pts.append(tuple(int(x) for x in k))
    if len(set(pts)) != len(pts):
        raise ValueError("support entries must be distinct")
    if len({len(p) for p in pts} | {0 if not pts else len(pts[0])}) > 1:
        raise ValueError("support entries must share one dimension")
    return pts


def count_constrained_cycles(a: Partition, support) -> int:
    """Exhaustively count tuples ``(k_1..k_n)`` drawn from ``support`` with
    cyclically distinct neighbors (``k_j != k_{j+1}``, indices mod n) whose
    consecutive differences sum to zero over every block of ``a``.

    This is the brute-force oracle for the Gram-deviation moment identity;
    the count never exceeds ``|support|**(n - t + 1)``.
    """
    pts = _as_points(support)
    n = a.n
    m = len(pts)
    if m == 0:
        return 0
    if m**n > _BRUTE_FORCE_LIMIT:
        raise CapacityError(f"{m}**{n} tuples exceed the enumeration guard")
    dim = len(pts[0])
    count = 0
    for combo in product(range(m), repeat=n):
        if any(combo[j] == combo[(j + 1) % n] for j in range(n)):
            continue
        ok = True
        for block in a.blocks:
            acc = [0] * dim
            for r in block:
                nxt = pts[combo[r % n]]
                cur = pts[combo[r - 1]]
                for i in range(dim):
                    acc[i] += nxt[i] - cur[i]
            if any(acc):
                ok = False
                break
        if ok:
            count += 1
    return count


def count_constrained_paths(a: GridPartition, support, anchor) -> int:
    """Exhaustively count grid-indexed tuples ``k_u^{(p)}`` from ``support``
    with ``k_u^{(p)} != k_{u-1}^{(p)}`` down each column (``k_0^{(p)}`` is
    the fixed ``anchor``) and, for every block of ``a``, a vanishing
    column-signed sum of consecutive differences.

    Oracle for the off-support moment bound; bounded by
    ``|support|**(cells - t)``.
    """
    pts = _as_points(support)
    if isinstance(anchor, (int, np.integer)):
        anchor = (int(anchor),)
    else:
        anchor = tuple(int(x) for x in anchor)
    cols, rows = a.cols, a.rows
    cells = cols * rows
    m = len(pts)
    if m == 0:
        return 0
    if pts and len(anchor) != len(pts[0]):
        raise ValueError("anchor dimension does not match support")
    if m**cells > _BRUTE_FORCE_LIMIT:
        raise CapacityError(f"{m}**{cells} tuples exceed the enumeration guard")
    dim = len(anchor)
    # slot index for cell (p, u), consistent with block mask layout
    def slot(p, u):
        return (p - 1) * rows + (u - 1)

    count = 0
    for combo in product(range(m), repeat=cells):
        ok = True
        for p in range(1, cols + 1):
            prev = anchor
            for u in range(1, rows + 1):
                cur = pts[combo[slot(p, u)]]
                if cur == prev:
                    ok = False
                    break
                prev = cur
            if not ok:
                break
        if not ok:
            continue
        for block in a.blocks:
            acc = [0] * dim
            for (p, u) in block:
                sign = (-1) ** p
                cur = pts[combo[slot(p, u)]]
                prev = anchor if u == 1 else pts[combo[slot(p, u - 1)]]
                for i in range(dim):
                    acc[i] += sign * (cur[i] - prev[i])
            if any(acc):
                ok = False
                break
        if ok:
            count += 1
    return count

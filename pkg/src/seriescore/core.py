"""Series primitives and the optimized sequential-scan baseline.

A series is a 1-D ``float32`` array; a :class:`Dataset` is a dense row-major
``(count, length)`` matrix of such series, addressable by zero-based id.
All distances are *squared* Euclidean internally; square roots are taken
only at reporting boundaries.

The scan baseline applies the classic serial-scan optimizations: squared
distances, index reordering by descending query magnitude, and early
abandoning against the current k-th best-so-far.  Abandoning is evaluated
on column chunks so the whole block stays vectorized.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadFloat, DegenerateSeries, EmptyDataset, LengthMismatch

# Tolerance below which a population stddev means "constant series".
DEGENERACY_TOL = 1e-12

# Row-block size for scans and block accounting: 4096 rows of a length-256
# float32 series is a 4 MiB I/O unit.
DEFAULT_BLOCK_ROWS = 4096

# Column-chunk width for early-abandoning accumulation.
_EA_CHUNK = 16


def as_series(values) -> np.ndarray:
    """Coerce ``values`` to a finite 1-D float32 series."""
    s = np.asarray(values, dtype=np.float32)
    if s.ndim != 1 or s.size == 0:
        raise BadFloat("a series must be a non-empty 1-D array")
    if not np.all(np.isfinite(s)):
        raise BadFloat("series contains NaN or Inf")
    return s


@dataclass(frozen=True)
class Dataset:
    """An ordered collection of equal-length float32 series.

    Ids are dense ``0..count-1`` in storage order, which is also the raw
    binary file order (id ``i`` lives at byte offset ``i * length * 4``).
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float32)
        if v.ndim != 2 or v.shape[0] == 0 or v.shape[1] == 0:
            raise EmptyDataset("dataset must be a non-empty 2-D array")
        if not np.all(np.isfinite(v)):
            raise BadFloat("dataset contains NaN or Inf")
        object.__setattr__(self, "values", v)

    @property
    def count(self) -> int:
        return self.values.shape[0]

    @property
    def length(self) -> int:
        return self.values.shape[1]

    def row(self, series_id: int) -> np.ndarray:
        return self.values[series_id]

    def __len__(self) -> int:
        return self.count


@dataclass(frozen=True)
class NeighborSet:
    """k nearest neighbors: ids with their *squared* distances, ascending."""

    ids: np.ndarray
    sqdists: np.ndarray

    @property
    def k(self) -> int:
        return int(self.ids.size)

    def distances(self) -> np.ndarray:
        """True (square-rooted) distances, for reporting."""
        return np.sqrt(self.sqdists)

    def entries(self) -> list[tuple[int, float]]:
        return [(int(i), float(d)) for i, d in zip(self.ids, self.sqdists)]


@dataclass
class AccessStats:
    """Per-query access counters and wall-clock segments.

    ``random_accesses`` counts leaf visits in tree indexes and seeks
    (maximal skipped runs) in skip-sequential passes; ``sequential_accesses``
    counts contiguous raw blocks read.  Times are seconds.
    """

    series_examined: int = 0
    random_accesses: int = 0
    sequential_accesses: int = 0
    lb_computations: int = 0
    cpu_time: float = 0.0
    input_time: float = 0.0
    output_time: float = 0.0

    def as_dict(self) -> dict:
        return {
            "series_examined": self.series_examined,
            "random_accesses": self.random_accesses,
            "sequential_accesses": self.sequential_accesses,
            "lb_computations": self.lb_computations,
            "cpu_time": self.cpu_time,
            "input_time": self.input_time,
            "output_time": self.output_time,
        }


def block_count(rows: int, length: int, block_rows: int = DEFAULT_BLOCK_ROWS) -> int:
    """Number of I/O blocks needed for a contiguous run of ``rows`` series."""
    del length  # blocks are defined in rows; length kept for call-site clarity
    if rows <= 0:
        return 0
    return -(-rows // block_rows)


class KnnHeap:
    """Bounded max-heap of the k best (id, squared distance) candidates.

    Ties at equal distance keep the smaller id.  ``threshold_sq`` is the
    current k-th squared distance (+inf while not yet full), which is the
    best-so-far pruning bound.
    """

    __slots__ = ("k", "_heap")

    def __init__(self, k: int):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.k = k
        self._heap: list[tuple[float, int]] = []

    def __len__(self) -> int:
        return len(self._heap)

    @property
    def full(self) -> bool:
        return len(self._heap) >= self.k

    def threshold_sq(self) -> float:
        if len(self._heap) < self.k:
            return math.inf
        return -self._heap[0][0]

    def offer(self, series_id: int, sqdist: float) -> bool:
        """Try to admit a candidate; returns True if it entered the heap."""
        if len(self._heap) < self.k:
            heapq.heappush(self._heap, (-sqdist, -series_id))
            return True
        worst_d, worst_id = -self._heap[0][0], -self._heap[0][1]
        if sqdist < worst_d or (sqdist == worst_d and series_id < worst_id):
            heapq.heapreplace(self._heap, (-sqdist, -series_id))
            return True
        return False

    def result(self) -> NeighborSet:
        entries = sorted((-d, -i) for d, i in self._heap)
        ids = np.array([i for _, i in entries], dtype=np.int64)
        sq = np.array([d for d, _ in entries], dtype=np.float64)
        return NeighborSet(ids=ids, sqdists=sq)


def z_normalize(s) -> np.ndarray:
    """Normalize a series to mean 0 and population stddev 1.

    Raises :class:`DegenerateSeries` for constant series (population stddev
    at or below the degeneracy tolerance) or series shorter than 2 points;
    mapping such series to zeros would silently corrupt distances.
    """
    s = as_series(s)
    if s.size < 2:
        raise DegenerateSeries("need at least 2 points to normalize")
    x = s.astype(np.float64)
    mu = x.mean()
    sigma = x.std()  # population stddev
    if sigma <= DEGENERACY_TOL:
        raise DegenerateSeries(f"population stddev {sigma:g} below tolerance")
    return ((x - mu) / sigma).astype(np.float32)


def normalize_rows(values: np.ndarray) -> np.ndarray:
    """Row-wise z-normalization of a 2-D array; rejects degenerate rows."""
    x = np.asarray(values, dtype=np.float64)
    mu = x.mean(axis=1, keepdims=True)
    sigma = x.std(axis=1, keepdims=True)
    if np.any(sigma <= DEGENERACY_TOL):
        raise DegenerateSeries("constant row cannot be normalized")
    return ((x - mu) / sigma).astype(np.float32)


def squared_euclidean(a, b) -> float:
    """Sum of squared element differences, accumulated in float64."""
    a = np.asarray(a, dtype=np.float32)
    b = np.asarray(b, dtype=np.float32)
    if a.shape != b.shape:
        raise LengthMismatch(f"lengths differ: {a.shape} vs {b.shape}")
    d = a.astype(np.float64) - b.astype(np.float64)
    return float(np.dot(d, d))


def reorder_indices(query) -> np.ndarray:
    """Indices sorted by descending absolute query value, stable by index.

    On z-normalized queries this ordering front-loads the dimensions that
    contribute most to any distance, making early abandoning trigger sooner.
    """
    q = np.asarray(query, dtype=np.float64)
    return np.argsort(-np.abs(q), kind="stable")


def early_abandon_sqdist(a, b, threshold: float, order) -> float | None:
    """Squared distance if it is <= threshold, else None.

    Accumulates squared differences along ``order`` in small chunks and
    abandons as soon as the partial sum exceeds the threshold.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise LengthMismatch(f"lengths differ: {a.shape} vs {b.shape}")
    order = np.asarray(order, dtype=np.intp)
    if order.shape != a.shape:
        raise LengthMismatch("order must be a permutation of the series indices")
    total = 0.0
    for start in range(0, order.size, _EA_CHUNK):
        idx = order[start : start + _EA_CHUNK]
        d = a[idx] - b[idx]
        total += float(np.dot(d, d))
        if total > threshold:
            return None
    return total


def sqdist_matrix(rows: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Squared distances from each row to the query (float64)."""
    d = rows.astype(np.float64) - query.astype(np.float64)
    return np.einsum("ij,ij->i", d, d)


def refine_block(
    values: np.ndarray,
    ids: np.ndarray,
    query64: np.ndarray,
    order: np.ndarray,
    heap: KnnHeap,
) -> None:
    """Refine candidate rows against the heap with chunked early abandoning.

    ``values`` holds the candidate rows (aligned with ``ids``); ids must be
    ascending so distance ties resolve to the smaller id deterministically.
    """
    nrows = values.shape[0]
    if nrows == 0:
        return
    partial = np.zeros(nrows, dtype=np.float64)
    active = np.arange(nrows)
    threshold = heap.threshold_sq()
    for start in range(0, order.size, _EA_CHUNK):
        cols = order[start : start + _EA_CHUNK]
        diff = values[np.ix_(active, cols)].astype(np.float64) - query64[cols]
        partial[active] += np.einsum("ij,ij->i", diff, diff)
        if np.isfinite(threshold):
            active = active[partial[active] <= threshold]
            if active.size == 0:
                return
    for i in active:
        heap.offer(int(ids[i]), float(partial[i]))


def scan_knn(
    data: Dataset,
    query,
    k: int,
    stats: AccessStats | None = None,
    block_rows: int = DEFAULT_BLOCK_ROWS,
) -> tuple[NeighborSet, AccessStats]:
    """Exact k-NN by optimized sequential scan.

    Examines every series (the scan is the ground-truth baseline); the
    early-abandoning only saves arithmetic, never candidates.  Sequential
    accesses count raw row blocks; the initial seek is not charged as a
    random access.
    """
    if stats is None:
        stats = AccessStats()
    if data.count == 0:
        raise EmptyDataset("cannot scan an empty dataset")
    query = as_series(query)
    if query.size != data.length:
        raise LengthMismatch(f"query length {query.size} != dataset length {data.length}")
    if not 1 <= k <= data.count:
        raise EmptyDataset(f"k={k} out of range for {data.count} series")

    q64 = query.astype(np.float64)
    order = reorder_indices(query)
    heap = KnnHeap(k)
    for start in range(0, data.count, block_rows):
        block = data.values[start : start + block_rows]
        ids = np.arange(start, start + block.shape[0], dtype=np.int64)
        refine_block(block, ids, q64, order, heap)
        stats.sequential_accesses += 1
    stats.series_examined += data.count
    return heap.result(), stats

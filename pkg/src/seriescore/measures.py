"""Implementation-independent quality measures.

These are the comparison currency between search methods: how much of the
dataset a method avoided reading (pruning ratio), how close its leaf-level
lower bounds sit to real distances (TLB), how far an approximate answer is
from the exact one (effective error), and the trimmed-mean extrapolation
from a 100-query run to a 10,000-query workload.

Access accounting is a contract, not a function: tree indexes charge one
random access per leaf visit, skip-sequential passes charge one per
maximal skipped run, and contiguous raw reads charge sequential accesses
per block.  The indexes enforce it with assertions; this module only
consumes the counters.
"""

from __future__ import annotations

import numpy as np

from .core import Dataset, sqdist_matrix
from .errors import BadCardinality, BadCounts, EmptyLeaf, ExactZeroDivision

EXTRAPOLATION_QUERIES = 100
EXTRAPOLATION_TRIM = 5
EXTRAPOLATION_FACTOR = 10_000

# Leaves inspected per query when averaging TLB; keeps the measure cheap
# on fine-grained indexes and is recorded in harness output.
TLB_LEAF_CAP = 10_000


def pruning_ratio(examined: int, total: int) -> float:
    """Fraction of the dataset never examined: 1 - examined/total."""
    if total <= 0 or examined < 0 or examined > total:
        raise BadCounts(f"bad counts: examined={examined} total={total}")
    return 1.0 - examined / total


def tlb(query, node_lb: float, leaf_series) -> float:
    """Tightness of a leaf's lower bound: lb / average true distance.

    Degenerate leaves whose members all coincide with the query have
    average distance 0; their bound is necessarily 0 too and the ratio is
    reported as 0.
    """
    rows = np.asarray(leaf_series, dtype=np.float64)
    if rows.ndim == 1:
        rows = rows[np.newaxis, :]
    if rows.shape[0] == 0:
        raise EmptyLeaf("TLB needs at least one leaf member")
    avg = float(np.mean(np.sqrt(sqdist_matrix(rows, np.asarray(query, dtype=np.float64)))))
    if avg == 0.0:
        return 0.0
    return node_lb / avg


def tlb_values(
    lbs: np.ndarray,
    avg_true: np.ndarray,
) -> np.ndarray:
    """Vectorized TLB over many leaves; zero-distance leaves are dropped."""
    lbs = np.asarray(lbs, dtype=np.float64)
    avg_true = np.asarray(avg_true, dtype=np.float64)
    keep = avg_true > 0.0
    return lbs[keep] / avg_true[keep]


def effective_error(d_approx: float, d_exact: float) -> float:
    """Relative error of an approximate distance against the exact one."""
    if d_exact == 0.0:
        if d_approx == 0.0:
            return 0.0
        raise ExactZeroDivision("exact distance is zero but approximate is not")
    return (d_approx - d_exact) / d_exact


def extrapolate_10k(times) -> float:
    """Trimmed-mean extrapolation from 100 measured queries to 10,000.

    Drops the 5 fastest and 5 slowest, averages the remaining 90, and
    multiplies by 10,000.
    """
    t = np.asarray(times, dtype=np.float64)
    if t.size != EXTRAPOLATION_QUERIES:
        raise BadCardinality(f"need exactly {EXTRAPOLATION_QUERIES} times, got {t.size}")
    trimmed = np.sort(t)[EXTRAPOLATION_TRIM : t.size - EXTRAPOLATION_TRIM]
    return float(trimmed.mean() * EXTRAPOLATION_FACTOR)


def leaf_tlb_mean(index, data: Dataset, query, cap: int = TLB_LEAF_CAP) -> float:
    """Mean TLB over an index's leaves for one query.

    The index supplies (lower bound, member ids) pairs through
    ``iter_leaf_bounds``; flat methods expose per-series bounds instead
    and should be measured with :func:`series_tlb_mean`.
    """
    values = []
    q64 = np.asarray(query, dtype=np.float64)
    for i, (lb, ids) in enumerate(index.iter_leaf_bounds(query)):
        if i >= cap:
            break
        rows = data.values[ids]
        avg = float(np.mean(np.sqrt(sqdist_matrix(rows, q64))))
        if avg > 0.0:
            values.append(lb / avg)
    if not values:
        raise EmptyLeaf("no measurable leaves")
    return float(np.mean(values))


def series_tlb_mean(lbs: np.ndarray, data: Dataset, query) -> float:
    """Mean TLB treating every series as its own single-member leaf."""
    true = np.sqrt(sqdist_matrix(data.values, np.asarray(query, dtype=np.float64)))
    vals = tlb_values(np.asarray(lbs), true)
    if vals.size == 0:
        raise EmptyLeaf("all true distances are zero")
    return float(vals.mean())

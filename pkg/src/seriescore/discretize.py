"""Symbol alphabets and quantization over summarized series.

Three discretizations with MINDIST-style lower bounds:

* SAX / iSAX -- PAA values mapped through shared standard-normal
  breakpoints; iSAX words keep a per-segment bit count so a symbol can be
  compared at any coarser cardinality.
* SFA -- truncated DFT values mapped through per-dimension *trained* bins
  (equi-depth or equi-width over a sample).
* VA+ cells -- per-dimension non-uniform quantization of DFT values with
  a greedy bit budget and 1-D k-means cell boundaries.

All bounds are true-distance scale (not squared) and never exceed the
Euclidean distance between any two series realizing the summaries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .core import Dataset
from .errors import BadAlphabet, BadBudget, EmptySample, ShapeMismatch
from .transform import DftSummary, PaaSummary, dft_bin_weights, dft_matrix

# Cap on bits per quantized dimension; 4096 cells is already far beyond
# what a desk-scale sample can populate meaningfully.
VA_MAX_BITS_PER_DIM = 12

_KMEANS_MAX_ITER = 50


@dataclass(frozen=True)
class Breakpoints:
    """Per-dimension sorted cut values; region i lies in [cut[i-1], cut[i])."""

    cuts: tuple

    @property
    def dims(self) -> int:
        return len(self.cuts)

    def regions(self, dim: int = 0) -> int:
        return int(self.cuts[dim].size) + 1

    def for_dim(self, dim: int) -> np.ndarray:
        return self.cuts[dim]


@dataclass(frozen=True)
class SaxWord:
    """Symbols of a PAA summary at one global power-of-two cardinality."""

    symbols: np.ndarray
    cardinality: int


@dataclass(frozen=True)
class IsaxWord:
    """Symbols with a per-segment bit count (cardinality 2**bits)."""

    symbols: np.ndarray
    bits: np.ndarray


@dataclass(frozen=True)
class SfaWord:
    """A prefix of per-dimension region indices over trained bins."""

    symbols: np.ndarray


@dataclass(frozen=True)
class VaGrid:
    """Non-uniform quantization grid over truncated DFT dimensions.

    ``boundaries[d]`` holds the 2**bits[d] - 1 interior cell edges
    (k-means midpoints); ``lo``/``hi`` are the outer edges that every
    indexed series must fall inside for the bounds to hold.
    """

    bits: np.ndarray
    boundaries: tuple
    lo: np.ndarray
    hi: np.ndarray
    source_length: int

    @property
    def dims(self) -> int:
        return int(self.bits.size)

    def cells(self, dim: int) -> int:
        return 1 << int(self.bits[dim])

    def with_outer(self, lo: np.ndarray, hi: np.ndarray) -> "VaGrid":
        """Same grid with widened outer edges (used at index build time)."""
        return VaGrid(
            bits=self.bits,
            boundaries=self.boundaries,
            lo=np.minimum(self.lo, lo),
            hi=np.maximum(self.hi, hi),
            source_length=self.source_length,
        )


@dataclass(frozen=True)
class VaCell:
    """Per-dimension cell indices for one series."""

    codes: np.ndarray


# ---------------------------------------------------------------------------
# SAX / iSAX


def _check_alphabet(a: int, power_of_two: bool = True) -> int:
    if a < 2:
        raise BadAlphabet(f"alphabet size {a} must be >= 2")
    if power_of_two and a & (a - 1) != 0:
        raise BadAlphabet(f"alphabet size {a} must be a power of two")
    return int(np.log2(a)) if power_of_two else 0


def gaussian_breakpoints(a: int) -> Breakpoints:
    """a-1 cuts at standard-normal quantiles i/a (one shared dimension)."""
    if a < 2:
        raise BadAlphabet(f"alphabet size {a} must be >= 2")
    cuts = norm.ppf(np.arange(1, a) / a)
    return Breakpoints(cuts=(cuts,))


def sax_word(p: PaaSummary, bp: Breakpoints, a: int) -> SaxWord:
    """Map each PAA value to the index of its breakpoint region."""
    _check_alphabet(a)
    cuts = bp.for_dim(0)
    if cuts.size != a - 1:
        raise BadAlphabet(f"breakpoints define {cuts.size + 1} regions, expected {a}")
    symbols = np.searchsorted(cuts, p.means, side="right").astype(np.uint16)
    return SaxWord(symbols=symbols, cardinality=a)


def sax_symbols_matrix(paa_values: np.ndarray, cuts: np.ndarray) -> np.ndarray:
    """Full-cardinality symbols for a (count, l) matrix of PAA values."""
    return np.searchsorted(cuts, paa_values, side="right").astype(np.uint16)


def isax_promote(w: SaxWord, bits) -> IsaxWord:
    """Truncate symbols to their high-order ``bits_i`` bits."""
    full_bits = _check_alphabet(w.cardinality)
    bits = np.asarray(bits, dtype=np.int64)
    if bits.shape != w.symbols.shape:
        raise ShapeMismatch("bits vector must match the word length")
    if np.any(bits < 1) or np.any(bits > full_bits):
        raise BadAlphabet(f"per-segment bits must lie in 1..{full_bits}")
    symbols = (w.symbols.astype(np.int64) >> (full_bits - bits)).astype(np.uint16)
    return IsaxWord(symbols=symbols, bits=bits.copy())


def word_region(cuts: np.ndarray, symbol: int, bits: int, full_bits: int) -> tuple[float, float]:
    """Value-space interval [lo, hi) covered by a symbol at reduced bits."""
    span = 1 << (full_bits - bits)
    lo_idx = symbol * span - 1
    hi_idx = (symbol + 1) * span - 1
    lo = -np.inf if lo_idx < 0 else float(cuts[lo_idx])
    hi = np.inf if hi_idx >= cuts.size else float(cuts[hi_idx])
    return lo, hi


def word_intervals(cuts: np.ndarray, symbols: np.ndarray, bits: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized [lo, hi) intervals for symbol/bit arrays of any shape."""
    full_bits = int(np.log2(cuts.size + 1))
    padded = np.concatenate(([-np.inf], cuts, [np.inf]))
    span = np.left_shift(1, full_bits - bits)
    lo = padded[symbols * span]
    hi = padded[np.minimum((symbols + 1) * span, cuts.size + 1)]
    return lo, hi


def sax_mindist(q: PaaSummary, w: IsaxWord, bp: Breakpoints) -> float:
    """MINDIST from a query PAA to an iSAX word: per-segment gap to the
    symbol's region, scaled by segment length; 0 when contained."""
    if w.symbols.size != q.segments:
        raise ShapeMismatch("word length differs from query segments")
    cuts = bp.for_dim(0)
    lo, hi = word_intervals(cuts, w.symbols.astype(np.int64), w.bits)
    gaps = np.maximum(np.maximum(lo - q.means, q.means - hi), 0.0)
    ratio = q.source_length / q.segments
    return float(np.sqrt(ratio * np.dot(gaps, gaps)))


def sax_mindist_sq_rows(
    q_means: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    source_length: int,
) -> np.ndarray:
    """Squared MINDIST for many words at once given their intervals."""
    gaps = np.maximum(np.maximum(lo - q_means, q_means - hi), 0.0)
    ratio = source_length / q_means.size
    return ratio * np.einsum("ij,ij->i", gaps, gaps)


# ---------------------------------------------------------------------------
# SFA bins and words


def _strictly_increasing(cuts: np.ndarray) -> np.ndarray:
    """Nudge duplicate cuts upward so every region keeps positive width."""
    out = cuts.astype(np.float64).copy()
    for i in range(1, out.size):
        if out[i] <= out[i - 1]:
            out[i] = out[i - 1] + 1e-6 * max(1.0, abs(out[i - 1]))
    return out


def train_sfa_bins(sample: Dataset, l: int, a: int, mode: str = "equi-depth") -> Breakpoints:
    """Per-DFT-dimension cuts learned from a sample.

    equi-depth places cuts at sample quantiles i/a; equi-width spaces them
    uniformly between the observed min and max.
    """
    if sample.count == 0:
        raise EmptySample("cannot train bins on an empty sample")
    if a < 2:
        raise BadAlphabet(f"alphabet size {a} must be >= 2")
    if mode not in ("equi-depth", "equi-width"):
        raise BadAlphabet(f"unknown binning mode {mode!r}")
    coeffs = dft_matrix(sample.values, l)
    cuts = []
    fractions = np.arange(1, a) / a
    for d in range(l):
        col = coeffs[:, d]
        if mode == "equi-depth":
            c = np.quantile(col, fractions)
        else:
            lo, hi = float(col.min()), float(col.max())
            c = lo + (hi - lo) * fractions
        cuts.append(_strictly_increasing(c))
    return Breakpoints(cuts=tuple(cuts))


def sfa_word(d: DftSummary, bp: Breakpoints, length: int) -> SfaWord:
    """Region indices of the first ``length`` DFT values."""
    if length < 1 or length > min(d.width, bp.dims):
        raise ShapeMismatch(f"word length {length} out of range")
    symbols = np.empty(length, dtype=np.uint16)
    for j in range(length):
        symbols[j] = np.searchsorted(bp.for_dim(j), d.coeffs[j], side="right")
    return SfaWord(symbols=symbols)


def sfa_words_matrix(coeffs: np.ndarray, bp: Breakpoints) -> np.ndarray:
    """Full-length words for a (count, l) coefficient matrix."""
    count, l = coeffs.shape
    if l > bp.dims:
        raise ShapeMismatch("coefficient width exceeds trained dimensions")
    out = np.empty((count, l), dtype=np.uint16)
    for j in range(l):
        out[:, j] = np.searchsorted(bp.for_dim(j), coeffs[:, j], side="right")
    return out


def sfa_mbr_mindist(q: DftSummary, mbr_lo, mbr_hi) -> float:
    """Distance from a query's DFT values to a coefficient-space box.

    Zero when the query is inside; kept non-DC bins are counted twice.
    """
    lo = np.asarray(mbr_lo, dtype=np.float64)
    hi = np.asarray(mbr_hi, dtype=np.float64)
    if lo.shape != hi.shape or lo.size > q.width:
        raise ShapeMismatch("box dimensions exceed the query summary")
    qv = q.coeffs[: lo.size]
    gaps = np.maximum(np.maximum(lo - qv, qv - hi), 0.0)
    w = dft_bin_weights(q.width)[: lo.size]
    return float(np.sqrt(np.dot(w, gaps * gaps)))


# ---------------------------------------------------------------------------
# VA+ grids


def _kmeans_1d(values: np.ndarray, k: int) -> np.ndarray:
    """Deterministic 1-D Lloyd iteration; returns sorted centroids.

    Initialized at equally spaced sample quantiles, so identical samples
    always train identical grids.  Empty clusters keep their previous
    centroid, which preserves the non-increasing objective.
    """
    if k == 1:
        return np.array([values.mean()])
    centroids = np.quantile(values, (2 * np.arange(k) + 1) / (2 * k))
    for _ in range(_KMEANS_MAX_ITER):
        boundaries = (centroids[:-1] + centroids[1:]) / 2.0
        assign = np.searchsorted(boundaries, values, side="right")
        sums = np.bincount(assign, weights=values, minlength=k)
        counts = np.bincount(assign, minlength=k)
        new = centroids.copy()
        nonempty = counts > 0
        new[nonempty] = sums[nonempty] / counts[nonempty]
        if np.array_equal(new, centroids):
            break
        centroids = new
    return centroids


def kmeans_objective(values: np.ndarray, centroids: np.ndarray) -> float:
    """Within-cluster squared error under midpoint assignment."""
    boundaries = (centroids[:-1] + centroids[1:]) / 2.0
    assign = np.searchsorted(boundaries, values, side="right")
    return float(np.sum((values - centroids[assign]) ** 2))


def allocate_bits(variances: np.ndarray, total_bits: int, max_bits: int = VA_MAX_BITS_PER_DIM) -> np.ndarray:
    """Greedy one-bit-at-a-time allocation to the dimension with the
    largest expected quantization error (variance / 4**bits)."""
    var = np.asarray(variances, dtype=np.float64)
    bits = np.zeros(var.size, dtype=np.int64)
    for _ in range(total_bits):
        err = var / np.power(4.0, bits)
        err[bits >= max_bits] = 0.0
        d = int(np.argmax(err))  # argmax takes the lowest index on ties
        if err[d] <= 0.0:
            break
        bits[d] += 1
    return bits


def train_va_grid(sample: Dataset, total_bits: int, l: int) -> VaGrid:
    """Train a non-uniform quantization grid on a sample's DFT values."""
    if sample.count == 0:
        raise EmptySample("cannot train a grid on an empty sample")
    if total_bits < l:
        raise BadBudget(f"budget {total_bits} smaller than dimension count {l}")
    coeffs = dft_matrix(sample.values, l)
    bits = allocate_bits(coeffs.var(axis=0), total_bits)
    boundaries = []
    for d in range(l):
        if bits[d] == 0:
            boundaries.append(np.empty(0, dtype=np.float64))
            continue
        centroids = _kmeans_1d(coeffs[:, d], 1 << int(bits[d]))
        boundaries.append((centroids[:-1] + centroids[1:]) / 2.0)
    return VaGrid(
        bits=bits,
        boundaries=tuple(boundaries),
        lo=coeffs.min(axis=0),
        hi=coeffs.max(axis=0),
        source_length=sample.length,
    )


def va_cell(d: DftSummary, g: VaGrid) -> VaCell:
    """Cell codes of one summary under a trained grid."""
    if d.width != g.dims:
        raise ShapeMismatch("summary width differs from grid dimensions")
    codes = np.empty(g.dims, dtype=np.uint16)
    for j in range(g.dims):
        codes[j] = np.searchsorted(g.boundaries[j], d.coeffs[j], side="right")
    return VaCell(codes=codes)


def va_cells_matrix(coeffs: np.ndarray, g: VaGrid) -> np.ndarray:
    """Cell codes for a (count, l) coefficient matrix."""
    if coeffs.shape[1] != g.dims:
        raise ShapeMismatch("coefficient width differs from grid dimensions")
    out = np.empty(coeffs.shape, dtype=np.uint16)
    for j in range(g.dims):
        out[:, j] = np.searchsorted(g.boundaries[j], coeffs[:, j], side="right")
    return out


def cell_box(g: VaGrid, codes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-dimension [lo, hi] edges of a cell, using the grid outer edges."""
    lo = np.empty(g.dims, dtype=np.float64)
    hi = np.empty(g.dims, dtype=np.float64)
    for j in range(g.dims):
        b = g.boundaries[j]
        c = int(codes[j])
        lo[j] = g.lo[j] if c == 0 else b[c - 1]
        hi[j] = g.hi[j] if c == b.size else b[c]
    return lo, hi


def va_lower_bound(q: DftSummary, cell: VaCell, g: VaGrid) -> float:
    """Distance from the query to the nearest point of the cell box."""
    if q.width != g.dims:
        raise ShapeMismatch("summary width differs from grid dimensions")
    lo, hi = cell_box(g, cell.codes)
    gaps = np.maximum(np.maximum(lo - q.coeffs, q.coeffs - hi), 0.0)
    w = dft_bin_weights(g.dims)
    return float(np.sqrt(np.dot(w, gaps * gaps)))


def va_upper_bound(q: DftSummary, cell: VaCell, g: VaGrid) -> float:
    """Distance from the query to the farthest corner of the cell box."""
    if q.width != g.dims:
        raise ShapeMismatch("summary width differs from grid dimensions")
    lo, hi = cell_box(g, cell.codes)
    far = np.maximum(np.abs(q.coeffs - lo), np.abs(q.coeffs - hi))
    w = dft_bin_weights(g.dims)
    return float(np.sqrt(np.dot(w, far * far)))

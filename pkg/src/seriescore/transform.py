"""Real-valued summarizations and their generic lower-bounding distances.

Four reductions of a length-n series to l real values:

* PAA   -- per-segment means over n/l equal segments.
* EAPCA -- per-segment mean *and* population stddev over an arbitrary
           segmentation.
* DFT   -- the lowest l/2 complex Fourier coefficients, orthonormally
           scaled and stored as interleaved (re, im) pairs.
* Haar  -- the first l coefficients of the orthonormal Haar wavelet
           decomposition (power-of-two lengths only).

Both orthonormal transforms preserve energy, so distances between
truncated coefficient vectors lower-bound the true Euclidean distance.
For the DFT the conjugate-symmetric halves of a real signal's spectrum
carry equal energy, so every kept non-DC bin is counted twice in bounds
and energy accounting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import as_series
from .errors import BadLength, BadSegmentation, ShapeMismatch


@dataclass(frozen=True)
class PaaSummary:
    """Segment means of a series cut into ``l`` equal pieces."""

    means: np.ndarray
    source_length: int

    @property
    def segments(self) -> int:
        return int(self.means.size)


@dataclass(frozen=True)
class EapcaSummary:
    """Per-segment mean and population stddev over a segmentation.

    ``ends`` are exclusive end indices, strictly increasing, last == n.
    """

    ends: np.ndarray
    means: np.ndarray
    stds: np.ndarray
    source_length: int

    def segment_tuples(self) -> list[tuple[int, float, float]]:
        return [
            (int(e), float(m), float(s))
            for e, m, s in zip(self.ends, self.means, self.stds)
        ]


@dataclass(frozen=True)
class DftSummary:
    """Interleaved (re, im) pairs of the lowest l/2 Fourier coefficients.

    Orthonormal scaling (1/sqrt(n)) makes the full spectrum preserve
    energy.  Slot 1 is the DC imaginary part, identically zero for real
    input; downstream quantizers treat it as a degenerate dimension.
    """

    coeffs: np.ndarray
    source_length: int
    orthonormal: bool = True

    @property
    def width(self) -> int:
        return int(self.coeffs.size)


@dataclass(frozen=True)
class HaarSummary:
    """First ``l`` orthonormal Haar coefficients of a power-of-two series."""

    coeffs: np.ndarray
    source_length: int

    @property
    def width(self) -> int:
        return int(self.coeffs.size)


# ---------------------------------------------------------------------------
# PAA / EAPCA


def paa(s, l: int) -> PaaSummary:
    """Piecewise aggregate approximation: mean of each of ``l`` segments."""
    s = as_series(s)
    n = s.size
    if l < 1 or n % l != 0:
        raise BadSegmentation(f"segment count {l} must divide series length {n}")
    means = s.astype(np.float64).reshape(l, n // l).mean(axis=1)
    return PaaSummary(means=means, source_length=n)


def paa_matrix(values: np.ndarray, l: int) -> np.ndarray:
    """Row-wise PAA means for a (count, n) matrix; returns (count, l)."""
    count, n = values.shape
    if l < 1 or n % l != 0:
        raise BadSegmentation(f"segment count {l} must divide series length {n}")
    return values.astype(np.float64).reshape(count, l, n // l).mean(axis=2)


def eapca(s, ends) -> EapcaSummary:
    """Per-segment mean and population stddev over explicit segment ends."""
    s = as_series(s)
    ends = np.asarray(ends, dtype=np.int64)
    _check_segmentation(ends, s.size)
    means, stds = segment_stats(s[np.newaxis, :].astype(np.float64), ends)
    return EapcaSummary(ends=ends, means=means[0], stds=stds[0], source_length=s.size)


def segment_stats(rows: np.ndarray, ends: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-segment mean and population stddev for every row.

    ``rows`` is (count, n) float; returns two (count, len(ends)) arrays.
    """
    count = rows.shape[0]
    means = np.empty((count, ends.size), dtype=np.float64)
    stds = np.empty((count, ends.size), dtype=np.float64)
    start = 0
    for j, end in enumerate(ends):
        seg = rows[:, start:end]
        means[:, j] = seg.mean(axis=1)
        stds[:, j] = seg.std(axis=1)
        start = int(end)
    return means, stds


def _check_segmentation(ends: np.ndarray, n: int) -> None:
    if ends.size == 0:
        raise BadSegmentation("need at least one segment")
    if ends[-1] != n:
        raise BadSegmentation(f"last end {ends[-1]} must equal series length {n}")
    if np.any(np.diff(ends) <= 0) or ends[0] <= 0:
        raise BadSegmentation("segment ends must be strictly increasing and positive")


# ---------------------------------------------------------------------------
# DFT


def dft_full(s) -> np.ndarray:
    """Full complex spectrum with orthonormal 1/sqrt(n) scaling."""
    s = as_series(s)
    return np.fft.fft(s.astype(np.float64)) / np.sqrt(s.size)


def dft_inverse(spectrum: np.ndarray) -> np.ndarray:
    """Inverse of :func:`dft_full`; returns the real series."""
    n = spectrum.size
    return np.real(np.fft.ifft(spectrum * np.sqrt(n))).astype(np.float32)


def dft_truncate(spectrum: np.ndarray, l: int) -> DftSummary:
    """Keep bins 0..l/2-1 as interleaved (re, im) pairs."""
    n = spectrum.size
    if l < 2 or l % 2 != 0 or l > n:
        raise BadLength(f"coefficient count {l} must be even and within 2..{n}")
    kept = spectrum[: l // 2]
    coeffs = np.empty(l, dtype=np.float64)
    coeffs[0::2] = kept.real
    coeffs[1::2] = kept.imag
    return DftSummary(coeffs=coeffs, source_length=n)


def dft_summarize(s, l: int) -> DftSummary:
    return dft_truncate(dft_full(s), l)


def dft_matrix(values: np.ndarray, l: int) -> np.ndarray:
    """Row-wise truncated DFT summaries for a (count, n) matrix -> (count, l)."""
    count, n = values.shape
    if l < 2 or l % 2 != 0 or l > n:
        raise BadLength(f"coefficient count {l} must be even and within 2..{n}")
    spec = np.fft.rfft(values.astype(np.float64), axis=1) / np.sqrt(n)
    kept = spec[:, : l // 2]
    out = np.empty((count, l), dtype=np.float64)
    out[:, 0::2] = kept.real
    out[:, 1::2] = kept.imag
    return out


def dft_bin_weights(l: int) -> np.ndarray:
    """Per-slot energy weights: DC slots count once, other bins twice."""
    w = np.full(l, 2.0)
    w[:2] = 1.0
    return w


# ---------------------------------------------------------------------------
# Haar


def haar(s) -> np.ndarray:
    """Orthonormal Haar coefficients, scaling first then coarse-to-fine details."""
    s = as_series(s)
    n = s.size
    if n & (n - 1) != 0:
        raise BadLength(f"Haar needs a power-of-two length, got {n}")
    return haar_rows(s[np.newaxis, :].astype(np.float64))[0]


def haar_rows(rows: np.ndarray) -> np.ndarray:
    """Row-wise orthonormal Haar transform of a (count, n) matrix."""
    n = rows.shape[1]
    if n & (n - 1) != 0:
        raise BadLength(f"Haar needs a power-of-two length, got {n}")
    out = np.empty_like(rows, dtype=np.float64)
    current = rows.astype(np.float64)
    width = n
    while width > 1:
        pairs = current.reshape(rows.shape[0], width // 2, 2)
        avg = (pairs[:, :, 0] + pairs[:, :, 1]) / np.sqrt(2.0)
        diff = (pairs[:, :, 0] - pairs[:, :, 1]) / np.sqrt(2.0)
        out[:, width // 2 : width] = diff
        current = avg
        width //= 2
    out[:, 0] = current[:, 0]
    return out


def haar_inverse(coeffs: np.ndarray) -> np.ndarray:
    """Inverse orthonormal Haar transform of a full coefficient vector."""
    c = np.asarray(coeffs, dtype=np.float64)
    n = c.size
    if n & (n - 1) != 0:
        raise BadLength(f"Haar needs a power-of-two length, got {n}")
    current = c[:1].copy()
    width = 1
    while width < n:
        diff = c[width : 2 * width]
        nxt = np.empty(2 * width, dtype=np.float64)
        nxt[0::2] = (current + diff) / np.sqrt(2.0)
        nxt[1::2] = (current - diff) / np.sqrt(2.0)
        current = nxt
        width *= 2
    return current.astype(np.float32)


def haar_truncate(coeffs: np.ndarray, l: int) -> HaarSummary:
    """Keep the first ``l`` Haar coefficients."""
    c = np.asarray(coeffs, dtype=np.float64)
    if l < 1 or l > c.size:
        raise BadLength(f"keep count {l} out of range 1..{c.size}")
    return HaarSummary(coeffs=c[:l].copy(), source_length=int(c.size))


# ---------------------------------------------------------------------------
# Lower bounds


def paa_lower_bound(q: PaaSummary, c: PaaSummary) -> float:
    """sqrt((n/l) * sum of squared mean differences); never exceeds the
    Euclidean distance of any series pair realizing these summaries."""
    if q.segments != c.segments or q.source_length != c.source_length:
        raise ShapeMismatch("PAA summaries have different shapes")
    ratio = q.source_length / q.segments
    d = q.means - c.means
    return float(np.sqrt(ratio * np.dot(d, d)))


def coeff_lower_bound(q, c) -> float:
    """Distance between truncated coefficient vectors; <= true distance.

    For DFT summaries the kept non-DC bins are weighted twice (their
    conjugate mirror carries the same energy); Haar coefficients weigh once.
    """
    if isinstance(q, DftSummary) != isinstance(c, DftSummary):
        raise ShapeMismatch("cannot mix DFT and Haar summaries")
    if q.width != c.width or q.source_length != c.source_length:
        raise ShapeMismatch("summaries have different shapes")
    d = q.coeffs - c.coeffs
    if isinstance(q, DftSummary):
        w = dft_bin_weights(q.width)
        return float(np.sqrt(np.dot(w, d * d)))
    return float(np.sqrt(np.dot(d, d)))

"""Reproducible dataset and query generation.

All randomness flows from a PCG64 generator seeded explicitly, with normal
deviates drawn via the Box-Muller transform, so identical seeds produce
bit-identical outputs on any platform.  Datasets are Gaussian random walks
(cumulative sums of N(0,1) steps), z-normalized per series.  Controlled
query workloads perturb dataset members with increasing Gaussian noise so
query difficulty can be dialed up deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import DEGENERACY_TOL, Dataset, normalize_rows
from .errors import InsufficientQueries

HARDNESS_SUBSET = 20


@dataclass(frozen=True)
class WorkloadSpec:
    """Parameters that fully determine a generated workload."""

    count: int
    length: int
    seed: int
    kind: str = "random-walk"
    noise_levels: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.count <= 0 or self.length <= 0:
            raise ValueError("count and length must be positive")
        if any(s < 0 for s in self.noise_levels):
            raise ValueError("noise levels must be non-negative")


def box_muller(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard normal deviates via Box-Muller over uniform draws."""
    size = int(np.prod(shape))
    half = (size + 1) // 2
    u1 = 1.0 - rng.random(half)  # (0, 1]: keeps log() finite
    u2 = rng.random(half)
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.empty(2 * half, dtype=np.float64)
    z[0::2] = r * np.cos(2.0 * np.pi * u2)
    z[1::2] = r * np.sin(2.0 * np.pi * u2)
    return z[:size].reshape(shape)


def gen_random_walk(spec: WorkloadSpec) -> Dataset:
    """Gaussian random-walk series, z-normalized per series.

    A constant walk (which normalization would reject) is redrawn; with
    N(0,1) steps this is a practically impossible event, but the redraw
    keeps the generator total.
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    rows = np.empty((spec.count, spec.length), dtype=np.float32)
    remaining = np.arange(spec.count)
    while remaining.size:
        steps = box_muller(rng, (remaining.size, spec.length))
        walks = np.cumsum(steps, axis=1)
        stds = walks.std(axis=1)
        good = stds > DEGENERACY_TOL
        ok_rows = remaining[good]
        if ok_rows.size:
            rows[ok_rows] = normalize_rows(walks[good])
        remaining = remaining[~good]
    return Dataset(values=rows)


def gen_controlled_queries(
    data: Dataset,
    q_count: int,
    noise_levels,
    seed: int,
) -> tuple[Dataset, list[tuple[int, float]]]:
    """Queries extracted from the dataset with round-robin noise levels.

    Returns the query set plus one (source_id, noise_level) record per
    query.  Sources are drawn without replacement.  A zero-noise query is
    the verbatim source series: adding no noise and re-normalizing an
    already normalized series is the identity, so the copy realizes the
    exact-match contract without float round-off.
    """
    levels = [float(s) for s in noise_levels]
    if not levels:
        raise ValueError("need at least one noise level")
    if q_count > data.count:
        raise InsufficientQueries(f"cannot draw {q_count} sources from {data.count} series")
    rng = np.random.Generator(np.random.PCG64(seed))
    sources = rng.choice(data.count, size=q_count, replace=False)
    rows = np.empty((q_count, data.length), dtype=np.float32)
    records = []
    for i, src in enumerate(sources):
        sigma = levels[i % len(levels)]
        base = data.values[src]
        if sigma == 0.0:
            rows[i] = base
        else:
            noisy = base.astype(np.float64) + sigma * box_muller(rng, (data.length,))
            rows[i] = normalize_rows(noisy[np.newaxis, :])[0]
        records.append((int(src), sigma))
    return Dataset(values=rows), records


def classify_hardness(ratios_by_method: dict) -> tuple[list[str], list[int], list[int]]:
    """Label queries easy/hard by cross-method average pruning ratio.

    The 20 queries with the highest average ratio are "easy", the 20
    lowest are "hard"; everything else is "mid".  Ties keep query-index
    order, so the labeling is deterministic.
    """
    arrays = [np.asarray(v, dtype=np.float64) for v in ratios_by_method.values()]
    if not arrays:
        raise InsufficientQueries("no pruning ratios supplied")
    n = arrays[0].size
    if any(a.size != n for a in arrays):
        raise InsufficientQueries("methods report different query counts")
    if n < 2 * HARDNESS_SUBSET:
        raise InsufficientQueries(f"need at least {2 * HARDNESS_SUBSET} queries, got {n}")
    avg = np.mean(arrays, axis=0)
    order = np.argsort(-avg, kind="stable")
    easy = sorted(int(i) for i in order[:HARDNESS_SUBSET])
    hard = sorted(int(i) for i in order[-HARDNESS_SUBSET:])
    labels = ["mid"] * n
    for i in easy:
        labels[i] = "easy"
    for i in hard:
        labels[i] = "hard"
    return labels, easy, hard

"""Bulk-loaded iSAX index with tree search and a skip-sequential exact mode.

Structure: a logical root holds everything until it overflows; its split
materializes one child per occupied first-bit word combination (the flat
first level), and below that every split is binary, adding one bit to the
segment whose member PAA values spread the most.  Leaves keep ids sorted
so distance ties always resolve to the smaller id.

Three search modes:

* ``approximate_search`` -- follow the query's own word to one leaf.
* ``exact_search``       -- best-first traversal by node MINDIST with
  best-so-far pruning, seeded by the approximate answer.
* ``sims_exact_search``  -- seed like above, then lower-bound every series
  from the full-cardinality word array in file order and refine the
  survivors skip-sequentially (each maximal skipped run counts one seek).

The index stores summaries and ids only; searches take the dataset for
raw-series refinement.
"""

from __future__ import annotations

import numpy as np

from .core import (
    AccessStats,
    Dataset,
    KnnHeap,
    NeighborSet,
    as_series,
    block_count,
    refine_block,
    reorder_indices,
)
from .discretize import (
    gaussian_breakpoints,
    sax_mindist_sq_rows,
    sax_symbols_matrix,
    word_intervals,
)
from .errors import BadAlphabet, EmptyDataset, LengthMismatch
from .transform import paa_matrix

_NO_CHILD = -1
_REFINE_BLOCK = 1024


class IsaxIndex:
    """Immutable after build; safe for concurrent read-only queries."""

    method = "isax"

    def __init__(self):
        self.length = 0
        self.segments = 0
        self.alphabet = 0
        self.full_bits = 0
        self.leaf_threshold = 0
        self.count = 0
        self.cuts = None  # (a-1,) float64
        # Per-node arrays; node 0 is the logical root.
        self.node_symbols = None  # (nodes, l) int64
        self.node_bits = None  # (nodes, l) int64
        self.node_children = None  # (nodes, 2) int64, _NO_CHILD for none
        self.node_split_seg = None  # (nodes,) int64, -1 for leaves
        self.node_lo = None  # (nodes, l) float64 region intervals
        self.node_hi = None
        self.node_size = None
        self.root_child_keys = None  # packed first-bit combos, sorted
        self.root_child_nodes = None
        self.leaf_ids = {}  # node id -> sorted np.int64 ids
        self.summary_words = None  # (count, l) uint16, file order
        self._word_lo = None  # (count, l) float64 full-cardinality intervals
        self._word_hi = None

    # ------------------------------------------------------------------
    # build

    @classmethod
    def build(cls, data: Dataset, leaf_threshold: int, a: int = 256, l: int = 16) -> "IsaxIndex":
        if data.count == 0:
            raise EmptyDataset("cannot index an empty dataset")
        if leaf_threshold < 1:
            raise BadAlphabet(f"leaf threshold {leaf_threshold} must be >= 1")
        if a < 2 or a & (a - 1) != 0:
            raise BadAlphabet(f"alphabet size {a} must be a power of two >= 2")

        idx = cls()
        idx.length = data.length
        idx.segments = l
        idx.alphabet = a
        idx.full_bits = int(np.log2(a))
        idx.leaf_threshold = leaf_threshold
        idx.count = data.count
        idx.cuts = gaussian_breakpoints(a).for_dim(0)

        paa_vals = paa_matrix(data.values, l)
        words = sax_symbols_matrix(paa_vals, idx.cuts)
        idx.summary_words = words

        symbols = [np.zeros(l, dtype=np.int64)]
        bits = [np.zeros(l, dtype=np.int64)]
        children = [[_NO_CHILD, _NO_CHILD]]
        split_seg = [-1]
        sizes = [data.count]
        leaf_ids = {0: np.arange(data.count, dtype=np.int64)}
        root_children: list[tuple[int, int]] = []

        def new_node(sym, bit, ids) -> int:
            node = len(symbols)
            symbols.append(sym)
            bits.append(bit)
            children.append([_NO_CHILD, _NO_CHILD])
            split_seg.append(-1)
            sizes.append(ids.size)
            leaf_ids[node] = np.sort(ids)
            return node

        def split(node: int) -> None:
            ids = leaf_ids[node]
            if ids.size <= leaf_threshold:
                return
            if node == 0:
                # Root overflow: materialize the flat first level.
                first = (words[ids].astype(np.int64) >> (idx.full_bits - 1)).astype(np.int64)
                keys = first @ (1 << np.arange(l, dtype=np.int64))
                order = np.argsort(keys, kind="stable")
                ids_sorted, keys_sorted = ids[order], keys[order]
                starts = np.flatnonzero(np.r_[True, np.diff(keys_sorted) != 0])
                bounds = np.r_[starts, keys_sorted.size]
                del leaf_ids[0]
                for s, e in zip(bounds[:-1], bounds[1:]):
                    group = ids_sorted[s:e]
                    sym = first[order[s]].copy()
                    child = new_node(sym, np.ones(l, dtype=np.int64), group)
                    root_children.append((int(keys_sorted[s]), child))
                    split(child)
                return

            node_words = words[ids].astype(np.int64)
            node_paa = paa_vals[ids]
            candidates = [s for s in range(l) if bits[node][s] < idx.full_bits]
            # Largest PAA variance first; ties by lowest segment index.
            candidates.sort(key=lambda s: (-node_paa[:, s].var(), s))
            for seg in candidates:
                shift = idx.full_bits - bits[node][seg] - 1
                side = (node_words[:, seg] >> shift) & 1
                left, right = ids[side == 0], ids[side == 1]
                if left.size == 0 or right.size == 0:
                    continue  # cannot separate on this segment; advance
                split_seg[node] = seg
                del leaf_ids[node]
                for b, part in ((0, left), (1, right)):
                    sym = symbols[node].copy()
                    bit = bits[node].copy()
                    sym[seg] = sym[seg] * 2 + b
                    bit[seg] += 1
                    child = new_node(sym, bit, part)
                    children[node][b] = child
                    split(child)
                return
            # No segment separates the members: identical words at full
            # cardinality; the leaf is allowed to overflow.

        split(0)

        idx.node_symbols = np.array(symbols, dtype=np.int64)
        idx.node_bits = np.array(bits, dtype=np.int64)
        idx.node_children = np.array(children, dtype=np.int64)
        idx.node_split_seg = np.array(split_seg, dtype=np.int64)
        idx.node_size = np.array(sizes, dtype=np.int64)
        idx.leaf_ids = leaf_ids
        root_children.sort()
        idx.root_child_keys = np.array([k for k, _ in root_children], dtype=np.int64)
        idx.root_child_nodes = np.array([c for _, c in root_children], dtype=np.int64)
        idx._finalize()
        return idx

    def _finalize(self) -> None:
        """Derive value-space intervals for nodes and stored words."""
        nodes = self.node_symbols.shape[0]
        lo = np.empty((nodes, self.segments))
        hi = np.empty((nodes, self.segments))
        lo[0], hi[0] = -np.inf, np.inf
        if nodes > 1:
            lo[1:], hi[1:] = word_intervals(self.cuts, self.node_symbols[1:], self.node_bits[1:])
        self.node_lo, self.node_hi = lo, hi
        full_bits_mat = np.full_like(self.summary_words, self.full_bits, dtype=np.int64)
        self._word_lo, self._word_hi = word_intervals(
            self.cuts, self.summary_words.astype(np.int64), full_bits_mat
        )

    # ------------------------------------------------------------------
    # helpers

    def is_leaf(self, node: int) -> bool:
        return node in self.leaf_ids

    def leaves(self):
        return sorted(self.leaf_ids)

    def _query_paa_word(self, query) -> tuple[np.ndarray, np.ndarray]:
        query = as_series(query)
        if query.size != self.length:
            raise LengthMismatch(f"query length {query.size} != indexed length {self.length}")
        q_paa = paa_matrix(query[np.newaxis, :], self.segments)[0]
        q_word = np.searchsorted(self.cuts, q_paa, side="right").astype(np.int64)
        return q_paa, q_word

    def _node_mindist_sq(self, q_paa: np.ndarray, nodes) -> np.ndarray:
        nodes = np.asarray(nodes, dtype=np.int64)
        return sax_mindist_sq_rows(q_paa, self.node_lo[nodes], self.node_hi[nodes], self.length)

    def _descend(self, q_word: np.ndarray, q_paa: np.ndarray) -> int:
        """Walk the query's own word down to exactly one leaf."""
        if self.is_leaf(0):
            return 0
        first = q_word >> (self.full_bits - 1)
        key = int(first @ (1 << np.arange(self.segments, dtype=np.int64)))
        pos = np.searchsorted(self.root_child_keys, key)
        if pos < self.root_child_keys.size and self.root_child_keys[pos] == key:
            node = int(self.root_child_nodes[pos])
        else:
            # The query's combination is unoccupied: enter the nearest
            # first-level region instead.
            m = self._node_mindist_sq(q_paa, self.root_child_nodes)
            node = int(self.root_child_nodes[np.argmin(m)])
        while not self.is_leaf(node):
            seg = int(self.node_split_seg[node])
            shift = self.full_bits - int(self.node_bits[node][seg]) - 1
            bit = int((q_word[seg] >> shift) & 1)
            node = int(self.node_children[node][bit])
        return node

    def _refine_leaf(self, data, node, q64, order, heap, stats) -> None:
        ids = self.leaf_ids[node]
        refine_block(data.values[ids], ids, q64, order, heap)
        stats.series_examined += ids.size
        stats.random_accesses += 1
        stats.sequential_accesses += block_count(ids.size, self.length)

    # ------------------------------------------------------------------
    # searches

    def approximate_search(self, data: Dataset, query, k: int) -> tuple[NeighborSet, AccessStats]:
        """Visit the single leaf the query's word selects."""
        heap, stats, _ = self._approximate(data, query, k)
        assert stats.random_accesses == 1, "approximate search must visit exactly one leaf"
        return heap.result(), stats

    def _approximate(self, data, query, k):
        q_paa, q_word = self._query_paa_word(query)
        q64 = np.asarray(query, dtype=np.float64)
        order = reorder_indices(query)
        heap = KnnHeap(k)
        stats = AccessStats()
        leaf = self._descend(q_word, q_paa)
        self._refine_leaf(data, leaf, q64, order, heap, stats)
        return heap, stats, leaf

    def exact_search(self, data: Dataset, query, k: int) -> tuple[NeighborSet, AccessStats]:
        """Best-first tree search; equals the sequential-scan answer."""
        import heapq

        heap, stats, seed_leaf = self._approximate(data, query, k)
        q_paa, _ = self._query_paa_word(query)
        q64 = np.asarray(query, dtype=np.float64)
        order = reorder_indices(query)

        pq: list[tuple[float, int]] = []
        if self.is_leaf(0):
            frontier = np.array([0], dtype=np.int64)
        else:
            frontier = self.root_child_nodes
        mdists = self._node_mindist_sq(q_paa, frontier)
        stats.lb_computations += frontier.size
        for m, node in zip(mdists, frontier):
            heapq.heappush(pq, (float(m), int(node)))

        while pq:
            m, node = heapq.heappop(pq)
            if m >= heap.threshold_sq():
                break
            if self.is_leaf(node):
                if node != seed_leaf:
                    self._refine_leaf(data, node, q64, order, heap, stats)
                continue
            kids = self.node_children[node]
            km = self._node_mindist_sq(q_paa, kids)
            stats.lb_computations += 2
            for cm, kid in zip(km, kids):
                heapq.heappush(pq, (float(cm), int(kid)))
        return heap.result(), stats

    def sims_exact_search(self, data: Dataset, query, k: int) -> tuple[NeighborSet, AccessStats]:
        """Skip-sequential exact search over the full-cardinality words.

        One pass over the in-order summary array lower-bounds every series;
        survivors are read in file order with a tightening best-so-far.
        Each maximal skipped run before a read charges one random access.
        """
        heap, stats, seed_leaf = self._approximate(data, query, k)
        q_paa, _ = self._query_paa_word(query)
        q64 = np.asarray(query, dtype=np.float64)
        order = reorder_indices(query)

        mindist_sq = sax_mindist_sq_rows(q_paa, self._word_lo, self._word_hi, self.length)
        stats.lb_computations += self.count

        seeded = np.zeros(self.count, dtype=bool)
        seeded[self.leaf_ids[seed_leaf]] = True
        read = np.zeros(self.count, dtype=bool)
        from .core import refine_block

        for start in range(0, self.count, _REFINE_BLOCK):
            stop = min(start + _REFINE_BLOCK, self.count)
            thr = heap.threshold_sq()
            mask = ~seeded[start:stop]
            if np.isfinite(thr):
                mask &= mindist_sq[start:stop] < thr
            cand = start + np.flatnonzero(mask)
            if cand.size:
                refine_block(data.values[cand], cand, q64, order, heap)
                read[cand] = True
                stats.series_examined += cand.size

        # Seek/sequential accounting from the realized read pattern: one
        # seek per maximal skipped run that precedes a read.
        reads = np.flatnonzero(read)
        if reads.size:
            run_breaks = np.flatnonzero(np.diff(reads) > 1)
            stats.random_accesses += int(run_breaks.size) + (1 if reads[0] > 0 else 0)
            starts = np.r_[0, run_breaks + 1]
            ends = np.r_[run_breaks, reads.size - 1]
            for s, e in zip(starts, ends):
                stats.sequential_accesses += block_count(int(reads[e] - reads[s] + 1), self.length)
        return heap.result(), stats

    # ------------------------------------------------------------------
    # measure hooks

    def iter_leaf_bounds(self, query):
        """(leaf MINDIST, member ids) per leaf, in node order."""
        q_paa, _ = self._query_paa_word(query)
        leaves = np.array(self.leaves(), dtype=np.int64)
        m = np.sqrt(self._node_mindist_sq(q_paa, leaves))
        for lb, node in zip(m, leaves):
            yield float(lb), self.leaf_ids[int(node)]

    def series_lower_bounds(self, query) -> np.ndarray:
        """Full-cardinality per-series MINDIST (true-distance scale)."""
        q_paa, _ = self._query_paa_word(query)
        return np.sqrt(sax_mindist_sq_rows(q_paa, self._word_lo, self._word_hi, self.length))

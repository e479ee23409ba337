"""Byte-pair encoding over word types weighted by corpus counts."""

import heapq
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from ..errors import SegbiasError
from .base import SegmentationModel


def check_merge_table(merges):
    """Raise ValueError if the table has duplicates or underivable pieces."""
    seen = set()
    derivable = set()
    for rank, (left, right) in enumerate(merges):
        if (left, right) in seen:
            raise ValueError(f"duplicate merge {left!r} {right!r} at rank {rank}")
        seen.add((left, right))
        for piece in (left, right):
            if len(piece) != 1 and piece not in derivable:
                raise ValueError(f"merge rank {rank}: piece {piece!r} is not derivable from earlier merges")
        derivable.add(left + right)


def merge_symbols(symbols, left, right):
    """Merge every non-overlapping occurrence of (left, right), left to right."""
    out = []
    i = 0
    n = len(symbols)
    while i < n:
        if i < n - 1 and symbols[i] == left and symbols[i + 1] == right:
            out.append(left + right)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return out


@dataclass(frozen=True, eq=False)
class BPEModel(SegmentationModel):
    method = "bpe"
    merges: tuple = ()
    _ranks: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        merges = tuple((l, r) for l, r in self.merges)
        check_merge_table(merges)
        object.__setattr__(self, "merges", merges)
        self._ranks.update({pair: rank for rank, pair in enumerate(merges)})

    def _segment(self, word):
        # Same result as one pass per merge in table order: jump straight to
        # the lowest-ranked applicable merge above the last one applied.
        symbols = list(word)
        ranks = self._ranks
        floor = -1
        while len(symbols) > 1:
            best = None
            for pair in zip(symbols, symbols[1:]):
                r = ranks.get(pair)
                if r is not None and r > floor and (best is None or r < best):
                    best = r
            if best is None:
                break
            symbols = merge_symbols(symbols, *self.merges[best])
            floor = best
        return symbols

    def truncated(self, k):
        return BPEModel(alphabet=self.alphabet, merges=self.merges[:k])

    def vocab_entries(self):
        entries = [(ch, None) for ch in sorted(self.alphabet)]
        seen = set(self.alphabet)
        for left, right in self.merges:
            piece = left + right
            if piece not in seen:
                seen.add(piece)
                entries.append((piece, None))
        return entries


def _pairs(symbols):
    return Counter(zip(symbols, symbols[1:]))


def train_bpe(corpus, num_merges):
    """Learn up to ``num_merges`` merges; stops early once no pair occurs twice.

    Ties on pair frequency go to the lexicographically smallest
    (left, right).
    """
    if num_merges < 1:
        raise ValueError("num_merges must be >= 1")
    counts = Counter(corpus.words())
    if not counts:
        raise SegbiasError("cannot train on an empty corpus")
    words = sorted(counts)
    freqs = [counts[w] for w in words]
    symbols = [list(w) for w in words]

    stats = Counter()
    where = defaultdict(set)
    for idx, syms in enumerate(symbols):
        for pair, n in _pairs(syms).items():
            stats[pair] += n * freqs[idx]
            where[pair].add(idx)
    heap = [(-c, l, r) for (l, r), c in stats.items()]
    heapq.heapify(heap)

    merges = []
    done = set()
    while len(merges) < num_merges and heap:
        negc, left, right = heapq.heappop(heap)
        pair = (left, right)
        if pair in done or stats.get(pair, 0) != -negc:
            continue
        if -negc < 2:
            break
        merges.append(pair)
        done.add(pair)
        touched = set()
        for idx in sorted(where.pop(pair)):
            syms = symbols[idx]
            old = _pairs(syms)
            if pair not in old:
                continue
            new_syms = merge_symbols(syms, left, right)
            new = _pairs(new_syms)
            symbols[idx] = new_syms
            f = freqs[idx]
            for p, n in old.items():
                stats[p] -= n * f
                touched.add(p)
            for p, n in new.items():
                stats[p] += n * f
                where[p].add(idx)
                touched.add(p)
        stats.pop(pair, None)
        for p in touched:
            c = stats.get(p, 0)
            if c <= 0:
                stats.pop(p, None)
            elif p not in done:
                heapq.heappush(heap, (-c, p[0], p[1]))
    return BPEModel(alphabet=frozenset(ch for w in words for ch in w), merges=tuple(merges))

"""MDL morph-lexicon induction (Morfessor Baseline style) and its
lexicon-capped variant.

Total cost, in bits, is corpus cost plus lexicon cost:

    corpus  = -sum_m count(m) * log2(count(m) / N)
    lexicon = sum over lexicon morphs of -log2 p(c) for each character,
              plus -log2 p(end) per morph

where p is the character distribution over lexicon entries with one end
marker per morph.
"""

import math
from collections import Counter
from dataclasses import dataclass, field

from ..errors import SegbiasError
from .base import SegmentationModel
from .unigram import viterbi


def _xlogx(x):
    return x * math.log2(x) if x > 0 else 0.0


def mdl_cost(morph_counts):
    """Total two-part cost of a morph -> count mapping, computed from scratch."""
    counts = {m: c for m, c in morph_counts.items() if c > 0}
    if not counts:
        return 0.0
    n = sum(counts.values())
    corpus = _xlogx(n) - math.fsum(_xlogx(c) for c in counts.values())
    chars = Counter()
    for m in counts:
        chars.update(m)
    lex_size = len(counts)
    total = sum(chars.values()) + lex_size
    lexicon = _xlogx(total) - math.fsum(_xlogx(c) for c in chars.values()) - _xlogx(lex_size)
    return corpus + lexicon


class _Infeasible(Exception):
    pass


class _MorphState:
    """Morph and character counts with incrementally maintained cost terms."""

    def __init__(self):
        self.counts = {}
        self.chars = Counter()
        self.tokens = 0
        self.n_chars = 0
        self.refresh()
        self.journal = []

    def refresh(self):
        self.s_morph = math.fsum(_xlogx(c) for c in self.counts.values())
        self.s_char = math.fsum(_xlogx(c) for c in self.chars.values())

    @property
    def size(self):
        return len(self.counts)

    def cost(self):
        size = len(self.counts)
        total = self.n_chars + size
        return (_xlogx(self.tokens) - self.s_morph
                + _xlogx(total) - self.s_char - _xlogx(size))

    def snapshot(self):
        return self.s_morph, self.s_char

    def restore(self, snap):
        self.s_morph, self.s_char = snap

    def add(self, morph, f):
        self._add(morph, f)
        self.journal.append((morph, f))

    def remove(self, morph, f):
        self._remove(morph, f)
        self.journal.append((morph, -f))

    def _add(self, morph, f):
        old = self.counts.get(morph, 0)
        self.counts[morph] = old + f
        self.s_morph += _xlogx(old + f) - _xlogx(old)
        self.tokens += f
        if old == 0:
            self._chars(morph, 1)

    def _remove(self, morph, f):
        old = self.counts[morph]
        new = old - f
        if new < 0:
            raise AssertionError(f"negative count for {morph!r}")
        if new:
            self.counts[morph] = new
        else:
            del self.counts[morph]
            self._chars(morph, -1)
        self.s_morph += _xlogx(new) - _xlogx(old)
        self.tokens -= f

    def _chars(self, morph, delta):
        for ch in morph:
            old = self.chars[ch]
            self.chars[ch] = old + delta
            self.s_char += _xlogx(old + delta) - _xlogx(old)
            if not old + delta:
                del self.chars[ch]
        self.n_chars += delta * len(morph)

    def rollback(self, mark, snap):
        while len(self.journal) > mark:
            morph, f = self.journal.pop()
            if f > 0:
                self._remove(morph, f)
            else:
                self._add(morph, -f)
        self.restore(snap)

    def split(self, s, f, cap):
        """Add the lowest-cost recursive binary analysis of ``s`` and return it.

        Ties keep the unsplit form, then the leftmost split point.
        """
        snap = self.snapshot()
        best_cost, best_at = None, None
        for at in range(len(s)):
            parts = (s,) if at == 0 else (s[:at], s[at:])
            for p in parts:
                self.add(p, f)
            if cap is None or self.size <= cap:
                c = self.cost()
                if best_cost is None or c < best_cost:
                    best_cost, best_at = c, at
            for p in parts:
                self.remove(p, f)
            self.restore(snap)
        if best_at is None:
            raise _Infeasible(s)
        if best_at == 0:
            self.add(s, f)
            return [s]
        left, right = s[:best_at], s[best_at:]
        self.add(left, f)
        self.add(right, f)
        self.remove(left, f)
        out = self.split(left, f, cap)
        self.remove(right, f)
        return out + self.split(right, f, cap)


@dataclass(frozen=True, eq=False)
class MorphModel(SegmentationModel):
    method: str = "morfessor"
    morphs: dict = field(default_factory=dict)
    analyses: dict = field(default_factory=dict)
    cap: int = None
    trace: tuple = field(default=(), repr=False, compare=False)
    lexicon_sizes: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        if self.method not in ("morfessor", "lmvr"):
            raise ValueError(f"unknown morph method {self.method!r}")
        used = set()
        for word, morphs in self.analyses.items():
            if "".join(morphs) != word:
                raise ValueError(f"analysis {morphs!r} does not spell {word!r}")
            for m in morphs:
                if m not in self.morphs:
                    raise ValueError(f"morph {m!r} in analysis of {word!r} is not in the lexicon")
            used.update(morphs)
        for m, c in self.morphs.items():
            if not isinstance(c, int) or c <= 0:
                raise ValueError(f"count of morph {m!r} must be a positive integer")
            if m not in used:
                raise ValueError(f"morph {m!r} appears in no analysis")
        if self.cap is not None and len(self.morphs) > self.cap:
            raise ValueError(f"lexicon size {len(self.morphs)} exceeds cap {self.cap}")
        if not self.alphabet:
            object.__setattr__(self, "alphabet", frozenset(ch for w in self.analyses for ch in w))
        n = sum(self.morphs.values())
        object.__setattr__(self, "_logp", {m: math.log2(c / n) for m, c in self.morphs.items()})
        object.__setattr__(self, "_unk", math.log2(0.5 / n))
        object.__setattr__(self, "_max_len", max(len(m) for m in self.morphs))

    def _segment(self, word):
        known = self.analyses.get(word)
        if known is not None:
            return list(known)
        return list(viterbi(word, self._logp, self._max_len, self._unk)[1])

    def cost(self):
        return mdl_cost(self.morphs)

    def vocab_entries(self):
        return sorted(self.morphs.items(), key=lambda kv: (-kv[1], kv[0]))


def _train(corpus, cap, max_epochs, convergence_eps, method):
    counts = Counter(corpus.words())
    if not counts:
        raise SegbiasError("cannot train on an empty corpus")
    alphabet = frozenset(ch for w in counts for ch in w)
    if cap is not None and cap < len(alphabet):
        raise ValueError(f"cap {cap} is smaller than the alphabet ({len(alphabet)})")
    if max_epochs < 1 or convergence_eps < 0:
        raise ValueError("max_epochs must be >= 1 and convergence_eps >= 0")

    order = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    state = _MorphState()
    analyses = {}
    # Start from the character split so a cap never binds before training.
    for word, f in order:
        analyses[word] = list(word)
        for ch in word:
            state.add(ch, f)
    state.journal.clear()
    state.refresh()
    trace = [state.cost()]
    sizes = [state.size]

    for _ in range(max_epochs):
        for word, f in order:
            before = state.cost()
            snap = state.snapshot()
            mark = len(state.journal)
            for m in analyses[word]:
                state.remove(m, f)
            try:
                new = state.split(word, f, cap)
            except _Infeasible:
                new = None
            if new is not None and state.cost() < before - 1e-9 * max(1.0, abs(before)):
                analyses[word] = new
                sizes.append(state.size)
            else:
                state.rollback(mark, snap)
            state.journal.clear()
        state.refresh()
        cur = state.cost()
        prev = trace[-1]
        trace.append(cur)
        if prev <= 0 or (prev - cur) / prev < convergence_eps:
            break

    return MorphModel(
        alphabet=alphabet,
        method=method,
        morphs=dict(state.counts),
        analyses={w: tuple(a) for w, a in sorted(analyses.items())},
        cap=cap,
        trace=tuple(trace),
        lexicon_sizes=tuple(sizes),
    )


def train_morfessor(corpus, max_epochs=10, convergence_eps=1e-4):
    return _train(corpus, None, max_epochs, convergence_eps, "morfessor")


def train_lmvr(corpus, cap, max_epochs=10, convergence_eps=1e-4):
    """Like train_morfessor, but a re-analysis is only accepted if the
    lexicon stays within ``cap`` morphs. ``cap=None`` means unbounded."""
    if cap is not None and cap < 1:
        raise ValueError("cap must be a positive integer")
    return _train(corpus, cap, max_epochs, convergence_eps, "lmvr")

"""Unigram language-model segmentation.

Every word is segmented by dynamic programming over its lattice of
vocabulary pieces; the piece inventory is trained by EM with iterative
pruning.
"""

import math
from collections import Counter
from dataclasses import dataclass, field

from ..errors import SegbiasError
from .base import SegmentationModel

# Unknown characters score this far below the least probable piece.
UNK_PENALTY = 10.0
_MIN_COUNT = 1e-300


def logsumexp(values):
    m = max(values)
    if m == -math.inf:
        return m
    return m + math.log(math.fsum(math.exp(v - m) for v in values))


def _better(a, b):
    """True if DP entry ``a`` beats ``b``: higher score, fewer tokens, then
    the lexicographically smaller token sequence."""
    if b is None:
        return True
    if a[0] != b[0]:
        return a[0] > b[0]
    if len(a[1]) != len(b[1]):
        return len(a[1]) < len(b[1])
    return a[1] < b[1]


def viterbi(word, logp, max_len, unk_logp=None, exclude=None):
    """Best (score, tokens) for ``word``.

    ``unk_logp`` scores single characters missing from ``logp``; when it is
    None such characters make the word unsegmentable and None is returned.
    ``exclude`` removes one piece from consideration.
    """
    n = len(word)
    best = [None] * (n + 1)
    best[0] = (0.0, ())
    for i in range(1, n + 1):
        cur = None
        for j in range(max(0, i - max_len), i):
            prev = best[j]
            if prev is None:
                continue
            piece = word[j:i]
            lp = None if piece == exclude else logp.get(piece)
            if lp is None:
                if i - j == 1 and unk_logp is not None:
                    lp = unk_logp
                else:
                    continue
            cand = (prev[0] + lp, prev[1] + (piece,))
            if _better(cand, cur):
                cur = cand
        best[i] = cur
    return best[n]


def _arcs(word, logp, max_len):
    n = len(word)
    arcs = []
    for i in range(1, n + 1):
        for j in range(max(0, i - max_len), i):
            piece = word[j:i]
            lp = logp.get(piece)
            if lp is not None:
                arcs.append((j, i, piece, lp))
    return arcs


def _forward_backward_log(n, arcs):
    alpha = [-math.inf] * (n + 1)
    alpha[0] = 0.0
    beta = [-math.inf] * (n + 1)
    beta[n] = 0.0
    into = [[] for _ in range(n + 1)]
    out_of = [[] for _ in range(n + 1)]
    for j, i, _, lp in arcs:
        into[i].append((j, lp))
        out_of[j].append((i, lp))
    for i in range(1, n + 1):
        if into[i]:
            alpha[i] = logsumexp([alpha[j] + lp for j, lp in into[i]])
    for j in range(n - 1, -1, -1):
        if out_of[j]:
            beta[j] = logsumexp([beta[i] + lp for i, lp in out_of[j]])
    z = alpha[n]
    return z, [(piece, math.exp(alpha[j] + lp + beta[i] - z)) for j, i, piece, lp in arcs]


def _forward_backward(word, logp, max_len):
    """Log partition of ``word`` and the posterior weight of every lattice arc.

    Runs in probability space; words whose partition underflows are redone
    in log space.
    """
    n = len(word)
    arcs = _arcs(word, logp, max_len)
    probs = [(j, i, piece, math.exp(lp)) for j, i, piece, lp in arcs]
    alpha = [0.0] * (n + 1)
    alpha[0] = 1.0
    for j, i, _, p in probs:  # arcs are ordered by end position
        alpha[i] += alpha[j] * p
    z = alpha[n]
    if not z > 1e-250:
        return _forward_backward_log(n, arcs)
    beta = [0.0] * (n + 1)
    beta[n] = 1.0
    for j, i, _, p in reversed(probs):
        beta[j] += p * beta[i]
    return math.log(z), [(piece, alpha[j] * p * beta[i] / z) for j, i, piece, p in probs]


def e_step(word_counts, logp):
    """Expected piece counts and corpus log-likelihood under ``logp``."""
    max_len = max(len(p) for p in logp)
    expected = Counter()
    loglik = []
    for word, count in word_counts:
        z, post = _forward_backward(word, logp, max_len)
        if z == -math.inf:
            raise SegbiasError(f"word {word!r} has no segmentation under the current pieces")
        loglik.append(count * z)
        for piece, w in post:
            expected[piece] += count * w
    return expected, math.fsum(loglik)


def m_step(expected, pieces):
    counts = {p: max(expected.get(p, 0.0), _MIN_COUNT) for p in pieces}
    total = math.fsum(counts.values())
    return {p: math.log(c / total) for p, c in counts.items()}


def normalize(logp):
    z = logsumexp(list(logp.values()))
    return {p: lp - z for p, lp in logp.items()}


@dataclass(frozen=True, eq=False)
class UnigramModel(SegmentationModel):
    method = "unigram"
    pieces: dict = field(default_factory=dict)
    trace: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        if not self.pieces:
            raise ValueError("unigram model needs at least one piece")
        for piece, lp in self.pieces.items():
            if not piece:
                raise ValueError("empty piece")
            if not math.isfinite(lp) or lp > 0.0:
                raise ValueError(f"log-probability of {piece!r} must be finite and <= 0, got {lp!r}")
        mass = math.fsum(math.exp(lp) for lp in self.pieces.values())
        if abs(mass - 1.0) > 1e-6:
            raise ValueError(f"piece probabilities sum to {mass!r}, not 1")
        if not self.alphabet:
            object.__setattr__(self, "alphabet", frozenset(p for p in self.pieces if len(p) == 1))

    @property
    def max_piece_len(self):
        return max(len(p) for p in self.pieces)

    @property
    def unk_logp(self):
        return min(self.pieces.values()) - UNK_PENALTY

    def best(self, word):
        return viterbi(word, self.pieces, self.max_piece_len, self.unk_logp)

    def _segment(self, word):
        return list(self.best(word)[1])

    def score(self, tokens):
        unk = self.unk_logp
        total = 0.0
        for t in tokens:
            total += self.pieces.get(t, unk)
        return total

    def vocab_entries(self):
        return sorted(self.pieces.items(), key=lambda kv: (-kv[1], kv[0]))


def seed_pieces(counts, max_piece_len):
    """Substrings up to ``max_piece_len`` seen at least twice, plus every
    single character, with their weighted occurrence counts."""
    sub = Counter()
    for word, c in counts.items():
        n = len(word)
        for i in range(n):
            for j in range(i + 1, min(n, i + max_piece_len) + 1):
                sub[word[i:j]] += c
    return {p: c for p, c in sub.items() if len(p) == 1 or c >= 2}


def _prune(logp, expected, n_drop):
    max_len = max(len(p) for p in logp)
    losses = []
    for piece, lp in logp.items():
        if len(piece) == 1:
            continue
        alt = viterbi(piece, logp, max_len, exclude=piece)
        loss = expected.get(piece, 0.0) * (lp - alt[0])
        losses.append((loss, piece))
    losses.sort()
    drop = {piece for _, piece in losses[:n_drop]}
    return normalize({p: lp for p, lp in logp.items() if p not in drop})


def train_unigram(corpus, target_vocab, max_piece_len=8, em_iterations=4, prune_fraction=0.2):
    counts = Counter(corpus.words())
    if not counts:
        raise SegbiasError("cannot train on an empty corpus")
    alphabet = frozenset(ch for w in counts for ch in w)
    if target_vocab < len(alphabet):
        raise ValueError(f"target_vocab {target_vocab} is smaller than the alphabet ({len(alphabet)})")
    if max_piece_len < 1 or em_iterations < 1 or not 0.0 < prune_fraction < 1.0:
        raise ValueError("max_piece_len and em_iterations must be >= 1, prune_fraction in (0, 1)")

    word_list = sorted(counts.items())
    seed = seed_pieces(counts, max_piece_len)
    total = sum(seed.values())
    logp = {p: math.log(c / total) for p, c in sorted(seed.items())}
    trace = []
    rnd = 0
    while True:
        for it in range(em_iterations):
            expected, ll = e_step(word_list, logp)
            trace.append((rnd, it, len(logp), ll))
            logp = m_step(expected, logp)
        expected, ll = e_step(word_list, logp)
        trace.append((rnd, em_iterations, len(logp), ll))
        if len(logp) <= target_vocab:
            break
        n_prunable = sum(1 for p in logp if len(p) > 1)
        n_drop = min(max(1, int(prune_fraction * n_prunable)), len(logp) - target_vocab)
        logp = _prune(logp, expected, n_drop)
        rnd += 1
    return UnigramModel(alphabet=alphabet, pieces=dict(sorted(logp.items())), trace=tuple(trace))

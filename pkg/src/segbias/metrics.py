"""Gender accuracy, lexical diversity, sequence-length increment,
gender-morpheme isolation and frequency/length asymmetry."""

import math
import unicodedata
from collections import Counter
from dataclasses import dataclass, field

from .corpus import CATEGORIES, nfc, tokenize
from .errors import SegbiasError
from .segmenters import desegment

ALL = "ALL"
ACCURACY_COLUMNS = (ALL,) + CATEGORIES


def _pct(num, den):
    return 100.0 * num / den if den else None


@dataclass(frozen=True)
class CategoryCounts:
    correct: int = 0
    wrong: int = 0
    not_found: int = 0

    @property
    def total(self):
        return self.correct + self.wrong + self.not_found

    @property
    def accuracy_pct(self):
        """None when no term was found in either form."""
        return _pct(self.correct, self.correct + self.wrong)

    @property
    def coverage_pct(self):
        return _pct(self.correct + self.wrong, self.total)


@dataclass(frozen=True)
class AccuracyReport:
    categories: dict  # ALL, 1F, 1M, 2F, 2M -> CategoryCounts
    per_entry: tuple = ()  # (entry id, [verdict per term]) with verdict in correct/wrong/not_found

    def __getitem__(self, cat):
        return self.categories[cat]


def _fold(text):
    return tokenize(nfc(desegment(text)).lower(), "pretok")


def _find(tokens, used, phrase):
    n = len(phrase)
    for i in range(len(tokens) - n + 1):
        if tokens[i:i + n] == phrase and not any(used[i:i + n]):
            return i
    return None


def match_terms(hypothesis, terms):
    """Classify each (correct, wrong) term pair against one hypothesis line.

    The correct form is searched before the wrong one; matched token
    positions are consumed so a position never credits two terms.
    """
    tokens = _fold(hypothesis)
    used = [False] * len(tokens)
    verdicts = []
    for correct, wrong in terms:
        for verdict, form in (("correct", correct), ("wrong", wrong)):
            phrase = form.lower().split()
            at = _find(tokens, used, phrase)
            if at is not None:
                for k in range(at, at + len(phrase)):
                    used[k] = True
                verdicts.append(verdict)
                break
        else:
            verdicts.append("not_found")
    return verdicts


def gender_accuracy(benchmark, hypotheses):
    hypotheses = list(hypotheses)
    if len(hypotheses) != len(benchmark.entries):
        raise SegbiasError(
            f"hypothesis count ({len(hypotheses)}) does not match benchmark entries ({len(benchmark.entries)})"
        )
    tallies = {cat: Counter() for cat in ACCURACY_COLUMNS}
    per_entry = []
    for entry, hyp in zip(benchmark.entries, hypotheses):
        verdicts = match_terms(hyp, entry.terms)
        per_entry.append((entry.id, tuple(verdicts)))
        for v in verdicts:
            tallies[entry.category][v] += 1
            tallies[ALL][v] += 1
    cats = {
        cat: CategoryCounts(t["correct"], t["wrong"], t["not_found"])
        for cat, t in tallies.items()
    }
    return AccuracyReport(cats, tuple(per_entry))


def _check_tokens(tokens):
    if not tokens:
        raise SegbiasError("lexical diversity is undefined for an empty token list")


def ttr(tokens):
    _check_tokens(tokens)
    return 100.0 * len(set(tokens)) / len(tokens)


def mattr(tokens, window=1000):
    """Moving-average TTR over every contiguous window, sliding one token
    at a time. Falls back to plain TTR when the text fits in one window."""
    _check_tokens(tokens)
    if window < 1:
        raise SegbiasError("window must be >= 1")
    n = len(tokens)
    if n <= window:
        return ttr(tokens)
    counts = Counter(tokens[:window])
    distinct_sum = len(counts)
    for i in range(window, n):
        out_tok, in_tok = tokens[i - window], tokens[i]
        counts[out_tok] -= 1
        if not counts[out_tok]:
            del counts[out_tok]
        counts[in_tok] += 1
        distinct_sum += len(counts)
    n_windows = n - window + 1
    return 100.0 * distinct_sum / (window * n_windows)


@dataclass(frozen=True)
class DiversityReport:
    ttr_pct: float
    mattr_pct: float
    window_size: int
    token_count: int
    type_count: int


def _is_punct_token(tok):
    return all(unicodedata.category(ch).startswith("P") for ch in tok)


def diversity_tokens(lines, strip_punct=False):
    """Case-folded tokens of desegmented text lines."""
    tokens = [t for line in lines for t in _fold(line)]
    if strip_punct:
        tokens = [t for t in tokens if not _is_punct_token(t)]
    return tokens


def lexical_diversity(lines, window=1000, strip_punct=False):
    tokens = diversity_tokens(lines, strip_punct)
    return DiversityReport(
        ttr_pct=ttr(tokens),
        mattr_pct=mattr(tokens, window),
        window_size=window,
        token_count=len(tokens),
        type_count=len(set(tokens)),
    )


@dataclass(frozen=True)
class IncrementReport:
    mean_increment_pct: float
    increments: tuple  # (entry id, len_f, len_m, pct)
    n_pairs: int
    averaging: str = "macro"


def segmented_length(model, sentence):
    return sum(len(model.segment_word(w)) for w in tokenize(nfc(sentence), "pretok"))


def length_increment(benchmark, model, averaging="macro", swap=False):
    """Token-count increase of feminine over masculine references.

    ``macro`` averages per-entry percentages; ``micro`` is the increase of
    the summed feminine length over the summed masculine length. ``swap``
    exchanges the feminine and masculine roles of every entry.
    """
    if averaging not in ("macro", "micro"):
        raise ValueError(f"averaging must be macro or micro, got {averaging!r}")
    if not benchmark.entries:
        raise SegbiasError("benchmark has no entries")
    rows = []
    for e in benchmark.entries:
        fem, masc = e.ref_feminine, e.ref_masculine
        if swap:
            fem, masc = masc, fem
        len_f = segmented_length(model, fem)
        len_m = segmented_length(model, masc)
        if len_m == 0:
            raise SegbiasError(f"entry {e.id}: masculine reference segments to zero tokens")
        rows.append((e.id, len_f, len_m, 100.0 * (len_f - len_m) / len_m))
    if averaging == "macro":
        mean = math.fsum(r[3] for r in rows) / len(rows)
    else:
        total_m = sum(r[2] for r in rows)
        mean = 100.0 * (sum(r[1] for r in rows) - total_m) / total_m
    return IncrementReport(mean, tuple(rows), len(rows), averaging)


def divergence_index(form_f, form_m):
    """Length of the longest common prefix, in NFC characters."""
    f, m = nfc(form_f), nfc(form_m)
    if not f or not m:
        raise SegbiasError("forms must be non-empty")
    if f == m:
        raise SegbiasError(f"feminine and masculine forms are equal: {f!r}")
    k = 0
    for a, b in zip(f, m):
        if a != b:
            break
        k += 1
    return k


def token_boundaries(tokens):
    """Cumulative character offsets of every token prefix, 0 and the word
    end included."""
    out = [0]
    for t in tokens:
        out.append(out[-1] + len(t))
    return out


@dataclass(frozen=True)
class IsolationVerdict:
    feminine: str
    masculine: str
    divergence: int
    tokens: tuple
    isolated: bool


@dataclass(frozen=True)
class IsolationReport:
    isolated_count: int
    total_pairs: int
    verdicts: tuple
    skipped_multiword: int = 0

    @property
    def isolation_rate_pct(self):
        return _pct(self.isolated_count, self.total_pairs)


def gender_isolation(term_pairs, model):
    """Share of (feminine, masculine) pairs whose feminine segmentation has a
    boundary exactly where the two forms diverge. Multi-word pairs are
    skipped and counted separately."""
    verdicts = []
    skipped = 0
    for fem, masc in term_pairs:
        fem, masc = nfc(fem), nfc(masc)
        if len(fem.split()) != 1 or len(masc.split()) != 1:
            skipped += 1
            continue
        k = divergence_index(fem, masc)
        tokens = tuple(model.segment_word(fem))
        verdicts.append(IsolationVerdict(fem, masc, k, tokens, k in token_boundaries(tokens)))
    isolated = sum(v.isolated for v in verdicts)
    return IsolationReport(isolated, len(verdicts), tuple(verdicts), skipped)


@dataclass(frozen=True)
class AsymmetryReport:
    pct_feminine_rarer: float
    pct_feminine_longer: float
    n_pairs: int
    exceptions: tuple = field(default=())  # (fem, masc, count_f, count_m) with count_f >= count_m


def asymmetry(term_pairs, freq):
    pairs = [(nfc(f), nfc(m)) for f, m in term_pairs]
    if not pairs:
        raise SegbiasError("asymmetry needs at least one term pair")
    rarer = longer = 0
    exceptions = []
    for f, m in pairs:
        cf, cm = freq.get(f, 0), freq.get(m, 0)
        if cf < cm:
            rarer += 1
        else:
            exceptions.append((f, m, cf, cm))
        if len(f) > len(m):
            longer += 1
    n = len(pairs)
    return AsymmetryReport(100.0 * rarer / n, 100.0 * longer / n, n, tuple(exceptions))

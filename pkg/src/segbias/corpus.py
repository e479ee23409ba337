"""Corpus and benchmark ingestion.

Training text is one sentence per line; paired-reference benchmarks are TSV
files with a correct and a gender-swapped wrong reference per row.
"""

import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import BenchmarkError, CorpusError, ReservedMarkerError

MARKER = "@@"
TOKENIZE_MODES = ("pretok", "basic")
CATEGORIES = ("1F", "1M", "2F", "2M")
BENCHMARK_HEADER = ("ID", "CATEGORY", "SRC", "REF_CORRECT", "REF_WRONG", "TERMS")


def nfc(text):
    return unicodedata.normalize("NFC", text)


def _is_punct(ch):
    return unicodedata.category(ch).startswith("P")


def _detach_punct(word):
    start, end = 0, len(word)
    while start < end and _is_punct(word[start]):
        start += 1
    while end > start and _is_punct(word[end - 1]):
        end -= 1
    out = list(word[:start])
    if start < end:
        out.append(word[start:end])
    out.extend(word[end:])
    return out


def tokenize(line, mode="pretok"):
    """Split a line into words.

    ``pretok`` splits on Unicode whitespace only. ``basic`` additionally
    detaches every punctuation character found at a word edge as its own
    word. Raises ReservedMarkerError if a word contains the ``@@`` marker.
    """
    if mode not in TOKENIZE_MODES:
        raise ValueError(f"unknown tokenize mode {mode!r}")
    words = line.split()
    if mode == "basic":
        words = [piece for w in words for piece in _detach_punct(w)]
    for w in words:
        if MARKER in w:
            raise ReservedMarkerError(f"word {w!r} contains the reserved marker {MARKER!r}")
    return words


def _check_word(word):
    if not word:
        raise CorpusError("empty word")
    if MARKER in word:
        raise ReservedMarkerError(f"word {word!r} contains the reserved marker {MARKER!r}")
    if any(ch.isspace() for ch in word):
        raise CorpusError(f"word {word!r} contains whitespace")


@dataclass(frozen=True)
class Corpus:
    """Immutable list of sentences, each a tuple of NFC-normalized words."""

    sentences: tuple = ()

    def __post_init__(self):
        sents = []
        for sent in self.sentences:
            words = tuple(nfc(w) for w in sent)
            for w in words:
                _check_word(w)
            sents.append(words)
        object.__setattr__(self, "sentences", tuple(sents))

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    @property
    def num_words(self):
        return sum(len(s) for s in self.sentences)

    def words(self):
        for sent in self.sentences:
            yield from sent

    def alphabet(self):
        return frozenset(ch for w in self.words() for ch in w)

    @classmethod
    def from_lines(cls, lines: Iterable[str], mode="pretok"):
        sents = []
        for line in lines:
            words = tokenize(nfc(line), mode)
            if words:
                sents.append(words)
        return cls(tuple(sents))


def _read_lines(path):
    """Yield (line_number, text) pairs, decoding each line separately so
    that a decoding failure can name its line."""
    with open(path, "rb") as fh:
        data = fh.read()
    if not data:
        return
    raw_lines = data.split(b"\n")
    if raw_lines[-1] == b"":
        raw_lines.pop()
    for lineno, raw in enumerate(raw_lines, 1):
        if raw.endswith(b"\r"):
            raw = raw[:-1]
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorpusError(f"invalid UTF-8 ({exc.reason})", line=lineno) from None
        yield lineno, text


def load_corpus(path, mode="pretok"):
    """Read a one-sentence-per-line file. Blank lines are dropped."""
    sents = []
    for lineno, text in _read_lines(path):
        try:
            words = tokenize(nfc(text), mode)
        except ReservedMarkerError as exc:
            raise ReservedMarkerError(str(exc), line=lineno) from None
        if words:
            sents.append(tuple(words))
    if not sents:
        raise CorpusError(f"corpus {path} is empty")
    return Corpus(tuple(sents))


@dataclass(frozen=True)
class FrequencyTable:
    entries: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for word, count in self.entries.items():
            if not isinstance(count, int) or count <= 0:
                raise ValueError(f"count for {word!r} must be a positive integer")
        object.__setattr__(self, "entries", dict(sorted(self.entries.items())))

    @property
    def total_tokens(self):
        return sum(self.entries.values())

    @property
    def total_types(self):
        return len(self.entries)

    def __getitem__(self, word):
        return self.entries[word]

    def __contains__(self, word):
        return word in self.entries

    def __len__(self):
        return len(self.entries)

    def get(self, word, default=0):
        return self.entries.get(word, default)

    def items(self):
        return self.entries.items()


def word_counts(corpus):
    return FrequencyTable(dict(Counter(corpus.words())))


@dataclass(frozen=True)
class BenchmarkEntry:
    id: str
    category: str
    src: str
    ref_correct: str
    ref_wrong: str
    terms: tuple  # of (correct_form, wrong_form)

    @property
    def feminine_correct(self):
        return self.category.endswith("F")

    @property
    def ref_feminine(self):
        return self.ref_correct if self.feminine_correct else self.ref_wrong

    @property
    def ref_masculine(self):
        return self.ref_wrong if self.feminine_correct else self.ref_correct

    def gender_pairs(self):
        """Term pairs oriented as (feminine, masculine)."""
        if self.feminine_correct:
            return list(self.terms)
        return [(w, c) for c, w in self.terms]

    def violations(self):
        problems = []
        if self.category not in CATEGORIES:
            problems.append(f"unknown category {self.category!r}")
        if len(self.ref_correct.split()) != len(self.ref_wrong.split()):
            problems.append("REF_CORRECT and REF_WRONG differ in word count")
        if not self.terms:
            problems.append("no term pairs")
        for correct, wrong in self.terms:
            if not correct or not wrong:
                problems.append("empty term form")
            elif correct == wrong:
                problems.append(f"term pair {correct!r} has equal correct and wrong forms")
        return problems


@dataclass(frozen=True)
class Benchmark:
    entries: tuple
    language_tag: str = ""

    def __post_init__(self):
        seen = set()
        for e in self.entries:
            if e.id in seen:
                raise BenchmarkError([f"duplicate id {e.id!r}"])
            seen.add(e.id)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def num_terms(self):
        return sum(len(e.terms) for e in self.entries)

    def gender_pairs(self):
        return [p for e in self.entries for p in e.gender_pairs()]


def _norm_form(form):
    return " ".join(nfc(form).split())


def parse_terms(field_text):
    pairs = []
    for chunk in field_text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if chunk.count(">") != 1:
            raise ValueError(f"term {chunk!r} is not of the form correct>wrong")
        correct, wrong = chunk.split(">")
        pairs.append((_norm_form(correct), _norm_form(wrong)))
    return tuple(pairs)


def load_benchmark(path, language_tag=""):
    """Load and validate a paired-reference benchmark TSV.

    All row-level problems are collected and raised together in a single
    BenchmarkError.
    """
    problems = []
    entries = []
    seen = {}
    rows = list(_read_benchmark_lines(path))
    if not rows or tuple(rows[0][1].split("\t")) != BENCHMARK_HEADER:
        raise BenchmarkError([f"line 1: header must be {chr(9).join(BENCHMARK_HEADER)!r}"])
    for lineno, text in rows[1:]:
        if not text.strip():
            continue
        cols = text.split("\t")
        if len(cols) != len(BENCHMARK_HEADER):
            problems.append(f"line {lineno}: malformed row, expected {len(BENCHMARK_HEADER)} columns, got {len(cols)}")
            continue
        eid, cat, src, ref_c, ref_w, terms_text = (nfc(c.strip()) for c in cols)
        try:
            terms = parse_terms(terms_text)
        except ValueError as exc:
            problems.append(f"line {lineno} (id {eid}): {exc}")
            continue
        entry = BenchmarkEntry(eid, cat, src, " ".join(ref_c.split()), " ".join(ref_w.split()), terms)
        bad = entry.violations()
        if eid in seen:
            bad.append(f"duplicate id (first seen on line {seen[eid]})")
        else:
            seen[eid] = lineno
        if bad:
            problems.extend(f"line {lineno} (id {eid}): {msg}" for msg in bad)
            continue
        entries.append(entry)
    if problems:
        raise BenchmarkError(problems)
    return Benchmark(tuple(entries), language_tag)


def _read_benchmark_lines(path):
    try:
        yield from _read_lines(path)
    except CorpusError as exc:
        raise BenchmarkError([str(exc)]) from None


def load_term_pairs(path):
    """Read a ``FEM<TAB>MASC`` file into a list of (feminine, masculine)."""
    pairs = []
    problems = []
    for lineno, text in _read_lines(path):
        if not text.strip():
            continue
        cols = text.split("\t")
        if len(cols) != 2:
            problems.append(f"line {lineno}: expected 2 columns, got {len(cols)}")
            continue
        fem, masc = _norm_form(cols[0]), _norm_form(cols[1])
        if not fem or not masc:
            problems.append(f"line {lineno}: empty form")
        elif fem == masc:
            problems.append(f"line {lineno}: equal feminine and masculine forms {fem!r}")
        else:
            pairs.append((fem, masc))
    if problems:
        raise BenchmarkError(problems)
    return pairs


def read_text_lines(path):
    """Lines of a UTF-8 file, NFC-normalized, newline stripped, blanks kept."""
    return [nfc(text) for _, text in _read_lines(path)]

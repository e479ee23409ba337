"""Plain-text model files.

Line 1 is ``SEGBIAS 1 <method>``; the remaining lines are tab-separated
records whose kinds depend on the method (SYM, MERGE, PIECE, CAP, MORPH,
WORD).
"""

import math

from ..errors import ModelFormatError
from .base import METHODS
from .bpe import BPEModel
from .char import CharModel
from .morph import MorphModel
from .unigram import UnigramModel

MAGIC = "SEGBIAS"
FORMAT_VERSION = 1


def dumps_model(model):
    lines = [f"{MAGIC} {FORMAT_VERSION} {model.method}"]
    if model.method in ("char", "bpe"):
        lines.extend(f"SYM\t{ch}" for ch in sorted(model.alphabet))
    if model.method == "bpe":
        lines.extend(f"MERGE\t{l}\t{r}" for l, r in model.merges)
    elif model.method == "unigram":
        lines.extend(f"PIECE\t{p}\t{lp:.17g}" for p, lp in model.vocab_entries())
    elif model.method in ("morfessor", "lmvr"):
        if model.cap is not None:
            lines.append(f"CAP\t{model.cap}")
        lines.extend(f"MORPH\t{m}\t{c}" for m, c in model.vocab_entries())
        lines.extend(f"WORD\t{w}\t{' '.join(a)}" for w, a in sorted(model.analyses.items()))
    return "\n".join(lines) + "\n"


def save_model(model, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_model(model))


def _fields(lineno, line, kind, n):
    cols = line.split("\t")
    if cols[0] != kind or len(cols) != n or any(c == "" for c in cols):
        raise ModelFormatError(f"malformed {kind} record: {line!r}", line=lineno)
    return cols[1:]


def loads_model(text):
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ModelFormatError("empty model file", line=1)
    head = lines[0].split(" ")
    if len(head) != 3 or head[0] != MAGIC:
        raise ModelFormatError(f"bad header {lines[0]!r}", line=1)
    if head[1] != str(FORMAT_VERSION):
        raise ModelFormatError(f"unsupported format version {head[1]!r} (expected {FORMAT_VERSION})", line=1)
    method = head[2]
    if method not in METHODS:
        raise ModelFormatError(f"unknown method {method!r}", line=1)

    records = list(enumerate(lines[1:], 2))
    kinds = {
        "char": ("SYM",),
        "bpe": ("SYM", "MERGE"),
        "unigram": ("PIECE",),
        "morfessor": ("CAP", "MORPH", "WORD"),
        "lmvr": ("CAP", "MORPH", "WORD"),
    }[method]
    # records must appear grouped and in the order listed above
    stage = 0
    for lineno, line in records:
        kind = line.split("\t", 1)[0]
        if kind not in kinds or kinds.index(kind) < stage:
            raise ModelFormatError(f"unexpected record {line!r} in {method} model", line=lineno)
        stage = kinds.index(kind)

    def of(kind):
        return [(n, l) for n, l in records if l.split("\t", 1)[0] == kind]

    try:
        if method == "char":
            syms = [_fields(n, l, "SYM", 2)[0] for n, l in of("SYM")]
            _check_syms(of("SYM"), syms)
            return CharModel(alphabet=frozenset(syms))
        if method == "bpe":
            syms = [_fields(n, l, "SYM", 2)[0] for n, l in of("SYM")]
            _check_syms(of("SYM"), syms)
            merges = [tuple(_fields(n, l, "MERGE", 3)) for n, l in of("MERGE")]
            return BPEModel(alphabet=frozenset(syms), merges=tuple(merges))
        if method == "unigram":
            pieces = {}
            for n, l in of("PIECE"):
                piece, raw = _fields(n, l, "PIECE", 3)
                try:
                    lp = float(raw)
                except ValueError:
                    raise ModelFormatError(f"bad log-probability {raw!r}", line=n) from None
                if not math.isfinite(lp) or piece in pieces:
                    raise ModelFormatError(f"bad or duplicate piece record {l!r}", line=n)
                pieces[piece] = lp
            return UnigramModel(pieces=pieces)
        cap = None
        caps = of("CAP")
        if len(caps) > 1:
            raise ModelFormatError("more than one CAP record", line=caps[1][0])
        if caps:
            n, l = caps[0]
            cap = _int(n, _fields(n, l, "CAP", 2)[0])
        morphs = {}
        for n, l in of("MORPH"):
            m, raw = _fields(n, l, "MORPH", 3)
            if m in morphs:
                raise ModelFormatError(f"duplicate morph {m!r}", line=n)
            morphs[m] = _int(n, raw)
        analyses = {}
        for n, l in of("WORD"):
            w, raw = _fields(n, l, "WORD", 3)
            if w in analyses:
                raise ModelFormatError(f"duplicate word {w!r}", line=n)
            analyses[w] = tuple(raw.split(" "))
        if not morphs:
            raise ModelFormatError("model has no MORPH records", line=len(lines) + 1)
        return MorphModel(method=method, morphs=morphs, analyses=analyses, cap=cap)
    except ModelFormatError:
        raise
    except ValueError as exc:
        raise ModelFormatError(f"inconsistent model: {exc}", line=len(lines) + 1) from None


def _check_syms(records, syms):
    seen = set()
    for (n, _), s in zip(records, syms):
        if len(s) != 1 or s in seen:
            raise ModelFormatError(f"SYM must be a single new character, got {s!r}", line=n)
        seen.add(s)
    if not syms:
        raise ModelFormatError("model has no SYM records", line=2)


def _int(lineno, raw):
    if not raw.isdigit() or int(raw) <= 0:
        raise ModelFormatError(f"expected a positive integer, got {raw!r}", line=lineno)
    return int(raw)


def load_model(path):
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = data[: exc.start].count(b"\n") + 1
        raise ModelFormatError("invalid UTF-8", line=line) from None
    return loads_model(text)

"""Train, apply and serialize the five segmentation methods.

All methods share the ``@@`` suffix convention: every token of a word
except the last is rendered with a trailing ``@@``.
"""

import os
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor

from ..errors import SegmentationError
from .base import (
    METHODS,
    SegmentationModel,
    SegmentedCorpus,
    check_word,
    desegment,
    render_sentence,
    render_word,
)
from .bpe import BPEModel, train_bpe
from .char import CharModel, train_char
from .io import dumps_model, load_model, loads_model, save_model
from .morph import MorphModel, mdl_cost, train_lmvr, train_morfessor
from .unigram import UnigramModel, train_unigram

VocabReport = namedtuple("VocabReport", "method size entries")


def segment_word(model, word):
    return model.segment_word(word)


def _segment_sentences(model, sentences, offset):
    out = []
    for si, sent in enumerate(sentences, offset):
        words = []
        for wi, word in enumerate(sent):
            try:
                words.append(tuple(model.segment_word(word)))
            except SegmentationError as exc:
                raise SegmentationError(f"sentence {si + 1}, word {wi + 1}: {exc}") from None
        out.append(tuple(words))
    return out


def thread_count():
    raw = os.environ.get("SEGBIAS_THREADS", "").strip()
    if not raw:
        return 0
    try:
        n = int(raw)
    except ValueError:
        raise SegmentationError(f"SEGBIAS_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise SegmentationError("SEGBIAS_THREADS must be >= 0")
    return n


def segment_corpus(model, corpus, threads=None):
    """Segment every word of ``corpus``, preserving sentence and word order.

    ``threads`` defaults to SEGBIAS_THREADS; 0 means sequential.
    """
    sentences = list(corpus)
    if threads is None:
        threads = thread_count()
    if threads <= 1 or len(sentences) < 2:
        return SegmentedCorpus(tuple(_segment_sentences(model, sentences, 0)))
    size = -(-len(sentences) // threads)
    chunks = [(sentences[i:i + size], i) for i in range(0, len(sentences), size)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = pool.map(lambda c: _segment_sentences(model, c[0], c[1]), chunks)
        out = [s for part in parts for s in part]
    return SegmentedCorpus(tuple(out))


def segment_line(model, words):
    """Rendered segmentation of one list of words."""
    return render_sentence(model.segment_word(w) for w in words)


def vocab_report(model):
    entries = model.vocab_entries()
    return VocabReport(model.method, len(entries), entries)


def train(method, corpus, **params):
    """Dispatch to the trainer for ``method`` with its keyword parameters."""
    if method == "char":
        return train_char(corpus)
    if method == "bpe":
        return train_bpe(corpus, params.get("num_merges", 8000))
    if method == "unigram":
        return train_unigram(
            corpus,
            params.get("target_vocab", 8000),
            max_piece_len=params.get("max_piece_len", 8),
            em_iterations=params.get("em_iterations", 4),
            prune_fraction=params.get("prune_fraction", 0.2),
        )
    if method == "morfessor":
        return train_morfessor(
            corpus,
            max_epochs=params.get("max_epochs", 10),
            convergence_eps=params.get("convergence_eps", 1e-4),
        )
    if method == "lmvr":
        return train_lmvr(
            corpus,
            params.get("cap", 32000),
            max_epochs=params.get("max_epochs", 10),
            convergence_eps=params.get("convergence_eps", 1e-4),
        )
    raise ValueError(f"unknown method {method!r}")


__all__ = [
    "METHODS",
    "BPEModel",
    "CharModel",
    "MorphModel",
    "SegmentationModel",
    "SegmentedCorpus",
    "UnigramModel",
    "VocabReport",
    "check_word",
    "desegment",
    "dumps_model",
    "load_model",
    "loads_model",
    "mdl_cost",
    "render_sentence",
    "render_word",
    "save_model",
    "segment_corpus",
    "segment_line",
    "segment_word",
    "thread_count",
    "train",
    "train_bpe",
    "train_char",
    "train_lmvr",
    "train_morfessor",
    "train_unigram",
    "vocab_report",
]

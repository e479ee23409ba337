from dataclasses import dataclass, field

from ..corpus import MARKER
from ..errors import SegmentationError

METHODS = ("char", "bpe", "unigram", "morfessor", "lmvr")


def check_word(word):
    if not isinstance(word, str) or not word:
        raise SegmentationError("cannot segment an empty word")
    if MARKER in word:
        raise SegmentationError(f"word {word!r} contains the reserved marker {MARKER!r}")
    if any(ch.isspace() for ch in word):
        raise SegmentationError(f"word {word!r} contains whitespace")


@dataclass(frozen=True, eq=False)
class SegmentationModel:
    """A trained, immutable segmenter. Subclasses implement ``_segment``."""

    method = None
    alphabet: frozenset = frozenset()
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def segment_word(self, word):
        check_word(word)
        hit = self._cache.get(word)
        if hit is None:
            hit = tuple(self._segment(word))
            self._cache[word] = hit
        return list(hit)

    def _segment(self, word):
        raise NotImplementedError

    def vocab_entries(self):
        """(entry, score) pairs in reporting order."""
        raise NotImplementedError

    @property
    def vocab_size(self):
        return len(self.vocab_entries())


def render_word(tokens):
    return (MARKER + " ").join(tokens)


def render_sentence(word_tokens):
    return " ".join(render_word(toks) for toks in word_tokens)


def desegment(line):
    """Undo ``@@ `` continuation markers. A marker at line end is an error."""
    if line.endswith(MARKER):
        raise SegmentationError(f"dangling continuation marker at end of line: {line!r}")
    return line.replace(MARKER + " ", "")


@dataclass(frozen=True)
class SegmentedCorpus:
    sentences: tuple  # of tuples of token tuples, one per source word

    def render(self):
        return [render_sentence(s) for s in self.sentences]

    @property
    def num_tokens(self):
        return sum(len(toks) for s in self.sentences for toks in s)

from dataclasses import dataclass

from ..errors import SegbiasError
from .base import SegmentationModel


@dataclass(frozen=True, eq=False)
class CharModel(SegmentationModel):
    method = "char"

    def _segment(self, word):
        return list(word)

    def vocab_entries(self):
        return [(ch, None) for ch in sorted(self.alphabet)]


def train_char(corpus):
    alphabet = corpus.alphabet()
    if not alphabet:
        raise SegbiasError("cannot train on an empty corpus")
    return CharModel(alphabet=alphabet)

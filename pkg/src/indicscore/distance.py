"""Edit distance and the rates built on it (WER, CER)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DataError
from .textnorm import DEFAULT_NORM, NormConfig, normalize_for_scoring, tokens_for_scoring


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Unit-cost edit distance between two sequences (two-row DP)."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i] + [0] * len(b)
        for j, y in enumerate(b, 1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y))
        prev = cur
    return prev[-1]


@dataclass(frozen=True)
class ErrorRate:
    """Edit distance against a reference of known length; rate may exceed 1."""

    distance: int
    reference_length: int

    @property
    def rate(self) -> float:
        if self.reference_length == 0:
            raise DataError("error rate over a zero-length reference is undefined")
        return self.distance / self.reference_length


def wer(reference: str, hypothesis: str, normalization: NormConfig = DEFAULT_NORM) -> ErrorRate:
    """Token-level error rate; reference must not be empty after normalization."""
    ref_tokens = tokens_for_scoring(reference, normalization)
    if not ref_tokens:
        raise DataError("reference has no tokens after normalization; WER is undefined")
    hyp_tokens = tokens_for_scoring(hypothesis, normalization)
    return ErrorRate(levenshtein(ref_tokens, hyp_tokens), len(ref_tokens))


def cer(reference: str, hypothesis: str, normalization: NormConfig = DEFAULT_NORM) -> ErrorRate:
    """Character-level error rate over whitespace-collapsed strings.

    Spaces count as characters; interior whitespace runs are first
    collapsed to single spaces on both sides.
    """
    ref = normalize_for_scoring(reference, normalization)
    if not ref:
        raise DataError("reference is empty after normalization; CER is undefined")
    hyp = normalize_for_scoring(hypothesis, normalization)
    return ErrorRate(levenshtein(ref, hyp), len(ref))

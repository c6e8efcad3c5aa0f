"""Deterministic synthesis routing, CER gating, and corpus splitting.

Routing draws a synthesis backend per utterance from a seeded hash of the
row id, so re-running with the same seed reproduces the corpus exactly and
permuting the input never changes an assignment. Ordered override rules
run first (code-mixed rows always go to the backend that can speak them)
or relabel a drawn bucket (the default engine for one language may differ
from the bucket name).
"""

from __future__ import annotations

import hashlib
import logging
import random
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .corpus import ManifestRow, SYNTH_SYSTEMS, with_status
from .errors import ConfigurationError, DataError

logger = logging.getLogger(__name__)

HELDOUT_SYSTEM = "cartesia"

DEFAULT_WEIGHTS: Mapping[str, float] = {
    "praxy": 0.60,
    "elevenlabs": 0.20,
    "cartesia": 0.20,
}


@dataclass(frozen=True)
class OverrideRule:
    """One ordered routing override.

    With ``bucket`` unset the rule routes matching rows directly, before
    any draw. With ``bucket`` set it relabels that drawn bucket for
    matching rows (e.g. Hindi rows drawn into the default bucket go to a
    different engine).
    """

    backend: str
    corpus_class: str | None = None
    language: str | None = None
    bucket: str | None = None

    def matches(self, row: ManifestRow) -> bool:
        if self.corpus_class is not None and row.corpus_class != self.corpus_class:
            return False
        if self.language is not None and row.language != self.language:
            return False
        return True


DEFAULT_OVERRIDES: tuple[OverrideRule, ...] = (
    OverrideRule(backend="indicf5", corpus_class="codemix"),
    OverrideRule(backend="chatterbox", language="hi", bucket="praxy"),
)


@dataclass(frozen=True)
class RouterPolicy:
    """Backend weights plus ordered overrides and the draw seed."""

    weights: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    overrides: tuple[OverrideRule, ...] = DEFAULT_OVERRIDES
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.weights:
            raise ConfigurationError("router weights must not be empty")
        for backend, weight in self.weights.items():
            if backend not in SYNTH_SYSTEMS:
                raise ConfigurationError(f"unknown backend {backend!r} in router weights")
            if weight < 0:
                raise ConfigurationError(f"negative weight for backend {backend!r}")
        if abs(sum(self.weights.values()) - 1.0) > 1e-9:
            raise ConfigurationError(f"router weights sum to {sum(self.weights.values())}, not 1")
        for rule in self.overrides:
            if rule.backend not in SYNTH_SYSTEMS:
                raise ConfigurationError(f"unknown backend {rule.backend!r} in override rule")
            if rule.bucket is not None and rule.bucket not in self.weights:
                raise ConfigurationError(f"override relabels unknown bucket {rule.bucket!r}")


def _unit_interval_hash(seed: int, row_id: str) -> float:
    digest = hashlib.sha256(f"{seed}:{row_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") / 2**64


def route_utterance(row: ManifestRow, policy: RouterPolicy = RouterPolicy()) -> str:
    """Pick the synthesis backend for one row, deterministically."""
    for rule in policy.overrides:
        if rule.bucket is None and rule.matches(row):
            return rule.backend
    draw = _unit_interval_hash(policy.seed, row.id)
    bucket = None
    cumulative = 0.0
    for name, weight in sorted(policy.weights.items()):
        cumulative += weight
        if draw < cumulative:
            bucket = name
            break
    if bucket is None:  # guard against top-end float rounding
        bucket = sorted(policy.weights)[-1]
    for rule in policy.overrides:
        if rule.bucket == bucket and rule.matches(row):
            return rule.backend
    return bucket


def route_rows(rows: Iterable[ManifestRow], policy: RouterPolicy = RouterPolicy()) -> list[ManifestRow]:
    """Assign ``synth_system`` on every row."""
    return [replace(row, synth_system=route_utterance(row, policy)) for row in rows]


# ---------------------------------------------------------------------------
# CER gate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FilterResult:
    accepted: tuple[ManifestRow, ...]
    rejected: tuple[ManifestRow, ...]


def apply_cer_filter(rows: Sequence[ManifestRow], threshold: float = 0.5) -> FilterResult:
    """Gate synthesized rows on round-trip CER.

    Rows with CER strictly above the threshold are rejected; a CER equal
    to the threshold passes. Rows missing ``cer_against_source`` are an
    error, reported all at once.
    """
    missing = [row.id for row in rows if row.cer_against_source is None]
    if missing:
        raise DataError(
            "rows missing cer_against_source", [f"id {row_id!r}" for row_id in missing]
        )
    accepted: list[ManifestRow] = []
    rejected: list[ManifestRow] = []
    for row in rows:
        # strictly-above rejects: a CER equal to the threshold passes
        if row.cer_against_source > threshold:
            rejected.append(with_status(row, "filtered_out"))
        else:
            accepted.append(with_status(row, "accepted"))
    return FilterResult(tuple(accepted), tuple(rejected))


# ---------------------------------------------------------------------------
# Held-out split
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SplitResult:
    train: tuple[ManifestRow, ...]
    heldout: tuple[ManifestRow, ...]


def split_heldout(rows: Sequence[ManifestRow]) -> SplitResult:
    """Hold out every row synthesized by the held-out engine.

    Keeping one engine's rows entirely out of training means evaluation
    audio never shares a voice with training audio. Rows must all be
    ``accepted``; train and heldout partition the input exactly.
    """
    not_accepted = [row.id for row in rows if row.status != "accepted"]
    if not_accepted:
        raise DataError(
            "split requires accepted rows only", [f"id {row_id!r}" for row_id in not_accepted]
        )
    unrouted = [row.id for row in rows if row.synth_system is None]
    if unrouted:
        raise DataError("split requires routed rows", [f"id {row_id!r}" for row_id in unrouted])
    train = tuple(row for row in rows if row.synth_system != HELDOUT_SYSTEM)
    heldout = tuple(row for row in rows if row.synth_system == HELDOUT_SYSTEM)
    if not heldout:
        logger.warning("held-out split is empty: no rows from %s", HELDOUT_SYSTEM)
    if not train:
        logger.warning("training split is empty")
    return SplitResult(train, heldout)


def synth_distribution(rows: Iterable[ManifestRow]) -> dict[tuple[str, str], int]:
    """Counts per (language, backend), for audit tables."""
    counts: dict[tuple[str, str], int] = {}
    for row in rows:
        key = (row.language, row.synth_system or "unrouted")
        counts[key] = counts.get(key, 0) + 1
    return counts


def render_distribution_table(rows: Sequence[ManifestRow]) -> str:
    """Aligned per-language backend counts with row and column totals."""
    counts = synth_distribution(rows)
    languages = sorted({lang for lang, _ in counts})
    backends = [b for b in SYNTH_SYSTEMS if any(be == b for _, be in counts)]
    if any(be == "unrouted" for _, be in counts):
        backends.append("unrouted")
    header = ["lang"] + backends + ["total"]
    lines = []
    for lang in languages:
        row_counts = [counts.get((lang, b), 0) for b in backends]
        lines.append([lang] + [str(c) for c in row_counts] + [str(sum(row_counts))])
    col_totals = [sum(counts.get((lang, b), 0) for lang in languages) for b in backends]
    lines.append(["total"] + [str(c) for c in col_totals] + [str(sum(col_totals))])
    widths = [max(len(header[i]), *(len(line[i]) for line in lines)) for i in range(len(header))]
    def fmt(cells: list[str]) -> str:
        return "  ".join(c.rjust(widths[i]) if i else c.ljust(widths[i]) for i, c in enumerate(cells))
    return "\n".join([fmt(header)] + [fmt(line) for line in lines])


# ---------------------------------------------------------------------------
# Class balancing
# ---------------------------------------------------------------------------

def class_balance(
    rows: Sequence[ManifestRow], per_class_target: int, seed: int = 0
) -> list[ManifestRow]:
    """Seeded downsample to at most ``per_class_target`` rows per class.

    Selection is independent of input order (candidates are sorted by id
    before sampling) and the output preserves input order.
    """
    if per_class_target < 0:
        raise ConfigurationError("per_class_target must be non-negative")
    by_class: dict[str, list[ManifestRow]] = {}
    for row in rows:
        by_class.setdefault(row.corpus_class, []).append(row)
    selected: set[str] = set()
    for corpus_class in sorted(by_class):
        candidates = sorted(by_class[corpus_class], key=lambda r: r.id)
        if len(candidates) <= per_class_target:
            chosen = candidates
        else:
            rng = random.Random(f"{seed}:{corpus_class}")
            chosen = rng.sample(candidates, per_class_target)
        selected.update(row.id for row in chosen)
    return [row for row in rows if row.id in selected]

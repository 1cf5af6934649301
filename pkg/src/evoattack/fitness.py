"""Fitness functions and attack predicates.

Both fitness functions read a classifier's probability vector for a sample
generated under target label ``k``:

* ``f1`` rewards overall confusion: 1 minus the top probability.  Range
  [0, 1 - 1/l]; the maximum is attained on the uniform vector.
* ``f2`` rewards ambiguity between the two most likely classes plus low
  confidence in the target class: (1 - (top1 - top2)) + (1 - probs[k]).
  Range [0, 2].

A candidate counts as a *misclassification attack at threshold p* when the
predicted class differs from the target and its probability exceeds p, and
as a *confusion case at threshold d* when it is correctly classified but
the top-two probability margin is below d.  The two predicates are mutually
exclusive by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import UsageError


class FitnessKind(str, Enum):
    F1 = "f1"
    F2 = "f2"


PROB_SUM_TOLERANCE = 1e-5


def validate_probs(probs: np.ndarray) -> np.ndarray:
    """Check a probability vector: entries in [0,1], summing to 1 within 1e-5."""
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise UsageError(f"probability vector must be 1-D and non-empty, got shape {p.shape}")
    if not np.isfinite(p).all():
        raise UsageError("probability vector contains non-finite entries")
    if p.min() < 0.0 or p.max() > 1.0:
        raise UsageError("probability entries must lie in [0, 1]")
    total = float(p.sum())
    if abs(total - 1.0) > PROB_SUM_TOLERANCE:
        raise UsageError(f"probabilities sum to {total}, expected 1 within {PROB_SUM_TOLERANCE}")
    return p


def _top_two(p: np.ndarray) -> tuple[int, float, float]:
    """(argmax, top probability, runner-up probability); argmax ties -> lowest index."""
    predicted = int(np.argmax(p))
    top1 = float(p[predicted])
    if p.size < 2:
        raise UsageError("need at least two classes to compute a top-two margin")
    rest = np.delete(p, predicted)
    return predicted, top1, float(rest.max())


def f1(probs: np.ndarray) -> float:
    """Confusion fitness: 1 - max probability."""
    p = validate_probs(probs)
    return 1.0 - float(p.max())


def f2(probs: np.ndarray, target: int) -> float:
    """Ambiguity fitness: (1 - (top1 - top2)) + (1 - probs[target])."""
    p = validate_probs(probs)
    if not 0 <= target < p.size:
        raise UsageError(f"target {target} out of range [0, {p.size})")
    _, top1, top2 = _top_two(p)
    return (1.0 - (top1 - top2)) + (1.0 - float(p[target]))


@dataclass(frozen=True)
class AttackVerdict:
    """Outcome of judging one probability vector against a target label."""

    is_misclassified: bool
    predicted: int
    top_prob: float
    margin: float
    target: int


def assess(probs: np.ndarray, target: int) -> AttackVerdict:
    """Judge a prediction: argmax class, top probability, top-two margin."""
    p = validate_probs(probs)
    if not 0 <= target < p.size:
        raise UsageError(f"target {target} out of range [0, {p.size})")
    predicted, top1, top2 = _top_two(p)
    return AttackVerdict(
        is_misclassified=predicted != target,
        predicted=predicted,
        top_prob=top1,
        margin=top1 - top2,
        target=target,
    )


def is_attack_at(verdict: AttackVerdict, p: float) -> bool:
    """Misclassified with predicted-class probability strictly above ``p``."""
    if not 0.0 <= p < 1.0:
        raise UsageError(f"attack threshold must lie in [0, 1), got {p}")
    return verdict.is_misclassified and verdict.top_prob > p


def is_confusion_at(verdict: AttackVerdict, delta: float) -> bool:
    """Correctly classified with top-two margin strictly below ``delta``."""
    if not 0.0 < delta <= 1.0:
        raise UsageError(f"confusion threshold must lie in (0, 1], got {delta}")
    return (not verdict.is_misclassified) and verdict.margin < delta

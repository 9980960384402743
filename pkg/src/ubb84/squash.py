"""Classical post-processing of raw click patterns onto single-click outcomes.

The receiver resolves six detection slots: three time slots on each of the
two detectors (c = bit 0, d = bit 1; slot 2 is the interfering middle slot).
Arbitrary optical input can fire any subset; the post-processing maps each
pattern probabilistically onto one effective outcome so that single-photon
statistics are preserved and multi-clicks are turned into random noise:

    pattern class                 -> outcome distribution
    ------------------------------------------------------------------
    single middle click           -> the matching result, prob 1
    single / multi outside only   -> "out", prob 1
    both middle slots ("double")  -> the two same-basis results, 1/2 each
    middle + outside ("cross")    -> "out" 1/2, each result 1/8
    nothing                       -> no-click

Basis joins: even -> results {0, 2}, odd -> {1, 3}; c-detector clicks map
to the lower label of the pair.  Table probabilities are exact rationals.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

__all__ = [
    "ClickPattern",
    "EffectiveOutcome",
    "classify",
    "monte_carlo_check",
    "squash_distribution",
    "squash_sample",
]

_BASES = ("even", "odd")


class EffectiveOutcome(Enum):
    RESULT_0 = "0"
    RESULT_1 = "1"
    RESULT_2 = "2"
    RESULT_3 = "3"
    OUT = "out"
    NO_CLICK = "none"


_RESULTS = (
    EffectiveOutcome.RESULT_0,
    EffectiveOutcome.RESULT_1,
    EffectiveOutcome.RESULT_2,
    EffectiveOutcome.RESULT_3,
)


@dataclass(frozen=True)
class ClickPattern:
    """Raw detection pattern plus the receiver's basis choice."""

    c1: bool = False
    c2: bool = False
    c3: bool = False
    d1: bool = False
    d2: bool = False
    d3: bool = False
    basis: str = "even"

    def __post_init__(self):
        if self.basis not in _BASES:
            raise ValueError(f"basis must be 'even' or 'odd', got {self.basis!r}")

    @property
    def middle_clicks(self) -> int:
        return int(self.c2) + int(self.d2)

    @property
    def outside_clicks(self) -> int:
        return int(self.c1) + int(self.c3) + int(self.d1) + int(self.d3)


def classify(pattern: ClickPattern) -> str:
    """Pattern category driving the post-processing table."""
    mid, out = pattern.middle_clicks, pattern.outside_clicks
    if mid == 0 and out == 0:
        return "no-click"
    if mid > 0 and out > 0:
        return "cross"
    if mid == 1:
        return "single-middle"
    if mid == 2:
        return "double-middle"
    if out == 1:
        return "single-outside"
    return "multi-outside-only"


def _single_middle_outcome(pattern: ClickPattern) -> EffectiveOutcome:
    bit = 0 if pattern.c2 else 1
    label = 2 * bit if pattern.basis == "even" else 2 * bit + 1
    return _RESULTS[label]


def squash_distribution(pattern: ClickPattern) -> dict:
    """Exact outcome distribution of the post-processing for a pattern."""
    category = classify(pattern)
    one = Fraction(1)
    if category == "no-click":
        return {EffectiveOutcome.NO_CLICK: one}
    if category == "single-middle":
        return {_single_middle_outcome(pattern): one}
    if category in ("single-outside", "multi-outside-only"):
        return {EffectiveOutcome.OUT: one}
    if category == "double-middle":
        pair = (0, 2) if pattern.basis == "even" else (1, 3)
        return {_RESULTS[pair[0]]: Fraction(1, 2), _RESULTS[pair[1]]: Fraction(1, 2)}
    dist = {r: Fraction(1, 8) for r in _RESULTS}
    dist[EffectiveOutcome.OUT] = Fraction(1, 2)
    return dist


def squash_sample(pattern: ClickPattern, seed) -> EffectiveOutcome:
    """Draw one effective outcome; deterministic given an integer seed.

    ``seed`` may also be a ``random.Random`` instance for repeated draws
    from one generator (one independent generator per task, never shared).
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    u = rng.random()
    acc = 0.0
    dist = squash_distribution(pattern)
    for outcome, p in dist.items():
        acc += float(p)
        if u < acc:
            return outcome
    return outcome  # u == 1.0 edge


_VALIDATION_PATTERNS = (
    ("single-middle c2/even", ClickPattern(c2=True, basis="even")),
    ("single-middle d2/odd", ClickPattern(d2=True, basis="odd")),
    ("double-middle even", ClickPattern(c2=True, d2=True, basis="even")),
    ("double-middle odd", ClickPattern(c2=True, d2=True, basis="odd")),
    ("single-outside c3", ClickPattern(c3=True)),
    ("multi-outside c1+d3", ClickPattern(c1=True, d3=True)),
    ("cross c2+d1", ClickPattern(c2=True, d1=True)),
)


def monte_carlo_check(trials: int, seed: int):
    """Sampled frequencies vs. the exact table, with 3-sigma binomial bounds.

    Returns (rows, ok).  Each row is (pattern_name, outcome, expected,
    observed, bound, within); ``ok`` is True when every row is within its
    bound.
    """
    if trials <= 0:
        raise ValueError("trials must be positive")
    rows = []
    ok = True
    for index, (name, pattern) in enumerate(_VALIDATION_PATTERNS):
        rng = random.Random((seed << 8) + index)
        counts = {}
        for _ in range(trials):
            outcome = squash_sample(pattern, rng)
            counts[outcome] = counts.get(outcome, 0) + 1
        for outcome, p in sorted(squash_distribution(pattern).items(), key=lambda kv: kv[0].value):
            expected = float(p)
            observed = counts.get(outcome, 0) / trials
            bound = 3.0 * (expected * (1.0 - expected) / trials) ** 0.5
            within = abs(observed - expected) <= bound
            ok = ok and within
            rows.append((name, outcome, expected, observed, bound, within))
    return rows, ok

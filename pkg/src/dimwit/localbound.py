"""Exact classical bounds by enumeration over deterministic strategies.

A deterministic strategy fixes one outcome per setting for each party; the
maximum of a functional over all shared-randomness models is attained at one
of these, so enumeration gives the exact local bound.  Bob's side is folded
into a per-setting best response, which cuts the cost from the full product of
both strategy spaces to (Alice strategies) x (sum of Bob outcome counts).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import StrategySpaceTooLargeError
from .scenario import BellFunctional, BellScenario, ProbabilityTable

DEFAULT_STRATEGY_CAP = 10**8


@dataclass(frozen=True)
class DeterministicStrategy:
    """One outcome per setting for Alice and for Bob."""

    assignment_a: tuple[int, ...]
    assignment_b: tuple[int, ...]


def strategy_table(scenario: BellScenario, s: DeterministicStrategy) -> ProbabilityTable:
    """The 0/1 probability table produced by a deterministic strategy."""
    blocks = []
    for x, va in enumerate(scenario.outcomes_a):
        row = []
        for y, vb in enumerate(scenario.outcomes_b):
            blk = np.zeros((va, vb))
            blk[s.assignment_a[x], s.assignment_b[y]] = 1.0
            row.append(blk)
        blocks.append(row)
    return ProbabilityTable(scenario, blocks)


def strategy_value(f: BellFunctional, s: DeterministicStrategy) -> float:
    """Functional value of a deterministic strategy, accumulated in the same
    fixed order as ``evaluate`` so the two agree exactly."""
    total = f.constant
    for x in range(f.scenario.settings_a):
        for y in range(f.scenario.settings_b):
            total += f.joint[x][y][s.assignment_a[x], s.assignment_b[y]]
    for x, coeffs in enumerate(f.marginal_a):
        total += coeffs[s.assignment_a[x]]
    for y, coeffs in enumerate(f.marginal_b):
        total += coeffs[s.assignment_b[y]]
    return float(total)


def _check_cap(scenario: BellScenario, cap: int) -> None:
    size = math.prod(scenario.outcomes_a) * math.prod(scenario.outcomes_b)
    if size > cap:
        raise StrategySpaceTooLargeError(
            f"strategy space has {size} points, exceeding the cap of {cap}"
        )


def _extremize(f: BellFunctional, sign: float, cap: int):
    """Shared max/min enumeration; ``sign`` is +1 for max, -1 for min.

    Ties are broken toward the lexicographically smallest
    (assignment_a, assignment_b): Alice assignments are visited in
    lexicographic order and kept only on strict improvement, and argmax over
    Bob outcomes returns the first (smallest) maximizer per setting.
    """
    _check_cap(f.scenario, cap)
    scenario = f.scenario
    best_total = -math.inf
    best_strategy = None
    bob_settings = range(scenario.settings_b)
    for alpha in product(*(range(v) for v in scenario.outcomes_a)):
        base = sign * f.constant
        for x, a in enumerate(alpha):
            base += sign * f.marginal_a[x][a]
        bob_choice = []
        for y in bob_settings:
            scores = sign * f.marginal_b[y].copy()
            for x, a in enumerate(alpha):
                scores += sign * f.joint[x][y][a]
            b = int(np.argmax(scores))
            bob_choice.append(b)
            base += scores[b]
        if base > best_total:
            best_total = base
            best_strategy = DeterministicStrategy(alpha, tuple(bob_choice))
    # Recompute through the canonical accumulation order so the reported value
    # matches evaluate() on the witnessing strategy bit for bit.
    return strategy_value(f, best_strategy), best_strategy


def local_bound(f: BellFunctional, cap: int = DEFAULT_STRATEGY_CAP):
    """Exact maximum over deterministic strategies, with a witnessing strategy.

    Raises ``StrategySpaceTooLargeError`` when the full strategy-space size
    (product of all outcome counts) exceeds ``cap``.
    """
    return _extremize(f, 1.0, cap)


def local_bound_min(f: BellFunctional, cap: int = DEFAULT_STRATEGY_CAP) -> float:
    """Exact minimum over deterministic strategies."""
    value, _ = _extremize(f, -1.0, cap)
    return value


def local_bound_min_strategy(f: BellFunctional, cap: int = DEFAULT_STRATEGY_CAP):
    """Minimum together with its witnessing strategy."""
    return _extremize(f, -1.0, cap)

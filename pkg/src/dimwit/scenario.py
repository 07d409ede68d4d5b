"""Bell scenarios, functionals, probability tables, and quantum models.

A scenario fixes the per-setting outcome counts for the two parties; a
functional is the linear form

    value = sum_{abxy} joint[x][y][a,b] P(ab|xy)
          + sum_{xa} marginal_a[x][a] P_A(a|x)
          + sum_{yb} marginal_b[y][b] P_B(b|y)
          + constant

evaluated either on a raw probability table or on a quantum model through the
associated Bell operator.  All types are immutable values and every operation
is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatchError,
    InvalidModelError,
    InvalidTableError,
    ScenarioMismatchError,
    SignalingError,
)

TABLE_TOL = 1e-9
RENORMALIZE_LIMIT = 1e-7
STATE_NORM_TOL = 1e-10
POVM_TOL = 1e-9
SIGNALING_TOL = 1e-6

#: Marginals of a raw table use the partner's setting 0 by default; experimental
#: tables may signal slightly, and a fixed convention keeps evaluation
#: deterministic.  "average" averages over partner settings and rejects tables
#: whose per-partner-setting marginals disagree by more than SIGNALING_TOL.
PARTNER_SETTING_ZERO = "partner-setting-zero"
AVERAGE = "average"


@dataclass(frozen=True)
class BellScenario:
    """Outcome counts per measurement setting for Alice and Bob."""

    outcomes_a: tuple[int, ...]
    outcomes_b: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "outcomes_a", tuple(int(v) for v in self.outcomes_a))
        object.__setattr__(self, "outcomes_b", tuple(int(v) for v in self.outcomes_b))
        if not self.outcomes_a or not self.outcomes_b:
            raise ValueError("each party needs at least one setting")
        if min(self.outcomes_a) < 2 or min(self.outcomes_b) < 2:
            raise ValueError("every setting needs at least two outcomes")

    @property
    def settings_a(self) -> int:
        return len(self.outcomes_a)

    @property
    def settings_b(self) -> int:
        return len(self.outcomes_b)


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.flags.writeable = False
    return out


def _zero_joint(scenario: BellScenario):
    return [
        [np.zeros((va, vb)) for vb in scenario.outcomes_b] for va in scenario.outcomes_a
    ]


class BellFunctional:
    """Linear functional on probability tables of a fixed scenario.

    ``joint[x][y]`` is the (outcomes_a[x], outcomes_b[y]) coefficient block;
    ``marginal_a[x]`` / ``marginal_b[y]`` are per-setting marginal coefficient
    vectors, and ``constant`` is an additive offset.
    """

    def __init__(self, scenario, joint=None, marginal_a=None, marginal_b=None, constant=0.0):
        self.scenario = scenario
        joint = _zero_joint(scenario) if joint is None else joint
        self.joint = tuple(
            tuple(_frozen(joint[x][y]) for y in range(scenario.settings_b))
            for x in range(scenario.settings_a)
        )
        for x, va in enumerate(scenario.outcomes_a):
            for y, vb in enumerate(scenario.outcomes_b):
                if self.joint[x][y].shape != (va, vb):
                    raise DimensionMismatchError(
                        f"joint block ({x},{y}) has shape {self.joint[x][y].shape}, "
                        f"expected ({va},{vb})"
                    )
        if marginal_a is None:
            marginal_a = [np.zeros(v) for v in scenario.outcomes_a]
        if marginal_b is None:
            marginal_b = [np.zeros(v) for v in scenario.outcomes_b]
        self.marginal_a = tuple(_frozen(m) for m in marginal_a)
        self.marginal_b = tuple(_frozen(m) for m in marginal_b)
        for x, va in enumerate(scenario.outcomes_a):
            if self.marginal_a[x].shape != (va,):
                raise DimensionMismatchError(f"marginal_a[{x}] has wrong shape")
        for y, vb in enumerate(scenario.outcomes_b):
            if self.marginal_b[y].shape != (vb,):
                raise DimensionMismatchError(f"marginal_b[{y}] has wrong shape")
        self.constant = float(constant)

    def __eq__(self, other):
        if not isinstance(other, BellFunctional):
            return NotImplemented
        return (
            self.scenario == other.scenario
            and self.constant == other.constant
            and all(
                np.array_equal(self.joint[x][y], other.joint[x][y])
                for x in range(self.scenario.settings_a)
                for y in range(self.scenario.settings_b)
            )
            and all(map(np.array_equal, self.marginal_a, other.marginal_a))
            and all(map(np.array_equal, self.marginal_b, other.marginal_b))
        )

    def __add__(self, other):
        if not isinstance(other, BellFunctional):
            return NotImplemented
        if self.scenario != other.scenario:
            raise ScenarioMismatchError("cannot add functionals of different scenarios")
        return BellFunctional(
            self.scenario,
            [
                [self.joint[x][y] + other.joint[x][y] for y in range(self.scenario.settings_b)]
                for x in range(self.scenario.settings_a)
            ],
            [a + b for a, b in zip(self.marginal_a, other.marginal_a)],
            [a + b for a, b in zip(self.marginal_b, other.marginal_b)],
            self.constant + other.constant,
        )

    def scaled(self, alpha: float) -> "BellFunctional":
        return BellFunctional(
            self.scenario,
            [[alpha * blk for blk in row] for row in self.joint],
            [alpha * m for m in self.marginal_a],
            [alpha * m for m in self.marginal_b],
            alpha * self.constant,
        )

    def __mul__(self, alpha):
        return self.scaled(float(alpha))

    __rmul__ = __mul__

    def __neg__(self):
        return self.scaled(-1.0)

    def abs_coefficient_sum(self) -> float:
        """Sum of |coefficient| over every joint, marginal, and constant slot."""
        total = abs(self.constant)
        total += sum(float(np.abs(blk).sum()) for row in self.joint for blk in row)
        total += sum(float(np.abs(m).sum()) for m in self.marginal_a)
        total += sum(float(np.abs(m).sum()) for m in self.marginal_b)
        return total


class ProbabilityTable:
    """Conditional distribution P(ab|xy) with positivity/normalization checks.

    Entries must be >= -1e-12 and each setting pair must sum to 1 within
    1e-9.  Normalization misses up to 1e-7 can be repaired by passing
    ``renormalize=True``; the repair is recorded in ``was_renormalized``.
    """

    def __init__(self, scenario: BellScenario, p, renormalize: bool = False):
        self.scenario = scenario
        blocks = []
        renormalized = False
        for x, va in enumerate(scenario.outcomes_a):
            row = []
            for y, vb in enumerate(scenario.outcomes_b):
                blk = np.array(p[x][y], dtype=float)
                if blk.shape != (va, vb):
                    raise DimensionMismatchError(
                        f"table block ({x},{y}) has shape {blk.shape}, expected ({va},{vb})"
                    )
                if blk.min() < -1e-12:
                    raise InvalidTableError(
                        f"negative probability {blk.min():.3e} at settings ({x},{y})"
                    )
                total = float(blk.sum())
                if abs(total - 1.0) > TABLE_TOL:
                    if renormalize and abs(total - 1.0) < RENORMALIZE_LIMIT and total > 0:
                        blk = blk / total
                        renormalized = True
                    else:
                        raise InvalidTableError(
                            f"probabilities for settings ({x},{y}) sum to {total!r}"
                        )
                blk.flags.writeable = False
                row.append(blk)
            blocks.append(tuple(row))
        self.p = tuple(blocks)
        self.was_renormalized = renormalized

    def marginal_a(self, x: int, policy: str = PARTNER_SETTING_ZERO) -> np.ndarray:
        """P_A(a|x) under the given partner-setting policy."""
        if policy == PARTNER_SETTING_ZERO:
            return self.p[x][0].sum(axis=1)
        if policy == AVERAGE:
            stack = np.stack([self.p[x][y].sum(axis=1) for y in range(self.scenario.settings_b)])
            spread = float((stack.max(axis=0) - stack.min(axis=0)).max())
            if spread > SIGNALING_TOL:
                raise SignalingError(
                    f"Alice marginals for x={x} vary by {spread:.3e} across Bob settings"
                )
            return stack.mean(axis=0)
        raise ValueError(f"unknown marginal policy {policy!r}")

    def marginal_b(self, y: int, policy: str = PARTNER_SETTING_ZERO) -> np.ndarray:
        """P_B(b|y) under the given partner-setting policy."""
        if policy == PARTNER_SETTING_ZERO:
            return self.p[0][y].sum(axis=0)
        if policy == AVERAGE:
            stack = np.stack([self.p[x][y].sum(axis=0) for x in range(self.scenario.settings_a)])
            spread = float((stack.max(axis=0) - stack.min(axis=0)).max())
            if spread > SIGNALING_TOL:
                raise SignalingError(
                    f"Bob marginals for y={y} vary by {spread:.3e} across Alice settings"
                )
            return stack.mean(axis=0)
        raise ValueError(f"unknown marginal policy {policy!r}")

    def signaling_deviation(self) -> float:
        """Largest spread of one party's marginals across the partner's settings."""
        worst = 0.0
        for x in range(self.scenario.settings_a):
            stack = np.stack([self.p[x][y].sum(axis=1) for y in range(self.scenario.settings_b)])
            worst = max(worst, float((stack.max(axis=0) - stack.min(axis=0)).max()))
        for y in range(self.scenario.settings_b):
            stack = np.stack([self.p[x][y].sum(axis=0) for x in range(self.scenario.settings_a)])
            worst = max(worst, float((stack.max(axis=0) - stack.min(axis=0)).max()))
        return worst


def uniform_table(scenario: BellScenario) -> ProbabilityTable:
    """The uniformly random table P(ab|xy) = 1/(v_A(x) v_B(y))."""
    return ProbabilityTable(
        scenario,
        [
            [np.full((va, vb), 1.0 / (va * vb)) for vb in scenario.outcomes_b]
            for va in scenario.outcomes_a
        ],
    )


def evaluate(f: BellFunctional, t: ProbabilityTable, marginal_policy: str = PARTNER_SETTING_ZERO) -> float:
    """Value of the functional on a table.

    Marginal terms use the partner's setting 0 by default; pass ``AVERAGE`` to
    average over partner settings instead (raises ``SignalingError`` if the
    table's marginals depend on the partner setting by more than 1e-6).
    """
    if f.scenario != t.scenario:
        raise ScenarioMismatchError("functional and table use different scenarios")
    total = f.constant
    for x in range(f.scenario.settings_a):
        for y in range(f.scenario.settings_b):
            blk = f.joint[x][y]
            if blk.any():
                total += float((blk * t.p[x][y]).sum())
    for x, coeffs in enumerate(f.marginal_a):
        if coeffs.any():
            total += float(coeffs @ t.marginal_a(x, marginal_policy))
    for y, coeffs in enumerate(f.marginal_b):
        if coeffs.any():
            total += float(coeffs @ t.marginal_b(y, marginal_policy))
    return total


@dataclass(frozen=True)
class QuantumModel:
    """Pure state on C^dA x C^dB with one POVM per setting for each party."""

    d_a: int
    d_b: int
    state: np.ndarray
    povms_a: tuple[tuple[np.ndarray, ...], ...]
    povms_b: tuple[tuple[np.ndarray, ...], ...]

    def __post_init__(self):
        state = np.asarray(self.state, dtype=complex).reshape(-1)
        if state.shape != (self.d_a * self.d_b,):
            raise DimensionMismatchError(
                f"state has length {state.size}, expected {self.d_a * self.d_b}"
            )
        object.__setattr__(self, "state", state)
        for name, povms, d in (("povms_a", self.povms_a, self.d_a), ("povms_b", self.povms_b, self.d_b)):
            frozen = tuple(
                tuple(np.asarray(m, dtype=complex) for m in setting) for setting in povms
            )
            for setting in frozen:
                for m in setting:
                    if m.shape != (d, d):
                        raise DimensionMismatchError(
                            f"{name} element has shape {m.shape}, expected ({d},{d})"
                        )
            object.__setattr__(self, name, frozen)

    def outcome_counts(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return (
            tuple(len(s) for s in self.povms_a),
            tuple(len(s) for s in self.povms_b),
        )

    def validate(self, scenario: BellScenario | None = None) -> None:
        """Raise ``InvalidModelError`` on any state-norm or POVM violation."""
        norm = float(np.linalg.norm(self.state))
        if abs(norm - 1.0) > STATE_NORM_TOL:
            raise InvalidModelError(f"state norm {norm!r} is not 1")
        counts_a, counts_b = self.outcome_counts()
        if scenario is not None and (counts_a, counts_b) != (
            scenario.outcomes_a,
            scenario.outcomes_b,
        ):
            raise InvalidModelError(
                f"POVM outcome counts {(counts_a, counts_b)} do not match scenario"
            )
        for name, povms, d in (("Alice", self.povms_a, self.d_a), ("Bob", self.povms_b, self.d_b)):
            for idx, setting in enumerate(povms):
                total = np.zeros((d, d), dtype=complex)
                for m in setting:
                    dev = float(np.abs(m - m.conj().T).max())
                    if dev > POVM_TOL:
                        raise InvalidModelError(
                            f"{name} setting {idx}: element not Hermitian (dev {dev:.2e})"
                        )
                    low = linalg.eig_hermitian(m, POVM_TOL).eigenvalues[-1]
                    if low < -POVM_TOL:
                        raise InvalidModelError(
                            f"{name} setting {idx}: eigenvalue {low:.2e} below -{POVM_TOL}"
                        )
                    total = total + m
                dev = float(np.abs(total - np.eye(d)).max())
                if dev > POVM_TOL:
                    raise InvalidModelError(
                        f"{name} setting {idx}: elements sum to identity only within {dev:.2e}"
                    )


def bell_operator(f: BellFunctional, povms_a, povms_b) -> np.ndarray:
    """Operator whose expectation in a state gives the functional's value."""
    counts_a = tuple(len(s) for s in povms_a)
    counts_b = tuple(len(s) for s in povms_b)
    if counts_a != f.scenario.outcomes_a or counts_b != f.scenario.outcomes_b:
        raise DimensionMismatchError(
            f"POVM outcome counts {(counts_a, counts_b)} do not match the scenario"
        )
    d_a = povms_a[0][0].shape[0]
    d_b = povms_b[0][0].shape[0]
    dim = d_a * d_b
    op = np.zeros((dim, dim), dtype=complex)
    for x in range(f.scenario.settings_a):
        for y in range(f.scenario.settings_b):
            blk = f.joint[x][y]
            if not blk.any():
                continue
            for a in range(f.scenario.outcomes_a[x]):
                row = blk[a]
                if not row.any():
                    continue
                partner = np.zeros((d_b, d_b), dtype=complex)
                for b in range(f.scenario.outcomes_b[y]):
                    if row[b] != 0.0:
                        partner = partner + row[b] * povms_b[y][b]
                op += np.kron(povms_a[x][a], partner)
    acc_a = np.zeros((d_a, d_a), dtype=complex)
    for x, coeffs in enumerate(f.marginal_a):
        for a, c in enumerate(coeffs):
            if c != 0.0:
                acc_a = acc_a + c * povms_a[x][a]
    if acc_a.any():
        op += np.kron(acc_a, np.eye(d_b))
    acc_b = np.zeros((d_b, d_b), dtype=complex)
    for y, coeffs in enumerate(f.marginal_b):
        for b, c in enumerate(coeffs):
            if c != 0.0:
                acc_b = acc_b + c * povms_b[y][b]
    if acc_b.any():
        op += np.kron(np.eye(d_a), acc_b)
    if f.constant != 0.0:
        op += f.constant * np.eye(dim)
    return op


def model_value(f: BellFunctional, m: QuantumModel) -> float:
    """<psi| B |psi> for the model's state and the functional's Bell operator."""
    op = bell_operator(f, m.povms_a, m.povms_b)
    return float(np.vdot(m.state, op @ m.state).real)


def table_of(m: QuantumModel) -> ProbabilityTable:
    """Probability table generated by the model; no-signaling by construction."""
    counts_a, counts_b = m.outcome_counts()
    scenario = BellScenario(counts_a, counts_b)
    psi = m.state.reshape(m.d_a, m.d_b)
    blocks = []
    for x, va in enumerate(counts_a):
        row = []
        for y, vb in enumerate(counts_b):
            blk = np.empty((va, vb))
            for a in range(va):
                left = m.povms_a[x][a] @ psi  # (M_a ⊗ I) acting on the state
                for b in range(vb):
                    blk[a, b] = np.vdot(psi, left @ m.povms_b[y][b].T).real
            row.append(blk)
        blocks.append(row)
    return ProbabilityTable(scenario, blocks)


@dataclass
class BoundRecord:
    """Bounds summary for one functional: exact local bound, heuristic
    best-found values per dimension, and optional certified upper bounds
    with a provenance note each."""

    local_bound: float
    best_by_dimension: dict[int, float] = field(default_factory=dict)
    certified_upper: dict[int, tuple[float, str]] | None = None

    @classmethod
    def from_runs(cls, local_bound: float, found: dict[int, float], certified_upper=None):
        """Build a record enforcing monotonicity: a model found at dimension d
        embeds at every larger dimension, so the reported best at d' >= d is
        at least the best at d."""
        best: dict[int, float] = {}
        running = -np.inf
        for d in sorted(found):
            running = max(running, found[d])
            best[d] = running
        return cls(local_bound, best, certified_upper)

    def validate(self) -> None:
        dims = sorted(self.best_by_dimension)
        for lo, hi in zip(dims, dims[1:]):
            if self.best_by_dimension[hi] < self.best_by_dimension[lo] - 1e-9:
                raise ValueError(
                    f"best_by_dimension decreases from d={lo} to d={hi}"
                )

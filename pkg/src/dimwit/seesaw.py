"""Alternating lower-bound search for fixed-dimension quantum values.

Each restart seeds a random pure state and random projective measurements,
then repeats: replace the state by (a vector in) the Bell operator's top
eigenspace, then re-optimize each measurement setting holding everything else
fixed.  Binary settings are solved exactly by a positive-eigenspace split;
settings with three or more outcomes cycle through exact pairwise exchanges
that redistribute each pair's sum optimally.  Every step is a closed-form
eigenproblem, so the objective is non-decreasing and every iterate is a
feasible model - values are honest lower bounds on the dimension-restricted
maximum, found heuristically.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import linalg
from .errors import ConfigError, NoConvergenceError, NotHermitianError, NotPSDError
from .scenario import (
    BellFunctional,
    BellScenario,
    QuantumModel,
    bell_operator,
    model_value,
)

#: Eigenvalues within this of the top one count as the top eigenspace.
DEGENERACY_TOL = 1e-10
#: Keep the previous state if its top-eigenspace projection has at least this norm.
PREVIOUS_STATE_MIN_OVERLAP = 1e-6
#: Eigenvalue cutoff inside measurement updates.
EXCHANGE_TOL = 1e-9
#: max |S@S - S| under which a pair sum is treated as an exact projector.
PROJECTOR_DRIFT_TOL = 1e-11


@dataclass(frozen=True, eq=False)
class SeesawConfig:
    """Knobs for the restart loop; defaults suit scenarios up to two qutrits."""

    restarts: int = 50
    max_iterations: int = 500
    convergence_tol: float = 1e-10
    seed: int = 0
    fixed_state: np.ndarray | None = None
    projective_only: bool = False
    pair_pass_count: int = 3

    def __post_init__(self):
        if self.fixed_state is not None:
            state = np.asarray(self.fixed_state, dtype=complex).reshape(-1)
            norm = float(np.linalg.norm(state))
            if norm == 0.0:
                raise ConfigError("fixed_state must be a nonzero vector")
            state = state / norm
            state.flags.writeable = False
            object.__setattr__(self, "fixed_state", state)

    def validate(self) -> None:
        if self.restarts < 1:
            raise ConfigError("restarts must be >= 1")
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be >= 1")
        if not self.convergence_tol > 0:
            raise ConfigError("convergence_tol must be > 0")
        if self.pair_pass_count < 1:
            raise ConfigError("pair_pass_count must be >= 1")


@dataclass
class SeesawResult:
    """Outcome of a restart batch; best_value is max(per_restart_values)."""

    best_value: float
    best_model: QuantumModel
    per_restart_values: list[float]
    iterations_used: list[int]
    converged_flags: list[bool]


def spawn_rng(seed: int, *key: int) -> np.random.Generator:
    """Counter-derived RNG stream; identical regardless of execution order."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def _random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def _random_projective_povm(d: int, outcomes: int, rng: np.random.Generator):
    """Projective POVM from the eigenbasis of a random Hermitian matrix,
    outcomes taking contiguous basis blocks with sizes as equal as possible
    (zero-size blocks give zero elements when outcomes exceed d)."""
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    basis = linalg.eig_hermitian((g + g.conj().T) / 2.0).eigenvectors
    base, rem = divmod(d, outcomes)
    sizes = [base + 1] * rem + [base] * (outcomes - rem)
    elements = []
    start = 0
    for size in sizes:
        if size == 0:
            elements.append(np.zeros((d, d), dtype=complex))
            continue
        blk = basis[:, start : start + size]
        start += size
        p = blk @ blk.conj().T
        elements.append((p + p.conj().T) / 2.0)
    return tuple(elements)


def _random_model(scenario, d_a, d_b, rng, fixed_state=None) -> QuantumModel:
    state = _random_state(d_a * d_b, rng) if fixed_state is None else np.array(fixed_state)
    povms_a = tuple(_random_projective_povm(d_a, v, rng) for v in scenario.outcomes_a)
    povms_b = tuple(_random_projective_povm(d_b, v, rng) for v in scenario.outcomes_b)
    return QuantumModel(d_a, d_b, state, povms_a, povms_b)


def seeded_models(scenario: BellScenario, d_a: int, d_b: int, seed: int, count: int):
    """Reproducible initial models; stream i depends only on (seed, i)."""
    return [
        _random_model(scenario, d_a, d_b, spawn_rng(seed, i)) for i in range(count)
    ]


def update_state(f: BellFunctional, model: QuantumModel, fixed_state=None) -> QuantumModel:
    """Move the state into the Bell operator's top eigenspace.

    Within a degenerate top eigenspace the previous state's projection is kept
    (when its norm is at least 1e-6) to avoid cycling; a pinned ``fixed_state``
    makes this a no-op.  The objective never decreases.
    """
    if fixed_state is not None:
        return model
    op = bell_operator(f, model.povms_a, model.povms_b)
    eig = linalg.eig_hermitian(op)
    top = eig.eigenvalues[0]
    width = DEGENERACY_TOL * max(1.0, abs(top))
    cluster = eig.eigenvectors[:, eig.eigenvalues >= top - width]
    proj = cluster @ (cluster.conj().T @ model.state)
    norm = float(np.linalg.norm(proj))
    if norm >= PREVIOUS_STATE_MIN_OVERLAP:
        state = proj / norm
    else:
        state = cluster[:, 0].copy()
    return replace(model, state=state)


def _setting_operators(f: BellFunctional, model: QuantumModel, party: str, setting: int):
    """Per-outcome Hermitian operators F_a such that the objective restricted
    to this setting's POVM is sum_a tr(M_a F_a) plus terms independent of it."""
    rho = np.outer(model.state, model.state.conj())
    d_a, d_b = model.d_a, model.d_b
    if party == "A":
        own_dim = d_a
        counts = f.scenario.outcomes_a[setting]
        ops = [np.zeros((own_dim, own_dim), dtype=complex) for _ in range(counts)]
        eye = np.eye(d_a)
        for y in range(f.scenario.settings_b):
            blk = f.joint[setting][y]
            if not blk.any():
                continue
            for b in range(f.scenario.outcomes_b[y]):
                col = blk[:, b]
                if not col.any():
                    continue
                reduced = linalg.partial_trace(
                    rho @ np.kron(eye, model.povms_b[y][b]), d_a, d_b, "B"
                )
                for a in range(counts):
                    if col[a] != 0.0:
                        ops[a] = ops[a] + col[a] * reduced
        coeffs = f.marginal_a[setting]
        if coeffs.any():
            rho_own = linalg.partial_trace(rho, d_a, d_b, "B")
            for a in range(counts):
                if coeffs[a] != 0.0:
                    ops[a] = ops[a] + coeffs[a] * rho_own
    elif party == "B":
        own_dim = d_b
        counts = f.scenario.outcomes_b[setting]
        ops = [np.zeros((own_dim, own_dim), dtype=complex) for _ in range(counts)]
        eye = np.eye(d_b)
        for x in range(f.scenario.settings_a):
            blk = f.joint[x][setting]
            if not blk.any():
                continue
            for a in range(f.scenario.outcomes_a[x]):
                row = blk[a]
                if not row.any():
                    continue
                reduced = linalg.partial_trace(
                    rho @ np.kron(model.povms_a[x][a], eye), d_a, d_b, "A"
                )
                for b in range(counts):
                    if row[b] != 0.0:
                        ops[b] = ops[b] + row[b] * reduced
        coeffs = f.marginal_b[setting]
        if coeffs.any():
            rho_own = linalg.partial_trace(rho, d_a, d_b, "A")
            for b in range(counts):
                if coeffs[b] != 0.0:
                    ops[b] = ops[b] + coeffs[b] * rho_own
    else:
        raise ValueError(f"party must be 'A' or 'B', got {party!r}")
    return [(op + op.conj().T) / 2.0 for op in ops]


def _with_setting(model: QuantumModel, party: str, setting: int, elements) -> QuantumModel:
    elements = tuple(elements)
    if party == "A":
        povms = list(model.povms_a)
        povms[setting] = elements
        return replace(model, povms_a=tuple(povms))
    povms = list(model.povms_b)
    povms[setting] = elements
    return replace(model, povms_b=tuple(povms))


def update_measurement_binary(f: BellFunctional, model: QuantumModel, party: str, setting: int) -> QuantumModel:
    """Exact maximizer for a two-outcome setting: the first element becomes
    the projector onto the positive eigenspace of F_0 - F_1."""
    from .errors import WrongOutcomeCountError

    counts = f.scenario.outcomes_a if party == "A" else f.scenario.outcomes_b
    if counts[setting] != 2:
        raise WrongOutcomeCountError(
            f"setting {setting} of party {party} has {counts[setting]} outcomes, expected 2"
        )
    f0, f1 = _setting_operators(f, model, party, setting)
    m0 = linalg.positive_projector(f0 - f1, EXCHANGE_TOL)
    m1 = np.eye(m0.shape[0], dtype=complex) - m0
    return _with_setting(model, party, setting, (m0, m1))


def update_measurement_multi(
    f: BellFunctional, model: QuantumModel, party: str, setting: int, passes: int = 3
) -> QuantumModel:
    """Round-robin exact pairwise exchanges for a setting with >= 3 outcomes.

    For each ordered pair (a, a') the sum S = M_a + M_a' is held fixed and
    tr(M_a (F_a - F_a')) is maximized over 0 <= M_a <= S; the closed-form
    solution is sqrt(S) P sqrt(S) with P the positive projector of
    sqrt(S) (F_a - F_a') sqrt(S), supported inside S.  POVM constraints are
    preserved and the objective never decreases.
    """
    from .errors import WrongOutcomeCountError

    counts = f.scenario.outcomes_a if party == "A" else f.scenario.outcomes_b
    v = counts[setting]
    if v < 3:
        raise WrongOutcomeCountError(
            f"setting {setting} of party {party} has {v} outcomes, expected >= 3"
        )
    ops = _setting_operators(f, model, party, setting)
    povms = model.povms_a if party == "A" else model.povms_b
    elements = [np.array(m) for m in povms[setting]]
    for _ in range(passes):
        for a in range(v):
            for a2 in range(a + 1, v):
                s = elements[a] + elements[a2]
                if float(np.abs(s).max()) < 1e-15:
                    continue
                delta = ops[a] - ops[a2]
                if float(np.abs(s @ s - s).max()) <= PROJECTOR_DRIFT_TOL:
                    root = s
                else:
                    root, _ = linalg.psd_pseudo_sqrt(s, EXCHANGE_TOL)
                sandwiched = root @ delta @ root
                pos = linalg.positive_projector(sandwiched, EXCHANGE_TOL)
                # Skip no-gain exchanges (ties): keeps fully degenerate POVMs
                # unchanged instead of shoving their mass onto one element.
                gain = float(np.trace(pos @ sandwiched).real)
                current = float(np.trace(elements[a] @ delta).real)
                if gain - current <= 1e-13 * max(1.0, abs(current)):
                    continue
                new_a = root @ pos @ root
                new_a = (new_a + new_a.conj().T) / 2.0
                elements[a] = new_a
                elements[a2] = s - new_a
    return _with_setting(model, party, setting, elements)


def _update_setting(f, model, party, setting, cfg: SeesawConfig) -> QuantumModel:
    counts = f.scenario.outcomes_a if party == "A" else f.scenario.outcomes_b
    if counts[setting] == 2:
        model = update_measurement_binary(f, model, party, setting)
    else:
        model = update_measurement_multi(f, model, party, setting, cfg.pair_pass_count)
    if cfg.projective_only:
        povms = model.povms_a if party == "A" else model.povms_b
        for m in povms[setting]:
            drift = float(np.abs(m @ m - m).max())
            if drift > 1e-8:
                raise ConfigError(
                    f"projective_only violated: element drifted from idempotency by {drift:.2e}"
                )
    return model


def refine(f: BellFunctional, model: QuantumModel, cfg: SeesawConfig):
    """Run the update schedule from a given model until converged.

    Schedule per iteration: state, all Alice settings, all Bob settings, in
    index order.  Returns (value, model, iterations, converged); convergence
    means one full iteration improved the objective by less than
    ``convergence_tol``.
    """
    value = model_value(f, model)
    iterations = 0
    converged = False
    for _ in range(cfg.max_iterations):
        iterations += 1
        model = update_state(f, model, cfg.fixed_state)
        for x in range(f.scenario.settings_a):
            model = _update_setting(f, model, "A", x, cfg)
        for y in range(f.scenario.settings_b):
            model = _update_setting(f, model, "B", y, cfg)
        new_value = model_value(f, model)
        improvement = new_value - value
        value = new_value
        if improvement < cfg.convergence_tol:
            converged = True
            break
    return value, model, iterations, converged


def _restart_task(args):
    f, d_a, d_b, cfg, index = args
    model = _random_model(f.scenario, d_a, d_b, spawn_rng(cfg.seed, index), cfg.fixed_state)
    try:
        value, model, iterations, converged = refine(f, model, cfg)
        return index, value, model, iterations, converged, None
    except (NotHermitianError, NoConvergenceError, NotPSDError) as exc:
        return index, -np.inf, None, 0, False, f"{type(exc).__name__}: {exc}"


def seesaw(
    f: BellFunctional, d_a: int, d_b: int, cfg: SeesawConfig | None = None, jobs: int = 1
) -> SeesawResult:
    """Best lower bound on the (d_a, d_b)-dimensional maximum of ``f`` over
    ``cfg.restarts`` independent restarts.

    Restarts use counter-derived RNG streams and merge by max with ties going
    to the earliest restart, so serial and parallel runs agree exactly.
    Linear-algebra failures abort only the affected restart (with a warning).
    """
    cfg = SeesawConfig() if cfg is None else cfg
    cfg.validate()
    if d_a < 2 or d_b < 2:
        raise ConfigError(f"local dimensions must be >= 2, got ({d_a},{d_b})")
    if cfg.fixed_state is not None and cfg.fixed_state.size != d_a * d_b:
        raise ConfigError(
            f"fixed_state has length {cfg.fixed_state.size}, expected {d_a * d_b}"
        )
    tasks = [(f, d_a, d_b, cfg, i) for i in range(cfg.restarts)]
    if jobs > 1 and cfg.restarts > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_restart_task, tasks, chunksize=max(1, cfg.restarts // (4 * jobs))))
    else:
        outcomes = [_restart_task(t) for t in tasks]

    values, iterations, flags = [], [], []
    best_value = -np.inf
    best_model = None
    for index, value, model, iters, converged, error in outcomes:
        values.append(value)
        iterations.append(iters)
        flags.append(converged)
        if error is not None:
            warnings.warn(f"restart {index} aborted: {error}", stacklevel=2)
            continue
        if value > best_value:
            best_value = value
            best_model = model
    if best_model is None:
        raise NoConvergenceError("every restart aborted; see warnings")
    return SeesawResult(best_value, best_model, values, iterations, flags)


def embed_model(model: QuantumModel, d_a: int, d_b: int) -> QuantumModel:
    """Embed a model into larger local dimensions.

    The state is zero-padded; each POVM element is block-extended with zeros,
    and the new dimensions' identity block is attached to outcome 0 so each
    setting still sums to the identity.
    """
    if d_a < model.d_a or d_b < model.d_b:
        raise ConfigError("embedding target dimensions must not shrink")
    psi = model.state.reshape(model.d_a, model.d_b)
    state = np.zeros((d_a, d_b), dtype=complex)
    state[: model.d_a, : model.d_b] = psi

    def grow(setting, d_old, d_new):
        out = []
        for a, m in enumerate(setting):
            big = np.zeros((d_new, d_new), dtype=complex)
            big[:d_old, :d_old] = m
            if a == 0 and d_new > d_old:
                big[d_old:, d_old:] = np.eye(d_new - d_old)
            out.append(big)
        return tuple(out)

    return QuantumModel(
        d_a,
        d_b,
        state.reshape(-1),
        tuple(grow(s, model.d_a, d_a) for s in model.povms_a),
        tuple(grow(s, model.d_b, d_b) for s in model.povms_b),
    )

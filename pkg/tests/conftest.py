import numpy as np
import pytest

from dimwit.scenario import BellFunctional, BellScenario, ProbabilityTable


def random_scenario(rng, max_settings=3, max_outcomes=4) -> BellScenario:
    na = rng.integers(1, max_settings + 1)
    nb = rng.integers(1, max_settings + 1)
    return BellScenario(
        tuple(int(v) for v in rng.integers(2, max_outcomes + 1, size=na)),
        tuple(int(v) for v in rng.integers(2, max_outcomes + 1, size=nb)),
    )


def random_functional(rng, scenario=None, sparsity=0.3) -> BellFunctional:
    sc = scenario if scenario is not None else random_scenario(rng)
    joint = [
        [
            rng.normal(size=(va, vb)) * (rng.random(size=(va, vb)) > sparsity)
            for vb in sc.outcomes_b
        ]
        for va in sc.outcomes_a
    ]
    marg_a = [rng.normal(size=v) * (rng.random(size=v) > sparsity) for v in sc.outcomes_a]
    marg_b = [rng.normal(size=v) * (rng.random(size=v) > sparsity) for v in sc.outcomes_b]
    constant = float(rng.normal()) if rng.random() > sparsity else 0.0
    return BellFunctional(sc, joint, marg_a, marg_b, constant)


def random_table(rng, scenario) -> ProbabilityTable:
    blocks = []
    for va in scenario.outcomes_a:
        row = []
        for vb in scenario.outcomes_b:
            raw = rng.random(size=(va, vb)) + 1e-3
            row.append(raw / raw.sum())
            # per-block normalization only; such tables may signal
        blocks.append(row)
    return ProbabilityTable(scenario, blocks)


def random_hermitian(rng, n) -> np.ndarray:
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (g + g.conj().T) / 2.0


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)

import numpy as np
import pytest
from hypothesis import settings

from fastpascal.oracle import oracle_apply
from fastpascal.pascal import MatrixSpec

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

_ACCEPTANCE = {}


def record(criterion: int, name: str, passed: bool, detail: str = "") -> None:
    """Remember one acceptance outcome for the end-of-run summary."""
    prev = _ACCEPTANCE.get(criterion)
    ok = passed and (prev is None or prev[1])
    details = [d for d in ((prev[2] if prev else ""), detail) if d]
    _ACCEPTANCE[criterion] = (name, ok, "; ".join(details))


@pytest.fixture
def acceptance():
    return record


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(_ACCEPTANCE):
        name, ok, detail = _ACCEPTANCE[c]
        line = f"criterion {c:2d} {'PASS' if ok else 'FAIL'}  {name}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


class GaussianCases:
    """Seeded Gaussian inputs for Q products with lazily computed oracle outputs.

    Oracle products at n = 2^16 take tens of seconds, so every test module
    shares one instance per session.
    """

    def __init__(self):
        self._truth = {}

    def x(self, n: int, trial: int) -> np.ndarray:
        return np.random.default_rng([n, trial]).standard_normal(n)

    def truth(self, variant: str, n: int, trial: int) -> np.ndarray:
        key = (variant, n, trial)
        if key not in self._truth:
            self._truth[key] = oracle_apply(MatrixSpec("Q", variant, n), self.x(n, trial))
        return self._truth[key]


@pytest.fixture(scope="session")
def gaussian_cases():
    return GaussianCases()


@pytest.fixture(scope="session")
def tuned():
    """Cost model fitted on this machine and its fixed-split threshold."""
    from fastpascal import autotune

    samples = autotune.measure_costs(autotune.TUNE_SIZES, trials=5)
    model, _ = autotune.fit_cost_model(samples)
    return model, autotune.solve_dynprog_fixed(model, 2**17)

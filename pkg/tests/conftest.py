import math

import numpy as np
import pytest

from lambda_metrology.model import LambdaParams


def random_params(rng: np.random.Generator, equal_rabi: bool = False) -> LambdaParams:
    r1 = rng.uniform(0.2, 3.0)
    r2 = r1 if equal_rabi else rng.uniform(0.2, 3.0)
    return LambdaParams(
        omega_R1=r1, omega_R2=r2,
        phi1=rng.uniform(-math.pi, math.pi), phi2=rng.uniform(-math.pi, math.pi),
        psi=rng.uniform(-math.pi, math.pi), theta=rng.uniform(0, math.pi),
        omega_a=rng.uniform(-2, 2), omega_b=rng.uniform(-2, 2), omega_c=rng.uniform(-2, 2),
    )


def random_unitary(rng: np.random.Generator, n: int = 3) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(20260)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

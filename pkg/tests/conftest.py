import numpy as np
import pytest

from nystrom_edg.geometry import PointConfig, squared_edm


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def make_config(rng, r, m, n, spread=1.0):
    return PointConfig(spread * rng.uniform(-1, 1, size=(r, m + n)), m)


def make_scenario(rng, r, m, n):
    P = make_config(rng, r, m, n)
    return P, squared_edm(P)


def random_centering(rng, p, zeros=0):
    """Sum-one weights with mixed signs and ``zeros`` exact zero entries."""
    z = rng.normal(size=p)
    z[rng.choice(p, size=zeros, replace=False)] = 0.0
    live = z != 0
    z[live] += (1.0 - z.sum()) / live.sum()
    # tidy the last live entry so the sum is 1 to rounding
    k = np.flatnonzero(live)[-1]
    z[k] += 1.0 - z.sum()
    return z


# acceptance verdicts, echoed in the terminal summary so they survive output capture
ACCEPTANCE_RESULTS: list[str] = []


def record_criterion(label: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    print(line)
    ACCEPTANCE_RESULTS.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_RESULTS, key=lambda s: int(s.split("AC")[1].split(" ")[0].rstrip(":"))):
            terminalreporter.write_line(line)

"""Shared fixtures: parameter presets and the expensive simulation runs.

The long PDE runs are session-scoped so the acceptance suite and the
module tests measure the same trajectories instead of recomputing them.
"""

import time
import warnings

import numpy as np
import pytest

from immunopattern.kinetics import preset
from immunopattern.equilibria import coexistence_equilibria
from immunopattern.ode import cycle_metrics, integrate
from immunopattern.pde import SimConfig, simulate

# (criterion number, passed, detail) tuples filled by test_acceptance
ACCEPTANCE_RESULTS = []


@pytest.fixture
def criterion_log():
    def log(num, ok, detail=""):
        ACCEPTANCE_RESULTS.append((num, ok, detail))
        print(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
    return log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for num, ok, detail in sorted(ACCEPTANCE_RESULTS):
            terminalreporter.write_line(
                f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def untreated():
    return preset("untreated")


@pytest.fixture(scope="session")
def treated():
    return preset("treated")


@pytest.fixture(scope="session")
def cce_untreated(untreated):
    return coexistence_equilibria(untreated)[-1]


@pytest.fixture(scope="session")
def cce_treated(treated):
    return coexistence_equilibria(treated)[-1]


@pytest.fixture(scope="session")
def turing2d(untreated):
    """The desk-scale 2D pattern run: untreated, d32 = -0.01, t_end = 200."""
    cfg = SimConfig(params=untreated, ic_variant=1, dims=2, dx=0.01, dt=1e-3,
                    t_end=200.0,
                    snapshot_times=(0, 25, 50, 75, 100, 125, 150, 175, 190, 200),
                    negativity="warn")
    t0 = time.time()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        snaps = simulate(cfg)
    return {"snaps": snaps, "elapsed": time.time() - t0, "cfg": cfg}


def _hopf_1d(params):
    cfg = SimConfig(params=params.replace(p2=0.55, d22=0.00048, d32=-0.01),
                    ic_variant=1, dims=1, dx=0.01, dt=1e-3, t_end=200.0,
                    snapshot_times=tuple(np.arange(0.0, 200.01, 0.25)),
                    negativity="warn")
    t0 = time.time()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        snaps = simulate(cfg)
    return {"snaps": snaps, "elapsed": time.time() - t0, "cfg": cfg}


@pytest.fixture(scope="session")
def hopf1d_untreated(untreated):
    return _hopf_1d(untreated)


@pytest.fixture(scope="session")
def hopf1d_treated(treated):
    return _hopf_1d(treated)


@pytest.fixture(scope="session")
def ode_cycles(untreated):
    """Two limit-cycle trajectories (different starts) past the Hopf point."""
    p = untreated.replace(p2=0.55)
    t0 = time.time()
    tr1 = integrate(p, (0.1, 0.3, 1.0), 400.0, dt=1e-3, record_every=10)
    tr2 = integrate(p, (1.5, 2.0, 0.5), 400.0, dt=1e-3, record_every=10)
    elapsed = time.time() - t0
    return {"tr1": tr1, "tr2": tr2,
            "cm1": cycle_metrics(tr1), "cm2": cycle_metrics(tr2),
            "elapsed": elapsed}

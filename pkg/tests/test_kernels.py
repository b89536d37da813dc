import itertools
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdesign import _purekernels, kernels
from qdesign.sic import orbit_potential, wh_orbit, frame_potential

try:
    from qdesign import _kernels
except ImportError:              # extension not built
    _kernels = None

BACKENDS = [pytest.param(_purekernels, id="python"),
            pytest.param(_kernels, id="compiled",
                         marks=pytest.mark.skipif(_kernels is None, reason="not built"))]


def brute_exact_cover(n_columns, rows):
    sols = []
    for r in range(len(rows) + 1):
        for combo in itertools.combinations(range(len(rows)), r):
            cols = [c for i in combo for c in rows[i]]
            if sorted(cols) == list(range(n_columns)):
                sols.append(list(combo))
    return sols


def random_instance(rng, n_columns, n_rows):
    rows = []
    for _ in range(n_rows):
        k = int(rng.integers(1, min(3, n_columns) + 1))
        rows.append(tuple(sorted(rng.choice(n_columns, size=k, replace=False).tolist())))
    return rows


@pytest.mark.parametrize("impl", BACKENDS)
def test_knuth_example(impl):
    rows = [(2, 4, 5), (0, 3, 6), (1, 2, 5), (0, 3), (1, 6), (3, 4, 6)]
    status, sol, nodes = impl.exact_cover(7, rows, 10**6)
    assert status == kernels.FOUND
    assert sorted(sol) == [0, 3, 4]


@pytest.mark.parametrize("impl", BACKENDS)
def test_no_solution_and_budget(impl):
    assert impl.exact_cover(3, [(0, 1), (1, 2)], 100)[0] == kernels.NONE
    rows = [(i,) for i in range(10)]
    assert impl.exact_cover(10, rows, 3)[0] == kernels.BUDGET


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_exact_cover_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    n_cols = int(rng.integers(2, 7))
    rows = random_instance(rng, n_cols, int(rng.integers(1, 10)))
    sols = brute_exact_cover(n_cols, rows)
    status, sol, _ = _purekernels.exact_cover(n_cols, rows, 10**6)
    if sols:
        assert status == _purekernels.FOUND and sorted(sol) in sols
    else:
        assert status == _purekernels.NONE


@pytest.mark.skipif(_kernels is None, reason="extension not built")
@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 50))
def test_exact_cover_backends_agree(seed, budget):
    rng = np.random.default_rng(seed)
    n_cols = int(rng.integers(2, 12))
    rows = random_instance(rng, n_cols, int(rng.integers(1, 25)))
    assert _kernels.exact_cover(n_cols, rows, budget) == \
        _purekernels.exact_cover(n_cols, rows, budget)


def random_unit(N, seed):
    rng = np.random.default_rng(seed)
    f = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    return f / np.linalg.norm(f)


@pytest.mark.skipif(_kernels is None, reason="extension not built")
@pytest.mark.parametrize("N", [2, 3, 5, 8])
def test_potential_backends_agree(N):
    for seed in range(5):
        f = random_unit(N, seed)
        F1, G1 = _kernels.wh_potential_grad(f)
        F2, G2 = _purekernels.wh_potential_grad(f)
        assert abs(F1 - F2) < 1e-12
        assert np.abs(G1 - G2).max() < 1e-12


@pytest.mark.parametrize("impl", BACKENDS)
@pytest.mark.parametrize("N", [2, 3, 4, 6])
def test_gradient_finite_differences(impl, N):
    f = random_unit(N, N)
    _, G = impl.wh_potential_grad(f)
    rng = np.random.default_rng(100 + N)
    h = 1e-6
    for _ in range(4):
        u = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        Fp = impl.wh_potential_grad(f + h * u)[0]
        Fm = impl.wh_potential_grad(f - h * u)[0]
        assert (Fp - Fm) / (2 * h) == pytest.approx(np.vdot(G, u).real, rel=1e-6, abs=1e-9)


@pytest.mark.parametrize("N", [2, 3, 4, 5, 7])
def test_covariant_potential_equals_frame_potential(N):
    for seed in range(3):
        f = random_unit(N, seed)
        assert orbit_potential(f) == pytest.approx(frame_potential(wh_orbit(f)), rel=1e-10)


def test_backend_flag():
    assert kernels.BACKEND in ("compiled", "python")
    if _kernels is not None:
        assert kernels.BACKEND == "compiled" or kernels.exact_cover is _purekernels.exact_cover


def test_environment_forces_fallback():
    env = dict(os.environ, QDESIGN_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from qdesign import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True).stdout
    assert out.strip() == "python"

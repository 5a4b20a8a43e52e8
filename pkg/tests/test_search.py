import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from qchan.search import (
    OptimizerConfig,
    hermitian_from_reals,
    minimize_over_states,
    minimize_over_unitaries,
    unitary_from_reals,
)

from conftest import rng_of, seeds


def overlap_objective(target):
    return lambda v: 1 - abs(np.vdot(target, v)) ** 2


def test_finds_target_state():
    target = np.array([1, 1j, 0, 1]) / np.sqrt(3)
    res = minimize_over_states(overlap_objective(target), 4, OptimizerConfig(restarts=4, max_iters=2000))
    assert res.value < 1e-6
    assert np.isclose(np.linalg.norm(res.point), 1)


def test_thread_count_does_not_change_result():
    target = np.array([0.6, 0.8j, 0])
    f = overlap_objective(target)
    one = minimize_over_states(f, 3, OptimizerConfig(restarts=6, max_iters=200, seed=7, threads=1))
    many = minimize_over_states(f, 3, OptimizerConfig(restarts=6, max_iters=200, seed=7, threads=3))
    assert one.value == many.value and one.restart == many.restart
    assert np.array_equal(one.point, many.point) and one.history == many.history


def test_more_restarts_never_worse():
    f = lambda v: float(np.real(v.conj() @ np.diag([3.0, 1.0, 2.0, 5.0]) @ v))
    vals = [minimize_over_states(f, 4, OptimizerConfig(restarts=r, max_iters=60)).value for r in (1, 2, 4, 8)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))


def test_seed_and_early_stop():
    f = lambda v: abs(v[0]) ** 2
    seed = np.array([0, 1, 0])
    res = minimize_over_states(f, 3, OptimizerConfig(restarts=5), seeds=[seed], stop_value=0.0)
    assert res.restart == 0 and res.value == 0.0 and len(res.history) == 1


@given(seeds, st.integers(1, 4))
def test_generators_are_hermitian_and_unitary(seed, n):
    x = rng_of(seed).normal(size=n * n)
    H = hermitian_from_reals(x, n)
    U = unitary_from_reals(x, n)
    assert np.allclose(H, H.conj().T)
    assert np.allclose(U.conj().T @ U, np.eye(n))


def test_unitary_search_starts_at_identity():
    res = minimize_over_unitaries(lambda U: np.linalg.norm(U - np.eye(2)), 2, OptimizerConfig(restarts=2, max_iters=50))
    assert res.value < 1e-12

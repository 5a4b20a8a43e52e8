import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qchan import channel as C
from qchan import linalg as L
from qchan import metrics as M
from qchan.errors import ValidationError

from conftest import rng_of, seeds

PHI = L.pure_state(L.maximally_entangled(2))
MIX4 = np.eye(4) / 4


def cvx_common_part(A, B):
    cp = pytest.importorskip("cvxpy")
    X = cp.Variable(A.shape, hermitian=True)
    prob = cp.Problem(cp.Maximize(cp.real(cp.trace(X))), [X >> 0, A - X >> 0, B - X >> 0])
    prob.solve(solver=cp.CLARABEL)
    return prob.value


def feasible(X, A, B, tol=1e-8):
    return all(np.linalg.eigvalsh(Y).min() >= -tol for Y in (X, A - X, B - X))


# Helstrom


def test_helstrom_phi_vs_mixed():
    p, povm = M.helstrom_error(PHI, MIX4)
    assert math.isclose(p, 1 / 8, abs_tol=1e-12)
    assert povm.check()
    assert math.isclose(povm.error([PHI, MIX4], [0.5, 0.5]), 1 / 8, abs_tol=1e-12)


def test_helstrom_orthogonal_and_equal(rng):
    assert M.helstrom_error(L.pure_state([1, 0]), L.pure_state([0, 1]))[0] < 1e-15
    rho = L.random_density(3, rng)
    assert math.isclose(M.helstrom_error(rho, rho, (0.8, 0.2))[0], 0.2)


def test_priors_validation():
    with pytest.raises(ValidationError):
        M.as_priors([0.5, 0.6])
    with pytest.raises(ValidationError):
        M.as_priors([1.0, 0.0])


@given(seeds, st.integers(1, 4), st.floats(0.05, 0.95))
def test_helstrom_matches_closed_form_dual(seed, d, a):
    rng = rng_of(seed)
    r0, r1 = L.random_density(d, rng), L.random_density(d, rng)
    p = M.helstrom_error(r0, r1, (a, 1 - a))[0]
    assert math.isclose(p, M.common_part_upper(a * r0, (1 - a) * r1), abs_tol=1e-10)
    # the true common part can only be smaller
    assert M.common_part(a * r0, (1 - a) * r1)[0] <= p + 1e-9


@given(seeds, st.integers(1, 4), st.floats(0.5, 0.99))
def test_prior_sandwich_states(seed, d, hi):
    rng = rng_of(seed)
    r0, r1 = L.random_density(d, rng), L.random_density(d, rng)
    half = M.helstrom_error(r0, r1)[0]
    p = M.helstrom_error(r0, r1, (hi, 1 - hi))[0]
    assert 2 * (1 - hi) * half - 1e-12 <= p <= 2 * hi * half + 1e-12


# common part


def test_common_part_examples(rng):
    A = L.random_density(3, rng) * 0.7
    v, X = M.common_part(A, A)
    assert math.isclose(v, 0.7) and np.allclose(X, A)
    assert M.common_part(L.pure_state([1, 0]), L.pure_state([0, 1]))[0] == 0.0
    v, X = M.common_part(PHI, MIX4)
    assert math.isclose(v, 0.25, abs_tol=1e-10) and feasible(X, PHI, MIX4)


def test_common_part_distinct_pure_states_is_zero():
    psi, phi = L.pure_state([1, 0]), L.pure_state([1, 1])
    v, X = M.common_part(psi, phi)
    assert v == 0.0
    # the closed-form dual bound is strictly larger here
    f = M.fidelity(psi, phi)
    assert math.isclose(M.common_part_upper(psi, phi), 1 - math.sqrt(1 - f * f), rel_tol=1e-10)


@given(seeds, st.integers(2, 4))
def test_common_part_pure_against_inverse(seed, d):
    rng = rng_of(seed)
    psi = L.random_pure(d, rng)
    B = L.random_density(d, rng)
    v, X = M.common_part(L.pure_state(psi), B)
    expected = 1 / np.real(psi.conj() @ np.linalg.inv(B) @ psi)
    assert math.isclose(v, expected, rel_tol=1e-8)
    assert feasible(X, L.pure_state(psi), B)


@pytest.mark.parametrize("seed", range(12))
def test_common_part_against_sdp_solver(seed):
    rng = rng_of(seed)
    d = 2 + seed % 3
    A = L.random_density(d, rng) * rng.uniform(0.2, 1)
    B = L.random_density(d, rng) * rng.uniform(0.2, 1)
    v, X = M.common_part(A, B)
    assert abs(v - cvx_common_part(A, B)) < 1e-6
    assert feasible(X, A, B) and math.isclose(np.trace(X).real, v, abs_tol=1e-8)


@given(seeds, st.integers(2, 4), st.integers(1, 3))
def test_common_part_rank_deficient_witness(seed, d, r):
    rng = rng_of(seed)
    A = L.random_density(d, rng, rank=min(r, d))
    B = L.random_density(d, rng, rank=min(r + 1, d))
    v, X = M.common_part(A, B)
    assert feasible(X, A, B)
    assert math.isclose(np.trace(X).real, v, abs_tol=1e-8)
    assert v <= M.common_part_upper(A, B) + 1e-9
    assert math.isclose(v, M.common_part(B, A)[0], abs_tol=1e-7)


def test_common_part_rejects_non_psd():
    with pytest.raises(ValidationError):
        M.common_part(np.diag([1.0, -1.0]), np.eye(2))


# fidelity facts


@given(seeds, st.integers(1, 4))
def test_fuchs_van_de_graaf(seed, d):
    rng = rng_of(seed)
    r, s = L.random_density(d, rng), L.random_density(d, rng, rank=1)
    f, dist = M.fidelity(r, s), M.trace_distance(r, s)
    assert 1 - f <= dist + 1e-9
    assert dist <= math.sqrt(max(1 - f * f, 0)) + 1e-9


@given(seeds, st.integers(1, 3), st.integers(1, 4))
def test_fidelity_monotone_under_channels(seed, d, m):
    rng = rng_of(seed)
    ch = C.random_channel(d, m, rng)
    r, s = L.random_density(d, rng), L.random_density(d, rng)
    assert M.fidelity(C.apply(ch, r), C.apply(ch, s)) >= M.fidelity(r, s) - 1e-9


def test_fidelity_pure_overlap(rng):
    a, b = L.random_pure(3, rng), L.random_pure(3, rng)
    assert math.isclose(M.fidelity(L.pure_state(a), L.pure_state(b)), abs(np.vdot(a, b)), rel_tol=1e-8)


# Chernoff


def test_state_chernoff_examples(rng):
    rho = L.random_density(3, rng)
    assert M.state_chernoff(rho, rho)[0] == 0.0
    assert M.state_chernoff(L.pure_state([1, 0]), L.pure_state([0, 1]))[0] == math.inf
    c, s = M.state_chernoff(PHI, MIX4)
    assert math.isclose(c, math.log(4), rel_tol=1e-10) and s == 0.0


@given(seeds, st.integers(1, 4), st.floats(0, 1))
def test_chernoff_objective_symmetry(seed, d, s):
    rng = rng_of(seed)
    r, t = L.random_density(d, rng), L.random_density(d, rng, rank=max(1, d - 1))
    assert math.isclose(M.state_chernoff_objective(r, t, s), M.state_chernoff_objective(t, r, 1 - s), abs_tol=1e-10)


@given(seeds, st.integers(1, 3))
def test_chernoff_between_helstrom_rates(seed, d):
    rng = rng_of(seed)
    r, t = L.random_density(d, rng), L.random_density(d, rng)
    c, s = M.state_chernoff(r, t)
    q = M.state_chernoff_objective(r, t, s)
    assert math.isclose(c, -math.log(q), rel_tol=1e-9, abs_tol=1e-11)
    grid = [M.state_chernoff_objective(r, t, x) for x in np.linspace(0, 1, 41)]
    assert q <= min(grid) + 1e-12
    # single-copy Helstrom error is bounded by half the Chernoff objective
    assert M.helstrom_error(r, t)[0] <= q / 2 + 1e-12


# several states


def test_multi_error_examples(rng):
    kets = [L.pure_state(e) for e in np.eye(3)]
    lo, hi, povm = M.multi_error(kets)
    assert lo == hi == 0.0 or (lo < 1e-12 and hi < 1e-12)
    rho = L.random_density(3, rng)
    lo, hi, povm = M.multi_error([rho, rho, rho])
    assert math.isclose(hi, 2 / 3, abs_tol=1e-12) and math.isclose(lo, 1 / 3)
    r0, r1 = L.random_density(2, rng), L.random_density(2, rng)
    lo, hi, _ = M.multi_error([r0, r1], [0.3, 0.7])
    assert lo == hi == M.helstrom_error(r0, r1, (0.3, 0.7))[0]


@given(seeds, st.integers(2, 4), st.integers(2, 4))
def test_pgm_is_a_povm_and_brackets(seed, d, s):
    rng = rng_of(seed)
    states = [L.random_density(d, rng, rank=1 + (i % d)) for i in range(s)]
    w = rng.uniform(0.1, 1, size=s)
    priors = w / w.sum()
    lo, hi, povm = M.multi_error(states, priors)
    assert povm.check()
    assert math.isclose(povm.error(states, priors), hi, abs_tol=1e-9)
    # guessing the likeliest hypothesis is a measurement, so the optimum lies below 1 - max prior
    assert 0 <= lo <= hi and lo <= 1 - priors.max() + 1e-9

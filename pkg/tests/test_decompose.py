import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsnapc.decompose import (DecompositionPlan, GivensStep, OpCounter, SnapStep,
                              canonical_phase, decompose, plan_stats, reconstruct)
from qsnapc.errors import InvalidArgumentError, NonUnitaryInputError, NumericalFailureError
from qsnapc.fockops import givens_embed, snap
from qsnapc.io import format_plan
from qsnapc.targets import qft

from conftest import max_abs, qr_haar


def test_identity_unpruned_and_pruned():
    plan = decompose(np.eye(4), prune_tol=None)
    assert all(np.all(s.phases == 0) for s in plan.steps if isinstance(s, SnapStep))
    assert all(s.theta == 0 for s in plan.steps if isinstance(s, GivensStep))
    assert plan_stats(plan).givens == 6
    assert decompose(np.eye(4), prune_tol=1e-14).steps == ()


def test_single_givens():
    plan = decompose(givens_embed(2, 0, 0.7))
    assert plan.steps == (GivensStep(0, 0.7),)
    # brute-force the single elimination step: which angle zeroes W[0,1]?
    W = givens_embed(2, 0, 0.7).conj().T
    grid = np.linspace(0, np.pi / 2, 100001)
    best = grid[np.argmin(np.abs(np.cos(grid) * W[0, 1] - np.sin(grid) * W[1, 1]))]
    assert best == pytest.approx(0.7, abs=2e-5)
    unpruned = decompose(givens_embed(2, 0, 0.7), prune_tol=None)
    assert [s for s in unpruned.steps if isinstance(s, GivensStep)] == [GivensStep(0, 0.7)]
    assert all(np.all(s.phases == 0) for s in unpruned.steps if isinstance(s, SnapStep))


@pytest.mark.parametrize("dim", [2, 3, 8, 17])
def test_haar_round_trip(dim, rng):
    for _ in range(5):
        U = qr_haar(dim, rng)
        assert max_abs(reconstruct(decompose(U)) - U) <= 1e-11


def test_reconstruct_examples():
    np.testing.assert_array_equal(reconstruct(DecompositionPlan(3, [])), np.eye(3))
    c, s = np.cos(0.7), np.sin(0.7)
    np.testing.assert_allclose(reconstruct(DecompositionPlan(2, [GivensStep(0, 0.7)])),
                               [[c, -s], [s, c]], atol=1e-16)


def test_reconstruct_matches_dense_product(rng):
    # circuit order: first step is the rightmost factor
    plan = decompose(qr_haar(5, rng), prune_tol=None)
    M = np.eye(5, dtype=complex)
    for step in plan.steps:
        M = step.matrix(5) @ M
    assert max_abs(M - reconstruct(plan)) <= 1e-14


def test_qft_round_trip():
    U = qft(6, 8)
    assert max_abs(reconstruct(decompose(U)) - U) <= 1e-11


def test_qft_tail_is_pruned():
    for N, dim in [(6, 8), (14, 16), (30, 32)]:
        plan = decompose(qft(N, dim))
        ks = [s.k for s in plan.steps if isinstance(s, GivensStep)]
        assert len(ks) == N * (N - 1) // 2
        assert max(ks) <= N - 2


def test_plan_stats():
    assert plan_stats(DecompositionPlan(3, [])) == plan_stats(DecompositionPlan(5, ()))
    empty = plan_stats(DecompositionPlan(3, []))
    assert (empty.snaps, empty.givens, empty.max_abs_theta, empty.total_abs_theta) == (0, 0, 0.0, 0.0)
    stats = plan_stats(decompose(qr_haar(8, np.random.default_rng(1))))
    assert stats.givens == 28
    assert stats.snaps <= 8
    assert plan_stats(decompose(np.eye(8))).givens == 0


def test_step_counts_and_angle_range(rng):
    for dim in (4, 9, 16):
        plan = decompose(qr_haar(dim, rng))
        thetas = np.array([s.theta for s in plan.steps if isinstance(s, GivensStep)])
        snaps = [s for s in plan.steps if isinstance(s, SnapStep)]
        assert len(thetas) == dim * (dim - 1) // 2
        assert len(snaps) <= dim
        assert np.all(thetas >= 0) and np.all(thetas <= np.pi / 2)
        for s in snaps:
            assert np.all(s.phases > -np.pi) and np.all(s.phases <= np.pi)


def test_column_elimination_postcondition(rng):
    """Replay the plan on W = U^dag and check each finished column."""
    dim = 7
    U = qr_haar(dim, rng)
    plan = decompose(U, prune_tol=None)
    W = U.conj().T.copy()
    steps = list(plan.steps)
    pos = 0
    for col in range(dim - 1, 0, -1):
        assert isinstance(steps[pos], SnapStep)
        W = steps[pos].matrix(dim) @ W
        pos += 1
        for j in range(col):
            assert steps[pos].k == j
            W = steps[pos].matrix(dim) @ W
            pos += 1
        others = np.delete(W[:, col], col)
        assert np.max(np.abs(others)) <= 1e-12
        assert abs(W[col, col] - 1) <= 1e-12
    W = steps[pos].matrix(dim) @ W
    assert max_abs(W - np.eye(dim)) <= 1e-12


def test_multiply_add_count():
    for dim in (8, 32, 64):
        counter = OpCounter()
        decompose(qr_haar(dim, np.random.default_rng(dim)), counter=counter)
        assert counter.rotations == dim * (dim - 1) // 2
        assert dim ** 3 <= counter.multiply_adds <= 4 * dim ** 3


def test_determinism():
    U = qr_haar(12, np.random.default_rng(3))
    p1, p2 = decompose(U), decompose(U.copy())
    assert p1 == p2
    assert format_plan(p1) == format_plan(p2)
    assert p1.source_checksum == p2.source_checksum


def test_zero_entries_get_zero_phase():
    # column entries exactly zero must not produce NaN or arbitrary phases
    U = np.zeros((4, 4), dtype=complex)
    U[0, 3] = U[1, 2] = U[3, 1] = 1
    U[2, 0] = -1j
    plan = decompose(U, prune_tol=None)
    assert max_abs(reconstruct(plan) - U) <= 1e-14
    for s in plan.steps:
        if isinstance(s, SnapStep):
            assert np.all(np.isfinite(s.phases))


def test_rejects_bad_input():
    with pytest.raises(NonUnitaryInputError) as info:
        decompose(np.array([[1, 0.1], [0, 1]]))
    assert info.value.deviation == pytest.approx(0.1)
    with pytest.raises(NumericalFailureError):
        decompose(np.array([[np.nan, 0], [0, 1]]))
    with pytest.raises(InvalidArgumentError):
        decompose(np.ones((2, 3)))


def test_plan_validation():
    with pytest.raises(InvalidArgumentError):
        DecompositionPlan(3, [GivensStep(2, 0.1)])
    with pytest.raises(InvalidArgumentError):
        DecompositionPlan(3, [SnapStep([0.0, 1.0])])


def test_diagonal_input_is_snaps_only():
    U = snap([0.3, -1.2, 2.0, 0.0])
    plan = decompose(U)
    assert plan_stats(plan).givens == 0
    assert max_abs(reconstruct(plan) - U) <= 1e-15


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=1, max_size=8))
def test_canonical_phase_range(values):
    out = canonical_phase(values)
    assert np.all(out > -np.pi) and np.all(out <= np.pi)
    np.testing.assert_allclose(np.exp(1j * out), np.exp(1j * np.array(values)), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 24), st.integers(0, 2 ** 32 - 1))
def test_round_trip_property(dim, seed):
    U = qr_haar(dim, np.random.default_rng(seed))
    assert max_abs(reconstruct(decompose(U)) - U) <= 1e-10 * dim

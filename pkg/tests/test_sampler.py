import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_video
from ffwd.errors import DimensionMismatch
from ffwd.model import Segment
from ffwd.sampler import (
    default_lambda,
    motion_weights,
    sample_range,
    sample_segment,
    sampling_budget,
    select_frames,
    solve_llc,
    solve_omp,
    solve_sc,
    weighted_lasso,
)
from ffwd.synth import (
    oracle_best_subset,
    oracle_llc_descent,
    oracle_llc_gradient,
    oracle_llc_objective,
    random_instance,
)


# --- motion weights ------------------------------------------------------------


def test_equal_motion_gives_unit_weights():
    assert np.allclose(motion_weights([2.0, 2.0, 2.0]), 1.0)
    assert np.array_equal(motion_weights([0.0, 0.0]), [1.0, 1.0])


def test_more_motion_smaller_weight():
    w = motion_weights([0.0, 50.0])
    assert w[0] > w[1]


def test_motion_weights_formula():
    raw = np.exp([-0.5, -1.0, -1.5])
    assert np.allclose(motion_weights([1.0, 2.0, 3.0]), raw / raw.mean(), rtol=1e-12)


@given(st.lists(st.floats(0, 100), min_size=1, max_size=50))
def test_weights_positive_mean_one(motion):
    w = motion_weights(motion)
    assert np.all(w > 0)
    assert w.mean() == pytest.approx(1.0)


# --- LLC -----------------------------------------------------------------------


def test_llc_single_frame_reconstructs_exactly():
    sol = solve_llc(np.array([[1.0], [2.0], [-3.0]]), lam=0.0)
    assert sol.alpha == pytest.approx([1.0])
    assert sol.reconstruction_error == pytest.approx(0.0, abs=1e-12)


def test_llc_orthonormal_columns():
    sol = solve_llc(np.eye(2), lam=0.0)
    assert sol.alpha == pytest.approx([1.0, 1.0])
    assert sol.story == pytest.approx([1.0, 1.0])


def test_llc_matches_descent_oracle_8x20():
    D, motion = random_instance(8, 8, 20)
    w = motion_weights(motion)
    sol = solve_llc(D, w, lam=0.01)
    ref = oracle_llc_descent(D, w, 0.01, tol=1e-10)
    assert np.max(np.abs(sol.alpha - ref)) < 1e-6


def test_llc_small_instance_uses_normal_equations():
    # n <= f takes the n x n branch; compare with a direct dense solve
    D, motion = random_instance(3, 10, 6)
    w = motion_weights(motion)
    sol = solve_llc(D, w, lam=0.5)
    v = D.sum(axis=1)
    g = np.linalg.norm(D - v[:, None], axis=0)
    ref = np.linalg.solve(D.T @ D + 0.5 * np.diag((w * g) ** 2), D.T @ v)
    assert np.allclose(sol.alpha, ref, rtol=1e-10, atol=1e-12)


@given(seed=st.integers(0, 10_000), f=st.integers(2, 24), n=st.integers(1, 60))
def test_llc_first_order_optimality(seed, f, n):
    D, motion = random_instance(seed, f, n)
    w = motion_weights(motion)
    sol = solve_llc(D, w)
    grad = oracle_llc_gradient(D, w, sol.lam, sol.alpha)
    scale = np.max(np.abs(D.T @ D.sum(axis=1)))
    assert np.max(np.abs(grad)) < 1e-8 * scale


def test_oracle_gradient_against_finite_differences():
    D, motion = random_instance(4, 5, 7)
    w = motion_weights(motion)
    lam = default_lambda(D)
    alpha = np.linspace(-1, 1, 7)
    grad = oracle_llc_gradient(D, w, lam, alpha)
    h = 1e-6
    fd = np.empty(7)
    for i in range(7):
        e = np.zeros(7)
        e[i] = h
        fd[i] = (oracle_llc_objective(D, w, lam, alpha + e) - oracle_llc_objective(D, w, lam, alpha - e)) / (2 * h)
    assert np.allclose(fd, grad, rtol=1e-5, atol=1e-5 * np.max(np.abs(grad)))


def test_oracle_gradient_zero_at_least_squares():
    D, _ = random_instance(6, 9, 4)
    alpha = np.linalg.lstsq(D, D.sum(axis=1), rcond=None)[0]
    grad = oracle_llc_gradient(D, np.ones(4), 0.0, alpha)
    assert np.max(np.abs(grad)) < 1e-9


def test_lower_weight_never_lowers_activation():
    d = np.array([1.0, 2.0, 0.5])
    D = np.tile(d[:, None], (1, 6)) + 1e-3 * np.arange(6)[None, :]
    base = solve_llc(D, np.ones(6))
    w = np.ones(6)
    w[3] = 0.2
    scaled = solve_llc(D, w, lam=base.lam)
    assert abs(scaled.alpha[3]) >= abs(base.alpha[3])


def test_duplicate_frames_with_zero_lambda_stay_finite():
    D = np.tile(np.array([[1.0], [1.0]]), (1, 4))
    sol = solve_llc(D, lam=0.0)
    assert np.all(np.isfinite(sol.alpha))
    assert sol.reconstruction_error < 1e-6


def test_all_zero_dictionary():
    sol = solve_llc(np.zeros((3, 5)))
    assert np.array_equal(sol.alpha, np.zeros(5))


def test_llc_is_bit_deterministic():
    D, motion = random_instance(12, 16, 80)
    a = solve_llc(D, motion_weights(motion)).alpha
    b = solve_llc(D.copy(), motion_weights(motion.copy())).alpha
    assert a.tobytes() == b.tobytes()


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        solve_llc(np.ones((2, 3)), np.ones(4))
    with pytest.raises(DimensionMismatch):
        solve_omp(np.ones((2, 3)), 4)


# --- weighted Lasso ------------------------------------------------------------


def test_lasso_huge_lambda_is_zero():
    D, _ = random_instance(1, 6, 10)
    alpha = weighted_lasso(D, D.sum(axis=1), np.ones(10), 1e12)
    assert np.array_equal(alpha, np.zeros(10))


def test_lasso_zero_lambda_square_system():
    rng = np.random.default_rng(0)
    D = rng.normal(size=(5, 5)) + 5 * np.eye(5)
    v = D.sum(axis=1)
    alpha = weighted_lasso(D, v, np.ones(5), 0.0, tol=1e-13)
    assert np.allclose(alpha, np.linalg.solve(D, v), atol=1e-8)


def test_sc_objective_beats_llc_point():
    D, motion = random_instance(8, 8, 20)
    w = motion_weights(motion)
    sc = solve_sc(D, w, m=4)
    llc = solve_llc(D, w, lam=0.01)
    v = D.sum(axis=1)

    def l1_objective(a):
        return 0.5 * np.sum((v - D @ a) ** 2) + sc.lam * np.sum(w * np.abs(a))

    assert l1_objective(sc.alpha) <= l1_objective(llc.alpha)


def test_sc_kkt_conditions():
    D, motion = random_instance(21, 10, 30)
    w = motion_weights(motion)
    sc = solve_sc(D, w, m=5)
    c = D.T @ (D.sum(axis=1) - D @ sc.alpha)
    t = sc.lam * w
    on = sc.alpha != 0
    assert np.allclose(c[on], t[on] * np.sign(sc.alpha[on]), rtol=1e-5, atol=1e-6 * t.max())
    assert np.all(np.abs(c[~on]) <= t[~on] * (1 + 1e-6))


@pytest.mark.parametrize("seed, m", [(2, 3), (5, 8), (9, 12)])
def test_sc_support_near_target(seed, m):
    D, motion = random_instance(seed, 32, 120)
    sc = solve_sc(D, motion_weights(motion), m)
    count = np.count_nonzero(sc.alpha)
    assert m <= count <= max(m, math.floor(1.1 * m))


# --- OMP -----------------------------------------------------------------------


def test_omp_exact_single_atom():
    # columns 1 and 2 cancel, so the story equals column 0, orthogonal to both
    D = np.array([[2.0, 0.0, 0.0], [0.0, 1.0, -1.0], [0.0, 3.0, -3.0]])
    sol = solve_omp(D, 1)
    assert np.flatnonzero(sol.alpha).tolist() == [0]
    assert sol.reconstruction_error == pytest.approx(0.0, abs=1e-12)


def test_omp_full_support_residual_vanishes():
    D, _ = random_instance(3, 8, 8)
    sol = solve_omp(D, 8)
    assert sol.reconstruction_error < 1e-9
    assert np.count_nonzero(sol.alpha) <= 8


def test_omp_within_twice_best_subset_6x12():
    D, _ = random_instance(0, 6, 12)
    sol = solve_omp(D, 3)
    _, best = oracle_best_subset(D, 3)
    assert best - 1e-12 <= sol.reconstruction_error <= 2 * best + 1e-12


@given(seed=st.integers(0, 5000), m=st.integers(1, 10))
def test_omp_support_size(seed, m):
    D, _ = random_instance(seed, 4, 10)
    sol = solve_omp(D, m)
    size = np.count_nonzero(sol.alpha)
    assert size == min(m, 4) or sol.reconstruction_error < 1e-10


# --- selection -----------------------------------------------------------------


def test_select_frames_examples():
    assert select_frames(np.array([0.9, 0.1, 0.5]), 2).tolist() == [0, 2]
    assert select_frames(np.array([0.3, 0.3, 0.3]), 2).tolist() == [0, 1]
    assert select_frames(np.array([-0.9, 0.1, 0.5]), 1).tolist() == [0]


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=30), st.integers(1, 30))
def test_select_frames_sort_oracle(values, m):
    alpha = np.array(values, dtype=float)
    m = min(m, alpha.size)
    ranked = sorted(range(alpha.size), key=lambda i: (-abs(alpha[i]), i))
    assert select_frames(alpha, m).tolist() == sorted(ranked[:m])


@pytest.mark.parametrize("n, s, spf, m", [(100, 10, 2, 5), (40, 14, 2, 1), (1, 10, 2, 1), (30, 10, 1, 3)])
def test_sampling_budget(n, s, spf, m):
    assert sampling_budget(n, s, spf) == m


def test_single_frame_segment():
    video = make_video(n=5, f=2, features=np.arange(10.0).reshape(5, 2))
    entries = sample_segment(video, Segment(3, 3, 0, 10.0))
    assert [(e.index, e.provenance) for e in entries] == [(3, "sampled")]


@pytest.mark.parametrize("method", ["llc", "sc", "omp"])
def test_sample_range_budget_and_bounds(small_video, method):
    res = sample_range(small_video, 100, 299, 10.0, method, spf=2, segment_id=4)
    idx = [e.index for e in res.entries]
    assert len(idx) == 10
    assert idx == sorted(set(idx))
    assert all(100 <= i <= 299 for i in idx)
    assert all(e.segment == 4 for e in res.entries)
    assert res.solve_seconds >= 0

"""Fit, verify, and loop behavior on small targets.

Heavy search workloads live in the acceptance suite; these tests keep
restart counts small and windows short so the whole file stays fast.
"""

from fractions import Fraction

import numpy as np
import pytest

from tnpur import (
    DegenerateInputError,
    MpsTensor,
    PurificationTensor,
    PurifySearchConfig,
    ZulcInstance,
    build_reduction,
    build_state_vector,
    fit_purification,
    purified_diagonal,
    semi_decision_loop,
    step_bound,
    theoretical_length_bound,
    verify_purification,
)

GHZ = MpsTensor.from_matrices([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])], mode="float")
PRODUCT = MpsTensor.from_matrices([[[0.5]], [[0.5]]], mode="float")

E01 = ZulcInstance.from_lists([
    [[0, 1, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
])


def test_bounds():
    assert theoretical_length_bound(1, 1) == 192
    assert step_bound(1, 1) == 96
    assert theoretical_length_bound(2, 1) == 4374
    assert step_bound(2, 1) == 1458
    assert theoretical_length_bound(2, 3) == theoretical_length_bound(3, 2)
    with pytest.raises(ValueError):
        theoretical_length_bound(0, 1)


def test_product_target_recovered():
    cfg = PurifySearchConfig(
        bond=1, d_env=2, lengths=(1, 2, 3, 4, 5, 6), restarts=8, tol=1e-10, seed=7
    )
    res = fit_purification(PRODUCT, cfg)
    assert res.found
    assert res.best_residual < 1e-10
    assert all(r < 1e-10 for r in res.residuals.values())
    # the environment-traced weights reproduce the probabilities
    w = [float(np.sum(np.abs(res.b.mats[i]) ** 2)) for i in range(2)]
    assert w[0] / w[1] == pytest.approx(1.0, rel=1e-4)


def test_ghz_target_recovered_loosely():
    # short window and loose tol keep this fast; the full-window fit
    # with the tight threshold runs in the acceptance suite
    cfg = PurifySearchConfig(
        bond=2, d_env=2, lengths=(1, 2, 3), restarts=4, tol=1e-6, seed=5
    )
    res = fit_purification(GHZ, cfg)
    assert res.found
    assert res.best_residual < 1e-6
    rep = verify_purification(GHZ, res.b, lengths=(1, 2, 3), tol=1e-5)
    assert rep.passed


def test_negative_target_bounded_away():
    # any candidate diagonal is componentwise nonnegative, so a target
    # with a negative weight in the window cannot be approached
    a = build_reduction(E01, mode="rational")
    cfg = PurifySearchConfig(bond=1, lengths=(1, 2), restarts=4, seed=3)
    res = fit_purification(a, cfg)
    assert not res.found
    assert res.best_residual >= 1e-3
    assert res.b is not None  # best candidate still reported


def test_default_env_dimension_is_bond_times_d():
    cfg = PurifySearchConfig(bond=2, lengths=(1,), restarts=1)
    assert cfg.env_dim(3) == 6
    assert PurifySearchConfig(bond=2, d_env=5, lengths=(1,), restarts=1).env_dim(3) == 5
    res = fit_purification(PRODUCT, PurifySearchConfig(bond=2, lengths=(1, 2), restarts=1, seed=0))
    assert res.b.d_env == 2 * PRODUCT.d


def test_fit_determinism_and_threads():
    cfg1 = PurifySearchConfig(
        bond=2, d_env=2, lengths=(1, 2), restarts=4, tol=1e-4, seed=11, threads=1
    )
    cfg4 = PurifySearchConfig(
        bond=2, d_env=2, lengths=(1, 2), restarts=4, tol=1e-4, seed=11, threads=4
    )
    r1 = fit_purification(GHZ, cfg1)
    r2 = fit_purification(GHZ, cfg1)
    r4 = fit_purification(GHZ, cfg4)
    assert r1.best_residual == r2.best_residual == r4.best_residual
    assert r1.winning_restart == r2.winning_restart == r4.winning_restart
    assert np.array_equal(np.asarray(r1.b.mats), np.asarray(r4.b.mats))


def test_fit_rejects_degenerate_target():
    zero = MpsTensor.from_matrices([[[0.0]], [[0.0]]], mode="float")
    with pytest.raises(DegenerateInputError):
        fit_purification(zero, PurifySearchConfig(bond=1, lengths=(1,), restarts=1))


def test_fit_rejects_bad_config():
    with pytest.raises(ValueError):
        fit_purification(PRODUCT, PurifySearchConfig(bond=1, lengths=(), restarts=1))
    with pytest.raises(ValueError):
        fit_purification(PRODUCT, PurifySearchConfig(bond=1, lengths=(1,), restarts=0))
    with pytest.raises(ValueError):
        fit_purification(PRODUCT, PurifySearchConfig(bond=0, lengths=(1,), restarts=1))


def test_verify_planted_exact_pair_is_exactly_zero():
    # with sum_e |B_(i,e)|^2 = p_i the candidate diagonal equals p
    # exactly, so the rational lane reports residuals that are true zeros
    a = MpsTensor.from_matrices(
        [[[Fraction(1, 4)]], [[Fraction(1, 2)]]], mode="rational"
    )
    b = PurificationTensor.from_matrices(
        [
            [[[Fraction(1, 2)]], [[0]]],
            [[[Fraction(1, 2)]], [[Fraction(1, 2)]]],
        ],
        mode="rational",
    )
    rep = verify_purification(a, b, lengths=(1, 2, 3, 4), tol=0)
    assert rep.mode == "rational"
    assert rep.passed
    for entry in rep.per_length.values():
        assert entry["residual"] == 0
        assert isinstance(entry["residual"], Fraction)


def test_verify_planted_ghz_square_roots():
    bmats = np.zeros((2, 1, 2, 2))
    bmats[0, 0] = np.diag([1.0, 0.0])
    bmats[1, 0] = np.diag([0.0, 1.0])
    b = PurificationTensor(bmats, "float")
    rep = verify_purification(GHZ, b, lengths=(1, 2, 3, 4, 5), tol=1e-12)
    assert rep.passed
    assert rep.max_residual() <= 1e-12
    # and the candidate diagonal is the GHZ diagonal itself
    for L in (2, 3):
        q = purified_diagonal(b, L).components
        p = build_state_vector(GHZ, L).components
        assert np.allclose(np.asarray(q), np.asarray(p))


def test_verify_perturbed_candidate_fails():
    rng = np.random.default_rng(0)
    bmats = np.zeros((2, 1, 2, 2))
    bmats[0, 0] = np.diag([1.0, 0.0])
    bmats[1, 0] = np.diag([0.0, 1.0])
    jitter = 1e-3 * rng.standard_normal(bmats.shape)
    b = PurificationTensor(bmats + jitter, "float")
    rep = verify_purification(GHZ, b, lengths=(1, 2, 3, 4, 5, 6), tol=1e-8)
    assert not rep.passed
    residuals = [rep.per_length[L]["residual"] for L in (1, 2, 3, 4, 5, 6)]
    assert all(0 < r < 1 for r in residuals)
    # residual grows with the ring size for a generic perturbation
    assert residuals[-1] > residuals[0]


def test_verify_unrelated_candidate_is_far():
    rng = np.random.default_rng(1)
    b = PurificationTensor(
        rng.standard_normal((2, 2, 2, 2)) + 1j * rng.standard_normal((2, 2, 2, 2)),
        "float",
    )
    rep = verify_purification(GHZ, b, lengths=(2, 4), tol=1e-6)
    assert not rep.passed
    assert rep.max_residual() > 1e-3


def test_verify_dimension_mismatch():
    b = PurificationTensor(np.zeros((3, 1, 1, 1)), "float")
    with pytest.raises(ValueError):
        verify_purification(GHZ, b)


def test_verify_gauge_invariance():
    # an isometry on the environment leg leaves the double layer alone
    rng = np.random.default_rng(2)
    raw = rng.standard_normal((2, 2, 2, 2)) + 1j * rng.standard_normal((2, 2, 2, 2))
    b = PurificationTensor(raw, "float")
    q, _ = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    rotated = PurificationTensor(np.einsum("ef,ifab->ieab", q, raw), "float")
    r1 = verify_purification(GHZ, b, lengths=(1, 2, 3, 4), tol=1e-6)
    r2 = verify_purification(GHZ, rotated, lengths=(1, 2, 3, 4), tol=1e-6)
    for L in (1, 2, 3, 4):
        d = abs(r1.per_length[L]["residual"] - r2.per_length[L]["residual"])
        assert d < 1e-10


def test_loop_case2_on_negative_reduction():
    a = build_reduction(E01, mode="rational")
    out = semi_decision_loop(a, max_bond=3, max_len=4, restarts=1, seed=1)
    assert out.status == "case2-witness"
    assert out.details["word"] == (0, 6)
    assert out.details["trace"] == -1
    assert out.details["length"] == 2
    witness_steps = [s for s in out.steps if s["outcome"] == "witness"]
    assert witness_steps and witness_steps[0]["step"] == 2


def test_loop_finds_product_purification():
    out = semi_decision_loop(PRODUCT, max_bond=2, max_len=3, restarts=4, seed=2)
    assert out.status == "purification-found"
    assert out.details["bond"] == 1
    assert out.details["max_verified_residual"] <= 1e-8


def test_loop_budget_exhausted():
    ident = ZulcInstance.from_lists(
        [np.eye(3, dtype=int).tolist()] + [[[0] * 3] * 3] * 4
    )
    a = build_reduction(ident, mode="rational")
    out = semi_decision_loop(a, max_bond=0, max_len=1, restarts=1)
    assert out.status == "budget-exhausted"
    assert out.steps[-1]["outcome"] == "clean"

"""Canonical decomposition checks.

Fixed-point conditions and state preservation are asserted directly
from the definitions (transfer map identities, normalized overlaps), so
no stored expected values are involved.
"""

import numpy as np
import pytest

from tnpur import (
    ModeError,
    MpsTensor,
    blocks_linearly_independent,
    build_state_vector,
    canonicalize,
    gauge_equivalent,
    injectivity_length,
    proportional_all_lengths,
    proportionality_length_bound,
    proportionality_step,
)


def channel(mats, x):
    return sum(m @ x @ m.conj().T for m in mats)


def adjoint_channel(mats, x):
    return sum(m.conj().T @ x @ m for m in mats)


def fidelity(a, c, L):
    sa = build_state_vector(a.to_float(), L).components
    sc = build_state_vector(c.to_float(), L).components
    na, nc = np.vdot(sa, sa).real, np.vdot(sc, sc).real
    if na == 0 or nc == 0:
        return 0.0
    return abs(np.vdot(sa, sc)) ** 2 / (na * nc)


def random_float_tensor(rng, d, D):
    mats = rng.standard_normal((d, D, D)) + 1j * rng.standard_normal((d, D, D))
    return MpsTensor(mats, "float")


GHZ = MpsTensor.from_matrices([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])], mode="float")


def assert_block_conditions(cf, tol=1e-10):
    for blk in cf.blocks:
        mats = np.asarray(blk.tensor.mats)
        D = blk.D
        e1 = channel(mats, np.eye(D))
        assert np.max(np.abs(e1 - np.eye(D))) < tol
        lam = np.diag(blk.fixed_point.astype(complex))
        back = adjoint_channel(mats, lam)
        assert np.max(np.abs(back - lam)) < tol
        diag = blk.fixed_point
        assert np.all(diag > 0)
        assert np.all(np.diff(diag) <= 1e-12)  # descending
        assert np.trace(lam).real == pytest.approx(1.0, abs=1e-10)


def test_ghz_splits_into_two_scalar_blocks():
    cf = canonicalize(GHZ)
    assert cf.block_count == 2
    assert sorted(b.D for b in cf.blocks) == [1, 1]
    assert cf.positive_weights
    assert_block_conditions(cf)
    recon = cf.reconstruct()
    for L in range(1, 9):
        assert fidelity(GHZ, recon, L) == pytest.approx(1.0, abs=1e-9)


def test_random_injective_tensor_single_block():
    rng = np.random.default_rng(0)
    for _ in range(10):
        t = random_float_tensor(rng, 2, 3)
        cf = canonicalize(t)
        assert cf.block_count == 1
        assert cf.blocks[0].multiplicity == 1
        assert_block_conditions(cf)
        recon = cf.reconstruct()
        for L in (1, 3, 6, 8):
            assert fidelity(t, recon, L) == pytest.approx(1.0, abs=1e-9)


def test_scaled_tensor_weight():
    rng = np.random.default_rng(1)
    t = random_float_tensor(rng, 2, 2)
    cf1 = canonicalize(t)
    scaled = MpsTensor(3.0 * np.asarray(t.mats), "float")
    cf2 = canonicalize(scaled)
    assert cf2.blocks[0].weight == pytest.approx(3.0 * cf1.blocks[0].weight, rel=1e-8)


def test_direct_sum_multiplicity_merge():
    rng = np.random.default_rng(2)
    t = random_float_tensor(rng, 2, 2)
    mats = np.zeros((2, 4, 4), dtype=complex)
    mats[:, :2, :2] = t.mats
    mats[:, 2:, 2:] = t.mats
    cf = canonicalize(MpsTensor(mats, "float"))
    assert cf.block_count == 1
    assert cf.blocks[0].multiplicity == 2
    recon = cf.reconstruct()
    for L in (1, 2, 4):
        assert fidelity(MpsTensor(mats, "float"), recon, L) == pytest.approx(
            1.0, abs=1e-9
        )


def test_block_diagonal_input_recovers_parts():
    rng = np.random.default_rng(3)
    a = random_float_tensor(rng, 2, 2)
    b = random_float_tensor(rng, 2, 3)
    mats = np.zeros((2, 5, 5), dtype=complex)
    mats[:, :2, :2] = a.mats
    mats[:, 2:, 2:] = b.mats
    t = MpsTensor(mats, "float")
    cf = canonicalize(t)
    assert cf.block_count == 2
    assert sorted(blk.D for blk in cf.blocks) == [2, 3]
    assert_block_conditions(cf)
    for L in (2, 4, 6):
        assert fidelity(t, cf.reconstruct(), L) == pytest.approx(1.0, abs=1e-9)


def test_hidden_block_structure_under_gauge():
    # conjugating by a random invertible matrix hides the block split
    rng = np.random.default_rng(4)
    mats = np.zeros((2, 3, 3), dtype=complex)
    mats[:, :1, :1] = random_float_tensor(rng, 2, 1).mats
    mats[:, 1:, 1:] = random_float_tensor(rng, 2, 2).mats
    g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    hidden = MpsTensor(
        np.asarray([g @ m @ np.linalg.inv(g) for m in mats]), "float"
    )
    cf = canonicalize(hidden)
    assert cf.block_count == 2
    assert_block_conditions(cf)
    for L in (2, 5, 8):
        assert fidelity(hidden, cf.reconstruct(), L) == pytest.approx(1.0, abs=1e-9)


def test_canonicalize_rejects_exact_mode():
    t = MpsTensor.from_matrices([[[1]], [[2]]], mode="rational")
    with pytest.raises(ModeError):
        canonicalize(t)


def test_injectivity_length_unitriangular_pair():
    t = MpsTensor.from_matrices(
        [[[1, 1], [0, 1]], [[1, 0], [1, 1]]], mode="float"
    )
    assert injectivity_length(t, L_max=15) == 2


def test_injectivity_length_commuting_family_never_injective():
    t = MpsTensor.from_matrices(
        [[[1, 0], [0, 1]], [[1, 1], [0, 1]]], mode="float"
    )
    assert injectivity_length(t, L_max=15) is None


def test_injectivity_length_random_within_bound():
    rng = np.random.default_rng(5)
    for D in (2, 3):
        for _ in range(20):
            t = random_float_tensor(rng, 2, D)
            L = injectivity_length(t, L_max=D**4 - 1)
            assert L is not None
            assert L <= D**4 - 1


def test_gauge_equivalent_planted():
    rng = np.random.default_rng(6)
    for _ in range(5):
        c = random_float_tensor(rng, 2, 3)
        q, _ = np.linalg.qr(
            rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        )
        phase = float(rng.uniform(0, 2 * np.pi))
        a = MpsTensor(
            np.exp(1j * phase) * np.asarray([q @ m @ q.conj().T for m in c.mats]),
            "float",
        )
        wit = gauge_equivalent(a, c)
        assert wit is not None
        u = wit.unitary
        assert np.max(np.abs(u @ u.conj().T - np.eye(3))) < 1e-8
        scale = np.exp(1j * wit.phase)
        for ma, mc in zip(a.mats, c.mats):
            assert np.max(np.abs(ma - scale * (u @ mc @ u.conj().T))) < 1e-6


def test_gauge_equivalent_rejects_unrelated():
    rng = np.random.default_rng(7)
    a = random_float_tensor(rng, 2, 2)
    c = random_float_tensor(rng, 2, 2)
    assert gauge_equivalent(a, c) is None


def test_blocks_linearly_independent():
    blocks = [
        MpsTensor.from_matrices([[[1.0]], [[0.0]]], mode="float"),
        MpsTensor.from_matrices([[[0.0]], [[1.0]]], mode="float"),
    ]
    assert blocks_linearly_independent(blocks, L=2)
    dup = [blocks[0], blocks[0]]
    assert not blocks_linearly_independent(dup, L=2)


def test_proportionality_bounds():
    assert proportionality_length_bound(1, 1) == 192
    assert proportionality_step(1, 1) == 96
    assert proportionality_length_bound(2, 1) == 4374
    assert proportionality_step(2, 1) == 1458
    assert proportionality_length_bound(2, 3) == proportionality_length_bound(3, 2)


def test_proportional_all_lengths_scalar_family():
    a = MpsTensor.from_matrices([[[1]], [[2]]], mode="rational")
    c = MpsTensor.from_matrices([[[3]], [[6]]], mode="rational")
    verdict = proportional_all_lengths(a, c, L_cap=200)
    assert verdict.status == "proportional-for-all"
    assert verdict.bound == 192
    assert verdict.checked == 192
    assert verdict.fraction == 1.0
    assert verdict.first_failure is None
    assert verdict.certified_step is not None


def test_proportional_all_lengths_detects_failure():
    a = MpsTensor.from_matrices([[[1]], [[2]]], mode="rational")
    c = MpsTensor.from_matrices([[[1]], [[3]]], mode="rational")
    verdict = proportional_all_lengths(a, c, L_cap=200)
    assert verdict.status == "fails-at-L"
    assert verdict.first_failure == 1
    ghz = GHZ
    prod = MpsTensor.from_matrices([[[0.5]], [[0.5]]], mode="float")
    v2 = proportional_all_lengths(ghz, prod, L_cap=50)
    assert v2.status == "fails-at-L"
    assert v2.first_failure == 2


def test_proportional_all_lengths_inconclusive_under_cap():
    a = MpsTensor.from_matrices([[[1]], [[2]]], mode="rational")
    c = MpsTensor.from_matrices([[[2]], [[4]]], mode="rational")
    verdict = proportional_all_lengths(a, c, L_cap=10)
    assert verdict.status == "inconclusive"
    assert verdict.checked == 10
    assert 0 < verdict.fraction < 1


def test_proportional_all_lengths_force_factorial_step():
    a = MpsTensor.from_matrices([[[1]], [[2]]], mode="rational")
    c = MpsTensor.from_matrices([[[3]], [[6]]], mode="rational")
    v1 = proportional_all_lengths(a, c, L_cap=200)
    v2 = proportional_all_lengths(a, c, L_cap=200, force_factorial=True)
    assert v2.status == v1.status == "proportional-for-all"
    assert v2.certified_step == 96

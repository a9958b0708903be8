"""Canonical decomposition of site tensors and gauge comparisons.

A float-mode site tensor decomposes, up to a basis change that leaves
every word trace intact, into a weighted direct sum of normal blocks:

    A_i  ~  (+)_j  lambda_j * B_i^j,     lambda_j > 0,

where each block satisfies the two fixed-point conditions

    sum_i B_i B_i^dag = 1,   and   sum_i B_i^dag Lam B_i = Lam

with Lam diagonal, positive, trace one.  Equal blocks are collected
into a multiplicity count.  The decomposition proceeds by repeatedly
finding positive-semidefinite fixed points of the transfer operator
X -> sum_i A_i X A_i^dag; a rank-deficient fixed point exposes an
invariant subspace and the tensor splits, a full-rank one fixes the
gauge.  Letters spanning a nilpotent family carry a state that is zero
at every length and are dropped.

The transfer operator of a degenerate tensor can fail to be
diagonalizable at its spectral radius; when no usable fixed point can
be extracted at the requested tolerance the decomposition raises
NumericError rather than guessing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, ModeError, NumericError, ResourceCapError
from .scalars import FLOAT
from .tensors import (
    MpsTensor,
    _products_exact,
    _stacked_products_float,
    dense_cap,
    matrix_power_trace,
    transfer_matrix,
)

__all__ = [
    "CanonicalBlock",
    "CanonicalForm",
    "GaugeWitness",
    "ProportionalityVerdict",
    "canonicalize",
    "block_sites",
    "injectivity_length",
    "gauge_equivalent",
    "blocks_linearly_independent",
    "proportional_all_lengths",
    "proportionality_length_bound",
    "proportionality_step",
]


# ---------------------------------------------------------------------------
# result types


@dataclass(frozen=True)
class CanonicalBlock:
    """One normal block: weight, normalised tensor, diagonal left fixed
    point (descending), and how many identical copies appear."""

    weight: float
    tensor: MpsTensor
    fixed_point: np.ndarray
    multiplicity: int = 1

    @property
    def D(self) -> int:
        return self.tensor.D


@dataclass(frozen=True)
class CanonicalForm:
    blocks: tuple[CanonicalBlock, ...]

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    @property
    def positive_weights(self) -> bool:
        return all(b.weight > 0 for b in self.blocks)

    def reconstruct(self) -> MpsTensor:
        """Assemble the weighted direct sum back into one float tensor."""
        if not self.blocks:
            raise DegenerateInputError("cannot reconstruct an empty canonical form")
        d = self.blocks[0].tensor.d
        total = sum(b.D * b.multiplicity for b in self.blocks)
        mats = np.zeros((d, total, total), dtype=complex)
        offset = 0
        for b in self.blocks:
            for _ in range(b.multiplicity):
                sl = slice(offset, offset + b.D)
                mats[:, sl, sl] = complex(b.weight) * b.tensor.mats
                offset += b.D
        return MpsTensor(mats, FLOAT)


@dataclass(frozen=True)
class GaugeWitness:
    """Certificate that A_i = exp(i*phase) U C_i U^dag for all letters."""

    unitary: np.ndarray
    phase: float


@dataclass(frozen=True)
class ProportionalityVerdict:
    """Outcome of a bounded all-lengths proportionality check.

    status is "proportional-for-all" when every length up to the
    theoretical bound was checked, "fails-at-L" on the first
    counterexample, and "inconclusive" when the cap stopped the loop
    early; fraction records how much of the bound was covered and
    certified_step the re-check stride that would certify the rest.
    """

    status: str
    first_failure: int | None
    checked: int
    bound: int
    fraction: float
    certified_step: int | None


# ---------------------------------------------------------------------------
# vec / channel helpers (column-stacking convention)


def _unvec(v: np.ndarray, n: int) -> np.ndarray:
    return v.reshape((n, n), order="F")


def _apply_channel(mats: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.einsum("iab,bc,idc->ad", mats, x, mats.conj())


def _spectral_radius(mats: np.ndarray) -> float:
    t = _transfer_float(mats)
    return float(np.max(np.abs(np.linalg.eigvals(t)))) if t.size else 0.0


def _transfer_float(mats: np.ndarray) -> np.ndarray:
    acc = None
    for i in range(mats.shape[0]):
        term = np.kron(mats[i].conj(), mats[i])
        acc = term if acc is None else acc + term
    return acc


def _mixed_transfer_float(amats: np.ndarray, cmats: np.ndarray) -> np.ndarray:
    acc = None
    for i in range(amats.shape[0]):
        term = np.kron(cmats[i].conj(), amats[i])
        acc = term if acc is None else acc + term
    return acc


# ---------------------------------------------------------------------------
# fixed-point extraction


def _hermitian_candidates(vecs: np.ndarray, sel: np.ndarray, n: int):
    for idx in sel:
        x = _unvec(vecs[:, idx], n)
        h = (x + x.conj().T) / 2
        ah = (x - x.conj().T) / 2j
        for cand in (h, ah):
            norm = float(np.max(np.abs(cand)))
            if norm > 1e-13:
                yield cand / norm


def _psd_part(h: np.ndarray, slack: float):
    """h rescued to a PSD matrix if it is one up to `slack`, else None.

    Tries both signs and clips tiny negative eigenvalues.
    """
    evals, evecs = np.linalg.eigh(h)
    top = float(max(evals[-1], -evals[0]))
    if top <= 0.0:
        return None
    if evals[-1] < -evals[0]:
        evals, h = -evals[::-1], -h
        evecs = evecs[:, ::-1]
    if evals[0] < -slack * top:
        return None
    clipped = np.clip(evals, 0.0, None)
    return (evecs * clipped) @ evecs.conj().T


def _cesaro_candidate(mats: np.ndarray, rho: float, dim: int, rounds: int = 240):
    """Windowed average of E^n(1)/rho^n; kills rotating peripheral parts
    exactly once the window length is a multiple of all their orders."""
    window = math.lcm(*range(1, dim + 1))
    x = np.eye(dim, dtype=complex)
    for _ in range(rounds):
        x = _apply_channel(mats, x) / rho
        scale = float(np.max(np.abs(x)))
        if scale == 0.0 or not np.isfinite(scale):
            return None
    acc = np.zeros_like(x)
    for _ in range(window):
        acc += x
        x = _apply_channel(mats, x) / rho
    acc /= window
    norm = float(np.max(np.abs(acc)))
    if norm < 1e-13 or not np.isfinite(norm):
        return None
    acc /= norm
    return (acc + acc.conj().T) / 2


def _psd_fixed_point(mats: np.ndarray, tmat: np.ndarray, rho: float, dim: int):
    """A PSD fixed point of the transfer map at its spectral radius.

    Candidates come from the Hermitian parts of the eigenvectors at the
    leading eigenvalue plus an averaged power iterate; each must pass a
    fixed-point residual test, and the one with the largest support
    wins.  Raises NumericError when nothing usable survives.
    """
    vals, vecs = np.linalg.eig(tmat)
    sel = np.nonzero(np.abs(vals - rho) <= max(1e-8 * rho, 1e-13))[0]
    accepted: list[tuple[int, np.ndarray]] = []

    def consider(h: np.ndarray):
        psd = _psd_part(h, 1e-7)
        if psd is None:
            return
        resid = float(
            np.max(np.abs(_apply_channel(mats, psd) - rho * psd))
        )
        if resid > 1e-8 * rho * float(np.max(np.abs(psd))):
            return
        evals = np.linalg.eigvalsh(psd)
        rank = int(np.sum(evals > 1e-10 * evals[-1]))
        accepted.append((rank, psd))

    for cand in _hermitian_candidates(vecs, sel, dim):
        consider(cand)
    if accepted:
        total = sum(p for _, p in accepted)
        consider(total / max(1.0, float(np.max(np.abs(total)))))
    else:
        ces = _cesaro_candidate(mats, rho, dim)
        if ces is not None:
            consider(ces)
    if not accepted:
        raise NumericError(
            "no positive fixed point of the transfer operator could be "
            "extracted; the tensor is too degenerate at this tolerance"
        )
    accepted.sort(key=lambda rp: rp[0])
    return accepted[-1][1]


def _second_fixed_direction(mats: np.ndarray, tmat: np.ndarray, dim: int):
    """For a gauged tensor (E(1) = 1) with a fixed space of dimension
    above one: a PSD, singular fixed point exposing an invariant
    subspace.  None when no reliable direction exists."""
    vals, vecs = np.linalg.eig(tmat)
    sel = np.nonzero(np.abs(vals - 1.0) <= 1e-7)[0]
    eye = np.eye(dim)
    for h in _hermitian_candidates(vecs, sel, dim):
        dev = h - (np.trace(h).real / dim) * eye
        if float(np.max(np.abs(dev))) < 1e-6:
            continue
        resid = float(np.max(np.abs(_apply_channel(mats, dev) - dev)))
        if resid > 1e-7 * float(np.max(np.abs(dev))):
            continue
        evals = np.linalg.eigvalsh(dev)
        shifted = dev - evals[0] * eye
        return shifted
    return None


def _split_on_support(mats: np.ndarray, x: np.ndarray, support_tol: float):
    """Split letters along the support of a singular PSD fixed point.
    Returns (inside, outside) sub-tensors in orthonormal bases."""
    evals, evecs = np.linalg.eigh(x)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    rank = int(np.sum(evals > support_tol * max(evals[0], 1e-300)))
    q = evecs[:, :rank]
    qp = evecs[:, rank:]
    inside = np.einsum("ba,ibc,cd->iad", q.conj(), mats, q)
    outside = np.einsum("ba,ibc,cd->iad", qp.conj(), mats, qp)
    return rank, inside, outside


# ---------------------------------------------------------------------------
# the decomposition


def canonicalize(
    t: MpsTensor,
    tol: float = 1e-10,
    support_tol: float = 1e-8,
) -> CanonicalForm:
    """Decompose a float tensor into weighted normal blocks.

    Every leaf satisfies both fixed-point conditions to within tol in
    max-entry norm; support decisions use support_tol as a relative
    rank threshold.  Weights are the positive square roots of each
    block's transfer spectral radius, so the reconstructed direct sum
    reproduces all word traces of the input.  Raises ModeError for
    exact tensors (convert with to_float first), DegenerateInputError
    for the zero tensor, and NumericError when a transfer operator is
    too degenerate to analyse.
    """
    if t.is_exact:
        raise ModeError("canonicalize operates in float mode; use to_float() first")
    scale = float(np.max(np.abs(t.mats)))
    if scale == 0.0:
        raise DegenerateInputError("the zero tensor has no canonical form")

    leaves: list[tuple[float, np.ndarray, np.ndarray]] = []

    def descend(mats: np.ndarray, carried: float, depth: int):
        dim = mats.shape[1]
        if dim == 0:
            return
        if depth > 4 * max(dim, 2):
            raise NumericError("canonical splitting did not terminate")
        local = float(np.max(np.abs(mats)))
        if local == 0.0:
            return
        tmat = _transfer_float(mats)
        rho = float(np.max(np.abs(np.linalg.eigvals(tmat))))
        if rho <= 1e-12 * local * local:
            return  # nilpotent family: zero state at every length
        x = _psd_fixed_point(mats, tmat, rho, dim)
        rank, inside, outside = _split_on_support(mats, x, support_tol)
        if rank < dim:
            descend(inside, carried, depth + 1)
            descend(outside, carried, depth + 1)
            return
        # full support: move to the gauge where E(1) = 1
        amats = mats
        weight = carried
        for _ in range(6):
            tmat = _transfer_float(amats)
            rho = float(np.max(np.abs(np.linalg.eigvals(tmat))))
            if rho <= 0.0:
                return
            x = _psd_fixed_point(amats, tmat, rho, dim)
            x = x / (np.trace(x).real / dim)
            evals, evecs = np.linalg.eigh(x)
            if evals[0] <= support_tol * evals[-1]:
                # support collapsed during refinement: split after all
                rank, inside, outside = _split_on_support(amats, x, support_tol)
                descend(inside, weight, depth + 1)
                descend(outside, weight, depth + 1)
                return
            w_half = (evecs * np.sqrt(evals)) @ evecs.conj().T
            w_inv = (evecs * (1.0 / np.sqrt(evals))) @ evecs.conj().T
            amats = np.einsum("ab,ibc,cd->iad", w_inv, amats, w_half) / math.sqrt(rho)
            weight *= math.sqrt(rho)
            dev = float(np.max(np.abs(_apply_channel(amats, np.eye(dim)) - np.eye(dim))))
            if dev <= tol / 4:
                break
        else:
            raise NumericError("right fixed point did not converge to the identity")
        tmat = _transfer_float(amats)
        fixed_dim = int(np.sum(np.abs(np.linalg.eigvals(tmat) - 1.0) <= 1e-7))
        if fixed_dim > 1:
            y = _second_fixed_direction(amats, tmat, dim)
            if y is None:
                raise NumericError(
                    "fixed space is degenerate but no splitting direction was found"
                )
            rank, inside, outside = _split_on_support(amats, y, support_tol)
            if 0 < rank < dim:
                descend(inside, weight, depth + 1)
                descend(outside, weight, depth + 1)
                return
            raise NumericError("degenerate fixed space did not split")
        leaves.append((weight, amats, tmat))

    descend(t.mats.astype(complex), 1.0, 0)

    blocks: list[list] = []
    for weight, amats, tmat in leaves:
        dim = amats.shape[1]
        lam = _left_fixed_point(tmat, dim, tol)
        evals, evecs = np.linalg.eigh(lam)
        order = np.argsort(evals)[::-1]
        evals, evecs = evals[order], evecs[:, order]
        if evals[-1] <= 1e-10:
            raise NumericError("left fixed point of a block is not positive")
        for j in range(dim):
            col = evecs[:, j]
            k = int(np.argmax(np.abs(col)))
            ph = col[k] / abs(col[k])
            evecs[:, j] = col / ph
        amats = np.einsum("ba,ibc,cd->iad", evecs.conj(), amats, evecs)
        resid_r = float(np.max(np.abs(_apply_channel(amats, np.eye(dim)) - np.eye(dim))))
        lam_d = np.diag(evals.astype(complex))
        resid_l = float(
            np.max(
                np.abs(
                    np.einsum("iba,bc,icd->ad", amats.conj(), lam_d, amats) - lam_d
                )
            )
        )
        if resid_r > 10 * tol or resid_l > 10 * tol:
            raise NumericError(
                f"block conditions verified only to {max(resid_r, resid_l):.2e}"
            )
        _absorb_block(blocks, weight, MpsTensor(amats, FLOAT), evals)

    blocks.sort(key=_block_sort_key)
    return CanonicalForm(
        tuple(
            CanonicalBlock(float(w), tensor, fp, mult)
            for w, tensor, fp, mult in blocks
        )
    )


def _left_fixed_point(tmat: np.ndarray, dim: int, tol: float) -> np.ndarray:
    vals, vecs = np.linalg.eig(tmat.conj().T)
    idx = int(np.argmin(np.abs(vals - 1.0)))
    if abs(vals[idx] - 1.0) > 1e-6:
        raise NumericError("no left fixed point at eigenvalue one")
    lam = _unvec(vecs[:, idx], dim)
    lam = (lam + lam.conj().T) / 2
    tr = np.trace(lam).real
    if abs(tr) < 1e-12:
        raise NumericError("left fixed point has vanishing trace")
    lam = lam / tr
    return lam


def _same_state(a: MpsTensor, c: MpsTensor, tol: float) -> bool:
    """Whether two (normalised) tensors carry identical states with
    constant one at every decisive length."""
    upto = (a.D + c.D) ** 2
    ta = transfer_matrix(a)
    tc = transfer_matrix(c)
    tac = transfer_matrix(a, c)
    pa = np.eye(ta.shape[0], dtype=complex)
    pc = np.eye(tc.shape[0], dtype=complex)
    pac = np.eye(tac.shape[0], dtype=complex)
    for _ in range(upto):
        pa = pa @ ta
        pc = pc @ tc
        pac = pac @ tac
        na, nc, g = np.trace(pa), np.trace(pc), np.trace(pac)
        s = max(abs(na), abs(nc), 1e-300)
        if abs(na - nc) > tol * s or abs(g - na) > tol * s:
            return False
    return True


def _absorb_block(blocks: list, weight: float, tensor: MpsTensor, fixed: np.ndarray):
    for item in blocks:
        w, t0, fp0, mult = item
        if t0.D != tensor.D:
            continue
        if abs(w - weight) > 1e-8 * max(abs(w), abs(weight)):
            continue
        if _same_state(t0, tensor, 1e-8):
            item[3] = mult + 1
            return
    blocks.append([weight, tensor, fixed, 1])


def _block_sort_key(item):
    w, tensor, fp, mult = item
    digest = np.round(
        np.concatenate([tensor.mats.real.ravel(), tensor.mats.imag.ravel()]), 10
    ).tobytes()
    return (-w, -tensor.D, -mult, digest)


# ---------------------------------------------------------------------------
# blocking, injectivity, gauge


def block_sites(t: MpsTensor, k: int, cap: int | None = None) -> MpsTensor:
    """Group k adjacent sites into one: the new tensor has d**k letters,
    one per word, whose matrices are the word products (row-major word
    order)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    limit = dense_cap() if cap is None else cap
    if t.d**k > limit:
        raise ResourceCapError(f"d**k = {t.d**k} exceeds the component cap {limit}")
    if t.is_exact:
        prods = _products_exact(t.mats, k)
        return MpsTensor(np.stack(prods), t.mode)
    return MpsTensor(_stacked_products_float(t.mats, k), FLOAT)


def injectivity_length(t: MpsTensor, L_max: int, tol: float = 1e-10) -> int | None:
    """Smallest L at which the word products span all D x D matrices,
    or None if that does not happen by L_max.

    Tracks the span of length-L products through an orthonormal basis;
    the span of length L+1 is generated by one more letter on the left,
    so the cost per step stays polynomial in D.  Returns early when the
    span stops moving, since it then never grows again.
    """
    if L_max < 1:
        raise ValueError("L_max must be at least 1")
    tf = t.to_float()
    d, D = tf.d, tf.D
    full = D * D
    scale = float(np.max(np.abs(tf.mats)))
    if scale == 0.0:
        return None
    mats = tf.mats / scale
    rows = mats.reshape(d, full)
    basis = _orth_rows(rows, tol)
    for L in range(1, L_max + 1):
        r = basis.shape[0]
        if r == full:
            return L
        if L == L_max:
            return None
        base_mats = basis.reshape(r, D, D)
        cand = np.einsum("iab,rbc->irac", mats, base_mats).reshape(d * r, full)
        new_basis = _orth_rows(cand, tol)
        if new_basis.shape[0] == r:
            resid = cand - (cand @ basis.conj().T) @ basis
            if float(np.max(np.abs(resid))) <= 1e-9:
                return None  # span is stationary and will never grow
        basis = new_basis
    return None


def _orth_rows(rows: np.ndarray, tol: float) -> np.ndarray:
    u, s, vh = np.linalg.svd(rows, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return vh[:0]
    rank = int(np.sum(s > max(tol * s[0], 1e-300)))
    return vh[:rank]


def gauge_equivalent(
    a: MpsTensor, c: MpsTensor, tol: float = 1e-8, check_injective: bool = True
) -> GaugeWitness | None:
    """Unitary-and-phase relation between two injective tensors.

    Returns a witness with A_i = exp(i*phase) U C_i U^dag verified to
    max-entry residual tol (relative to the entry scale), or None when
    the tensors are not related this way.  Phase candidates are read off
    the peripheral eigenvalues of the mixed transfer operator; for each
    candidate the intertwiner equation A_i X = exp(i*phase) X C_i is
    solved as a least-squares null vector and its polar part tested.
    Raises ValueError when either input is not injective by L = D**4-1.
    """
    af, cf = a.to_float(), c.to_float()
    if af.d != cf.d:
        raise ValueError(f"physical dimensions differ: {af.d} != {cf.d}")
    if check_injective:
        for name, tt in (("first", af), ("second", cf)):
            if injectivity_length(tt, max(tt.D**4 - 1, 1)) is None:
                raise ValueError(f"the {name} tensor is not injective")
    if af.D != cf.D:
        return None
    dim = af.D
    rho_a = _spectral_radius(af.mats)
    rho_c = _spectral_radius(cf.mats)
    if rho_a == 0.0 or rho_c == 0.0:
        return None
    if abs(rho_a - rho_c) > 1e-6 * max(rho_a, rho_c):
        return None
    rho = math.sqrt(rho_a * rho_c)
    scale = max(float(np.max(np.abs(af.mats))), float(np.max(np.abs(cf.mats))), 1e-300)
    mixed = _mixed_transfer_float(af.mats, cf.mats)
    vals = np.linalg.eigvals(mixed)
    peripheral = vals[np.abs(np.abs(vals) - rho) <= 1e-6 * rho]
    phases = sorted({round(float(np.angle(v)), 9) for v in peripheral})
    eye = np.eye(dim)
    for phi in phases:
        zeta = np.exp(1j * phi)
        rows = [
            np.kron(af.mats[i], eye) - zeta * np.kron(eye, cf.mats[i].T)
            for i in range(af.d)
        ]
        system = np.concatenate(rows, axis=0)
        _, _, vh = np.linalg.svd(system, full_matrices=False)
        x = vh[-1].conj().reshape(dim, dim)
        uu, _, vvh = np.linalg.svd(x)
        u = uu @ vvh
        resid = max(
            float(np.max(np.abs(af.mats[i] - zeta * (u @ cf.mats[i] @ u.conj().T))))
            for i in range(af.d)
        )
        if resid <= tol * scale:
            k = int(np.argmax(np.abs(u)))
            ph = u.ravel()[k] / abs(u.ravel()[k])
            return GaugeWitness(unitary=u / ph, phase=float(phi) % (2 * math.pi))
    return None


def blocks_linearly_independent(
    tensors: list[MpsTensor], L: int, tol: float = 1e-8
) -> bool:
    """Whether the states of the given tensors are linearly independent
    at ring size L, decided through the rank of their normalised Gram
    matrix.  A tensor whose state vanishes at L counts as dependent."""
    if not tensors:
        raise ValueError("need at least one tensor")
    d = tensors[0].d
    if any(t.d != d for t in tensors):
        raise ValueError("all tensors must share the physical dimension")
    fl = [t.to_float() for t in tensors]
    scaled = []
    for t in fl:
        rho = _spectral_radius(t.mats)
        if rho == 0.0:
            return False
        scaled.append(MpsTensor(t.mats / math.sqrt(rho), FLOAT))
    b = len(scaled)
    gram = np.zeros((b, b), dtype=complex)
    for j in range(b):
        for k in range(b):
            if k < j:
                gram[j, k] = np.conj(gram[k, j])
                continue
            gram[j, k] = matrix_power_trace(
                _mixed_transfer_float(scaled[k].mats, scaled[j].mats), L
            )
    norms = np.sqrt(np.abs(np.diag(gram).real))
    if np.any(norms <= 1e-150):
        return False
    gram = gram / np.outer(norms, norms)
    evals = np.linalg.eigvalsh((gram + gram.conj().T) / 2)
    rank = int(np.sum(evals > tol * max(float(evals[-1]), 1.0)))
    return rank == b


# ---------------------------------------------------------------------------
# all-lengths proportionality


def proportionality_length_bound(D: int, Dp: int) -> int:
    """Number of ring sizes that decide proportionality at every length."""
    if D < 1 or Dp < 1:
        raise ValueError("bond dimensions must be positive")
    return math.factorial(D) * math.factorial(Dp) * 3 * (D + Dp) ** 6


def proportionality_step(D: int, Dp: int) -> int:
    """Re-check stride sufficient once the full window has been checked."""
    if D < 1 or Dp < 1:
        raise ValueError("bond dimensions must be positive")
    return math.factorial(D) * math.factorial(Dp) * 3 * (D + Dp) ** 5


def _blocking_period(t: MpsTensor) -> int:
    cf = canonicalize(t.to_float())
    period = 1
    for b in cf.blocks:
        tmat = _transfer_float(b.tensor.mats)
        vals = np.linalg.eigvals(tmat)
        p = int(np.sum(np.abs(vals) >= 1.0 - 1e-6))
        period = math.lcm(period, max(p, 1))
    return period


def proportional_all_lengths(
    a: MpsTensor,
    c: MpsTensor,
    L_cap: int,
    tol: float = 1e-9,
    force_factorial: bool = False,
) -> ProportionalityVerdict:
    """Check proportionality of the two states at L = 1, 2, .. up to the
    theoretical bound or L_cap, whichever is smaller.

    Covering the whole bound upgrades the verdict to hold at every
    length.  certified_step then records the stride at which any longer
    window would have to be re-checked: by default it uses the product
    of the detected blocking periods of the two tensors; pass
    force_factorial=True for the period-free worst-case stride.
    Exact tensors are compared exactly, float tensors at relative
    tolerance tol after normalising both transfer operators.
    """
    if L_cap < 1:
        raise ValueError("L_cap must be at least 1")
    if a.d != c.d:
        raise ValueError(f"physical dimensions differ: {a.d} != {c.d}")
    bound = proportionality_length_bound(a.D, c.D)
    n = min(L_cap, bound)
    exact = a.is_exact and c.is_exact
    if exact:
        ta, tc, tac = transfer_matrix(a), transfer_matrix(c), transfer_matrix(a, c)
    else:
        af, cf = a.to_float(), c.to_float()
        sa, sc = _spectral_radius(af.mats), _spectral_radius(cf.mats)
        if sa > 0.0:
            af = MpsTensor(af.mats / math.sqrt(sa), FLOAT)
        if sc > 0.0:
            cf = MpsTensor(cf.mats / math.sqrt(sc), FLOAT)
        ta, tc, tac = transfer_matrix(af), transfer_matrix(cf), transfer_matrix(af, cf)
    pa = _eye_like(ta)
    pc = _eye_like(tc)
    pac = _eye_like(tac)
    failure = None
    for L in range(1, n + 1):
        pa, pc, pac = pa @ ta, pc @ tc, pac @ tac
        na, nc, g = np.trace(pa), np.trace(pc), np.trace(pac)
        if exact:
            na_r, nc_r = na.re, nc.re
            if na_r == 0:
                ok = True  # psi_a vanishes: proportional with constant zero
            elif nc_r == 0:
                ok = False
            else:
                ok = g.abs2() == na_r * nc_r
        else:
            na_r, nc_r = na.real, nc.real
            if na_r == 0.0:
                ok = True  # psi_a vanishes: proportional with constant zero
            elif nc_r == 0.0:
                ok = False
            else:
                ok = abs(abs(g) ** 2 / (na_r * nc_r) - 1.0) <= tol
        if not ok:
            failure = L
            break
    if failure is not None:
        return ProportionalityVerdict(
            status="fails-at-L",
            first_failure=failure,
            checked=failure,
            bound=bound,
            fraction=failure / bound,
            certified_step=None,
        )
    if n >= bound:
        if force_factorial:
            step = proportionality_step(a.D, c.D)
        else:
            try:
                period = math.lcm(
                    _blocking_period(a), _blocking_period(c)
                )
                step = period * 3 * (a.D + c.D) ** 5
            except (NumericError, DegenerateInputError):
                step = proportionality_step(a.D, c.D)
        return ProportionalityVerdict(
            status="proportional-for-all",
            first_failure=None,
            checked=n,
            bound=bound,
            fraction=1.0,
            certified_step=step,
        )
    return ProportionalityVerdict(
        status="inconclusive",
        first_failure=None,
        checked=n,
        bound=bound,
        fraction=n / bound,
        certified_step=None,
    )


def _eye_like(t: np.ndarray) -> np.ndarray:
    n = t.shape[0]
    if t.dtype == object:
        from .tensors import exact_eye

        return exact_eye(n)
    return np.eye(n, dtype=complex)

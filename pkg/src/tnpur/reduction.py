"""Reduction from integer matrix families to positivity of a classical state.

An instance is a list of five integer 3x3 matrices Y_1..Y_5.  The
reduction doubles each generator on the symmetric subspace of two copies
of C^3 (dimension 6), then appends a one-dimensional tracker corner and
two extra letters, giving a site tensor with d = 7 physical letters and
bond dimension D = 7:

    letters 0..4:  sym(Y_i (x) Y_i)  direct-sum  [1]
    letter 5:      |e_0><e_0|        direct-sum  [1]
    letter 6:      |e_0><e_0|        direct-sum  [-1]

Every word trace of the resulting tensor obeys a closed form in the
generators (see :func:`oracle_trace`), and the trace is negative for
some word exactly when some product of the Y_i has a zero in its upper
left corner, which is what positivity scanning hunts for.

Two constructions are available: "orthonormal" uses the normalised
symmetric basis (float mode), "rational" replaces the basis isometry by
a rational pair of maps (exact mode).  Both produce identical word
traces; the rational one keeps sign decisions exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ModeError
from .scalars import FLOAT, RATIONAL, RationalComplex
from .tensors import MpsTensor

N_GENERATORS = 5
CORNER_LETTER = 5
SIGN_LETTER = 6
PHYS_DIM = 7
BOND_DIM = 7

# symmetric-subspace basis order: pairs (i, j) with i <= j
_PAIRS = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]


@dataclass(frozen=True, eq=False)
class ZulcInstance:
    """Five integer 3x3 generators, stored exactly as Python ints."""

    ys: tuple

    @classmethod
    def from_lists(cls, mats: Sequence) -> "ZulcInstance":
        if len(mats) != N_GENERATORS:
            raise ValueError(f"expected {N_GENERATORS} generators, got {len(mats)}")
        ys = []
        for k, m in enumerate(mats):
            arr = np.empty((3, 3), dtype=object)
            if len(m) != 3:
                raise ValueError(f"generator {k} is not 3x3")
            for r in range(3):
                row = m[r]
                if len(row) != 3:
                    raise ValueError(f"generator {k} is not 3x3")
                for c in range(3):
                    x = row[c]
                    if isinstance(x, bool) or not isinstance(x, (int, np.integer)):
                        raise ValueError(
                            f"generator {k} entry ({r},{c}) is not an integer: {x!r}"
                        )
                    arr[r, c] = int(x)
            ys.append(arr)
        return cls(tuple(ys))

    def matrix(self, k: int) -> np.ndarray:
        return self.ys[k]

    def __repr__(self) -> str:
        return f"ZulcInstance({[y.tolist() for y in self.ys]!r})"


def random_instance(rng: np.random.Generator, bound: int = 3) -> ZulcInstance:
    """Uniform random instance with entries in [-bound, bound]."""
    raw = rng.integers(-bound, bound + 1, size=(N_GENERATORS, 3, 3))
    return ZulcInstance.from_lists(raw.tolist())


# ---------------------------------------------------------------------------
# symmetric-subspace maps


def sym_basis_isometry() -> np.ndarray:
    """The 6x9 isometry O onto the symmetric subspace (float mode).

    Rows follow the pair order (0,0), (0,1), (0,2), (1,1), (1,2), (2,2);
    off-diagonal pairs are normalised by 1/sqrt(2).  Satisfies
    O O^dag = identity on C^6 and O^dag O = the symmetric projector.
    """
    o = np.zeros((6, 9), dtype=float)
    s = 1.0 / math.sqrt(2.0)
    for r, (i, j) in enumerate(_PAIRS):
        if i == j:
            o[r, i * 3 + j] = 1.0
        else:
            o[r, i * 3 + j] = s
            o[r, j * 3 + i] = s
    return o


def sym_pair_maps() -> tuple[np.ndarray, np.ndarray]:
    """Rational substitutes (V, W) for the basis isometry.

    V sums the two coefficients of each unordered pair (no square
    roots), W averages them back, so that V W = identity on C^6 and
    W V = the symmetric projector, both exactly.  Conjugating a doubled
    generator by (V, W) therefore preserves all word traces of the
    orthonormal construction while staying inside the rationals.
    """
    v = np.zeros((6, 9), dtype=object)
    w = np.zeros((9, 6), dtype=object)
    half = Fraction(1, 2)
    for r, (i, j) in enumerate(_PAIRS):
        if i == j:
            v[r, i * 3 + j] = 1
            w[i * 3 + j, r] = 1
        else:
            v[r, i * 3 + j] = 1
            v[r, j * 3 + i] = 1
            w[i * 3 + j, r] = half
            w[j * 3 + i, r] = half
    return v, w


# ---------------------------------------------------------------------------
# the reduction tensor


def build_reduction(z: ZulcInstance, mode: str = "rational") -> MpsTensor:
    """Site tensor (d = 7, D = 7) encoding an instance.

    mode "rational" (default) produces an exact tensor through the
    rational pair maps; mode "orthonormal" uses the normalised symmetric
    basis and produces a float tensor.  Word traces agree between the
    two.
    """
    if mode == RATIONAL:
        v, w = sym_pair_maps()
        mats = []
        for k in range(N_GENERATORS):
            y = z.ys[k]
            doubled = v @ np.kron(y, y) @ w
            m = np.zeros((7, 7), dtype=object)
            m[:6, :6] = doubled
            m[6, 6] = 1
            mats.append(m)
        for sign in (1, -1):
            m = np.zeros((7, 7), dtype=object)
            m[0, 0] = 1
            m[6, 6] = sign
            mats.append(m)
        return MpsTensor.from_matrices(mats, mode=RATIONAL)
    if mode == "orthonormal":
        o = sym_basis_isometry()
        mats = []
        for k in range(N_GENERATORS):
            y = z.ys[k].astype(float)
            doubled = o @ np.kron(y, y) @ o.T
            m = np.zeros((7, 7), dtype=complex)
            m[:6, :6] = doubled
            m[6, 6] = 1.0
            mats.append(m)
        for sign in (1.0, -1.0):
            m = np.zeros((7, 7), dtype=complex)
            m[0, 0] = 1.0
            m[6, 6] = sign
            mats.append(m)
        return MpsTensor.from_matrices(mats, mode=FLOAT)
    raise ValueError(f"unknown reduction mode {mode!r}, expected 'rational' or 'orthonormal'")


# ---------------------------------------------------------------------------
# closed-form word traces


def _corner(z: ZulcInstance, segment: Sequence[int]) -> int:
    """Upper-left entry of the generator product along a segment."""
    if not segment:
        return 1
    m = z.ys[segment[0]]
    for letter in segment[1:]:
        m = m @ z.ys[letter]
    return m[0, 0]


def oracle_trace(z: ZulcInstance, word: Sequence[int]) -> Fraction:
    """Closed-form word trace of the reduction tensor, computed from the
    generators alone (independent of the tensor construction).

    For a word in the generator letters only, with Y the generator
    product along the word,

        trace = (tr(Y)^2 + tr(Y^2)) / 2 + 1,

    the first term being the trace of the doubled generator on the
    symmetric subspace and the +1 the tracker corner.  A word containing
    tracker letters splits, cyclically, into generator segments
    separated by tracker letters; each segment contributes the square of
    the upper-left corner of its generator product, and the corner
    branch contributes the product of the tracker signs:

        trace = prod_t corner(segment_t)^2 + prod_t sign_t.

    Letters 0..4 are generators, 5 carries sign +1, 6 carries sign -1.
    """
    w = tuple(int(x) for x in word)
    if not w:
        raise ValueError("words must have length at least 1")
    for letter in w:
        if not 0 <= letter < PHYS_DIM:
            raise ValueError(f"letter {letter} out of range for d={PHYS_DIM}")
    delims = [i for i, letter in enumerate(w) if letter >= N_GENERATORS]
    if not delims:
        m = z.ys[w[0]]
        for letter in w[1:]:
            m = m @ z.ys[letter]
        t1 = int(np.trace(m))
        t2 = int(np.trace(m @ m))
        return Fraction(t1 * t1 + t2, 2) + 1
    # rotate so the word ends on a delimiter, then split into segments
    p = delims[0]
    rotated = w[p + 1 :] + w[: p + 1]
    corner_product = 1
    sign_product = 1
    segment: list[int] = []
    for letter in rotated:
        if letter < N_GENERATORS:
            segment.append(letter)
        else:
            q = _corner(z, segment)
            corner_product *= q * q
            sign_product *= 1 if letter == CORNER_LETTER else -1
            segment = []
    return Fraction(corner_product + sign_product)


# ---------------------------------------------------------------------------
# the triangularizability promise


def _is_upper_triangular(m: np.ndarray, tol: float = 0.0) -> bool:
    n = m.shape[0]
    return all(abs(m[i, j]) <= tol for i in range(n) for j in range(n) if i > j)


def _common_eigvec(mats: list[np.ndarray], tol: float, rng: np.random.Generator):
    """A unit vector that is an eigenvector of every matrix, or None.

    A common eigenvector of the family is an eigenvector of every linear
    combination, so candidates are read off random combinations; each is
    accepted only if it passes the residual test against all matrices.
    """
    n = mats[0].shape[0]
    if n == 1:
        return np.ones(1, dtype=complex)
    scale = max(1.0, max(float(np.max(np.abs(m))) for m in mats))
    for _ in range(6):
        coeffs = rng.normal(size=len(mats)) + 1j * rng.normal(size=len(mats))
        combo = sum(c * m for c, m in zip(coeffs, mats))
        vals, vecs = np.linalg.eig(combo)
        order = np.lexsort((vals.imag, vals.real))
        for idx in order:
            v = vecs[:, idx]
            nv = np.linalg.norm(v)
            if nv == 0.0:
                continue
            v = v / nv
            ok = True
            for m in mats:
                mv = m @ v
                lam = np.vdot(v, mv)
                if np.linalg.norm(mv - lam * v) > tol * scale:
                    ok = False
                    break
            if ok:
                return v
    return None


def joint_triangularizer(z: ZulcInstance, tol: float = 1e-8):
    """Unitary Q with every Q^dag Y_k Q upper triangular, or None.

    Already-triangular families return the identity.  The search builds
    a flag one common eigenvector at a time; since it is numerical, None
    means "not found", not a proof that no triangularizer exists.  Any
    returned Q is verified: all below-diagonal entries of the rotated
    generators are at most tol relative to the entry scale.
    """
    ys = [y.astype(complex) for y in z.ys]
    if all(_is_upper_triangular(y) for y in ys):
        return np.eye(3, dtype=complex)
    rng = np.random.default_rng(0x5EED)
    scale = max(1.0, max(float(np.max(np.abs(y))) for y in ys))
    loose = max(tol, 1e-6)
    q_total = np.eye(3, dtype=complex)
    current = ys
    for step in (3, 2):
        v = _common_eigvec(current, loose, rng)
        if v is None:
            return None
        # unitary completion with v as the first column
        m = np.eye(step, dtype=complex)
        m[:, 0] = v
        q_step, _ = np.linalg.qr(m)
        # qr may flip the first column's phase; undo it
        phase = np.vdot(q_step[:, 0], v)
        q_step[:, 0] = q_step[:, 0] * phase
        embed = np.eye(3, dtype=complex)
        embed[3 - step :, 3 - step :] = q_step
        q_total = q_total @ embed
        rotated = [q_step.conj().T @ m_ @ q_step for m_ in current]
        current = [m_[1:, 1:] for m_ in rotated]
    rotated_full = [q_total.conj().T @ y @ q_total for y in ys]
    worst = max(
        abs(m[i, j]) for m in rotated_full for i in range(3) for j in range(3) if i > j
    )
    if worst > tol * scale:
        return None
    return q_total


def check_promise(z: ZulcInstance, tol: float = 1e-8) -> tuple[bool, np.ndarray | None]:
    """Convenience wrapper: (True, Q) when a triangularizer was found,
    (False, None) when the search was inconclusive."""
    q = joint_triangularizer(z, tol=tol)
    return (q is not None), q


# ---------------------------------------------------------------------------
# integer rescaling


def scale_to_integers(t: MpsTensor) -> MpsTensor:
    """Clear all denominators of an exact tensor by one global factor.

    Multiplying every matrix by the least common multiple of the entry
    denominators multiplies each length-L word trace by lcm**L > 0, so
    trace signs at every fixed length are unchanged.
    """
    if not t.is_exact:
        raise ModeError("scale_to_integers needs a rational-mode tensor")
    dens = [1]
    for m in t.mats:
        for x in m.ravel():
            dens.append(x.re.denominator)
            dens.append(x.im.denominator)
    factor = math.lcm(*dens)
    return t.scaled(factor) if factor != 1 else t

"""Core tensor types and contractions for translationally invariant states.

A site tensor is a family of d square matrices of size D.  On a ring of
L sites it defines, word by word, the cyclic traces

    psi(i_1 .. i_L) = tr(A[i_1] A[i_2] .. A[i_L]),

read either as amplitudes of a state vector or as diagonal weights of a
classical density operator.  A purification-form tensor carries an extra
environment index; tracing the environment out of its doubled layer
yields the diagonal it purifies.

Tensors come in two arithmetic modes: "float" (complex128) and
"rational" (exact complex rationals, see :mod:`tnpur.scalars`).  Every
operation here is pure; nothing mutates its inputs, so the functions are
safe to call from worker threads.

Words are tuples of 0-based letters in ``range(d)``.  Dense
constructions refuse to enumerate more than the component cap, which
defaults to 2**24 and can be overridden through the ``TNPUR_CAP``
environment variable.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DegenerateInputError, ModeError, ResourceCapError
from .scalars import FLOAT, MODES, RATIONAL, RationalComplex, to_rational_complex

DEFAULT_DENSE_CAP = 1 << 24

_conj_entry = np.frompyfunc(lambda x: x.conjugate(), 1, 1)
_to_complex_entry = np.frompyfunc(complex, 1, 1)
_to_exact_entry = np.frompyfunc(to_rational_complex, 1, 1)


def dense_cap() -> int:
    """Maximum number of components a dense construction may produce.

    Reads ``TNPUR_CAP`` from the environment on every call so tests can
    monkeypatch it; a malformed value raises ValueError.
    """
    raw = os.environ.get("TNPUR_CAP")
    if raw is None:
        return DEFAULT_DENSE_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ValueError(f"TNPUR_CAP must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise ValueError(f"TNPUR_CAP must be positive, got {cap}")
    return cap


# ---------------------------------------------------------------------------
# exact-array helpers


def exact_matrix(rows) -> np.ndarray:
    """Object array of RationalComplex entries from any nested sequence."""
    arr = np.asarray(rows, dtype=object)
    if arr.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    return _to_exact_entry(arr)


def exact_eye(n: int) -> np.ndarray:
    out = np.full((n, n), RationalComplex(0), dtype=object)
    for i in range(n):
        out[i, i] = RationalComplex(1)
    return out


def exact_zeros(n: int, m: int | None = None) -> np.ndarray:
    return np.full((n, m if m is not None else n), RationalComplex(0), dtype=object)


def conj_matrix(m: np.ndarray) -> np.ndarray:
    """Entrywise conjugate in either mode."""
    if m.dtype == object:
        return _conj_entry(m)
    return m.conj()


# ---------------------------------------------------------------------------
# tensor types


def _stack_matrices(matrices: Sequence, mode: str | None) -> tuple[np.ndarray, str]:
    if len(matrices) == 0:
        raise ValueError("a tensor needs at least one matrix")
    if mode is not None and mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if mode is None:
        flat = np.asarray(matrices[0], dtype=object).ravel()
        exact = any(isinstance(x, (RationalComplex, Fraction)) for x in flat)
        mode = RATIONAL if exact else FLOAT
    if mode == RATIONAL:
        mats = np.stack([exact_matrix(m) for m in matrices])
    else:
        mats = np.stack([np.asarray(m, dtype=complex) for m in matrices])
    if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
        raise ValueError("expected square matrices of equal size")
    return mats, mode


class MpsTensor:
    """Site tensor of a translationally invariant state: d matrices of size D."""

    __slots__ = ("mats", "mode")

    def __init__(self, mats: np.ndarray, mode: str):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
            raise ValueError("mats must have shape (d, D, D)")
        if mode == FLOAT:
            mats = np.array(mats, dtype=complex, order="C")
            mats.flags.writeable = False
        self.mats = mats
        self.mode = mode

    @classmethod
    def from_matrices(cls, matrices: Sequence, mode: str | None = None) -> "MpsTensor":
        """Build from a sequence of square matrices, inferring the mode.

        The mode is "rational" when any entry is already exact, "float"
        otherwise; pass ``mode`` explicitly to force a coercion.
        """
        mats, mode = _stack_matrices(matrices, mode)
        return cls(mats, mode)

    @property
    def d(self) -> int:
        return self.mats.shape[0]

    @property
    def D(self) -> int:
        return self.mats.shape[1]

    @property
    def is_exact(self) -> bool:
        return self.mode == RATIONAL

    def letter(self, i: int) -> np.ndarray:
        return self.mats[i]

    def to_float(self) -> "MpsTensor":
        if self.mode == FLOAT:
            return self
        return MpsTensor(_to_complex_entry(self.mats).astype(complex), FLOAT)

    def to_exact(self) -> "MpsTensor":
        """Exact copy; float entries convert losslessly (floats are dyadic)."""
        if self.mode == RATIONAL:
            return self
        return MpsTensor(_to_exact_entry(self.mats.astype(object)), RATIONAL)

    def scaled(self, factor) -> "MpsTensor":
        if self.mode == RATIONAL:
            f = to_rational_complex(factor)
            return MpsTensor(np.frompyfunc(lambda x: x * f, 1, 1)(self.mats), RATIONAL)
        return MpsTensor(self.mats * complex(factor), FLOAT)

    def __repr__(self) -> str:
        return f"MpsTensor(d={self.d}, D={self.D}, mode={self.mode!r})"


class PurificationTensor:
    """Purification-form site tensor: matrices B[i, e] of size D for each
    physical letter i and environment letter e."""

    __slots__ = ("mats", "mode")

    def __init__(self, mats: np.ndarray, mode: str):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        if mats.ndim != 4 or mats.shape[2] != mats.shape[3]:
            raise ValueError("mats must have shape (d, d_env, D, D)")
        if mode == FLOAT:
            mats = np.array(mats, dtype=complex, order="C")
            mats.flags.writeable = False
        self.mats = mats
        self.mode = mode

    @classmethod
    def from_matrices(cls, matrices: Sequence[Sequence], mode: str | None = None) -> "PurificationTensor":
        rows = [_stack_matrices(row, mode)[0] for row in matrices]
        if mode is None:
            flat = np.asarray(matrices[0][0], dtype=object).ravel()
            exact = any(isinstance(x, (RationalComplex, Fraction)) for x in flat)
            mode = RATIONAL if exact else FLOAT
        stacked = np.stack(rows)
        if mode == FLOAT:
            stacked = stacked.astype(complex)
        return cls(stacked, mode)

    @property
    def d(self) -> int:
        return self.mats.shape[0]

    @property
    def d_env(self) -> int:
        return self.mats.shape[1]

    @property
    def D(self) -> int:
        return self.mats.shape[2]

    @property
    def is_exact(self) -> bool:
        return self.mode == RATIONAL

    def matrix(self, i: int, e: int) -> np.ndarray:
        return self.mats[i, e]

    def to_float(self) -> "PurificationTensor":
        if self.mode == FLOAT:
            return self
        return PurificationTensor(_to_complex_entry(self.mats).astype(complex), FLOAT)

    def to_exact(self) -> "PurificationTensor":
        if self.mode == RATIONAL:
            return self
        return PurificationTensor(_to_exact_entry(self.mats.astype(object)), RATIONAL)

    def __repr__(self) -> str:
        return (
            f"PurificationTensor(d={self.d}, d_env={self.d_env}, "
            f"D={self.D}, mode={self.mode!r})"
        )


@dataclass(frozen=True)
class StateVector:
    """Dense vector of all d**L cyclic traces on a ring of L sites.

    Components are indexed by words in row-major order: the word
    (i_1, .., i_L) sits at position i_1*d**(L-1) + .. + i_L.
    """

    d: int
    L: int
    components: np.ndarray
    mode: str

    def component(self, word: Sequence[int]):
        if len(word) != self.L:
            raise ValueError(f"word length {len(word)} != L={self.L}")
        return self.components[word_index(word, self.d)]

    def norm_sq(self):
        """Squared 2-norm; exact (a Fraction) in rational mode."""
        if self.mode == RATIONAL:
            total = Fraction(0)
            for x in self.components:
                total += x.abs2()
            return total
        return float(np.vdot(self.components, self.components).real)

    def __len__(self) -> int:
        return len(self.components)


# ---------------------------------------------------------------------------
# words


def word_index(word: Sequence[int], d: int) -> int:
    idx = 0
    for letter in word:
        idx = idx * d + letter
    return idx


def index_word(idx: int, d: int, L: int) -> tuple[int, ...]:
    out = []
    for _ in range(L):
        idx, r = divmod(idx, d)
        out.append(r)
    return tuple(reversed(out))


def _check_word(word: Sequence[int], d: int) -> tuple[int, ...]:
    w = tuple(int(x) for x in word)
    if len(w) == 0:
        raise ValueError("words must have length at least 1")
    for letter in w:
        if not 0 <= letter < d:
            raise ValueError(f"letter {letter} out of range for d={d}")
    return w


# ---------------------------------------------------------------------------
# contractions


def word_trace(t: MpsTensor, word: Sequence[int]):
    """Cyclic trace tr(A[w_1] .. A[w_L]) of the site matrices along a word.

    Returns a complex number in float mode, a RationalComplex in
    rational mode.
    """
    w = _check_word(word, t.d)
    m = t.mats[w[0]]
    for letter in w[1:]:
        m = m @ t.mats[letter]
    tr = np.trace(m)
    return tr if t.is_exact else complex(tr)


def _stacked_products_float(mats: np.ndarray, k: int) -> np.ndarray:
    d, D, _ = mats.shape
    if k == 0:
        return np.eye(D, dtype=complex).reshape(1, D, D)
    out = mats
    for _ in range(k - 1):
        out = np.einsum("uab,ibc->uiac", out, mats).reshape(-1, D, D)
    return out


def _products_exact(mats: np.ndarray, k: int) -> list[np.ndarray]:
    d = mats.shape[0]
    D = mats.shape[1]
    if k == 0:
        return [exact_eye(D)]
    prods = [mats[i] for i in range(d)]
    for _ in range(k - 1):
        prods = [p @ mats[i] for p in prods for i in range(d)]
    return prods


def _trace_prod_exact(x: np.ndarray, y: np.ndarray):
    D = x.shape[0]
    acc = RationalComplex(0)
    for a in range(D):
        for b in range(D):
            acc = acc + x[a, b] * y[b, a]
    return acc


def build_state_vector(t: MpsTensor, L: int, cap: int | None = None) -> StateVector:
    """All d**L word traces on a ring of L sites, as a dense vector.

    Splits each word in half and sums tr(P Q) over prefix and suffix
    products, so memory stays at O(d**ceil(L/2) D^2) plus the output.
    Raises ResourceCapError when d**L exceeds the component cap.
    """
    if L < 1:
        raise ValueError("L must be at least 1")
    limit = dense_cap() if cap is None else cap
    n = t.d**L
    if n > limit:
        raise ResourceCapError(f"d**L = {n} exceeds the dense component cap {limit}")
    k1 = L // 2
    k2 = L - k1
    if t.is_exact:
        p1 = _products_exact(t.mats, k1)
        p2 = _products_exact(t.mats, k2)
        comps = np.empty(n, dtype=object)
        m = len(p2)
        for u, x in enumerate(p1):
            base = u * m
            for v, y in enumerate(p2):
                comps[base + v] = _trace_prod_exact(x, y)
        return StateVector(t.d, L, comps, RATIONAL)
    p1 = _stacked_products_float(t.mats, k1)
    p2 = _stacked_products_float(t.mats, k2)
    comps = np.einsum("uab,vba->uv", p1, p2).reshape(-1)
    return StateVector(t.d, L, comps, FLOAT)


def build_classical_mpdo(t: MpsTensor, L: int, cap: int | None = None) -> StateVector:
    """Diagonal of the length-L classical density operator defined by t.

    The operator is diagonal in the word basis with weights equal to the
    cyclic word traces, so this is the same dense vector as
    :func:`build_state_vector`, read as diagonal entries rather than
    amplitudes.
    """
    return build_state_vector(t, L, cap)


def double_layer(p: PurificationTensor) -> MpsTensor:
    """Environment-traced double layer of a purification-form tensor.

    For each physical letter i the result is sum_e B[i,e] (x) conj(B[i,e]),
    a D**2 tensor whose word traces are the diagonal weights of the state
    the purification describes: tr C_w = sum_env |tr B_(w,env)|^2 >= 0.
    """
    cs = []
    for i in range(p.d):
        acc = None
        for e in range(p.d_env):
            b = p.mats[i, e]
            term = np.kron(b, conj_matrix(b))
            acc = term if acc is None else acc + term
        cs.append(acc)
    mats = np.stack(cs)
    if p.mode == FLOAT:
        mats = mats.astype(complex)
    return MpsTensor(mats, p.mode)


def purified_diagonal(p: PurificationTensor, L: int, cap: int | None = None) -> StateVector:
    """Diagonal weights of the length-L state purified by p.

    Equals the partial trace over the environment of the projector onto
    the purifying vector, restricted to the word basis diagonal.
    """
    return build_state_vector(double_layer(p), L, cap)


def transfer_matrix(a: MpsTensor, c: MpsTensor | None = None) -> np.ndarray:
    """Matrix of the (mixed) transfer operator, sum_i conj(A[i]) (x) C[i].

    With c omitted this is the matrix of X -> sum_i A[i] X A[i]^dag in
    column-stacking convention; its trace powers give squared norms.
    With two tensors, tr(T**L) is the overlap <psi_a | psi_c> at size L.
    Exact when both tensors are exact, float otherwise.
    """
    if c is None:
        c = a
    if a.d != c.d:
        raise ValueError(f"physical dimensions differ: {a.d} != {c.d}")
    if not (a.is_exact and c.is_exact):
        a, c = a.to_float(), c.to_float()
    acc = None
    for i in range(a.d):
        term = np.kron(conj_matrix(a.mats[i]), c.mats[i])
        acc = term if acc is None else acc + term
    return acc


def matrix_power_trace(m: np.ndarray, L: int):
    """tr(m**L) by repeated squaring; works in either mode."""
    if L < 1:
        raise ValueError("L must be at least 1")
    if m.dtype != object:
        return complex(np.trace(np.linalg.matrix_power(m, L)))
    acc = None
    base = m
    e = L
    while e:
        if e & 1:
            acc = base if acc is None else acc @ base
        e >>= 1
        if e:
            base = base @ base
    return np.trace(acc)


def overlap(a: MpsTensor, c: MpsTensor, L: int):
    """Inner product <psi_a | psi_c> of the two length-L states.

    Computed as tr(T**L) of the mixed transfer matrix, so the cost is
    polynomial in the bond dimensions and linear in log L.
    """
    if L < 1:
        raise ValueError("L must be at least 1")
    t = transfer_matrix(a, c)
    return matrix_power_trace(t, L)


def proportional_at(a: MpsTensor, c: MpsTensor, L: int, tol: float = 1e-9):
    """Whether the two length-L states are proportional, with the constant.

    Tests the Cauchy-Schwarz equality |<a|c>|^2 = <a|a><c|c> and, when it
    holds, returns m with psi_a = m * psi_c, i.e. m = <c|a>/<c|c>.
    Exact decision when both tensors are exact; otherwise the equality is
    accepted at relative tolerance tol.  A zero psi_a is proportional to
    anything (m = 0); a zero psi_c raises DegenerateInputError.
    """
    exact = a.is_exact and c.is_exact
    g = overlap(a, c, L)
    na = overlap(a, a, L)
    nc = overlap(c, c, L)
    if exact:
        na_r, nc_r = na.re, nc.re
        if nc_r == 0:
            raise DegenerateInputError(f"psi_c vanishes at L={L}")
        if na_r == 0:
            return True, RationalComplex(0)
        if g.abs2() == na_r * nc_r:
            return True, g.conjugate() / nc_r
        return False, None
    na_r, nc_r = na.real, nc.real
    if nc_r == 0.0:
        raise DegenerateInputError(f"psi_c vanishes at L={L}")
    if na_r == 0.0:
        return True, 0j
    ratio = abs(g) ** 2 / (na_r * nc_r)
    if abs(ratio - 1.0) <= tol:
        return True, g.conjugate() / nc_r
    return False, None


# ---------------------------------------------------------------------------
# small operators


def flip_operator(d: int, exact: bool = False) -> np.ndarray:
    """Swap operator on a two-copy space: F |i,j> = |j,i>."""
    if exact:
        f = np.zeros((d * d, d * d), dtype=object)
        for i in range(d):
            for j in range(d):
                f[i * d + j, j * d + i] = 1
        return f
    f = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            f[i * d + j, j * d + i] = 1.0
    return f


def sym_projector(d: int, exact: bool = False) -> np.ndarray:
    """Orthogonal projector onto the symmetric subspace of two copies."""
    f = flip_operator(d, exact=exact)
    if exact:
        eye = np.zeros((d * d, d * d), dtype=object)
        for i in range(d * d):
            eye[i, i] = 1
        return np.frompyfunc(lambda x: x * Fraction(1, 2), 1, 1)(f + eye)
    return (f + np.eye(d * d)) / 2.0


def min_eig_hermitian(m: np.ndarray, tol: float = 1e-10) -> float:
    """Smallest eigenvalue of a Hermitian matrix (float mode).

    Verifies Hermiticity up to max-entry deviation tol and raises
    ValueError otherwise; degenerate spectra are fine.
    """
    m = np.asarray(m)
    if m.dtype == object:
        raise ModeError("min_eig_hermitian operates on float-mode matrices")
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    dev = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if dev > tol:
        raise ValueError(f"matrix is not Hermitian: max deviation {dev:.3e} > {tol:.3e}")
    h = (m + m.conj().T) / 2.0
    return float(np.linalg.eigvalsh(h)[0])

"""Scanning cyclic words for negative weights.

A classical state assigns each length-L word the weight tr(A_w).  The
scanners walk L = 1, 2, .. and enumerate one representative per cyclic
class (necklaces, in lexicographic order), looking for a negative
weight.  A hit is reported as a witness word; a clean scan only says
"all nonnegative up to the cap", never more, because no finite scan can
certify positivity at every length.

Sign decisions default to exact arithmetic.  Exact tensors with real
entries are rescaled to integer matrices first (a positive global
factor per length, so signs are unchanged), which makes the inner loop
plain integer arithmetic.  Witnesses found in float mode are re-checked
exactly before being reported.

Scanning partitions each length's necklace list into contiguous chunks,
one per worker; the reported witness is the lexicographically first
negative word at the first bad length, independent of the worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import ResourceCapError
from .reduction import scale_to_integers
from .tensors import MpsTensor, build_state_vector, dense_cap, index_word, word_trace

STATUS_CLEAN = "all-nonnegative-up-to-cap"
STATUS_WITNESS = "negative-witness"


def euler_phi(n: int) -> int:
    result = n
    p = 2
    m = n
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def necklace_count(d: int, L: int) -> int:
    """Number of cyclic classes of length-L words over d letters."""
    total = 0
    for k in range(1, L + 1):
        if L % k == 0:
            total += euler_phi(k) * d ** (L // k)
    return total // L


def necklace_words(d: int, L: int) -> Iterator[tuple[int, ...]]:
    """Lexicographically smallest representative of every cyclic class.

    Classic recursive pre-necklace generation; yields in increasing
    lexicographic order.
    """
    if L < 1:
        raise ValueError("L must be at least 1")
    a = [0] * (L + 1)

    def gen(t: int, p: int):
        if t > L:
            if L % p == 0:
                yield tuple(a[1 : L + 1])
        else:
            a[t] = a[t - p]
            yield from gen(t + 1, p)
            for j in range(a[t - p] + 1, d):
                a[t] = j
                yield from gen(t + 1, t)

    yield from gen(1, 1)


@dataclass(frozen=True)
class PositivityReport:
    """Outcome of a scan.

    status is "negative-witness" or "all-nonnegative-up-to-cap";
    witness (when present) is the lexicographically first negative word
    at the first bad length, witness_trace its exact weight, and
    word_count the number of cyclic representatives at all completed
    lengths.
    """

    status: str
    witness: tuple[int, ...] | None
    witness_trace: Fraction | float | None
    first_length: int | None
    lengths_scanned: tuple[int, int]
    word_count: int

    @property
    def found(self) -> bool:
        return self.status == STATUS_WITNESS


def _real_integer_matrices(t: MpsTensor) -> list[np.ndarray] | None:
    """Integer-entry copies of an exact tensor's matrices, or None if
    any entry has an imaginary part.  Obtained by one positive global
    rescale, so trace signs per length are those of the original."""
    for m in t.mats:
        for x in m.ravel():
            if x.im:
                return None
    scaled = scale_to_integers(t)
    out = []
    for m in scaled.mats:
        arr = np.empty(m.shape, dtype=object)
        for idx, x in np.ndenumerate(m):
            arr[idx] = int(x.re)
        out.append(arr)
    return out


def _int_word_trace(mats: Sequence[np.ndarray], word: Sequence[int]) -> int:
    m = mats[word[0]]
    for letter in word[1:]:
        m = m @ mats[letter]
    return int(np.trace(m))


def _chunks(n: int, k: int) -> list[tuple[int, int]]:
    k = max(1, min(k, n)) if n else 1
    step = -(-n // k)
    return [(lo, min(lo + step, n)) for lo in range(0, n, step)] if n else []


def scan_classical(
    t: MpsTensor,
    L_max: int,
    exact: bool = True,
    tol: float = 1e-9,
    threads: int = 1,
    cap: int | None = None,
) -> PositivityReport:
    """Scan lengths 1..L_max for a word with negative weight.

    With exact=True (the default) every sign decision is made in
    rational arithmetic, converting a float tensor losslessly first.
    With exact=False the decision threshold at length L is
    tol * D * B**L with B the largest matrix 2-norm, and any candidate
    is still re-verified exactly before it is reported; candidates that
    fail re-verification are skipped.

    Raises ResourceCapError when d**L_max exceeds the component cap.
    """
    if L_max < 1:
        raise ValueError("L_max must be at least 1")
    if threads < 1:
        raise ValueError("threads must be at least 1")
    limit = dense_cap() if cap is None else cap
    if t.d**L_max > limit:
        raise ResourceCapError(
            f"d**L_max = {t.d**L_max} exceeds the enumeration cap {limit}"
        )

    d = t.d
    t_exact = t.to_exact()
    int_mats = _real_integer_matrices(t_exact) if exact else None
    bound = 1.0
    if not exact:
        tf = t.to_float()
        bound = max(1.0, max(float(np.linalg.norm(m, 2)) for m in tf.mats))

    def scan_chunk(words: list[tuple[int, ...]], L: int):
        """First verified negative word in this chunk, with its exact trace."""
        thr = 0.0 if exact else tol * t.D * bound**L
        for w in words:
            if exact:
                if int_mats is not None:
                    if _int_word_trace(int_mats, w) < 0:
                        val = word_trace(t_exact, w)
                        return w, val.re
                else:
                    val = word_trace(t_exact, w)
                    if val.im:
                        raise ValueError(
                            f"word {w} has non-real weight; not a classical state"
                        )
                    if val.re < 0:
                        return w, val.re
            else:
                val = word_trace(tf, w)
                if abs(val.imag) > thr:
                    raise ValueError(
                        f"word {w} has non-real weight; not a classical state"
                    )
                if val.real < -thr:
                    check = word_trace(t_exact, w)
                    if check.im == 0 and check.re < 0:
                        return w, check.re
        return None

    word_count = 0
    for L in range(1, L_max + 1):
        words = list(necklace_words(d, L))
        word_count += len(words)
        spans = _chunks(len(words), threads)
        if threads == 1 or len(spans) <= 1:
            candidates = [scan_chunk(words, L)]
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futures = [
                    pool.submit(scan_chunk, words[lo:hi], L) for lo, hi in spans
                ]
                candidates = [f.result() for f in futures]
        hits = [c for c in candidates if c is not None]
        if hits:
            w, val = min(hits, key=lambda c: c[0])
            return PositivityReport(
                status=STATUS_WITNESS,
                witness=w,
                witness_trace=val,
                first_length=L,
                lengths_scanned=(1, L),
                word_count=word_count,
            )
    return PositivityReport(
        status=STATUS_CLEAN,
        witness=None,
        witness_trace=None,
        first_length=None,
        lengths_scanned=(1, L_max),
        word_count=word_count,
    )


def scan_general(
    t: MpsTensor,
    L_max: int,
    tol: float = 1e-9,
    cap: int | None = None,
) -> PositivityReport:
    """Spectral scan of the diagonal operator at each length.

    Builds the dense diagonal, checks it is real (relative to its
    largest entry), and reports the first length whose smallest entry
    drops below -tol * max|entry|.  The witness is re-verified exactly.
    """
    if L_max < 1:
        raise ValueError("L_max must be at least 1")
    limit = dense_cap() if cap is None else cap
    if t.d**L_max > limit:
        raise ResourceCapError(
            f"d**L_max = {t.d**L_max} exceeds the enumeration cap {limit}"
        )
    tf = t.to_float()
    t_exact = t.to_exact()
    word_count = 0
    for L in range(1, L_max + 1):
        diag = build_state_vector(tf, L, cap=limit).components
        word_count += len(diag)
        scale = max(1.0, float(np.max(np.abs(diag)))) if len(diag) else 1.0
        if float(np.max(np.abs(diag.imag))) > tol * scale:
            raise ValueError(f"diagonal at L={L} is not real; not a classical state")
        thr = tol * scale
        order = np.nonzero(diag.real < -thr)[0]
        for idx in order:
            w = index_word(int(idx), t.d, L)
            check = word_trace(t_exact, w)
            if check.im == 0 and check.re < 0:
                return PositivityReport(
                    status=STATUS_WITNESS,
                    witness=w,
                    witness_trace=check.re,
                    first_length=L,
                    lengths_scanned=(1, L),
                    word_count=word_count,
                )
    return PositivityReport(
        status=STATUS_CLEAN,
        witness=None,
        witness_trace=None,
        first_length=None,
        lengths_scanned=(1, L_max),
        word_count=word_count,
    )


def extend_witness(
    t: MpsTensor, word: Sequence[int], pad: Sequence[int], repeats: int
) -> bool:
    """Whether a witness stays negative under appended padding blocks.

    Checks, exactly, that word + pad * j has negative weight for every
    j = 1..repeats.  Raises ValueError if word is not itself a negative
    witness.
    """
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    t_exact = t.to_exact()
    w = tuple(int(x) for x in word)
    p = tuple(int(x) for x in pad)
    base = word_trace(t_exact, w)
    if base.im != 0 or base.re >= 0:
        raise ValueError(f"word {w} is not a negative witness (weight {base!r})")
    for j in range(1, repeats + 1):
        val = word_trace(t_exact, w + p * j)
        if val.im != 0 or val.re >= 0:
            return False
    return True


def heuristic_negative_search(
    t: MpsTensor,
    rng: np.random.Generator,
    samples: int = 2000,
    min_len: int = 1,
    max_len: int = 12,
    bias_letter: int | None = None,
    bias: float = 4.0,
):
    """Randomized hunt for a negative word, longer than a dense scan allows.

    Draws words with lengths uniform in [min_len, max_len], letters
    i.i.d. with bias_letter weighted `bias` times the others, and
    returns the first (word, exact trace) hit or None.  Deterministic
    given the generator state.
    """
    if not 1 <= min_len <= max_len:
        raise ValueError("need 1 <= min_len <= max_len")
    d = t.d
    weights = np.ones(d)
    if bias_letter is not None:
        if not 0 <= bias_letter < d:
            raise ValueError(f"bias letter {bias_letter} out of range for d={d}")
        weights[bias_letter] = bias
    probs = weights / weights.sum()
    t_exact = t.to_exact()
    for _ in range(samples):
        L = int(rng.integers(min_len, max_len + 1))
        word = tuple(int(x) for x in rng.choice(d, size=L, p=probs))
        val = word_trace(t_exact, word)
        if val.im == 0 and val.re < 0:
            return word, val.re
    return None

"""Power sums of finite multisets and proportionality of weighted families.

The trace of the L-th power of a diagonalisable operator is the L-th
power sum of its eigenvalue multiset, so questions about traces at all
ring sizes reduce to identities between power sums.  This module
supplies the conversions between power sums, elementary symmetric
polynomials and root multisets, and the finite cross-product test that
decides whether two families of multisets are related by one common
constant per length.

All routines accept exact scalars (ints, Fractions, RationalComplex)
or machine complex numbers and stay in the arithmetic they are given;
only root extraction is inherently floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import NumericError
from .scalars import RationalComplex

__all__ = [
    "power_sums",
    "elementary_from_power",
    "charpoly_from_power_sums",
    "multiset_from_power_sums",
    "first_nonzero_power",
    "PowerSumFamily",
    "proportional_powersum_families",
]


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, RationalComplex)) and not isinstance(x, bool)


def _div(x, k: int):
    """x / k without silently leaving exact arithmetic."""
    if isinstance(x, RationalComplex):
        return x / k
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return Fraction(x) / k
    return x / k


def power_sums(xs: Sequence, count: int) -> list:
    """s_k = sum_i xs[i]**k for k = 1..count."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    pows = list(xs)
    out = []
    for _ in range(count):
        out.append(sum(pows))
        pows = [p * x for p, x in zip(pows, xs)]
    return out


def elementary_from_power(s: Sequence) -> list:
    """Elementary symmetric polynomials e_1..e_n from power sums s_1..s_n.

    Newton's recursion  k e_k = sum_{i=1..k} (-1)**(i-1) e_{k-i} s_i,
    carried out in the arithmetic of the inputs (exact stays exact).
    """
    n = len(s)
    es: list = [1]
    for k in range(1, n + 1):
        acc = None
        sign = 1
        for i in range(1, k + 1):
            term = es[k - i] * s[i - 1]
            term = term if sign > 0 else -term
            acc = term if acc is None else acc + term
            sign = -sign
        es.append(_div(acc, k))
    return es[1:]


def charpoly_from_power_sums(s: Sequence) -> list:
    """Monic polynomial with the prescribed power sums, as descending
    coefficients [1, -e_1, e_2, .., (-1)**n e_n]."""
    es = elementary_from_power(s)
    out = [1]
    sign = -1
    for e in es:
        out.append(sign * e)
        sign = -sign
    return out


def multiset_from_power_sums(s: Sequence) -> list[complex]:
    """Recover the n roots from s_1..s_n, sorted by (real, imag).

    Root extraction happens in floating point even for exact inputs;
    exact callers who want to stay exact should stop at
    :func:`charpoly_from_power_sums` and factor the polynomial
    themselves.
    """
    coeffs = [complex(c) for c in charpoly_from_power_sums(s)]
    if len(coeffs) == 1:
        return []
    roots = np.roots(coeffs)
    return sorted((complex(r) for r in roots), key=lambda z: (z.real, z.imag))


def first_nonzero_power(xs: Sequence, tol: float = 1e-9) -> int:
    """Smallest L with sum_i xs[i]**L nonzero; entries must be nonzero.

    For n nonzero values some s_L with L <= n is nonzero, so the search
    is finite.  Exact inputs are decided exactly; float inputs use the
    threshold tol * max|x|**L.  A zero entry raises ValueError.
    """
    vals = list(xs)
    if not vals:
        raise ValueError("need at least one value")
    exact = all(_is_exact(x) for x in vals)
    for x in vals:
        if (exact and not x) or (not exact and complex(x) == 0j):
            raise ValueError("entries must be nonzero")
    big = max(abs(complex(x)) for x in vals)
    pows = vals
    for L in range(1, len(vals) + 1):
        total = sum(pows)
        if exact:
            if total:
                return L
        else:
            if abs(complex(total)) > tol * big**L:
                return L
        pows = [p * x for p, x in zip(pows, vals)]
    raise NumericError(
        "all power sums up to the multiset size vanish numerically; "
        "entries are too close to a cancelling configuration"
    )


@dataclass(frozen=True)
class PowerSumFamily:
    """Paired weight multisets (mu_alpha, nu_alpha), one pair per group,
    zero-padded to a common length within each group."""

    groups: tuple[tuple[tuple, tuple], ...]

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[Sequence, Sequence]]) -> "PowerSumFamily":
        groups = []
        for mu, nu in pairs:
            mu, nu = list(mu), list(nu)
            r = max(len(mu), len(nu))
            if r == 0:
                raise ValueError("a group needs at least one weight")
            exact = all(_is_exact(x) for x in mu + nu)
            pad = 0 if exact else 0j
            mu = mu + [pad] * (r - len(mu))
            nu = nu + [pad] * (r - len(nu))
            groups.append((tuple(mu), tuple(nu)))
        if not groups:
            raise ValueError("need at least one group")
        return cls(tuple(groups))

    @property
    def total_size(self) -> int:
        return sum(len(mu) for mu, _ in self.groups)

    @property
    def is_exact(self) -> bool:
        return all(
            _is_exact(x) for mu, nu in self.groups for x in list(mu) + list(nu)
        )


def proportional_powersum_families(
    family: PowerSumFamily, window: int | None = None, tol: float = 1e-9
) -> bool | None:
    """Does one constant per length relate all the group power sums?

    Tests, for L = 1..window, that the cross products

        S_mu[a](L) * S_nu[b](L) == S_mu[b](L) * S_nu[a](L)

    agree for all group pairs and that no length forces the impossible
    (all nu-sums zero while some mu-sum is not).  The window must cover
    at least total_size**2 lengths, which is decisive for such families;
    a larger window is allowed.  Returns True/False, or None when every
    length either held with a forced zero constant or gave no
    information, so no nonzero constant was ever pinned down.
    """
    r0 = family.total_size
    minimum = r0 * r0
    if window is None:
        window = minimum
    if window < minimum:
        raise ValueError(f"window {window} is below the decisive size {minimum}")
    exact = family.is_exact
    mus = [list(mu) for mu, _ in family.groups]
    nus = [list(nu) for _, nu in family.groups]
    mu_pows = [list(mu) for mu in mus]
    nu_pows = [list(nu) for nu in nus]
    big = 1.0
    if not exact:
        entries = [abs(complex(x)) for row in mus + nus for x in row]
        big = max([1.0] + entries)
    saw_nonzero_constant = False
    saw_zero_constant = False
    for L in range(1, window + 1):
        smu = [sum(p) for p in mu_pows]
        snu = [sum(p) for p in nu_pows]
        if exact:
            zero_mu = [not x for x in smu]
            zero_nu = [not x for x in snu]
        else:
            thr = tol * max(len(r) for r in mus) * big**L
            zero_mu = [abs(complex(x)) <= thr for x in smu]
            zero_nu = [abs(complex(x)) <= thr for x in snu]
        for a in range(len(smu)):
            for b in range(a + 1, len(smu)):
                lhs = smu[a] * snu[b]
                rhs = smu[b] * snu[a]
                if exact:
                    if lhs != rhs:
                        return False
                else:
                    if abs(complex(lhs) - complex(rhs)) > (
                        tol * (max(len(r) for r in mus) * big**L) ** 2
                    ):
                        return False
        if all(zero_nu):
            if not all(zero_mu):
                return False
            # no information at this length
        elif all(zero_mu):
            saw_zero_constant = True  # constant forced to zero here
        else:
            saw_nonzero_constant = True
        mu_pows = [[p * x for p, x in zip(row, base)] for row, base in zip(mu_pows, mus)]
        nu_pows = [[p * x for p, x in zip(row, base)] for row, base in zip(nu_pows, nus)]
    if saw_zero_constant or not saw_nonzero_constant:
        return None
    return True

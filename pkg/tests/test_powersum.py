import itertools
from fractions import Fraction

import numpy as np
import pytest

from tnpur import (
    NumericError,
    PowerSumFamily,
    charpoly_from_power_sums,
    elementary_from_power,
    first_nonzero_power,
    multiset_from_power_sums,
    power_sums,
    proportional_powersum_families,
)


def brute_power_sums(xs, count):
    return [sum(x**k for x in xs) for k in range(1, count + 1)]


def brute_elementary(xs):
    """e_k by direct expansion over subsets; exact for exact inputs."""
    n = len(xs)
    out = []
    for k in range(1, n + 1):
        total = 0
        for combo in itertools.combinations(xs, k):
            prod = 1
            for x in combo:
                prod *= x
            total += prod
        out.append(total)
    return out


def test_power_sums_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(20):
        n = int(rng.integers(1, 6))
        xs = [Fraction(int(a), int(b)) for a, b in
              zip(rng.integers(-5, 6, n), rng.integers(1, 5, n))]
        assert power_sums(xs, 2 * n) == brute_power_sums(xs, 2 * n)


def test_newton_identities_exact():
    rng = np.random.default_rng(1)
    for _ in range(25):
        n = int(rng.integers(1, 7))
        xs = [int(v) for v in rng.integers(-4, 5, n)]
        s = power_sums(xs, n)
        e = elementary_from_power(s)
        assert e == brute_elementary(xs)


def test_newton_identities_complex_float():
    rng = np.random.default_rng(2)
    xs = list(rng.standard_normal(5) + 1j * rng.standard_normal(5))
    e = elementary_from_power(power_sums(xs, 5))
    want = brute_elementary(xs)
    for got, ref in zip(e, want):
        assert complex(got) == pytest.approx(complex(ref), rel=1e-9)


def test_charpoly_matches_numpy():
    rng = np.random.default_rng(3)
    xs = list(rng.standard_normal(4))
    coeffs = charpoly_from_power_sums(power_sums(xs, 4))
    want = np.poly(xs)
    assert np.allclose(np.asarray([complex(c) for c in coeffs]), want)


def test_multiset_roundtrip():
    rng = np.random.default_rng(4)
    for _ in range(40):
        n = int(rng.integers(1, 7))
        xs = sorted(
            rng.standard_normal(n) + 1j * rng.standard_normal(n),
            key=lambda z: (z.real, z.imag),
        )
        s = power_sums(list(xs), n)
        back = multiset_from_power_sums(s)
        assert len(back) == n
        for got, ref in zip(back, xs):
            assert got == pytest.approx(ref, abs=1e-6)


def test_multiset_roundtrip_with_repeats():
    xs = [2.0, 2.0, -1.0]
    back = multiset_from_power_sums(power_sums(xs, 3))
    assert sorted(z.real for z in back) == pytest.approx([-1.0, 2.0, 2.0], abs=1e-8)


def test_first_nonzero_power_small_cases():
    assert first_nonzero_power([1.0, 2.0]) == 1
    assert first_nonzero_power([1.0, -1.0]) == 2
    # cube roots of unity: s_1 = s_2 = 0, s_3 = 3
    w = np.exp(2j * np.pi / 3)
    assert first_nonzero_power([1.0, w, w**2]) == 3
    assert first_nonzero_power([Fraction(1), Fraction(-1)]) == 2


def test_first_nonzero_power_bounded_by_size():
    rng = np.random.default_rng(5)
    for _ in range(100):
        n = int(rng.integers(1, 7))
        xs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        xs = [z for z in xs if abs(z) > 1e-12]
        if not xs:
            continue
        assert first_nonzero_power(xs) <= len(xs)


def test_first_nonzero_power_rejects_zero_entries():
    with pytest.raises(ValueError):
        first_nonzero_power([1.0, 0.0])


def test_family_zero_padding():
    fam = PowerSumFamily.from_pairs([((1, 2), (3,))])
    (mu, nu), = fam.groups
    assert len(mu) == len(nu) == 2
    # each group counts once at its padded size
    assert fam.total_size == 2
    two = PowerSumFamily.from_pairs([((1, 2), (3,)), ((5,), (6,))])
    assert two.total_size == 3


def test_proportional_families_true():
    # doubling every entry of nu scales s_L by 2^L in each group alike
    fam = PowerSumFamily.from_pairs([((2, 4), (1, 2)), ((6,), (3,))])
    assert proportional_powersum_families(fam) is True


def test_proportional_families_false_on_clash():
    # one group doubled, the other tripled: no shared constant
    fam = PowerSumFamily.from_pairs([((2,), (1,)), ((9,), (3,))])
    assert proportional_powersum_families(fam) is False


def test_proportional_families_false_when_target_vanishes():
    # mu has mass but nu cancels at every odd length
    fam = PowerSumFamily.from_pairs([((1, 1), (1, -1))])
    assert proportional_powersum_families(fam) is False


def test_proportional_families_indeterminate():
    # mu vanishes identically while nu does not: the constant is forced
    # to zero, which certifies nothing
    fam = PowerSumFamily.from_pairs([((1, -1), (1, 2))])
    result = proportional_powersum_families(fam)
    assert result is None


def test_proportional_families_window_validation():
    fam = PowerSumFamily.from_pairs([((1, 2), (1, 2))])
    with pytest.raises(ValueError):
        proportional_powersum_families(fam, window=3)
    assert proportional_powersum_families(fam, window=fam.total_size**2) is True


def test_proportional_families_exact_mode():
    fam = PowerSumFamily.from_pairs(
        [((Fraction(1, 2), Fraction(1, 3)), (Fraction(1, 4), Fraction(1, 6)))]
    )
    assert fam.is_exact
    assert proportional_powersum_families(fam) is True


def test_proportional_families_long_window_consistency():
    # the verdict from the minimal window survives a larger one
    fam = PowerSumFamily.from_pairs([((2, 8), (1, 4)), ((2, 6), (1, 3))])
    small = proportional_powersum_families(fam)
    large = proportional_powersum_families(fam, window=4 * fam.total_size**2)
    assert small == large


def test_numeric_guard_exists():
    # NumericError is the advertised escape hatch for degenerate floats
    assert issubclass(NumericError, Exception)

"""Recover a multiset from its power sums and certify proportionality.

The first n power sums of n numbers determine the multiset (Newton's
identities run backwards through the characteristic polynomial).  The
proportionality check on grouped power-sum families needs only a finite
window of lengths: once the window passes, all larger lengths follow.
"""

from fractions import Fraction

from tnpur import (
    PowerSumFamily,
    first_nonzero_power,
    multiset_from_power_sums,
    power_sums,
    proportional_powersum_families,
)

values = [3 + 0j, -1 + 2j, -1 - 2j, 0.5 + 0j]
sums = power_sums(values, len(values))
print(f"multiset: {values}")
print(f"power sums s_1..s_{len(values)}: {[complex(round(s.real, 9), round(s.imag, 9)) for s in sums]}")
back = multiset_from_power_sums(sums)
print(f"recovered: {[complex(round(z.real, 9), round(z.imag, 9)) for z in sorted(back, key=lambda z: (z.real, z.imag))]}")

# a multiset of r nonzero numbers has some nonvanishing power sum by r
xs = [Fraction(1), Fraction(-1), Fraction(2), Fraction(-2)]
print(f"first nonzero power sum of {[str(x) for x in xs]}: L = {first_nonzero_power(xs)}")

# both groups scaled by the same 3/2: proportional at every length
family = PowerSumFamily.from_pairs([
    ([Fraction(1), Fraction(2)], [Fraction(3, 2), Fraction(3)]),
    ([Fraction(5)], [Fraction(15, 2)]),
])
print(f"scaled family proportional: {proportional_powersum_families(family)}")

# second group scaled differently: a window length exposes it
clash = PowerSumFamily.from_pairs([
    ([Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]),
    ([Fraction(5)], [Fraction(15)]),
])
print(f"clashing family proportional: {proportional_powersum_families(clash)}")

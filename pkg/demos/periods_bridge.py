"""The integral route to the same numbers.

Every convergent term is also a period: an integral of a product of simple
rational forms over an ordered simplex, or after a change of variables, over
the unit cube.  This script evaluates a few terms both ways and then checks
the exact dlog expansion of the simplicial integrand at random rational
points, where both sides are fractions and equality is literal.
"""

import random
from fractions import Fraction as Rat

from zetalattice import (
    eval_term,
    expand,
    forest_expand,
    integral_eval,
    monomial_value,
    reflect,
    simplicial_coefficient,
    term,
)

CASES = [
    ([(1, 1)], [2]),          # zeta(2)
    ([(1, 2)], [1, 1]),       # zeta(2) again, one row across two columns
    ([(1, 2), (2, 3)], [1, 1, 1]),
    ([(1, 1), (2, 2)], [2, 3]),
    ([(1, 2), (2, 2)], [1, 2]),  # nested rows force a branched expansion
]

print("series vs cube integral:")
for rows, exps in CASES:
    t = term(rows, exps)
    s = eval_term(t)
    q = integral_eval(t)
    print(f"  {str(t):<38} series {s.value:.8f}   integral {q.value:.8f}")
    assert abs(s.value - q.value) < 5 * (s.estimated_error + q.estimated_error) + 1e-6

print()
print("mirror symmetry (reverse the column order):")
for rows, exps in CASES[2:]:
    t = term(rows, exps)
    m = reflect(t)
    a, b = eval_term(t).value, eval_term(m).value
    print(f"  {str(t):<38} -> {str(m):<30} gap {abs(a - b):.2e}")

print()
print("exact dlog expansion of the simplicial form:")
rng = random.Random(2)
for rows, exps in CASES:
    pat = expand(term(rows, exps))
    monos = forest_expand(pat)
    for _ in range(10):
        p = [Rat(x, 509) for x in rng.sample(range(1, 508), pat.width)]
        assert simplicial_coefficient(pat, p) == sum(
            monomial_value(m, p) for m in monos
        )
    print(f"  width {pat.width}: {len(monos)} monomial(s), 10 random points, exact")

"""Products of zeta values as block-diagonal matrices.

Placing two staircase patterns on disjoint row and column blocks multiplies
their series.  Reducing the block sum must therefore reproduce the
quasi-shuffle (stuffle) product of the two words, exactly and with rational
coefficients.  The engine does not know the product rule; it rediscovers it
through splits and partial fractions.
"""

from zetalattice import (
    direct_sum,
    eval_mzv,
    from_mzv,
    reduce_to_mzv,
    render_combination,
    stuffle_words,
)

PAIRS = [((2,), (2,)), ((2,), (3,)), ((2, 1), (2,)), ((3,), (2, 2))]
fmt = lambda w: "zeta(" + ",".join(map(str, w)) + ")"

for u, v in PAIRS:
    t = direct_sum(from_mzv(u), from_mzv(v))
    got = reduce_to_mzv(t, verify=True).combination
    expected = stuffle_words(u, v)
    tag = "ok" if got == expected else "MISMATCH"
    print(f"{fmt(u)} * {fmt(v)}  ->  {render_combination(got)}   [{tag}]")
    assert got == expected

print()
value = lambda comb: sum(float(c) * eval_mzv(w).value for w, c in comb.items())
square = reduce_to_mzv(direct_sum(from_mzv((2,)), from_mzv((2,)))).combination
lhs = eval_mzv((2,)).value ** 2
print(f"numeric cross-check: zeta(2)^2 = {lhs:.10f}")
print(f"reduced combination value      = {value(square):.10f}")

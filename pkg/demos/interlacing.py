"""The formal interlacing kernel and the two units of the graded space.

Prints the first kernel blocks, the interlacing residual of every generator,
and the spinor mixing of the block shift a^1_2 under su(2).

    python3 demos/interlacing.py
"""

from fractions import Fraction

from heisenrep.core import TruncationWindow
from heisenrep.interlace import GENERATORS, interlace_residual, kernel_blocks, two_units_check

lam = Fraction(-1, 4)

for b in kernel_blocks(lam, range(-2, 3), 4):
    coeffs = ", ".join(str(c) for c in b.coeffs)
    print(f"block {b.p:>2}: zb2**({b.exponent}) * [{coeffs}] in (zeta zb1 / zb2)**j")
print()
for gen in GENERATORS:
    print(f"interlace {gen:<8} residual {interlace_residual(lam, gen)}")
print()
r = two_units_check(TruncationWindow(-3, 3, 8), lam)
print("identity and a^1_2 share their entries:", r.structurally_equal)
for i, rows in r.mixing.items():
    printable = [[str(x) for x in row] for row in rows]
    print(f"[L{i}, a^1_alpha] = sum_g c[alpha][g] a^1_g with c = {printable}")

"""The exponential of the lowering generator against two Laguerre forms.

exp(tau L-) zeta**n is a polynomial of degree n.  Its coefficients agree with
n! (-tau)**n L_n^(-2 lam - 1)(zeta / tau); the variant with (-tau/2)**n is off
by exactly 2**n.

    python3 demos/laguerre_prefactor.py
"""

import numpy as np

from heisenrep.symmetry import exp_lminus, exp_lminus_closed_form

lam, tau = -0.3, 1.0
print(f"lambda = {lam}, tau = {tau}")
print(f"{'n':>2} {'gap (-tau)^n':>14} {'gap (-tau/2)^n':>16} {'ratio':>8}")
for n in range(9):
    e = np.zeros(n + 12, dtype=complex)
    e[n] = 1.0
    series = exp_lminus(lam, tau, e)[: n + 1]
    full = exp_lminus_closed_form(lam, n, tau, 1.0)
    half = exp_lminus_closed_form(lam, n, tau, 0.5)
    ratio = abs(series[0] / half[0])
    print(f"{n:>2} {np.abs(series - full).max():>14.2e} {np.abs(series - half).max():>16.3g} {ratio:>8.1f}")

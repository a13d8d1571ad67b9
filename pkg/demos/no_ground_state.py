"""Fock versus graded non-Fock oscillators on growing truncation windows.

The Fock number operator bottoms out at 0.  In the graded representation
every block below the window adds lower eigenvalues, so the minimum keeps
falling as the window grows downward.

    python3 demos/no_ground_state.py
"""

from fractions import Fraction

from heisenrep.core import TruncationWindow
from heisenrep.oscillators import fock_ladders, nonfock_h4, number_spectrum

lam = Fraction(-3, 10)

print("Fock h2, m_max = 6:", number_spectrum(fock_ladders(1, 6), 1))
print()
print(f"graded h4, lambda = {lam}, mode 2")
print(f"{'p_min':>6} {'min eigenvalue':>16}")
for p_min in range(-2, -8, -1):
    rep = nonfock_h4(lam, TruncationWindow(p_min, 2, 6))
    print(f"{p_min:>6} {str(min(number_spectrum(rep, 2))):>16}")

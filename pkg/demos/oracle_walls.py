"""Compare contour integrals with exact q-expansions, and check wall crossing.

Between two pole lines the Fourier coefficient h_l is a q-series that can be
computed exactly from the theta products.  Crossing a pole line changes it by
a residue term.

Run: python demos/oracle_walls.py
"""

from fractions import Fraction
from pathlib import Path

from jmf import load_form
from jmf.decompose import h_at_height
from jmf.qexp import band_around, h_band, pole_line_heights, wall_crossing

form = load_form(Path(__file__).parent / "forms" / "kw4_2.json")
tau = 0.05 + 1.1j
print(f"{form.name}: pole lines at heights {[str(h) for h in pole_line_heights(form)]} (mod 1)")

for height in (Fraction(-1, 4), Fraction(1, 4)):
    band = band_around(form, height)
    print(f"band ({band[0]}, {band[1]})")
    for ell in range(2 * form.index):
        series = h_band(form, ell, band, trunc=30)
        exact = series.evaluate(tau)
        contour = h_at_height(form, ell, height, tau)
        print(f"  l={ell}: series {exact:.10f}  contour {contour:.10f}  diff {abs(exact - contour):.1e}")

wc = wall_crossing(form, 1, Fraction(0), trunc=30)
print(f"wall at 0, l=1: jump minus residue series, relative {wc.residual:.1e}")

"""Split theta(z+1/2)^4/theta(z)^2 into finite and polar parts, then complete both.

Run: python demos/decompose_kw.py
"""

from pathlib import Path

from jmf import load_form
from jmf.decompose import canonical_h, completed_finite, completed_h, completed_polar, split

form = load_form(Path(__file__).parent / "forms" / "kw4_2.json")
print(f"{form.name}: weight {form.weight}, index {form.index}")

z, tau = 0.13 + 0.07j, 0.1 + 1.2j

# Fourier coefficients along the canonical lines Im z = -l v / 2M
for ell in range(2 * form.index):
    h = canonical_h(form, ell, tau)
    hh = completed_h(form, ell, tau)
    print(f"  h_{ell}   = {h:.12f}\n  hhat_{ell} = {hh:.12f}")

rep = split(form, z, tau)
print(f"phi          = {rep.total:.12f}")
print(f"finite+polar = {rep.finite + rep.polar:.12f}   residual {rep.residual:.1e}")

# the completion moves a non-holomorphic correction from one side to the other
fh, ph = completed_finite(form, z, tau), completed_polar(form, z, tau)
print(f"completed    = {fh + ph:.12f}   residual {abs(fh + ph - rep.total):.1e}")

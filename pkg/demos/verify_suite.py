"""Run the numerical verification suite on one form and print a table.

Run: python demos/verify_suite.py [form.json]
"""

import sys
from pathlib import Path

from jmf import load_form
from jmf import verify as vf

path = sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parent / "forms" / "shifted4_2.json"
form = load_form(path)
ctx = vf.Context(form)

for spec in vf.select(None, form):
    r = vf.run_check(spec, ctx)
    rel = "<" if r.bound == "upper" else ">"
    print(f"{'ok  ' if r.passed else 'FAIL'} {r.name:34s} {r.residual:9.1e} {rel} {r.tolerance:.0e}  ({r.seconds:.2f}s)")

print("\nsubgroup finding:")
for obj, table in vf.finding_subgroups(ctx).items():
    held = [g for g, ok in table.items() if ok]
    print(f"  {obj}: transforms under {held}")

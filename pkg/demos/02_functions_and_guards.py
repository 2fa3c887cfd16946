"""Piecewise-affine function specs and their reference evaluator.

max(2*x1 - x2, x2) splits into two affine pieces selected by the
Presburger guard x1 >= x2; the evaluator is the oracle every compiled
network is checked against.
"""

import crnforge
from crnforge import disambiguate_guards, eval_fn, eval_guard
from crnforge.semilinear import load_fn

fn = load_fn(crnforge.data_path("fig2.json"))
print("inputs:", fn.input_names, "pieces:", len(fn.pieces))

for x in [(4, 2), (2, 5), (3, 3), (0, 0)]:
    print(f"f{x} = {eval_fn(fn, x)}")

fn2 = disambiguate_guards(fn)
print("\nafter disambiguation exactly one guard holds per input:")
for x in [(4, 2), (2, 5), (3, 3)]:
    holds = [eval_guard(p.guard, x) for p in fn2.pieces]
    print(f"  {x}: {holds}")

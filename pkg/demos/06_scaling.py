"""Measure convergence-time scaling of a compiled network.

Doubling the input size should roughly double convergence time (up to a
log factor): the fitted log-log slope sits near 1, far from the 2 a
quadratic-time dynamics would show.
"""

import crnforge
from crnforge import fit_loglog, scaling_run
from crnforge.bench import rows_to_csv
from crnforge.semilinear import load_fn

fn = load_fn(crnforge.data_path("fig2.json"))
rows = scaling_run(fn, [16, 32, 64, 128, 256], trials=10, seed=42)
print(rows_to_csv(rows))
print(f"fitted log-log slope: {fit_loglog(rows):.3f}")

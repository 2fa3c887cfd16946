"""Compile the max spec to a reaction network and watch it compute.

The compiled machine runs both affine pieces in parallel on split input
copies, decides which piece applies with token-cancellation deciders,
and activates exactly one piece's outputs.
"""

import crnforge
from crnforge import compile_piecewise, eval_fn, simulate
from crnforge.semilinear import load_fn

fn = load_fn(crnforge.data_path("fig2.json"))
crc, opts = compile_piecewise(fn)
print(
    f"compiled: {len(crc.crn.species)} species, {len(crc.crn.reactions)} reactions, "
    f"fanout width {opts.fanout_width}, count bound {crc.declared_count_bound}"
)

for x in [(4, 2), (2, 5), (6, 6), (30, 11)]:
    res = simulate(crc, x, seed=7)
    print(
        f"input {x}: output {res.output} (oracle {eval_fn(fn, x)}), "
        f"{res.events} events, converged at t={res.last_output_change_time:.1f}, "
        f"peak count {res.count_peak}"
    )

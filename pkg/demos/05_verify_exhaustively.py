"""Certify stable computation by exhaustive bounded reachability.

The verifier explores every reachable configuration and checks that a
correct output-stable configuration stays reachable from all of them
while no incorrect one is: a certificate, not a sample.
"""

import crnforge
from crnforge import check_stable_computation, graph_decider, check_stable_decision
from crnforge.crnfmt import load

crc = load(crnforge.data_path("fig1a.crn"))
report = check_stable_computation(crc, lambda x: (x[0] // 2,), [(x,) for x in range(9)])
print("fig1a floor(x/2) for x <= 8:", report.verdict)
for s in report.stats[:4]:
    print(f"  input {s.input}: {s.nodes} configurations, {s.edges} transitions")

# a wrong claim produces a replayable counterexample
bad = check_stable_computation(crc, lambda x: (x[0],), [(3,)])
print("\nclaiming f(x) = x instead:", bad.verdict)
print(bad.render_text())

# the graph decider answers membership in the function's graph
decider = graph_decider(crc)
report = check_stable_decision(
    decider, lambda v: v[0] // 2 == v[1], [(5, 2), (5, 3)]
)
print("graph decider on claims (5,2) and (5,3):", report.verdict)

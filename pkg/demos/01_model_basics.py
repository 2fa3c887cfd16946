"""Walk through the discrete CRN model on the floor-halving network.

A single reaction 2X -> Y computes floor(x/2): the final configuration
always holds exactly floor(x/2) copies of Y plus the leftover parity
bit of X.
"""

from crnforge import (
    Configuration,
    Crn,
    Reaction,
    apply,
    enabled,
    is_terminal,
)
from crnforge.crnfmt import serialize

crn = Crn(["X", "Y"], [Reaction.parse("2 X -> Y")])
print(serialize(crn))

c = Configuration.from_dict(crn, {"X": 5})
print("start:", c.as_dict())
while not is_terminal(crn, c):
    rxn = enabled(crn, c)[0]
    c = apply(c, rxn)
    print("fire", rxn, "->", c.as_dict())

print("terminal with Y =", c.get("Y"), "(floor(5/2) = 2)")

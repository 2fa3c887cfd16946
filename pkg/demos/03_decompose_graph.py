"""Extract an affine piece from a linear graph set.

The set generated by periods (1,1,1), (2,0,1), (0,2,1) is the graph of
(x1 + x2) / 2 on even-sum inputs, even though no two of the three
periods can be dropped without losing points: the extraction solves for
the unique affine expression with exact rational arithmetic.
"""

from crnforge import extract_affine, linear_contains
from crnforge.semilinear import LinearSet, enumerate_linear, eval_piece
from crnforge.errors import NotAGraphError

g = LinearSet((0, 0, 0), [(1, 1, 1), (2, 0, 1), (0, 2, 1)])
piece = extract_affine(g, 2, 1)
print("coefficients:", piece.num, "denominator:", piece.den)

for pt in sorted(enumerate_linear(g, 2)):
    assert eval_piece(piece, pt[:2]) == (pt[2],)
print("extraction reproduces every enumerated graph point")

print("membership check: (3,3,3) in set?", linear_contains(g, (3, 3, 3)))

try:
    extract_affine(LinearSet((0, 0), [(1, 0), (1, 1)]), 1, 1)
except NotAGraphError as err:
    print("rejected non-graph with witness:", err.witness)

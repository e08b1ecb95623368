"""What survives when the intersection property fails: the weak form.

Even on a gapped support, the conclusion X _||_ (A, B) is recovered by
conditioning on the support-class variable uc.  Intuitively the premises
force the conditional law of X to be constant on every class; the only
freedom left -- and the only possible source of dependence -- is which
class the sample landed in.
"""

import numpy as np

from ciprop import (
    Axis,
    DensityGrid,
    PremiseViolated,
    construct_adversary,
    is_ci,
    verify_weak_intersection,
)

cells = np.zeros((6, 6), dtype=bool)
cells[:3, :3] = True
cells[3:, 3:] = True
base = DensityGrid(
    (
        Axis("A", tuple(float(k) for k in range(6))),
        Axis("B", tuple(float(k) for k in range(6))),
    ),
    cells / cells.sum(),
)
joint = construct_adversary(base)

print("unconditional conclusion holds:", is_ci(joint, "X", ("A", "B")).holds)

weak = verify_weak_intersection(joint)
print("weak form holds:", weak.holds)
print("worst residual:", weak.residual)
for (cell, cls), residual in sorted(weak.per_class.items()):
    print(f"  conditioning cell {cell or '-'} class {cls}: residual {residual:.3e}")

# The weak form is a statement *about grids whose premises hold*; feeding
# it anything else is refused rather than silently answered.
table = np.zeros((2, 2, 2))
table[0, 0, 0] = table[0, 0, 1] = 0.25
table[1, 1, 0] = table[1, 1, 1] = 0.25
x_copies_a = DensityGrid(
    (Axis("X", (0.0, 1.0)), Axis("A", (0.0, 1.0)), Axis("B", (0.0, 1.0))),
    table,
)
try:
    verify_weak_intersection(x_copies_a)
except PremiseViolated as exc:
    print("\nrefused as expected:", exc)

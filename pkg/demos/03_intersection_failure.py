"""Breaking the intersection property with a gap in the support.

The intersection property of conditional independence is the implication

    X _||_ A | B   and   X _||_ B | A   =>   X _||_ (A, B).

For strictly positive densities it always holds.  This script builds the
smallest kind of counterexample: a joint (A, B) support made of two
diagonal blocks, and a variable X that tracks which block the sample is
in.  Each premise holds exactly -- knowing B pins down the block, so A
carries no extra information about X -- yet X is far from independent of
the pair.
"""

import numpy as np

from ciprop import (
    Axis,
    DensityGrid,
    construct_adversary,
    intersection_condition,
    verify_intersection,
)

n = 6
cells = np.zeros((n, n), dtype=bool)
cells[: n // 2, : n // 2] = True
cells[n // 2 :, n // 2 :] = True
base = DensityGrid(
    (
        Axis("A", tuple(float(k) for k in range(n))),
        Axis("B", tuple(float(k) for k in range(n))),
    ),
    cells / cells.sum(),
)

# The decision is purely topological: more than one support class at some
# conditioning cell means a violating X exists.
verdict = intersection_condition(base)
print("class counts per conditioning cell:", dict(verdict.per_c_class_counts))
print("intersection property:", "holds" if verdict.holds else "FAILS")

# Construct the violating variable: X = 10 on class 1, 0 elsewhere, plus
# a short uniform noise so each premise stays exactly true.
adversary = construct_adversary(base)
print("\nadversary grid axes:", ", ".join(adversary.axis_names))
print("X axis points:", adversary.axes[0].points)

report = verify_intersection(adversary)
print("\npremise X _||_ A | B   deviation:", report.premise_xa.deviation)
print("premise X _||_ B | A   deviation:", report.premise_xb.deviation)
print("conclusion X _||_ (A,B) deviation:", report.conclusion.deviation)
print("implication violated:", not report.implication_holds)

# The conclusion deviation is exactly 2 w (1 - w) where w is the mass of
# class 1 -- maximal at the even split used here.
w = 0.5
print("predicted deviation:", 2 * w * (1 - w))

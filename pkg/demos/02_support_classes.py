"""Support topology: components under grid adjacency, then equivalence classes.

Two path-connected components of a joint support belong to the same
coordinate-wise class when their projections onto either axis overlap;
classes are the transitive closure of that relation.  The class structure,
not the component count, is what decides the intersection property.
"""

import numpy as np

from ciprop import (
    coordinatewise_classes,
    path_components,
    render_labels,
    uc_of_cell,
)

# Seven blocks, drawn so that projection overlaps chain some of them
# together.  Rows are A bins, columns are B bins.
cells = np.zeros((10, 10), dtype=bool)
cells[0:2, 0:2] = True   # shares rows with the next block
cells[0:2, 4:6] = True   # ... which shares columns with the next
cells[4:6, 4:6] = True
cells[2:4, 2:4] = True   # second chain, rows only
cells[2:4, 7:9] = True
cells[7:9, 6] = True     # third chain, isolated columns
cells[7:9, 9] = True

labeling = path_components(cells)
print(f"components (4-adjacency): {labeling.count}")
print(render_labels(labeling.labels))

# Corner contacts count as adjacent only under the 8-neighbor rule.
print(f"\ncomponents (8-adjacency): {path_components(cells, adjacency=8).count}")

assignment = coordinatewise_classes(labeling)
print(f"\nclasses: {assignment.class_count}")
print("component -> class:", dict(assignment.class_of_component))
for cls in range(1, assignment.class_count + 1):
    print(f"  class {cls}: A bins {assignment.proj_a[cls]}  B bins {assignment.proj_b[cls]}")

# The induced cell variable: 0 off support, the class index on it.
# Distinct classes never share an A bin or a B bin, so on the support
# the value is a function of the A coordinate alone (and of B alone).
print("\nclass variable over the lattice:")
print(render_labels(assignment.uc))
print("\nvalue at (0, 0):", uc_of_cell(assignment, 0, 0))
print("value at (5, 5):", uc_of_cell(assignment, 5, 5))
print("value at (9, 0):", uc_of_cell(assignment, 9, 0), "(off support)")

"""Support decomposition for pairs of grid variables.

Given a joint grid over axes ``A`` and ``B`` (optionally sliced at a cell
of further conditioning axes), this module builds the boolean support mask,
labels its path-connected components under 4-neighbor adjacency, and merges
components into equivalence classes under coordinate-wise connection: two
components are directly connected when their projections onto the A axis
intersect or their projections onto the B axis intersect, and classes are
the transitive closure of that relation.

The class structure induces a derived variable ``uc`` over the (A, B)
lattice: class index ``i >= 1`` on cells of class ``i``, and ``0`` on
off-support cells.  Projections of distinct classes are disjoint on both
axes, so on-support ``uc`` is simultaneously a function of the A bin alone
and of the B bin alone.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    IndexOutOfRange,
    OverlappingRoles,
    ShapeMismatch,
    UnknownAxis,
    ZeroMassCondition,
)
from .grids import ZERO_TOL, Axis, DensityGrid, marginalize

_CHARSET = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ"


@dataclass(frozen=True)
class SupportMask:
    """Boolean support table over (A-bin, B-bin) for a fixed slice."""

    a_axis: Axis
    b_axis: Axis
    cells: np.ndarray
    tau: float = ZERO_TOL

    def __post_init__(self) -> None:
        cells = np.asarray(self.cells, dtype=bool)
        expect = (self.a_axis.size, self.b_axis.size)
        if cells.shape != expect:
            raise ShapeMismatch(f"mask shape {cells.shape} != axes shape {expect}")
        cells = np.ascontiguousarray(cells)
        cells.flags.writeable = False
        object.__setattr__(self, "cells", cells)


@dataclass(frozen=True)
class ComponentLabeling:
    """Component ids per cell: 0 off support, 1..count on support.

    Labels are canonical: component k's first cell in row-major order
    precedes component k+1's first cell.
    """

    labels: np.ndarray
    count: int

    def __post_init__(self) -> None:
        labels = np.ascontiguousarray(np.asarray(self.labels, dtype=np.int64))
        labels.flags.writeable = False
        object.__setattr__(self, "labels", labels)


@dataclass(frozen=True)
class UcAssignment:
    """Equivalence classes of components and the derived cell variable.

    ``uc`` holds class index i >= 1 on cells of class i and 0 off support.
    ``proj_a`` / ``proj_b`` give each class's occupied bins per axis; the
    sets are pairwise disjoint across classes on both axes.
    """

    uc: np.ndarray
    class_of_component: Mapping[int, int]
    class_count: int
    proj_a: Mapping[int, tuple[int, ...]]
    proj_b: Mapping[int, tuple[int, ...]]

    def __post_init__(self) -> None:
        uc = np.ascontiguousarray(np.asarray(self.uc, dtype=np.int64))
        uc.flags.writeable = False
        object.__setattr__(self, "uc", uc)


def support_mask(
    grid: DensityGrid,
    a: str,
    b: str,
    c_fixed: Mapping[str, int] | None = None,
    tau: float = ZERO_TOL,
) -> SupportMask:
    """Mask of (a, b) cells whose mass at the fixed slice exceeds ``tau``.

    Axes other than ``a``, ``b`` and the fixed ones are summed out first,
    so the mask reflects the (A, B, C)-marginal support at the given
    C-cell.  With ``c_fixed`` empty the plain (A, B) marginal is used.
    """
    if tau < 0:
        raise ShapeMismatch(f"tau must be nonnegative, got {tau!r}")
    fixed = dict(c_fixed or {})
    if a == b or a in fixed or b in fixed:
        raise OverlappingRoles(f"roles overlap: a={a!r} b={b!r} c={sorted(fixed)}")
    sub = marginalize(grid, (a, b, *fixed))
    slicer: list[object] = [slice(None)] * len(sub.axes)
    for name, bin_idx in fixed.items():
        i = sub.axis_index(name)
        if not 0 <= int(bin_idx) < sub.axes[i].size:
            raise IndexOutOfRange(
                f"bin {bin_idx} out of range for axis {name!r} (size {sub.axes[i].size})"
            )
        slicer[i] = int(bin_idx)
    block = sub.prob[tuple(slicer)]
    if fixed and float(block.sum()) <= tau:
        raise ZeroMassCondition(f"slice {fixed} has mass {float(block.sum())!r}")
    ai = [n for n in sub.axis_names if n not in fixed].index(a)
    cells = block > tau
    if ai != 0:
        cells = cells.T
    return SupportMask(sub.axis(a), sub.axis(b), cells, tau)


def _neighbor_offsets(adjacency: int) -> tuple[tuple[int, int], ...]:
    if adjacency == 4:
        return ((-1, 0), (1, 0), (0, -1), (0, 1))
    if adjacency == 8:
        return tuple(
            (di, dj) for di in (-1, 0, 1) for dj in (-1, 0, 1) if (di, dj) != (0, 0)
        )
    raise ShapeMismatch(f"adjacency must be 4 or 8, got {adjacency!r}")


def label_cells(cells: np.ndarray, adjacency: int = 4) -> tuple[np.ndarray, int]:
    """Flood-fill labeling of a 2-D boolean table; returns (labels, count)."""
    cells = np.asarray(cells, dtype=bool)
    if cells.ndim != 2:
        raise ShapeMismatch(f"expected a 2-D table, got shape {cells.shape}")
    offsets = _neighbor_offsets(adjacency)
    n_rows, n_cols = cells.shape
    labels = np.zeros(cells.shape, dtype=np.int64)
    count = 0
    for i in range(n_rows):
        for j in range(n_cols):
            if not cells[i, j] or labels[i, j]:
                continue
            count += 1
            labels[i, j] = count
            queue = deque([(i, j)])
            while queue:
                ci, cj = queue.popleft()
                for di, dj in offsets:
                    ni, nj = ci + di, cj + dj
                    if (
                        0 <= ni < n_rows
                        and 0 <= nj < n_cols
                        and cells[ni, nj]
                        and not labels[ni, nj]
                    ):
                        labels[ni, nj] = count
                        queue.append((ni, nj))
    return labels, count


def path_components(
    mask: SupportMask | np.ndarray, adjacency: int = 4
) -> ComponentLabeling:
    """Path-connected components of the support under grid adjacency.

    4-adjacency (cells sharing an edge) is the default: a continuous
    positive path crossing a fine grid induces edge-adjacent positive
    cells, while corner contact does not imply a path through the support.
    ``adjacency=8`` additionally joins diagonal contacts.
    """
    cells = mask.cells if isinstance(mask, SupportMask) else np.asarray(mask, bool)
    labels, count = label_cells(cells, adjacency)
    return ComponentLabeling(labels, count)


class _Dsu:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


def coordinatewise_classes(labeling: ComponentLabeling) -> UcAssignment:
    """Merge components sharing an A-projection bin or a B-projection bin.

    Union-find computes the transitive closure of the direct overlap
    relation (chains of coordinate-wise connections).  Class indices are
    canonical by the smallest member component label.
    """
    labels = labeling.labels
    count = labeling.count
    dsu = _Dsu(count + 1)
    # all components occupying a common A bin (row) or B bin (column) are
    # pairwise connected; unioning each against the first seen suffices
    for axis in (0, 1):
        for k in range(labels.shape[axis]):
            comps = np.unique(labels.take(k, axis=axis))
            comps = comps[comps > 0]
            for other in comps[1:]:
                dsu.union(int(comps[0]), int(other))
    roots = sorted({dsu.find(k) for k in range(1, count + 1)})
    class_of_root = {root: i + 1 for i, root in enumerate(roots)}
    class_of_component = {k: class_of_root[dsu.find(k)] for k in range(1, count + 1)}
    remap = np.zeros(count + 1, dtype=np.int64)
    for k, cls in class_of_component.items():
        remap[k] = cls
    uc = remap[labels]
    proj_a = {
        cls: tuple(int(i) for i in np.flatnonzero((uc == cls).any(axis=1)))
        for cls in class_of_root.values()
    }
    proj_b = {
        cls: tuple(int(j) for j in np.flatnonzero((uc == cls).any(axis=0)))
        for cls in class_of_root.values()
    }
    return UcAssignment(uc, class_of_component, len(roots), proj_a, proj_b)


def uc_of_cell(assignment: UcAssignment, a_bin: int, b_bin: int) -> int:
    """Class index at a cell: i >= 1 on class i, 0 where the mass is zero."""
    n_rows, n_cols = assignment.uc.shape
    if not (0 <= a_bin < n_rows and 0 <= b_bin < n_cols):
        raise IndexOutOfRange(
            f"cell ({a_bin}, {b_bin}) out of range for shape {(n_rows, n_cols)}"
        )
    return int(assignment.uc[a_bin, b_bin])


def label_support_nd(support: np.ndarray) -> tuple[np.ndarray, int]:
    """Face-adjacency components of an n-D boolean lattice.

    Two cells are adjacent when they differ by one step on exactly one
    axis (the n-D analogue of 4-adjacency).  Returns (labels, count) with
    the same 0 / 1..count convention as the 2-D labeling.
    """
    support = np.asarray(support, dtype=bool)
    labels = np.zeros(support.shape, dtype=np.int64)
    count = 0
    for start in np.argwhere(support):
        start = tuple(int(v) for v in start)
        if labels[start]:
            continue
        count += 1
        labels[start] = count
        queue = deque([start])
        while queue:
            cell = queue.popleft()
            for axis in range(support.ndim):
                for step in (-1, 1):
                    coord = cell[axis] + step
                    if not 0 <= coord < support.shape[axis]:
                        continue
                    neighbor = cell[:axis] + (coord,) + cell[axis + 1 :]
                    if support[neighbor] and not labels[neighbor]:
                        labels[neighbor] = count
                        queue.append(neighbor)
    return labels, count


def render_labels(labels: np.ndarray) -> str:
    """ASCII view: '.' off support, labels as 0-9A-Z (wrapping modulo 36).

    Rows are A bins from low to high coordinate, columns B bins.
    """
    labels = np.asarray(labels)
    rows = []
    for row in labels:
        rows.append(
            "".join("." if v == 0 else _CHARSET[int(v) % 36] for v in row)
        )
    return "\n".join(rows)


def render_mask(mask: SupportMask) -> str:
    """ASCII view of a support mask: '#' on support, '.' off."""
    return "\n".join(
        "".join("#" if v else "." for v in row) for row in mask.cells
    )

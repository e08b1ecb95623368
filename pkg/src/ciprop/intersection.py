"""Deciding the intersection property of conditional independence.

The intersection property is the implication

    X ind A | (B, C)  and  X ind B | (A, C)   =>   X ind (A, B) | C.

It can fail when the joint density of (A, B) has gaps.  The decision
criterion implemented here is purely topological: the implication holds
for every variable X exactly when, in each conditioning cell c, all
path-connected components of the (A, B) support merge into a single
coordinate-wise-connected equivalence class.  With two or more classes a
violating X always exists and :func:`construct_adversary` builds one; with
one class the conclusion is forced, and even in the failing case a weak
form survives: the conclusion holds conditionally on the class variable
``uc`` (:func:`verify_weak_intersection`).

The adversary follows the constructive failure proof: a new variable

    X = g(C, U) + N_X,   g = high level on class 1 of the target c-cell,
                             low level elsewhere,

with N_X uniform on a short symmetric grid.  On the support, ``uc`` is a
function of A alone and of B alone, which makes both premises hold
exactly, while the two well-separated X-bands tied to distinct classes
break the conclusion by at least ``max(w, 1-w) / 5 >= 0.1`` in the
pointwise conditional residual, where ``w`` is the class-1 mass of the
target slice.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import (
    PremiseViolated,
    ShapeMismatch,
    SingleClass,
)
from .grids import (
    DEFAULT_TOL,
    ZERO_TOL,
    Axis,
    CiReport,
    DensityGrid,
    ci_deviation,
    is_ci,
    pointwise_deviation,
    marginalize,
    validate,
)
from .topology import (
    UcAssignment,
    coordinatewise_classes,
    path_components,
    support_mask,
)


@dataclass(frozen=True)
class IntersectionVerdict:
    """Topological criterion result: one class per conditioning cell or not."""

    per_c_class_counts: Mapping[tuple[int, ...], int]
    holds: bool
    failing_c: tuple[int, ...] | None


@dataclass(frozen=True)
class IntersectionReport:
    """Direct evaluation of the implication on a concrete grid."""

    premise_xa: CiReport
    premise_xb: CiReport
    conclusion: CiReport
    premises_hold: bool
    implication_holds: bool
    vacuous: bool


@dataclass(frozen=True)
class WeakIntersectionReport:
    """Class-conditional conclusion: X ind (A, B) | (C, uc)."""

    holds: bool
    residual: float
    per_class: Mapping[tuple[tuple[int, ...], int], float]
    tol: float


def _cond_names(
    grid: DensityGrid, exclude: tuple[str, ...], cond: Iterable[str] | None
) -> tuple[str, ...]:
    if cond is None:
        return tuple(n for n in grid.axis_names if n not in exclude)
    return tuple(cond)


def _c_cells(
    grid: DensityGrid, cond: tuple[str, ...], tau: float
) -> list[tuple[tuple[int, ...], dict[str, int]]]:
    """Positive-mass conditioning cells in row-major order."""
    if not cond:
        return [((), {})]
    marg = marginalize(grid, cond)
    order = tuple(n for n in marg.axis_names)
    cells = []
    for idx in np.argwhere(marg.prob > tau):
        cell = tuple(int(v) for v in idx)
        cells.append((cell, dict(zip(order, cell))))
    return cells


def classes_per_c(
    grid: DensityGrid,
    a: str,
    b: str,
    cond: Iterable[str] | None = None,
    tau: float = ZERO_TOL,
    adjacency: int = 4,
) -> dict[tuple[int, ...], UcAssignment]:
    """Class assignment of the (a, b) support for every conditioning cell."""
    cond_names = _cond_names(grid, (a, b), cond)
    out: dict[tuple[int, ...], UcAssignment] = {}
    for cell, fixed in _c_cells(grid, cond_names, tau):
        mask = support_mask(grid, a, b, fixed, tau)
        out[cell] = coordinatewise_classes(path_components(mask, adjacency))
    return out


def intersection_condition(
    grid: DensityGrid,
    a: str = "A",
    b: str = "B",
    cond: Iterable[str] | None = None,
    tau: float = ZERO_TOL,
    adjacency: int = 4,
) -> IntersectionVerdict:
    """Decide whether the intersection property holds for every X.

    ``cond`` defaults to all axes besides ``a`` and ``b``.  The property
    holds exactly when each positive-mass conditioning cell yields at most
    one support class; the first cell with two or more classes (row-major)
    is reported as ``failing_c``.
    """
    assignments = classes_per_c(grid, a, b, cond, tau, adjacency)
    counts = {cell: asg.class_count for cell, asg in assignments.items()}
    failing = next((cell for cell, n in counts.items() if n > 1), None)
    return IntersectionVerdict(counts, failing is None, failing)


def verify_intersection(
    grid: DensityGrid,
    x: str = "X",
    a: str = "A",
    b: str = "B",
    cond: Iterable[str] = (),
    tol: float = DEFAULT_TOL,
) -> IntersectionReport:
    """Evaluate both premises and the conclusion on a concrete grid.

    ``vacuous`` distinguishes an implication that only holds because a
    premise fails from one whose premises and conclusion all hold.
    """
    cond = tuple(cond)
    premise_xa = is_ci(grid, x, a, (b, *cond), tol)
    premise_xb = is_ci(grid, x, b, (a, *cond), tol)
    conclusion = is_ci(grid, x, (a, b), cond, tol)
    premises_hold = premise_xa.holds and premise_xb.holds
    implication = conclusion.holds or not premises_hold
    return IntersectionReport(
        premise_xa=premise_xa,
        premise_xb=premise_xb,
        conclusion=conclusion,
        premises_hold=premises_hold,
        implication_holds=implication,
        vacuous=implication and not premises_hold,
    )


def _xab_block(
    grid: DensityGrid, x: str, a: str, b: str, fixed: Mapping[str, int]
) -> np.ndarray:
    """Unnormalized mass table over (x, a, b) at a fixed conditioning cell."""
    sub = marginalize(grid, (x, a, b, *fixed))
    slicer: list[object] = [slice(None)] * len(sub.axes)
    for name, bin_idx in fixed.items():
        slicer[sub.axis_index(name)] = int(bin_idx)
    block = sub.prob[tuple(slicer)]
    rest = [n for n in sub.axis_names if n not in fixed]
    perm = tuple(rest.index(n) for n in (x, a, b))
    return np.transpose(block, perm)


def verify_weak_intersection(
    grid: DensityGrid,
    x: str = "X",
    a: str = "A",
    b: str = "B",
    cond: Iterable[str] | None = None,
    tol: float = DEFAULT_TOL,
    tau: float = ZERO_TOL,
    adjacency: int = 4,
) -> WeakIntersectionReport:
    """Check the conclusion conditionally on the support class.

    Requires both premises to hold at ``tol`` (:class:`PremiseViolated`
    otherwise, meaning the weak form is not applicable).  For every
    conditioning cell c and every class i of its support, the conditional
    law of x must be constant across on-class (a, b) cells and equal to
    the class mixture obtained by summing ``p(x, a | c)`` over the class's
    a-projection and normalizing.  The report carries the worst residual
    per (c-cell, class).
    """
    cond_names = _cond_names(grid, (x, a, b), cond)
    premise_xa = is_ci(grid, x, a, (b, *cond_names), tol)
    premise_xb = is_ci(grid, x, b, (a, *cond_names), tol)
    if not (premise_xa.holds and premise_xb.holds):
        raise PremiseViolated(
            "premise deviations "
            f"{premise_xa.deviation!r} / {premise_xb.deviation!r} exceed {tol!r}"
        )
    per_class: dict[tuple[tuple[int, ...], int], float] = {}
    for cell, fixed in _c_cells(grid, cond_names, tau):
        mask = support_mask(grid, a, b, fixed, tau)
        assignment = coordinatewise_classes(path_components(mask, adjacency))
        block = _xab_block(grid, x, a, b, fixed)
        cell_mass = block.sum(axis=0)
        for cls in range(1, assignment.class_count + 1):
            a_bins = np.asarray(assignment.proj_a[cls], dtype=int)
            mixture = block[:, a_bins, :].sum(axis=(1, 2))
            mixture = mixture / mixture.sum()
            on_class = (assignment.uc == cls) & (cell_mass > tau)
            cols = block[:, on_class]
            cond_laws = cols / cols.sum(axis=0)
            residual = float(np.abs(cond_laws - mixture[:, None]).max())
            per_class[(cell, cls)] = residual
    worst = max(per_class.values(), default=0.0)
    return WeakIntersectionReport(
        holds=worst <= tol, residual=worst, per_class=per_class, tol=tol
    )


def attach_class_variable(
    base: DensityGrid,
    g: Callable[[tuple[int, ...], int], float],
    noise_points: Sequence[float],
    noise_probs: Sequence[float] | None = None,
    a: str = "A",
    b: str = "B",
    name: str = "X",
    tau: float = ZERO_TOL,
    adjacency: int = 4,
) -> DensityGrid:
    """Join a new variable ``name = g(c, uc) + noise`` onto ``base``.

    ``g`` receives the conditioning cell (bin tuple over the non-(a, b)
    axes of ``base``, in grid order) and the support class index at the
    cell, and returns a level; positive-mass cells below the support
    threshold get class 0.  The new axis is placed first; its points are
    the distinct level-plus-noise values.
    """
    if name in base.axis_names:
        raise ShapeMismatch(f"axis {name!r} already exists")
    pts = np.asarray(noise_points, dtype=float)
    if pts.size == 0:
        raise ShapeMismatch("noise points must be nonempty")
    if noise_probs is None:
        probs = np.full(pts.size, 1.0 / pts.size)
    else:
        probs = np.asarray(noise_probs, dtype=float)
    if pts.shape != probs.shape:
        raise ShapeMismatch("noise points and probs must have the same length")
    cond_names = _cond_names(base, (a, b), None)
    assignments = classes_per_c(base, a, b, cond_names, tau, adjacency)
    a_pos, b_pos = base.axis_index(a), base.axis_index(b)
    cond_pos = [base.axis_index(n) for n in cond_names]

    cells = np.argwhere(base.prob > 0)
    levels = np.empty(len(cells))
    for row, idx in enumerate(cells):
        c_cell = tuple(int(idx[p]) for p in cond_pos)
        uc = int(assignments[c_cell].uc[idx[a_pos], idx[b_pos]])
        levels[row] = float(g(c_cell, uc))

    values = np.unique(np.round(levels[:, None] + pts[None, :], 9))
    x_axis = Axis(name, tuple(float(v) for v in values))
    out = np.zeros((values.size,) + base.prob.shape)
    masses = base.prob[tuple(cells.T)]
    for k, (offset, p_k) in enumerate(zip(pts, probs)):
        x_idx = np.searchsorted(values, np.round(levels + offset, 9))
        out[(x_idx, *cells.T)] += masses * p_k
    result = DensityGrid((x_axis, *base.axes), out)
    validate(result)
    return result


def construct_adversary(
    base: DensityGrid,
    target_c: Mapping[str, int] | None = None,
    noise_halfwidth: float = 0.1,
    levels: tuple[float, float] = (0.0, 10.0),
    a: str = "A",
    b: str = "B",
    name: str = "X",
    tau: float = ZERO_TOL,
    adjacency: int = 4,
) -> DensityGrid:
    """Build a variable violating the intersection implication on ``base``.

    ``base`` must have at least two support classes at ``target_c`` (the
    first multi-class conditioning cell is picked when none is given);
    :class:`SingleClass` otherwise, since with one class no violating
    variable exists.  The output joint satisfies both premises within
    1e-9 and breaks the conclusion: the pointwise conditional residual of
    x vs b at the target cell is at least ``max(w, 1-w) / 5 >= 0.1`` with
    ``w`` the class-1 mass of the target slice.  Both postconditions are
    asserted before returning.
    """
    lo, hi = float(levels[0]), float(levels[1])
    if abs(hi - lo) <= 2.0 * noise_halfwidth:
        raise ShapeMismatch(
            f"levels {levels} closer than the noise band width "
            f"{2.0 * noise_halfwidth}; bands must not overlap"
        )
    cond_names = _cond_names(base, (a, b), None)
    assignments = classes_per_c(base, a, b, cond_names, tau, adjacency)
    if target_c is None:
        target = next(
            (cell for cell, asg in assignments.items() if asg.class_count >= 2),
            None,
        )
        if target is None:
            raise SingleClass("no conditioning cell has two or more classes")
    else:
        extra = set(target_c) - set(cond_names)
        missing = set(cond_names) - set(target_c)
        if extra or missing:
            raise ShapeMismatch(
                f"target cell must fix exactly the conditioning axes {cond_names}; "
                f"got {sorted(target_c)}"
            )
        target = tuple(int(target_c[n]) for n in cond_names)
        if target not in assignments:
            raise SingleClass(f"target cell {dict(target_c)} has no positive mass")
        if assignments[target].class_count < 2:
            raise SingleClass(
                f"target cell has {assignments[target].class_count} class(es); need >= 2"
            )

    def g(c_cell: tuple[int, ...], uc: int) -> float:
        return hi if (c_cell == target and uc == 1) else lo

    noise = np.linspace(-noise_halfwidth, noise_halfwidth, 5)
    result = attach_class_variable(
        base, g, noise, a=a, b=b, name=name, tau=tau, adjacency=adjacency
    )
    dev_xa, _ = ci_deviation(result, name, a, (b, *cond_names))
    dev_xb, _ = ci_deviation(result, name, b, (a, *cond_names))
    assert dev_xa <= 1e-9 and dev_xb <= 1e-9, (dev_xa, dev_xb)
    pointwise = pointwise_deviation(result, name, b, cond_names)
    assert pointwise >= 0.1 * (1.0 - 1e-9), pointwise
    assert not is_ci(result, name, (a, b), cond_names).holds
    return result

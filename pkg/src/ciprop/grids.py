"""Exact finite-grid joint distributions and conditional-independence tests.

A :class:`DensityGrid` is a joint probability mass function over named,
strictly increasing real axes.  All operations are pure: grids are frozen
and their tables are read-only, so values can be shared freely across
threads.

Conditional independence of ``X`` and ``A`` given ``C`` is measured per
conditioning cell ``c`` with ``p(c)`` above the positivity cutoff as the
total-variation distance between the joint conditional ``p(x, a | c)`` and
the product ``p(x | c) p(a | c)``; the reported deviation is the maximum
over conditioning cells.  The deviation is a probability in ``[0, 1]``, is
zero exactly when the factorization holds cell-wise, is symmetric in the
``x`` / ``a`` roles, and does not shrink as axes are refined (a pointwise
mass residual would scale like the cell mass itself and vanish under
refinement, which makes it useless as a dependence threshold).

The classical equivalent form ``p(x | a, c) = p(x | c)`` is exposed as a
pointwise residual (:func:`pointwise_deviation`) for cross-checking.  The two
residuals vanish together; quantitatively, with ``pa*`` the smallest
positive conditional mass ``p(a | c)``, the pointwise form is bounded by
``2 * tv / pa*`` and the per-cell mass residual by ``2 * tv``, so verdict
agreement at tolerance ``tol`` is guaranteed on grids whose deviations are
either ~0 (exact constructions) or far above ``tol``.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import (
    IndexOutOfRange,
    NegativeMass,
    NotNormalized,
    OverlappingRoles,
    ShapeMismatch,
    UnknownAxis,
    ZeroMassCondition,
)
from .jsonio import render_json

# A cell counts as positive iff its mass exceeds ZERO_TOL; the discrete
# analogue of the p(.) > 0 quantifiers needs a cutoff robust to float
# accumulation.
ZERO_TOL = 1e-12
# |sum - 1| tolerance for a valid probability table.
NORM_TOL = 1e-9
# Default verdict tolerance for conditional-independence checks.
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class Axis:
    """A named axis with strictly increasing grid coordinates (bin centers)."""

    name: str
    points: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.name:
            raise ShapeMismatch("axis name must be a nonempty string")
        pts = tuple(float(p) for p in self.points)
        if not pts:
            raise ShapeMismatch(f"axis {self.name!r}: points must be nonempty")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ShapeMismatch(
                f"axis {self.name!r}: points must be strictly increasing"
            )
        object.__setattr__(self, "points", pts)

    @property
    def size(self) -> int:
        return len(self.points)

    def values(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float)


@dataclass(frozen=True)
class DensityGrid:
    """A joint pmf over named axes; ``prob`` is row-major over axis order."""

    axes: tuple[Axis, ...]
    prob: np.ndarray

    def __post_init__(self) -> None:
        axes = tuple(self.axes)
        names = [ax.name for ax in axes]
        if len(set(names)) != len(names):
            raise ShapeMismatch(f"duplicate axis names in {names}")
        shape = tuple(ax.size for ax in axes)
        table = np.asarray(self.prob, dtype=float)
        if table.ndim == 1:
            if table.size != int(np.prod(shape)):
                raise ShapeMismatch(
                    f"table has {table.size} entries, axes imply {np.prod(shape)}"
                )
            table = table.reshape(shape)
        elif table.shape != shape:
            raise ShapeMismatch(f"table shape {table.shape} != axes shape {shape}")
        table = np.ascontiguousarray(table)
        table.flags.writeable = False
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "prob", table)

    # -- axis lookup ----------------------------------------------------

    @property
    def axis_names(self) -> tuple[str, ...]:
        return tuple(ax.name for ax in self.axes)

    def axis_index(self, name: str) -> int:
        for i, ax in enumerate(self.axes):
            if ax.name == name:
                return i
        raise UnknownAxis(f"no axis named {name!r} (have {self.axis_names})")

    def axis(self, name: str) -> Axis:
        return self.axes[self.axis_index(name)]


@dataclass(frozen=True)
class CiReport:
    """Verdict of a conditional-independence test.

    ``deviation`` is the max-over-conditioning-cells total-variation
    residual of the factorization; ``witness`` is the (x-bins, a-bins,
    cond-bins) index triple of the largest single-cell residual inside the
    worst conditioning slice.  ``pointwise_deviation`` is the pointwise
    residual of the equivalent form ``p(x | a, c) = p(x | c)``.
    """

    holds: bool
    deviation: float
    witness: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]
    tol: float
    pointwise_deviation: float | None = None


def validate(grid: DensityGrid) -> None:
    """Raise unless ``grid`` is a valid joint pmf.

    Structural invariants (shape, axis names, monotone points) are enforced
    at construction; this checks nonnegativity and normalization.
    """
    table = grid.prob
    if table.size and float(table.min()) < 0.0:
        idx = np.unravel_index(int(np.argmin(table)), table.shape)
        raise NegativeMass(f"entry {idx} is {table[idx]!r}")
    total = float(table.sum())
    if abs(total - 1.0) > NORM_TOL:
        raise NotNormalized(f"entries sum to {total!r}, not 1")


def marginalize(grid: DensityGrid, keep: Iterable[str]) -> DensityGrid:
    """Sum out every axis not named in ``keep``; original axis order kept."""
    wanted = set(_as_names(keep))
    if not wanted:
        raise ShapeMismatch("keep must name at least one axis")
    have = set(grid.axis_names)
    missing = wanted - have
    if missing:
        raise UnknownAxis(f"unknown axes {sorted(missing)} (have {grid.axis_names})")
    drop = tuple(i for i, ax in enumerate(grid.axes) if ax.name not in wanted)
    kept = tuple(ax for ax in grid.axes if ax.name in wanted)
    table = grid.prob.sum(axis=drop) if drop else grid.prob
    return DensityGrid(kept, table)


def condition(grid: DensityGrid, fixed: Mapping[str, int]) -> DensityGrid:
    """Slice at the fixed bins and renormalize; the fixed axes are dropped."""
    if not fixed:
        return grid
    slicer: list[object] = [slice(None)] * len(grid.axes)
    for name, bin_idx in fixed.items():
        i = grid.axis_index(name)
        if not 0 <= int(bin_idx) < grid.axes[i].size:
            raise IndexOutOfRange(
                f"bin {bin_idx} out of range for axis {name!r} "
                f"(size {grid.axes[i].size})"
            )
        slicer[i] = int(bin_idx)
    remaining = tuple(ax for ax in grid.axes if ax.name not in fixed)
    if not remaining:
        raise ShapeMismatch("conditioning on every axis leaves an empty grid")
    block = grid.prob[tuple(slicer)]
    mass = float(block.sum())
    if mass <= ZERO_TOL:
        raise ZeroMassCondition(f"slice {dict(fixed)} has mass {mass!r}")
    return DensityGrid(remaining, block / mass)


def _as_names(spec: str | Iterable[str]) -> tuple[str, ...]:
    if isinstance(spec, str):
        return (spec,)
    return tuple(spec)


def _role_layout(
    grid: DensityGrid,
    x: str | Sequence[str],
    a: str | Sequence[str],
    cond: Iterable[str],
) -> tuple[np.ndarray, tuple[str, ...], tuple[str, ...], tuple[str, ...], tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    """Marginalize to the involved axes and reshape as (cond, x, a) masses."""
    x_names, a_names, c_names = _as_names(x), _as_names(a), _as_names(cond)
    if not x_names or not a_names:
        raise ShapeMismatch("x and a must each name at least one axis")
    roles = (*x_names, *a_names, *c_names)
    if len(set(roles)) != len(roles):
        raise OverlappingRoles(f"roles overlap: x={x_names} a={a_names} cond={c_names}")
    sub = marginalize(grid, roles) if set(roles) != set(grid.axis_names) else grid
    # grid order within each role group keeps witnesses deterministic
    x_ord = tuple(n for n in sub.axis_names if n in x_names)
    a_ord = tuple(n for n in sub.axis_names if n in a_names)
    c_ord = tuple(n for n in sub.axis_names if n in c_names)
    perm = tuple(sub.axis_index(n) for n in (*c_ord, *x_ord, *a_ord))
    arr = np.transpose(sub.prob, perm)
    c_shape = arr.shape[: len(c_ord)]
    x_shape = arr.shape[len(c_ord) : len(c_ord) + len(x_ord)]
    a_shape = arr.shape[len(c_ord) + len(x_ord) :]
    flat = arr.reshape(
        int(np.prod(c_shape, dtype=int)) if c_ord else 1,
        int(np.prod(x_shape, dtype=int)),
        int(np.prod(a_shape, dtype=int)),
    )
    return flat, x_ord, a_ord, c_ord, x_shape, a_shape, c_shape


def ci_deviation(
    grid: DensityGrid,
    x: str | Sequence[str],
    a: str | Sequence[str],
    cond: Iterable[str] = (),
) -> tuple[float, tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]]:
    """Factorization residual of ``x`` vs ``a`` given the ``cond`` axes.

    Returns ``(deviation, witness)`` where deviation is the worst
    total-variation distance between ``p(x, a | c)`` and
    ``p(x | c) p(a | c)`` over conditioning cells with mass above
    ``ZERO_TOL``, and witness locates the largest single-cell residual in
    the worst slice (first maximum in row-major order).
    """
    flat, _, _, _, x_shape, a_shape, c_shape = _role_layout(grid, x, a, cond)
    masses = flat.sum(axis=(1, 2))
    valid = np.flatnonzero(masses > ZERO_TOL)
    if valid.size == 0:
        raise ZeroMassCondition("no conditioning cell has positive mass")
    slices = flat[valid] / masses[valid, None, None]
    px = slices.sum(axis=2)
    pa = slices.sum(axis=1)
    resid = np.abs(slices - px[:, :, None] * pa[:, None, :])
    tv = 0.5 * resid.sum(axis=(1, 2))
    k = int(np.argmax(tv))
    cell = np.unravel_index(int(np.argmax(resid[k])), resid[k].shape)
    c_idx = (
        tuple(int(v) for v in np.unravel_index(int(valid[k]), c_shape))
        if c_shape
        else ()
    )
    x_idx = tuple(int(v) for v in np.unravel_index(int(cell[0]), x_shape))
    a_idx = tuple(int(v) for v in np.unravel_index(int(cell[1]), a_shape))
    return float(tv[k]), (x_idx, a_idx, c_idx)


def pointwise_deviation(
    grid: DensityGrid,
    x: str | Sequence[str],
    a: str | Sequence[str],
    cond: Iterable[str] = (),
) -> float:
    """Pointwise residual ``max |p(x | a, c) - p(x | c)|``.

    The max runs over cells with ``p(a, c)`` and ``p(c)`` above
    ``ZERO_TOL``, mirroring the positivity quantifiers of the classical
    equivalent form of conditional independence.
    """
    flat, *_ = _role_layout(grid, x, a, cond)
    masses = flat.sum(axis=(1, 2))
    valid = np.flatnonzero(masses > ZERO_TOL)
    if valid.size == 0:
        raise ZeroMassCondition("no conditioning cell has positive mass")
    sub = flat[valid]
    px_c = sub.sum(axis=2) / masses[valid, None]
    m_ac = sub.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        px_ac = sub / m_ac[:, None, :]
    resid = np.abs(px_ac - px_c[:, :, None])
    resid[~np.broadcast_to((m_ac > ZERO_TOL)[:, None, :], resid.shape)] = 0.0
    return float(resid.max())


def is_ci(
    grid: DensityGrid,
    x: str | Sequence[str],
    a: str | Sequence[str],
    cond: Iterable[str] = (),
    tol: float = DEFAULT_TOL,
) -> CiReport:
    """Test ``x`` independent of ``a`` given ``cond`` at tolerance ``tol``."""
    if tol <= 0:
        raise ShapeMismatch(f"tol must be positive, got {tol!r}")
    dev, witness = ci_deviation(grid, x, a, cond)
    pointwise = pointwise_deviation(grid, x, a, cond)
    return CiReport(
        holds=dev <= tol,
        deviation=dev,
        witness=witness,
        tol=tol,
        pointwise_deviation=pointwise,
    )


def flatten_axes(
    grid: DensityGrid, names: Sequence[str], new_name: str
) -> DensityGrid:
    """Merge several axes into one product axis.

    The merged axis sits at the position of the first named axis and runs
    row-major over the constituents in grid order; its coordinates are the
    synthetic values 0, 1, 2, ... (bin enumeration), since no single real
    coordinate exists for a product cell.  Projection-overlap semantics
    are preserved: two distributions agree on a product bin exactly when
    they agree on the underlying bin tuple.
    """
    group = _as_names(names)
    if len(group) < 2:
        raise ShapeMismatch("flattening needs at least two axes")
    if len(set(group)) != len(group):
        raise OverlappingRoles(f"duplicate axes in {group}")
    positions = sorted(grid.axis_index(n) for n in group)
    keep_group = [grid.axes[i].name for i in positions]
    others = [ax.name for ax in grid.axes if ax.name not in group]
    if new_name in others:
        raise ShapeMismatch(f"axis {new_name!r} already exists")
    first = positions[0]
    before = [n for n in others if grid.axis_index(n) < first]
    after = [n for n in others if grid.axis_index(n) > first]
    perm = tuple(grid.axis_index(n) for n in (*before, *keep_group, *after))
    table = np.transpose(grid.prob, perm)
    sizes = [grid.axis(n).size for n in keep_group]
    merged = int(np.prod(sizes))
    shape = (
        tuple(grid.axis(n).size for n in before)
        + (merged,)
        + tuple(grid.axis(n).size for n in after)
    )
    axes = (
        tuple(grid.axis(n) for n in before)
        + (Axis(new_name, tuple(float(k) for k in range(merged))),)
        + tuple(grid.axis(n) for n in after)
    )
    return DensityGrid(axes, table.reshape(shape))


# -- file format ---------------------------------------------------------


def grid_to_json(grid: DensityGrid) -> str:
    """Serialize with 17 significant digits (exact float64 round-trip)."""
    return render_json(
        {
            "axes": [
                {"name": ax.name, "points": list(ax.points)} for ax in grid.axes
            ],
            "prob": [float(v) for v in grid.prob.ravel()],
        }
    )


def save_grid(grid: DensityGrid, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(grid_to_json(grid))


def grid_from_json(text: str) -> DensityGrid:
    """Parse, canonicalize axis order alphabetically, and validate."""
    doc = json.loads(text)
    try:
        axes = tuple(Axis(a["name"], tuple(a["points"])) for a in doc["axes"])
        table = np.asarray(doc["prob"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise ShapeMismatch(f"malformed grid document: {exc}") from exc
    grid = DensityGrid(axes, table)
    order = sorted(range(len(axes)), key=lambda i: axes[i].name)
    if order != list(range(len(axes))):
        grid = DensityGrid(
            tuple(axes[i] for i in order), np.transpose(grid.prob, order)
        )
    validate(grid)
    return grid


def load_grid(path: str) -> DensityGrid:
    with open(path, "r", encoding="utf-8") as fh:
        return grid_from_json(fh.read())

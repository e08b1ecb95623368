"""Command-line front end: load files, run analyses, print stable reports.

Exit codes: 0 success, 1 a ``--assert`` expectation failed, 2 usage error,
3 data error (unreadable or invalid input).  Reports are deterministic
given the same inputs and flags; the one wall-clock line in ``report`` is
suppressed under ``--deterministic``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass

import numpy as np

from .errors import CipropError
from .grids import (
    DEFAULT_TOL,
    ZERO_TOL,
    CiReport,
    DensityGrid,
    is_ci,
    load_grid,
    save_grid,
)
from .grids import marginalize
from .intersection import (
    IntersectionVerdict,
    classes_per_c,
    construct_adversary,
    intersection_condition,
    verify_intersection,
    verify_weak_intersection,
)
from .sem import (
    example1,
    example1_alternative,
    joint_support_components,
    load_sem,
    non_constancy_check,
    noise_support_path_connected,
    propagate,
    save_sem,
)
from .topology import (
    coordinatewise_classes,
    path_components,
    render_labels,
    support_mask,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def _parse_fixed(pairs: list[str] | None) -> dict[str, int]:
    fixed = {}
    for pair in pairs or []:
        name, eq, idx = pair.partition("=")
        if not eq or not name:
            raise _UsageError(f"expected axis=bin, got {pair!r}")
        try:
            fixed[name] = int(idx)
        except ValueError:
            raise _UsageError(f"bin index in {pair!r} is not an integer") from None
    return fixed


def _runs(bins: tuple[int, ...]) -> str:
    if not bins:
        return "-"
    parts = []
    start = prev = bins[0]
    for b in bins[1:]:
        if b == prev + 1:
            prev = b
            continue
        parts.append(f"{start}-{prev}" if prev > start else f"{start}")
        start = prev = b
    parts.append(f"{start}-{prev}" if prev > start else f"{start}")
    return ",".join(parts)


def _cell_name(cell: tuple[int, ...]) -> str:
    return "(" + ",".join(str(v) for v in cell) + ")" if cell else "(-)"


def _ci_line(label: str, report: CiReport) -> str:
    status = "holds" if report.holds else "FAILS"
    return (
        f"{label}: {status} deviation={report.deviation:.6e} "
        f"pointwise_residual={report.pointwise_deviation:.6e} tol={report.tol:.1e}"
    )


def _finish(args: argparse.Namespace, holds: bool | None) -> int:
    expect = getattr(args, "assert_", None)
    if expect is None:
        return 0
    if holds is None:
        raise _UsageError("--assert is not applicable to this invocation")
    return 0 if holds == (expect == "holds") else 1


# -- subcommand handlers ---------------------------------------------------


def _cmd_check_ci(args: argparse.Namespace) -> int:
    grid = load_grid(args.grid)
    x = args.x if len(args.x) > 1 else args.x[0]
    a = args.a if len(args.a) > 1 else args.a[0]
    report = is_ci(grid, x, a, tuple(args.cond), args.tol)
    label = f"{'+'.join(args.x)} _||_ {'+'.join(args.a)} | {','.join(args.cond) or '-'}"
    print(_ci_line(label, report))
    print(f"witness: x={report.witness[0]} a={report.witness[1]} c={report.witness[2]}")
    return _finish(args, report.holds)


def _cond_axes(grid: DensityGrid, a: str, b: str, x: str | None) -> tuple[str, ...]:
    return tuple(n for n in grid.axis_names if n not in (a, b) and n != x)


def _topology_slices(args: argparse.Namespace, grid: DensityGrid):
    fixed = _parse_fixed(args.c)
    if fixed:
        return [(tuple(fixed[k] for k in sorted(fixed)), fixed)]
    cond = _cond_axes(grid, args.a, args.b, args.x)
    if not cond:
        return [((), {})]
    from .intersection import _c_cells  # shared positive-cell enumeration

    return _c_cells(grid, cond, args.tau)


def _cmd_components(args: argparse.Namespace) -> int:
    grid = load_grid(args.grid)
    for cell, fixed in _topology_slices(args, grid):
        mask = support_mask(grid, args.a, args.b, fixed, args.tau)
        labeling = path_components(mask, args.adjacency)
        print(f"c-cell {_cell_name(cell)}: components={labeling.count}")
        print(render_labels(labeling.labels))
    return 0


def _cmd_classes(args: argparse.Namespace) -> int:
    grid = load_grid(args.grid)
    single_class = True
    for cell, fixed in _topology_slices(args, grid):
        mask = support_mask(grid, args.a, args.b, fixed, args.tau)
        labeling = path_components(mask, args.adjacency)
        assignment = coordinatewise_classes(labeling)
        single_class = single_class and assignment.class_count <= 1
        print(
            f"c-cell {_cell_name(cell)}: components={labeling.count} "
            f"classes={assignment.class_count}"
        )
        for cls in range(1, assignment.class_count + 1):
            print(
                f"  class {cls}: {args.a} bins {_runs(assignment.proj_a[cls])} "
                f"| {args.b} bins {_runs(assignment.proj_b[cls])}"
            )
        print(render_labels(assignment.uc))
    return _finish(args, single_class)


def _cmd_intersection(args: argparse.Namespace) -> int:
    grid = load_grid(args.grid)
    cond = _cond_axes(grid, args.a, args.b, args.x)
    verdict = intersection_condition(
        grid, args.a, args.b, cond, args.tau, args.adjacency
    )
    for cell in sorted(verdict.per_c_class_counts):
        print(f"c-cell {_cell_name(cell)}: classes={verdict.per_c_class_counts[cell]}")
    print(f"intersection: {'HOLDS' if verdict.holds else 'FAILS'}")
    if not verdict.holds:
        print(f"failing c-cell: {_cell_name(verdict.failing_c)}")
        if args.out:
            base = marginalize(grid, (args.a, args.b, *cond))
            target = dict(zip(cond, verdict.failing_c)) if cond else None
            adversary = construct_adversary(
                base, target, a=args.a, b=args.b, tau=args.tau,
                adjacency=args.adjacency,
            )
            save_grid(adversary, args.out)
            print(f"adversary grid written to {args.out}")
    return _finish(args, verdict.holds)


def _cmd_adversary(args: argparse.Namespace) -> int:
    grid = load_grid(args.grid)
    target = _parse_fixed(args.target) or None
    adversary = construct_adversary(
        grid,
        target,
        noise_halfwidth=args.halfwidth,
        levels=(args.levels[0], args.levels[1]),
        a=args.a,
        b=args.b,
        name=args.x,
        tau=args.tau,
        adjacency=args.adjacency,
    )
    save_grid(adversary, args.out)
    cond = tuple(n for n in grid.axis_names if n not in (args.a, args.b))
    report = verify_intersection(adversary, args.x, args.a, args.b, cond, args.tol)
    print(f"adversary grid written to {args.out}")
    print(_ci_line(f"{args.x} _||_ {args.a} | {args.b}", report.premise_xa))
    print(_ci_line(f"{args.x} _||_ {args.b} | {args.a}", report.premise_xb))
    print(_ci_line(f"{args.x} _||_ ({args.a},{args.b})", report.conclusion))
    print(f"implication violated: {not report.implication_holds}")
    return 0


def _cmd_weak_intersection(args: argparse.Namespace) -> int:
    grid = load_grid(args.grid)
    report = verify_weak_intersection(
        grid, args.x, args.a, args.b, None, args.tol, args.tau, args.adjacency
    )
    for (cell, cls), residual in sorted(report.per_class.items()):
        print(f"c-cell {_cell_name(cell)} class {cls}: residual={residual:.6e}")
    status = "holds" if report.holds else "FAILS"
    print(f"weak intersection: {status} worst_residual={report.residual:.6e}")
    return _finish(args, report.holds)


def _cmd_sem_propagate(args: argparse.Namespace) -> int:
    sem = load_sem(args.sem)
    grid = propagate(sem)
    save_grid(grid, args.out)
    shape = " x ".join(f"{ax.name}({ax.size})" for ax in grid.axes)
    print(f"propagated grid over {shape} written to {args.out}")
    print(f"support cells: {int(np.count_nonzero(grid.prob > ZERO_TOL))}")
    return 0


def _cmd_sem_example(args: argparse.Namespace, alt: bool) -> int:
    sem = example1_alternative(args.step) if alt else example1(args.step)
    save_sem(sem, args.out)
    print(f"model written to {args.out}")
    return 0


def _cmd_sem_prop3(args: argparse.Namespace) -> int:
    sem = load_sem(args.sem)
    connected = noise_support_path_connected(sem)
    for node in sorted(connected):
        print(f"noise[{node}]: {'connected' if connected[node] else 'DISCONNECTED'}")
    components = joint_support_components(propagate(sem))
    print(f"joint support components: {components}")
    holds = all(connected.values()) and components == 1
    print(f"path-connected joint support: {'yes' if holds else 'no'}")
    return _finish(args, holds)


def _cmd_sem_prop4(args: argparse.Namespace) -> int:
    sem = load_sem(args.sem)
    report = non_constancy_check(sem, args.node, args.parent)
    for cset in sorted(report.witnesses, key=lambda c: (len(c), c)):
        xj, xj2, others, cond_vals = report.witnesses[cset]
        print(
            f"C={{{','.join(cset) or ''}}}: witness {args.parent}={xj:g} vs "
            f"{xj2:g}, others={ {k: round(v, 6) for k, v in sorted(others.items())} }, "
            f"cond={ {k: round(v, 6) for k, v in sorted(cond_vals.items())} }"
        )
    if report.failing_set is not None:
        print(f"no witness for C={{{','.join(report.failing_set)}}}")
    print(f"non-constancy: {'holds' if report.holds else 'FAILS'}")
    return _finish(args, report.holds)


@dataclass(frozen=True)
class AnalysisReport:
    """Aggregated single-grid analysis for the ``report`` subcommand."""

    digest: str
    axes: tuple[str, ...]
    per_c: dict[tuple[int, ...], tuple[int, int]]
    ci_rows: tuple[tuple[str, CiReport], ...]
    verdict: IntersectionVerdict
    elapsed: float | None

    def render(self) -> str:
        lines = [f"input sha256: {self.digest}", f"axes: {', '.join(self.axes)}"]
        for cell in sorted(self.per_c):
            comp, cls = self.per_c[cell]
            lines.append(
                f"c-cell {_cell_name(cell)}: components={comp} classes={cls}"
            )
        lines.extend(_ci_line(label, rep) for label, rep in self.ci_rows)
        lines.append(f"intersection: {'HOLDS' if self.verdict.holds else 'FAILS'}")
        if self.elapsed is not None:
            lines.append(f"wall clock: {self.elapsed:.3f}s")
        return "\n".join(lines)


def _cmd_report(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    with open(args.grid, "rb") as fh:
        digest = hashlib.sha256(fh.read()).hexdigest()[:16]
    grid = load_grid(args.grid)
    cond = _cond_axes(grid, args.a, args.b, args.x)
    assignments = classes_per_c(grid, args.a, args.b, cond, args.tau, args.adjacency)
    per_c = {}
    for cell, assignment in assignments.items():
        mask = support_mask(grid, args.a, args.b, dict(zip(cond, cell)), args.tau)
        comp = path_components(mask, args.adjacency).count
        per_c[cell] = (comp, assignment.class_count)
    ci_rows: list[tuple[str, CiReport]] = []
    if args.x in grid.axis_names:
        ci_rows = [
            (
                f"{args.x} _||_ {args.a} | {args.b}",
                is_ci(grid, args.x, args.a, (args.b, *cond), args.tol),
            ),
            (
                f"{args.x} _||_ {args.b} | {args.a}",
                is_ci(grid, args.x, args.b, (args.a, *cond), args.tol),
            ),
            (
                f"{args.x} _||_ ({args.a},{args.b})",
                is_ci(grid, args.x, (args.a, args.b), cond, args.tol),
            ),
        ]
    verdict = intersection_condition(
        grid, args.a, args.b, cond, args.tau, args.adjacency
    )
    elapsed = None if args.deterministic else time.perf_counter() - started
    report = AnalysisReport(
        digest=digest,
        axes=tuple(f"{ax.name}({ax.size})" for ax in grid.axes),
        per_c=per_c,
        ci_rows=tuple(ci_rows),
        verdict=verdict,
        elapsed=elapsed,
    )
    print(report.render())
    return _finish(args, verdict.holds)


# -- parser wiring ---------------------------------------------------------


def _add_topology_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--a", default="A", help="first support axis (default A)")
    p.add_argument("--b", default="B", help="second support axis (default B)")
    p.add_argument(
        "--x", default="X",
        help="dependent-variable axis, kept out of the conditioning set",
    )
    p.add_argument("--tau", type=float, default=ZERO_TOL, help="positivity cutoff")
    p.add_argument(
        "--adjacency", type=int, choices=(4, 8), default=4,
        help="component adjacency rule",
    )


def _add_assert_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--assert", dest="assert_", choices=("holds", "fails"), default=None,
        help="exit 1 unless the main verdict matches",
    )


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="CI tolerance")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized runs")
    p.add_argument(
        "--deterministic", action="store_true",
        help="suppress timing output for byte-identical reports",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ciprop", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-ci", help="test one conditional independence")
    p.add_argument("grid")
    p.add_argument("--x", nargs="+", default=["X"])
    p.add_argument("--a", nargs="+", default=["A"])
    p.add_argument("--cond", nargs="*", default=[])
    _add_common(p)
    _add_assert_flag(p)
    p.set_defaults(func=_cmd_check_ci)

    p = sub.add_parser("components", help="label support components")
    p.add_argument("grid")
    p.add_argument("--c", action="append", help="fix a conditioning axis, axis=bin")
    _add_topology_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_components)

    p = sub.add_parser("classes", help="merge components into classes")
    p.add_argument("grid")
    p.add_argument("--c", action="append", help="fix a conditioning axis, axis=bin")
    _add_topology_flags(p)
    _add_common(p)
    _add_assert_flag(p)
    p.set_defaults(func=_cmd_classes)

    p = sub.add_parser("intersection", help="decide the intersection property")
    p.add_argument("grid")
    p.add_argument("-o", dest="out", help="write adversary grid here on failure")
    _add_topology_flags(p)
    _add_common(p)
    _add_assert_flag(p)
    p.set_defaults(func=_cmd_intersection)

    p = sub.add_parser("adversary", help="construct a violating variable")
    p.add_argument("grid")
    p.add_argument("-o", dest="out", required=True)
    p.add_argument("--target", action="append", help="target c-cell, axis=bin")
    p.add_argument("--halfwidth", type=float, default=0.1)
    p.add_argument("--levels", type=float, nargs=2, default=(0.0, 10.0))
    _add_topology_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_adversary)

    p = sub.add_parser("weak-intersection", help="check the class-conditional form")
    p.add_argument("grid")
    _add_topology_flags(p)
    _add_common(p)
    _add_assert_flag(p)
    p.set_defaults(func=_cmd_weak_intersection)

    p = sub.add_parser("report", help="one-stop analysis of a grid file")
    p.add_argument("grid")
    _add_topology_flags(p)
    _add_common(p)
    _add_assert_flag(p)
    p.set_defaults(func=_cmd_report)

    sem_parser = sub.add_parser("sem", help="structural equation model tools")
    sem_sub = sem_parser.add_subparsers(dest="sem_command", required=True)

    p = sem_sub.add_parser("propagate", help="push a model to a grid file")
    p.add_argument("sem")
    p.add_argument("-o", dest="out", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_sem_propagate)

    p = sem_sub.add_parser("example1", help="write the two-block chain benchmark")
    p.add_argument("--step", type=float, default=0.1)
    p.add_argument("-o", dest="out", required=True)
    _add_common(p)
    p.set_defaults(func=lambda a: _cmd_sem_example(a, alt=False))

    p = sem_sub.add_parser(
        "example1-alt", help="write the equivalent fork-shaped model"
    )
    p.add_argument("--step", type=float, default=0.1)
    p.add_argument("-o", dest="out", required=True)
    _add_common(p)
    p.set_defaults(func=lambda a: _cmd_sem_example(a, alt=True))

    p = sem_sub.add_parser("check-prop3", help="path-connected support certificate")
    p.add_argument("sem")
    _add_common(p)
    _add_assert_flag(p)
    p.set_defaults(func=_cmd_sem_prop3)

    p = sem_sub.add_parser("check-prop4", help="mechanism non-constancy witnesses")
    p.add_argument("sem")
    p.add_argument("--node", required=True)
    p.add_argument("--parent", required=True)
    _add_common(p)
    _add_assert_flag(p)
    p.set_defaults(func=_cmd_sem_prop4)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except CipropError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 3
    except json.JSONDecodeError as exc:
        print(f"error[BadJson]: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error[IO]: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

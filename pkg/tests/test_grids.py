"""Grid primitives: construction, marginals, conditionals, CI residuals."""

from __future__ import annotations

from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from ciprop import (
    Axis,
    DensityGrid,
    IndexOutOfRange,
    NegativeMass,
    NotNormalized,
    OverlappingRoles,
    ShapeMismatch,
    UnknownAxis,
    ZeroMassCondition,
    ci_deviation,
    condition,
    flatten_axes,
    grid_from_json,
    grid_to_json,
    is_ci,
    pointwise_deviation,
    marginalize,
    validate,
)

import oracles


def make_grid(names_sizes, table):
    axes = tuple(
        Axis(n, tuple(float(k) for k in range(s))) for n, s in names_sizes
    )
    return DensityGrid(axes, np.asarray(table, dtype=float))


def random_grid(rng, names_sizes, zero_frac=0.3):
    shape = tuple(s for _, s in names_sizes)
    table = rng.random(shape) * (rng.random(shape) > zero_frac)
    if table.sum() == 0:
        table.flat[0] = 1.0
    return make_grid(names_sizes, table / table.sum())


# -- construction and validation ------------------------------------------


def test_axis_rejects_bad_points():
    with pytest.raises(ShapeMismatch):
        Axis("A", ())
    with pytest.raises(ShapeMismatch):
        Axis("A", (0.0, 0.0))
    with pytest.raises(ShapeMismatch):
        Axis("A", (1.0, 0.5))
    with pytest.raises(ShapeMismatch):
        Axis("", (0.0, 1.0))


def test_grid_accepts_flat_table_and_is_readonly():
    g = make_grid([("A", 2), ("B", 3)], [0.1, 0.1, 0.1, 0.2, 0.2, 0.3])
    assert g.prob.shape == (2, 3)
    assert not g.prob.flags.writeable
    with pytest.raises(ValueError):
        g.prob[0, 0] = 1.0


def test_grid_shape_checks():
    axes = (Axis("A", (0.0, 1.0)),)
    with pytest.raises(ShapeMismatch):
        DensityGrid(axes, np.zeros((3,)))
    with pytest.raises(ShapeMismatch):
        DensityGrid(axes, np.zeros((2, 2)))
    with pytest.raises(ShapeMismatch):
        DensityGrid((Axis("A", (0.0,)), Axis("A", (0.0,))), np.zeros((1, 1)))


def test_validate_flags_negative_and_unnormalized():
    g = make_grid([("A", 2), ("B", 2)], [[0.6, 0.5], [-0.1, 0.0]])
    with pytest.raises(NegativeMass):
        validate(g)
    g = make_grid([("A", 2)], [0.6, 0.6])
    with pytest.raises(NotNormalized):
        validate(g)
    validate(make_grid([("A", 2)], [0.5, 0.5]))


def test_axis_lookup():
    g = make_grid([("B", 2), ("A", 2)], np.full((2, 2), 0.25))
    assert g.axis_index("A") == 1
    assert g.axis("B").name == "B"
    with pytest.raises(UnknownAxis):
        g.axis_index("C")


# -- marginalize / condition ----------------------------------------------


def test_marginalize_keeps_grid_axis_order():
    g = make_grid([("C", 2), ("A", 2), ("B", 2)], np.full((2, 2, 2), 0.125))
    m = marginalize(g, {"A", "C"})
    assert m.axis_names == ("C", "A")


def test_marginalize_against_oracle():
    rng = np.random.default_rng(7)
    for _ in range(25):
        g = random_grid(rng, [("A", 3), ("B", 2), ("C", 4)])
        names, shape, mass = oracles.dict_grid(g.axis_names, g.prob.tolist())
        for keep in ({"A"}, {"B", "C"}, {"A", "C"}, {"A", "B", "C"}):
            m = marginalize(g, keep)
            onames, oshape, omass = oracles.o_marginal(names, shape, mass, keep)
            assert m.axis_names == onames
            for idx in np.ndindex(*oshape):
                assert abs(m.prob[idx] - omass.get(idx, 0.0)) <= 1e-12


def test_marginalize_errors():
    g = make_grid([("A", 2), ("B", 2)], np.full((2, 2), 0.25))
    with pytest.raises(UnknownAxis):
        marginalize(g, {"A", "Z"})
    with pytest.raises(ShapeMismatch):
        marginalize(g, set())


def test_condition_against_oracle():
    rng = np.random.default_rng(11)
    for _ in range(25):
        g = random_grid(rng, [("A", 3), ("B", 3), ("C", 2)], zero_frac=0.2)
        names, shape, mass = oracles.dict_grid(g.axis_names, g.prob.tolist())
        for fixed in ({"A": 1}, {"C": 0}, {"A": 2, "C": 1}):
            try:
                c = condition(g, fixed)
            except ZeroMassCondition:
                with pytest.raises(ZeroDivisionError):
                    oracles.o_condition(names, shape, mass, fixed)
                continue
            onames, oshape, omass = oracles.o_condition(names, shape, mass, fixed)
            assert c.axis_names == onames
            for idx in np.ndindex(*oshape):
                assert abs(c.prob[idx] - omass.get(idx, 0.0)) <= 1e-12


def test_condition_errors_and_identity():
    g = make_grid([("A", 2), ("B", 2)], [[0.5, 0.5], [0.0, 0.0]])
    assert condition(g, {}) is g
    with pytest.raises(ZeroMassCondition):
        condition(g, {"A": 1})
    with pytest.raises(IndexOutOfRange):
        condition(g, {"A": 2})
    with pytest.raises(ShapeMismatch):
        condition(g, {"A": 0, "B": 0})


# -- CI deviation -----------------------------------------------------------


def test_product_grid_has_zero_deviation():
    px = np.array([0.2, 0.8])
    pa = np.array([0.5, 0.3, 0.2])
    g = make_grid([("X", 2), ("A", 3)], np.outer(px, pa))
    dev, _ = ci_deviation(g, "X", "A")
    assert dev <= 1e-15
    assert is_ci(g, "X", "A").holds


def test_perfectly_coupled_pair_has_half_deviation():
    # p(x,a) = diag(1/2, 1/2): every cell misses the product by 1/4
    g = make_grid([("X", 2), ("A", 2)], [[0.5, 0.0], [0.0, 0.5]])
    dev, witness = ci_deviation(g, "X", "A")
    assert dev == pytest.approx(0.5, abs=1e-15)
    assert witness == ((0,), (0,), ())


def test_deviation_is_symmetric_in_roles():
    rng = np.random.default_rng(3)
    for _ in range(20):
        g = random_grid(rng, [("X", 3), ("A", 4), ("B", 2)])
        d1, _ = ci_deviation(g, "X", "A", ("B",))
        d2, _ = ci_deviation(g, "A", "X", ("B",))
        assert d1 == pytest.approx(d2, abs=1e-14)


def test_deviation_against_oracle():
    rng = np.random.default_rng(19)
    for _ in range(25):
        g = random_grid(rng, [("A", 3), ("B", 2), ("C", 3), ("X", 2)])
        names, shape, mass = oracles.dict_grid(g.axis_names, g.prob.tolist())
        for x, a, cond in [
            ("X", "A", ()),
            ("X", "A", ("B",)),
            ("X", "B", ("A", "C")),
            ("X", ("A", "B"), ("C",)),
        ]:
            dev, _ = ci_deviation(g, x, a, cond)
            ref = oracles.o_ci_tv(names, shape, mass, x, a, cond)
            assert dev == pytest.approx(ref, abs=1e-12)


def test_witness_points_at_largest_residual():
    rng = np.random.default_rng(5)
    for _ in range(10):
        g = random_grid(rng, [("X", 3), ("A", 3)])
        dev, ((xi,), (ai,), ()) = ci_deviation(g, "X", "A")
        px = g.prob.sum(axis=1)
        pa = g.prob.sum(axis=0)
        resid = np.abs(g.prob - np.outer(px, pa))
        assert resid[xi, ai] == pytest.approx(resid.max(), abs=1e-15)


def test_role_validation():
    g = make_grid([("X", 2), ("A", 2)], np.full((2, 2), 0.25))
    with pytest.raises(OverlappingRoles):
        ci_deviation(g, "X", "X")
    with pytest.raises(OverlappingRoles):
        ci_deviation(g, "X", "A", ("A",))
    with pytest.raises(UnknownAxis):
        ci_deviation(g, "X", "Z")
    with pytest.raises(ShapeMismatch):
        is_ci(g, "X", "A", tol=0.0)


def test_zero_mass_conditioning_rejected():
    g = make_grid([("X", 2), ("A", 2), ("C", 2)], np.zeros((2, 2, 2)))
    with pytest.raises(ZeroMassCondition):
        ci_deviation(g, "X", "A", ("C",))


def test_pointwise_residual_tracks_tv_verdict():
    # both residuals vanish on conditionally independent grids and are
    # macroscopic on strongly coupled ones
    rng = np.random.default_rng(23)
    for _ in range(10):
        px = rng.random((3, 2)) + 0.1  # p(x|b)
        pa = rng.random((4, 2)) + 0.1  # p(a|b)
        px /= px.sum(axis=0)
        pa /= pa.sum(axis=0)
        pb = np.array([0.4, 0.6])
        joint = np.einsum("xb,ab,b->xab", px, pa, pb)
        g = make_grid([("X", 3), ("A", 4), ("B", 2)], joint)
        assert pointwise_deviation(g, "X", "A", ("B",)) <= 1e-12
        dev, _ = ci_deviation(g, "X", "A", ("B",))
        assert dev <= 1e-12
    coupled = make_grid([("X", 2), ("A", 2)], [[0.5, 0.0], [0.0, 0.5]])
    assert pointwise_deviation(coupled, "X", "A") == pytest.approx(0.5)


def test_exhaustive_dyadic_suite_matches_exact_verdicts():
    # every 2x2x2 table with entries in {0, 1/8, 1/4}: the float verdict at
    # tol 1e-9 must equal the Fraction-exact factorization check
    levels = (Fraction(0), Fraction(1, 8), Fraction(1, 4))
    mismatches = 0
    checked = 0
    for combo in product(range(3), repeat=8):
        cells = [levels[c] for c in combo]
        total = sum(cells)
        if total == 0:
            continue
        norm = [c / total for c in cells]
        table = [
            [[norm[0], norm[1]], [norm[2], norm[3]]],
            [[norm[4], norm[5]], [norm[6], norm[7]]],
        ]
        exact = oracles.o_ci_exact(table)
        g = make_grid(
            [("X", 2), ("A", 2), ("B", 2)],
            np.asarray([float(v) for v in norm]).reshape(2, 2, 2),
        )
        try:
            verdict = is_ci(g, "X", "A", ("B",)).holds
        except ZeroMassCondition:
            # every b-slice empty cannot happen with total > 0
            raise
        checked += 1
        if verdict != exact:
            mismatches += 1
        # the pointwise residual must reach the same verdict as the TV one
        assert (pointwise_deviation(g, "X", "A", ("B",)) <= 1e-9) == verdict
    assert checked == 3**8 - 1
    assert mismatches == 0


# -- multi-axis roles and flattening ----------------------------------------


def test_grouped_role_equals_flattened_axis():
    rng = np.random.default_rng(31)
    for _ in range(10):
        g = random_grid(rng, [("X", 2), ("A", 3), ("B", 2), ("C", 2)])
        dev_group, _ = ci_deviation(g, "X", ("A", "B"), ("C",))
        flat = flatten_axes(g, ("A", "B"), "AB")
        dev_flat, _ = ci_deviation(flat, "X", "AB", ("C",))
        assert dev_group == pytest.approx(dev_flat, abs=1e-14)


def test_flatten_axes_preserves_mass_and_marginals():
    rng = np.random.default_rng(37)
    g = random_grid(rng, [("A", 3), ("B", 4), ("C", 2)])
    flat = flatten_axes(g, ("A", "B"), "AB")
    assert flat.axis_names == ("AB", "C")
    assert flat.axis("AB").size == 12
    assert flat.prob.sum() == pytest.approx(1.0, abs=1e-12)
    # row-major: AB bin k corresponds to (a, b) = divmod(k, |B|)
    for k in range(12):
        a, b = divmod(k, 4)
        np.testing.assert_allclose(flat.prob[k], g.prob[a, b], atol=0)
    with pytest.raises(ShapeMismatch):
        flatten_axes(g, ("A",), "A2")
    with pytest.raises(OverlappingRoles):
        flatten_axes(g, ("A", "A"), "AA")
    with pytest.raises(ShapeMismatch):
        flatten_axes(g, ("A", "B"), "C")


# -- file format -------------------------------------------------------------


def test_json_round_trip_is_exact():
    rng = np.random.default_rng(41)
    g = random_grid(rng, [("A", 3), ("B", 2)])
    back = grid_from_json(grid_to_json(g))
    assert back.axis_names == g.axis_names
    assert np.array_equal(back.prob, g.prob)
    assert back.axes == g.axes


def test_json_loader_sorts_axes_alphabetically():
    table = np.array([[0.1, 0.2, 0.3], [0.15, 0.05, 0.2]])
    g = DensityGrid((Axis("X", (0.0, 1.0)), Axis("A", (0.0, 1.0, 2.0))), table)
    back = grid_from_json(grid_to_json(g))
    assert back.axis_names == ("A", "X")
    assert np.array_equal(back.prob, table.T)


def test_json_loader_validates():
    bad = '{"axes": [{"name": "A", "points": [0.0, 1.0]}], "prob": [0.5, -0.1]}'
    with pytest.raises(NegativeMass):
        grid_from_json(bad)
    bad = '{"axes": [{"name": "A", "points": [0.0, 1.0]}], "prob": [0.9, 0.2]}'
    with pytest.raises(NotNormalized):
        grid_from_json(bad)
    with pytest.raises(ShapeMismatch):
        grid_from_json('{"axes": [], "prob": []}')
    with pytest.raises(ShapeMismatch):
        grid_from_json('{"prob": [1.0]}')


def test_json_preserves_awkward_floats():
    pts = (0.1, 0.1 + 0.2, 1.0 / 3.0)
    g = DensityGrid((Axis("A", pts),), np.array([0.1, 0.2, 0.7]))
    back = grid_from_json(grid_to_json(g))
    assert back.axes[0].points == pts

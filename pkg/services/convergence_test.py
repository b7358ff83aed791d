# services/convergence_test.py
import math

import numpy as np
import pytest

from services.convergence import (
    Grid,
    LipschitzClass,
    ModulusTable,
    check_pointwise_inequality,
    distance_to_set,
    korovkin_display_bound,
    korovkin_error_profile,
    korovkin_errors,
    lattice_membership,
    lipschitz_maximal,
    modulus_of_continuity,
    rate_bound_theorem5,
    rate_bound_theorem6,
    refinement_check,
    weighted_norm,
)
from services.errors import DomainError
from services.functions import DAMPED_SINE, ONE, SQRT, T, T2, TestFunction, corpus
from services.operators import OperatorKind, Variant, v_n
from services.statconv import qn_standard


def test_grid_validation():
    assert Grid(0.0, 5.0, 501).spacing == pytest.approx(0.01)
    with pytest.raises(DomainError):
        Grid(1.0, 1.0, 10)
    with pytest.raises(DomainError):
        Grid(-1.0, 1.0, 10)
    with pytest.raises(DomainError):
        Grid(0.0, 1.0, 1)


def test_modulus_known_values(grid):
    assert modulus_of_continuity(T, 0.2, grid) == pytest.approx(0.2, rel=1e-12)
    assert modulus_of_continuity(SQRT, 0.2, grid) == pytest.approx(math.sqrt(0.2), rel=1e-12)
    assert modulus_of_continuity(ONE, 0.5, grid) == 0.0
    assert modulus_of_continuity(T, 0.0, grid) == 0.0
    assert modulus_of_continuity(DAMPED_SINE, 0.2, grid) <= modulus_of_continuity(DAMPED_SINE, 0.5, grid)


def test_modulus_stays_inside_grid(grid):
    # t^2 на [0, 5]: худшая пара (4.5, 5), а не (5, 5.5)
    assert modulus_of_continuity(T2, 0.5, grid) == pytest.approx(4.75, rel=1e-12)
    assert ModulusTable(T2, grid)(0.5) == pytest.approx(4.75, rel=1e-12)
    assert ModulusTable(T2, grid)(0.37) == pytest.approx(25.0 - 4.63 ** 2, rel=1e-12)


def test_modulus_resolution_guard(grid):
    with pytest.raises(DomainError):
        modulus_of_continuity(T, 0.05, grid)
    with pytest.raises(DomainError):
        modulus_of_continuity(T, -0.1, grid)


def test_modulus_table_matches_direct_and_refines(grid):
    for f in (T, SQRT, DAMPED_SINE):
        table = ModulusTable(f, grid)
        for delta in (0.2, 0.5, 1.3):
            assert table(delta) == pytest.approx(modulus_of_continuity(f, delta, grid), rel=1e-12)
    # δ мельче 10 шагов: сетка измельчается
    assert ModulusTable(SQRT, grid)(0.01) == pytest.approx(0.1, rel=1e-9)


def test_refinement_check(grid):
    coarse, fine, change, ok = refinement_check(DAMPED_SINE, 0.3, grid)
    assert ok
    assert change < 0.01
    assert fine >= coarse - 1e-15


def test_pointwise_inequality(grid):
    rng = np.random.default_rng(3)
    for f in corpus():
        if not f.uniformly_continuous:
            continue
        for _ in range(20):
            t, x = rng.uniform(0.0, 5.0, size=2)
            assert check_pointwise_inequality(f, float(t), float(x), 0.5, grid)


def test_pointwise_inequality_on_all_grid_pairs(small_grid):
    nodes = small_grid.nodes()[::4]
    for f in corpus():
        if not f.uniformly_continuous:
            continue
        table = ModulusTable(f, small_grid)
        for t in nodes:
            for x in nodes:
                assert check_pointwise_inequality(f, float(t), float(x), 0.5, small_grid, modulus=table), (f.name, t, x)


def test_pointwise_inequality_far_points(grid):
    # |sqrt(4) - sqrt(1)| = 1 <= sqrt(0.5) (1 + 3 / 0.5)
    assert check_pointwise_inequality(SQRT, 4.0, 1.0, 0.5, grid)
    assert check_pointwise_inequality(T, 5.0, 0.0, 0.5, grid)


@pytest.mark.parametrize("q", [0.5, 0.9, 0.99])
@pytest.mark.parametrize("n", [5, 10, 50])
def test_theorem5_bound_holds(make_ctx, grid, q, n):
    kind = OperatorKind(Variant.CAI_PRESERVING, n, q)
    ctx = make_ctx(q)
    for f in corpus():
        if not f.uniformly_continuous:
            continue
        table = ModulusTable(f, grid)
        for x in (0.0, 0.5, 1.0, 2.5, 5.0):
            report = rate_bound_theorem5(f, kind, x, ctx, grid, modulus=table)
            assert report.holds, (f.name, x, report)
            assert report.delta >= 0.0


def test_theorem5_at_zero_is_trivial(make_ctx, grid):
    report = rate_bound_theorem5(T, OperatorKind(Variant.CAI_PRESERVING, 10, 0.9), 0.0, make_ctx(0.9), grid)
    assert report.lhs == 0.0
    assert report.rhs == 0.0
    assert report.holds


def test_theorem5_rejects_unbounded_modulus_and_other_kinds(make_ctx, grid):
    with pytest.raises(DomainError):
        rate_bound_theorem5(T2, OperatorKind(Variant.CAI_PRESERVING, 10, 0.9), 1.0, make_ctx(0.9), grid)
    with pytest.raises(DomainError):
        rate_bound_theorem5(T, OperatorKind(Variant.Q_STANCU_BETA, 10, 0.9), 1.0, make_ctx(0.9), grid)


def test_theorem5_linear_function_uses_exact_second_moment(make_ctx, grid):
    # |L(t) - x| <= sqrt(δ), ω(t; h) = h
    kind = OperatorKind(Variant.CAI_PRESERVING, 50, 0.99)
    report = rate_bound_theorem5(T, kind, 5.0, make_ctx(0.99), grid)
    assert report.rhs == pytest.approx(2.0 * math.sqrt(report.delta), rel=1e-9)
    assert report.lhs <= math.sqrt(report.delta) + 1e-12


@pytest.mark.parametrize("q", [0.5, 0.9])
def test_theorem6_bound_holds(make_ctx, small_grid, q):
    kind = OperatorKind(Variant.CAI_PRESERVING, 10, q)
    ctx = make_ctx(q)
    nodes = tuple(float(x) for x in small_grid.nodes())
    for f in corpus():
        if f.lipschitz is None:
            continue
        for E in (nodes, (0.0,), (1.0, 3.0)):
            lip = LipschitzClass.for_function(f, E)
            for x in (0.0, 0.35, 1.0, 2.0):
                report = rate_bound_theorem6(f, lip, kind, x, ctx)
                assert report.holds, (f.name, E[:3], x, report)


def test_theorem6_with_dense_set_has_zero_distance(make_ctx, small_grid):
    nodes = tuple(float(x) for x in small_grid.nodes())
    lip = LipschitzClass.for_function(SQRT, nodes)
    kind = OperatorKind(Variant.CAI_PRESERVING, 10, 0.9)
    report = rate_bound_theorem6(SQRT, lip, kind, 1.0, make_ctx(0.9))
    assert report.rhs == pytest.approx(report.delta ** 0.25, rel=1e-12)


def test_lipschitz_class_validation():
    with pytest.raises(DomainError):
        LipschitzClass(0.5, 1.0, ())
    with pytest.raises(DomainError):
        LipschitzClass(1.5, 1.0, (0.0,))
    with pytest.raises(DomainError):
        LipschitzClass.for_function(T2, (0.0,))
    with pytest.raises(DomainError):
        rate_bound_theorem6(
            TestFunction("t^2", lambda t: t * t), LipschitzClass(1.0, 1.0, (0.0,)),
            OperatorKind(Variant.CAI_PRESERVING, 5, 0.5), 1.0, None,
        )


def test_lipschitz_maximal_and_distance(grid):
    assert lipschitz_maximal(SQRT, 0.0, 0.5, grid) == pytest.approx(1.0, rel=1e-12)
    assert lipschitz_maximal(T, 1.0, 1.0, grid) == pytest.approx(1.0, rel=1e-12)
    assert distance_to_set(2.3, [0.0, 1.0, 2.0]) == pytest.approx(0.3)
    assert distance_to_set(1.0, [1.0]) == 0.0
    with pytest.raises(DomainError):
        distance_to_set(1.0, [])


def test_weighted_norm(grid):
    assert weighted_norm(T2, grid) == pytest.approx(25.0 / 26.0)
    assert weighted_norm(ONE, grid) == pytest.approx(1.0)


@pytest.mark.parametrize("q", [0.5, 0.9, 0.99])
def test_display_bound_dominates_node_shift(make_ctx, grid, q):
    ctx = make_ctx(q)
    nodes = grid.nodes()
    for n in (2, 10, 100):
        kind = OperatorKind(Variant.CAI_PRESERVING, n, q)
        shift = np.array([abs(v_n(float(x), n, ctx) - x) for x in nodes])
        assert shift.max() <= korovkin_display_bound(kind, ctx, grid.x_max, "sup") + 1e-15
        weighted = (shift / (1.0 + nodes ** 2)).max()
        assert weighted <= korovkin_display_bound(kind, ctx, grid.x_max, "weighted") + 1e-15


def test_korovkin_profile_rows(make_ctx, grid):
    kind = OperatorKind(Variant.CAI_PRESERVING, 50, 0.99)
    report = korovkin_error_profile(kind, grid, make_ctx(0.99), "sup")
    assert [r.function for r in report.rows] == ["1", "t", "t^2"]
    assert report.passed
    assert report.rows[0].error < 1e-15
    assert report.rows[2].error < 1e-12
    assert report.rows[1].error > 0.0


def test_korovkin_profile_without_bound_for_other_kinds(make_ctx, grid):
    report = korovkin_error_profile(OperatorKind(Variant.Q_STANCU_BETA, 10, 0.9), grid, make_ctx(0.9), "weighted")
    assert all(r.bound is None and r.passed for r in report.rows)
    assert report.rows[1].error < 1e-12
    assert report.rows[2].error > 0.0


def test_sup_error_on_t_decreases_along_standard_sequence(make_ctx, grid):
    errors = []
    for n in (10, 100, 1000, 10000):
        q = float(qn_standard(n))
        kind = OperatorKind(Variant.CAI_PRESERVING, n, q)
        errors.append(korovkin_errors(kind, grid, make_ctx(q), "sup")[1])
    assert all(b < a for a, b in zip(errors, errors[1:]))
    assert errors[-1] < 1e-3


def test_lattice_membership(grid, small_grid):
    nodes = tuple(float(x) for x in small_grid.nodes())
    assert lattice_membership(SQRT, 0.5, nodes, grid) <= 1.0 + 1e-9
    assert lattice_membership(T, 1.0, (0.0, 2.5), grid) == pytest.approx(1.0, rel=1e-12)
    # t^2 на [0, 5] с E = {5}: (25 - t^2) / (5 - t) -> 10
    assert lattice_membership(T2, 1.0, (5.0,), grid) == pytest.approx(9.99, rel=1e-9)
    with pytest.raises(DomainError):
        lattice_membership(T, 1.0, (), grid)


def test_theorem6_with_estimated_class(make_ctx, small_grid):
    double = TestFunction("2t", lambda t: 2.0 * t)
    nodes = tuple(float(x) for x in small_grid.nodes())
    lip = LipschitzClass.estimated_for(double, nodes, small_grid)
    assert lip.estimated
    assert lip.M == pytest.approx(2.0, rel=1e-9)
    kind = OperatorKind(Variant.CAI_PRESERVING, 10, 0.9)
    for x in (0.0, 0.5, 1.0, 2.0):
        report = rate_bound_theorem6(double, lip, kind, x, make_ctx(0.9))
        assert report.holds, (x, report)

# services/convergence.py
# Модуль непрерывности на сетке, поточечные оценки скорости приближения
# (через модуль непрерывности и через классы Липшица-Гёльдера),
# взвешенная норма и профили ошибок Коровкина на пробных функциях 1, t, t^2.

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from services.errors import DomainError
from services.functions import KOROVKIN, TestFunction
from services.operators import (
    OperatorKind,
    OperatorMeasure,
    Variant,
    cai_delta_closed_form,
    central_moments,
    lattice_moments,
    moments,
    operator_measure,
)
from services.qcalc import QContext, q_integer
from services.reports import ConvergenceReport, ReportRow

logger = logging.getLogger(__name__)

# шаг сетки должен быть не больше delta / RESOLUTION
RESOLUTION = 10
# предел числа узлов при автоматическом измельчении
MAX_REFINED_POINTS = 2_000_000

NORMS = ("sup", "weighted")


@dataclass(frozen=True)
class Grid:
    x_min: float = 0.0
    x_max: float = 5.0
    points: int = 501

    def __post_init__(self):
        if self.x_min < 0:
            raise DomainError(f"сетка лежит в [0, ∞), получено x_min={self.x_min}")
        if not self.x_max > self.x_min:
            raise DomainError(f"x_max > x_min, получено [{self.x_min}, {self.x_max}]")
        if int(self.points) != self.points or self.points < 2:
            raise DomainError(f"в сетке нужно >= 2 узлов, получено {self.points}")

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.points - 1)

    def nodes(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, int(self.points))

    def refined(self, max_spacing: float) -> "Grid":
        points = int(math.ceil((self.x_max - self.x_min) / max_spacing)) + 1
        if points > MAX_REFINED_POINTS:
            raise DomainError(f"измельчение до шага {max_spacing:g} требует {points} узлов")
        return Grid(self.x_min, self.x_max, max(points, self.points))


@dataclass(frozen=True)
class BoundReport:
    x: float
    lhs: float
    rhs: float
    slack: float
    holds: bool
    delta: float
    stated_delta: Optional[float] = None

    @classmethod
    def of(cls, x: float, lhs: float, rhs: float, delta: float, guard: float, stated_delta=None) -> "BoundReport":
        slack = rhs - lhs
        return cls(x, lhs, rhs, slack, bool(slack >= -guard), delta, stated_delta)


@dataclass(frozen=True)
class LipschitzClass:
    alpha: float
    M: float
    E: tuple
    # M оценено по решётке, а не взято из метаданных f
    estimated: bool = False

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise DomainError(f"alpha ∈ (0, 1], получено {self.alpha}")
        if self.M <= 0:
            raise DomainError(f"M > 0, получено {self.M}")
        object.__setattr__(self, "E", tuple(float(y) for y in self.E))
        if not self.E:
            raise DomainError("множество E пусто")
        if min(self.E) < 0:
            raise DomainError("E должно лежать в [0, ∞)")

    @classmethod
    def for_function(cls, f: TestFunction, E: Iterable[float]) -> "LipschitzClass":
        if f.lipschitz is None:
            raise DomainError(f"{f.name}: нет метаданных класса Липшица")
        return cls(f.lipschitz.alpha, f.lipschitz.M, tuple(E))

    @classmethod
    def estimated_for(cls, f: TestFunction, E: Iterable[float], grid: Grid, alpha: float = 1.0) -> "LipschitzClass":
        E = tuple(float(y) for y in E)
        M = lattice_membership(f, alpha, E, grid)
        logger.debug("%s: M estimated on the lattice as %g", f.name, M)
        return cls(alpha, max(M, float(np.finfo(float).eps)), E, estimated=True)


# ------------- модуль непрерывности -------------

def _grid_pairs_modulus(values: np.ndarray, max_offset: int) -> float:
    best = 0.0
    for d in range(1, min(max_offset, len(values) - 1) + 1):
        best = max(best, float(np.max(np.abs(values[d:] - values[:-d]))))
    return best


def _exact_offset_modulus(f: TestFunction, nodes: np.ndarray, values: np.ndarray, delta: float) -> float:
    return float(np.max(np.abs(np.asarray(f(nodes + delta)) - values)))


def modulus_of_continuity(f: TestFunction, delta: float, grid: Grid) -> float:
    """
    ω(f; δ): максимум |f(t) - f(x)| по парам узлов сетки с |t - x| <= δ
    и по парам (x, x + δ) внутри сетки. Требует шаг сетки <= δ/10.
    """
    if delta < 0:
        raise DomainError(f"δ >= 0, получено {delta}")
    if delta == 0:
        return 0.0
    if grid.spacing > delta / RESOLUTION:
        raise DomainError(f"шаг сетки {grid.spacing:g} крупнее δ/{RESOLUTION} = {delta / RESOLUTION:g}")
    nodes = grid.nodes()
    values = np.asarray(f(nodes), dtype=float)
    offset = int(math.floor(delta / grid.spacing + 1e-9))
    return max(_grid_pairs_modulus(values, offset), _exact_offset_modulus(f, nodes, values, delta))


class ModulusTable:
    """
    ω(f; ·) для многих δ на одной сетке: максимумы по сдвигам считаются один раз.
    Для δ мельче 10 шагов сетка измельчается автоматически.
    """

    def __init__(self, f: TestFunction, grid: Grid):
        self.f = f
        self.grid = grid
        self._nodes = grid.nodes()
        self._values = np.asarray(f(self._nodes), dtype=float)
        by_offset = [0.0]
        for d in range(1, len(self._values)):
            by_offset.append(float(np.max(np.abs(self._values[d:] - self._values[:-d]))))
        self._running = np.maximum.accumulate(np.asarray(by_offset))

    def __call__(self, delta: float) -> float:
        if delta < 0:
            raise DomainError(f"δ >= 0, получено {delta}")
        if delta == 0:
            return 0.0
        if self.grid.spacing > delta / RESOLUTION:
            return modulus_of_continuity(self.f, delta, self.grid.refined(delta / RESOLUTION))
        offset = min(int(math.floor(delta / self.grid.spacing + 1e-9)), len(self._running) - 1)
        exact = _exact_offset_modulus(self.f, self._nodes, self._values, delta)
        return max(float(self._running[offset]), exact)


def refinement_check(f: TestFunction, delta: float, grid: Grid, rel_tol: float = 0.01):
    """Сравнивает ω на сетке и на сетке с вдвое меньшим шагом: (ω, ω_fine, изменение, ok)."""
    coarse = modulus_of_continuity(f, delta, grid)
    fine = modulus_of_continuity(f, delta, Grid(grid.x_min, grid.x_max, 2 * grid.points - 1))
    change = abs(fine - coarse) / fine if fine > 0 else 0.0
    return coarse, fine, change, change < rel_tol


def check_pointwise_inequality(
    f: TestFunction,
    t: float,
    x: float,
    delta: float,
    grid: Grid,
    guard: float = 1e-9,
    *,
    modulus: Optional[ModulusTable] = None,
) -> bool:
    """|f(t) - f(x)| <= ω(f; δ) (1 + |t - x| / δ)."""
    if delta <= 0:
        raise DomainError(f"δ > 0, получено {delta}")
    omega = (modulus or ModulusTable(f, grid))(delta)
    lhs = abs(float(f(t)) - float(f(x)))
    return lhs <= omega * (1.0 + abs(t - x) / delta) + guard


# ------------- оценки скорости -------------

def _cai_delta(kind: OperatorKind, x: float, ctx: QContext, guard: float):
    if kind.variant is not Variant.CAI_PRESERVING:
        raise DomainError(f"оценки скорости строятся для оператора Кая, получен {kind.variant.value}")
    exact = central_moments(kind, x, ctx, exact=True).delta
    if exact < -guard:
        raise DomainError(f"второй центральный момент отрицателен: {exact:g}")
    stated = cai_delta_closed_form(x, kind.n, kind.context(ctx))
    return max(exact, 0.0), stated


def rate_bound_theorem5(
    f: TestFunction,
    kind: OperatorKind,
    x: float,
    ctx: QContext,
    grid: Grid,
    A: float = 1.0,
    *,
    measure: Optional[OperatorMeasure] = None,
    modulus: Optional[ModulusTable] = None,
    guard: float = 1e-9,
) -> BoundReport:
    """|L(f; x) - f(x)| <= 2 ω(f; sqrt(δ)), где δ: второй центральный момент оператора в x."""
    if not f.uniformly_continuous:
        raise DomainError(f"{f.name}: оценка через ω требует равномерно непрерывной f")
    delta, stated = _cai_delta(kind, x, ctx, guard)
    measure = measure or operator_measure(kind, x, ctx, A)
    lhs = abs(measure.apply(f) - float(f(x)))
    modulus = modulus or ModulusTable(f, grid)
    rhs = 2.0 * modulus(math.sqrt(delta)) if delta > 0 else 0.0
    return BoundReport.of(x, lhs, rhs, delta, guard, stated)


def lipschitz_maximal(f: TestFunction, x: float, alpha: float, grid: Grid) -> float:
    """sup по узлам t != x величины |f(t) - f(x)| / |t - x|^alpha."""
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha ∈ (0, 1], получено {alpha}")
    nodes = grid.nodes()
    nodes = nodes[nodes != x]
    ratios = np.abs(np.asarray(f(nodes)) - float(f(x))) / np.abs(nodes - x) ** alpha
    return float(np.max(ratios))


def distance_to_set(x: float, E: Sequence[float]) -> float:
    points = np.asarray(list(E), dtype=float)
    if points.size == 0:
        raise DomainError("множество E пусто")
    return float(np.min(np.abs(points - x)))


def lattice_membership(f: TestFunction, alpha: float, E: Sequence[float], grid: Grid) -> float:
    """
    max по y ∈ E величины f_alpha(y) = sup_t |f(t) - f(y)| / |t - y|^alpha, t по узлам сетки.
    Проверка принадлежности классу только на решётке: f_alpha(y) <= M для y ∈ E.
    """
    points = np.asarray(list(E), dtype=float)
    if points.size == 0:
        raise DomainError("множество E пусто")
    return max(lipschitz_maximal(f, float(y), alpha, grid) for y in points)


def rate_bound_theorem6(
    f: TestFunction,
    lip: LipschitzClass,
    kind: OperatorKind,
    x: float,
    ctx: QContext,
    A: float = 1.0,
    *,
    measure: Optional[OperatorMeasure] = None,
    guard: float = 1e-9,
) -> BoundReport:
    """|L(f; x) - f(x)| <= M (δ^{alpha/2} + d(x, E))."""
    if f.lipschitz is None and not lip.estimated:
        raise DomainError(f"{f.name}: нет метаданных класса Липшица")
    delta, stated = _cai_delta(kind, x, ctx, guard)
    measure = measure or operator_measure(kind, x, ctx, A)
    lhs = abs(measure.apply(f) - float(f(x)))
    rhs = lip.M * (delta ** (lip.alpha / 2.0) + distance_to_set(x, lip.E))
    return BoundReport.of(x, lhs, rhs, delta, guard, stated)


# ------------- нормы и профили Коровкина -------------

def weighted_norm(f: TestFunction, grid: Grid) -> float:
    """max |f(x)| / (1 + x^2) по узлам сетки."""
    nodes = grid.nodes()
    return float(np.max(np.abs(np.asarray(f(nodes))) / (1.0 + nodes * nodes)))


def sup_norm(f: TestFunction, grid: Grid) -> float:
    return float(np.max(np.abs(np.asarray(f(grid.nodes())))))


def korovkin_display_bound(kind: OperatorKind, ctx: QContext, nu: float, norm: str) -> float:
    """
    Оценка |v_n(x) - x| для оператора Кая:
        sup-норма на [0, nu]: (1 - sqrt((q[n] - q)/[n])) nu + 1/(2[n]),
        взвешенная:           (1 - sqrt((q[n] - q)/[n]))    + 1/(2[n]).
    """
    kctx = kind.context(ctx)
    bracket = q_integer(kind.n, kctx)
    slope = 1.0 - math.sqrt((kctx.q * bracket - kctx.q) / bracket)
    scale = nu if norm == "sup" else 1.0
    return slope * scale + 1.0 / (2.0 * bracket)


def _norm_of(values: np.ndarray, nodes: np.ndarray, norm: str) -> float:
    if norm == "sup":
        return float(np.max(np.abs(values)))
    if norm == "weighted":
        return float(np.max(np.abs(values) / (1.0 + nodes * nodes)))
    raise DomainError(f"неизвестная норма {norm!r}, ожидалось одно из {NORMS}")


def korovkin_errors(kind: OperatorKind, grid: Grid, ctx: QContext, norm: str = "sup", exact: bool = False):
    """Нормы L(e_i) - e_i, i = 0, 1, 2, по моментам (замкнутые формы или точные)."""
    nodes = grid.nodes()
    triples = np.array([
        (lattice_moments if exact else moments)(kind, float(x), ctx) for x in nodes
    ])
    targets = (np.ones_like(nodes), nodes, nodes * nodes)
    return [_norm_of(triples[:, i] - targets[i], nodes, norm) for i in range(3)]


def korovkin_error_profile(
    kind: OperatorKind,
    grid: Grid,
    ctx: QContext,
    norm: str = "sup",
    exact: bool = False,
    tol: float = 1e-8,
    guard: float = 1e-9,
) -> ConvergenceReport:
    """
    Строки (n, q, функция, норма, ошибка, оценка). Для оператора Кая оценка на t:
    замкнутая форма korovkin_display_bound, на 1 и t^2 допуск tol.
    Для остальных видов оценки нет (bound пуст).
    """
    errors = korovkin_errors(kind, grid, ctx, norm, exact)
    report = ConvergenceReport(command="converge")
    cai = kind.variant is Variant.CAI_PRESERVING
    for f, error in zip(KOROVKIN, errors):
        if not cai:
            bound = None
        elif f.name == "t":
            bound = korovkin_display_bound(kind, ctx, grid.x_max, norm)
        else:
            bound = tol
        report.add(ReportRow.checked(
            command="converge",
            operator=kind.variant.value,
            n=kind.n,
            q=kind.q,
            function=f.name,
            norm=norm if not exact else f"{norm}-exact",
            error=error,
            bound=bound,
            guard=guard,
        ))
    logger.debug("korovkin %s %s: %s", kind.label, norm, errors)
    return report

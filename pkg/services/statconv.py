# services/statconv.py
# Статистическая сходимость: натуральная плотность множеств индексов,
# оценка st-lim по конечному префиксу, генераторы последовательностей q_n
# и проверка условий st-lim q_n = 1, st-lim q_n^n = a < 1, st-lim 1/[n]_{q_n} = 0.
#
# Плотность есть величина на бесконечности; по префиксу её можно только оценить,
# поэтому проверка смотрит на лестницу горизонтов и на монотонность оценок.

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from services.errors import DomainError

logger = logging.getLogger(__name__)

HORIZON_LADDER = (10**3, 10**4, 10**5, 10**6)
EPS_LADDER = (0.1, 0.01)
DENSITY_THRESHOLD = 1e-2


@dataclass(frozen=True)
class IndexSet:
    """Множество индексов j >= 1; membership векторизован: массив индексов -> массив bool."""

    membership: Callable[[np.ndarray], np.ndarray]
    description: str = ""

    def mask(self, horizon: int) -> np.ndarray:
        return np.asarray(self.membership(np.arange(1, horizon + 1, dtype=np.int64)), dtype=bool)

    def __contains__(self, j: int) -> bool:
        return bool(self.membership(np.array([j], dtype=np.int64))[0])


def is_square(j) -> np.ndarray:
    j = np.asarray(j, dtype=np.int64)
    r = np.floor(np.sqrt(j.astype(float))).astype(np.int64)
    return (r * r == j) | ((r + 1) * (r + 1) == j)


SQUARES = IndexSet(is_square, "perfect squares")


def natural_density(K: IndexSet, horizon: int) -> float:
    """|K ∩ [1, horizon]| / horizon."""
    if horizon < 1:
        raise DomainError(f"horizon >= 1, получено {horizon}")
    return int(np.count_nonzero(K.mask(horizon))) / horizon


def _prefix(x: Sequence[float], horizon: int) -> np.ndarray:
    if horizon < 1:
        raise DomainError(f"horizon >= 1, получено {horizon}")
    values = np.asarray(x, dtype=float)
    if values.size < horizon:
        raise DomainError(f"префикс длины {values.size} короче горизонта {horizon}")
    return values[:horizon]


def statistical_limit_estimate(x: Sequence[float], L: float, eps: float, horizon: int) -> float:
    """Доля индексов j <= horizon с |x_j - L| >= eps; x[0] соответствует x_1."""
    if eps <= 0:
        raise DomainError(f"eps > 0, получено {eps}")
    return int(np.count_nonzero(np.abs(_prefix(x, horizon) - L) >= eps)) / horizon


def ordinary_limit_check(x: Sequence[float], L: float, eps: float, tail_start: int, horizon: int) -> bool:
    """Все x_j с tail_start <= j <= horizon лежат в eps-окрестности L."""
    if not 1 <= tail_start <= horizon:
        raise DomainError(f"1 <= tail_start <= horizon, получено {tail_start}, {horizon}")
    tail = _prefix(x, horizon)[tail_start - 1:]
    return bool(np.all(np.abs(tail - L) < eps))


# ------------- генераторы q_n -------------

def qn_standard(n):
    n = np.asarray(n, dtype=float)
    return n / (n + 1.0)


def qn_statistical_only(n):
    """n/(n+1) везде, кроме точных квадратов, где q_n = 1/2."""
    n_arr = np.asarray(n)
    return np.where(is_square(n_arr), 0.5, qn_standard(n_arr))


def qn_constant(c: float) -> Callable:
    if not (0.0 < c < 1.0):
        raise DomainError(f"постоянная q ∈ (0, 1), получено {c}")

    def generator(n):
        return np.full(np.shape(n), c, dtype=float)

    return generator


def bracket_of(q: np.ndarray, n: np.ndarray) -> np.ndarray:
    """[n]_{q_n} поэлементно, устойчиво при q_n -> 1."""
    return -np.expm1(n * np.log(q)) / (1.0 - q)


@dataclass(frozen=True)
class SequenceSpec:
    name: str
    generator: Callable
    # заявленные st-lim (q_n, q_n^n, 1/[n]_{q_n})
    declared_st_limits: Tuple[float, float, float]
    ordinary_convergent: bool

    @property
    def declared_conditions(self) -> bool:
        one, a, zero = self.declared_st_limits
        return one == 1.0 and 0.0 <= a < 1.0 and zero == 0.0

    def derived(self, horizon: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        n = np.arange(1, horizon + 1, dtype=float)
        q = np.asarray(self.generator(n), dtype=float)
        return q, q ** n, 1.0 / bracket_of(q, n)


STANDARD = SequenceSpec("standard", qn_standard, (1.0, math.exp(-1.0), 0.0), True)
STATISTICAL_ONLY = SequenceSpec("statonly", qn_statistical_only, (1.0, math.exp(-1.0), 0.0), False)
CONSTANT_HALF = SequenceSpec("constant", qn_constant(0.5), (0.5, 0.0, 0.5), True)

SEQUENCES = {s.name: s for s in (STANDARD, STATISTICAL_ONLY, CONSTANT_HALF)}

CONDITION_NAMES = ("q_n", "q_n^n", "1/[n]")
PASS, FAIL, INDETERMINATE = "pass", "fail", "indeterminate"


def combine_status(statuses: Sequence[str]) -> str:
    if FAIL in statuses:
        return FAIL
    if INDETERMINATE in statuses:
        return INDETERMINATE
    return PASS


def ladder_status(densities: Sequence[float], threshold: float) -> str:
    """
    Вердикт по лестнице оценок плотности для одного eps.
    pass: оценки не растут и последняя < threshold.
    fail: последняя >= threshold и на последнем шаге не убывает.
    Остальное: по префиксу не решить.
    """
    non_increasing = all(b <= prev + 1e-15 for prev, b in zip(densities, densities[1:]))
    if densities[-1] < threshold:
        return PASS if non_increasing else INDETERMINATE
    if len(densities) == 1 or densities[-1] >= densities[-2] - 1e-15:
        return FAIL
    return INDETERMINATE


@dataclass
class ConditionResult:
    name: str
    target: float
    declared: float
    empirical: float
    densities: List[Tuple[int, float, float]] = field(default_factory=list)  # (horizon, eps, density)
    status: str = INDETERMINATE

    @property
    def holds(self) -> bool:
        return self.status == PASS


@dataclass
class ConditionsReport:
    sequence: str
    horizon: int
    conditions: List[ConditionResult]
    expected: bool = True
    ordinary: Optional[bool] = None

    @property
    def status(self) -> str:
        return combine_status([c.status for c in self.conditions])

    @property
    def holds(self) -> bool:
        return self.status == PASS

    @property
    def matches_declaration(self) -> bool:
        # "не выполнено" подтверждается только явным fail
        return self.status == (PASS if self.expected else FAIL)


def _tail_median(values: np.ndarray) -> float:
    # медиана последних 10% префикса устойчива к исключениям нулевой плотности
    start = int(len(values) * 0.9)
    return float(np.median(values[start:]))


def verify_conditions7(
    spec: SequenceSpec,
    horizon: int = HORIZON_LADDER[-1],
    eps_ladder: Sequence[float] = EPS_LADDER,
    threshold: float = DENSITY_THRESHOLD,
) -> ConditionsReport:
    """
    Статус условия собирается из вердиктов ladder_status по всем eps:
    любой fail даёт fail, иначе любой indeterminate даёт indeterminate.
    Целевые пределы: 1, заявленное a (< 1), 0.
    """
    horizons = [h for h in HORIZON_LADDER if h <= horizon] or [horizon]
    if horizons[-1] != horizon:
        horizons.append(horizon)
    a = spec.declared_st_limits[1]
    targets = (1.0, a, 0.0)
    sequences = spec.derived(horizon)
    results = []
    for name, target, declared, values in zip(CONDITION_NAMES, targets, spec.declared_st_limits, sequences):
        result = ConditionResult(name, target, declared, _tail_median(values))
        statuses = [FAIL] if name == "q_n^n" and not 0.0 <= a < 1.0 else []
        for eps in eps_ladder:
            densities = [statistical_limit_estimate(values, target, eps, h) for h in horizons]
            result.densities.extend((h, eps, d) for h, d in zip(horizons, densities))
            statuses.append(ladder_status(densities, threshold))
        result.status = combine_status(statuses)
        results.append(result)
    tail_start = max(1, horizon // 2)
    ordinary = ordinary_limit_check(sequences[0], spec.declared_st_limits[0], min(eps_ladder), tail_start, horizon)
    logger.debug("conditions for %s up to %d: %s", spec.name, horizon, [r.status for r in results])
    return ConditionsReport(spec.name, horizon, results, spec.declared_conditions, ordinary)

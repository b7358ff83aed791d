# handlers/converge.py
# Команда converge: ошибки Коровкина вдоль лестницы n при q = q_n
# в sup- и взвешенной норме; для статистической последовательности
# лестница плотностей индексов, где ошибка на t не меньше eps.

import logging

import numpy as np

from handlers.run_config import RunConfig
from services.convergence import NORMS, korovkin_error_profile
from services.operators import OperatorKind, Variant
from services.reports import ConvergenceReport, ReportRow
from services.statconv import EPS_LADDER, HORIZON_LADDER, SEQUENCES, bracket_of, statistical_limit_estimate

logger = logging.getLogger(__name__)


def display_errors(generator, horizon: int, nu: float) -> np.ndarray:
    """sup_{[0, nu]} |v_j(x) - x| для j = 1..horizon при q = q_j (достигается в x = nu)."""
    j = np.arange(1, horizon + 1, dtype=float)
    q = np.asarray(generator(j), dtype=float)
    bracket = bracket_of(q, j)
    c = (q * bracket - q) / bracket
    e = 1.0 / (2.0 * bracket)
    return nu - (np.sqrt(c * nu * nu + e * e) - e)


def _density_rows(config: RunConfig, generator) -> list:
    horizon = max(config.n_ladder)
    errors = display_errors(generator, horizon, config.grid.x_max)
    horizons = [h for h in HORIZON_LADDER if h < horizon] + [horizon]
    rows = []
    for eps in EPS_LADDER:
        previous = None
        for h in horizons:
            density = statistical_limit_estimate(errors, 0.0, eps, h)
            rows.append(ReportRow.checked(
                command="converge",
                operator=config.operator.value,
                n=h,
                function="t",
                norm=f"density(eps={eps:g})",
                error=density,
                bound=previous,
                guard=config.guard_band,
            ))
            previous = density
    return rows


def cmd_converge(config: RunConfig) -> ConvergenceReport:
    spec = SEQUENCES[config.sequence]
    report = ConvergenceReport("converge", config.as_dict())
    for n in config.n_ladder:
        q_n = 1.0 if config.operator is Variant.CLASSICAL else float(spec.generator(n))
        kind = OperatorKind(config.operator, n, q_n)
        ctx = config.context(q_n)
        for norm in NORMS:
            report.extend(korovkin_error_profile(
                kind, config.grid, ctx, norm, exact=config.exact,
                tol=config.moment_tol, guard=config.guard_band,
            ))
    if not spec.ordinary_convergent:
        if config.operator is Variant.CAI_PRESERVING:
            for row in _density_rows(config, spec.generator):
                report.add(row)
        else:
            logger.warning("density ladder is only tabulated for the cai operator")
    logger.info("converge %s/%s: %d rows", config.operator.value, spec.name, len(report.rows))
    return report

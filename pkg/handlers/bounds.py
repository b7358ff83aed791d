# handlers/bounds.py
# Команда bounds: поточечные оценки для оператора Кая на сетке x
# через модуль непрерывности (theorem5) и через класс Липшица (theorem6).
# Для функций без метаданных M оценивается по решётке (theorem6-estimated);
# для функций с метаданными заявленное M сверяется с решёткой (membership-lattice).
# value: второй центральный момент оператора, reference: его замкнутая форма.

import logging
from typing import Optional, Sequence

from handlers.run_config import RunConfig
from services.convergence import (
    BoundReport,
    LipschitzClass,
    ModulusTable,
    lattice_membership,
    rate_bound_theorem5,
    rate_bound_theorem6,
)
from services.errors import ConfigError
from services.functions import TestFunction, corpus
from services.operators import OperatorKind, Variant, operator_measure
from services.reports import ConvergenceReport, ReportRow

logger = logging.getLogger(__name__)


def _row(config: RunConfig, kind: OperatorKind, f_name: str, norm: str, r: BoundReport) -> ReportRow:
    return ReportRow(
        command="bounds",
        operator=kind.variant.value,
        n=kind.n,
        q=kind.q,
        x=r.x,
        function=f_name,
        norm=norm,
        value=r.delta,
        reference=r.stated_delta,
        error=r.lhs,
        bound=r.rhs,
        slack=r.slack,
        passed=r.holds,
    )


def _membership_row(f: TestFunction, lip: LipschitzClass, estimate: float, guard: float) -> ReportRow:
    return ReportRow.checked(
        command="bounds",
        operator=Variant.CAI_PRESERVING.value,
        function=f.name,
        norm="membership-lattice",
        value=estimate,
        reference=lip.M,
        error=estimate,
        bound=lip.M,
        guard=guard,
    )


def cmd_bounds(config: RunConfig, functions: Optional[Sequence[TestFunction]] = None) -> ConvergenceReport:
    if config.operator is not Variant.CAI_PRESERVING:
        raise ConfigError("bounds строятся только для оператора cai")
    grid = config.grid
    nodes = [float(x) for x in grid.nodes()]
    candidates, functions = functions or corpus(), []
    for f in candidates:
        if f.uniformly_continuous:
            functions.append(f)
        else:
            logger.warning("%s has an unbounded modulus of continuity, skipped", f.name)
    E = config.E if config.E is not None else tuple(nodes)
    tables = {f.name: ModulusTable(f, grid) for f in functions}
    report = ConvergenceReport("bounds", config.as_dict())
    classes = {}
    for f in functions:
        if f.lipschitz is None:
            logger.warning("%s has no Lipschitz metadata, M estimated on the lattice", f.name)
            classes[f.name] = LipschitzClass.estimated_for(f, E, grid)
            continue
        lip = LipschitzClass.for_function(f, E)
        classes[f.name] = lip
        estimate = lattice_membership(f, lip.alpha, E, grid)
        report.add(_membership_row(f, lip, estimate, config.guard_band))

    for n in config.n_ladder:
        for q in config.q_values:
            kind = OperatorKind(Variant.CAI_PRESERVING, n, q)
            ctx = config.context(q)
            for x in nodes:
                measure = operator_measure(kind, x, ctx, config.A)
                for f in functions:
                    r5 = rate_bound_theorem5(
                        f, kind, x, ctx, grid, config.A,
                        measure=measure, modulus=tables[f.name], guard=config.guard_band,
                    )
                    norm = "theorem5" if f.monotone else "theorem5-nonmonotone"
                    report.add(_row(config, kind, f.name, norm, r5))
                    r6 = rate_bound_theorem6(
                        f, classes[f.name], kind, x, ctx, config.A,
                        measure=measure, guard=config.guard_band,
                    )
                    norm6 = "theorem6-estimated" if classes[f.name].estimated else "theorem6"
                    report.add(_row(config, kind, f.name, norm6, r6))
            logger.info("bounds %s done", kind.label)
    return report

# handlers/statistical.py
# Команда statistical: проверка условий на q_n для выбранной последовательности.
# Строки плотности на промежуточных горизонтах информационные (без bound).
# На последнем горизонте плотность сверяется с порогом, если последовательность
# заявлена как удовлетворяющая условиям. Строки status:* несут вердикт
# pass / fail / indeterminate по условию, строка declaration - итог против заявки.

import logging

from handlers.run_config import RunConfig
from services.reports import ConvergenceReport, ReportRow
from services.statconv import DENSITY_THRESHOLD, PASS, SEQUENCES, verify_conditions7

logger = logging.getLogger(__name__)


def cmd_statistical(config: RunConfig) -> ConvergenceReport:
    spec = SEQUENCES[config.sequence]
    result = verify_conditions7(spec, config.horizon)
    report = ConvergenceReport("statistical", config.as_dict())
    for condition in result.conditions:
        final_density = 0.0
        for horizon, eps, density in condition.densities:
            final = horizon == result.horizon
            if final:
                final_density = max(final_density, density)
            report.add(ReportRow.checked(
                command="statistical",
                operator=spec.name,
                n=horizon,
                function=condition.name,
                norm=f"density(eps={eps:g})",
                value=condition.empirical,
                reference=condition.target,
                error=density,
                bound=DENSITY_THRESHOLD if final and spec.declared_conditions else None,
                guard=0.0,
            ))
        report.add(ReportRow(
            command="statistical",
            operator=spec.name,
            n=result.horizon,
            function=condition.name,
            norm=f"status:{condition.status}",
            value=condition.empirical,
            reference=condition.target,
            error=final_density,
            passed=condition.status == PASS if spec.declared_conditions else True,
        ))
    report.add(ReportRow(
        command="statistical",
        operator=spec.name,
        n=result.horizon,
        function="conditions",
        norm="declaration",
        value=1.0 if result.holds else 0.0,
        reference=1.0 if result.expected else 0.0,
        error=0.0 if result.matches_declaration else 1.0,
        passed=result.matches_declaration,
    ))
    report.add(ReportRow(
        command="statistical",
        operator=spec.name,
        n=result.horizon,
        function="q_n",
        norm="ordinary",
        value=1.0 if result.ordinary else 0.0,
        reference=1.0 if spec.ordinary_convergent else 0.0,
        error=0.0 if result.ordinary == spec.ordinary_convergent else 1.0,
        passed=result.ordinary == spec.ordinary_convergent,
    ))
    logger.info("%s: conditions %s up to %d (expected: %s)", spec.name, result.status, result.horizon, result.expected)
    return report

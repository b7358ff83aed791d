# handlers/moments.py
# Команда moments: интегралы оператора на 1, t, t^2 против замкнутых форм.
# error: отклонение от точных моментов решётки (масштаб max(1, |m_i|)),
# reference: замкнутая форма, на которой строятся оценки сходимости.
# residual-stated: расхождение замкнутой формы с оператором, информационная строка.

import logging

from handlers.run_config import RunConfig
from services.functions import KOROVKIN
from services.operators import OperatorKind, Variant, lattice_moments, moments, operator_measure
from services.reports import ConvergenceReport, ReportRow

logger = logging.getLogger(__name__)


def cmd_moments(config: RunConfig) -> ConvergenceReport:
    report = ConvergenceReport("moments", config.as_dict())
    for n in config.n_ladder:
        for q in config.q_for_operator:
            kind = OperatorKind(config.operator, n, q)
            ctx = config.context(q)
            for x in config.x_points:
                if x == 0 and kind.variant in (Variant.Q_STANCU_BETA, Variant.CLASSICAL):
                    logger.warning("%s is not defined at x=0, skipped", kind.label)
                    continue
                measure = operator_measure(kind, x, ctx, config.A)
                exact = lattice_moments(kind, x, ctx)
                stated = moments(kind, x, ctx)
                for i, f in enumerate(KOROVKIN):
                    value = measure.apply(f)
                    report.add(ReportRow.checked(
                        command="moments",
                        operator=kind.variant.value,
                        n=n,
                        q=q,
                        x=x,
                        function=f.name,
                        norm="residual",
                        value=value,
                        reference=stated[i],
                        error=abs(value - exact[i]) / max(1.0, abs(exact[i])),
                        bound=config.moment_tol,
                        guard=0.0,
                    ))
                    report.add(ReportRow.checked(
                        command="moments",
                        operator=kind.variant.value,
                        n=n,
                        q=q,
                        x=x,
                        function=f.name,
                        norm="residual-stated",
                        value=value,
                        reference=stated[i],
                        error=abs(value - stated[i]) / max(1.0, abs(stated[i])),
                        bound=None,
                    ))
            logger.info("moments %s done", kind.label)
    return report

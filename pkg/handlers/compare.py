# handlers/compare.py
# Команда compare: sup-ошибка |L f - f| четырёх видов операторов на корпусе
# при одинаковых (n, q). Таблица сравнения без оценок (bound пуст).

import logging

import numpy as np

from handlers.run_config import RunConfig
from services.functions import corpus
from services.operators import OperatorKind, Variant, operator_measure
from services.reports import ConvergenceReport, ReportRow

logger = logging.getLogger(__name__)

# не больше стольких узлов x на вид оператора
MAX_POINTS = 51


def _sample(nodes: np.ndarray) -> np.ndarray:
    positive = nodes[nodes > 0]
    step = max(1, int(np.ceil(len(positive) / MAX_POINTS)))
    return positive[::step]


def cmd_compare(config: RunConfig) -> ConvergenceReport:
    xs = [float(x) for x in _sample(config.grid.nodes())]
    functions = corpus()
    report = ConvergenceReport("compare", config.as_dict())
    for n in config.n_ladder:
        for q in config.q_values:
            for variant in Variant:
                if variant is Variant.CLASSICAL and q != config.q_values[0]:
                    continue
                kind = OperatorKind(variant, n, 1.0 if variant is Variant.CLASSICAL else q)
                ctx = config.context(kind.q)
                errors = {f.name: 0.0 for f in functions}
                for x in xs:
                    measure = operator_measure(kind, x, ctx, config.A)
                    for f in functions:
                        errors[f.name] = max(errors[f.name], abs(measure.apply(f) - float(f(x))))
                for f in functions:
                    report.add(ReportRow(
                        command="compare",
                        operator=variant.value,
                        n=n,
                        q=kind.q,
                        function=f.name,
                        norm="sup",
                        error=errors[f.name],
                    ))
            logger.info("compare n=%d q=%g done", n, q)
    return report

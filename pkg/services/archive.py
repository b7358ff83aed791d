# services/archive.py
# Сохранение отчётов в архив и чтение истории прогонов.
import json
import logging
from typing import Dict, List

from db import ReportRowRecord, Run, get_session, init_db
from services.reports import ConvergenceReport

logger = logging.getLogger(__name__)


def save_report(report: ConvergenceReport, url: str) -> int:
    init_db(url)
    with get_session(url) as session:
        run = Run(
            command=report.command,
            config_json=json.dumps(report.config, ensure_ascii=False, sort_keys=True),
            passed=report.passed,
        )
        for position, record in enumerate(report.records()):
            run.rows.append(ReportRowRecord(
                position=position,
                operator=record["operator"],
                n=record["n"],
                q=record["q"],
                x=record["x"],
                function=record["function"],
                norm=record["norm"],
                value=record["value"],
                reference=record["reference"],
                error=record["error"],
                bound=record["bound"],
                slack=record["slack"],
                passed=record["passed"],
            ))
        session.add(run)
        session.flush()
        run_id = run.id
    logger.info("archived run %s (%s, %d rows)", run_id, report.command, len(report.rows))
    return run_id


def list_runs(url: str, limit: int = 20) -> List[Dict]:
    init_db(url)
    with get_session(url) as session:
        runs = session.query(Run).order_by(Run.id.desc()).limit(limit).all()
        return [
            {
                "id": r.id,
                "command": r.command,
                "created_at": r.created_at.isoformat(sep=" ") if r.created_at else None,
                "passed": r.passed,
                "rows": len(r.rows),
                "config": json.loads(r.config_json),
            }
            for r in runs
        ]

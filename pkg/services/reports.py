# services/reports.py
# Строки отчёта и их вывод в CSV / JSON.
# Порядок колонок фиксирован, числа округляются до 15 значащих цифр,
# поэтому CSV и JSON одного прогона совпадают поле в поле.

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, TextIO

FIELDS = (
    "command",
    "operator",
    "n",
    "q",
    "x",
    "function",
    "norm",
    "value",
    "reference",
    "error",
    "bound",
    "slack",
    "passed",
)


@dataclass
class ReportRow:
    command: str
    operator: str
    function: str
    norm: str
    error: float
    n: Optional[int] = None
    q: Optional[float] = None
    x: Optional[float] = None
    value: Optional[float] = None
    reference: Optional[float] = None
    bound: Optional[float] = None
    slack: Optional[float] = None
    passed: bool = True

    @classmethod
    def checked(cls, *, error: float, bound: Optional[float], guard: float = 1e-9, **fields) -> "ReportRow":
        """Строка с оценкой: slack = bound - error, pass <=> slack >= -guard."""
        if bound is None:
            return cls(error=error, bound=None, slack=None, passed=True, **fields)
        slack = bound - error
        return cls(error=error, bound=bound, slack=slack, passed=bool(slack >= -guard), **fields)


def _rounded(value: Any) -> Any:
    if isinstance(value, float):
        # inf и NaN в отчёте -> пустое поле / null
        return float(format(value, ".15g")) if math.isfinite(value) else None
    return value


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".15g")
    return str(value)


@dataclass
class ConvergenceReport:
    command: str
    config: Dict[str, Any] = field(default_factory=dict)
    rows: List[ReportRow] = field(default_factory=list)

    def add(self, row: ReportRow) -> None:
        self.rows.append(row)

    def extend(self, other: "ConvergenceReport") -> None:
        self.rows.extend(other.rows)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def summary(self) -> Dict[str, Any]:
        slacks = [r.slack for r in self.rows if r.slack is not None]
        return {
            "rows": len(self.rows),
            "failed": sum(1 for r in self.rows if not r.passed),
            "min_slack": _rounded(min(slacks)) if slacks else None,
            "passed": self.passed,
        }

    def records(self) -> List[Dict[str, Any]]:
        out = []
        for row in self.rows:
            data = asdict(row)
            out.append({name: _rounded(data[name]) for name in FIELDS})
        return out

    def write_csv(self, stream: TextIO) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(FIELDS)
        for record in self.records():
            writer.writerow([_csv_cell(record[name]) for name in FIELDS])

    def write_json(self, stream: TextIO) -> None:
        payload = {"config": self.config, "rows": self.records(), "summary": self.summary()}
        json.dump(payload, stream, ensure_ascii=False, indent=2, allow_nan=False)
        stream.write("\n")

    def write(self, stream: TextIO, fmt: str = "csv") -> None:
        if fmt == "json":
            self.write_json(stream)
        else:
            self.write_csv(stream)

# handlers/run_config.py
# Параметры одного прогона CLI и их проверка.

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

from config import Settings, get_settings
from services.convergence import Grid
from services.errors import ConfigError, DomainError
from services.operators import Variant
from services.qcalc import QContext
from services.statconv import HORIZON_LADDER, SEQUENCES

COMMANDS = ("moments", "converge", "bounds", "statistical", "compare", "history")
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class RunConfig:
    command: str
    operator: Variant = Variant.CAI_PRESERVING
    n_ladder: Tuple[int, ...] = (5, 10, 50, 100, 500, 1000)
    q_values: Tuple[float, ...] = (0.5, 0.9, 0.99)
    x_points: Tuple[float, ...] = (0.5, 1.0, 2.0, 5.0)
    grid: Grid = field(default_factory=Grid)
    sequence: str = "standard"
    horizon: int = HORIZON_LADDER[-1]
    A: float = 1.0
    E: Optional[Tuple[float, ...]] = None  # None -> узлы сетки
    exact: bool = False
    output_format: str = "csv"
    output_path: Optional[str] = None
    db_url: Optional[str] = None
    settings: Settings = field(default_factory=get_settings)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"неизвестная команда {self.command!r}")
        try:
            object.__setattr__(self, "operator", Variant(self.operator))
        except ValueError:
            raise ConfigError(f"неизвестный оператор {self.operator!r}")
        if not self.n_ladder:
            raise ConfigError("пустая лестница n")
        min_n = 1 if self.operator is Variant.CLASSICAL else 2
        if any(int(n) != n or n < min_n for n in self.n_ladder):
            raise ConfigError(f"все n должны быть целыми >= {min_n}: {self.n_ladder}")
        if any(b <= a for a, b in zip(self.n_ladder, self.n_ladder[1:])):
            raise ConfigError(f"лестница n должна строго возрастать: {self.n_ladder}")
        if not self.q_values or any(not (0.0 < q <= 1.0) for q in self.q_values):
            raise ConfigError(f"q должны лежать в (0, 1]: {self.q_values}")
        if not self.x_points or any(x < 0 for x in self.x_points):
            raise ConfigError(f"x должны быть >= 0: {self.x_points}")
        if self.sequence not in SEQUENCES:
            raise ConfigError(f"неизвестная последовательность {self.sequence!r}, есть {sorted(SEQUENCES)}")
        if self.horizon < 10:
            raise ConfigError(f"horizon >= 10, получено {self.horizon}")
        if self.A <= 0:
            raise ConfigError(f"A > 0, получено {self.A}")
        if self.E is not None and not self.E:
            raise ConfigError("множество E пусто")
        if self.output_format not in FORMATS:
            raise ConfigError(f"формат {self.output_format!r}, ожидалось одно из {FORMATS}")

    @property
    def q_for_operator(self) -> Tuple[float, ...]:
        return (1.0,) if self.operator is Variant.CLASSICAL else tuple(self.q_values)

    @property
    def moment_tol(self) -> float:
        return self.settings.moment_tol

    @property
    def guard_band(self) -> float:
        return self.settings.guard_band

    def context(self, q: float) -> QContext:
        try:
            return QContext.from_settings(q, self.settings)
        except DomainError as e:
            raise ConfigError(str(e))

    def as_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "operator": self.operator.value,
            "n_ladder": list(self.n_ladder),
            "q_values": list(self.q_for_operator),
            "x_points": list(self.x_points),
            "grid": {"x_min": self.grid.x_min, "x_max": self.grid.x_max, "points": self.grid.points},
            "sequence": self.sequence,
            "horizon": self.horizon,
            "A": self.A,
            "E": list(self.E) if self.E is not None else "grid",
            "exact": self.exact,
            "series_tol": self.settings.series_tol,
            "moment_tol": self.settings.moment_tol,
            "guard_band": self.settings.guard_band,
        }

# config.py
# Настройки численных расчётов и окружения. Всё читается из переменных окружения
# (и .env, если установлен python-dotenv). Нечисловые значения -> дефолт с предупреждением,
# значения вне допустимых диапазонов -> ConfigError.
import logging
import os
import re
from dataclasses import dataclass
from typing import List, Optional

from services.errors import ConfigError

try:
    from dotenv import load_dotenv  # pip install python-dotenv
    load_dotenv()
except Exception:
    pass

logger = logging.getLogger(__name__)


def _split_floats(s: str) -> List[float]:
    if not s:
        return []
    parts = [p for p in re.split(r"[,\s]+", s.strip()) if p]
    out = []
    for p in parts:
        try:
            out.append(float(p))
        except ValueError:
            pass
    return out


def _split_ints(s: str) -> List[int]:
    return [int(v) for v in _split_floats(s) if float(v).is_integer()]


def _float_env(name: str, default: str) -> float:
    raw = os.getenv(name, default).strip()
    try:
        return float(raw)
    except ValueError:
        logger.warning("%s=%r is not a number, using %s", name, raw, default)
        return float(default)


def _int_env(name: str, default: str) -> int:
    raw = os.getenv(name, default).strip()
    try:
        return int(raw)
    except ValueError:
        logger.warning("%s=%r is not an integer, using %s", name, raw, default)
        return int(default)


@dataclass(frozen=True)
class Settings:
    series_tol: float
    max_terms: int
    bilateral_range: int
    moment_tol: float
    guard_band: float
    log_level: str
    database_url: Optional[str]
    default_n_ladder: List[int]
    default_q_values: List[float]


def get_settings() -> Settings:
    series_tol = _float_env("STANCU_SERIES_TOL", "1e-12")
    max_terms = _int_env("STANCU_MAX_TERMS", "100000")
    bilateral_range = _int_env("STANCU_BILATERAL_RANGE", "300")
    moment_tol = _float_env("STANCU_MOMENT_TOL", "1e-8")
    guard_band = _float_env("STANCU_GUARD_BAND", "1e-9")

    if not (0.0 < series_tol < 1.0):
        raise ConfigError("STANCU_SERIES_TOL должен лежать в (0, 1)")
    if max_terms < 1 or bilateral_range < 1:
        raise ConfigError("STANCU_MAX_TERMS и STANCU_BILATERAL_RANGE должны быть положительными")
    if moment_tol <= 0 or guard_band < 0:
        raise ConfigError("STANCU_MOMENT_TOL > 0 и STANCU_GUARD_BAND >= 0")

    log_level = os.getenv("LOG_LEVEL", "INFO").strip().upper()

    # Пустой DATABASE_URL отключает архив прогонов
    database_url = (os.getenv("DATABASE_URL") or "").strip() or None

    n_ladder = _split_ints(os.getenv("STANCU_N_LADDER", "")) or [5, 10, 50, 100, 500, 1000]
    q_values = _split_floats(os.getenv("STANCU_Q_VALUES", "")) or [0.5, 0.9, 0.99]

    return Settings(
        series_tol=series_tol,
        max_terms=max_terms,
        bilateral_range=bilateral_range,
        moment_tol=moment_tol,
        guard_band=guard_band,
        log_level=log_level,
        database_url=database_url,
        default_n_ladder=n_ladder,
        default_q_values=q_values,
    )

# services/errors.py
# Общая иерархия исключений пакета.
# DomainError: нарушены предусловия (k > n, q вне (0,1], пустое E ...).
# ConvergenceError: ряд/квадратура не сошлись; .estimate хранит достигнутую оценку.
# ConfigError: некорректная конфигурация запуска CLI.

from typing import Optional


class StancuError(Exception):
    """Базовое исключение для всех ошибок вычислений и конфигурации."""


class DomainError(StancuError, ValueError):
    pass


class ConvergenceError(StancuError, ArithmeticError):
    def __init__(self, message: str, estimate: Optional[float] = None):
        super().__init__(message)
        self.estimate = estimate


class ConfigError(StancuError):
    pass

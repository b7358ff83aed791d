# services/functions.py
# Тестовые функции на [0, ∞) с метаданными: ограниченность, глобальный класс Гёльдера,
# монотонность, равномерная непрерывность. Корпус функций для сводок и оценок.

from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np


@dataclass(frozen=True)
class Lipschitz:
    """|f(t) - f(x)| <= M |t - x|^alpha для всех t, x >= 0."""

    alpha: float
    M: float


@dataclass(frozen=True)
class TestFunction:
    __test__ = False  # не тестовый класс для pytest

    name: str
    eval: Callable[[np.ndarray], np.ndarray]
    bound: Optional[float] = None
    lipschitz: Optional[Lipschitz] = None
    monotone: bool = False
    uniformly_continuous: bool = True
    # log f для строго положительных функций (ядра); позволяет суммировать без переполнений
    log_eval: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, t):
        values = np.asarray(self.eval(np.asarray(t, dtype=float)), dtype=float)
        return float(values) if values.ndim == 0 else values


def linear_combination(a: float, f: TestFunction, b: float, g: TestFunction) -> TestFunction:
    return TestFunction(
        name=f"{a:g}*{f.name}+{b:g}*{g.name}",
        eval=lambda t: a * np.asarray(f(t)) + b * np.asarray(g(t)),
        uniformly_continuous=f.uniformly_continuous and g.uniformly_continuous,
    )


def power(p: int) -> TestFunction:
    """Моном t^p: пробные функции Коровкина."""
    names = {0: "1", 1: "t", 2: "t^2"}
    return TestFunction(
        name=names.get(p, f"t^{p}"),
        eval=lambda t: np.ones_like(t) if p == 0 else t ** p,
        bound=1.0 if p == 0 else None,
        lipschitz=Lipschitz(1.0, 1.0) if p == 1 else None,
        monotone=True,
        uniformly_continuous=p <= 1,
    )


ONE = TestFunction(
    name="1",
    eval=np.ones_like,
    bound=1.0,
    lipschitz=Lipschitz(1.0, 1.0),
    monotone=True,
)
T = power(1)
T2 = power(2)
EXP_DECAY = TestFunction(
    name="exp(-t)",
    eval=lambda t: np.exp(-t),
    bound=1.0,
    lipschitz=Lipschitz(1.0, 1.0),
)
LORENTZ = TestFunction(
    name="1/(1+t^2)",
    eval=lambda t: 1.0 / (1.0 + t * t),
    bound=1.0,
    # max |f'| = 3√3/8 при t = 1/√3
    lipschitz=Lipschitz(1.0, 3.0 * np.sqrt(3.0) / 8.0),
)
DAMPED_SINE = TestFunction(
    name="sin(t)/(1+t)",
    eval=lambda t: np.sin(t) / (1.0 + t),
    bound=1.0,
    lipschitz=Lipschitz(1.0, 1.0),
)
SQRT = TestFunction(
    name="sqrt(t)",
    eval=lambda t: np.sqrt(np.maximum(t, 0.0)),
    lipschitz=Lipschitz(0.5, 1.0),
    monotone=True,
)
ABS_SHIFT = TestFunction(
    name="|t-1|",
    eval=lambda t: np.abs(t - 1.0),
    lipschitz=Lipschitz(1.0, 1.0),
)
SATURATION = TestFunction(
    name="1-exp(-t)",
    eval=lambda t: -np.expm1(-t),
    bound=1.0,
    lipschitz=Lipschitz(1.0, 1.0),
    monotone=True,
)

CORPUS: Tuple[TestFunction, ...] = (ONE, T, T2, EXP_DECAY, LORENTZ, DAMPED_SINE, SQRT, ABS_SHIFT, SATURATION)
KOROVKIN: Tuple[TestFunction, ...] = (ONE, T, T2)


def corpus() -> Tuple[TestFunction, ...]:
    return CORPUS


def by_name() -> Dict[str, TestFunction]:
    return {f.name: f for f in CORPUS}

# services/qcalc.py
# q-исчисление для операторов Станку-Бета.
# q-целые и q-скобки, q-факториал, q-биномиальный коэффициент,
# q-символ Похгаммера (1+u)_q^t с вещественным t, q-Гамма и q-Бета,
# интеграл Джексона на [a, b] и несобственный интеграл Корнвиндера по решётке q^k/A.
#
# При q == 1 все функции переходят на классические ветки (math / scipy),
# без какой-либо экстраполяции q -> 1.

import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy import integrate, special

from services.errors import ConvergenceError, DomainError

logger = logging.getLogger(__name__)

# вещественная величина, полученная из q-скобки
QReal = float

# размер блока при векторном суммировании хвостов рядов
_BLOCK = 1024


@dataclass(frozen=True)
class QContext:
    """Параметр q и численные допуски. q > 1 не поддерживается."""

    q: float
    series_tol: float = 1e-12
    max_terms: int = 100_000
    bilateral_range: int = 300

    def __post_init__(self):
        if not (0.0 < self.q <= 1.0):
            raise DomainError(f"q должен лежать в (0, 1], получено q={self.q}")
        if not (0.0 < self.series_tol < 1.0):
            raise DomainError(f"series_tol вне (0, 1): {self.series_tol}")
        if self.max_terms < 1 or self.bilateral_range < 1:
            raise DomainError("max_terms и bilateral_range должны быть положительными")

    @property
    def classical(self) -> bool:
        return self.q == 1.0

    def with_q(self, q: float) -> "QContext":
        return replace(self, q=float(q))

    @classmethod
    def from_settings(cls, q: float, settings) -> "QContext":
        return cls(
            q=float(q),
            series_tol=settings.series_tol,
            max_terms=settings.max_terms,
            bilateral_range=settings.bilateral_range,
        )


# ------------- q-целые -------------

def q_real_bracket(t: float, ctx: QContext) -> QReal:
    """[t]_q = (1 - q^t)/(1 - q) для вещественного t >= 0."""
    if t < 0:
        raise DomainError(f"[t]_q определена для t >= 0, получено t={t}")
    if ctx.classical:
        return float(t)
    if t == 0:
        return 0.0
    return -math.expm1(t * math.log(ctx.q)) / (1.0 - ctx.q)


def q_integer(k: int, ctx: QContext) -> QReal:
    if k < 0 or int(k) != k:
        raise DomainError(f"[k]_q определена для целых k >= 0, получено k={k}")
    return q_real_bracket(int(k), ctx)


def q_factorial(n: int, ctx: QContext) -> float:
    if n < 0 or int(n) != n:
        raise DomainError(f"[n]_q! определён для целых n >= 0, получено n={n}")
    if ctx.classical:
        return float(math.factorial(int(n)))
    return math.prod(q_integer(j, ctx) for j in range(1, int(n) + 1))


def q_binomial(n: int, k: int, ctx: QContext) -> float:
    if n < 0 or k < 0 or int(n) != n or int(k) != k:
        raise DomainError(f"q-бином требует целых n, k >= 0, получено n={n}, k={k}")
    if k > n:
        raise DomainError(f"q-бином требует k <= n, получено n={n}, k={k}")
    n, k = int(n), int(k)
    # симметрия [n, k] = [n, n-k] выполняется точно
    k = min(k, n - k)
    value = 1.0
    for j in range(1, k + 1):
        value *= q_integer(n - k + j, ctx) / q_integer(j, ctx)
    return value


# ------------- бесконечные произведения -------------

def _sum_log_series(block_terms: Callable[[np.ndarray], np.ndarray], ctx: QContext, what: str) -> float:
    # Сумма логарифмов множителей. Хвост после члена с модулем e оценивается
    # геометрически: e / (1 - q).
    total = 0.0
    start = 0
    while start < ctx.max_terms:
        stop = min(start + _BLOCK, ctx.max_terms)
        terms = block_terms(np.arange(start, stop, dtype=float))
        total += float(np.sum(terms))
        if abs(terms[-1]) / (1.0 - ctx.q) < ctx.series_tol:
            return total
        start = stop
    raise ConvergenceError(f"{what}: произведение не сошлось за {ctx.max_terms} множителей", estimate=total)


def q_log_pochhammer_real(u: float, t: float, ctx: QContext) -> float:
    """log (1+u)_q^t; для целого t > 0 это конечное произведение."""
    if u < 0:
        raise DomainError(f"(1+u)_q^t: ожидалось u >= 0, получено u={u}")
    if ctx.classical:
        return t * math.log1p(u)
    if t == 0 or u == 0:
        return 0.0
    log_q = math.log(ctx.q)
    if float(t).is_integer() and 0 < t <= ctx.max_terms:
        j = np.arange(int(t), dtype=float)
        return float(np.sum(np.log1p(u * np.exp(j * log_q))))
    shift = math.exp(t * log_q)

    def block(j: np.ndarray) -> np.ndarray:
        qj = np.exp(j * log_q)
        return np.log1p(qj * u) - np.log1p(qj * shift * u)

    return _sum_log_series(block, ctx, "(1+u)_q^t")


def q_pochhammer_real(u: float, t: float, ctx: QContext) -> float:
    return math.exp(q_log_pochhammer_real(u, t, ctx))


def q_pochhammer_lattice(u0: float, t: float, N: int, ctx: QContext) -> np.ndarray:
    """
    log (1+u_k)_q^t для u_k = q^k u0, k = -N..N (индекс k+N).
    Считается рекуррентно от якоря k = 0:
        (1+qu)_q^t = (1+u)_q^t * (1+q^t u)/(1+u).
    """
    if ctx.classical:
        raise DomainError("решётка q^k u0 вырождена при q == 1")
    if N < 0:
        raise DomainError(f"N >= 0, получено {N}")
    anchor = q_log_pochhammer_real(u0, t, ctx)
    if N == 0:
        return np.array([anchor])
    log_q = math.log(ctx.q)
    shift = math.exp(t * log_q)
    k = np.arange(1, N + 1, dtype=float)
    with np.errstate(over="ignore"):
        # шаги вперёд: от u_{k-1} к u_k
        u_prev = u0 * np.exp((k - 1.0) * log_q)
        forward = anchor + np.cumsum(np.log1p(u_prev * shift) - np.log1p(u_prev))
        # шаги назад: от u_{-k+1} к u_{-k}
        u_back = u0 * np.exp(-k * log_q)
        backward = anchor - np.cumsum(np.log1p(u_back * shift) - np.log1p(u_back))
    if not (np.all(np.isfinite(forward)) and np.all(np.isfinite(backward))):
        raise ConvergenceError(f"(1+u)_q^t: переполнение на решётке N={N}")
    return np.concatenate([backward[::-1], [anchor], forward])


# ------------- q-Гамма / q-Бета -------------

def q_log_gamma(t: float, ctx: QContext) -> float:
    if t <= 0:
        raise DomainError(f"Γ_q(t) определена для t > 0, получено t={t}")
    if ctx.classical:
        return math.lgamma(t)
    q = ctx.q
    log_q = math.log(q)

    def block(j: np.ndarray) -> np.ndarray:
        return np.log1p(-np.exp((j + 1.0) * log_q)) - np.log1p(-np.exp((j + t) * log_q))

    return (1.0 - t) * math.log1p(-q) + _sum_log_series(block, ctx, "Γ_q")


def q_gamma(t: float, ctx: QContext) -> float:
    return math.exp(q_log_gamma(t, ctx))


def q_log_beta(t: float, s: float, ctx: QContext) -> float:
    if t <= 0 or s <= 0:
        raise DomainError(f"B_q(t, s) определена для t, s > 0, получено t={t}, s={s}")
    if ctx.classical:
        return float(special.betaln(t, s))
    return q_log_gamma(t, ctx) + q_log_gamma(s, ctx) - q_log_gamma(t + s, ctx)


def q_beta(t: float, s: float, ctx: QContext) -> float:
    return math.exp(q_log_beta(t, s, ctx))


# ------------- решётка и интегралы -------------

class Lattice(NamedTuple):
    k: np.ndarray
    log_u: np.ndarray
    u: np.ndarray


def q_lattice(A: float, ctx: QContext, N: Optional[int] = None) -> Lattice:
    """Двусторонняя решётка u_k = q^k / A, k = -N..N."""
    if A <= 0:
        raise DomainError(f"A > 0, получено A={A}")
    if ctx.classical:
        raise DomainError("решётка q^k/A вырождена при q == 1")
    N = ctx.bilateral_range if N is None else int(N)
    k = np.arange(-N, N + 1, dtype=float)
    log_u = k * math.log(ctx.q) - math.log(A)
    with np.errstate(over="ignore", under="ignore"):
        u = np.exp(log_u)
    return Lattice(k=k, log_u=log_u, u=u)


def check_lattice_tail(log_terms: np.ndarray, ctx: QContext, what: str) -> None:
    peak = float(np.max(log_terms))
    edge = float(max(log_terms[0], log_terms[-1]))
    if edge - peak > math.log(ctx.series_tol):
        raise ConvergenceError(
            f"{what}: граничные члены окна N={len(log_terms) // 2} не малы",
            estimate=math.exp(edge - peak),
        )


def _classical_half_line(f, ctx: QContext) -> float:
    log_eval = getattr(f, "log_eval", None)
    if log_eval is not None:
        def integrand(t):
            return 0.0 if t <= 0 else math.exp(float(log_eval(np.log(t))))
    else:
        def integrand(t):
            return float(f(t))
    value, abserr = integrate.quad(integrand, 0.0, np.inf, epsabs=ctx.series_tol, epsrel=1e-10, limit=200)
    if not np.isfinite(value):
        raise ConvergenceError("∫_0^∞: квадратура не сошлась", estimate=abserr)
    return float(value)


def _lattice_log_terms(f, lattice: Lattice) -> np.ndarray:
    log_eval = getattr(f, "log_eval", None)
    with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
        if log_eval is not None:
            return np.asarray(log_eval(lattice.log_u), dtype=float) + lattice.log_u
        return np.log(np.abs(np.asarray(f(lattice.u), dtype=float) * lattice.u))


def q_improper_integral(f, A: float, ctx: QContext, N: Optional[int] = None) -> float:
    """
    ∫_0^{∞/A} f(u) d_q u = (1-q) Σ_k f(u_k) u_k по решётке u_k = q^k/A.
    Функции с атрибутом log_eval (положительные ядра) суммируются в логарифмах.
    """
    if ctx.classical:
        return _classical_half_line(f, ctx)
    lattice = q_lattice(A, ctx, N)
    log_eval = getattr(f, "log_eval", None)
    if log_eval is not None:
        log_terms = _lattice_log_terms(f, lattice)
        if np.any(np.isnan(log_terms)):
            raise ConvergenceError("∫ d_q u: NaN в логарифмах членов")
        if np.max(log_terms) == -np.inf:
            return 0.0
        check_lattice_tail(log_terms, ctx, "∫ d_q u")
        return float(math.exp(special.logsumexp(log_terms)) * (1.0 - ctx.q))

    with np.errstate(over="ignore", invalid="ignore"):
        terms = np.asarray(f(lattice.u), dtype=float) * lattice.u
    if not np.all(np.isfinite(terms)):
        raise ConvergenceError("∫ d_q u: нечисловые значения на решётке")
    if np.all(terms == 0):
        return 0.0
    with np.errstate(divide="ignore"):
        check_lattice_tail(np.log(np.abs(terms)), ctx, "∫ d_q u")
    return float((1.0 - ctx.q) * np.sum(terms))


def q_improper_log_integral(f, A: float, ctx: QContext, N: Optional[int] = None) -> float:
    """log ∫_0^{∞/A} f d_q u для положительной f с атрибутом log_eval."""
    if getattr(f, "log_eval", None) is None:
        raise DomainError("логарифмический интеграл требует log_eval")
    if ctx.classical:
        return math.log(_classical_half_line(f, ctx))
    log_terms = _lattice_log_terms(f, q_lattice(A, ctx, N))
    if np.any(np.isnan(log_terms)) or np.max(log_terms) == -np.inf:
        raise ConvergenceError("log ∫ d_q u: интеграл не положителен")
    check_lattice_tail(log_terms, ctx, "log ∫ d_q u")
    return float(special.logsumexp(log_terms) + math.log1p(-ctx.q))


def _jackson_from_zero(f, c: float, ctx: QContext) -> float:
    if c == 0:
        return 0.0
    log_q = math.log(ctx.q)
    count = int(math.ceil(math.log(ctx.series_tol * (1.0 - ctx.q)) / log_q)) + 1
    if count > ctx.max_terms:
        raise ConvergenceError(f"∫_0^c d_q t: нужно {count} членов при max_terms={ctx.max_terms}")
    qj = np.exp(np.arange(count, dtype=float) * log_q)
    return float((1.0 - ctx.q) * c * np.sum(np.asarray(f(c * qj), dtype=float) * qj))


def q_jackson_integral(f, a: float, b: float, ctx: QContext) -> float:
    """∫_a^b f d_q t = ∫_0^b - ∫_0^a. Положительна как мера только при a ∈ {0} ∪ {b q^m}."""
    if a < 0 or b < a:
        raise DomainError(f"интеграл Джексона требует 0 <= a <= b, получено a={a}, b={b}")
    if ctx.classical:
        value, _ = integrate.quad(lambda t: float(f(t)), a, b, epsabs=ctx.series_tol, limit=200)
        return float(value)
    return _jackson_from_zero(f, b, ctx) - _jackson_from_zero(f, a, ctx)

# services/operators.py
# Операторы Станку-Бета: классический, q-вариант, модифицированный q-вариант
# и вариант Кая, сохраняющий x^2.
#
# Значение оператора в точке x равно интегралу f по вероятностной мере
# (для модифицированного по мере массы q). Мера строится один раз на (вид, x)
# и затем применяется к любому числу функций: OperatorMeasure.apply(f).
#
# q < 1: мера сосредоточена на решётке t_k = q^a u_k, u_k = q^k/A, веса
# ~ u^a / (1+u)_q^{a+b}, a = [n]_q y, b = [n]_q + 1 (y = x или v_n(x)).
# q = 1: классическое ядро Бета второго рода, квадратура scipy.

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import NamedTuple, Protocol

import numpy as np
from scipy import integrate, special

from services.errors import ConvergenceError, DomainError
from services.functions import TestFunction
from services.qcalc import (
    QContext,
    q_improper_integral,
    q_improper_log_integral,
    q_integer,
    q_lattice,
    q_log_pochhammer_real,
    q_pochhammer_lattice,
    q_real_bracket,
)

logger = logging.getLogger(__name__)


class Variant(str, Enum):
    CLASSICAL = "classical"
    Q_STANCU_BETA = "qsb"
    MODIFIED_Q = "modified"
    CAI_PRESERVING = "cai"


@dataclass(frozen=True)
class OperatorKind:
    """Вид оператора. q из OperatorKind главнее q из QContext (контекст даёт только допуски)."""

    variant: Variant
    n: int
    q: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        min_n = 1 if self.variant is Variant.CLASSICAL else 2
        if int(self.n) != self.n or self.n < min_n:
            raise DomainError(f"{self.variant.value}: n >= {min_n}, получено n={self.n}")
        if not (0.0 < self.q <= 1.0):
            raise DomainError(f"q должен лежать в (0, 1], получено q={self.q}")
        if self.variant is Variant.CLASSICAL and self.q != 1.0:
            raise DomainError("классический оператор определён только при q = 1")

    def context(self, ctx: QContext) -> QContext:
        return ctx.with_q(self.q)

    @property
    def label(self) -> str:
        return f"{self.variant.value}(n={self.n}, q={self.q:g})"


class MomentTriple(NamedTuple):
    m0: float
    m1: float
    m2: float


class CentralMoments(NamedTuple):
    alpha: float
    delta: float


# ------------- меры -------------

class OperatorMeasure(Protocol):
    mass: float

    def apply(self, f: TestFunction) -> float: ...


@dataclass(frozen=True)
class PointMeasure:
    """Вырожденная мера в точке (x = 0)."""

    point: float
    mass: float = 1.0

    def apply(self, f: TestFunction) -> float:
        return self.mass * float(f(self.point))


@dataclass(frozen=True)
class LatticeMeasure:
    nodes: np.ndarray
    weights: np.ndarray
    mass: float = 1.0

    def apply(self, f: TestFunction) -> float:
        live = self.weights > 0
        with np.errstate(over="ignore", invalid="ignore"):
            terms = self.weights[live] * np.asarray(f(self.nodes[live]), dtype=float)
        if not np.all(np.isfinite(terms)):
            raise ConvergenceError(f"{f.name}: нечисловые значения на решётке")
        return self.mass * float(np.sum(terms))


@dataclass(frozen=True)
class ClassicalMeasure:
    """
    Бета второго рода: t = u/(1-u) переводит ядро в Beta(a, b) на (0, 1).
    Особенности на концах берёт на себя весовая квадратура weight="alg".
    """

    a: float
    b: float
    mass: float = 1.0
    tol: float = 1e-12

    def apply(self, f: TestFunction) -> float:
        if self.b > 2.0:
            # (1-u)^2 поглощает квадратичный рост f
            def g(u):
                d = max(1.0 - u, 1e-150)
                return float(f(u / d)) * d * d
            wvar = (self.a - 1.0, self.b - 3.0)
        else:
            def g(u):
                return float(f(u / max(1.0 - u, 1e-150)))
            wvar = (self.a - 1.0, self.b - 1.0)
        value, abserr = integrate.quad(
            g, 0.0, 1.0, weight="alg", wvar=wvar, epsabs=1e-14, epsrel=self.tol, limit=200
        )
        log_norm = float(special.betaln(self.a, self.b))
        result = value * math.exp(-log_norm)
        if not np.isfinite(result):
            raise ConvergenceError(f"{f.name}: классическая квадратура не сошлась", estimate=abserr)
        if abserr > 1e-8 * max(abs(value), 1e-300):
            logger.debug("classical quad for %s: abserr=%.3g value=%.6g", f.name, abserr, value)
        return self.mass * result


# ------------- ядро и нормировка -------------

def stancu_kernel(a: float, b: float, A: float, ctx: QContext) -> TestFunction:
    """
    u^{a-1} / (1+u)_q^{a+b}. На решётке u_k = q^k/A знаменатель берётся
    из рекуррентной таблицы, вне решётки считается прямым произведением.
    """
    if a <= 0 or b <= 0:
        raise DomainError(f"ядро требует a, b > 0, получено a={a}, b={b}")
    c = a + b

    if ctx.classical:
        def log_eval(log_u):
            log_u = np.asarray(log_u, dtype=float)
            return (a - 1.0) * log_u - c * np.logaddexp(0.0, log_u)
    else:
        log_q = -math.log(ctx.q)
        shift = math.log(A)
        base_N = ctx.bilateral_range
        base = q_pochhammer_lattice(1.0 / A, c, base_N, ctx)

        def table(reach: int):
            # таблица на ±bilateral_range строится один раз и не меняется
            if reach <= base_N:
                return base, base_N
            return q_pochhammer_lattice(1.0 / A, c, reach, ctx), reach

        def log_eval(log_u):
            log_u = np.asarray(log_u, dtype=float)
            k = -(log_u + shift) / log_q
            k_int = np.rint(k)
            reach = int(np.max(np.abs(k_int))) if k_int.size else 0
            if k_int.size and np.all(np.abs(k - k_int) < 1e-7) and reach <= ctx.max_terms:
                log_p, N = table(reach)
                denominator = log_p[(k_int + N).astype(np.int64)]
            else:
                flat = [q_log_pochhammer_real(math.exp(v), c, ctx) for v in log_u.ravel()]
                denominator = np.asarray(flat, dtype=float).reshape(log_u.shape)
            return (a - 1.0) * log_u - denominator

    def evaluate(u):
        with np.errstate(divide="ignore", over="ignore", under="ignore"):
            return np.exp(log_eval(np.log(u)))

    return TestFunction(
        name=f"kernel(a={a:g}, b={b:g})",
        eval=evaluate,
        uniformly_continuous=False,
        log_eval=log_eval,
    )


def log_normalize_to_unit(kernel: TestFunction, A: float, ctx: QContext) -> float:
    """log K, где K ∫_0^{∞/A} kernel d_q u = 1."""
    if kernel.log_eval is not None:
        return -q_improper_log_integral(kernel, A, ctx)
    integral = q_improper_integral(kernel, A, ctx)
    if integral <= 0:
        raise DomainError(f"{kernel.name}: интеграл ядра не положителен ({integral})")
    return -math.log(integral)


def normalize_to_unit(kernel: TestFunction, A: float, ctx: QContext) -> float:
    return math.exp(log_normalize_to_unit(kernel, A, ctx))


def _lattice_window(a: float, b: float, A: float, ctx: QContext) -> int:
    # Окно решётки: центр в среднем u, хвосты спадают как u^a (u -> 0)
    # и как u^{-(b-2)} (u -> ∞) с запасом на квадратичный рост f.
    log_q = -math.log(ctx.q)
    budget = math.log(1.0 / ctx.series_tol) + 10.0
    log_center = (
        math.log(q_real_bracket(a, ctx)) - math.log(q_real_bracket(b - 1.0, ctx)) + a * log_q
    )
    k_center = -(log_center + math.log(A)) / log_q
    k_low = k_center + budget / (a * log_q)
    # при малом a хвост у нуля закрывается геометрической суммой, хватает u <= tol e^{-5}
    k_small = (math.log(1.0 / ctx.series_tol) + 5.0 - math.log(A)) / log_q
    k_low = min(k_low, max(k_small, k_center + 16.0))
    k_high = -k_center + budget / ((b - 2.0) * log_q)
    wanted = int(math.ceil(1.25 * max(k_low, k_high, 1.0))) + 16
    return max(wanted, min(ctx.bilateral_range, int(690.0 / log_q)))


def _stancu_lattice_measure(a: float, b: float, A: float, ctx: QContext, mass: float) -> LatticeMeasure:
    log_tol = math.log(ctx.series_tol)
    N = _lattice_window(a, b, A, ctx)
    while True:
        wctx = replace(ctx, bilateral_range=N)
        kernel = stancu_kernel(a, b, A, wctx)
        lattice = q_lattice(A, wctx)
        log_terms = kernel.log_eval(lattice.log_u) + lattice.log_u
        log_t = lattice.log_u + a * math.log(ctx.q)
        grown = log_terms + np.logaddexp(0.0, 2.0 * log_t)
        peak = float(np.max(grown))
        right_ok = grown[0] - peak <= log_tol
        left_small = grown[-1] - peak <= log_tol
        if right_ok and (left_small or lattice.log_u[-1] <= log_tol - 5.0):
            break
        if 2 * N > ctx.max_terms:
            raise ConvergenceError(
                f"мера Станку-Бета (a={a:g}, b={b:g}): окно N={N} не покрывает хвосты",
                estimate=math.exp(max(grown[0], grown[-1]) - peak),
            )
        logger.debug("lattice window %d too narrow for a=%g b=%g, doubling", N, a, b)
        N *= 2
    with np.errstate(under="ignore", over="ignore"):
        nodes = np.exp(log_t)
    if not left_small:
        # у нуля (1+u)_q^{a+b} = 1 + O(u): члены дальше края идут с отношением q^a,
        # их сумма сосредоточена в t = 0
        tail = log_terms[-1] - math.log(math.expm1(-a * math.log(ctx.q)))
        log_terms = np.append(log_terms, tail)
        nodes = np.append(nodes, 0.0)
        logger.debug("closed lattice tail at u=%g with mass share %g", lattice.u[-1], math.exp(tail - peak))
    log_w = log_terms - special.logsumexp(log_terms)
    with np.errstate(under="ignore"):
        weights = np.exp(log_w)
    return LatticeMeasure(nodes=nodes, weights=weights, mass=mass)


def _stancu_measure(n: int, y: float, A: float, ctx: QContext, mass: float = 1.0) -> OperatorMeasure:
    if ctx.classical:
        return ClassicalMeasure(a=n * y, b=n + 1.0, mass=mass, tol=max(ctx.series_tol, 1e-13))
    bracket = q_integer(n, ctx)
    return _stancu_lattice_measure(bracket * y, bracket + 1.0, A, ctx, mass)


# ------------- операторы -------------

def v_n(x: float, n: int, ctx: QContext) -> float:
    """Узел Кая: при нём L_{n,q}(t^2; v_n(x)) = x^2 в замкнутых формах моментов."""
    if x < 0:
        raise DomainError(f"v_n требует x >= 0, получено x={x}")
    bracket = q_integer(n, ctx)
    c = (ctx.q * bracket - ctx.q) / bracket
    e = 1.0 / (2.0 * bracket)
    return math.sqrt(c * x * x + e * e) - e


def operator_measure(kind: OperatorKind, x: float, ctx: QContext, A: float = 1.0) -> OperatorMeasure:
    kctx = kind.context(ctx)
    variant = kind.variant
    if variant is Variant.CLASSICAL or variant is Variant.Q_STANCU_BETA:
        if x <= 0:
            raise DomainError(f"{variant.value}: x > 0, получено x={x}")
        return _stancu_measure(kind.n, x, A, kctx)
    if x < 0:
        raise DomainError(f"{variant.value}: x >= 0, получено x={x}")
    if variant is Variant.MODIFIED_Q:
        if x == 0:
            return PointMeasure(0.0, mass=kctx.q)
        return _stancu_measure(kind.n, x, A, kctx, mass=kctx.q)
    if x == 0:
        return PointMeasure(0.0)
    return _stancu_measure(kind.n, v_n(x, kind.n, kctx), A, kctx)


def _require(kind: OperatorKind, *variants: Variant) -> None:
    if kind.variant not in variants:
        raise DomainError(f"ожидался оператор {[v.value for v in variants]}, получен {kind.variant.value}")


def classical_stancu_beta(f: TestFunction, n: int, x: float) -> float:
    return operator_measure(OperatorKind(Variant.CLASSICAL, n), x, QContext(q=1.0)).apply(f)


def q_stancu_beta(f: TestFunction, kind: OperatorKind, x: float, ctx: QContext, A: float = 1.0) -> float:
    _require(kind, Variant.Q_STANCU_BETA)
    return operator_measure(kind, x, ctx, A).apply(f)


def modified_q_stancu_beta(f: TestFunction, kind: OperatorKind, x: float, ctx: QContext, A: float = 1.0) -> float:
    _require(kind, Variant.MODIFIED_Q)
    return operator_measure(kind, x, ctx, A).apply(f)


def cai_operator(f: TestFunction, kind: OperatorKind, x: float, ctx: QContext, A: float = 1.0) -> float:
    _require(kind, Variant.CAI_PRESERVING)
    return operator_measure(kind, x, ctx, A).apply(f)


def apply_operator(f: TestFunction, kind: OperatorKind, x: float, ctx: QContext, A: float = 1.0) -> float:
    return operator_measure(kind, x, ctx, A).apply(f)


# ------------- моменты -------------

def moments(kind: OperatorKind, x: float, ctx: QContext) -> MomentTriple:
    """Замкнутые формы моментов в том виде, в каком они используются в оценках сходимости."""
    if x < 0:
        raise DomainError(f"моменты требуют x >= 0, получено x={x}")
    kctx = kind.context(ctx)
    q = kctx.q
    n = kind.n
    if kind.variant is Variant.CLASSICAL:
        m2 = (n * x + 1.0) * x / (n - 1.0) if n > 1 else math.inf
        return MomentTriple(1.0, x, m2)
    bracket = q_integer(n, kctx)
    if kind.variant is Variant.Q_STANCU_BETA:
        return MomentTriple(1.0, x, (bracket * x + 1.0) * x / (q * (bracket - 1.0)))
    if kind.variant is Variant.MODIFIED_Q:
        return MomentTriple(q, q * x, (bracket * x + 1.0) * x / (bracket - 1.0))
    return MomentTriple(1.0, v_n(x, n, kctx), x * x)


def lattice_moments(kind: OperatorKind, x: float, ctx: QContext) -> MomentTriple:
    """
    Точные моменты меры на решётке (совпадают с интегралами по ней).
    Сдвиг u -> qu в двусторонней сумме даёт
        m1 = [a]_q/[N]_q,  m2 = [a]_q [a+1]_q / (q [N]_q [N-1]_q),
    где N = [n]_q, a = N y. При q = 1 это классические моменты.
    """
    if x < 0:
        raise DomainError(f"моменты требуют x >= 0, получено x={x}")
    kctx = kind.context(ctx)
    q = kctx.q
    mass = q if kind.variant is Variant.MODIFIED_Q else 1.0
    y = v_n(x, kind.n, kctx) if kind.variant is Variant.CAI_PRESERVING else x
    if y == 0:
        return MomentTriple(mass, 0.0, 0.0)
    if kind.n == 1:
        return MomentTriple(mass, mass * y, math.inf)
    N = q_integer(kind.n, kctx)
    a = N * y
    bracket_n = q_real_bracket(N, kctx)
    m1 = q_real_bracket(a, kctx) / bracket_n
    m2 = q_real_bracket(a, kctx) * q_real_bracket(a + 1.0, kctx) / (
        q * bracket_n * q_real_bracket(N - 1.0, kctx)
    )
    return MomentTriple(mass, mass * m1, mass * m2)


def central_moments(kind: OperatorKind, x: float, ctx: QContext, exact: bool = False) -> CentralMoments:
    """alpha = L(t - x; x), delta = L((t - x)^2; x). exact=True берёт точные моменты решётки."""
    m = lattice_moments(kind, x, ctx) if exact else moments(kind, x, ctx)
    alpha = m.m1 - x * m.m0
    delta = m.m2 - 2.0 * x * m.m1 + x * x * m.m0
    return CentralMoments(alpha, delta)


def cai_delta_closed_form(x: float, n: int, ctx: QContext) -> float:
    """delta_n(x) = 2x^2 - 2x sqrt(((q[n]-q)/[n]) x^2 + 1/(4[n]^2)) + x/[n]."""
    bracket = q_integer(n, ctx)
    c = (ctx.q * bracket - ctx.q) / bracket
    return 2.0 * x * x - 2.0 * x * math.sqrt(c * x * x + 1.0 / (4.0 * bracket * bracket)) + x / bracket


def stated_lattice_gap(kind: OperatorKind, x: float, ctx: QContext) -> MomentTriple:
    """Разность точных и используемых в оценках моментов; нулевая при q = 1."""
    exact = lattice_moments(kind, x, ctx)
    stated = moments(kind, x, ctx)
    return MomentTriple(*(e - s for e, s in zip(exact, stated)))


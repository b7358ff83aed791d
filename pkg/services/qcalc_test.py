# services/qcalc_test.py
import math

import mpmath
import numpy as np
import pytest
from scipy import special

from services.errors import ConvergenceError, DomainError
from services.functions import TestFunction
from services.qcalc import (
    QContext,
    q_beta,
    q_binomial,
    q_factorial,
    q_gamma,
    q_improper_integral,
    q_integer,
    q_jackson_integral,
    q_log_pochhammer_real,
    q_pochhammer_lattice,
    q_pochhammer_real,
    q_real_bracket,
)


def fn(name, f):
    return TestFunction(name=name, eval=f)


def test_q_integer_values(make_ctx):
    assert q_integer(3, make_ctx(0.5)) == pytest.approx(1.75, rel=1e-15)
    assert q_integer(3, make_ctx(1.0)) == 3.0
    assert q_integer(0, make_ctx(0.7)) == 0.0
    assert q_real_bracket(2.5, make_ctx(1.0)) == 2.5


@pytest.mark.parametrize("q", [0.1, 0.5, 0.99])
def test_q_real_bracket_matches_geometric_sum_for_integers(make_ctx, q):
    for k in range(1, 12):
        assert q_real_bracket(k, make_ctx(q)) == pytest.approx(sum(q ** j for j in range(k)), rel=1e-13)


def test_domain_errors(make_ctx):
    with pytest.raises(DomainError):
        q_integer(-1, make_ctx(0.5))
    with pytest.raises(DomainError):
        q_binomial(3, 5, make_ctx(0.5))
    with pytest.raises(DomainError):
        q_gamma(0.0, make_ctx(0.5))
    with pytest.raises(DomainError):
        QContext(q=1.5)
    with pytest.raises(DomainError):
        QContext(q=0.0)
    with pytest.raises(DomainError):
        q_jackson_integral(lambda t: t, 2.0, 1.0, make_ctx(0.5))


def test_q_factorial(make_ctx):
    assert q_factorial(4, make_ctx(0.5)) == pytest.approx(1.0 * 1.5 * 1.75 * 1.875, rel=1e-14)
    assert q_factorial(5, make_ctx(1.0)) == 120.0
    assert q_factorial(0, make_ctx(0.3)) == 1.0


@pytest.mark.parametrize("q", [0.3, 0.7, 0.95])
def test_q_binomial_symmetry_and_pascal(make_ctx, q):
    ctx = make_ctx(q)
    for n in range(1, 21):
        for k in range(0, n + 1):
            assert q_binomial(n, k, ctx) == q_binomial(n, n - k, ctx)
            if 0 < k < n:
                pascal = q_binomial(n - 1, k - 1, ctx) + q ** k * q_binomial(n - 1, k, ctx)
                assert q_binomial(n, k, ctx) == pytest.approx(pascal, rel=1e-12)


def test_q_binomial_classical(make_ctx):
    assert q_binomial(4, 2, make_ctx(1.0)) == pytest.approx(6.0)
    assert q_binomial(10, 3, make_ctx(1.0)) == pytest.approx(120.0)


def test_pochhammer_integer_is_finite_product(make_ctx):
    q, u = 0.6, 2.3
    expected = (1 + u) * (1 + q * u) * (1 + q * q * u)
    assert q_pochhammer_real(u, 3, make_ctx(q)) == pytest.approx(expected, rel=1e-13)
    assert q_pochhammer_real(u, 0, make_ctx(q)) == 1.0
    assert q_pochhammer_real(0.0, 2.7, make_ctx(q)) == 1.0


@pytest.mark.parametrize("q,u,t", [(0.5, 1.0, 2.5), (0.9, 0.3, 0.7), (0.3, 4.0, 1.25)])
def test_pochhammer_real_against_mpmath(make_ctx, q, u, t):
    mpmath.mp.dps = 30
    expected = mpmath.qp(-u, q) / mpmath.qp(-(q ** t) * u, q)
    assert q_pochhammer_real(u, t, make_ctx(q)) == pytest.approx(float(expected), rel=1e-10)


def test_pochhammer_classical_branch(make_ctx):
    assert q_pochhammer_real(1.5, 2.5, make_ctx(1.0)) == pytest.approx(2.5 ** 2.5, rel=1e-14)


def test_pochhammer_lattice_matches_direct_products(make_ctx):
    ctx = make_ctx(0.7)
    u0, t, N = 1.0, 2.5, 20
    table = q_pochhammer_lattice(u0, t, N, ctx)
    assert table.shape == (2 * N + 1,)
    for k in (-20, -3, 0, 5, 20):
        direct = q_log_pochhammer_real(u0 * 0.7 ** k, t, ctx)
        assert table[k + N] == pytest.approx(direct, abs=1e-9)


@pytest.mark.parametrize("q", [0.3, 0.5, 0.9])
@pytest.mark.parametrize("t", [0.5, 1.5, 3.7])
def test_q_gamma_against_mpmath(make_ctx, q, t):
    mpmath.mp.dps = 30
    assert q_gamma(t, make_ctx(q)) == pytest.approx(float(mpmath.qgamma(t, q)), rel=1e-10)


@pytest.mark.parametrize("q", [0.3, 0.5, 0.99])
def test_q_gamma_functional_equation(make_ctx, q):
    ctx = make_ctx(q)
    for t in (0.25, 1.0, 2.5, 7.3):
        assert q_gamma(t + 1, ctx) == pytest.approx(q_real_bracket(t, ctx) * q_gamma(t, ctx), rel=1e-10)
    for n in range(0, 8):
        assert q_gamma(n + 1, ctx) == pytest.approx(q_factorial(n, ctx), rel=1e-10)


def test_q_beta(make_ctx):
    assert q_beta(2.5, 1.5, make_ctx(1.0)) == pytest.approx(special.beta(2.5, 1.5), rel=1e-12)
    ctx = make_ctx(0.6)
    assert q_beta(2.5, 1.5, ctx) == pytest.approx(q_beta(1.5, 2.5, ctx), rel=1e-12)
    mpmath.mp.dps = 30
    expected = mpmath.qgamma(2.5, 0.6) * mpmath.qgamma(1.5, 0.6) / mpmath.qgamma(4.0, 0.6)
    assert q_beta(2.5, 1.5, ctx) == pytest.approx(float(expected), rel=1e-10)


@pytest.mark.parametrize("q", [0.2, 0.5, 0.9, 0.99])
def test_jackson_integral_of_monomials(make_ctx, q):
    ctx = make_ctx(q)
    b = 1.7
    assert q_jackson_integral(lambda t: t, 0.0, b, ctx) == pytest.approx(b ** 2 / q_integer(2, ctx), rel=1e-10)
    assert q_jackson_integral(lambda t: t * t, 0.0, 1.0, ctx) == pytest.approx(1.0 / q_integer(3, ctx), rel=1e-10)


def test_jackson_integral_classical_branch(make_ctx):
    assert q_jackson_integral(np.exp, 0.0, 1.0, make_ctx(1.0)) == pytest.approx(math.e - 1.0, rel=1e-12)


def test_improper_integral_basic(make_ctx):
    ctx = make_ctx(0.5)
    zero = fn("0", np.zeros_like)
    assert q_improper_integral(zero, 1.0, ctx) == 0.0
    f = fn("exp(-t)", lambda t: np.exp(-t))
    g = fn("1/(1+t)^3", lambda t: 1.0 / (1.0 + t) ** 3)
    h = fn("2f+3g", lambda t: 2.0 * np.exp(-t) + 3.0 / (1.0 + t) ** 3)
    combined = 2.0 * q_improper_integral(f, 1.0, ctx) + 3.0 * q_improper_integral(g, 1.0, ctx)
    assert q_improper_integral(h, 1.0, ctx) == pytest.approx(combined, rel=1e-12)


def test_improper_integral_classical_branch(make_ctx):
    f = fn("exp(-t)", lambda t: np.exp(-t))
    assert q_improper_integral(f, 1.0, make_ctx(1.0)) == pytest.approx(1.0, rel=1e-9)


def test_improper_integral_rejects_heavy_tail(make_ctx):
    heavy = fn("1/sqrt(t)", lambda t: 1.0 / np.sqrt(t))
    with pytest.raises(ConvergenceError):
        q_improper_integral(heavy, 1.0, make_ctx(0.5))


# ------------- неравенство Коши-Буняковского для интеграла Джексона -------------

def _cauchy_schwarz_sides(x, a, b, ctx):
    lhs = q_jackson_integral(lambda t: np.abs(t - x), a, b, ctx)
    second = q_jackson_integral(lambda t: (t - x) ** 2, a, b, ctx)
    mass = q_jackson_integral(np.ones_like, a, b, ctx)
    return lhs, math.sqrt(second * mass)


def test_cauchy_schwarz_on_lattice_endpoints(make_ctx):
    rng = np.random.default_rng(7)
    for _ in range(200):
        q = float(rng.uniform(0.1, 0.95))
        b = float(rng.uniform(0.5, 5.0))
        m = int(rng.integers(0, 9))
        a = 0.0 if m == 0 else b * q ** m
        x = float(rng.uniform(0.0, 6.0))
        lhs, rhs = _cauchy_schwarz_sides(x, a, b, make_ctx(q))
        assert lhs <= rhs + 1e-10 * (1.0 + rhs)


def test_cauchy_schwarz_can_fail_off_lattice(make_ctx):
    # ∫_a^b как разность ∫_0^b - ∫_0^a не является положительной мерой при a вне {b q^m}
    lhs, rhs = _cauchy_schwarz_sides(0.45, 0.45, 1.0, make_ctx(0.5))
    assert lhs == pytest.approx(0.2908333333, abs=1e-8)
    assert rhs == pytest.approx(0.289358, abs=1e-5)
    assert lhs > rhs + 1e-3

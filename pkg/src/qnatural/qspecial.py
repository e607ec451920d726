"""q-special functions: both q-exponentials, q-trig, q-hyperbolic, q-gamma.

Series definitions (0 < q < 1 throughout):

    E_q(x) = sum_n q^{n(n-1)/2} x^n / [n]!          entire ("first kind")
    e_q(x) = sum_n x^n / [n]!                        radius 1/(1-q) ("second")

with the product identities E_q(x) = (-(1-q)x; q)_inf and
e_q(x) = 1 / ((1-q)x; q)_inf, hence (e_q(x))^{-1} = E_q(-x).

The two q-gamma functions are Jackson integrals:

    Gamma_q(t) = int_0^{1/(1-q)} x^{t-1} E_q(-qx) d_q x      (finite lattice)
    gamma_q(t) = int_0^{inf}     x^{t-1} e_q(-x)  d_q x      (bilateral lattice)

and q-beta is B_q(t, s) = int_0^1 x^{t-1} (qx; q)_{s-1} d_q x.
"""

from __future__ import annotations

import math
from enum import Enum
from functools import lru_cache

from .errors import DomainError, NonConvergence
from .qcore import (
    QContext,
    SeriesResult,
    SeriesStatus,
    q_number,
    q_pochhammer_inf,
    sum_series,
)


def _radius(ctx: QContext) -> float:
    return 1.0 / ctx.one_minus_q


def exp_first(x: float, ctx: QContext) -> SeriesResult:
    """E_q(x), summed termwise; entire, so the status must come back Converged."""
    if not math.isfinite(x):
        raise DomainError(f"exp_first requires finite x, got {x!r}")

    def terms():
        term = 1.0
        n = 0
        while True:
            yield term
            # next term: multiply by q^n x / [n+1]
            term *= ctx.q ** n * x / q_number(n + 1.0, ctx)
            if term == 0.0:
                return
            n += 1

    result = sum_series(terms(), ctx)
    if result.status is not SeriesStatus.CONVERGED:
        raise NonConvergence(
            f"E_q series did not stabilise within {ctx.max_terms} terms for x={x}"
        )
    return result


def exp_second(x: float, ctx: QContext) -> SeriesResult:
    """e_q(x), summed termwise inside its radius |x| < 1/(1-q)."""
    if abs(x) >= _radius(ctx):
        raise DomainError(
            f"exp_second requires |x| < 1/(1-q) = {_radius(ctx)}, got {x}"
        )

    def terms():
        term = 1.0
        n = 0
        while True:
            yield term
            term *= x / q_number(n + 1.0, ctx)
            if term == 0.0:
                return
            n += 1

    result = sum_series(terms(), ctx)
    if result.status is not SeriesStatus.CONVERGED:
        raise NonConvergence(
            f"e_q series did not stabilise within {ctx.max_terms} terms for x={x}"
        )
    return result


def exp_first_product(x: float, ctx: QContext) -> float:
    """E_q(x) through the product (-(1-q)x; q)_inf; independent of the series."""
    return q_pochhammer_inf(-ctx.one_minus_q * x, ctx).require_converged()


def exp_second_neg(x: float, ctx: QContext) -> float:
    """e_q(-x) for x >= 0, evaluated as 1/E_q(x) in stable product form.

    Valid on the whole half line (the series of e_q only reaches
    |x| < 1/(1-q)); each reciprocal factor is <= 1 so large arguments
    underflow gracefully to 0 instead of overflowing.
    """
    if x < 0:
        raise DomainError(f"exp_second_neg requires x >= 0, got {x}")
    product = 1.0
    power = 1.0
    c = ctx.one_minus_q * x
    for _ in range(ctx.max_terms):
        if c * power < ctx.rel_tol * 0.5:
            return product
        product /= 1.0 + c * power
        power *= ctx.q
        if product == 0.0:
            return 0.0
    raise NonConvergence(f"e_q(-x) product did not stabilise for x={x}")


class TrigKind(Enum):
    SIN_SECOND = "SinSecond"
    COS_SECOND = "CosSecond"
    SIN_FIRST = "SinFirst"
    COS_FIRST = "CosFirst"


def q_trig(kind: TrigKind, a: float, t: float, ctx: QContext) -> SeriesResult:
    """The four q-trigonometric series in the argument a*t.

    Second-kind series (built from e_q) require |a t| < 1/(1-q); the
    first-kind series (built from E_q) are entire.
    """
    arg = a * t
    second = kind in (TrigKind.SIN_SECOND, TrigKind.COS_SECOND)
    if second and abs(arg) >= _radius(ctx):
        raise DomainError(
            f"second-kind q-trig requires |a t| < 1/(1-q) = {_radius(ctx)}, got {arg}"
        )

    def terms():
        n = 0
        if kind is TrigKind.SIN_SECOND:
            term = arg
            while term != 0.0:
                yield term
                term *= -(arg * arg) / (q_number(2 * n + 2.0, ctx) * q_number(2 * n + 3.0, ctx))
                n += 1
            yield 0.0
        elif kind is TrigKind.COS_SECOND:
            term = 1.0
            while term != 0.0:
                yield term
                term *= -(arg * arg) / (q_number(2 * n + 1.0, ctx) * q_number(2 * n + 2.0, ctx))
                n += 1
        elif kind is TrigKind.SIN_FIRST:
            term = arg  # n = 0: q^0 a t / [1]!
            while term != 0.0:
                yield term
                term *= -(ctx.q ** (n + 1)) * arg * arg / (
                    q_number(2 * n + 2.0, ctx) * q_number(2 * n + 3.0, ctx)
                )
                n += 1
            yield 0.0
        else:  # COS_FIRST
            term = 1.0
            while term != 0.0:
                yield term
                term *= -(ctx.q ** n) * arg * arg / (
                    q_number(2 * n + 1.0, ctx) * q_number(2 * n + 2.0, ctx)
                )
                n += 1

    result = sum_series(terms(), ctx)
    if result.status is not SeriesStatus.CONVERGED:
        raise NonConvergence(f"q-trig series did not stabilise for kind={kind}")
    return result


class HyperbolicKind(Enum):
    COSH_SECOND = "CoshSecond"
    SINH_SECOND = "SinhSecond"


def q_hyperbolic(kind: HyperbolicKind, t: float, ctx: QContext) -> SeriesResult:
    """cosh^q / sinh^q through (e_q(t) +/- e_q(-t)) / 2."""
    plus = exp_second(t, ctx)
    minus = exp_second(-t, ctx)
    sign = 1.0 if kind is HyperbolicKind.COSH_SECOND else -1.0
    return SeriesResult(
        (plus.value + sign * minus.value) / 2.0,
        plus.terms_used + minus.terms_used,
        (plus.tail_estimate + minus.tail_estimate) / 2.0,
        SeriesStatus.CONVERGED,
    )


@lru_cache(maxsize=None)
def _log_q_poch_inf(ctx: QContext) -> float:
    """log (q; q)_inf, accumulated termwise.

    For q close to 1 the product itself underflows double precision while
    its logarithm stays representable; the gamma lattice walks in log space
    for exactly this reason.
    """
    total = 0.0
    power = ctx.q
    for _ in range(ctx.max_terms):
        if power < 1e-18:
            return total
        total += math.log1p(-power)
        power *= ctx.q
    raise NonConvergence(
        f"log (q; q)_inf needs more than {ctx.max_terms} factors at q={ctx.q}"
    )


@lru_cache(maxsize=8192)
def _gamma_first_cached(t: float, ctx: QContext) -> SeriesResult:
    # Lattice x_k = q^k/(1-q), k >= 0, where E_q(-q x_k) = (q^{k+1}; q)_inf.
    # The pochhammer factor is walked in log space via the exact recurrence
    # log (q^{k+1}; q)_inf = log (q^k; q)_inf - log(1 - q^k), because the
    # plain product underflows long before its k-dependence is over.
    # The b^(t-1) prefactor is folded into the terms so the truncation rule
    # sees the final magnitude of Gamma_q, not the (1-q)^(t-1)-small raw sum.
    log_b = -math.log(ctx.one_minus_q)
    log_q = math.log(ctx.q)
    log_poch = _log_q_poch_inf(ctx) + (t - 1.0) * log_b

    def terms():
        nonlocal log_poch
        k = 0
        while True:
            yield math.exp(log_poch + k * t * log_q)
            k += 1
            log_poch -= math.log1p(-(ctx.q ** k))

    result = sum_series(terms(), ctx)
    if result.status is not SeriesStatus.CONVERGED:
        raise NonConvergence(
            f"Gamma_q lattice sum did not stabilise within {ctx.max_terms} terms (t={t})"
        )
    return result


def gamma_first(t: float, ctx: QContext) -> SeriesResult:
    """Gamma_q(t) as the finite-limit Jackson integral with E_q(-qx) kernel."""
    if t <= 0:
        raise DomainError(f"gamma_first requires t > 0, got {t}")
    return _gamma_first_cached(float(t), ctx)


@lru_cache(maxsize=8192)
def _gamma_second_cached(t: float, ctx: QContext) -> SeriesResult:
    # Bilateral sum (1-q) sum_k q^{k t} e_q(-q^k).  The whole term
    # q^{k t} e_q(-q^k) is walked multiplicatively from k = 0 in both
    # directions: its factors stay near the true term magnitude, which the
    # separate weight q^{k t} does not (it overflows for moderate t).
    f0 = exp_second_neg(1.0, ctx)
    q_pow_t = ctx.q ** t
    total = 0.0
    terms_used = 0
    k_first = 0
    k_last = -1

    for direction in (+1, -1):
        k = 0 if direction > 0 else -1
        edge = ctx.lattice_k_max if direction > 0 else ctx.lattice_k_min
        if direction > 0:
            term = f0
        else:
            term = f0 / (q_pow_t * (1.0 + ctx.one_minus_q / ctx.q))
        small_streak = 0
        last_mag = math.inf
        while (k <= edge) if direction > 0 else (k >= edge):
            if not math.isfinite(term):
                raise NonConvergence(
                    f"gamma_q lattice term exceeded double range (t={t})"
                )
            total += term
            terms_used += 1
            last_mag = abs(term)
            if direction > 0:
                k_last = k
            else:
                k_first = k
            if last_mag <= ctx.rel_tol * max(abs(total), 1.0):
                small_streak += 1
                if small_streak >= 3:
                    break
            else:
                small_streak = 0
            if terms_used >= ctx.max_terms:
                break
            if direction > 0:
                term *= q_pow_t * (1.0 + ctx.one_minus_q * ctx.q ** k)
                k += 1
            else:
                k -= 1
                term /= q_pow_t * (1.0 + ctx.one_minus_q * ctx.q ** k)
        if small_streak < 3 and last_mag > ctx.rel_tol * max(abs(total), 1.0):
            raise NonConvergence(
                f"gamma_q bilateral sum did not stabilise inside the window (t={t})"
            )

    return SeriesResult(
        total * ctx.one_minus_q,
        terms_used,
        ctx.rel_tol * max(abs(total), 1.0),
        SeriesStatus.CONVERGED,
        k_first=k_first,
        k_last=k_last,
    )


def gamma_second(t: float, ctx: QContext) -> SeriesResult:
    """gamma_q(t), the bilateral Jackson integral with e_q(-x) kernel."""
    if t <= 0:
        raise DomainError(f"gamma_second requires t > 0, got {t}")
    return _gamma_second_cached(float(t), ctx)


def beta_q(t: float, s: float, ctx: QContext) -> SeriesResult:
    """B_q(t, s) = int_0^1 x^{t-1} (qx; q)_{s-1} d_q x on the lattice x = q^k."""
    if t <= 0 or s <= 0:
        raise DomainError(f"beta_q requires t, s > 0, got t={t}, s={s}")
    # At x = q^k the integrand is q^{k(t-1)} (q^{k+1}; q)_inf / (q^{k+s}; q)_inf;
    # both pochhammers walk by one-factor recurrences.
    num = q_pochhammer_inf(ctx.q, ctx).require_converged()         # (q^{1}; q)_inf
    den = q_pochhammer_inf(ctx.q ** s, ctx).require_converged()    # (q^{s}; q)_inf

    def terms():
        nonlocal num, den
        k = 0
        weight = ctx.one_minus_q  # (1-q) q^{k t}
        step = ctx.q ** t
        while True:
            yield weight * num / den
            num /= 1.0 - ctx.q ** (k + 1)
            den /= 1.0 - ctx.q ** (k + s)
            k += 1
            weight *= step

    result = sum_series(terms(), ctx)
    if result.status is not SeriesStatus.CONVERGED:
        raise NonConvergence(
            f"B_q lattice sum did not stabilise within {ctx.max_terms} terms"
        )
    return result

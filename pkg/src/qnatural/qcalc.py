"""The q-derivative operator and the Jackson-integral family.

The q-derivative is the difference quotient

    (D_q f)(x) = (f(x) - f(qx)) / ((1 - q) x),   x != 0,

with the x = 0 value obtained as a stabilised limit along the lattice q^j.
Jackson integrals come in three forms: the finite sum on [0, x], the generic
interval difference, and the bilateral "improper" sum over the lattice
{ scale * q^k : k in Z } with divergence diagnostics.
"""

from __future__ import annotations

import math
from typing import Callable

from .errors import DomainError, NonConvergence
from .qcore import (
    QContext,
    SeriesResult,
    SeriesStatus,
    sum_series,
)

Evaluable = Callable[[float], float]


def q_derivative(f: Evaluable, x: float, ctx: QContext) -> float:
    """Difference quotient (f(x) - f(qx)) / ((1-q) x); lattice limit at 0."""
    if x < 0:
        raise DomainError(f"q_derivative requires x >= 0, got {x}")
    if x > 0:
        return (f(x) - f(ctx.q * x)) / (ctx.one_minus_q * x)
    # Limit along x0 = q^j, stabilised to rel_tol (equals f'(0) when it exists).
    prev = None
    stable = 0
    point = ctx.q
    for _ in range(ctx.max_terms):
        current = (f(point) - f(ctx.q * point)) / (ctx.one_minus_q * point)
        if prev is not None:
            if abs(current - prev) <= ctx.rel_tol * max(abs(current), 1.0):
                stable += 1
                if stable >= 2:
                    return current
            else:
                stable = 0
        prev = current
        point *= ctx.q
        if point == 0.0:
            break
    raise NonConvergence("q_derivative lattice limit at x=0 did not stabilise")


def q_derivative_n(f: Evaluable, x: float, n: int, ctx: QContext) -> float:
    """n-fold composition of the q-derivative; n = 0 is the identity."""
    if n < 0 or n != int(n):
        raise DomainError(f"q_derivative_n requires a nonnegative integer n, got {n!r}")
    if n == 0:
        return f(x)
    if n == 1:
        return q_derivative(f, x, ctx)
    return q_derivative(lambda y: q_derivative_n(f, y, n - 1, ctx), x, ctx)


def jackson_finite(f: Evaluable, x: float, ctx: QContext) -> SeriesResult:
    """Finite Jackson integral (1-q) x sum_{k>=0} q^k f(x q^k)."""
    if x <= 0:
        raise DomainError(f"jackson_finite requires x > 0, got {x}")

    def terms():
        coeff = ctx.one_minus_q * x
        power = 1.0
        point = x
        while True:
            yield coeff * power * f(point)
            power *= ctx.q
            point = x * power

    result = sum_series(terms(), ctx)
    if result.status is SeriesStatus.TRUNCATED:
        raise NonConvergence(
            f"jackson_finite did not stabilise within {ctx.max_terms} terms"
        )
    return result


def jackson_interval(f: Evaluable, a: float, b: float, ctx: QContext) -> SeriesResult:
    """Jackson integral on [a, b], the difference of two finite integrals."""
    if a < 0 or b < 0:
        raise DomainError("jackson_interval requires a, b >= 0")
    if a == b:
        return SeriesResult(0.0, 0, 0.0, SeriesStatus.CONVERGED)
    upper = jackson_finite(f, b, ctx) if b > 0 else SeriesResult(0.0, 0, 0.0, SeriesStatus.CONVERGED)
    lower = jackson_finite(f, a, ctx) if a > 0 else SeriesResult(0.0, 0, 0.0, SeriesStatus.CONVERGED)
    status = upper.status
    if lower.status is SeriesStatus.DIVERGED or upper.status is SeriesStatus.DIVERGED:
        status = SeriesStatus.DIVERGED
    return SeriesResult(
        upper.value - lower.value,
        upper.terms_used + lower.terms_used,
        upper.tail_estimate + lower.tail_estimate,
        status,
    )


def jackson_improper(
    f: Evaluable,
    ctx: QContext,
    lattice_scale: float = 1.0,
) -> SeriesResult:
    """Bilateral Jackson integral (1-q) sum_k q^k s f(s q^k), s = lattice_scale.

    The sum runs over the context window [lattice_k_min, lattice_k_max],
    expanding from k = 0 in both directions.  If either direction fails to
    stabilise inside the window (Cauchy test at rel_tol, or outright term
    growth) the result carries DIVERGED status instead of raising; callers
    must check.  k_first/k_last expose the retained window.
    """
    if lattice_scale <= 0:
        raise DomainError("lattice_scale must be positive")
    q = ctx.q
    coeff = ctx.one_minus_q * lattice_scale
    total = 0.0
    terms_used = 0
    k_first = 0
    k_last = -1
    diverged = False

    for direction in (+1, -1):
        prev_mag = None
        ratio = 0.5
        tail = 0.0
        small_streak = 0
        grow_streak = 0
        stabilised = False
        k = 0 if direction > 0 else -1
        edge = ctx.lattice_k_max if direction > 0 else ctx.lattice_k_min
        while (k <= edge) if direction > 0 else (k >= edge):
            point = lattice_scale * q ** k
            term = coeff * q ** k * f(point)
            if not math.isfinite(term):
                diverged = True
                break
            total += term
            terms_used += 1
            if direction > 0:
                k_last = k
            else:
                k_first = k
            mag = abs(term)
            if prev_mag is not None and prev_mag > 0.0 and mag > 0.0:
                ratio = mag / prev_mag
                grow_streak = grow_streak + 1 if mag > prev_mag else 0
            if mag > 0.0:
                prev_mag = mag
            r = min(ratio, 1.0 - 1e-9)
            tail = mag * r / (1.0 - r) if mag > 0.0 else tail * r
            if tail <= ctx.rel_tol * max(abs(total), 1.0):
                small_streak += 1
                if small_streak >= 3:
                    stabilised = True
                    break
            else:
                small_streak = 0
            if grow_streak >= 8:
                diverged = True
                break
            if terms_used >= ctx.max_terms:
                break
            k += direction
        if not stabilised and not diverged:
            # Window or budget exhausted while terms were still significant.
            if prev_mag is not None and prev_mag > ctx.rel_tol * max(abs(total), 1.0):
                diverged = True
        if diverged:
            break

    status = SeriesStatus.DIVERGED if diverged else SeriesStatus.CONVERGED
    tail_out = 0.0 if status is SeriesStatus.CONVERGED else abs(total)
    return SeriesResult(
        total, terms_used, tail_out, status, k_first=k_first, k_last=k_last
    )

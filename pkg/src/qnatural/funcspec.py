"""Symbolic descriptors for transform inputs.

A FunctionSpec names one of the supported function shapes (monomial,
q-exponentials, q-trig, Heaviside step, power series, linear combinations)
so that transforms can pick between closed-form rules, termwise power-series
reduction and direct lattice evaluation.  Every shape also knows how to
evaluate itself numerically at a lattice point and, where meaningful, as its
classical (q -> 1) counterpart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Tuple, Union

from .errors import DomainError, UnknownForm
from .qcore import QContext, q_number
from .qspecial import (
    HyperbolicKind,
    TrigKind,
    exp_first,
    exp_second,
    exp_second_neg,
    q_hyperbolic,
    q_trig,
)


@dataclass(frozen=True)
class Constant:
    c: float


@dataclass(frozen=True)
class Monomial:
    alpha: float


@dataclass(frozen=True)
class ExpClassical:
    a: float


@dataclass(frozen=True)
class ExpFirst:
    a: float


@dataclass(frozen=True)
class ExpSecond:
    a: float


@dataclass(frozen=True)
class SinSecond:
    a: float


@dataclass(frozen=True)
class CosSecond:
    a: float


@dataclass(frozen=True)
class SinFirst:
    a: float


@dataclass(frozen=True)
class CosFirst:
    a: float


@dataclass(frozen=True)
class CoshSecond:
    a: float = 1.0


@dataclass(frozen=True)
class SinhSecond:
    a: float = 1.0


@dataclass(frozen=True)
class Heaviside:
    a: float

    def __post_init__(self) -> None:
        if self.a < 0:
            raise DomainError(f"Heaviside shift must be >= 0, got {self.a}")


@dataclass(frozen=True)
class PowerSeries:
    """f(t) = sum_i coefficients[i] * t^(exponent_step * i)."""

    coefficients: Tuple[float, ...]
    exponent_step: float = 1.0

    def __post_init__(self) -> None:
        if self.exponent_step <= 0:
            raise DomainError("PowerSeries exponent step must be positive")
        if not self.coefficients:
            raise DomainError("PowerSeries needs at least one coefficient")


@dataclass(frozen=True)
class Sum:
    parts: Tuple["FunctionSpec", ...]


@dataclass(frozen=True)
class Scale:
    c: float
    inner: "FunctionSpec"


@dataclass(frozen=True)
class ArgScale:
    """f(t) = inner(k * t)."""

    k: float
    inner: "FunctionSpec"


FunctionSpec = Union[
    Constant,
    Monomial,
    ExpClassical,
    ExpFirst,
    ExpSecond,
    SinSecond,
    CosSecond,
    SinFirst,
    CosFirst,
    CoshSecond,
    SinhSecond,
    Heaviside,
    PowerSeries,
    Sum,
    Scale,
    ArgScale,
]


def _power(t: float, alpha: float) -> float:
    if t == 0.0:
        if alpha > 0:
            return 0.0
        if alpha == 0:
            return 1.0
        raise DomainError(f"t^{alpha} is singular at t = 0")
    return t ** alpha


def evaluate(spec: FunctionSpec, t: float, ctx: QContext) -> float:
    """Numeric value of the q-function named by the spec at the point t."""
    if isinstance(spec, Constant):
        return spec.c
    if isinstance(spec, Monomial):
        return _power(t, spec.alpha)
    if isinstance(spec, ExpClassical):
        return math.exp(spec.a * t)
    if isinstance(spec, ExpFirst):
        return exp_first(spec.a * t, ctx).value
    if isinstance(spec, ExpSecond):
        x = spec.a * t
        if x <= -1.0 / ctx.one_minus_q:
            # Beyond the series radius on the decaying side: e_q(-|x|) = 1/E_q(|x|).
            return exp_second_neg(-x, ctx)
        return exp_second(x, ctx).value
    if isinstance(spec, SinSecond):
        return q_trig(TrigKind.SIN_SECOND, spec.a, t, ctx).value
    if isinstance(spec, CosSecond):
        return q_trig(TrigKind.COS_SECOND, spec.a, t, ctx).value
    if isinstance(spec, SinFirst):
        return q_trig(TrigKind.SIN_FIRST, spec.a, t, ctx).value
    if isinstance(spec, CosFirst):
        return q_trig(TrigKind.COS_FIRST, spec.a, t, ctx).value
    if isinstance(spec, CoshSecond):
        return q_hyperbolic(HyperbolicKind.COSH_SECOND, spec.a * t, ctx).value
    if isinstance(spec, SinhSecond):
        return q_hyperbolic(HyperbolicKind.SINH_SECOND, spec.a * t, ctx).value
    if isinstance(spec, Heaviside):
        return 1.0 if t >= spec.a else 0.0
    if isinstance(spec, PowerSeries):
        return sum(
            c * _power(t, spec.exponent_step * i)
            for i, c in enumerate(spec.coefficients)
            if c != 0.0
        )
    if isinstance(spec, Sum):
        return sum(evaluate(p, t, ctx) for p in spec.parts)
    if isinstance(spec, Scale):
        return spec.c * evaluate(spec.inner, t, ctx)
    if isinstance(spec, ArgScale):
        return evaluate(spec.inner, spec.k * t, ctx)
    raise UnknownForm(f"unsupported spec {spec!r}")


def classical_evaluate(spec: FunctionSpec, t: float) -> float:
    """Classical (q -> 1) counterpart of the spec, for the classical layer."""
    if isinstance(spec, Constant):
        return spec.c
    if isinstance(spec, Monomial):
        return _power(t, spec.alpha)
    if isinstance(spec, (ExpClassical, ExpFirst, ExpSecond)):
        return math.exp(spec.a * t)
    if isinstance(spec, (SinSecond, SinFirst)):
        return math.sin(spec.a * t)
    if isinstance(spec, (CosSecond, CosFirst)):
        return math.cos(spec.a * t)
    if isinstance(spec, CoshSecond):
        return math.cosh(spec.a * t)
    if isinstance(spec, SinhSecond):
        return math.sinh(spec.a * t)
    if isinstance(spec, Heaviside):
        return 1.0 if t >= spec.a else 0.0
    if isinstance(spec, PowerSeries):
        return sum(
            c * _power(t, spec.exponent_step * i)
            for i, c in enumerate(spec.coefficients)
            if c != 0.0
        )
    if isinstance(spec, Sum):
        return sum(classical_evaluate(p, t) for p in spec.parts)
    if isinstance(spec, Scale):
        return spec.c * classical_evaluate(spec.inner, t)
    if isinstance(spec, ArgScale):
        return classical_evaluate(spec.inner, spec.k * t)
    raise UnknownForm(f"unsupported spec {spec!r}")


def classical_growth_rate(spec: FunctionSpec, u: float) -> float:
    """Upper exponential growth rate of t -> f(u t) for tail truncation."""
    if isinstance(spec, (Constant, Monomial, Heaviside, PowerSeries)):
        return 0.0
    if isinstance(spec, (ExpClassical, ExpFirst, ExpSecond)):
        return max(spec.a * u, 0.0)
    if isinstance(spec, (SinSecond, CosSecond, SinFirst, CosFirst)):
        return 0.0
    if isinstance(spec, (CoshSecond, SinhSecond)):
        return abs(spec.a) * u
    if isinstance(spec, Sum):
        return max(classical_growth_rate(p, u) for p in spec.parts)
    if isinstance(spec, Scale):
        return classical_growth_rate(spec.inner, u)
    if isinstance(spec, ArgScale):
        return classical_growth_rate(spec.inner, spec.k * u)
    raise UnknownForm(f"unsupported spec {spec!r}")


def classical_breakpoints(spec: FunctionSpec, u: float) -> Tuple[float, ...]:
    """Jump locations of t -> f(u t), so quadrature can split there."""
    if isinstance(spec, Heaviside):
        return (spec.a / u,) if u > 0 else ()
    if isinstance(spec, Sum):
        pts: list = []
        for p in spec.parts:
            pts.extend(classical_breakpoints(p, u))
        return tuple(sorted(set(pts)))
    if isinstance(spec, Scale):
        return classical_breakpoints(spec.inner, u)
    if isinstance(spec, ArgScale):
        return classical_breakpoints(spec.inner, spec.k * u)
    return ()


def power_terms(spec: FunctionSpec, ctx: QContext) -> Iterator[Tuple[float, float]]:
    """Yield (coefficient, exponent) pairs of the spec's power expansion.

    Exponential and trigonometric shapes yield infinitely many terms; the
    consumer truncates.  Heaviside has no power expansion.
    """
    if isinstance(spec, Constant):
        yield (spec.c, 0.0)
        return
    if isinstance(spec, Monomial):
        yield (1.0, spec.alpha)
        return
    if isinstance(spec, ExpClassical):
        c = 1.0
        n = 0
        while c != 0.0:
            yield (c, float(n))
            n += 1
            c *= spec.a / n
    elif isinstance(spec, ExpFirst):
        c = 1.0
        n = 0
        while c != 0.0:
            yield (c, float(n))
            c *= ctx.q ** n * spec.a / q_number(n + 1.0, ctx)
            n += 1
    elif isinstance(spec, ExpSecond):
        c = 1.0
        n = 0
        while c != 0.0:
            yield (c, float(n))
            c *= spec.a / q_number(n + 1.0, ctx)
            n += 1
    elif isinstance(spec, SinSecond):
        c = spec.a
        n = 0
        while c != 0.0:
            yield (c, float(2 * n + 1))
            c *= -spec.a * spec.a / (
                q_number(2 * n + 2.0, ctx) * q_number(2 * n + 3.0, ctx)
            )
            n += 1
        yield (0.0, 1.0)
    elif isinstance(spec, CosSecond):
        c = 1.0
        n = 0
        while c != 0.0:
            yield (c, float(2 * n))
            c *= -spec.a * spec.a / (
                q_number(2 * n + 1.0, ctx) * q_number(2 * n + 2.0, ctx)
            )
            n += 1
    elif isinstance(spec, SinFirst):
        c = spec.a
        n = 0
        while c != 0.0:
            yield (c, float(2 * n + 1))
            c *= -(ctx.q ** (n + 1)) * spec.a * spec.a / (
                q_number(2 * n + 2.0, ctx) * q_number(2 * n + 3.0, ctx)
            )
            n += 1
        yield (0.0, 1.0)
    elif isinstance(spec, CosFirst):
        c = 1.0
        n = 0
        while c != 0.0:
            yield (c, float(2 * n))
            c *= -(ctx.q ** n) * spec.a * spec.a / (
                q_number(2 * n + 1.0, ctx) * q_number(2 * n + 2.0, ctx)
            )
            n += 1
    elif isinstance(spec, CoshSecond):
        c = 1.0
        n = 0
        while c != 0.0:
            yield (c, float(2 * n))
            c *= spec.a * spec.a / (
                q_number(2 * n + 1.0, ctx) * q_number(2 * n + 2.0, ctx)
            )
            n += 1
    elif isinstance(spec, SinhSecond):
        c = spec.a
        n = 0
        while c != 0.0:
            yield (c, float(2 * n + 1))
            c *= spec.a * spec.a / (
                q_number(2 * n + 2.0, ctx) * q_number(2 * n + 3.0, ctx)
            )
            n += 1
        yield (0.0, 1.0)
    elif isinstance(spec, PowerSeries):
        for i, c in enumerate(spec.coefficients):
            yield (c, spec.exponent_step * i)
    elif isinstance(spec, Scale):
        for c, e in power_terms(spec.inner, ctx):
            yield (spec.c * c, e)
    elif isinstance(spec, ArgScale):
        for c, e in power_terms(spec.inner, ctx):
            yield (c * spec.k ** e, e)
    else:
        raise UnknownForm(f"{type(spec).__name__} has no power-series expansion")


def q_derivative_spec(spec: FunctionSpec, ctx: QContext) -> FunctionSpec:
    """Symbolic q-derivative of a spec, where the rules are exact:

        D_q t^a      = [a] t^(a-1)
        D_q e_q(at)  = a e_q(at)
        D_q E_q(at)  = a E_q(q a t)
    """
    if isinstance(spec, Constant):
        return Constant(0.0)
    if isinstance(spec, Monomial):
        if spec.alpha == 0:
            return Constant(0.0)
        return Scale(q_number(spec.alpha, ctx), Monomial(spec.alpha - 1.0))
    if isinstance(spec, ExpSecond):
        return Scale(spec.a, ExpSecond(spec.a))
    if isinstance(spec, ExpFirst):
        return Scale(spec.a, ArgScale(ctx.q, ExpFirst(spec.a)))
    if isinstance(spec, PowerSeries):
        parts = []
        for i, c in enumerate(spec.coefficients):
            e = spec.exponent_step * i
            if c == 0.0 or e == 0.0:
                continue
            parts.append(Scale(c * q_number(e, ctx), Monomial(e - 1.0)))
        if not parts:
            return Constant(0.0)
        return Sum(tuple(parts))
    if isinstance(spec, Sum):
        return Sum(tuple(q_derivative_spec(p, ctx) for p in spec.parts))
    if isinstance(spec, Scale):
        return Scale(spec.c, q_derivative_spec(spec.inner, ctx))
    if isinstance(spec, ArgScale):
        return Scale(spec.k, ArgScale(spec.k, q_derivative_spec(spec.inner, ctx)))
    raise DomainError(
        f"{type(spec).__name__} does not support the symbolic q-derivative"
    )


def _format_number(x: float) -> str:
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def to_text(spec: FunctionSpec) -> str:
    """Canonical grammar string for a spec (inverse of the CLI parser)."""
    if isinstance(spec, Constant):
        return _format_number(spec.c)
    if isinstance(spec, Monomial):
        return f"t^{_format_number(spec.alpha)}"
    if isinstance(spec, ExpClassical):
        return f"exp({_format_number(spec.a)}*t)"
    if isinstance(spec, ExpFirst):
        return f"Eq({_format_number(spec.a)}*t)"
    if isinstance(spec, ExpSecond):
        return f"eq({_format_number(spec.a)}*t)"
    if isinstance(spec, SinSecond):
        return f"sinq2({_format_number(spec.a)}*t)"
    if isinstance(spec, CosSecond):
        return f"cosq2({_format_number(spec.a)}*t)"
    if isinstance(spec, SinFirst):
        return f"sinq1({_format_number(spec.a)}*t)"
    if isinstance(spec, CosFirst):
        return f"cosq1({_format_number(spec.a)}*t)"
    if isinstance(spec, CoshSecond):
        if spec.a == 1.0:
            return "coshq(t)"
        return f"coshq({_format_number(spec.a)}*t)"
    if isinstance(spec, SinhSecond):
        if spec.a == 1.0:
            return "sinhq(t)"
        return f"sinhq({_format_number(spec.a)}*t)"
    if isinstance(spec, Heaviside):
        return f"H(t-{_format_number(spec.a)})"
    if isinstance(spec, PowerSeries):
        parts = []
        for i, c in enumerate(spec.coefficients):
            if c == 0.0:
                continue
            e = spec.exponent_step * i
            if e == 0.0:
                parts.append((c, _format_number(abs(c))))
            else:
                parts.append((c, f"{_format_number(abs(c))}*t^{_format_number(e)}"))
        if not parts:
            return "0"
        out = parts[0][1] if parts[0][0] >= 0 else "-" + parts[0][1]
        for sign_c, text in parts[1:]:
            out += (" + " if sign_c >= 0 else " - ") + text
        return out
    if isinstance(spec, Sum):
        chunks = []
        for p in spec.parts:
            if isinstance(p, Scale) and p.c < 0:
                chunks.append(("-", to_text(Scale(-p.c, p.inner))))
            else:
                chunks.append(("+", to_text(p)))
        out = chunks[0][1] if chunks[0][0] == "+" else "-" + chunks[0][1]
        for sign, text in chunks[1:]:
            out += f" {sign} {text}"
        return out
    if isinstance(spec, Scale):
        if spec.c == 1.0:
            return to_text(spec.inner)
        return f"{_format_number(spec.c)}*{to_text(spec.inner)}"
    if isinstance(spec, ArgScale):
        return to_text(_push_arg_scale(spec))
    raise UnknownForm(f"cannot print {spec!r}")


def _push_arg_scale(spec: ArgScale) -> FunctionSpec:
    """Fold an argument scaling into the shapes that absorb it exactly."""
    inner, k = spec.inner, spec.k
    if isinstance(inner, Constant):
        return inner
    if isinstance(inner, Monomial):
        return Scale(k ** inner.alpha, inner)
    if isinstance(inner, ExpClassical):
        return ExpClassical(inner.a * k)
    if isinstance(inner, ExpFirst):
        return ExpFirst(inner.a * k)
    if isinstance(inner, ExpSecond):
        return ExpSecond(inner.a * k)
    if isinstance(inner, SinSecond):
        return SinSecond(inner.a * k)
    if isinstance(inner, CosSecond):
        return CosSecond(inner.a * k)
    if isinstance(inner, SinFirst):
        return SinFirst(inner.a * k)
    if isinstance(inner, CosFirst):
        return CosFirst(inner.a * k)
    if isinstance(inner, CoshSecond):
        return CoshSecond(inner.a * k)
    if isinstance(inner, SinhSecond):
        return SinhSecond(inner.a * k)
    if isinstance(inner, Heaviside):
        if k <= 0:
            raise DomainError("argument scaling of a step needs k > 0")
        return Heaviside(inner.a / k)
    if isinstance(inner, Sum):
        return Sum(tuple(_push_arg_scale(ArgScale(k, p)) for p in inner.parts))
    if isinstance(inner, Scale):
        return Scale(inner.c, _push_arg_scale(ArgScale(k, inner.inner)))
    if isinstance(inner, ArgScale):
        return _push_arg_scale(ArgScale(k * inner.k, inner.inner))
    if isinstance(inner, PowerSeries):
        coeffs = tuple(
            c * k ** (inner.exponent_step * i)
            for i, c in enumerate(inner.coefficients)
        )
        return PowerSeries(coeffs, inner.exponent_step)
    raise UnknownForm(f"cannot normalise argument scaling of {inner!r}")


def _collect_terms(spec: FunctionSpec, factor: float, out: dict) -> None:
    if isinstance(spec, Constant):
        key = ("Monomial", 0.0)
        out[key] = out.get(key, 0.0) + factor * spec.c
    elif isinstance(spec, Monomial):
        key = ("Monomial", float(spec.alpha))
        out[key] = out.get(key, 0.0) + factor
    elif isinstance(spec, PowerSeries):
        for i, c in enumerate(spec.coefficients):
            if c != 0.0:
                key = ("Monomial", float(spec.exponent_step * i))
                out[key] = out.get(key, 0.0) + factor * c
    elif isinstance(spec, Sum):
        for p in spec.parts:
            _collect_terms(p, factor, out)
    elif isinstance(spec, Scale):
        _collect_terms(spec.inner, factor * spec.c, out)
    elif isinstance(spec, ArgScale):
        _collect_terms(_push_arg_scale(spec), factor, out)
    else:
        key = (type(spec).__name__,) + tuple(
            float(getattr(spec, name)) for name in spec.__dataclass_fields__
        )
        out[key] = out.get(key, 0.0) + factor


def canonical_terms(spec: FunctionSpec) -> dict:
    """Flatten a spec into {atom-key: coefficient} for equivalence checks."""
    out: dict = {}
    _collect_terms(spec, 1.0, out)
    return {k: v for k, v in out.items() if v != 0.0}


def specs_equivalent(a: FunctionSpec, b: FunctionSpec, tol: float = 1e-12) -> bool:
    """Structural equivalence up to flattening of sums, scales and series."""
    ta, tb = canonical_terms(a), canonical_terms(b)
    keys = set(ta) | set(tb)
    for key in keys:
        ca, cb = ta.get(key, 0.0), tb.get(key, 0.0)
        if abs(ca - cb) > tol * max(abs(ca), abs(cb), 1.0):
            return False
    return True

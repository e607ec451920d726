"""Identity-audit engine.

Every closed-form rule shipped by the transform registry is encoded here as
a checkable identity: a left side and a right side evaluated through the two
most independent routes available (termwise gamma reduction, direct lattice
summation, factorial recursions, classical quadrature), yielding a verdict
per grid point.

Identities whose stated closed form conflicts with an independent
recomputation are registered twice, as a STATED/DERIVED pair; the audit
asserts that exactly one member of each pair passes and records the winner.
Failures of pair members are first-class output, not errors, and never
affect sweep exit status.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .errors import (
    DivergentTransform,
    DomainError,
    NonConvergence,
    UnknownIdentity,
)
from .funcspec import (
    ArgScale,
    Constant,
    CosSecond,
    CoshSecond,
    ExpClassical,
    ExpFirst,
    ExpSecond,
    FunctionSpec,
    Heaviside,
    Monomial,
    PowerSeries,
    SinSecond,
    SinhSecond,
    evaluate,
    power_terms,
    q_derivative_spec,
)
from .qcalc import q_derivative
from .qcore import (
    EvalMode,
    QContext,
    SeriesStatus,
    q_factorial,
    q_number,
    sum_series,
)
from .qspecial import beta_q, exp_first, exp_second_neg, gamma_first, gamma_second
from .transforms import (
    DirectLattice,
    TermwiseGamma,
    TransformKind,
    TransformPoint,
    derivative_rule_sides,
    laplace_classical,
    natural_classical,
    nq_first,
    nq_first_closed,
    nq_second,
    nq_second_closed,
    second_kind_shift_probe,
    sumudu_classical,
    _shifted_point,
    _termwise,
)


class Verdict:
    PASS = "Pass"
    FAIL = "Fail"
    DIVERGED = "Diverged"
    DOMAIN_SKIPPED = "DomainSkipped"


# Below this magnitude the two sides are compared absolutely; identities
# whose exact value is 0 would otherwise report spurious relative error.
_ABS_FLOOR = 1e-6


def relative_error(lhs: float, rhs: float) -> float:
    if not (math.isfinite(lhs) and math.isfinite(rhs)):
        return math.inf
    denom = max(abs(lhs), abs(rhs))
    if denom <= _ABS_FLOOR:
        return abs(lhs - rhs)
    return abs(lhs - rhs) / denom


@dataclass(frozen=True)
class IdentityReport:
    """One audited identity instance: both sides, error, verdict."""

    identity_id: str
    params: Tuple[Tuple[str, float], ...]
    lhs: float
    rhs: float
    rel_err: float
    mode: EvalMode
    verdict: str
    tolerance: float
    erratum_candidate: bool
    detail: str = ""

    def param(self, name: str, default: float = float("nan")) -> float:
        for key, value in self.params:
            if key == name:
                return value
        return default

    def to_dict(self) -> dict:
        return {
            "identityId": self.identity_id,
            "params": {k: v for k, v in self.params},
            "lhs": self.lhs,
            "rhs": self.rhs,
            "relErr": self.rel_err,
            "mode": self.mode.value,
            "verdict": self.verdict,
            "tolerance": self.tolerance,
            "erratumCandidate": self.erratum_candidate,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class _Outcome:
    lhs: float
    rhs: float
    rel_err: Optional[float] = None
    mode: EvalMode = EvalMode.NUMERIC
    detail: str = ""


Evaluator = Callable[[dict, QContext], _Outcome]
GridFn = Callable[[float], Sequence[dict]]


@dataclass(frozen=True)
class Identity:
    identity_id: str
    description: str
    tolerance: float
    evaluator: Evaluator
    grid: GridFn
    erratum_candidate: bool = False
    pair_with: Optional[str] = None


_REGISTRY: "Dict[str, Identity]" = {}


def _register(identity: Identity) -> None:
    if identity.identity_id in _REGISTRY:
        raise ValueError(f"duplicate identity id {identity.identity_id}")
    _REGISTRY[identity.identity_id] = identity


def registry_ids() -> Tuple[str, ...]:
    return tuple(_REGISTRY)


def identity_info(identity_id: str) -> Identity:
    try:
        return _REGISTRY[identity_id]
    except KeyError:
        raise UnknownIdentity(f"no identity registered under {identity_id!r}") from None


def erratum_pairs() -> Tuple[Tuple[str, str], ...]:
    """(stated_id, derived_id) pairs registered for arbitration."""
    pairs = []
    for ident in _REGISTRY.values():
        if ident.pair_with and ident.identity_id.endswith("_STATED"):
            pairs.append((ident.identity_id, ident.pair_with))
    return tuple(pairs)


def scaled_context(q: float, base: Optional[QContext] = None) -> QContext:
    """Context whose window and budget scale with 1/(1-q), for q near 1."""
    if base is None:
        base = QContext(q=q, rel_tol=1e-11, max_terms=800)
    growth = 1.0 / (1.0 - q)
    return replace(
        base,
        q=q,
        max_terms=max(base.max_terms, int(48 * growth) + 400),
        lattice_k_max=max(base.lattice_k_max, int(32 * growth) + 200),
        lattice_k_min=min(base.lattice_k_min, -int(8 * growth) - 60),
    )


# ---------------------------------------------------------------------------
# audit execution
# ---------------------------------------------------------------------------


def audit_identity(identity_id: str, params: dict, ctx: QContext) -> IdentityReport:
    """Evaluate one identity instance and report the verdict."""
    ident = identity_info(identity_id)
    key = tuple(sorted({**params, "q": ctx.q}.items()))
    try:
        outcome = ident.evaluator(params, ctx)
    except DomainError as exc:
        return IdentityReport(
            identity_id, key, 0.0, 0.0, 0.0, EvalMode.NUMERIC,
            Verdict.DOMAIN_SKIPPED, ident.tolerance, ident.erratum_candidate,
            detail=str(exc),
        )
    except (NonConvergence, DivergentTransform) as exc:
        return IdentityReport(
            identity_id, key, math.nan, math.nan, math.inf, EvalMode.NUMERIC,
            Verdict.DIVERGED, ident.tolerance, ident.erratum_candidate,
            detail=str(exc),
        )
    rel = outcome.rel_err if outcome.rel_err is not None else relative_error(
        outcome.lhs, outcome.rhs
    )
    if not math.isfinite(rel):
        verdict = Verdict.DIVERGED
    else:
        verdict = Verdict.PASS if rel <= ident.tolerance else Verdict.FAIL
    return IdentityReport(
        identity_id, key, outcome.lhs, outcome.rhs, rel, outcome.mode,
        verdict, ident.tolerance, ident.erratum_candidate, outcome.detail,
    )


@dataclass(frozen=True)
class SweepConfig:
    qs: Tuple[float, ...] = (0.3, 0.5, 0.8)
    identity_ids: Optional[Tuple[str, ...]] = None
    rel_tol: float = 1e-12
    max_terms: int = 900


@dataclass(frozen=True)
class SweepResult:
    reports: Tuple[IdentityReport, ...]
    summary: Dict[str, Dict[str, int]]
    exit_ok: bool


def audit_sweep(config: SweepConfig = SweepConfig()) -> SweepResult:
    """Cartesian sweep over q values and each identity's parameter grid.

    The ordering is deterministic: registry order, then q ascending, then
    grid order.  Individual failures are data; exit_ok only tracks FAIL
    verdicts of identities that are not erratum candidates.
    """
    ids = config.identity_ids if config.identity_ids is not None else registry_ids()
    reports: List[IdentityReport] = []
    for identity_id in ids:
        ident = identity_info(identity_id)
        for q in sorted(config.qs):
            ctx = QContext(q=q, rel_tol=config.rel_tol, max_terms=config.max_terms)
            for params in ident.grid(q):
                reports.append(audit_identity(identity_id, params, ctx))
    summary: Dict[str, Dict[str, int]] = {}
    for report in reports:
        bucket = summary.setdefault(report.identity_id, {})
        bucket[report.verdict] = bucket.get(report.verdict, 0) + 1
    exit_ok = not any(
        r.verdict == Verdict.FAIL and not r.erratum_candidate for r in reports
    )
    return SweepResult(tuple(reports), summary, exit_ok)


@dataclass(frozen=True)
class PairOutcome:
    stated_id: str
    derived_id: str
    xor_everywhere: bool
    winner: Optional[str]


def pair_outcomes(result: SweepResult) -> Tuple[PairOutcome, ...]:
    """Arbitration of stated/derived pairs: per grid point exactly one side
    should pass; the consistent winner (if any) is recorded."""
    by_key: Dict[Tuple[str, Tuple], IdentityReport] = {
        (r.identity_id, r.params): r for r in result.reports
    }
    outcomes = []
    for stated_id, derived_id in erratum_pairs():
        stated = [r for r in result.reports if r.identity_id == stated_id]
        xor_all = True
        winners = set()
        for report in stated:
            partner = by_key.get((derived_id, report.params))
            if partner is None or report.verdict == Verdict.DOMAIN_SKIPPED:
                continue
            stated_pass = report.verdict == Verdict.PASS
            derived_pass = partner.verdict == Verdict.PASS
            if stated_pass == derived_pass:
                xor_all = False
            elif stated_pass:
                winners.add(stated_id)
            else:
                winners.add(derived_id)
        winner = winners.pop() if len(winners) == 1 else None
        outcomes.append(PairOutcome(stated_id, derived_id, xor_all, winner))
    return tuple(outcomes)


@dataclass(frozen=True)
class LimitRow:
    q: float
    q_value: float
    classical_value: float
    gap: float


@dataclass(frozen=True)
class LimitStudy:
    rows: Tuple[LimitRow, ...]
    gap_monotone: bool


def q_limit_study(
    f: FunctionSpec,
    pt: TransformPoint,
    q_list: Sequence[float],
    ctx: QContext,
) -> LimitStudy:
    """First-kind transform against its classical target across increasing q.

    The monotone flag reports a strictly decreasing gap; an identically
    vanishing gap (constants and t, whose transforms carry no q dependence)
    also counts as monotone.
    """
    if list(q_list) != sorted(q_list) or len(set(q_list)) != len(q_list):
        raise DomainError("q_list must be strictly increasing")
    if any(not (0.0 < q < 1.0) for q in q_list):
        raise DomainError("q_list entries must lie in (0, 1)")
    classical = natural_classical(f, pt, ctx)
    rows = []
    for q in q_list:
        qctx = scaled_context(q, replace(ctx, q=q))
        q_value = nq_first(f, pt, qctx, TermwiseGamma()).require_converged()
        rows.append(LimitRow(q, q_value, classical, abs(q_value - classical)))
    # evaluation-tolerance floor: transforms with no q dependence report
    # pure truncation noise as their gap
    atol = 1e-8 * max(abs(classical), 1.0)
    monotone = all(
        (b.gap < a.gap) or (a.gap <= atol and b.gap <= atol)
        for a, b in zip(rows, rows[1:])
    )
    return LimitStudy(tuple(rows), monotone)


# ---------------------------------------------------------------------------
# identity evaluators
# ---------------------------------------------------------------------------


def _pt(params: dict) -> TransformPoint:
    return TransformPoint(params["u"], params["v"])


def _uv_grid(*points: Tuple[float, float]):
    return [{"u": u, "v": v} for u, v in points]


def _ratio_grid(points, ratios):
    grid = []
    for u, v in points:
        for r in ratios:
            grid.append({"u": u, "v": v, "a": r * v / u})
    return grid


# -- classical layer --------------------------------------------------------


def _eval_classical_const(params, ctx):
    pt = _pt(params)
    return _Outcome(natural_classical(Constant(1.0), pt, ctx), 1.0 / pt.v)


def _eval_classical_monomial(params, ctx):
    pt = _pt(params)
    n = int(params["n"])
    lhs = natural_classical(Monomial(float(n)), pt, ctx)
    return _Outcome(lhs, math.factorial(n) * pt.u ** n / pt.v ** (n + 1))


def _eval_classical_exp(params, ctx):
    pt = _pt(params)
    a = params["a"]
    if a * pt.u >= pt.v:
        raise DomainError("classical exponential transform needs a u < v")
    return _Outcome(
        natural_classical(ExpClassical(a), pt, ctx), 1.0 / (pt.v - a * pt.u)
    )


def _eval_classical_laplace_reduction(params, ctx):
    v, n = params["v"], int(params["n"])
    lhs = natural_classical(Monomial(float(n)), TransformPoint(1.0, v), ctx)
    return _Outcome(lhs, laplace_classical(Monomial(float(n)), v, ctx))


def _eval_classical_sumudu_reduction(params, ctx):
    u, n = params["u"], int(params["n"])
    lhs = natural_classical(Monomial(float(n)), TransformPoint(u, 1.0), ctx)
    return _Outcome(lhs, sumudu_classical(Monomial(float(n)), u, ctx))


def _eval_classical_duality(reading: str):
    def evaluator(params, ctx):
        pt = _pt(params)
        lhs = natural_classical(Monomial(1.0), pt, ctx)
        arg = pt.v / pt.u if reading == "v_over_u" else pt.u / pt.v
        rhs = laplace_classical(Monomial(1.0), arg, ctx) / pt.u
        return _Outcome(lhs, rhs)

    return evaluator


def _eval_classical_scale_v(params, ctx):
    pt = _pt(params)
    k = params["k"]
    lhs = natural_classical(ArgScale(k, ExpClassical(1.0)), pt, ctx)
    rhs = natural_classical(
        ExpClassical(1.0), TransformPoint(pt.u, pt.v / k), ctx
    ) / k
    return _Outcome(lhs, rhs)


def _eval_classical_scale_u(with_prefactor: bool):
    def evaluator(params, ctx):
        pt = _pt(params)
        k = params["k"]
        lhs = natural_classical(ArgScale(k, ExpClassical(1.0)), pt, ctx)
        rhs = natural_classical(ExpClassical(1.0), TransformPoint(k * pt.u, pt.v), ctx)
        if with_prefactor:
            rhs /= k
        return _Outcome(lhs, rhs)

    return evaluator


# -- first kind -------------------------------------------------------------


def _eval_first_monomial_gamma(params, ctx):
    pt = _pt(params)
    n = int(params["n"])
    lhs = nq_first(Monomial(float(n)), pt, ctx, TermwiseGamma()).require_converged()
    rhs = pt.u ** n * q_factorial(n, ctx) / pt.v ** (n + 1)
    return _Outcome(lhs, rhs)


def _eval_first_monomial_lattice(params, ctx):
    pt = _pt(params)
    alpha = params["alpha"]
    lhs = nq_first(Monomial(alpha), pt, ctx, DirectLattice("aligned")).require_converged()
    rhs = nq_first(Monomial(alpha), pt, ctx, TermwiseGamma()).require_converged()
    return _Outcome(lhs, rhs)


def _eval_first_gamma_factorial(params, ctx):
    n = int(params["n"])
    return _Outcome(gamma_first(n + 1.0, ctx).value, q_factorial(n, ctx))


def _require_geometric(a: float, pt: TransformPoint) -> None:
    if a * pt.u >= pt.v * (1.0 - 1e-6):
        raise DomainError(f"geometric domain needs a u < v (a u = {a * pt.u}, v = {pt.v})")


def _eval_first_exp2(params, ctx):
    pt = _pt(params)
    a = params["a"]
    _require_geometric(a, pt)
    lhs = nq_first(ExpSecond(a), pt, ctx, TermwiseGamma()).require_converged()
    return _Outcome(lhs, nq_first_closed(ExpSecond(a), pt, ctx))


def _eval_first_exp1(params, ctx):
    pt = _pt(params)
    a = params["a"]
    termwise = nq_first(ExpFirst(a), pt, ctx, TermwiseGamma())
    # Matched truncation: rebuild the stated series with the same term count.
    x = a * pt.u / pt.v
    total = 0.0
    term = 1.0 / pt.v
    for n in range(termwise.terms_used):
        total += term
        term *= ctx.q ** n * x
    return _Outcome(termwise.require_converged(), total)


def _closed_rational(shape: str, pt: TransformPoint, a: float, sign: float) -> float:
    denom = pt.v * pt.v + sign * a * a * pt.u * pt.u
    if denom <= 0:
        raise DomainError("rational closed form evaluated at or past its pole")
    if shape == "cos":
        return pt.v / denom
    return a * pt.u / denom


def _eval_first_trig_pair(spec_kind: str, sign: float):
    def evaluator(params, ctx):
        pt = _pt(params)
        a = params["a"]
        _require_geometric(a, pt)
        spec = {
            "cos": CosSecond(a),
            "sin": SinSecond(a),
            "cosh": CoshSecond(a),
            "sinh": SinhSecond(a),
        }[spec_kind]
        lhs = nq_first(spec, pt, ctx, TermwiseGamma()).require_converged()
        shape = "cos" if spec_kind in ("cos", "cosh") else "sin"
        return _Outcome(lhs, _closed_rational(shape, pt, a, sign))

    return evaluator


def _eval_first_kernel_dq(with_factorial: bool):
    def evaluator(params, ctx):
        pt = _pt(params)
        t = params["t"]
        ratio = ctx.q * pt.v / pt.u

        def kernel(x: float) -> float:
            return exp_first(-ratio * x, ctx).value

        lhs = q_derivative(kernel, t, ctx)

        def series():
            n = 0
            coeff = -(pt.v / pt.u)
            while True:
                base = ctx.q ** ((n + 1) * (n + 2) / 2.0) * (pt.v / pt.u) ** n * t ** n
                if with_factorial:
                    base /= q_factorial(n, ctx)
                yield coeff * base
                coeff = -coeff
                n += 1

        rhs = sum_series(series(), ctx).require_converged()
        return _Outcome(lhs, rhs)

    return evaluator


def _eval_first_deriv_rule(params, ctx):
    pt = _pt(params)
    lhs, rhs = derivative_rule_sides(
        TransformKind.FIRST, Monomial(params["m"]), int(params["n"]), pt, ctx
    )
    return _Outcome(lhs, rhs)


def _eval_first_deriv_boundary(corrected: bool):
    def evaluator(params, ctx):
        pt = _pt(params)
        m, n = Monomial(params["m"]), int(params["n"])
        chain = [m]
        for _ in range(n):
            chain.append(q_derivative_spec(chain[-1], ctx))
        boundary = [evaluate(chain[i], 0.0, ctx) for i in range(n)]
        ratio = pt.v / pt.u
        lhs = _termwise(TransformKind.FIRST, chain[n], pt, ctx).value
        rhs = ratio ** n * _termwise(TransformKind.FIRST, m, pt, ctx).value
        for i in range(n):
            term = ratio ** (n - 1 - i) * boundary[i]
            rhs -= term / pt.u if corrected else term
        return _Outcome(lhs, rhs)

    return evaluator


def _conv_transform_lhs(f: FunctionSpec, beta: float, pt: TransformPoint, ctx) -> float:
    # (f * t^{beta-1})_q(t) = sum_i a_i B_q(e_i + 1, beta) t^{e_i + beta}
    parts = []
    for c, e in power_terms(f, ctx):
        parts.append(c * beta_q(e + 1.0, beta, ctx).value
                     * nq_first(Monomial(e + beta), pt, ctx, TermwiseGamma()).value)
    return sum(parts)


def _eval_first_conv(power: int):
    def evaluator(params, ctx):
        pt = _pt(params)
        alpha, beta = params["alpha"], params["beta"]
        lhs = _conv_transform_lhs(Monomial(alpha), beta, pt, ctx)
        rhs = (
            pt.u ** power
            * nq_first(Monomial(alpha), pt, ctx, TermwiseGamma()).value
            * nq_first(Monomial(beta - 1.0), pt, ctx, TermwiseGamma()).value
        )
        return _Outcome(lhs, rhs)

    return evaluator


def _eval_first_conv_series(params, ctx):
    pt = _pt(params)
    beta = params["beta"]
    f = PowerSeries((1.0, 0.5, -0.25, 2.0), 1.0)
    lhs = _conv_transform_lhs(f, beta, pt, ctx)
    rhs = (
        pt.u ** 2
        * nq_first(f, pt, ctx, TermwiseGamma()).value
        * nq_first(Monomial(beta - 1.0), pt, ctx, TermwiseGamma()).value
    )
    return _Outcome(lhs, rhs)


def _eval_first_heaviside(params, ctx):
    pt = _pt(params)
    a = params["a"]
    lhs = nq_first(Heaviside(a), pt, ctx, DirectLattice("aligned")).require_converged()
    rhs = nq_first_closed(Heaviside(a), pt, ctx)
    return _Outcome(lhs, rhs)


# -- second kind ------------------------------------------------------------


def _eval_gamma2_at_one(params, ctx):
    return _Outcome(gamma_second(1.0, ctx).value, 1.0)


def _eval_gamma2_funceq(params, ctx):
    t = params["t"]
    lhs = gamma_second(t + 1.0, ctx).value
    rhs = ctx.q ** (-t) * q_number(t, ctx) * gamma_second(t, ctx).value
    return _Outcome(lhs, rhs)


def _eval_gamma2_link(sign: float):
    def evaluator(params, ctx):
        n = int(params["n"])
        lhs = gamma_second(float(n), ctx).value
        rhs = ctx.q ** (sign * n * (n - 1) / 2.0) * gamma_first(float(n), ctx).value
        return _Outcome(lhs, rhs)

    return evaluator


def _eval_second_monomial_lattice(params, ctx):
    pt = _pt(params)
    alpha = params["alpha"]
    lattice = nq_second(Monomial(alpha), pt, ctx, DirectLattice("bilateral"))
    if lattice.status is not SeriesStatus.CONVERGED:
        raise NonConvergence("bilateral lattice sum diverged")
    variants = nq_second_closed(Monomial(alpha), pt, ctx)
    rhs = variants.get("gamma", variants.get("recursion"))
    return _Outcome(lattice.value, rhs)


def _eval_second_monomial_variant(label: str):
    def evaluator(params, ctx):
        pt = _pt(params)
        n = float(int(params["n"]))
        lattice = nq_second(Monomial(n), pt, ctx, DirectLattice("bilateral"))
        if lattice.status is not SeriesStatus.CONVERGED:
            raise NonConvergence("bilateral lattice sum diverged")
        rhs = nq_second_closed(Monomial(n), pt, ctx)[label]
        return _Outcome(lattice.value, rhs)

    return evaluator


def _eval_second_exp1(label: str):
    def evaluator(params, ctx):
        pt = _pt(params)
        a = params["a"]
        termwise = nq_second(ExpFirst(a), pt, ctx, TermwiseGamma())
        if termwise.status is not SeriesStatus.CONVERGED:
            raise NonConvergence("termwise series for E_q input diverged")
        variants = nq_second_closed(ExpFirst(a), pt, ctx)
        if label not in variants:
            raise DomainError(f"{label} closed form out of domain")
        return _Outcome(termwise.value, variants[label])

    return evaluator


def _second_formal_pair(shape: str, stated: bool):
    """Formal (coefficient-by-coefficient) audit of the second-kind series
    rules for e_q(at), cos^q(at), sin^q(at) up to a fixed order.

    The reference coefficient of each power comes from the termwise gamma
    reduction (numeric, through the bilateral lattice gamma); the candidate
    coefficient is either the stated series or the recursion-derived one.
    """

    def evaluator(params, ctx):
        pt = _pt(params)
        a = params["a"]
        order = int(params.get("order", 8))
        u, v, q = pt.u, pt.v, ctx.q
        spec = {"exp2": ExpSecond(a), "cos2": CosSecond(a), "sin2": SinSecond(a)}[shape]
        rows = []
        worst = 0.0
        worst_pair = (0.0, 0.0)
        for idx, (c, e) in enumerate(power_terms(spec, ctx)):
            if idx >= order:
                break
            n = int(e) if shape == "exp2" else idx
            reference = c * u ** e * gamma_second(e + 1.0, ctx).value / v ** (e + 1.0)
            if stated:
                if shape == "exp2":
                    cand = (a * u / v) ** n * q ** (-n * (n - 1) / 2.0) / (u * v)
                elif shape == "cos2":
                    cand = (-1.0) ** n * (a * u / v) ** (2 * n) * q ** (-n * (2 * n - 1)) / u
                else:
                    cand = (
                        (-1.0) ** n
                        * a ** (2 * n + 1)
                        * (u / v) ** (2 * n + 1)
                        * q ** (-n * (2 * n - 1))
                        / (u * v)
                    )
            else:
                m = int(e)
                cand = c * u ** m * q ** (-m * (m + 1) / 2.0) * q_factorial(m, ctx) / v ** (m + 1)
            err = relative_error(reference, cand)
            rows.append(f"order {int(e)}: reference={reference:.6g} candidate={cand:.6g} relerr={err:.3g}")
            if err > worst:
                worst = err
                worst_pair = (reference, cand)
        return _Outcome(
            worst_pair[0],
            worst_pair[1],
            rel_err=worst,
            mode=EvalMode.FORMAL,
            detail="; ".join(rows),
        )

    return evaluator


def _eval_second_kernel_dq(params, ctx):
    pt = _pt(params)
    t = params["t"]
    ratio = pt.v / pt.u

    def kernel(x: float) -> float:
        return exp_second_neg(ratio * x, ctx)

    lhs = q_derivative(kernel, t, ctx)
    rhs = -ratio * exp_second_neg(ratio * t, ctx)
    return _Outcome(lhs, rhs)


def _eval_second_deriv_order(candidate: str):
    def evaluator(params, ctx):
        pt = _pt(params)
        m = Monomial(params["m"])
        df = q_derivative_spec(m, ctx)
        lhs = _termwise(TransformKind.SECOND, df, pt, ctx).value
        shifted = _shifted_point(candidate, pt, 1, ctx.q)
        rhs = (pt.v / pt.u) / ctx.q * _termwise(TransformKind.SECOND, m, shifted, ctx).value
        return _Outcome(lhs, rhs)

    return evaluator


def _eval_second_deriv_chain(params, ctx):
    pt = _pt(params)
    n = int(params["n"])
    lhs, rhs = derivative_rule_sides(
        TransformKind.SECOND, Monomial(params["m"]), n, pt, ctx
    )
    return _Outcome(lhs, rhs)


def _eval_second_deriv_chain_stated(params, ctx):
    pt = _pt(params)
    n = int(params["n"])
    m = Monomial(params["m"])
    chain = [m]
    for _ in range(n):
        chain.append(q_derivative_spec(chain[-1], ctx))
    lhs = _termwise(TransformKind.SECOND, chain[n], pt, ctx).value
    probe = second_kind_shift_probe(ctx)
    if probe.adopted is None:
        raise NonConvergence("no adopted argument order")
    shifted = _shifted_point(probe.adopted, pt, n, ctx.q)
    rhs = (pt.v / pt.u) ** n * ctx.q ** (-n) * _termwise(
        TransformKind.SECOND, m, shifted, ctx
    ).value
    return _Outcome(lhs, rhs)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

_CLASSICAL_POINTS = ((1.0, 1.0), (2.0, 3.0), (0.5, 2.0))
_RATIOS = (0.2, 0.5, 0.8)


def _build_registry() -> None:
    reg = _register

    reg(Identity(
        "CLASSICAL_CONST", "Natural transform of a constant equals 1/v",
        1e-10, _eval_classical_const,
        lambda q: _uv_grid(*_CLASSICAL_POINTS),
    ))
    reg(Identity(
        "CLASSICAL_MONOMIAL", "Natural transform of t^n equals n! u^n / v^(n+1)",
        1e-10, _eval_classical_monomial,
        lambda q: [{"u": u, "v": v, "n": n}
                   for u, v in ((1.0, 1.0), (2.0, 3.0)) for n in (1, 2, 3)],
    ))
    reg(Identity(
        "CLASSICAL_EXP", "Natural transform of exp(at) equals 1/(v - a u)",
        1e-10, _eval_classical_exp,
        lambda q: _ratio_grid(((0.3, 2.0), (1.0, 1.0)), _RATIOS),
    ))
    reg(Identity(
        "CLASSICAL_LAPLACE_REDUCTION", "Natural at u = 1 equals the Laplace transform",
        1e-10, _eval_classical_laplace_reduction,
        lambda q: [{"v": v, "n": n} for v in (1.0, 2.0) for n in (1, 2)],
    ))
    reg(Identity(
        "CLASSICAL_SUMUDU_REDUCTION", "Natural at v = 1 equals the Sumudu transform",
        1e-10, _eval_classical_sumudu_reduction,
        lambda q: [{"u": u, "n": n} for u in (0.5, 2.0) for n in (1, 2)],
    ))
    reg(Identity(
        "CLASSICAL_DUALITY_STATED",
        "Laplace duality with argument u/v, as stated",
        1e-10, _eval_classical_duality("u_over_v"),
        lambda q: _uv_grid((2.0, 3.0), (0.5, 2.0)),
        erratum_candidate=True, pair_with="CLASSICAL_DUALITY_DERIVED",
    ))
    reg(Identity(
        "CLASSICAL_DUALITY_DERIVED",
        "Laplace duality with argument v/u, matching the kernel",
        1e-10, _eval_classical_duality("v_over_u"),
        lambda q: _uv_grid((2.0, 3.0), (0.5, 2.0)),
        erratum_candidate=True,
    ))
    reg(Identity(
        "CLASSICAL_SCALE_V", "Scaling rule through v: N(f(kt)) = (1/k) N(f)(u, v/k)",
        1e-10, _eval_classical_scale_v,
        lambda q: [{"u": 0.3, "v": 2.0, "k": k} for k in (2.0, 3.0)],
    ))
    reg(Identity(
        "CLASSICAL_SCALE_U_STATED",
        "Scaling rule through u with a 1/k prefactor, as stated",
        1e-10, _eval_classical_scale_u(True),
        lambda q: [{"u": 0.3, "v": 2.0, "k": k} for k in (2.0, 3.0)],
        erratum_candidate=True, pair_with="CLASSICAL_SCALE_U_DERIVED",
    ))
    reg(Identity(
        "CLASSICAL_SCALE_U_DERIVED",
        "Scaling rule through u without prefactor: N(f(kt)) = N(f)(ku, v)",
        1e-10, _eval_classical_scale_u(False),
        lambda q: [{"u": 0.3, "v": 2.0, "k": k} for k in (2.0, 3.0)],
        erratum_candidate=True,
    ))

    reg(Identity(
        "FIRST_MONOMIAL_GAMMA",
        "First-kind monomial rule: termwise gamma vs factorial closed form",
        1e-8, _eval_first_monomial_gamma,
        lambda q: [{"u": u, "v": v, "n": n}
                   for u, v in ((1.0, 1.0), (1.0, 2.0), (2.0, 3.0))
                   for n in range(6)],
    ))
    reg(Identity(
        "FIRST_MONOMIAL_LATTICE",
        "First-kind monomial rule: aligned lattice vs termwise gamma",
        1e-8, _eval_first_monomial_lattice,
        lambda q: [{"u": u, "v": v, "alpha": a}
                   for u, v in ((1.0, 2.0), (2.0, 3.0))
                   for a in (0.5, 2.0, 3.5)],
    ))
    reg(Identity(
        "FIRST_GAMMA_FACTORIAL",
        "Lattice Gamma_q(n+1) equals the q-factorial [n]!",
        1e-10, _eval_first_gamma_factorial,
        lambda q: [{"n": n} for n in range(6)],
    ))
    reg(Identity(
        "FIRST_EXP2_GEOMETRIC",
        "First kind of e_q(at): termwise sum vs 1/(v - a u)",
        1e-8, _eval_first_exp2,
        lambda q: _ratio_grid(((1.0, 1.0), (2.0, 3.0)), _RATIOS),
    ))
    reg(Identity(
        "FIRST_EXP1_SERIES",
        "First kind of E_q(at): termwise sum vs stated series at matched truncation",
        1e-8, _eval_first_exp1,
        lambda q: _ratio_grid(((1.0, 1.0), (2.0, 3.0)), _RATIOS),
    ))
    reg(Identity(
        "FIRST_COSH_STATED",
        "First kind of cosh^q: stated closed form with plus denominator",
        1e-8, _eval_first_trig_pair("cosh", +1.0),
        lambda q: _ratio_grid(((1.0, 1.0), (2.0, 3.0)), _RATIOS),
        erratum_candidate=True, pair_with="FIRST_COSH_DERIVED",
    ))
    reg(Identity(
        "FIRST_COSH_DERIVED",
        "First kind of cosh^q: derived closed form with minus denominator",
        1e-8, _eval_first_trig_pair("cosh", -1.0),
        lambda q: _ratio_grid(((1.0, 1.0), (2.0, 3.0)), _RATIOS),
        erratum_candidate=True,
    ))
    reg(Identity(
        "FIRST_SINH_STATED",
        "First kind of sinh^q: stated closed form with plus denominator",
        1e-8, _eval_first_trig_pair("sinh", +1.0),
        lambda q: _ratio_grid(((1.0, 1.0), (2.0, 3.0)), _RATIOS),
        erratum_candidate=True, pair_with="FIRST_SINH_DERIVED",
    ))
    reg(Identity(
        "FIRST_SINH_DERIVED",
        "First kind of sinh^q: derived closed form with minus denominator",
        1e-8, _eval_first_trig_pair("sinh", -1.0),
        lambda q: _ratio_grid(((1.0, 1.0), (2.0, 3.0)), _RATIOS),
        erratum_candidate=True,
    ))
    reg(Identity(
        "FIRST_COS_STATED",
        "First kind of cos^q: stated closed form with minus denominator",
        1e-8, _eval_first_trig_pair("cos", -1.0),
        lambda q: _ratio_grid(((1.0, 1.0), (2.0, 3.0)), _RATIOS),
        erratum_candidate=True, pair_with="FIRST_COS_DERIVED",
    ))
    reg(Identity(
        "FIRST_COS_DERIVED",
        "First kind of cos^q: derived closed form with plus denominator",
        1e-8, _eval_first_trig_pair("cos", +1.0),
        lambda q: _ratio_grid(((1.0, 1.0), (2.0, 3.0)), _RATIOS),
        erratum_candidate=True,
    ))
    reg(Identity(
        "FIRST_SIN_STATED",
        "First kind of sin^q: stated closed form with minus denominator",
        1e-8, _eval_first_trig_pair("sin", -1.0),
        lambda q: _ratio_grid(((1.0, 1.0), (2.0, 3.0)), _RATIOS),
        erratum_candidate=True, pair_with="FIRST_SIN_DERIVED",
    ))
    reg(Identity(
        "FIRST_SIN_DERIVED",
        "First kind of sin^q: derived closed form with plus denominator",
        1e-8, _eval_first_trig_pair("sin", +1.0),
        lambda q: _ratio_grid(((1.0, 1.0), (2.0, 3.0)), _RATIOS),
        erratum_candidate=True,
    ))
    reg(Identity(
        "FIRST_KERNEL_DQ_STATED",
        "q-derivative of the E_q kernel: stated series without q-factorials",
        1e-8, _eval_first_kernel_dq(False),
        lambda q: [{"u": 1.0, "v": 2.0, "t": t} for t in (0.25, 0.5)],
        erratum_candidate=True, pair_with="FIRST_KERNEL_DQ_DERIVED",
    ))
    reg(Identity(
        "FIRST_KERNEL_DQ_DERIVED",
        "q-derivative of the E_q kernel: derived series with q-factorials",
        1e-8, _eval_first_kernel_dq(True),
        lambda q: [{"u": 1.0, "v": 2.0, "t": t} for t in (0.25, 0.5)],
        erratum_candidate=True,
    ))
    reg(Identity(
        "FIRST_DERIV_RULE",
        "First-kind transform of D_q^n f against the stated rule (u = 1)",
        1e-10, _eval_first_deriv_rule,
        lambda q: [{"u": 1.0, "v": v, "m": float(m), "n": n}
                   for v in (1.0, 2.0) for m in (1, 2, 3, 4) for n in (1, 2, 3)],
    ))
    reg(Identity(
        "FIRST_DERIV_BOUNDARY_STATED",
        "Derivative-rule boundary terms without 1/u, as stated, off u = 1",
        1e-10, _eval_first_deriv_boundary(False),
        lambda q: [{"u": 2.0, "v": 3.0, "m": 1.0, "n": 2},
                   {"u": 2.0, "v": 3.0, "m": 2.0, "n": 3}],
        erratum_candidate=True, pair_with="FIRST_DERIV_BOUNDARY_DERIVED",
    ))
    reg(Identity(
        "FIRST_DERIV_BOUNDARY_DERIVED",
        "Derivative-rule boundary terms scaled by 1/u, off u = 1",
        1e-10, _eval_first_deriv_boundary(True),
        lambda q: [{"u": 2.0, "v": 3.0, "m": 1.0, "n": 2},
                   {"u": 2.0, "v": 3.0, "m": 2.0, "n": 3}],
        erratum_candidate=True,
    ))
    reg(Identity(
        "FIRST_CONV_MONOMIAL",
        "Convolution rule for monomials at u = 1",
        1e-8, _eval_first_conv(2),
        lambda q: [{"u": 1.0, "v": v, "alpha": a, "beta": b}
                   for v in (1.0, 2.0) for a in (0.5, 1.0, 2.0) for b in (0.5, 1.0, 2.0)],
    ))
    reg(Identity(
        "FIRST_CONV_FACTOR_STATED",
        "Convolution rule with the stated u^2 factor, off u = 1",
        1e-8, _eval_first_conv(2),
        lambda q: [{"u": 2.0, "v": 3.0, "alpha": a, "beta": b}
                   for a, b in ((0.5, 1.0), (1.0, 2.0), (2.0, 2.0))],
        erratum_candidate=True, pair_with="FIRST_CONV_FACTOR_DERIVED",
    ))
    reg(Identity(
        "FIRST_CONV_FACTOR_DERIVED",
        "Convolution rule with a single u factor, off u = 1",
        1e-8, _eval_first_conv(1),
        lambda q: [{"u": 2.0, "v": 3.0, "alpha": a, "beta": b}
                   for a, b in ((0.5, 1.0), (1.0, 2.0), (2.0, 2.0))],
        erratum_candidate=True,
    ))
    reg(Identity(
        "FIRST_CONV_SERIES",
        "Convolution rule for a four-term power series at u = 1",
        1e-8, _eval_first_conv_series,
        lambda q: [{"u": 1.0, "v": 2.0, "beta": b} for b in (1.0, 2.0)],
    ))
    reg(Identity(
        "FIRST_HEAVISIDE",
        "First kind of the shifted step: interval lattice vs kernel closed form",
        1e-8, _eval_first_heaviside,
        lambda q: [{"u": u, "v": v, "a": a}
                   for u, v in ((1.0, 1.0), (1.0, 2.0), (2.0, 3.0))
                   for a in (0.0, 1.0, q, q ** 2, q ** 3)],
    ))

    reg(Identity(
        "GAMMA2_AT_ONE", "Second-kind gamma at 1 equals 1",
        1e-10, _eval_gamma2_at_one, lambda q: [{}],
    ))
    reg(Identity(
        "GAMMA2_FUNCEQ",
        "Second-kind gamma functional equation with the q^(-t) [t] factor",
        1e-6, _eval_gamma2_funceq,
        lambda q: [{"t": t} for t in (1.0, 1.5, 2.0, 3.0)],
    ))
    reg(Identity(
        "GAMMA2_LINK_STATED",
        "Link gamma_q(n) = q^(+n(n-1)/2) Gamma_q(n), as stated",
        1e-6, _eval_gamma2_link(+1.0),
        lambda q: [{"n": n} for n in (2, 3, 4)],
        erratum_candidate=True, pair_with="GAMMA2_LINK_RECURSION",
    ))
    reg(Identity(
        "GAMMA2_LINK_RECURSION",
        "Link gamma_q(n) = q^(-n(n-1)/2) Gamma_q(n), from the recursion",
        1e-6, _eval_gamma2_link(-1.0),
        lambda q: [{"n": n} for n in (2, 3, 4)],
        erratum_candidate=True,
    ))
    reg(Identity(
        "SECOND_MONOMIAL_LATTICE",
        "Second-kind monomial rule: bilateral lattice vs gamma closed form",
        1e-6, _eval_second_monomial_lattice,
        lambda q: [{"u": u, "v": v, "alpha": a}
                   for u, v in ((1.0, 1.0), (1.0, 1.0 / q), (1.0, 2.0))
                   for a in (0.5, 1.0, 1.5, 2.5)],
    ))
    reg(Identity(
        "SECOND_MONOMIAL_STATED",
        "Second-kind integer monomials with stated exponent -n(n-1)/2",
        1e-6, _eval_second_monomial_variant("stated"),
        lambda q: [{"u": 1.0, "v": 1.0, "n": n} for n in (1, 2, 3)],
        erratum_candidate=True, pair_with="SECOND_MONOMIAL_RECURSION",
    ))
    reg(Identity(
        "SECOND_MONOMIAL_RECURSION",
        "Second-kind integer monomials with recursion exponent -n(n+1)/2",
        1e-6, _eval_second_monomial_variant("recursion"),
        lambda q: [{"u": 1.0, "v": 1.0, "n": n} for n in (1, 2, 3)],
        erratum_candidate=True,
    ))
    reg(Identity(
        "SECOND_EXP1_STATED",
        "Second kind of E_q(at): stated closed form 1/(u(v - a u))",
        1e-8, _eval_second_exp1("stated"),
        lambda q: [{"u": u, "v": v, "a": r * q * v / u}
                   for u, v in ((1.0, 1.0), (2.0, 3.0)) for r in (0.2, 0.4)],
        erratum_candidate=True, pair_with="SECOND_EXP1_RECURSION",
    ))
    reg(Identity(
        "SECOND_EXP1_RECURSION",
        "Second kind of E_q(at): recursion-derived form q/(qv - a u)",
        1e-8, _eval_second_exp1("recursion"),
        lambda q: [{"u": u, "v": v, "a": r * q * v / u}
                   for u, v in ((1.0, 1.0), (2.0, 3.0)) for r in (0.2, 0.4)],
        erratum_candidate=True,
    ))
    for shape, label in (("exp2", "EXP2"), ("cos2", "COS2"), ("sin2", "SIN2")):
        reg(Identity(
            f"SECOND_{label}_FORMAL_STATED",
            f"Formal coefficients of the stated second-kind {shape} series",
            1e-8, _second_formal_pair(shape, True),
            lambda q: [{"u": 1.0, "v": 2.0, "a": 1.0, "order": 8},
                       {"u": 2.0, "v": 3.0, "a": 1.0, "order": 8}],
            erratum_candidate=True, pair_with=f"SECOND_{label}_FORMAL_DERIVED",
        ))
        reg(Identity(
            f"SECOND_{label}_FORMAL_DERIVED",
            f"Formal coefficients of the recursion-derived second-kind {shape} series",
            1e-8, _second_formal_pair(shape, False),
            lambda q: [{"u": 1.0, "v": 2.0, "a": 1.0, "order": 8},
                       {"u": 2.0, "v": 3.0, "a": 1.0, "order": 8}],
            erratum_candidate=True,
        ))
    reg(Identity(
        "SECOND_KERNEL_DQ",
        "q-derivative of the e_q kernel equals -(v/u) times the kernel",
        1e-8, _eval_second_kernel_dq,
        lambda q: [{"u": u, "v": v, "t": t}
                   for u, v in ((1.0, 2.0), (2.0, 3.0)) for t in (0.5, 1.0, 2.0)],
    ))
    for candidate in ("A", "B", "C"):
        reg(Identity(
            f"SECOND_DERIV_ORDER_{candidate}",
            f"Second-kind derivative rule, argument-order candidate {candidate}",
            1e-8, _eval_second_deriv_order(candidate),
            lambda q: [{"u": u, "v": v, "m": float(m)}
                       for u, v in ((1.0, 2.0), (2.0, 3.0)) for m in (1, 2, 3)],
            erratum_candidate=True,
            pair_with=None,
        ))
    reg(Identity(
        "SECOND_DERIV_CHAIN",
        "Second-kind n-th derivative rule from iterating the adopted order",
        1e-8, _eval_second_deriv_chain,
        lambda q: [{"u": u, "v": v, "m": float(n), "n": n}
                   for u, v in ((1.0, 2.0), (2.0, 3.0)) for n in (2, 3)],
    ))
    reg(Identity(
        "SECOND_DERIV_CHAIN_STATED",
        "Second-kind n-th derivative rule with the stated q^(-n) factor",
        1e-8, _eval_second_deriv_chain_stated,
        lambda q: [{"u": u, "v": v, "m": float(n), "n": n}
                   for u, v in ((1.0, 2.0), (2.0, 3.0)) for n in (2, 3)],
        erratum_candidate=True, pair_with="SECOND_DERIV_CHAIN",
    ))


_build_registry()

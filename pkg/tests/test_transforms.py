import math

import pytest

from qnatural import (
    Constant,
    CosSecond,
    CoshSecond,
    DirectLattice,
    DivergentTransform,
    DomainError,
    ExpClassical,
    ExpFirst,
    ExpSecond,
    Formal,
    Heaviside,
    Monomial,
    PowerSeries,
    Scale,
    SeriesStatus,
    SinFirst,
    SinSecond,
    SinhSecond,
    Sum,
    TermwiseGamma,
    TransformKind,
    TransformPoint,
    UnknownForm,
    beta_q,
    derivative_rule_sides,
    exp_first,
    gamma_second,
    laplace_classical,
    natural_classical,
    nq_first,
    nq_first_closed,
    nq_second,
    nq_second_closed,
    q_convolution,
    q_laplace,
    q_sumudu,
    second_kind_shift_probe,
    sumudu_classical,
)
from qnatural.qcore import EvalMode
from conftest import rel, tight


# ---------------------------------------------------------------------------
# classical layer
# ---------------------------------------------------------------------------


def test_transform_point_validation():
    with pytest.raises(DomainError):
        TransformPoint(0.0, 1.0)
    with pytest.raises(DomainError):
        TransformPoint(1.0, -2.0)


def test_classical_constant(ctx):
    got = natural_classical(Constant(1.0), TransformPoint(2.0, 3.0), ctx)
    assert rel(got, 1.0 / 3.0) <= 1e-10


def test_classical_exponential(ctx):
    got = natural_classical(ExpClassical(1.0), TransformPoint(0.3, 2.0), ctx)
    assert rel(got, 1.0 / 1.7) <= 1e-10


def test_classical_monomial(ctx):
    # quadrature oracle; analytically Gamma(2) u / v^2
    got = natural_classical(Monomial(1.0), TransformPoint(2.0, 1.0), ctx)
    assert rel(got, 2.0) <= 1e-10


def test_classical_heaviside_split(ctx):
    got = natural_classical(Heaviside(0.5), TransformPoint(1.0, 2.0), ctx)
    assert rel(got, math.exp(-1.0) / 2.0) <= 1e-9


def test_classical_divergence_guard(ctx):
    with pytest.raises(DivergentTransform):
        natural_classical(ExpClassical(2.0), TransformPoint(1.0, 1.0), ctx)


def test_classical_reductions(ctx):
    f = Monomial(2.0)
    assert rel(
        natural_classical(f, TransformPoint(1.0, 2.0), ctx),
        laplace_classical(f, 2.0, ctx),
    ) <= 1e-12
    assert rel(
        natural_classical(f, TransformPoint(2.0, 1.0), ctx),
        sumudu_classical(f, 2.0, ctx),
    ) <= 1e-12
    assert rel(laplace_classical(Constant(1.0), 2.0, ctx), 0.5) <= 1e-10


def test_classical_duality_argument_order(ctx):
    # the Laplace-duality argument that matches the kernel is v/u
    f = Monomial(1.0)
    lhs = natural_classical(f, TransformPoint(2.0, 3.0), ctx)
    good = laplace_classical(f, 3.0 / 2.0, ctx) / 2.0
    bad = laplace_classical(f, 2.0 / 3.0, ctx) / 2.0
    assert rel(lhs, good) <= 1e-10
    assert rel(lhs, bad) > 1e-2


def test_classical_scaling_forms(ctx):
    pt = TransformPoint(0.3, 2.0)
    for k in (2.0, 3.0):
        from qnatural import ArgScale

        lhs = natural_classical(ArgScale(k, ExpClassical(1.0)), pt, ctx)
        v_form = natural_classical(
            ExpClassical(1.0), TransformPoint(pt.u, pt.v / k), ctx
        ) / k
        u_form = natural_classical(ExpClassical(1.0), TransformPoint(k * pt.u, pt.v), ctx)
        assert rel(lhs, v_form) <= 1e-10
        assert rel(lhs, u_form) <= 1e-10
        # the u-route needs no 1/k prefactor
        assert rel(lhs, u_form / k) > 1e-2


# ---------------------------------------------------------------------------
# q-Laplace / q-Sumudu
# ---------------------------------------------------------------------------


def _lattice_first_laplace(s, q, depth=200):
    # independent oracle: plain loop over the finite Jackson lattice
    ctx = tight(q)
    total = 0.0
    for k in range(depth):
        t = q ** k / s
        total += q ** k * exp_first(-q * s * t, ctx).value
    return total / s  # (1/(1-q)) * (1-q) * (1/s) * sum


def test_q_laplace_first_against_lattice_oracle():
    for q in (0.3, 0.5, 0.8):
        ctx = tight(q)
        got = q_laplace(TransformKind.FIRST, Constant(1.0), 1.0, ctx)
        assert got.status is SeriesStatus.CONVERGED
        assert rel(got.value, _lattice_first_laplace(1.0, q)) <= 1e-9


def test_q_laplace_second_of_constant(tight_ctx):
    # reduces to gamma_q(1)/(1-q) = 2 at q = 1/2
    got = q_laplace(TransformKind.SECOND, Constant(1.0), 1.0, tight_ctx)
    assert rel(got.value, 2.0) <= 1e-9


def test_q_laplace_second_monomial_aligned(tight_ctx):
    # s = 2 = q^(-1) is lattice-aligned at q = 1/2, so the substitution
    # reduction through gamma_q(2) is exact: value = 2 * gamma_q(2)/4 = 1
    got = q_laplace(TransformKind.SECOND, Monomial(1.0), 2.0, tight_ctx)
    assert rel(got.value, 1.0) <= 1e-9


def test_q_laplace_rejects_bad_s(ctx):
    with pytest.raises(DomainError):
        q_laplace(TransformKind.FIRST, Constant(1.0), 0.0, ctx)
    with pytest.raises(DomainError):
        q_laplace("third", Constant(1.0), 1.0, ctx)


def test_q_sumudu_second_of_constant(tight_ctx):
    got = q_sumudu(TransformKind.SECOND, Constant(1.0), 1.0, tight_ctx)
    assert rel(got.value, 2.0) <= 1e-9


def test_q_sumudu_second_monomial_aligned(tight_ctx):
    # independent reduction: int t^n e_q(-t/s) = s^(n+1) gamma_q(n+1) for
    # lattice-aligned 1/s; full value carries the 1/(1-q) prefactor
    s, n = 2.0, 1.0
    got = q_sumudu(TransformKind.SECOND, Monomial(n), s, tight_ctx)
    want = s ** (n + 1) * gamma_second(n + 1.0, tight_ctx).value / (1.0 - tight_ctx.q)
    assert rel(got.value, want) <= 1e-9


def test_q_sumudu_first_against_lattice_oracle(tight_ctx):
    q = tight_ctx.q
    total = 0.0
    for k in range(200):
        t = q ** k  # s = 1
        total += q ** k * exp_first(-q * t, tight_ctx).value
    got = q_sumudu(TransformKind.FIRST, Constant(1.0), 1.0, tight_ctx)
    assert rel(got.value, total) <= 1e-9


# ---------------------------------------------------------------------------
# first-kind q-Natural transform
# ---------------------------------------------------------------------------


def test_first_monomial_example(tight_ctx):
    # u = 1, v = 2, n = 2: [2]!/8 = 1.5/8
    got = nq_first(Monomial(2.0), TransformPoint(1.0, 2.0), tight_ctx)
    assert rel(got.value, 0.1875) <= 1e-10
    assert rel(nq_first_closed(Monomial(2.0), TransformPoint(1.0, 2.0), tight_ctx), 0.1875) <= 1e-14


def test_first_constant_is_one_over_v(tight_ctx):
    got = nq_first(Constant(1.0), TransformPoint(2.0, 3.0), tight_ctx)
    assert rel(got.value, 1.0 / 3.0) <= 1e-10


def test_first_termwise_vs_aligned_lattice(tight_ctx):
    pt = TransformPoint(2.0, 3.0)
    for spec in (Monomial(1.5), ExpSecond(0.5), CosSecond(1.0)):
        termwise = nq_first(spec, pt, tight_ctx, TermwiseGamma())
        aligned = nq_first(spec, pt, tight_ctx, DirectLattice("aligned"))
        assert termwise.status is SeriesStatus.CONVERGED
        assert aligned.status is SeriesStatus.CONVERGED
        assert rel(termwise.value, aligned.value) <= 1e-9


def test_first_exp_second_geometric(tight_ctx):
    pt = TransformPoint(1.0, 2.0)
    got = nq_first(ExpSecond(1.0), pt, tight_ctx)
    assert rel(got.value, 1.0) <= 1e-9  # 1/(v - au) = 1/(2 - 1)


def test_first_termwise_divergence_status(tight_ctx):
    # beyond the geometric radius the termwise series must flag divergence
    got = nq_first(ExpSecond(3.0), TransformPoint(1.0, 2.0), tight_ctx)
    assert got.status is SeriesStatus.DIVERGED


def test_first_bilateral_lattice_diverges_off_alignment(tight_ctx):
    # for generic v/u the E_q kernel grows super-geometrically along the
    # negative lattice and the raw bilateral sum must flag divergence
    got = nq_first(Monomial(1.0), TransformPoint(1.0, 1.3), tight_ctx,
                   DirectLattice("bilateral"))
    assert got.status is SeriesStatus.DIVERGED


def test_first_bilateral_lattice_converges_when_kernel_aligned(tight_ctx):
    # at q = 1/2, v/u = 2 the kernel zeros land exactly on the raw lattice
    # ((1-q) q^{k+1} v/u = q^k), so the bilateral sum terminates and agrees
    # with the termwise value
    pt = TransformPoint(1.0, 2.0)
    got = nq_first(Monomial(1.0), pt, tight_ctx, DirectLattice("bilateral"))
    assert got.status is SeriesStatus.CONVERGED
    assert rel(got.value, nq_first(Monomial(1.0), pt, tight_ctx).value) <= 1e-9


def test_first_formal_mode(tight_ctx):
    got = nq_first(ExpSecond(1.0), TransformPoint(1.0, 2.0), tight_ctx, Formal(5))
    assert got.mode is EvalMode.FORMAL
    assert got.terms_used == 5
    # partial sum of (1/v) sum (au/v)^n
    expected = sum(0.5 ** n / 2.0 for n in range(5))
    assert rel(got.value, expected) <= 1e-9


def test_first_closed_registry(tight_ctx):
    pt = TransformPoint(1.0, 2.0)
    assert rel(nq_first_closed(Constant(1.0), pt, tight_ctx), 0.5) <= 1e-14
    assert rel(nq_first_closed(Monomial(0.0), pt, tight_ctx), 0.5) <= 1e-14
    # stated closed forms as catalogued
    assert rel(nq_first_closed(CosSecond(1.0), pt, tight_ctx), 2.0 / 3.0) <= 1e-14
    assert rel(nq_first_closed(CoshSecond(1.0), pt, tight_ctx), 2.0 / 5.0) <= 1e-14
    assert rel(nq_first_closed(SinSecond(1.0), pt, tight_ctx), 1.0 / 3.0) <= 1e-14
    assert rel(nq_first_closed(SinhSecond(1.0), pt, tight_ctx), 1.0 / 5.0) <= 1e-14
    # Heaviside at a = 0 matches the constant
    assert nq_first_closed(Heaviside(0.0), TransformPoint(1.0, 4.0), tight_ctx) == pytest.approx(0.25)
    with pytest.raises(DomainError):
        nq_first_closed(ExpSecond(3.0), pt, tight_ctx)
    with pytest.raises(UnknownForm):
        nq_first_closed(SinFirst(1.0), pt, tight_ctx)


def test_first_closed_linearity(tight_ctx):
    pt = TransformPoint(1.0, 2.0)
    combo = Sum((Scale(3.0, ExpSecond(0.5)), Scale(-1.0, Heaviside(0.25))))
    want = 3.0 * nq_first_closed(ExpSecond(0.5), pt, tight_ctx) - nq_first_closed(
        Heaviside(0.25), pt, tight_ctx
    )
    assert rel(nq_first_closed(combo, pt, tight_ctx), want) <= 1e-14


def test_first_heaviside_lattice_vs_closed(tight_ctx):
    pt = TransformPoint(1.0, 2.0)
    for a in (0.0, 0.25, 0.5):
        lattice = nq_first(Heaviside(a), pt, tight_ctx, DirectLattice("aligned"))
        closed = nq_first_closed(Heaviside(a), pt, tight_ctx)
        assert rel(lattice.value, closed) <= 1e-9


# ---------------------------------------------------------------------------
# second-kind q-Natural transform
# ---------------------------------------------------------------------------


def test_second_constant(tight_ctx):
    got = nq_second(Constant(1.0), TransformPoint(2.0, 3.0), tight_ctx)
    assert got.status is SeriesStatus.CONVERGED
    assert rel(got.value, 1.0 / 3.0) <= 1e-9


def test_second_monomial_lattice_example(tight_ctx):
    # gamma_q(2) = 1/q = 2 at q = 1/2
    got = nq_second(Monomial(1.0), TransformPoint(1.0, 1.0), tight_ctx)
    assert rel(got.value, 2.0) <= 1e-9


def test_second_termwise_matches_lattice(tight_ctx):
    pt = TransformPoint(1.0, 1.0)
    for alpha in (0.5, 1.5, 2.0):
        lattice = nq_second(Monomial(alpha), pt, tight_ctx)
        termwise = nq_second(Monomial(alpha), pt, tight_ctx, TermwiseGamma())
        assert rel(lattice.value, termwise.value) <= 1e-9


def test_second_monomial_gamma_formula(tight_ctx):
    alpha = 1.5
    pt = TransformPoint(1.0, 1.0)
    got = nq_second(Monomial(alpha), pt, tight_ctx)
    want = gamma_second(alpha + 1.0, tight_ctx).value
    assert rel(got.value, want) <= 1e-9


def test_second_closed_variants(tight_ctx):
    pt = TransformPoint(1.0, 1.0)
    variants = nq_second_closed(Monomial(1.0), pt, tight_ctx)
    # stated exponent gives 1, the recursion exponent gives 1/q = 2;
    # the bilateral lattice arbitrates in favour of the recursion
    assert variants["stated"] == pytest.approx(1.0)
    assert variants["recursion"] == pytest.approx(2.0)
    lattice = nq_second(Monomial(1.0), pt, tight_ctx).value
    assert rel(lattice, variants["recursion"]) <= 1e-9
    assert rel(lattice, variants["stated"]) > 1e-2

    gamma_variant = nq_second_closed(Monomial(1.5), pt, tight_ctx)
    assert set(gamma_variant) == {"gamma"}

    exp_variants = nq_second_closed(ExpFirst(0.2), pt, tight_ctx)
    assert set(exp_variants) == {"stated", "recursion"}

    with pytest.raises(UnknownForm):
        nq_second_closed(ExpSecond(0.5), pt, tight_ctx)
    with pytest.raises(UnknownForm):
        nq_second_closed(CosSecond(0.5), pt, tight_ctx)


def test_second_formal_strategy(tight_ctx):
    got = nq_second(CosSecond(1.0), TransformPoint(1.0, 2.0), tight_ctx, Formal(4))
    assert got.mode is EvalMode.FORMAL
    assert got.status is SeriesStatus.TRUNCATED
    assert got.terms_used == 4


def test_second_termwise_divergence_flagged(tight_ctx):
    # the second-kind series for e_q(at) has terms growing like q^(-n)
    got = nq_second(ExpSecond(0.5), TransformPoint(1.0, 1.0), tight_ctx, TermwiseGamma())
    assert got.status is SeriesStatus.DIVERGED


# ---------------------------------------------------------------------------
# q-convolution
# ---------------------------------------------------------------------------


def test_convolution_example(tight_ctx):
    got = q_convolution(Monomial(1.0), Monomial(0.0), 1.0, tight_ctx)
    assert rel(got.value, 2.0 / 3.0) <= 1e-10


def test_convolution_at_zero(tight_ctx):
    got = q_convolution(Monomial(1.0), Monomial(0.0), 0.0, tight_ctx)
    assert got.value == 0.0


def test_convolution_reduces_to_beta(tight_ctx):
    # (t^alpha * t^(beta-1))_q(t) = B_q(alpha+1, beta) t^(alpha+beta)
    for (alpha, beta) in ((0.5, 0.5), (1.0, 2.0), (2.0, 1.0)):
        for t in (0.7, 1.0):
            got = q_convolution(Monomial(alpha), Monomial(beta - 1.0), t, tight_ctx)
            want = beta_q(alpha + 1.0, beta, tight_ctx).value * t ** (alpha + beta)
            assert rel(got.value, want) <= 1e-9


def test_convolution_power_series(tight_ctx):
    f = PowerSeries((1.0, 2.0), 1.0)
    got = q_convolution(f, Monomial(0.0), 1.0, tight_ctx)
    want = (
        beta_q(1.0, 1.0, tight_ctx).value
        + 2.0 * beta_q(2.0, 1.0, tight_ctx).value
    )
    assert rel(got.value, want) <= 1e-9


def test_convolution_shape_guards(tight_ctx):
    with pytest.raises(DomainError):
        q_convolution(ExpSecond(1.0), Monomial(0.0), 1.0, tight_ctx)
    with pytest.raises(DomainError):
        q_convolution(Monomial(1.0), ExpSecond(1.0), 1.0, tight_ctx)
    with pytest.raises(DomainError):
        q_convolution(Monomial(1.0), Monomial(0.0), -1.0, tight_ctx)


# ---------------------------------------------------------------------------
# derivative rules
# ---------------------------------------------------------------------------


def test_first_kind_derivative_rule_trivial(tight_ctx):
    lhs, rhs = derivative_rule_sides(
        TransformKind.FIRST, Monomial(1.0), 1, TransformPoint(1.0, 2.0), tight_ctx
    )
    assert rel(lhs, 0.5) <= 1e-10
    assert rel(rhs, 0.5) <= 1e-10


def test_first_kind_derivative_rule_grid(tight_ctx):
    for m in (1, 2, 3, 4):
        for n in (1, 2, 3):
            lhs, rhs = derivative_rule_sides(
                TransformKind.FIRST, Monomial(float(m)), n,
                TransformPoint(1.0, 2.0), tight_ctx,
            )
            assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs), 1.0)


def test_second_kind_shift_probe_unique(tight_ctx):
    probe = second_kind_shift_probe(tight_ctx)
    assert probe.adopted == "A"
    errors = dict(probe.max_errors)
    assert errors["A"] <= 1e-10
    assert errors["B"] > 1e-3 and errors["C"] > 1e-3


def test_second_kind_derivative_rule(tight_ctx):
    for (m, n) in ((1, 1), (2, 1), (3, 2), (3, 3)):
        lhs, rhs = derivative_rule_sides(
            TransformKind.SECOND, Monomial(float(m)), n,
            TransformPoint(2.0, 3.0), tight_ctx,
        )
        assert abs(lhs - rhs) <= 1e-9 * max(abs(lhs), abs(rhs), 1.0)


def test_derivative_rule_validation(tight_ctx):
    with pytest.raises(DomainError):
        derivative_rule_sides(
            TransformKind.FIRST, Monomial(1.0), 0, TransformPoint(1.0, 1.0), tight_ctx
        )


def test_second_kind_q_to_one_sanity():
    # N^q(t^n) approaches n! u^n / v^(n+1) as q -> 1
    from qnatural.verify import scaled_context

    for n in (1, 2):
        gaps = []
        for q in (0.9, 0.99):
            ctx = scaled_context(q)
            value = nq_second(
                Monomial(float(n)), TransformPoint(1.0, 1.0), ctx, TermwiseGamma()
            ).value
            gaps.append(abs(value - math.factorial(n)))
        assert gaps[1] < gaps[0]

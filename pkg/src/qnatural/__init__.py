"""Numerical q-calculus with two q-deformations of the Natural transform.

The package is organised in layers:

    qcore       scalar q-arithmetic and the shared truncation policy
    qcalc       q-derivative and the Jackson-integral family
    qspecial    q-exponentials, q-trig, q-hyperbolic, both q-gammas, q-beta
    funcspec    symbolic descriptors of transform inputs
    transforms  classical Natural/Laplace/Sumudu plus both q-Natural kinds
    verify      identity-audit engine with stated/derived erratum pairs
    cli         command-line front end (eval, closed, audit, sweep, limit, table)
"""

from .errors import (
    DivergentTransform,
    DomainError,
    NonConvergence,
    ParseError,
    QNaturalError,
    UnknownForm,
    UnknownIdentity,
)
from .qcore import (
    INFINITY,
    EvalMode,
    QContext,
    SeriesResult,
    SeriesStatus,
    q_bracket,
    q_factorial,
    q_number,
    q_pochhammer,
    q_pochhammer_inf,
    q_pochhammer_real,
)
from .qcalc import (
    jackson_finite,
    jackson_improper,
    jackson_interval,
    q_derivative,
    q_derivative_n,
)
from .qspecial import (
    HyperbolicKind,
    TrigKind,
    beta_q,
    exp_first,
    exp_first_product,
    exp_second,
    exp_second_neg,
    gamma_first,
    gamma_second,
    q_hyperbolic,
    q_trig,
)
from .funcspec import (
    ArgScale,
    Constant,
    CosFirst,
    CosSecond,
    CoshSecond,
    ExpClassical,
    ExpFirst,
    ExpSecond,
    FunctionSpec,
    Heaviside,
    Monomial,
    PowerSeries,
    Scale,
    SinFirst,
    SinSecond,
    SinhSecond,
    Sum,
    evaluate,
    specs_equivalent,
    to_text,
)
from .transforms import (
    DirectLattice,
    Formal,
    Strategy,
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
    q_convolution,
    q_laplace,
    q_sumudu,
    second_kind_shift_probe,
    sumudu_classical,
)
from .verify import (
    IdentityReport,
    LimitStudy,
    PairOutcome,
    SweepConfig,
    SweepResult,
    Verdict,
    audit_identity,
    audit_sweep,
    erratum_pairs,
    pair_outcomes,
    q_limit_study,
    registry_ids,
    scaled_context,
)
from .cli import parse_function

__version__ = "0.1.0"

"""Scalar q-arithmetic: q-brackets, q-factorials and q-shifted factorials.

Everything here assumes a fixed deformation parameter 0 < q < 1 carried by a
:class:`QContext`, and works in plain double precision.  The context also
owns the truncation policy (relative tolerance, term budget, lattice window)
used by every series and lattice sum in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from .errors import DomainError, NonConvergence


class Infinity(Enum):
    """Explicit marker for the q-bracket of infinity.

    Kept distinct from ``float('inf')`` so that no IEEE infinity ever enters
    ordinary arithmetic paths.
    """

    POSITIVE = "infinity"


#: The distinguished infinity marker accepted by :func:`q_bracket`.
INFINITY = Infinity.POSITIVE


@dataclass(frozen=True)
class QContext:
    """Deformation parameter plus truncation/tolerance policy.

    q              -- deformation parameter, 0 < q < 1
    lattice_k_min  -- most negative lattice exponent used by bilateral sums
    lattice_k_max  -- largest lattice exponent
    rel_tol        -- relative tolerance for series/product truncation
    max_terms      -- hard cap on the number of series terms
    """

    q: float
    lattice_k_min: int = -60
    lattice_k_max: int = 200
    rel_tol: float = 1e-10
    max_terms: int = 500

    def __post_init__(self) -> None:
        if not (0.0 < self.q < 1.0) or not math.isfinite(self.q):
            raise ValueError(f"q must satisfy 0 < q < 1, got {self.q!r}")
        if not (self.lattice_k_min < 0 < self.lattice_k_max):
            raise ValueError("lattice window must satisfy k_min < 0 < k_max")
        if not (self.rel_tol > 0.0):
            raise ValueError("rel_tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")

    @property
    def one_minus_q(self) -> float:
        return 1.0 - self.q


class SeriesStatus(Enum):
    CONVERGED = "Converged"
    TRUNCATED = "Truncated"
    DIVERGED = "Diverged"


class EvalMode(Enum):
    NUMERIC = "Numeric"
    FORMAL = "Formal"


@dataclass(frozen=True)
class SeriesResult:
    """A numeric value bundled with convergence diagnostics."""

    value: float
    terms_used: int
    tail_estimate: float
    status: SeriesStatus
    mode: EvalMode = EvalMode.NUMERIC
    k_first: Optional[int] = None
    k_last: Optional[int] = None

    @property
    def converged(self) -> bool:
        return self.status is SeriesStatus.CONVERGED

    def require_converged(self) -> float:
        if self.status is not SeriesStatus.CONVERGED:
            raise NonConvergence(
                f"series did not converge (status={self.status.value}, "
                f"terms={self.terms_used})"
            )
        return self.value


# Consecutive steps with term ratio >= 1 and non-decreasing after which a
# sum is declared divergent.  Convergent single-peak lattice sums (gamma
# walks at q near 1) grow for many steps but with strictly falling ratios,
# so only flat-or-steepening growth counts.
_DIVERGENCE_STREAK = 12


def sum_series(
    terms: Iterable[float],
    ctx: QContext,
    *,
    stable_count: int = 3,
    mode: EvalMode = EvalMode.NUMERIC,
) -> SeriesResult:
    """Sum a term sequence under the context truncation policy.

    The sum stops once a conservative geometric tail estimate stays below
    ``rel_tol * max(|partial|, 1)`` for ``stable_count`` consecutive terms;
    the streak requirement guards series whose even or odd terms vanish.
    Sustained term growth is reported as DIVERGED rather than looped on.
    A finite sequence that ends on its own is CONVERGED with zero tail.
    """
    partial = 0.0
    count = 0
    prev_mag: Optional[float] = None
    prev_ratio: Optional[float] = None
    ratio = 0.5
    tail = 0.0
    small_streak = 0
    diverge_streak = 0
    seen_signal = False
    for term in terms:
        if not math.isfinite(term):
            return SeriesResult(partial, count + 1, abs(partial), SeriesStatus.DIVERGED, mode)
        partial += term
        count += 1
        mag = abs(term)
        if prev_mag is not None and prev_mag > 0.0 and mag > 0.0:
            ratio = mag / prev_mag
            if ratio >= 1.0 and (prev_ratio is None or ratio >= prev_ratio * (1.0 - 1e-12)):
                diverge_streak += 1
            else:
                diverge_streak = 0
            prev_ratio = ratio
        if mag > 0.0:
            prev_mag = mag
            seen_signal = True
        # Valid geometric bound whenever the ratio sits below 1 (post-peak
        # ratios of the lattice sums decrease monotonically); the near-1 cap
        # only matters while the ratio >= 1 blocks convergence anyway.
        r = min(ratio, 1.0 - 1e-9)
        if mag > 0.0:
            tail = mag * r / (1.0 - r)
        else:
            tail *= r
        scale = max(abs(partial), 1.0)
        # Convergence needs three things: some signal seen (leading exact
        # zeros and underflowed prefixes carry no information), a shrinking
        # term ratio (single-peak lattice sums start far below tolerance and
        # must not stop before their peak), and a small tail bound.
        if tail <= ctx.rel_tol * scale and seen_signal and ratio < 1.0:
            small_streak += 1
            if small_streak >= stable_count:
                return SeriesResult(partial, count, tail, SeriesStatus.CONVERGED, mode)
        else:
            small_streak = 0
        if diverge_streak >= _DIVERGENCE_STREAK:
            return SeriesResult(partial, count, mag, SeriesStatus.DIVERGED, mode)
        if count >= ctx.max_terms:
            status = SeriesStatus.DIVERGED if ratio >= 1.0 else SeriesStatus.TRUNCATED
            return SeriesResult(partial, count, mag, status, mode)
    return SeriesResult(partial, count, 0.0, SeriesStatus.CONVERGED, mode)


def q_number(x: float, ctx: QContext) -> float:
    """The q-analogue [x] = (1 - q^x) / (1 - q) for finite real x."""
    if not math.isfinite(x):
        raise DomainError(f"q_number requires finite x, got {x!r}")
    return (1.0 - ctx.q ** x) / ctx.one_minus_q


def q_bracket(x, ctx: QContext) -> float:
    """[x] = (1 - q^x)/(1 - q); the INFINITY marker maps to 1/(1 - q)."""
    if isinstance(x, Infinity):
        return 1.0 / ctx.one_minus_q
    return q_number(float(x), ctx)


def q_factorial(n: int, ctx: QContext) -> float:
    """[n]! = [n][n-1]...[1]; the empty product is 1."""
    if n < 0 or n != int(n):
        raise DomainError(f"q_factorial requires a nonnegative integer, got {n!r}")
    out = 1.0
    for i in range(1, int(n) + 1):
        out *= q_number(float(i), ctx)
    return out


def q_pochhammer(x: float, n: int, ctx: QContext) -> float:
    """Finite q-shifted factorial (x; q)_n = prod_{k<n} (1 - x q^k)."""
    if n < 0 or n != int(n):
        raise DomainError(f"q_pochhammer requires a nonnegative integer n, got {n!r}")
    out = 1.0
    power = 1.0
    for _ in range(int(n)):
        out *= 1.0 - x * power
        power *= ctx.q
    return out


def q_pochhammer_inf(x: float, ctx: QContext) -> SeriesResult:
    """Infinite q-shifted factorial (x; q)_inf = prod_{k>=0} (1 - x q^k).

    Factors are multiplied until |x q^k| drops below rel_tol and the running
    product has stabilised; exhausting max_terms raises NonConvergence.
    """
    if not math.isfinite(x):
        raise DomainError(f"q_pochhammer_inf requires finite x, got {x!r}")
    product = 1.0
    power = 1.0
    for k in range(ctx.max_terms):
        # Remaining factors multiply the product by at most
        # exp(sum_{j>=k} |x| q^j) = exp(|x| q^k / (1-q)), hence this tail.
        tail = abs(product) * abs(x) * power / ctx.one_minus_q
        if k > 0 and tail <= ctx.rel_tol * max(abs(product), 1.0):
            return SeriesResult(product, k, tail, SeriesStatus.CONVERGED)
        product *= 1.0 - x * power
        power *= ctx.q
        if product == 0.0:
            return SeriesResult(0.0, k + 1, 0.0, SeriesStatus.CONVERGED)
    raise NonConvergence(
        f"(x; q)_inf did not stabilise within {ctx.max_terms} factors for x={x}"
    )


def q_pochhammer_real(x: float, t: float, ctx: QContext) -> float:
    """Real-exponent shifted factorial (x; q)_t = (x; q)_inf / (x q^t; q)_inf.

    Reduces to the finite product for nonnegative integer t.
    """
    if t >= 0 and float(t).is_integer():
        return q_pochhammer(x, int(t), ctx)
    num = q_pochhammer_inf(x, ctx).require_converged()
    den = q_pochhammer_inf(x * ctx.q ** t, ctx).require_converged()
    if den == 0.0:
        raise DomainError(f"(x q^t; q)_inf vanishes for x={x}, t={t}")
    return num / den

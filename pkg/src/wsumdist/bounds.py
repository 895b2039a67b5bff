"""Constant-free structural factors for Kolmogorov-distance error bounds.

Each bound on |L(S) - L(Z)|_K in this package has the shape
(absolute constant) x (structural factor).  The absolute constants are
never specified, so every report here sets them to 1 and says so via
``absolute_constant_excluded``.  The factor is always the product, in
insertion order, of the report's components whose keys carry the
``factor.`` prefix; remaining components are named intermediates kept for
inspection and CSV output.

Block model: S = sum_i w_i * (X_i1 + ... + X_in_i) against the analogous
Z built from G-distributed summands, with everything independent.  A
BlockSpec holds one i: the summand laws, the count, and the weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import (
    LatticeMeasure,
    convolve,
    delta,
    factorial_moment,
    moments,
    power,
    smoothness_u,
    tv_norm,
)
from .approximants import nb_match
from .markov import MBParams, cond1_check

__all__ = [
    "OddSError",
    "MomentMismatchError",
    "BlockSpec",
    "AssumptionReport",
    "BoundReport",
    "check_assumptions",
    "bound_independent",
    "bound_independent_sym",
    "bound_iid",
    "bound_nb",
    "bound_markov",
    "lemma_fg_gap",
    "lemma_fg_gap_sym",
]

MOMENT_MATCH_TOL = 1e-10


class OddSError(ValueError):
    """Raised when an even-order expansion is requested with odd s."""


class MomentMismatchError(ValueError):
    """Raised when inputs lack the factorial-moment matching they promise."""


@dataclass(frozen=True)
class BlockSpec:
    """One weighted block of summands and its approximating counterparts.

    ``f`` and ``g`` are the summand laws when the block is iid; for
    non-identically distributed blocks pass per-summand tuples ``f_list``
    and ``g_list`` (then ``f``/``g`` are their first entries and ``n``
    their common length).
    """

    f: LatticeMeasure
    g: LatticeMeasure
    n: int
    weight: float = 1.0
    f_list: tuple[LatticeMeasure, ...] | None = None
    g_list: tuple[LatticeMeasure, ...] | None = None

    def __post_init__(self) -> None:
        if int(self.n) < 1:
            raise ValueError("block count n must be >= 1")
        object.__setattr__(self, "n", int(self.n))
        if not (self.weight > 0.0 and math.isfinite(self.weight)):
            raise ValueError("weight must be positive and finite")
        if (self.f_list is None) != (self.g_list is None):
            raise ValueError("f_list and g_list must be given together")
        if self.f_list is not None:
            object.__setattr__(self, "f_list", tuple(self.f_list))
            object.__setattr__(self, "g_list", tuple(self.g_list))
            if len(self.f_list) != len(self.g_list):
                raise ValueError("f_list and g_list must have equal length")
            if len(self.f_list) != self.n:
                raise ValueError("per-summand lists must have length n")
        for m in self._distinct_pairs():
            for side in m:
                if not side.is_probability:
                    raise ValueError("block summands must be probability laws")

    @classmethod
    def iid(
        cls, f: LatticeMeasure, g: LatticeMeasure, n: int, weight: float = 1.0
    ) -> "BlockSpec":
        return cls(f=f, g=g, n=n, weight=weight)

    @classmethod
    def from_summands(
        cls,
        f_list: tuple[LatticeMeasure, ...],
        g_list: tuple[LatticeMeasure, ...],
        weight: float = 1.0,
    ) -> "BlockSpec":
        f_list = tuple(f_list)
        g_list = tuple(g_list)
        if not f_list:
            raise ValueError("per-summand lists must be nonempty")
        return cls(
            f=f_list[0],
            g=g_list[0] if g_list else f_list[0],
            n=len(f_list),
            weight=weight,
            f_list=f_list,
            g_list=g_list,
        )

    @property
    def is_iid(self) -> bool:
        return self.f_list is None

    def _distinct_pairs(self) -> list[tuple[LatticeMeasure, LatticeMeasure]]:
        if self.f_list is None:
            return [(self.f, self.g)]
        return list(zip(self.f_list, self.g_list))

    def pair_values(self, fn) -> list:
        """Evaluate fn(F_ij, G_ij) for every summand, memoized by identity.

        An iid block evaluates fn once and repeats the value n times.
        """
        if self.f_list is None:
            return [fn(self.f, self.g)] * self.n
        memo: dict[tuple[int, int], object] = {}
        out = []
        for fi, gi in zip(self.f_list, self.g_list):
            key = (id(fi), id(gi))
            if key not in memo:
                memo[key] = fn(fi, gi)
            out.append(memo[key])
        return out


@dataclass(frozen=True)
class AssumptionReport:
    """Whether the blocks satisfy the bound hypotheses; warnings only."""

    ok: bool
    s: int
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class BoundReport:
    """A structural bound factor with its named composition.

    ``factor`` is exactly the product of the components whose keys start
    with ``factor.``, taken in insertion order; ``recompose`` reproduces
    it bit for bit.  Absolute constants are excluded throughout.
    """

    factor: float
    components: dict[str, float] = field(default_factory=dict)
    warnings: tuple[str, ...] = ()
    absolute_constant_excluded: bool = True

    def recompose(self) -> float:
        out = 1.0
        for key, value in self.components.items():
            if key.startswith("factor."):
                out *= value
        return out

    def to_json_dict(self) -> dict:
        return {
            "factor": self.factor,
            "components": dict(self.components),
            "warnings": list(self.warnings),
            "absolute_constant_excluded": self.absolute_constant_excluded,
        }


def _finish(components: dict[str, float], warnings: tuple[str, ...]) -> BoundReport:
    factor = 1.0
    for key, value in components.items():
        if key.startswith("factor."):
            factor *= value
    return BoundReport(factor=factor, components=components, warnings=warnings)


def _weight_ratio(blocks) -> float:
    ws = [b.weight for b in blocks]
    return max(ws) / min(ws)


def _beta(f: LatticeMeasure, g: LatticeMeasure, k: int) -> tuple[float, float]:
    plus = factorial_moment(f, k, "plus") + factorial_moment(g, k, "plus")
    minus = factorial_moment(f, k, "minus") + factorial_moment(g, k, "minus")
    return plus, minus


def check_assumptions(blocks: list[BlockSpec], s: int) -> AssumptionReport:
    """Verify the bound hypotheses: smoothness, enough total overlap per
    block, factorial moments matched through order s, finite order-(s+1)
    moment sums.  Violations become warnings, never hard failures."""
    s = int(s)
    if s < 1:
        raise ValueError("s must be >= 1")
    if not blocks:
        raise ValueError("need at least one block")
    warnings: list[str] = []
    for i, block in enumerate(blocks):
        us = block.pair_values(lambda f, g: smoothness_u(f, g))
        if min(us) <= 0.0:
            warnings.append(f"block {i}: some summand has zero shift overlap u")
        if sum(us) < 1.0:
            warnings.append(f"block {i}: total shift overlap below 1")

        def moment_gap(f, g):
            worst = 0.0
            for k in range(1, s + 1):
                for side in ("plus", "minus"):
                    gap = abs(
                        factorial_moment(f, k, side) - factorial_moment(g, k, side)
                    )
                    worst = max(worst, gap)
            return worst

        if max(block.pair_values(moment_gap)) > MOMENT_MATCH_TOL:
            warnings.append(
                f"block {i}: factorial moments not matched through order {s}"
            )
        betas = block.pair_values(lambda f, g: sum(_beta(f, g, s + 1)))
        if not all(math.isfinite(b) for b in betas):
            warnings.append(f"block {i}: order-{s + 1} moment sum not finite")
    return AssumptionReport(ok=not warnings, s=s, warnings=tuple(warnings))


def _independent_prefactor(
    blocks: list[BlockSpec], components: dict[str, float]
) -> None:
    components["factor.weight_ratio"] = _weight_ratio(blocks)
    u_total = 0.0
    variance_product = 1.0
    for i, block in enumerate(blocks):
        u_sum = float(sum(block.pair_values(lambda f, g: smoothness_u(f, g))))
        sigma2_sum = float(
            sum(
                block.pair_values(
                    lambda f, g: max(moments(f).variance, moments(g).variance)
                )
            )
        )
        u_total += u_sum
        variance_product *= 1.0 + sigma2_sum / u_sum
        components[f"block{i}.u_sum"] = u_sum
        components[f"block{i}.sigma2_sum"] = sigma2_sum
    components["factor.total_u_inv_sqrt"] = u_total**-0.5
    components["factor.variance_product"] = variance_product
    components["u_total"] = u_total


def bound_independent(blocks: list[BlockSpec], s: int) -> BoundReport:
    """Structural factor for independent, not necessarily identically
    distributed blocks with moments matched through order s:

    (max w/min w) (Sum u)^(-1/2) Prod_l(1 + Sum sigma^2/Sum u)
    x Sum_i Sum_j beta_{s+1}(F_ij, G_ij) (Sum_k u_ik)^(-s/2).
    """
    report = check_assumptions(blocks, s)
    components: dict[str, float] = {}
    _independent_prefactor(blocks, components)
    beta_term = 0.0
    for i, block in enumerate(blocks):
        u_sum = components[f"block{i}.u_sum"]
        betas = block.pair_values(lambda f, g: sum(_beta(f, g, s + 1)))
        block_beta = float(sum(betas))
        beta_term += block_beta * u_sum ** (-s / 2.0)
        components[f"block{i}.beta{s + 1}"] = block_beta
    components["factor.beta_term"] = beta_term
    return _finish(components, report.warnings)


def bound_independent_sym(blocks: list[BlockSpec], s: int) -> BoundReport:
    """Even-s refinement of bound_independent: the order-(s+1) term enters
    through |beta+ - beta-| and the symmetric part is pushed to order s+2
    with an extra (Sum u)^(-1/2) damping."""
    s = int(s)
    if s % 2 != 0:
        raise OddSError("the symmetric refinement needs even s")
    report = check_assumptions(blocks, s)
    components: dict[str, float] = {}
    _independent_prefactor(blocks, components)
    sym_term = 0.0
    for i, block in enumerate(blocks):
        u_sum = components[f"block{i}.u_sum"]
        betas1 = block.pair_values(lambda f, g: _beta(f, g, s + 1))
        betas2 = block.pair_values(lambda f, g: _beta(f, g, s + 2))
        skew = float(sum(abs(bp - bm) for bp, bm in betas1))
        correction = float(
            sum(b2p + b2m for b2p, b2m in betas2)
            + sum(bm for _, bm in betas1)
        )
        sym_term += u_sum ** (-s / 2.0) * (skew + correction * u_sum**-0.5)
        components[f"block{i}.beta{s + 1}_skew"] = skew
        components[f"block{i}.beta{s + 2}_correction"] = correction
    components["factor.sym_term"] = sym_term
    return _finish(components, report.warnings)


def bound_iid(blocks: list[BlockSpec], s: int) -> BoundReport:
    """Structural factor for iid-within-block inputs (no variance product):

    (max w/min w) (Sum n_i u_i)^(-1/2)
    x Sum_i beta_{s+1}(F_i, G_i) / (n_i^(s/2-1) u_i^(s/2)).
    """
    for i, block in enumerate(blocks):
        if not block.is_iid:
            raise ValueError(f"block {i} is not iid; use bound_independent")
    report = check_assumptions(blocks, s)
    components: dict[str, float] = {"factor.weight_ratio": _weight_ratio(blocks)}
    u_total = 0.0
    for i, block in enumerate(blocks):
        u = smoothness_u(block.f, block.g)
        u_total += block.n * u
        components[f"block{i}.u"] = u
        components[f"block{i}.n"] = float(block.n)
    components["factor.weighted_u_inv_sqrt"] = u_total**-0.5
    beta_term = 0.0
    for i, block in enumerate(blocks):
        u = components[f"block{i}.u"]
        bp, bm = _beta(block.f, block.g, s + 1)
        beta_term += (bp + bm) / (block.n ** (s / 2.0 - 1.0) * u ** (s / 2.0))
        components[f"block{i}.beta{s + 1}"] = bp + bm
    components["factor.beta_term"] = beta_term
    components["u_total"] = u_total
    return _finish(components, report.warnings)


def _r_log_inv_p_from_moments(nu1: float, nu2: float) -> float:
    """Factorial-moment route to r*ln(1/p_tilde) for a block sum with
    first two factorial moments nu1, nu2 (overdispersion required)."""
    excess = nu2 - nu1**2
    if excess <= 0.0 or nu1 <= 0.0:
        raise ValueError("factorial-moment route needs nu2 > nu1^2 > 0")
    return nu1**2 / excess * math.log((excess + nu1) / nu1)


def bound_nb(blocks: list[BlockSpec]) -> BoundReport:
    """Structural factor for matched negative binomial targets.

    Each block must be iid with nonnegative summand support and
    overdispersed block sums.  The factor is

    (max w/min w) (Sum n_k u~_k)^(-1/2)
    x Sum_k [nu3 + nu1 nu2 + nu1^3 + (nu2 - nu1^2)^2/nu1](F_k) / u~_k,

    with u~_k = 1 - max(||(d1 - d0) F_k||, (r_k ln(1/p~_k))^(-1/2)) / 2.
    The r_k ln(1/p~_k) quantity is reported along both routes: directly
    from the matched (r_k, p~_k) and from the block-sum factorial moments.
    """
    for i, block in enumerate(blocks):
        if not block.is_iid:
            raise ValueError(f"block {i} is not iid")
        if block.f.support.size and block.f.support[0] < 0:
            raise ValueError(f"block {i}: summands must be nonnegative")
    components: dict[str, float] = {"factor.weight_ratio": _weight_ratio(blocks)}
    warnings: list[str] = []
    u_tildes = []
    for i, block in enumerate(blocks):
        summary = moments(block.f)
        block_mean = block.n * summary.mean
        block_var = block.n * summary.variance
        params = nb_match(block_mean, block_var)
        r_log_direct = params.r * math.log(1.0 / params.p_tilde)
        nu1_s = block_mean
        nu2_s = block_var + block_mean**2 - block_mean
        r_log_moments = _r_log_inv_p_from_moments(nu1_s, nu2_s)
        shift_norm = tv_norm(convolve(block.f, delta(1) - delta(0)))
        u_tilde = 1.0 - 0.5 * max(shift_norm, r_log_direct**-0.5)
        if u_tilde <= 0.0:
            warnings.append(f"block {i}: nonpositive smoothed overlap u~")
        u_tildes.append(u_tilde)
        components[f"block{i}.r"] = params.r
        components[f"block{i}.p_tilde"] = params.p_tilde
        components[f"block{i}.r_log_direct"] = r_log_direct
        components[f"block{i}.r_log_moments"] = r_log_moments
        components[f"block{i}.u_tilde"] = u_tilde
        components[f"block{i}.n"] = float(block.n)
    total = sum(b.n * ut for b, ut in zip(blocks, u_tildes))
    components["factor.weighted_u_inv_sqrt"] = total**-0.5
    bracket_term = 0.0
    for i, block in enumerate(blocks):
        nu1 = factorial_moment(block.f, 1, "plus")
        nu2 = factorial_moment(block.f, 2, "plus")
        nu3 = factorial_moment(block.f, 3, "plus")
        bracket = nu3 + nu1 * nu2 + nu1**3 + (nu2 - nu1**2) ** 2 / nu1
        bracket_term += bracket / u_tildes[i]
        components[f"block{i}.bracket"] = bracket
    components["factor.bracket_term"] = bracket_term
    components["u_total"] = float(total)
    return _finish(components, tuple(warnings))


def bound_markov(
    pairs: list[tuple[MBParams, float]], k0: int = 2
) -> BoundReport:
    """Structural factor for weighted sums of Markov Binomial blocks:

    (max w/min w) x Sum_i q_bar_i (p_i + q_bar_i)
    / sqrt(Sum_k max(n_k q_bar_k, 1)).

    Regime violations (see cond1_check) are carried as warnings.
    """
    if not pairs:
        raise ValueError("need at least one block")
    warnings: list[str] = []
    weights = [w for _, w in pairs]
    if min(weights) <= 0.0:
        raise ValueError("weights must be positive")
    components: dict[str, float] = {
        "factor.weight_ratio": max(weights) / min(weights)
    }
    switch_sum = 0.0
    horizon_total = 0.0
    for i, (params, _) in enumerate(pairs):
        report = cond1_check(params, k0)
        if not report.ok:
            failed = sorted(k for k, v in report.clauses.items() if not v)
            warnings.append(f"block {i}: regime clauses failed: {', '.join(failed)}")
        switch_sum += params.q_bar * (params.p + params.q_bar)
        horizon_total += max(params.n * params.q_bar, 1.0)
        components[f"block{i}.gamma"] = (
            params.q * params.q_bar / (params.q + params.q_bar)
        )
        components[f"block{i}.q_bar"] = params.q_bar
        components[f"block{i}.n"] = float(params.n)
    components["factor.switch_sum"] = switch_sum
    components["factor.horizon_inv_sqrt"] = horizon_total**-0.5
    components["horizon_total"] = horizon_total
    return _finish(components, tuple(warnings))


def _require_matched(f: LatticeMeasure, g: LatticeMeasure, s: int) -> None:
    for k in range(1, s + 1):
        for side in ("plus", "minus"):
            gap = abs(factorial_moment(f, k, side) - factorial_moment(g, k, side))
            if gap > MOMENT_MATCH_TOL:
                raise MomentMismatchError(
                    f"order-{k} {side} factorial moments differ by {gap:.3e}"
                )


def lemma_fg_gap(
    f: LatticeMeasure, g: LatticeMeasure, s: int
) -> tuple[float, float]:
    """Total-variation gap of a moment-matched pair and its structural cap.

    With factorial moments matched through order s, ||F - G|| is at most
    beta_{s+1} 2^(s+1)/(s+1)! where beta_{s+1} sums the order-(s+1)
    moments of both measures and both tails.  Returns (gap, cap) and
    raises if the cap is violated (it cannot be unless inputs lie about
    moment matching beyond tolerance).
    """
    s = int(s)
    if s < 1:
        raise ValueError("s must be >= 1")
    _require_matched(f, g, s)
    gap = tv_norm(f - g)
    bp, bm = _beta(f, g, s + 1)
    cap = (bp + bm) * 2.0 ** (s + 1) / math.factorial(s + 1)
    if gap > cap * (1.0 + 1e-12) + 1e-15:
        raise ArithmeticError(
            f"moment-matched gap {gap} exceeded its structural cap {cap}"
        )
    return gap, cap


def lemma_fg_gap_sym(
    f: LatticeMeasure, g: LatticeMeasure, s: int
) -> tuple[float, float]:
    """Even-s refinement: subtract the explicit skew term from F - G and
    cap the residual.

    The residual is F - G - (beta+ - beta-)_{s+1}/(s+1)! (d1 - d0)^(s+1);
    its cap [beta_{s+2} total + beta-_{s+1}] 2^(s+2) uses an unspecified
    order-dependent constant taken as 1, so treat it as a heuristic
    envelope (empirically slack by orders of magnitude).  Returns
    (residual_tv, cap).
    """
    s = int(s)
    if s < 1:
        raise ValueError("s must be >= 1")
    if s % 2 != 0:
        raise OddSError("the symmetric refinement needs even s")
    _require_matched(f, g, s)
    bp1, bm1 = _beta(f, g, s + 1)
    step = delta(1) - delta(0)
    leading = ((bp1 - bm1) / math.factorial(s + 1)) * power(step, s + 1)
    residual = (f - g) - leading
    bp2, bm2 = _beta(f, g, s + 2)
    cap = (bp2 + bm2 + bm1) * 2.0 ** (s + 2)
    return tv_norm(residual), cap

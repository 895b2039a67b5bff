"""Markov Binomial distribution: exact pmf, regime checks, simulation.

The chain lives on {0, 1}: from state 1 it stays with probability ``p`` and
leaves with ``q = 1 - p``; from state 0 it switches on with probability
``q_bar`` and stays with ``p_bar = 1 - q_bar``.  The chain starts at 0, and
the statistic is the number of time steps among 1..n spent in state 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import LatticeMeasure

__all__ = ["MBParams", "Cond1Report", "mb_pmf", "cond1_check", "mb_simulate"]


@dataclass(frozen=True)
class MBParams:
    """Chain parameters: stay probability p, switch-on probability q_bar, horizon n."""

    p: float
    q_bar: float
    n: int

    def __post_init__(self) -> None:
        if not (0.0 <= self.p < 1.0):
            raise ValueError("p must lie in [0, 1)")
        if not (0.0 < self.q_bar <= 1.0):
            raise ValueError("q_bar must lie in (0, 1]")
        if int(self.n) < 1:
            raise ValueError("n must be >= 1")
        object.__setattr__(self, "n", int(self.n))

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def p_bar(self) -> float:
        return 1.0 - self.q_bar


@dataclass(frozen=True)
class Cond1Report:
    """Outcome of the small-switching regime check at exponent k0."""

    ok: bool
    k0: int
    clauses: dict[str, bool]

    @property
    def satisfied(self) -> bool:
        return self.ok

    @property
    def violated_clauses(self) -> list[str]:
        return [name for name, held in self.clauses.items() if not held]


def mb_pmf(params: MBParams) -> LatticeMeasure:
    """Exact pmf of the occupation count via dynamic programming.

    State arrays f0[k], f1[k] hold the probability of k successes so far with
    the chain currently in state 0 resp. 1.  One time step costs O(n) and the
    whole table O(n^2).
    """
    n, p, q, q_bar, p_bar = params.n, params.p, params.q, params.q_bar, params.p_bar
    f0 = np.zeros(n + 1)
    f1 = np.zeros(n + 1)
    f0[0] = 1.0
    for _ in range(n):
        new1 = np.empty(n + 1)
        new1[0] = 0.0
        new1[1:] = f1[:-1] * p + f0[:-1] * q_bar
        new0 = f1 * q + f0 * p_bar
        f0, f1 = new0, new1
    return LatticeMeasure(np.arange(n + 1, dtype=np.int64), f0 + f1)


def cond1_check(params: MBParams, k0: int = 2, w: float = 1.0) -> Cond1Report:
    """Check the regime under which the signed approximant bound is stated.

    Clauses: 0 < p <= 1/2, q_bar <= 1/30, q_bar >= n^(-k0) so the
    switch-on rate is not vanishingly small relative to the horizon,
    and a positive block weight.
    """
    k0 = int(k0)
    if k0 < 2:
        raise ValueError("k0 must be >= 2")
    clauses = {
        "p_in_range": 0.0 < params.p <= 0.5,
        "q_bar_small": params.q_bar <= 1.0 / 30.0,
        "q_bar_not_tiny": params.q_bar >= params.n ** (-float(k0)),
        "weight_positive": w > 0.0,
    }
    return Cond1Report(ok=all(clauses.values()), k0=k0, clauses=clauses)


def mb_simulate(
    params: MBParams, draws: int, seed: int | np.random.Generator
) -> LatticeMeasure:
    """Empirical occupation-count law from ``draws`` independent chain runs.

    ``seed`` is an integer (deterministic per value) or a ready Generator.
    """
    draws = int(draws)
    if draws < 1:
        raise ValueError("draws must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    state = np.zeros(draws, dtype=bool)
    counts = np.zeros(draws, dtype=np.int64)
    for _ in range(params.n):
        u = rng.random(draws)
        state = np.where(state, u < params.p, u < params.q_bar)
        counts += state
    freq = np.bincount(counts, minlength=params.n + 1) / float(draws)
    return LatticeMeasure(np.arange(params.n + 1, dtype=np.int64), freq)

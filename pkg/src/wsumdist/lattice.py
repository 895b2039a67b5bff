"""Finite signed measures on the integer lattice.

The carrier type for everything in this package is a finite signed measure
stored sparsely as a sorted support array plus a mass array.  Operations are
pure functions that return new measures.  Convolution-type operations trim
atoms whose magnitude falls below a relative threshold, and the removed mass
(together with any series-truncation tails) accumulates in an
``error_budget`` carried by each measure.  The budget is a first-order bound
on the total-variation gap between the stored measure and the untruncated
value it stands for, so callers can reason about tolerances explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np

__all__ = [
    "LatticeMeasure",
    "MomentSummary",
    "TRIM_RELATIVE",
    "PROBABILITY_MASS_TOL",
    "delta",
    "from_entries",
    "convolve",
    "power",
    "exp_measure",
    "tv_norm",
    "kolmogorov_norm",
    "char_fn",
    "factorial_moment",
    "moments",
    "signed_moments",
    "smoothness_u",
    "concentration",
]

# Atoms below TRIM_RELATIVE * tv_norm are dropped (and accounted for) when a
# measure is canonicalised after convolution-type operations.
TRIM_RELATIVE = 1e-16

# Slack on |total mass - 1| for the probability flag, on top of the measure's
# own error budget.  Bare float noise lives here; accountable truncation
# (tail cuts in approximant constructors) lives in the budget.
PROBABILITY_MASS_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class LatticeMeasure:
    """Finite signed measure on the integers.

    ``support`` is strictly increasing, ``masses`` is the same length, and
    neither contains stored zeros.  Instances are immutable; build them with
    :func:`delta` or :func:`from_entries` rather than by hand.
    """

    support: np.ndarray
    masses: np.ndarray
    error_budget: float = 0.0

    def __post_init__(self) -> None:
        s = np.array(self.support, dtype=np.int64)
        m = np.array(self.masses, dtype=np.float64)
        if s.ndim != 1 or m.ndim != 1 or s.size != m.size:
            raise ValueError("support and masses must be 1-d arrays of equal length")
        if s.size > 1 and not np.all(s[1:] > s[:-1]):
            raise ValueError("support must be strictly increasing")
        if self.error_budget < 0.0 or not math.isfinite(self.error_budget):
            raise ValueError("error budget must be finite and nonnegative")
        s.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "support", s)
        object.__setattr__(self, "masses", m)

    # -- basic views ---------------------------------------------------

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    @property
    def tv(self) -> float:
        return float(np.abs(self.masses).sum())

    @property
    def is_probability(self) -> bool:
        """All masses nonnegative and total mass 1 within tolerance.

        The tolerance is ``PROBABILITY_MASS_TOL`` plus the measure's own
        error budget, so a pmf whose tail was cut by a constructor still
        counts as a probability distribution.
        """
        if self.support.size == 0:
            return False
        if np.any(self.masses < 0.0):
            return False
        return abs(self.total_mass - 1.0) <= PROBABILITY_MASS_TOL + self.error_budget

    def mass_at(self, k: int) -> float:
        i = int(np.searchsorted(self.support, k))
        if i < self.support.size and self.support[i] == k:
            return float(self.masses[i])
        return 0.0

    def entries(self) -> Iterator[tuple[int, float]]:
        for k, m in zip(self.support.tolist(), self.masses.tolist()):
            yield k, m

    def as_dict(self) -> dict[int, float]:
        return dict(self.entries())

    def to_json_dict(self) -> dict:
        return {"entries": [[k, m] for k, m in self.entries()]}

    def __len__(self) -> int:
        return int(self.support.size)

    def __repr__(self) -> str:
        n = self.support.size
        if n == 0:
            return "LatticeMeasure(zero)"
        return (
            f"LatticeMeasure({n} atoms on [{self.support[0]}, {self.support[-1]}], "
            f"mass={self.total_mass:.6g}, tv={self.tv:.6g})"
        )

    # -- linear algebra ------------------------------------------------

    def __add__(self, other: "LatticeMeasure") -> "LatticeMeasure":
        if not isinstance(other, LatticeMeasure):
            return NotImplemented
        return _canonical(
            np.concatenate([self.support, other.support]),
            np.concatenate([self.masses, other.masses]),
            self.error_budget + other.error_budget,
        )

    def __sub__(self, other: "LatticeMeasure") -> "LatticeMeasure":
        if not isinstance(other, LatticeMeasure):
            return NotImplemented
        return self + (-1.0) * other

    def __neg__(self) -> "LatticeMeasure":
        return (-1.0) * self

    def __mul__(self, c: float) -> "LatticeMeasure":
        if not isinstance(c, (int, float, np.integer, np.floating)):
            return NotImplemented
        c = float(c)
        return _canonical(self.support, self.masses * c, abs(c) * self.error_budget)

    __rmul__ = __mul__


@dataclass(frozen=True)
class MomentSummary:
    """First two moments of a distribution on the integers."""

    mean: float
    variance: float


def _canonical(
    support: np.ndarray, masses: np.ndarray, budget: float
) -> LatticeMeasure:
    """Sort, merge duplicate atoms, trim negligible ones, account the trim."""
    support = np.asarray(support, dtype=np.int64).ravel()
    masses = np.asarray(masses, dtype=np.float64).ravel()
    if support.size:
        order = np.argsort(support, kind="stable")
        support = support[order]
        masses = masses[order]
        if support.size > 1 and np.any(support[1:] == support[:-1]):
            uniq, inverse = np.unique(support, return_inverse=True)
            merged = np.zeros(uniq.size, dtype=np.float64)
            np.add.at(merged, inverse, masses)
            support, masses = uniq, merged
        tv = float(np.abs(masses).sum())
        keep = (np.abs(masses) >= TRIM_RELATIVE * tv) & (masses != 0.0)
        if not np.all(keep):
            budget += float(np.abs(masses[~keep]).sum())
            support = support[keep]
            masses = masses[keep]
    return LatticeMeasure(support, masses, budget)


def _with_budget(m: LatticeMeasure, extra: float) -> LatticeMeasure:
    if extra == 0.0:
        return m
    return LatticeMeasure(m.support, m.masses, m.error_budget + extra)


# -- constructors -------------------------------------------------------


def delta(a: int) -> LatticeMeasure:
    """Unit point mass at the integer ``a``."""
    a = int(a)
    return LatticeMeasure(np.array([a]), np.array([1.0]))


def from_entries(
    entries: Mapping[int, float] | Iterable[tuple[int, float]],
    error_budget: float = 0.0,
) -> LatticeMeasure:
    """Measure from a ``{point: mass}`` mapping or ``(point, mass)`` pairs."""
    if isinstance(entries, Mapping):
        pairs = list(entries.items())
    else:
        pairs = list(entries)
    if not pairs:
        return LatticeMeasure(np.array([], dtype=np.int64), np.array([]), error_budget)
    pts = np.array([int(k) for k, _ in pairs], dtype=np.int64)
    ms = np.array([float(v) for _, v in pairs], dtype=np.float64)
    return _canonical(pts, ms, error_budget)


def from_json_dict(payload: Mapping) -> LatticeMeasure:
    return from_entries([(int(k), float(m)) for k, m in payload["entries"]])


# -- convolution algebra -------------------------------------------------


def convolve(a: LatticeMeasure, b: LatticeMeasure) -> LatticeMeasure:
    """Convolution ``a * b``; the law of a sum of independent variables.

    Runs dense over the joint span when that is no larger than the sparse
    pair count, sparse otherwise, so point masses far from the origin do not
    force huge intermediate arrays.
    """
    budget = (
        a.error_budget * b.tv
        + b.error_budget * a.tv
        + a.error_budget * b.error_budget
    )
    if a.support.size == 0 or b.support.size == 0:
        return LatticeMeasure(np.array([], dtype=np.int64), np.array([]), budget)
    span_a = int(a.support[-1] - a.support[0]) + 1
    span_b = int(b.support[-1] - b.support[0]) + 1
    dense_len = span_a + span_b - 1
    pair_count = a.support.size * b.support.size
    if dense_len <= 2 * pair_count + 4096:
        fa = np.zeros(span_a)
        fa[a.support - a.support[0]] = a.masses
        fb = np.zeros(span_b)
        fb[b.support - b.support[0]] = b.masses
        out = np.convolve(fa, fb)
        offset = int(a.support[0] + b.support[0])
        pts = np.arange(offset, offset + dense_len, dtype=np.int64)
        return _canonical(pts, out, budget)
    pts = (a.support[:, None] + b.support[None, :]).ravel()
    ms = (a.masses[:, None] * b.masses[None, :]).ravel()
    return _canonical(pts, ms, budget)


def power(a: LatticeMeasure, n: int) -> LatticeMeasure:
    """n-fold convolution power via binary exponentiation; ``n = 0`` is delta(0)."""
    n = int(n)
    if n < 0:
        raise ValueError("convolution power requires n >= 0")
    result: LatticeMeasure | None = None
    base = a
    while n:
        if n & 1:
            result = base if result is None else convolve(result, base)
        n >>= 1
        if n:
            base = convolve(base, base)
    return delta(0) if result is None else result


def exp_measure(m: LatticeMeasure, tail_tol: float = 1e-10) -> LatticeMeasure:
    """Exponential ``exp{m} = sum_k m^k / k!`` in the convolution algebra.

    The series is cut at the smallest K whose factorial tail bound
    ``sum_{k>K} tv(m)^k / k!`` is below ``tail_tol``; the realised bound is
    added to the result's error budget.  Arguments with tv norm above 1 are
    halved (exactly, by powers of two) until the series is well conditioned
    and the result is squared back up, which keeps float cancellation out of
    the partial sums; the squaring steps propagate budgets like any other
    convolution.
    """
    if tail_tol <= 0.0:
        raise ValueError("tail_tol must be positive")
    nrm = m.tv
    if nrm == 0.0:
        return _with_budget(delta(0), m.error_budget)
    halvings = max(0, math.ceil(math.log2(nrm)))
    if halvings == 0:
        return _exp_series(m, tail_tol)
    stage_tol = tail_tol / 4.0 ** (halvings + 1)
    out = _exp_series(m * (0.5**halvings), stage_tol)
    for _ in range(halvings):
        out = convolve(out, out)
    return out


def _exp_series(m: LatticeMeasure, tail_tol: float) -> LatticeMeasure:
    nrm = m.tv
    term_norm = 1.0
    cutoff = 0
    while True:
        next_norm = term_norm * nrm / (cutoff + 1)
        if cutoff + 2 > nrm:
            tail_bound = next_norm / (1.0 - nrm / (cutoff + 2))
            if tail_bound <= tail_tol:
                break
        term_norm = next_norm
        cutoff += 1
        if cutoff > 10_000:
            raise RuntimeError("exponential series failed to converge")
    acc = delta(0)
    term = delta(0)
    for k in range(1, cutoff + 1):
        term = convolve(term, m) * (1.0 / k)
        acc = acc + term
    return _with_budget(acc, tail_bound)


# -- norms and transforms -------------------------------------------------


def tv_norm(m: LatticeMeasure) -> float:
    """Total variation norm: sum of absolute atom masses."""
    return m.tv


def kolmogorov_norm(m: LatticeMeasure) -> float:
    """Uniform norm of the cumulative function: max |m((-inf, x])|."""
    if m.support.size == 0:
        return 0.0
    return float(np.max(np.abs(np.cumsum(m.masses))))


def char_fn(
    m: LatticeMeasure,
    t: float | np.ndarray,
    center: float = 0.0,
    order: int = 0,
):
    """Fourier transform of ``m`` recentred at ``center``.

    order 0 returns ``sum_k exp(i t (k - center)) m{k}``; order 1 returns its
    derivative in ``t``.  ``t`` may be a scalar or an array.
    """
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    t_arr = np.asarray(t, dtype=np.float64)
    shifted = m.support.astype(np.float64) - center
    phase = np.exp(1j * np.multiply.outer(t_arr, shifted))
    if order == 1:
        phase = phase * (1j * shifted)
    out = phase @ m.masses
    if np.isscalar(t) or t_arr.ndim == 0:
        return complex(out)
    return out


# -- moment functionals ---------------------------------------------------


def factorial_moment(f: LatticeMeasure, k: int, side: str = "plus") -> float:
    """One-sided factorial moment of order ``k``.

    ``side="plus"`` sums ``m (m-1) ... (m-k+1) f{m}`` over ``m >= k``;
    ``side="minus"`` does the same over the left tail using ``f{-m}``.
    """
    k = int(k)
    if k < 1:
        raise ValueError("factorial moment order must be >= 1")
    if side == "plus":
        sel = f.support >= k
        pts = f.support[sel].astype(np.float64)
    elif side == "minus":
        sel = f.support <= -k
        pts = (-f.support[sel]).astype(np.float64)
    else:
        raise ValueError("side must be 'plus' or 'minus'")
    weights = np.ones_like(pts)
    for j in range(k):
        weights *= pts - j
    return float(weights @ f.masses[sel])


def _require_probability(f: LatticeMeasure, what: str) -> None:
    if not f.is_probability:
        raise ValueError(f"{what} requires a probability distribution")


def moments(f: LatticeMeasure) -> MomentSummary:
    """Mean and variance of a probability distribution."""
    _require_probability(f, "moments")
    return signed_moments(f)


def signed_moments(m: LatticeMeasure) -> MomentSummary:
    """Mean and variance forms with no probability validation.

    For signed measures of total mass near 1 these are the raw first and
    second centred moment sums; the variance can come out negative.
    """
    pts = m.support.astype(np.float64)
    mean = float(pts @ m.masses)
    variance = float(((pts - mean) ** 2) @ m.masses)
    return MomentSummary(mean=mean, variance=variance)


def smoothness_u(f: LatticeMeasure, g: LatticeMeasure | None = None) -> float:
    """Lattice smoothness: overlap of a distribution with its unit shift.

    For one argument this is ``sum_k min(f{k}, f{k-1})``, equivalently
    ``1 - tv(f * (delta(1) - delta(0))) / 2``.  With two arguments the
    smaller of the two values is returned.
    """
    _require_probability(f, "smoothness_u")
    if g is not None:
        _require_probability(g, "smoothness_u")
        return min(_shift_overlap(f), _shift_overlap(g))
    return _shift_overlap(f)


def _shift_overlap(f: LatticeMeasure) -> float:
    here = f.masses
    idx = np.searchsorted(f.support, f.support - 1)
    idx = np.clip(idx, 0, max(f.support.size - 1, 0))
    below = np.where(f.support[idx] == f.support - 1, f.masses[idx], 0.0)
    return float(np.minimum(here, below).sum())


def _shift_route(f: LatticeMeasure) -> float:
    """Smoothness via the shift-difference norm; cross-check route."""
    diff = convolve(f, delta(1) - delta(0))
    return 1.0 - 0.5 * tv_norm(diff)


def concentration(f: LatticeMeasure, h: float) -> float:
    """Maximal probability of a closed window ``[x, x + h]``.

    The supremum is attained with the window's left end on a support point,
    so only those positions are scanned.  On the integer lattice a window of
    length ``h`` covers ``floor(h) + 1`` consecutive points.
    """
    _require_probability(f, "concentration")
    if not (h >= 0.0):
        raise ValueError("window length h must be nonnegative")
    width = int(math.floor(h + 1e-12))
    cum = np.cumsum(f.masses)
    right = np.searchsorted(f.support, f.support + width, side="right") - 1
    below_left = np.concatenate([[0.0], cum[:-1]])
    return float(np.max(cum[right] - below_left))

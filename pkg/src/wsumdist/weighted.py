"""Measures on weighted integer combinations of several lattices.

A weight basis fixes positive reals ``w_1, ..., w_N``; support points are
integer coefficient vectors ``(c_1, ..., c_N)`` standing for the real value
``sum_i c_i w_i``.  Coefficients are stored exactly, so convolution never
loses support identity to float rounding.  Only when a cumulative function
is evaluated (Kolmogorov distance, concentration) are nearby real values
merged, with a tolerance proportional to the largest value in play.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .lattice import LatticeMeasure, PROBABILITY_MASS_TOL, power

__all__ = [
    "WeightBasis",
    "SupportPoint",
    "WeightedMeasure",
    "ResourceLimitError",
    "SUPPORT_LIMIT",
    "MERGE_TOL_SCALE",
    "lift",
    "wconvolve",
    "weighted_sum_distribution",
    "wkolmogorov_distance",
    "wconcentration",
]

# A result exceeding this many support points aborts with ResourceLimitError
# instead of exhausting memory.
SUPPORT_LIMIT = 10**7

# Two support points share a CDF location iff their real values differ by at
# most MERGE_TOL_SCALE * (1 + max |value|).
MERGE_TOL_SCALE = 1e-9


class ResourceLimitError(RuntimeError):
    """Raised when a weighted support would exceed SUPPORT_LIMIT points."""


@dataclass(frozen=True)
class WeightBasis:
    """Ordered positive weights defining the value map of coefficient vectors."""

    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        ws = tuple(float(w) for w in self.weights)
        if len(ws) < 1:
            raise ValueError("weight basis needs at least one weight")
        if any(not (w > 0.0) or not math.isfinite(w) for w in ws):
            raise ValueError("weights must be finite and positive")
        object.__setattr__(self, "weights", ws)

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def ratio(self) -> float:
        """max weight / min weight; enters every weighted bound factor."""
        return max(self.weights) / min(self.weights)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=np.float64)


@dataclass(frozen=True)
class SupportPoint:
    """Exact support point: integer coefficients over a weight basis."""

    coeffs: tuple[int, ...]

    def value(self, basis: WeightBasis) -> float:
        if len(self.coeffs) != basis.size:
            raise ValueError("coefficient length does not match basis size")
        return float(np.dot(self.coeffs, basis.as_array()))


@dataclass(frozen=True, eq=False)
class WeightedMeasure:
    """Finite signed measure whose atoms sit at weighted integer combinations.

    ``coeffs`` has one row per atom (lexicographically sorted, unique);
    ``masses`` is aligned with it.  Construct via :func:`lift` or
    :meth:`from_entries`.
    """

    basis: WeightBasis
    coeffs: np.ndarray
    masses: np.ndarray
    error_budget: float = 0.0

    def __post_init__(self) -> None:
        c = np.array(self.coeffs, dtype=np.int64)
        m = np.array(self.masses, dtype=np.float64)
        if c.ndim != 2 or c.shape[1] != self.basis.size or c.shape[0] != m.size:
            raise ValueError("coefficient matrix shape does not match basis/masses")
        c.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "masses", m)

    @classmethod
    def from_entries(
        cls,
        basis: WeightBasis,
        entries: Iterable[tuple[Sequence[int], float]],
        error_budget: float = 0.0,
    ) -> "WeightedMeasure":
        pairs = list(entries)
        if not pairs:
            return cls(
                basis,
                np.zeros((0, basis.size), dtype=np.int64),
                np.array([]),
                error_budget,
            )
        coeffs = np.array([list(c) for c, _ in pairs], dtype=np.int64)
        masses = np.array([m for _, m in pairs], dtype=np.float64)
        return _wcanonical(basis, coeffs, masses, error_budget)

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    @property
    def tv(self) -> float:
        return float(np.abs(self.masses).sum())

    @property
    def is_probability(self) -> bool:
        if self.masses.size == 0:
            return False
        if np.any(self.masses < 0.0):
            return False
        return abs(self.total_mass - 1.0) <= PROBABILITY_MASS_TOL + self.error_budget

    def values(self) -> np.ndarray:
        """Real positions of the atoms, in storage order."""
        return self.coeffs @ self.basis.as_array()

    def entries(self) -> Iterator[tuple[SupportPoint, float]]:
        for row, m in zip(self.coeffs.tolist(), self.masses.tolist()):
            yield SupportPoint(tuple(row)), m

    def to_json_dict(self) -> dict:
        return {
            "weights": list(self.basis.weights),
            "entries": [[row, m] for row, m in zip(self.coeffs.tolist(), self.masses.tolist())],
        }

    def __len__(self) -> int:
        return int(self.masses.size)

    def __repr__(self) -> str:
        return (
            f"WeightedMeasure({self.masses.size} atoms over weights "
            f"{self.basis.weights}, mass={self.total_mass:.6g})"
        )


def _wcanonical(
    basis: WeightBasis, coeffs: np.ndarray, masses: np.ndarray, budget: float
) -> WeightedMeasure:
    """Merge exactly equal coefficient rows and drop exact-zero masses."""
    if coeffs.shape[0] > SUPPORT_LIMIT:
        raise ResourceLimitError(
            f"weighted support would hold {coeffs.shape[0]} points "
            f"(limit {SUPPORT_LIMIT})"
        )
    if coeffs.shape[0]:
        uniq, inverse = np.unique(coeffs, axis=0, return_inverse=True)
        merged = np.zeros(uniq.shape[0], dtype=np.float64)
        np.add.at(merged, inverse.ravel(), masses)
        keep = merged != 0.0
        coeffs, masses = uniq[keep], merged[keep]
    return WeightedMeasure(basis, coeffs, masses, budget)


def lift(f: LatticeMeasure, index: int, basis: WeightBasis) -> WeightedMeasure:
    """Embed a lattice measure along weight ``index`` (1-based) of ``basis``."""
    index = int(index)
    if not 1 <= index <= basis.size:
        raise IndexError(f"weight index {index} out of range 1..{basis.size}")
    coeffs = np.zeros((f.support.size, basis.size), dtype=np.int64)
    coeffs[:, index - 1] = f.support
    return WeightedMeasure(basis, coeffs, f.masses.copy(), f.error_budget)


def wconvolve(a: WeightedMeasure, b: WeightedMeasure) -> WeightedMeasure:
    """Convolution of weighted measures over a shared basis (exact on coefficients)."""
    if a.basis.weights != b.basis.weights:
        raise ValueError("weighted convolution requires a common basis")
    budget = (
        a.error_budget * b.tv
        + b.error_budget * a.tv
        + a.error_budget * b.error_budget
    )
    if a.masses.size == 0 or b.masses.size == 0:
        return WeightedMeasure.from_entries(a.basis, [], budget)
    pair_count = a.masses.size * b.masses.size
    if pair_count > SUPPORT_LIMIT:
        raise ResourceLimitError(
            f"weighted convolution would touch {pair_count} point pairs "
            f"(limit {SUPPORT_LIMIT})"
        )
    coeffs = (a.coeffs[:, None, :] + b.coeffs[None, :, :]).reshape(-1, a.basis.size)
    masses = (a.masses[:, None] * b.masses[None, :]).ravel()
    return _wcanonical(a.basis, coeffs, masses, budget)


def weighted_sum_distribution(
    components: Sequence[tuple[LatticeMeasure, int, int]],
    basis: WeightBasis,
) -> WeightedMeasure:
    """Law of ``sum_i w_{index_i} * S_i`` for independent block sums.

    Each component is ``(f, n, index)``: the summand law ``f`` (a probability
    distribution), the block count ``n >= 1``, and the 1-based weight index.
    """
    if not components:
        raise ValueError("need at least one component")
    acc: WeightedMeasure | None = None
    for f, n, index in components:
        if not f.is_probability:
            raise ValueError("component laws must be probability distributions")
        if int(n) < 1:
            raise ValueError("component count must be >= 1")
        term = lift(power(f, int(n)), index, basis)
        acc = term if acc is None else wconvolve(acc, term)
    assert acc is not None
    return acc


def _merge_tol(values: np.ndarray) -> float:
    top = float(np.max(np.abs(values))) if values.size else 0.0
    return MERGE_TOL_SCALE * (1.0 + top)


def wkolmogorov_distance(a: WeightedMeasure, b: WeightedMeasure) -> float:
    """Kolmogorov distance: sup over x of |(a - b)((-inf, x])|.

    Atom positions whose real values differ by at most the merge tolerance
    are treated as one CDF location (clustered by consecutive gaps).
    """
    if a.basis.weights != b.basis.weights:
        raise ValueError("Kolmogorov distance requires a common basis")
    values = np.concatenate([a.values(), b.values()])
    if values.size == 0:
        return 0.0
    masses = np.concatenate([a.masses, b.masses])
    from_a = np.concatenate(
        [np.ones(a.masses.size, dtype=bool), np.zeros(b.masses.size, dtype=bool)]
    )
    order = np.argsort(values, kind="stable")
    values = values[order]
    masses = masses[order]
    from_a = from_a[order]
    tol = _merge_tol(values)
    cluster_id = np.concatenate([[0], np.cumsum(values[1:] - values[:-1] > tol)])
    clusters = int(cluster_id[-1]) + 1
    # Each side's CDF is accumulated separately so the result is exactly
    # symmetric in (a, b): per-cluster sums see each measure's atoms in its
    # own stable order no matter how the union interleaves.
    cdf_a = np.cumsum(
        np.bincount(cluster_id[from_a], weights=masses[from_a], minlength=clusters)
    )
    cdf_b = np.cumsum(
        np.bincount(cluster_id[~from_a], weights=masses[~from_a], minlength=clusters)
    )
    return float(np.max(np.abs(cdf_a - cdf_b)))


def wconcentration(f: WeightedMeasure, h: float) -> float:
    """Maximal probability of a closed window ``[x, x + h]`` on the real line."""
    if not f.is_probability:
        raise ValueError("wconcentration requires a probability distribution")
    if not (h >= 0.0):
        raise ValueError("window length h must be nonnegative")
    values = f.values()
    order = np.argsort(values, kind="stable")
    values = values[order]
    masses = f.masses[order]
    tol = _merge_tol(values)
    cum = np.cumsum(masses)
    right = np.searchsorted(values, values + h + tol, side="right") - 1
    left = np.searchsorted(values, values - tol, side="left")
    below_left = np.concatenate([[0.0], cum])
    return float(np.max(cum[right] - below_left[left]))

"""Gaussian element pools and the equal-probability grouping of [-2, 2].

Distances to group centers and boundaries are measured in probability space,
``|Phi(v) - Phi(c)|``, so every group gets the same robustness margin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

LATENT_RANGE = 2.0


class InfeasibleParametersError(ValueError):
    pass


class ExtractionIntegrityError(RuntimeError):
    pass


def probit(p: float) -> float:
    """Inverse standard normal CDF."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"probit is defined on (0, 1), got {p}")
    return float(ndtri(p))


def phi(x):
    return ndtr(x)


@dataclass(frozen=True)
class GroupingSpec:
    K: int
    n: int
    boundaries: np.ndarray  # K + 1 values, -2 .. 2
    centers: np.ndarray  # K values
    mass: float  # probability of each part

    @property
    def prob_boundaries(self) -> np.ndarray:
        return ndtr(self.boundaries)

    @property
    def prob_centers(self) -> np.ndarray:
        return ndtr(self.centers)


def build_grouping(K: int, n: int) -> GroupingSpec:
    if K < 2:
        raise InfeasibleParametersError(f"need at least 2 groups, got K={K}")
    if n < 1:
        raise InfeasibleParametersError(f"need at least 1 element per group, got n={n}")
    lo, hi = float(ndtr(-LATENT_RANGE)), float(ndtr(LATENT_RANGE))
    mass = (hi - lo) / K
    probs = lo + mass * np.arange(K + 1)
    boundaries = ndtri(probs)
    boundaries[0], boundaries[-1] = -LATENT_RANGE, LATENT_RANGE
    centers = ndtri(lo + mass * (np.arange(K) + 0.5))
    for arr in (boundaries, centers):
        arr.setflags(write=False)
    return GroupingSpec(K=K, n=n, boundaries=boundaries, centers=centers, mass=mass)


def assign_group(v, spec: GroupingSpec):
    """0-based group index; interior boundaries belong to the upper group."""
    idx = np.searchsorted(spec.boundaries[1:-1], v, side="right")
    if np.ndim(idx) == 0:
        return int(idx)
    return idx


@dataclass(frozen=True)
class ElementPool:
    values: np.ndarray  # N_T samples, in draw order
    group_of: np.ndarray  # group index per sample
    chosen: np.ndarray  # (K, n) sample indices, nearest-to-center first in each row
    leftovers: np.ndarray  # unchosen sample indices, ascending

    @property
    def size(self) -> int:
        return len(self.values)


def expected_group_count(spec: GroupingSpec, n_total: int) -> float:
    return n_total * spec.mass


def check_feasible(spec: GroupingSpec, n_total: int) -> None:
    if spec.K * spec.n > n_total:
        raise InfeasibleParametersError(
            f"K*n = {spec.K * spec.n} exceeds latent dimension {n_total}"
        )
    expected = expected_group_count(spec, n_total)
    if expected < 2 * spec.n:
        raise InfeasibleParametersError(
            f"expected {expected:.1f} samples per group, need at least {2 * spec.n} "
            f"(K={spec.K}, n={spec.n}, N_T={n_total})"
        )


def center_distance(values: np.ndarray, groups: np.ndarray, spec: GroupingSpec) -> np.ndarray:
    return np.abs(ndtr(values) - spec.prob_centers[groups])


def boundary_margin(values: np.ndarray, groups: np.ndarray, spec: GroupingSpec) -> np.ndarray:
    """Probability distance to the nearest interior boundary of the own group.

    The outer edges at -2 and 2 are not counted: values beyond them stay in
    the end groups.
    """
    pb = spec.prob_boundaries
    p = ndtr(values)
    lower = np.where(groups > 0, p - pb[groups], np.inf)
    upper = np.where(groups < spec.K - 1, pb[groups + 1] - p, np.inf)
    return np.minimum(lower, upper)


def sample_pool(spec: GroupingSpec, n_total: int, seed: int) -> ElementPool:
    check_feasible(spec, n_total)
    rng = np.random.default_rng(seed)
    values = rng.standard_normal(n_total)
    values.setflags(write=False)
    return choose_elements(values, spec)


def choose_elements(values: np.ndarray, spec: GroupingSpec) -> ElementPool:
    groups = assign_group(values, spec)
    # Out-of-range samples get an infinite distance so they are never chosen.
    dist = center_distance(values, groups, spec)
    dist = np.where(np.abs(values) > LATENT_RANGE, np.inf, dist)
    chosen = np.empty((spec.K, spec.n), dtype=np.int64)
    for g in range(spec.K):
        members = np.flatnonzero(groups == g)
        eligible = members[np.isfinite(dist[members])]
        if len(eligible) < spec.n:
            raise InfeasibleParametersError(
                f"group {g} has only {len(eligible)} usable samples, need {spec.n}"
            )
        # lexsort: last key is primary; index breaks ties
        order = np.lexsort((eligible, dist[eligible]))
        chosen[g] = eligible[order[: spec.n]]
    mask = np.ones(len(values), dtype=bool)
    mask[chosen.ravel()] = False
    leftovers = np.flatnonzero(mask)
    for arr in (groups, chosen, leftovers):
        arr.setflags(write=False)
    return ElementPool(values=values, group_of=groups, chosen=chosen, leftovers=leftovers)


def regroup_recovered(values: np.ndarray, spec: GroupingSpec) -> np.ndarray:
    """Group index per position of the first N = K*n recovered values.

    When a group count differs from n, values nearest the boundaries are moved
    across into the neighbouring groups until every count is n. In one
    dimension that is the same as ranking all values (ties by position) and
    handing out n consecutive ranks per group.
    """
    values = np.asarray(values, dtype=np.float64)
    N = spec.K * spec.n
    if values.shape != (N,):
        raise ExtractionIntegrityError(f"expected {N} values, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ExtractionIntegrityError("recovered latent vector contains non-finite values")
    groups = assign_group(values, spec)
    if np.all(np.bincount(groups, minlength=spec.K) == spec.n):
        return groups
    order = np.lexsort((np.arange(N), values))
    repaired = np.empty(N, dtype=np.int64)
    repaired[order] = np.arange(N) // spec.n
    return repaired


def group_positions(groups: np.ndarray, K: int) -> list[np.ndarray]:
    return [np.flatnonzero(groups == g) for g in range(K)]

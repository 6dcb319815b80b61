"""Credible regions from projected posterior draws.

A region is a ball {u : ||sqrt(n)(u - center)||_K <= r} around the LASSO
center in one of the Minkowski-functional norms (max, Euclidean, l1, single
component, or a rectangle over an index set).  The radius is the smallest
observed distance whose empirical mass reaches the requested level, the
finite-sample analogue of the quantile definition in the theory.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .types import CredibleRegion, NormSelector, SparseDraw


@dataclass(frozen=True)
class ProjectedSample:
    """A batch of projected draws with their center and sample size.

    draws holds the R sparse coefficient vectors as an (R, p) matrix; center
    is the LASSO estimate the radii are measured from; level is the default
    credibility used when a region is built without an explicit override.
    """

    draws: np.ndarray
    center: np.ndarray
    n: int
    level: float

    def __post_init__(self):
        draws = np.atleast_2d(np.array(self.draws, dtype=float, copy=True))
        center = np.array(self.center, dtype=float, copy=True).ravel()
        if draws.shape[0] < 2:
            raise ValueError("need at least 2 draws")
        if draws.shape[1] != center.shape[0]:
            raise ValueError("draws and center disagree on p")
        if not 0.0 < self.level < 1.0:
            raise ValueError("level must lie in (0, 1)")
        if self.n < 1:
            raise ValueError("n must be positive")
        draws.setflags(write=False)
        center.setflags(write=False)
        object.__setattr__(self, "draws", draws)
        object.__setattr__(self, "center", center)

    @classmethod
    def from_sparse_draws(cls, draws: list[SparseDraw], center: np.ndarray,
                          n: int, level: float) -> "ProjectedSample":
        return cls(draws=np.stack([d.theta_star for d in draws]),
                   center=center, n=n, level=level)

    @property
    def count(self) -> int:
        return self.draws.shape[0]

    @property
    def p(self) -> int:
        return self.draws.shape[1]


def minkowski_norm(x: np.ndarray, selector: NormSelector) -> float:
    """Evaluate the selected norm at a single vector."""
    x = np.asarray(x, dtype=float).ravel()
    if selector.kind == "max":
        return float(np.abs(x).max())
    if selector.kind == "euclidean":
        return float(np.sqrt(x @ x))
    if selector.kind == "l1":
        return float(np.abs(x).sum())
    if selector.kind == "component":
        if selector.index >= x.shape[0]:
            raise ValueError(f"component {selector.index} out of range for p = {x.shape[0]}")
        return float(abs(x[selector.index]))
    idx = list(selector.indices)
    if max(idx) >= x.shape[0]:
        raise ValueError(f"rectangle indices {idx} out of range for p = {x.shape[0]}")
    return float(np.abs(x[idx]).max())


def _distances(sample: ProjectedSample, selector: NormSelector) -> np.ndarray:
    diff = math.sqrt(sample.n) * (sample.draws - sample.center)
    if selector.kind == "max":
        return np.abs(diff).max(axis=1)
    if selector.kind == "euclidean":
        return np.sqrt((diff * diff).sum(axis=1))
    if selector.kind == "l1":
        return np.abs(diff).sum(axis=1)
    if selector.kind == "component":
        if selector.index >= sample.p:
            raise ValueError(f"component {selector.index} out of range for p = {sample.p}")
        return np.abs(diff[:, selector.index])
    idx = list(selector.indices)
    if max(idx) >= sample.p:
        raise ValueError(f"rectangle indices {idx} out of range for p = {sample.p}")
    return np.abs(diff[:, idx]).max(axis=1)


def radius_quantile(sample: ProjectedSample, selector: NormSelector,
                    level: float | None = None) -> float:
    """Smallest observed distance with empirical mass at or above level.

    Distances are ||sqrt(n)(draw - center)||_K.  With R draws this is the
    order statistic at rank ceil(R * level); ties only lower the radius to
    the same value.  Warns when the radius degenerates to 0 (more than a
    level-fraction of draws sit exactly at the center).
    """
    level = sample.level if level is None else level
    if not 0.0 < level <= 1.0:
        raise ValueError("level must lie in (0, 1]")
    d = np.sort(_distances(sample, selector))
    R = d.shape[0]
    rank = int(math.ceil(R * level - 1e-9))  # guard fp dust in R*level
    rank = min(max(rank, 1), R)
    r = float(d[rank - 1])
    if r == 0.0:
        warnings.warn("credible radius degenerated to 0: at least a level-"
                      "fraction of draws coincide with the center", UserWarning,
                      stacklevel=2)
    return r


def component_interval(sample: ProjectedSample, j: int,
                       level: float | None = None) -> tuple[float, float]:
    """Credible interval for coordinate j: center_j +/- radius/sqrt(n)."""
    if not 0 <= j < sample.p:
        raise ValueError(f"component {j} out of range for p = {sample.p}")
    r = radius_quantile(sample, NormSelector.component(j), level=level)
    half = r / math.sqrt(sample.n)
    c = float(sample.center[j])
    return (c - half, c + half)


def rectangle_levels(k: int, joint_level: float) -> float:
    """Per-component level that makes a k-fold rectangle reach joint_level."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if not 0.0 < joint_level < 1.0:
        raise ValueError("joint_level must lie in (0, 1)")
    return float(joint_level ** (1.0 / k))


def model_probabilities(sample: ProjectedSample) -> dict[frozenset[int], float]:
    """Empirical frequency of each distinct support among the draws."""
    counts: dict[frozenset[int], int] = {}
    for row in sample.draws:
        support = frozenset(np.nonzero(row)[0].tolist())
        counts[support] = counts.get(support, 0) + 1
    R = sample.count
    return {s: c / R for s, c in counts.items()}


def build_region(sample: ProjectedSample, selector: NormSelector,
                 level: float | None = None) -> CredibleRegion:
    """Assemble a CredibleRegion, including per-component intervals when the
    selector is componentwise or rectangular."""
    level = sample.level if level is None else level
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        r = radius_quantile(sample, selector, level=level)
    degenerate = any(issubclass(w.category, UserWarning) for w in caught)
    intervals = None
    half = r / math.sqrt(sample.n)
    if selector.kind == "component":
        c = float(sample.center[selector.index])
        intervals = ((c - half, c + half),)
    elif selector.kind == "rectangle":
        intervals = tuple((float(sample.center[j]) - half, float(sample.center[j]) + half)
                          for j in selector.indices)
    return CredibleRegion(selector=selector, center=sample.center, radius=r,
                          level=level, intervals=intervals, degenerate=degenerate)

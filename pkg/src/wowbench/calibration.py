"""Grid-search selection of the mapping parameter against human ratings.

For every candidate theta the pre-scaled development values are mapped,
correlated with human ratings on each held-out fold, and the per-fold Pearson
coefficients are averaged in Fisher-z space.  The winning theta is frozen into
a :class:`CalibrationResult` and written to a JSON parameter file that the
registry merges on load.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.stats import rankdata

from .errors import CalibrationError, DegenerateCorrelationError
from .normalization import apply_family
from .registry import DEFAULT_EPSILON, Family

log = logging.getLogger(__name__)

CORRELATION_CLAMP = 1e-12
DEFAULT_FOLDS = 5


def default_grid(family: Family) -> list[float]:
    """Log-spaced candidates bracketing 1.

    Gamma and temperature: 17 points over [0.25, 4]; tanh slope: 15 points
    over [0.5, 4].  Powers of two are built so that 0.5, 1, 2 and 4 are exact.
    """
    family = Family(family)
    if family is Family.TANH_KAPPA:
        return [float(2.0 ** (-1.0 + 3.0 * k / 14.0)) for k in range(15)]
    return [float(2.0 ** (k / 4.0)) for k in range(-8, 9)]


@dataclass(frozen=True)
class CalibrationSample:
    xhat: float
    rating: float

    def __post_init__(self):
        if not (0.0 <= self.xhat <= 1.0):
            raise ValueError(f"pre-scaled value must be in [0, 1], got {self.xhat!r}")
        if not math.isfinite(self.rating):
            raise ValueError(f"rating must be finite, got {self.rating!r}")


@dataclass
class CalibrationResult:
    metric_id: str
    family: Family
    theta_star: float
    cv_fisher_z_mean: float
    spearman: float
    fold_count: int
    grid: list[float]
    seed: int = 0
    skipped_folds: int = 0
    stratified: bool = False
    scores: list[Optional[float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["family"] = self.family.value
        return d


def _as_pair(x: Sequence[float], y: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise ValueError("inputs must be 1-D and of equal length")
    if xa.size < 2:
        raise ValueError("need at least two observations")
    return xa, ya


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    xa, ya = _as_pair(x, y)
    dx = xa - xa.mean()
    dy = ya - ya.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateCorrelationError("correlation undefined for constant input")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation of average-tie ranks."""
    xa, ya = _as_pair(x, y)
    return pearson(rankdata(xa), rankdata(ya))


def fisher_z_mean(correlations: Sequence[float], clamp: float = CORRELATION_CLAMP) -> float:
    """Mean of ``atanh(r)``; the selection criterion, not back-transformed."""
    if len(correlations) == 0:
        raise ValueError("no correlations to average")
    zs = []
    bound = 1.0 - clamp
    for r in correlations:
        if abs(r) > 1.0:
            raise ValueError(f"correlation out of range: {r!r}")
        if abs(r) > bound:
            if abs(r) == 1.0:
                log.warning("clamping correlation %r to +/-(1 - %g) before atanh", r, clamp)
            r = math.copysign(bound, r)
        zs.append(math.atanh(r))
    return math.fsum(zs) / len(zs)


def fold_indices(n: int, k: int, seed: int) -> list[np.ndarray]:
    """Seeded shuffle, then ``k`` near-equal folds (remainder spread one per fold)."""
    if k < 2:
        raise CalibrationError(f"need at least 2 folds, got {k}")
    if n < k:
        raise CalibrationError(f"{n} samples cannot fill {k} folds")
    order = np.random.default_rng(seed).permutation(n)
    return [np.sort(part) for part in np.array_split(order, k)]


def cv_score(
    xhat: np.ndarray,
    ratings: np.ndarray,
    family: Family,
    theta: float,
    folds: list[np.ndarray],
    epsilon: float = DEFAULT_EPSILON,
) -> tuple[Optional[float], int]:
    """Fisher-z mean of held-out Pearson correlations, and the skipped-fold count.

    Returns ``None`` for the score when more than half of the folds have an
    undefined correlation.
    """
    mapped = apply_family(xhat, family, theta, epsilon)
    rs, skipped = [], 0
    for idx in folds:
        try:
            rs.append(pearson(mapped[idx], ratings[idx]))
        except DegenerateCorrelationError:
            skipped += 1
    if skipped * 2 > len(folds) or not rs:
        return None, skipped
    return fisher_z_mean(rs), skipped


def calibrate_metric(
    samples: Sequence[CalibrationSample],
    family: Family,
    grid: Optional[Sequence[float]] = None,
    k: int = DEFAULT_FOLDS,
    seed: int = 0,
    metric_id: str = "",
    epsilon: float = DEFAULT_EPSILON,
) -> CalibrationResult:
    family = Family(family)
    grid = list(default_grid(family) if grid is None else grid)
    if not grid:
        raise CalibrationError("empty parameter grid")
    if k < 2:
        raise CalibrationError(f"need at least 2 folds, got {k}")
    if len(samples) < 2 * k:
        raise CalibrationError(
            f"{metric_id or 'metric'}: {len(samples)} samples, need at least {2 * k} for {k} folds"
        )
    xhat = np.array([s.xhat for s in samples], dtype=np.float64)
    ratings = np.array([s.rating for s in samples], dtype=np.float64)
    folds = fold_indices(len(samples), k, seed)

    best = None  # (fisher_z, spearman, -theta) compared lexicographically
    best_theta = None
    best_skipped = 0
    scores: list[Optional[float]] = []
    for theta in grid:
        score, skipped = cv_score(xhat, ratings, family, theta, folds, epsilon)
        scores.append(score)
        if score is None:
            continue
        try:
            rho = spearman(apply_family(xhat, family, theta, epsilon), ratings)
        except DegenerateCorrelationError:
            rho = -math.inf
        key = (score, rho, -theta)
        if best is None or key > best:
            best, best_theta, best_skipped = key, theta, skipped
    if best is None:
        raise CalibrationError(f"{metric_id or 'metric'}: all folds degenerate for every candidate")
    return CalibrationResult(
        metric_id=metric_id,
        family=family,
        theta_star=float(best_theta),
        cv_fisher_z_mean=best[0],
        spearman=best[1],
        fold_count=k,
        grid=[float(t) for t in grid],
        seed=seed,
        skipped_folds=best_skipped,
        scores=scores,
    )


def frozen_document(results: Sequence[CalibrationResult], seed: int, folds: int) -> str:
    """Serialize calibration results to the frozen-parameter JSON text.

    Keys are sorted and floats written at full precision, so identical runs
    give byte-identical files.
    """
    doc = {
        "seed": seed,
        "folds": folds,
        "stratified": False,
        "metrics": {
            r.metric_id: {
                "family": r.family.value,
                "theta": r.theta_star,
                "cv_fisher_z_mean": r.cv_fisher_z_mean,
                "spearman": r.spearman,
                "fold_count": r.fold_count,
                "skipped_folds": r.skipped_folds,
                "grid": r.grid,
            }
            for r in sorted(results, key=lambda r: r.metric_id)
        },
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"

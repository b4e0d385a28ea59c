"""Trajectory similarity between generated and reference point tracks.

Three distances on 2-D pixel paths:

* MED: mean Euclidean distance after resampling both paths to a common length
* DTW: symmetric three-move dynamic time warping with Euclidean local cost
* discrete Frechet distance (Eiter & Mannila coupling recursion)
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist


class Entity(str, enum.Enum):
    END_EFFECTOR = "end_effector"
    OBJECT = "object"


@dataclass(frozen=True)
class Trajectory:
    track_id: str
    entity: Entity
    points: np.ndarray  # (n, 2)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError(f"track {self.track_id!r}: points must be an (n, 2) array")
        if len(pts) == 0:
            raise ValueError(f"track {self.track_id!r}: at least one point required")
        if not np.all(np.isfinite(pts)):
            raise ValueError(f"track {self.track_id!r}: non-finite coordinate")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "entity", Entity(self.entity))

    def __len__(self):
        return len(self.points)

    @classmethod
    def from_points(cls, points, track_id: str = "t0", entity=Entity.OBJECT) -> "Trajectory":
        return cls(track_id=track_id, entity=entity, points=np.asarray(points, dtype=np.float64))


@dataclass(frozen=True)
class TrajectoryScore:
    med: float
    dtw_total: float
    dtw_normalized: float
    frechet: float

    def as_metrics(self, prefix: str = "traj_") -> dict[str, float]:
        return {
            f"{prefix}med": self.med,
            f"{prefix}dtw": self.dtw_total,
            f"{prefix}dtw_norm": self.dtw_normalized,
            f"{prefix}frechet": self.frechet,
        }


def _points(t) -> np.ndarray:
    if isinstance(t, Trajectory):
        return t.points
    pts = np.asarray(t, dtype=np.float64)
    if pts.ndim != 2 or len(pts) == 0:
        raise ValueError("trajectory must be a nonempty (n, d) array")
    return pts


def resample(traj: Trajectory, n: int) -> Trajectory:
    """Piecewise-linear resampling at uniform *index* positions.

    The ``n`` output samples sit at fractional indices ``k * (len - 1) / (n - 1)``.
    A single-point path is repeated ``n`` times.
    """
    if n < 2:
        raise ValueError(f"resample length must be >= 2, got {n}")
    pts = traj.points
    m = len(pts)
    if m == 1:
        out = np.repeat(pts, n, axis=0)
    elif m == n:
        out = pts.copy()
    else:
        pos = np.linspace(0.0, m - 1, n)
        src = np.arange(m, dtype=np.float64)
        out = np.column_stack([np.interp(pos, src, pts[:, d]) for d in range(pts.shape[1])])
    return Trajectory(track_id=traj.track_id, entity=traj.entity, points=out)


def med(a: Trajectory, b: Trajectory, n: Optional[int] = None) -> float:
    if n is None:
        n = max(len(a), len(b), 2)
    pa = resample(a, n).points
    pb = resample(b, n).points
    return float(np.mean(np.linalg.norm(pa - pb, axis=1)))


def dtw(a, b) -> tuple[float, float]:
    """DTW cost and cost per alignment step.

    Returns ``(total, normalized)`` where ``normalized`` divides by the number
    of index pairs on the optimal path.  Among equal-cost paths the shortest
    one is taken, so the normalization is well defined.
    """
    pa, pb = _points(a), _points(b)
    cost = cdist(pa, pb)
    n, m = cost.shape
    acc = np.full((n + 1, m + 1), np.inf)
    steps = np.zeros((n + 1, m + 1), dtype=np.int64)
    acc[0, 0] = 0.0
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            best, best_len = np.inf, 0
            for pi, pj in ((i - 1, j - 1), (i - 1, j), (i, j - 1)):
                c = acc[pi, pj]
                if c < best or (c == best and steps[pi, pj] < best_len):
                    best, best_len = c, steps[pi, pj]
            acc[i, j] = cost[i - 1, j - 1] + best
            steps[i, j] = best_len + 1
    total = float(acc[n, m])
    return total, total / int(steps[n, m])


def frechet(a, b) -> float:
    pa, pb = _points(a), _points(b)
    d = cdist(pa, pb)
    n, m = d.shape
    ca = np.empty((n, m))
    ca[0, 0] = d[0, 0]
    for i in range(1, n):
        ca[i, 0] = max(ca[i - 1, 0], d[i, 0])
    for j in range(1, m):
        ca[0, j] = max(ca[0, j - 1], d[0, j])
    for i in range(1, n):
        for j in range(1, m):
            ca[i, j] = max(min(ca[i - 1, j], ca[i, j - 1], ca[i - 1, j - 1]), d[i, j])
    return float(ca[n - 1, m - 1])


def score_trajectory(generated: Trajectory, reference: Trajectory, n: Optional[int] = None) -> TrajectoryScore:
    total, normalized = dtw(generated, reference)
    return TrajectoryScore(
        med=med(generated, reference, n),
        dtw_total=total,
        dtw_normalized=normalized,
        frechet=frechet(generated, reference),
    )


def score_tracks(
    generated: Sequence[Trajectory], reference: Sequence[Trajectory]
) -> tuple[Optional[TrajectoryScore], list[str]]:
    """Unweighted mean of per-track scores over track ids present in both sets.

    Returns the combined score (``None`` if nothing matched) and the track ids
    that had no partner.
    """
    gen = {t.track_id: t for t in generated}
    ref = {t.track_id: t for t in reference}
    shared = sorted(set(gen) & set(ref))
    unmatched = sorted(set(gen) ^ set(ref))
    if not shared:
        return None, unmatched
    per = [score_trajectory(gen[k], ref[k]) for k in shared]
    return (
        TrajectoryScore(
            med=float(np.mean([s.med for s in per])),
            dtw_total=float(np.mean([s.dtw_total for s in per])),
            dtw_normalized=float(np.mean([s.dtw_normalized for s in per])),
            frechet=float(np.mean([s.frechet for s in per])),
        ),
        unmatched,
    )

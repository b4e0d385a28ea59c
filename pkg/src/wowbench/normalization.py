"""Raw measurement -> desirability score in [0, 100].

clip to anchors, linear pre-scale to [0, 1] (flipped for lower-is-better),
one of three monotone single-parameter maps, times 100.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .registry import DEFAULT_EPSILON, Direction, Family, MetricSpec

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class DesirabilityScore:
    value: float
    metric_id: str


def clip(u: float, a: float, b: float) -> float:
    if a > b:
        raise ValueError(f"clip bounds out of order: a={a!r} > b={b!r}")
    return min(max(u, a), b)


def prescale(x: float, spec: MetricSpec) -> float:
    """Anchor-clip and map to [0, 1]; LIB metrics are flipped so 1 is best.

    ``+inf`` and ``-inf`` saturate at the anchors, which is how the infinite
    PSNR of identical frames lands on 1.0.
    """
    if math.isnan(x):
        raise ValueError(f"NaN measurement for metric {spec.metric_id!r}")
    frac = (clip(x, spec.low, spec.high) - spec.low) / (spec.high - spec.low)
    return frac if spec.direction is Direction.HIB else 1.0 - frac


def _sigmoid(t: np.ndarray) -> np.ndarray:
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def apply_family(
    xhat: ArrayLike, family: Family, theta: float, epsilon: float = DEFAULT_EPSILON
) -> ArrayLike:
    """Apply one of the monotone maps to pre-scaled value(s) in [0, 1].

    The epsilon clamp is only applied inside the logit of the temperature
    family; the gamma and tanh maps see ``xhat`` untouched.
    """
    if not (theta > 0 and math.isfinite(theta)):
        raise ValueError(f"theta must be positive, got {theta!r}")
    if not (0.0 < epsilon < 0.5):
        raise ValueError(f"epsilon must lie in (0, 0.5), got {epsilon!r}")
    family = Family(family)
    scalar = np.ndim(xhat) == 0
    x = np.asarray(xhat, dtype=np.float64)
    if np.any((x < 0) | (x > 1)) or np.any(np.isnan(x)):
        raise ValueError("pre-scaled input must lie in [0, 1]")

    if family is Family.GAMMA:
        y = np.power(x, theta)
    elif family is Family.LOGIT_T:
        xc = np.clip(x, epsilon, 1.0 - epsilon)
        y = _sigmoid(np.atleast_1d((np.log(xc) - np.log1p(-xc)) / theta)).reshape(x.shape)
    else:
        y = 0.5 * (np.tanh(theta * (2.0 * x - 1.0)) + 1.0)
    return float(y) if scalar else y


def desirability(x: float, spec: MetricSpec, epsilon: float = DEFAULT_EPSILON) -> DesirabilityScore:
    value = 100.0 * apply_family(prescale(x, spec), spec.family, spec.theta, epsilon)
    return DesirabilityScore(value=value, metric_id=spec.metric_id)

"""Regional temporal consistency from region embeddings, plus PSNR and SSIM."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.ndimage import correlate1d


class Region(str, enum.Enum):
    ARM = "arm"
    OBJECT = "object"
    BACKGROUND = "background"


class ConsistencyMode(str, enum.Enum):
    ADJACENT = "adjacent"
    ANCHOR_FIRST = "anchor_first"


@dataclass(frozen=True)
class RegionEmbeddingSequence:
    region: Region
    frames: np.ndarray  # (t, d)

    def __post_init__(self):
        f = np.asarray(self.frames, dtype=np.float64)
        if f.ndim != 2:
            raise ValueError("frames must be a (t, d) array of equal-length vectors")
        if len(f) < 2:
            raise ValueError("at least two frames required for temporal consistency")
        if not np.all(np.isfinite(f)):
            raise ValueError("non-finite embedding value")
        if np.any(np.linalg.norm(f, axis=1) == 0):
            raise ValueError("zero embedding vector; cosine undefined")
        object.__setattr__(self, "frames", f)
        object.__setattr__(self, "region", Region(self.region))


def regional_consistency(
    seq: RegionEmbeddingSequence, mode: ConsistencyMode = ConsistencyMode.ADJACENT
) -> float:
    """Mean cosine similarity across time for one region.

    ``adjacent`` averages cos(v_t, v_{t+1}); ``anchor_first`` averages
    cos(v_1, v_t) for t >= 2.
    """
    unit = seq.frames / np.linalg.norm(seq.frames, axis=1, keepdims=True)
    if ConsistencyMode(mode) is ConsistencyMode.ADJACENT:
        cos = np.einsum("ij,ij->i", unit[:-1], unit[1:])
    else:
        cos = unit[1:] @ unit[0]
    return float(np.clip(np.mean(cos), -1.0, 1.0))


def consistency_metrics(sequences: Sequence[RegionEmbeddingSequence]) -> dict[str, float]:
    """Per-region values for both modes plus their unweighted region means."""
    out: dict[str, float] = {}
    adj, anc = [], []
    for seq in sorted(sequences, key=lambda s: s.region.value):
        a = regional_consistency(seq, ConsistencyMode.ADJACENT)
        b = regional_consistency(seq, ConsistencyMode.ANCHOR_FIRST)
        out[f"consistency_{seq.region.value}"] = a
        out[f"consistency_{seq.region.value}_anchor"] = b
        adj.append(a)
        anc.append(b)
    if adj:
        out["consistency_mean"] = float(np.mean(adj))
        out["consistency_mean_anchor"] = float(np.mean(anc))
    return out


@dataclass(frozen=True)
class FramePair:
    reference: np.ndarray
    test: np.ndarray

    def __post_init__(self):
        ref, tst = np.asarray(self.reference), np.asarray(self.test)
        if ref.shape != tst.shape:
            raise ValueError(f"frame size mismatch: {ref.shape} vs {tst.shape}")
        if ref.ndim not in (2, 3):
            raise ValueError("frames must be (h, w) or (h, w, c)")
        object.__setattr__(self, "reference", ref)
        object.__setattr__(self, "test", tst)


DATA_RANGE = 255.0


def mse(pair: FramePair) -> float:
    diff = pair.reference.astype(np.float64) - pair.test.astype(np.float64)
    return float(np.mean(diff * diff))


def psnr_from_mse(value: float) -> float:
    if value == 0.0:
        return math.inf
    return 10.0 * math.log10(DATA_RANGE**2 / value)


def psnr(pair: FramePair) -> float:
    """PSNR in dB over all pixels and channels; ``math.inf`` for identical frames."""
    return psnr_from_mse(mse(pair))


def gaussian_window(size: int = 11, sigma: float = 1.5) -> np.ndarray:
    r = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    g = np.exp(-(r * r) / (2.0 * sigma * sigma))
    return g / g.sum()


def _filter_valid(img: np.ndarray, g: np.ndarray) -> np.ndarray:
    h = len(g) // 2
    out = correlate1d(correlate1d(img, g, axis=0, mode="constant"), g, axis=1, mode="constant")
    return out[h:-h, h:-h]


def _ssim_channel(x: np.ndarray, y: np.ndarray, g: np.ndarray, k1: float, k2: float) -> float:
    c1 = (k1 * DATA_RANGE) ** 2
    c2 = (k2 * DATA_RANGE) ** 2
    mu_x = _filter_valid(x, g)
    mu_y = _filter_valid(y, g)
    sxx = _filter_valid(x * x, g) - mu_x * mu_x
    syy = _filter_valid(y * y, g) - mu_y * mu_y
    sxy = _filter_valid(x * y, g) - mu_x * mu_y
    num = (2 * mu_x * mu_y + c1) * (2 * sxy + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (sxx + syy + c2)
    return float(np.mean(num / den))


def ssim(pair: FramePair, win: int = 11, sigma: float = 1.5, k1: float = 0.01, k2: float = 0.03) -> float:
    """Single-scale SSIM with a Gaussian window, averaged over valid windows and channels."""
    ref = pair.reference.astype(np.float64)
    tst = pair.test.astype(np.float64)
    if min(ref.shape[:2]) < win:
        raise ValueError(f"frames of size {ref.shape[:2]} are smaller than the {win}x{win} window")
    if ref.ndim == 2:
        ref, tst = ref[..., None], tst[..., None]
    g = gaussian_window(win, sigma)
    vals = [_ssim_channel(ref[..., c], tst[..., c], g, k1, k2) for c in range(ref.shape[2])]
    return float(np.mean(vals))


def video_frame_metrics(reference: np.ndarray, test: np.ndarray) -> dict[str, float]:
    """PSNR over the pooled MSE of a whole clip, SSIM averaged per frame.

    Both inputs are ``(frames, h, w[, c])`` uint8 arrays of equal shape.
    """
    if reference.shape != test.shape:
        raise ValueError(f"clip shape mismatch: {reference.shape} vs {test.shape}")
    pooled = float(np.mean([mse(FramePair(r, t)) for r, t in zip(reference, test)]))
    return {
        "psnr": psnr_from_mse(pooled),
        "ssim": float(np.mean([ssim(FramePair(r, t)) for r, t in zip(reference, test)])),
    }

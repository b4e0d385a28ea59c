"""Group means, overall scores and leaderboards."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .normalization import DesirabilityScore
from .registry import AggregationMode, GroupSpec


@dataclass(frozen=True)
class GroupScore:
    model_id: str
    group_id: str
    value: Optional[float]  # None when no member metric is available
    available_count: int

    @property
    def available(self) -> bool:
        return self.available_count > 0


@dataclass(frozen=True)
class OverallScore:
    model_id: str
    value: float
    effective_weights: dict[str, float]


@dataclass
class LeaderboardRow:
    rank: int
    model_id: str
    overall: float
    groups: dict[str, Optional[float]]
    counts: dict[str, int]
    effective_weights: dict[str, float] = field(default_factory=dict)


def group_score(
    scores: Mapping[str, DesirabilityScore | float | None], group: GroupSpec, model_id: str = ""
) -> GroupScore:
    """Arithmetic mean over the group's members present in ``scores``."""
    vals = []
    for mid in group.members:
        s = scores.get(mid)
        if s is None:
            continue
        vals.append(s.value if isinstance(s, DesirabilityScore) else float(s))
    if not vals:
        return GroupScore(model_id, group.group_id, None, 0)
    return GroupScore(model_id, group.group_id, math.fsum(vals) / len(vals), len(vals))


def overall_score(
    groups: Sequence[GroupScore],
    weights: Optional[Mapping[str, float]] = None,
    mode: AggregationMode = AggregationMode.WEIGHTED_MEAN,
) -> OverallScore:
    """Combine available group scores.

    ``weighted_mean`` renormalizes the weights over groups with data,
    ``unweighted_mean`` is the same with every weight 1, and ``sum`` adds the
    group values without normalization.
    """
    mode = AggregationMode(mode)
    model_id = groups[0].model_id if groups else ""
    avail = [g for g in groups if g.available]
    if mode is AggregationMode.SUM:
        return OverallScore(model_id, math.fsum(g.value for g in avail), {g.group_id: 1.0 for g in avail})
    if not avail:
        raise ValueError(f"model {model_id!r}: no available groups to aggregate")
    if mode is AggregationMode.UNWEIGHTED_MEAN or weights is None:
        w = {g.group_id: 1.0 for g in avail}
    else:
        w = {}
        for g in avail:
            if g.group_id not in weights:
                raise ValueError(f"no weight for group {g.group_id!r}")
            wg = float(weights[g.group_id])
            if wg < 0 or not math.isfinite(wg):
                raise ValueError(f"negative or non-finite weight for group {g.group_id!r}: {wg!r}")
            w[g.group_id] = wg
    total = math.fsum(w.values())
    if total <= 0:
        raise ValueError(f"model {model_id!r}: weights of available groups sum to zero")
    eff = {gid: wg / total for gid, wg in w.items()}
    return OverallScore(model_id, math.fsum(eff[g.group_id] * g.value for g in avail), eff)


def leaderboard(
    per_model: Mapping[str, Sequence[GroupScore]],
    weights: Optional[Mapping[str, float]] = None,
    mode: AggregationMode = AggregationMode.WEIGHTED_MEAN,
) -> list[LeaderboardRow]:
    """Rows sorted by overall score (descending, full precision), then model id."""
    rows = []
    for model_id, groups in per_model.items():
        o = overall_score(list(groups), weights, mode)
        rows.append(
            LeaderboardRow(
                rank=0,
                model_id=model_id,
                overall=o.value,
                groups={g.group_id: g.value for g in groups},
                counts={g.group_id: g.available_count for g in groups},
                effective_weights=o.effective_weights,
            )
        )
    rows.sort(key=lambda r: (-r.overall, r.model_id))
    for i, r in enumerate(rows, 1):
        r.rank = i
    return rows

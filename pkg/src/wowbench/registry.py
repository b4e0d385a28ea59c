"""Metric and group configuration, frozen mapping parameters, record model.

The registry is a single YAML document::

    epsilon: 1.0e-06
    aggregation_mode: weighted_mean      # weighted_mean | unweighted_mean | sum
    groups:
      quality: {weight: 1.0}
      planning: {weight: 1.0, members: [s_plan]}   # members optional
    metrics:
      psnr: {direction: HIB, low: 0, high: 50, family: gamma, theta: 1.0, group: quality}
      ssim: {group: quality}                       # anchors from known bounds
      sequence_match: {scale: likert5, group: instruction}

Anchors may be omitted only for metrics with a known bounded scale (see
``KNOWN_ANCHORS`` and ``SCALE_PRESETS``).  A frozen-parameter file written by
:mod:`wowbench.calibration` can be merged on load; it overrides ``family``
and ``theta`` by metric id.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Any, Mapping, Optional

import yaml

from .errors import RegistryError

DEFAULT_EPSILON = 1e-6


class Direction(str, enum.Enum):
    HIB = "HIB"
    LIB = "LIB"


class Family(str, enum.Enum):
    GAMMA = "gamma"
    LOGIT_T = "logit_t"
    TANH_KAPPA = "tanh_kappa"


class AggregationMode(str, enum.Enum):
    WEIGHTED_MEAN = "weighted_mean"
    UNWEIGHTED_MEAN = "unweighted_mean"
    SUM = "sum"


# (direction, low, high) for bounded scales.
SCALE_PRESETS: dict[str, tuple[Direction, float, float]] = {
    "unit": (Direction.HIB, 0.0, 1.0),
    "likert5": (Direction.HIB, 1.0, 5.0),
    "ssim": (Direction.HIB, -1.0, 1.0),
    "cosine": (Direction.HIB, 0.0, 1.0),
    "percent": (Direction.HIB, 0.0, 100.0),
}

KNOWN_ANCHORS: dict[str, tuple[Direction, float, float]] = {
    "psnr": (Direction.HIB, 0.0, 50.0),
    "fvd": (Direction.LIB, 0.0, 2000.0),
    "ssim": SCALE_PRESETS["ssim"],
    "s_plan": SCALE_PRESETS["unit"],
    "plan_recall": SCALE_PRESETS["unit"],
    "plan_sequential": SCALE_PRESETS["unit"],
    "plan_precision": SCALE_PRESETS["unit"],
}
for _region in ("arm", "object", "background", "mean"):
    KNOWN_ANCHORS[f"consistency_{_region}"] = SCALE_PRESETS["cosine"]
    KNOWN_ANCHORS[f"consistency_{_region}_anchor"] = SCALE_PRESETS["cosine"]


@dataclass(frozen=True)
class MetricSpec:
    metric_id: str
    direction: Direction
    low: float
    high: float
    family: Family
    theta: float
    group_id: str

    def __post_init__(self):
        if not (math.isfinite(self.low) and math.isfinite(self.high)):
            raise RegistryError("anchors must be finite", key=f"metrics.{self.metric_id}")
        if not self.low < self.high:
            raise RegistryError(
                f"anchor violation: low={self.low!r} must be < high={self.high!r}",
                key=f"metrics.{self.metric_id}",
            )
        if not (math.isfinite(self.theta) and self.theta > 0):
            raise RegistryError(
                f"theta must be a positive finite real, got {self.theta!r}",
                key=f"metrics.{self.metric_id}.theta",
            )


@dataclass(frozen=True)
class GroupSpec:
    group_id: str
    weight: float
    members: tuple[str, ...]

    def __post_init__(self):
        if not (math.isfinite(self.weight) and self.weight >= 0):
            raise RegistryError(
                f"group weight must be nonnegative, got {self.weight!r}",
                key=f"groups.{self.group_id}.weight",
            )


@dataclass
class EvaluationRecord:
    """Raw measurements for one (model, sample).

    Absent metrics are simply missing keys; ``None`` values are dropped on
    construction so that "absent" and ``0.0`` never collide.
    """

    model_id: str
    sample_id: str
    measurements: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        self.measurements = {
            k: float(v) for k, v in self.measurements.items() if v is not None
        }

    def get(self, metric_id: str) -> Optional[float]:
        return self.measurements.get(metric_id)


@dataclass(frozen=True)
class RegistryConfig:
    metrics: tuple[MetricSpec, ...]
    groups: tuple[GroupSpec, ...]
    aggregation_mode: AggregationMode = AggregationMode.WEIGHTED_MEAN
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if not (0.0 < self.epsilon < 0.5):
            raise RegistryError(f"epsilon must lie in (0, 0.5), got {self.epsilon!r}", key="epsilon")
        seen: set[str] = set()
        for m in self.metrics:
            if m.metric_id in seen:
                raise RegistryError("duplicate metric id", key=f"metrics.{m.metric_id}")
            seen.add(m.metric_id)
        group_ids = {g.group_id for g in self.groups}
        for m in self.metrics:
            if m.group_id not in group_ids:
                raise RegistryError(
                    f"unknown group reference {m.group_id!r}", key=f"metrics.{m.metric_id}.group"
                )
        by_id = {m.metric_id: m for m in self.metrics}
        for g in self.groups:
            for mid in g.members:
                if mid not in by_id:
                    raise RegistryError(
                        f"group member {mid!r} is not a registered metric",
                        key=f"groups.{g.group_id}.members",
                    )
                if by_id[mid].group_id != g.group_id:
                    raise RegistryError(
                        f"metric {mid!r} belongs to group {by_id[mid].group_id!r}",
                        key=f"groups.{g.group_id}.members",
                    )

    def metric(self, metric_id: str) -> MetricSpec:
        for m in self.metrics:
            if m.metric_id == metric_id:
                return m
        raise KeyError(metric_id)

    def group(self, group_id: str) -> GroupSpec:
        for g in self.groups:
            if g.group_id == group_id:
                return g
        raise KeyError(group_id)

    @property
    def metric_ids(self) -> list[str]:
        return [m.metric_id for m in self.metrics]

    @property
    def weights(self) -> dict[str, float]:
        return {g.group_id: g.weight for g in self.groups}

    def with_thetas(self, frozen: Mapping[str, tuple[Family, float]]) -> "RegistryConfig":
        """Return a copy with (family, theta) overridden per metric id."""
        unknown = sorted(set(frozen) - set(self.metric_ids))
        if unknown:
            raise RegistryError(f"frozen parameters for unknown metrics {unknown}", key="frozen")
        metrics = tuple(
            replace(m, family=frozen[m.metric_id][0], theta=float(frozen[m.metric_id][1]))
            if m.metric_id in frozen
            else m
            for m in self.metrics
        )
        return replace(self, metrics=metrics)


def _num(value: Any, key: str) -> float:
    if isinstance(value, str):
        # YAML 1.1 reads "1e-6" (no dot) as a string
        try:
            return float(value)
        except ValueError:
            pass
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise RegistryError(f"expected a number, got {value!r}", key=key)
    return float(value)


def _enum(cls, value: Any, key: str):
    try:
        return cls(value)
    except ValueError:
        choices = ", ".join(v.value for v in cls)
        raise RegistryError(f"expected one of {choices}; got {value!r}", key=key) from None


def _parse_metric(mid: str, body: Any, group_members: dict[str, list[str]]) -> MetricSpec:
    key = f"metrics.{mid}"
    if not isinstance(body, dict):
        raise RegistryError("metric entry must be a mapping", key=key)
    allowed = {"direction", "low", "high", "family", "theta", "group", "scale"}
    extra = sorted(set(body) - allowed)
    if extra:
        raise RegistryError(f"unknown field(s) {extra}", key=key)

    preset = None
    if "scale" in body:
        if body["scale"] not in SCALE_PRESETS:
            raise RegistryError(
                f"unknown scale {body['scale']!r}; choose from {sorted(SCALE_PRESETS)}", key=f"{key}.scale"
            )
        preset = SCALE_PRESETS[body["scale"]]
    elif mid in KNOWN_ANCHORS:
        preset = KNOWN_ANCHORS[mid]

    if "low" in body or "high" in body:
        if not ("low" in body and "high" in body):
            raise RegistryError("give both low and high anchors or neither", key=key)
        low, high = _num(body["low"], f"{key}.low"), _num(body["high"], f"{key}.high")
    elif preset is not None:
        low, high = preset[1], preset[2]
    else:
        raise RegistryError("anchors low/high required for a metric without a known bounded scale", key=key)

    if "direction" in body:
        direction = _enum(Direction, body["direction"], f"{key}.direction")
    elif preset is not None:
        direction = preset[0]
    else:
        raise RegistryError("direction required", key=f"{key}.direction")

    group = body.get("group")
    listed_in = [g for g, members in group_members.items() if mid in members]
    if len(listed_in) > 1:
        raise RegistryError(f"metric listed in multiple groups {listed_in}", key=key)
    if group is None:
        if not listed_in:
            raise RegistryError("metric has no group", key=f"{key}.group")
        group = listed_in[0]
    elif listed_in and listed_in[0] != group:
        raise RegistryError(
            f"metric declares group {group!r} but is listed under {listed_in[0]!r}", key=key
        )

    return MetricSpec(
        metric_id=str(mid),
        direction=direction,
        low=low,
        high=high,
        family=_enum(Family, body.get("family", "gamma"), f"{key}.family"),
        theta=_num(body.get("theta", 1.0), f"{key}.theta"),
        group_id=str(group),
    )


def load_registry(config_text: str, frozen_text: Optional[str] = None) -> RegistryConfig:
    """Parse and validate a registry document.

    Errors are raised as :class:`RegistryError` carrying the offending key.
    """
    try:
        doc = yaml.safe_load(config_text)
    except yaml.YAMLError as exc:
        raise RegistryError(f"parse failure: {exc}", key="<document>") from None
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise RegistryError("registry document must be a mapping", key="<document>")
    extra = sorted(set(doc) - {"epsilon", "aggregation_mode", "groups", "metrics"})
    if extra:
        raise RegistryError(f"unknown top-level key(s) {extra}", key=extra[0])

    groups_doc = doc.get("groups") or {}
    metrics_doc = doc.get("metrics") or {}
    if not isinstance(groups_doc, dict):
        raise RegistryError("groups must be a mapping", key="groups")
    if not isinstance(metrics_doc, dict):
        raise RegistryError("metrics must be a mapping", key="metrics")

    group_members: dict[str, list[str]] = {}
    group_weights: dict[str, float] = {}
    for gid, body in groups_doc.items():
        body = body or {}
        if not isinstance(body, dict):
            raise RegistryError("group entry must be a mapping", key=f"groups.{gid}")
        extra = sorted(set(body) - {"weight", "members"})
        if extra:
            raise RegistryError(f"unknown field(s) {extra}", key=f"groups.{gid}")
        group_weights[str(gid)] = _num(body.get("weight", 1.0), f"groups.{gid}.weight")
        members = body.get("members", [])
        if not isinstance(members, list):
            raise RegistryError("members must be a list", key=f"groups.{gid}.members")
        group_members[str(gid)] = [str(m) for m in members]

    metrics = tuple(_parse_metric(str(mid), body, group_members) for mid, body in metrics_doc.items())
    groups = tuple(
        GroupSpec(
            group_id=gid,
            weight=w,
            members=tuple(m.metric_id for m in metrics if m.group_id == gid),
        )
        for gid, w in group_weights.items()
    )
    registry = RegistryConfig(
        metrics=metrics,
        groups=groups,
        aggregation_mode=_enum(
            AggregationMode, doc.get("aggregation_mode", "weighted_mean"), "aggregation_mode"
        ),
        epsilon=_num(doc.get("epsilon", DEFAULT_EPSILON), "epsilon"),
    )
    if frozen_text is not None:
        registry = registry.with_thetas(parse_frozen(frozen_text))
    return registry


def parse_frozen(frozen_text: str) -> dict[str, tuple[Family, float]]:
    """Read a frozen-parameter JSON document into ``{metric_id: (family, theta)}``."""
    try:
        doc = json.loads(frozen_text)
    except json.JSONDecodeError as exc:
        raise RegistryError(f"frozen file parse failure: {exc}", key="<frozen>") from None
    entries = doc.get("metrics") if isinstance(doc, dict) else None
    if not isinstance(entries, dict):
        raise RegistryError("frozen file needs a 'metrics' mapping", key="<frozen>.metrics")
    out = {}
    for mid, body in entries.items():
        key = f"<frozen>.metrics.{mid}"
        if not isinstance(body, dict) or "family" not in body or "theta" not in body:
            raise RegistryError("entry needs family and theta", key=key)
        out[mid] = (_enum(Family, body["family"], f"{key}.family"), _num(body["theta"], f"{key}.theta"))
    return out


def registry_to_dict(registry: RegistryConfig) -> dict:
    return {
        "epsilon": registry.epsilon,
        "aggregation_mode": registry.aggregation_mode.value,
        "groups": {
            g.group_id: {"weight": g.weight, "members": list(g.members)} for g in registry.groups
        },
        "metrics": {
            m.metric_id: {
                "direction": m.direction.value,
                "low": m.low,
                "high": m.high,
                "family": m.family.value,
                "theta": m.theta,
                "group": m.group_id,
            }
            for m in registry.metrics
        },
    }


def serialize_registry(registry: RegistryConfig) -> str:
    """Canonical YAML text; floats are written with ``repr`` precision."""
    return yaml.safe_dump(registry_to_dict(registry), sort_keys=False, default_flow_style=False)


def registry_hash(registry: RegistryConfig) -> str:
    payload = json.dumps(registry_to_dict(registry), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def theta_hash(registry: RegistryConfig) -> str:
    payload = json.dumps(
        {m.metric_id: [m.family.value, repr(m.theta)] for m in registry.metrics},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def validate_record(record: EvaluationRecord, registry: RegistryConfig) -> list[str]:
    """Warnings for unknown metric ids and non-finite values. Never raises."""
    known = set(registry.metric_ids)
    warnings = []
    for mid, value in record.measurements.items():
        where = f"{record.model_id}/{record.sample_id}"
        if mid not in known:
            warnings.append(f"unknown metric {mid!r} in record {where}")
        elif not math.isfinite(value):
            warnings.append(f"non-finite value {value!r} for metric {mid!r} in record {where}")
    return warnings


def default_registry_text() -> str:
    return resources.files("wowbench").joinpath("data/default_registry.yaml").read_text("utf-8")


def default_registry() -> RegistryConfig:
    return load_registry(default_registry_text())

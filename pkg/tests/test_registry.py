import math
import textwrap

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wowbench.errors import RegistryError
from wowbench.registry import (
    AggregationMode,
    Direction,
    EvaluationRecord,
    Family,
    default_registry,
    load_registry,
    registry_hash,
    serialize_registry,
    theta_hash,
    validate_record,
)

BASIC = textwrap.dedent(
    """
    groups:
      quality: {weight: 2.0}
      planning: {}
    metrics:
      psnr: {direction: HIB, low: 0, high: 50, group: quality}
      fvd: {direction: LIB, low: 0, high: 2000, group: quality}
      s_plan: {group: planning}
    """
)


def test_anchors_and_defaults():
    reg = load_registry(BASIC)
    psnr = reg.metric("psnr")
    assert (psnr.direction, psnr.low, psnr.high) == (Direction.HIB, 0.0, 50.0)
    fvd = reg.metric("fvd")
    assert (fvd.direction, fvd.low, fvd.high) == (Direction.LIB, 0.0, 2000.0)
    assert reg.epsilon == 1e-6
    assert reg.aggregation_mode is AggregationMode.WEIGHTED_MEAN
    assert reg.metric("s_plan").low == 0.0 and reg.metric("s_plan").high == 1.0
    assert reg.group("quality").members == ("psnr", "fvd")
    assert reg.weights == {"quality": 2.0, "planning": 1.0}


def test_known_anchor_defaults():
    reg = load_registry(
        "groups: {q: {}}\nmetrics:\n  psnr: {group: q}\n  fvd: {group: q}\n  ssim: {group: q}\n"
        "  judge: {scale: likert5, group: q}\n"
    )
    assert reg.metric("psnr").high == 50.0
    assert reg.metric("fvd").direction is Direction.LIB
    assert (reg.metric("ssim").low, reg.metric("ssim").high) == (-1.0, 1.0)
    assert (reg.metric("judge").low, reg.metric("judge").high) == (1.0, 5.0)


@pytest.mark.parametrize(
    "doc, key",
    [
        ("groups: {q: {}}\nmetrics: {m: {direction: HIB, low: 5, high: 5, group: q}}", "metrics.m"),
        ("groups: {q: {}}\nmetrics: {m: {direction: HIB, low: 0, high: 1, group: nope}}", "metrics.m.group"),
        ("groups: {q: {}}\nmetrics: {m: {direction: HIB, group: q}}", "metrics.m"),
        ("groups: {q: {}}\nmetrics: {m: {direction: UP, low: 0, high: 1, group: q}}", "metrics.m.direction"),
        ("groups: {q: {weight: -1}}\nmetrics: {}", "groups.q.weight"),
        ("epsilon: 0.7\ngroups: {}\nmetrics: {}", "epsilon"),
        ("groups: {q: {}}\nmetrics: {m: {low: 0, high: 1, direction: HIB, group: q, theta: 0}}", "metrics.m.theta"),
        (
            "groups: {a: {members: [m]}, b: {members: [m]}}\nmetrics: {m: {low: 0, high: 1, direction: HIB}}",
            "metrics.m",
        ),
        ("groups: [1, 2]", "groups"),
        ("metrics: {m: {}}\nbogus: 1", "bogus"),
        ("groups: {q: {}\n", "<document>"),
    ],
)
def test_errors_name_the_key(doc, key):
    with pytest.raises(RegistryError) as err:
        load_registry(doc)
    assert err.value.key == key


def test_duplicate_metric_rejected():
    # YAML mappings cannot hold duplicate keys through safe_load, so check the dataclass path
    from dataclasses import replace

    reg = load_registry(BASIC)
    with pytest.raises(RegistryError, match="duplicate"):
        replace(reg, metrics=reg.metrics + (reg.metrics[0],))


def test_round_trip_and_purity():
    reg = load_registry(BASIC)
    again = load_registry(serialize_registry(reg))
    assert again == reg
    assert load_registry(BASIC) == reg
    assert registry_hash(again) == registry_hash(reg)


@given(
    theta=st.floats(1e-3, 1e3, allow_nan=False),
    low=st.floats(-1e6, 1e6),
    width=st.floats(1e-3, 1e6),
    fam=st.sampled_from(list(Family)),
)
def test_round_trip_bit_exact(theta, low, width, fam):
    high = low + width
    if not low < high:
        return
    doc = (
        "groups: {g: {}}\nmetrics:\n"
        f"  m: {{direction: LIB, low: {low!r}, high: {high!r}, family: {fam.value}, theta: {theta!r}, group: g}}\n"
    )
    reg = load_registry(doc)
    assert load_registry(serialize_registry(reg)) == reg


def test_exponent_without_dot():
    reg = load_registry("epsilon: 1e-6\ngroups: {g: {}}\nmetrics: {m: {direction: HIB, low: 1e-3, high: 2e0, group: g}}")
    assert reg.epsilon == 1e-6
    assert reg.metric("m").low == 1e-3


def test_frozen_merge():
    frozen = '{"metrics": {"psnr": {"family": "tanh_kappa", "theta": 1.5}}}'
    reg = load_registry(BASIC, frozen)
    assert reg.metric("psnr").family is Family.TANH_KAPPA
    assert reg.metric("psnr").theta == 1.5
    assert reg.metric("fvd").theta == 1.0
    assert theta_hash(reg) != theta_hash(load_registry(BASIC))
    with pytest.raises(RegistryError):
        load_registry(BASIC, '{"metrics": {"nope": {"family": "gamma", "theta": 2}}}')


def test_validate_record():
    reg = load_registry(BASIC)
    assert validate_record(EvaluationRecord("m", "s", {"psnr": 20.0, "fvd": 100.0}), reg) == []
    w = validate_record(EvaluationRecord("m", "s", {"psnr": 20.0, "foo": 1.0}), reg)
    assert len(w) == 1 and "unknown metric 'foo'" in w[0]
    rec = EvaluationRecord("m", "s", {"psnr": math.nan})
    w = validate_record(rec, reg)
    assert len(w) == 1 and "non-finite" in w[0]
    assert math.isnan(rec.measurements["psnr"])  # unchanged


def test_absent_is_not_zero():
    rec = EvaluationRecord("m", "s", {"a": 0.0, "b": None})
    assert rec.get("a") == 0.0
    assert rec.get("b") is None
    assert "b" not in rec.measurements


def test_default_registry_loads():
    reg = default_registry()
    assert {g.group_id for g in reg.groups} == {"quality", "instruction", "physical", "planning"}
    assert all(g.weight == 1.0 for g in reg.groups)
    assert reg.metric("psnr").high == 50.0
    assert reg.metric("fvd").high == 2000.0

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wowbench.aggregation import GroupScore, group_score, leaderboard, overall_score
from wowbench.normalization import DesirabilityScore
from wowbench.registry import AggregationMode, GroupSpec

G = GroupSpec("q", 1.0, ("m1", "m2"))


def test_group_score_examples():
    d = lambda v, m: DesirabilityScore(v, m)  # noqa: E731
    g = group_score({"m1": d(40, "m1"), "m2": d(60, "m2")}, G, "x")
    assert (g.value, g.available_count) == (50, 2)
    g = group_score({"m1": d(40, "m1")}, G, "x")
    assert (g.value, g.available_count) == (40, 1)
    g = group_score({}, G, "x")
    assert g.value is None and g.available_count == 0 and not g.available


def groups(*vals, model="m"):
    return [GroupScore(model, f"g{i}", v, 0 if v is None else 1) for i, v in enumerate(vals)]


def test_overall_examples():
    o = overall_score(groups(38.52, 54.09, 63.30, 2.32), mode=AggregationMode.UNWEIGHTED_MEAN)
    assert o.value == pytest.approx(39.56, abs=0.005)
    o = overall_score(groups(3.12, 2.86, 2.78, 2.84), mode=AggregationMode.SUM)
    assert o.value == pytest.approx(11.60, abs=1e-9)
    o = overall_score(groups(None, 42.0, None), {"g0": 5, "g1": 0.3, "g2": 9}, AggregationMode.WEIGHTED_MEAN)
    assert o.value == 42.0 and o.effective_weights == {"g1": 1.0}


def test_overall_errors():
    with pytest.raises(ValueError):
        overall_score(groups(None, None), mode=AggregationMode.UNWEIGHTED_MEAN)
    with pytest.raises(ValueError):
        overall_score(groups(1.0, 2.0), {"g0": -1, "g1": 1}, AggregationMode.WEIGHTED_MEAN)


values = st.lists(st.one_of(st.none(), st.floats(0, 100)), min_size=1, max_size=6).filter(
    lambda v: any(x is not None for x in v)
)


@given(values, st.data())
def test_weighted_invariants(vals, data):
    gs = groups(*vals)
    w = {g.group_id: data.draw(st.floats(0.01, 10)) for g in gs}
    o = overall_score(gs, w)
    assert sum(o.effective_weights.values()) == pytest.approx(1.0)
    c = data.draw(st.floats(0.01, 100))
    assert overall_score(gs, {k: v * c for k, v in w.items()}).value == pytest.approx(o.value, rel=1e-12, abs=1e-12)
    dropped = [g for g in gs if g.available]
    assert overall_score(dropped, w).value == o.value


@given(st.floats(0, 100), st.integers(1, 6))
def test_equal_groups(g, k):
    gs = groups(*([g] * k))
    assert overall_score(gs, mode=AggregationMode.UNWEIGHTED_MEAN).value == pytest.approx(g, rel=1e-12, abs=1e-12)
    assert overall_score(gs, mode=AggregationMode.SUM).value == pytest.approx(
        k * overall_score(gs, mode=AggregationMode.UNWEIGHTED_MEAN).value, rel=1e-12, abs=1e-12
    )


def test_leaderboard_order_and_ties():
    per = {"zeta": groups(50.0, model="zeta"), "alpha": groups(50.0, model="alpha"), "mid": groups(70.0, model="mid")}
    rows = leaderboard(per, mode=AggregationMode.UNWEIGHTED_MEAN)
    assert [r.model_id for r in rows] == ["mid", "alpha", "zeta"]
    assert [r.rank for r in rows] == [1, 2, 3]
    assert rows[0].counts == {"g0": 1}

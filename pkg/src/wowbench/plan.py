"""Scoring a predicted step list against a ground-truth plan DAG.

Key-step recall, sequential consistency, key-step precision and the combined
planning score ``(0.5 * recall + 0.5 * sequential) * precision``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter
from typing import Iterable, Optional, Sequence

from .errors import PlanGraphError

_WS = re.compile(r"\s+")
_CALL = re.compile(r"^\s*([^()]*?)\s*\((.*)\)\s*$", re.DOTALL)


def _squash(text: str) -> str:
    return _WS.sub(" ", text).strip().casefold()


def canonicalize_action(raw: str) -> str:
    """Normalize an action to ``verb(arg, arg)`` form.

    >>> canonicalize_action("Grasp( Green Block )")
    'grasp(green block)'
    >>> canonicalize_action("pick up green block")
    'pick(up green block)'
    """
    if raw is None or not raw.strip():
        raise ValueError("empty action")
    m = _CALL.match(raw)
    if m:
        verb = _squash(m.group(1))
        args = [_squash(a) for a in m.group(2).split(",")]
        args = [a for a in args if a]
        return f"{verb}({', '.join(args)})"
    tokens = _squash(raw).split(" ")
    return f"{tokens[0]}({' '.join(tokens[1:])})"


@dataclass(frozen=True)
class PlanNode:
    node_id: str
    action: str


@dataclass
class PlanDAG:
    nodes: list[PlanNode]
    edges: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self):
        self.nodes = [PlanNode(str(n.node_id), canonicalize_action(n.action)) for n in self.nodes]
        self.edges = [(str(u), str(v)) for u, v in self.edges]
        ids = [n.node_id for n in self.nodes]
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise PlanGraphError(f"duplicate node ids {dup}")
        known = set(ids)
        for u, v in self.edges:
            if u not in known or v not in known:
                raise PlanGraphError(f"edge ({u!r}, {v!r}) references an unknown node")
        preds: dict[str, set[str]] = {i: set() for i in ids}
        for u, v in self.edges:
            preds[v].add(u)
        try:
            self._topo = list(TopologicalSorter(preds).static_order())
        except CycleError as exc:
            cycle = list(exc.args[1])
            raise PlanGraphError(f"plan graph has a cycle: {' -> '.join(cycle)}", cycle=cycle) from None
        self._ancestors = self._closure(preds)

    def _closure(self, preds: dict[str, set[str]]) -> dict[str, frozenset[str]]:
        anc: dict[str, frozenset[str]] = {}
        for node in self._topo:
            acc = set(preds[node])
            for p in preds[node]:
                acc |= anc[p]
            anc[node] = frozenset(acc)
        return anc

    def is_ancestor(self, u: str, v: str) -> bool:
        """True if ``u`` must precede ``v``."""
        return u in self._ancestors[v]

    def __len__(self):
        return len(self.nodes)

    @classmethod
    def from_dict(cls, doc: dict) -> "PlanDAG":
        nodes = [PlanNode(str(n["id"]), n["action"]) for n in doc.get("nodes", [])]
        edges = [tuple(e) for e in doc.get("edges", [])]
        for e in edges:
            if len(e) != 2:
                raise PlanGraphError(f"edge must be a [from, to] pair, got {list(e)!r}")
        return cls(nodes=nodes, edges=edges)


@dataclass
class PredictedPlan:
    steps: list[str]

    def __post_init__(self):
        self.steps = [canonicalize_action(s) for s in self.steps]


@dataclass(frozen=True)
class PlanScore:
    recall: float
    sequential: float
    precision: float
    s_plan: float

    def as_metrics(self) -> dict[str, float]:
        return {
            "plan_recall": self.recall,
            "plan_sequential": self.sequential,
            "plan_precision": self.precision,
            "s_plan": self.s_plan,
        }


def match_steps(pred: PredictedPlan, gt: PlanDAG) -> dict[int, Optional[str]]:
    """Greedy left-to-right injective matching on canonical action equality.

    Maps each predicted position (0-based) to the first unconsumed GT node
    with the same action, in DAG listing order, or ``None``.
    """
    free = [n for n in gt.nodes]
    out: dict[int, Optional[str]] = {}
    for pos, step in enumerate(pred.steps):
        hit = next((n for n in free if n.action == step), None)
        if hit is not None:
            free.remove(hit)
        out[pos] = hit.node_id if hit is not None else None
    return out


def _max_matching(n: int, adj: list[list[int]]) -> int:
    # Kuhn's augmenting paths; n is bounded by the number of GT nodes.
    match_r = [-1] * n

    def augment(u: int, seen: list[bool]) -> bool:
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                if match_r[v] == -1 or augment(match_r[v], seen):
                    match_r[v] = u
                    return True
        return False

    return sum(augment(u, [False] * n) for u in range(n))


def longest_consistent(nodes: Sequence[str], gt: PlanDAG) -> int:
    """Length of the longest subsequence with no later element preceding an earlier one in ``gt``.

    Pairs ``i < j`` with ``nodes[j]`` an ancestor of ``nodes[i]`` are
    inversions; inversion is a strict partial order on positions, so the
    answer is its largest antichain, i.e. ``n`` minus a maximum matching in
    the split bipartite graph (Dilworth / Koenig).
    """
    n = len(nodes)
    adj = [
        [j for j in range(i + 1, n) if gt.is_ancestor(nodes[j], nodes[i])]
        for i in range(n)
    ]
    return n - _max_matching(n, adj)


def score_plan(pred: PredictedPlan, gt: PlanDAG) -> PlanScore:
    if len(gt) == 0:
        raise PlanGraphError("ground-truth plan has no nodes")
    matching = match_steps(pred, gt)
    matched = [node for _, node in sorted(matching.items()) if node is not None]
    total = len(gt)
    recall = len(matched) / total
    sequential = longest_consistent(matched, gt) / total
    precision = len(matched) / len(pred.steps) if pred.steps else 0.0
    return PlanScore(
        recall=recall,
        sequential=sequential,
        precision=precision,
        s_plan=(0.5 * recall + 0.5 * sequential) * precision,
    )


def plan_from_steps(steps: Iterable[str]) -> PredictedPlan:
    return PredictedPlan(steps=list(steps))

"""Replay the published per-column scores through the aggregation engine.

Prints each table as Markdown with the recomputed Overall next to the
published one.

    python scripts/reproduce_tables.py
"""

from wowbench.aggregation import GroupScore, leaderboard
from wowbench.fixtures import COLUMNS, TABLE1_AUTONOMOUS, TABLE1_HUMAN, TABLE2
from wowbench.registry import AggregationMode
from wowbench.report import fmt2


def replay(title, table, mode):
    per = {
        model: [GroupScore(model, g, v, 1) for g, v in zip(COLUMNS, row[:4])]
        for model, row in table.items()
    }
    rows = leaderboard(per, mode=mode)
    print(f"\n### {title} ({mode.value})\n")
    print("| Rank | Model | " + " | ".join(COLUMNS) + " | Overall | Published | |diff| |")
    print("|---:|:---|" + "---:|" * (len(COLUMNS) + 3))
    worst = 0.0
    for r in rows:
        pub = table[r.model_id][4]
        diff = abs(r.overall - pub)
        worst = max(worst, diff)
        cols = " | ".join(fmt2(r.groups[g]) for g in COLUMNS)
        print(f"| {r.rank} | {r.model_id} | {cols} | {fmt2(r.overall)} | {pub:.2f} | {diff:.4f} |")
    print(f"\nmax |recomputed - published| = {worst:.4f}")


def main():
    replay("Table 1, autonomous evaluation", TABLE1_AUTONOMOUS, AggregationMode.UNWEIGHTED_MEAN)
    replay("Table 1, human evaluation", TABLE1_HUMAN, AggregationMode.SUM)
    replay("Table 2, agent refinement", TABLE2, AggregationMode.UNWEIGHTED_MEAN)


if __name__ == "__main__":
    main()

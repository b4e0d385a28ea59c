"""Regenerate the bundled fixture inputs under src/wowbench/data/fixtures/.

    python scripts/build_fixture_corpus.py [--seed 7]
"""

import argparse
import shutil
from pathlib import Path

from wowbench.fixtures import TABLE1_AUTONOMOUS, TABLE1_HUMAN, TABLE2, build_corpus, write_table_bundle

ROOT = Path(__file__).resolve().parents[1] / "src" / "wowbench" / "data" / "fixtures"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    corpus = ROOT / "corpus"
    if corpus.exists():
        shutil.rmtree(corpus)
    build_corpus(corpus, seed=args.seed)
    write_table_bundle(ROOT / "table1_autonomous", TABLE1_AUTONOMOUS)
    write_table_bundle(ROOT / "table1_human", TABLE1_HUMAN)
    write_table_bundle(ROOT / "table2", TABLE2)
    print(f"fixtures written under {ROOT}")


if __name__ == "__main__":
    main()

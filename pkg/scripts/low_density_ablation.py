"""Ablation table on a synthetic micropost-like dataset (about 1.8 mentions per document)."""
import argparse

from kblink import IngestConfig, Linker, build_index
from kblink.evaluation import format_table, run_ablation
from kblink.synthetic import generate_kb, low_density_dataset

GRID = [
    ("full", {}),
    ("no-context", {"use_context_search": False}),
    ("no-coref", {"use_coreference": False}),
    ("no-popularity", {"use_popularity": False}),
    ("no-acronyms", {"use_acronyms": False}),
    ("pagerank", {"algorithm": "pagerank"}),
    ("depth-1", {"depth": 1}),
]


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--docs", type=int, default=500)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--emerging-rate", type=float, default=0.5)
    args = p.parse_args()

    kb = generate_kb(seed=args.seed)
    data = low_density_dataset(kb, n_docs=args.docs, seed=args.seed, emerging_rate=args.emerging_rate)
    linker = Linker(build_index(kb.triples, IngestConfig.default(), kb.acronyms))
    print(f"{len(data.documents)} documents, {data.mention_count / len(data.documents):.2f} mentions/doc")
    print(format_table(run_ablation(linker, data, GRID, ["pr10", "pr10-55", "pr55-100"])), end="")


if __name__ == "__main__":
    main()

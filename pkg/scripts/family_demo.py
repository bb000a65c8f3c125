"""Link the Angelina/Jon/Brad sentence against the bundled mini KB and print the graph."""
import argparse
import json
from pathlib import Path

from kblink import Document, IngestConfig, Linker, build_index_from_files

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--sigma", type=float, default=0.87)
    p.add_argument("--depth", type=int, default=2)
    args = p.parse_args()

    index, _ = build_index_from_files([FIXTURES / "mini_kb.nt"], IngestConfig.default(), FIXTURES / "mini_acronyms.tsv")
    request = json.loads((FIXTURES / "family_document.jsonl").read_text())
    doc = Document.from_spans(request["text"], [(m["start"], m["end"]) for m in request["mentions"]])
    linker = Linker(index)
    result = linker.link_document(doc, linker.config.with_overrides({"sigma": args.sigma, "depth": args.depth}))

    print(request["text"])
    for m, cands in result.candidates.items():
        print(f"  {m.text!r}: {[c.resource.rsplit('/', 1)[-1] for c in cands]}")
    print()
    print(result.graph.dump(), end="")
    print()
    for a in result.assignments:
        print(f"{a.mention.text:>10} -> {a.iri}  ({a.score:.4f})")


if __name__ == "__main__":
    main()

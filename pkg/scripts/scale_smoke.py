"""Build an index over a synthetic KB and time a batch of link requests."""
import argparse
import tempfile
import time
from pathlib import Path

from kblink import IndexBundle, IngestConfig, Linker, build_index_from_files
from kblink.linker import LinkRequest
from kblink.rdf import serialize_ntriples
from kblink.synthetic import scale_kb, synthetic_documents


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--triples", type=int, default=100_000)
    p.add_argument("--requests", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    kb = scale_kb(args.triples, seed=args.seed)
    with tempfile.TemporaryDirectory() as tmp:
        nt = Path(tmp) / "kb.nt"
        nt.write_text(serialize_ntriples(kb.triples), encoding="utf-8")
        t0 = time.perf_counter()
        bundle, stats = build_index_from_files([nt], IngestConfig.default())
        bundle.save(Path(tmp) / "idx")
        build_s = time.perf_counter() - t0
        counts = bundle.manifest["counts"]
        print(f"build: {build_s:.2f}s  triples={counts['triples']} resources={counts['resources']} surfaces={counts['surfaces']}")

        linker = Linker(IndexBundle.load(Path(tmp) / "idx"))
    docs = synthetic_documents(kb, n_docs=args.requests, seed=args.seed + 1)
    requests = [LinkRequest(d.text, tuple(d.spans)) for d in docs.documents]
    t0 = time.perf_counter()
    linker.handle_many(requests, args.workers)
    link_s = time.perf_counter() - t0
    print(f"link:  {link_s:.2f}s for {len(requests)} requests ({docs.mention_count} mentions)")


if __name__ == "__main__":
    main()

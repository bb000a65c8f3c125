"""Command-line entry point: build-index, link, serve, eval."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional

from .config import FIELD_TYPES, Algorithm, LinkerConfig, read_config_file, resolve_config
from .evaluation import (
    GoldDataset,
    PopularityBin,
    TypesUnavailable,
    format_csv,
    format_table,
    read_grid,
    run_ablation,
)
from .index import BundleError, IndexBundle, build_index_from_files
from .ingest import IngestConfig
from .kbgraph import PopularityMethod
from .linker import Linker, LinkRequest, RequestError, dumps_line
from .rdf import ParseError

INDEX_ENV = "KBLINK_INDEX"

# flag names for the boolean switches; everything else uses the field name
_BOOL_FLAGS = {
    "use_popularity": "popularity",
    "use_acronyms": "acronyms",
    "use_context_search": "context",
    "use_coreference": "coref",
}

log = logging.getLogger("kblink")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("linker configuration")
    g.add_argument("--config", help="key=value linker config file")
    for name, kind in FIELD_TYPES.items():
        dest = f"cfg_{name}"
        if name in _BOOL_FLAGS:
            g.add_argument(
                f"--{_BOOL_FLAGS[name]}", dest=dest, action=argparse.BooleanOptionalAction, default=None
            )
            continue
        flag = "--" + name.replace("_", "-")
        if name == "algorithm":
            g.add_argument(flag, dest=dest, choices=[a.value for a in Algorithm])
        elif kind in ("int", int):
            g.add_argument(flag, dest=dest, type=int)
        elif kind in ("float", float):
            g.add_argument(flag, dest=dest, type=float)
        else:
            g.add_argument(flag, dest=dest)


def cli_overrides(args: argparse.Namespace) -> Dict[str, object]:
    return {
        key[4:]: value for key, value in vars(args).items() if key.startswith("cfg_") and value is not None
    }


def linker_config(args: argparse.Namespace) -> LinkerConfig:
    file_values = read_config_file(args.config) if getattr(args, "config", None) else None
    return resolve_config(file_values, None, cli_overrides(args))


def _index_dir(args: argparse.Namespace) -> str:
    path = args.index or os.environ.get(INDEX_ENV)
    if not path:
        raise SystemExit(f"error: no index directory (use --index or set {INDEX_ENV})")
    return path


def cmd_build_index(args: argparse.Namespace) -> int:
    out = args.out or os.environ.get(INDEX_ENV)
    if not out:
        print(f"error: no output directory (use --out or set {INDEX_ENV})", file=sys.stderr)
        return 2
    config = IngestConfig.from_file(args.ingest_config) if args.ingest_config else IngestConfig.default()
    try:
        bundle, stats = build_index_from_files(
            args.kb_files, config, args.acronyms_file, PopularityMethod(args.popularity_method), args.strict
        )
        bundle.save(out)
    except (ParseError, BundleError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    counts = bundle.manifest["counts"]
    for key in ("triples", "resources", "surfaces", "context_docs", "acronyms", "skipped_lines"):
        print(f"{key}\t{counts[key]}")
    print(f"index_version\t{bundle.index_version}")
    return 0


def _read_requests(stream) -> List[object]:
    """One entry per non-blank line: a LinkRequest or a RequestError."""
    out = []
    for lineno, line in enumerate(stream, 1):
        if not line.strip():
            continue
        try:
            out.append(LinkRequest.from_json(json.loads(line)))
        except json.JSONDecodeError as exc:
            out.append(RequestError("BAD_JSON", f"line {lineno}: {exc}"))
        except RequestError as exc:
            out.append(RequestError(exc.code, f"line {lineno}: {exc.message}"))
    return out


def cmd_link(args: argparse.Namespace) -> int:
    index = IndexBundle.load(_index_dir(args))
    linker = Linker(index, linker_config(args))
    overrides = cli_overrides(args)
    src = sys.stdin if args.input == "-" else open(args.input, encoding="utf-8")
    with src:
        entries = _read_requests(src)
    valid = [e for e in entries if isinstance(e, LinkRequest)]
    answers = iter(linker.handle_many(valid, args.workers, overrides, timing=args.timing))
    lines = []
    for e in entries:
        body = {"error": e.as_dict()} if isinstance(e, RequestError) else next(answers)
        lines.append(dumps_line(body) + "\n")
    if args.debug_dump:
        dumps = []
        for e in valid:
            try:
                doc = e.document()
            except RequestError:
                continue
            cfg = linker.config.with_overrides({"language": e.language})
            cfg = cfg.with_overrides(e.config_overrides).with_overrides(overrides)
            dumps.append(linker.link_document(doc, cfg).graph.dump())
        Path(args.debug_dump).write_text("".join(dumps), encoding="utf-8")
    if args.output == "-":
        sys.stdout.writelines(lines)
    else:
        Path(args.output).write_text("".join(lines), encoding="utf-8")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import LinkService

    service = LinkService(linker_config(args), cli_overrides(args))
    service.load_in_background(_index_dir(args))
    server = service.make_server(args.host, args.port)
    log.info("listening on %s:%d", *server.server_address[:2])
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    index = IndexBundle.load(_index_dir(args))
    linker = Linker(index, linker_config(args))
    dataset = GoldDataset.load(args.dataset)
    grid = read_grid(args.grid) if args.grid else [("default", {})]
    person_types = index.manifest.get("ingest_config", {}).get("person_type_iris", [])
    try:
        rows = run_ablation(linker, dataset, grid, args.filter, person_types)
    except TypesUnavailable as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(format_table(rows))
    if args.csv:
        Path(args.csv).write_text(format_csv(rows), encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kblink", description="Knowledge-base-agnostic entity linking.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-index", help="build an index directory from N-Triples files")
    p.add_argument("kb_files", nargs="+")
    p.add_argument("-o", "--out", help=f"output directory (default: ${INDEX_ENV})")
    p.add_argument("--ingest-config", help="JSON ingest config, merged over the defaults")
    p.add_argument("--acronyms-file", help="TSV of acronym<TAB>expansion")
    p.add_argument(
        "--popularity-method", default=PopularityMethod.PAGERANK.value, choices=[m.value for m in PopularityMethod]
    )
    p.add_argument("--strict", action="store_true", help="fail on the first malformed line")
    p.set_defaults(func=cmd_build_index)

    p = sub.add_parser("link", help="link documents given as JSON lines")
    p.add_argument("--index", help=f"index directory (default: ${INDEX_ENV})")
    p.add_argument("-i", "--input", default="-")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="report wall-clock timingMs instead of 0")
    p.add_argument("--debug-dump", help="write the disambiguation graph of every document here")
    _add_config_flags(p)
    p.set_defaults(func=cmd_link)

    p = sub.add_parser("serve", help="serve POST /link and GET /health")
    p.add_argument("--index", help=f"index directory (default: ${INDEX_ENV})")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    _add_config_flags(p)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("eval", help="D2KB micro scores over a gold dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--index", help=f"index directory (default: ${INDEX_ENV})")
    p.add_argument(
        "--filter", action="append", default=[], choices=["persons", *[b.value for b in PopularityBin]]
    )
    p.add_argument("--grid", help='JSON list of {"name": ..., "overrides": {...}}')
    p.add_argument("--csv", help="also write the table as CSV here")
    _add_config_flags(p)
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (BundleError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Admin command line: serve the API, ingest seed files, print reports, check the lexicon.

Exit code 0 on success, 1 with a diagnostic on stderr otherwise.
"""

from __future__ import annotations

import argparse
import sys

from .config import ServiceConfig, load_config
from .errors import WaypostError
from .identity import load_default_lexicon, namespace_size, validate_lexicon
from .reports import mode_share_report
from .seeds import ingest_seed_notes
from .store import Store


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="waypost")
    parser.add_argument("--config", metavar="PATH", help="JSON config file with overrides")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the REST API server")
    serve.add_argument("--host", default=None)
    serve.add_argument("--port", type=int, default=None)

    seed = sub.add_parser("seed", help="ingest a line-delimited JSON seed file")
    seed.add_argument("file", help="path to the seed file")

    report = sub.add_parser("report", help="print a report")
    report.add_argument("kind", choices=["mode-share"])

    lexicon = sub.add_parser("lexicon", help="lexicon utilities")
    lexicon.add_argument("action", choices=["check"])

    return parser


def _open_store(config: ServiceConfig, *, need_file: bool) -> Store:
    if need_file and not config.data_path:
        raise WaypostError(
            "this command needs a persistent store; set data_path in the config file"
        )
    return Store(config.data_path)


def _cmd_serve(config: ServiceConfig, args) -> int:
    import uvicorn

    from .api import create_app

    if args.host:
        config.host = args.host
    if args.port:
        config.port = args.port
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


def _cmd_seed(config: ServiceConfig, args) -> int:
    store = _open_store(config, need_file=True)
    try:
        report = ingest_seed_notes(args.file, store, epsilon_m=config.dedup_epsilon_m)
    finally:
        store.close()
    print(f"ingested {report.ingested} notes ({report.duplicates} duplicates skipped)")
    for failure in report.failures:
        print(f"FAILED {failure.reason}", file=sys.stderr)
    return 1 if report.failures else 0


def _cmd_report(config: ServiceConfig, args) -> int:
    store = _open_store(config, need_file=True)
    try:
        rows = mode_share_report(store)
    finally:
        store.close()
    if not rows:
        print("no check-ins recorded")
        return 0
    width = max(len(r.mode) for r in rows)
    for row in rows:
        print(f"{row.mode:<{width}}  {row.count:>7}  {row.percent:>3}%")
    return 0


def _cmd_lexicon(config: ServiceConfig, args) -> int:
    lexicon = load_default_lexicon()
    problems = validate_lexicon(lexicon)
    if problems:
        for p in problems:
            print(f"PROBLEM: {p}", file=sys.stderr)
        return 1
    print(f"lexicon ok: {namespace_size(lexicon):,} possible pseudonyms")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.command == "serve":
            return _cmd_serve(config, args)
        if args.command == "seed":
            return _cmd_seed(config, args)
        if args.command == "report":
            return _cmd_report(config, args)
        if args.command == "lexicon":
            return _cmd_lexicon(config, args)
    except WaypostError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())

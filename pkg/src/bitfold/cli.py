"""Command line entry points: serve, bench, ddl."""
from __future__ import annotations

import argparse
import os
import sys
import tempfile

from . import bench as bench_mod
from .hierarchy import parse_hierarchy
from .service import DEFAULT_LISTEN, ServiceConfig, create_app
from .storage import SqliteStore, create_backend
from .storage import adjacency, flat


def _load_hierarchy(path: str):
    with open(path, encoding="utf-8") as f:
        return parse_hierarchy(f.read())


def _serve(args: argparse.Namespace) -> int:
    import uvicorn

    config = ServiceConfig.from_env(
        hierarchy_path=args.hierarchy,
        store_dsn=args.dsn,
        listen_address=args.listen,
        backend=args.backend,
        static_dir=args.static,
    )
    app = create_app(config)
    host, _, port = config.listen_address.rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


def _bench(args: argparse.Namespace) -> int:
    h = _load_hierarchy(args.hierarchy)
    workload = bench_mod.generate_workload(h, args.seed, args.visitors, args.density)
    backends = ["pbfd", "traditional"] if args.backend == "both" else [args.backend]
    results = []
    say = print if not args.quiet else (lambda *_: None)
    with tempfile.TemporaryDirectory(prefix="bitfold-bench-") as workdir:
        for name in backends:
            store = SqliteStore(os.path.join(workdir, f"{name}.db"))
            backend = create_backend(name, store, h)
            say(f"running {name}: {args.visitors} visitors, density {args.density}, seed {args.seed}")
            try:
                results.extend(
                    bench_mod.run(backend, workload, threads=args.threads, progress=say)
                )
            except bench_mod.BenchGateError as exc:
                print(f"correctness gate failed: {exc}", file=sys.stderr)
                return 2
            finally:
                store.close()
    if args.out:
        bench_mod.write_csv(results, args.out)
        say(f"wrote {args.out}")
    for r in results:
        if r.stats:
            say(
                f"{r.backend:<12} {r.op:<7} n={r.stats.count} mean={r.stats.mean:.0f}ns "
                f"median={r.stats.median}ns p95={r.stats.p95}ns "
                f"logical={r.storage.logical_bytes}B physical={r.storage.physical_bytes}B"
            )
    if len(backends) == 2:
        by_key = {(r.backend, r.op): r for r in results}
        reports = [
            bench_mod.compare(by_key[("traditional", op)], by_key[("pbfd", op)])
            for op in bench_mod.OPS
        ]
        print(bench_mod.render_comparison(reports))
    return 0


def _ddl(args: argparse.Namespace) -> int:
    if args.backend == "traditional":
        sys.stdout.write(adjacency.emit_schema_ddl())
        return 0
    h = _load_hierarchy(args.hierarchy)
    if args.view:
        sys.stdout.write(flat.emit_report_view_ddl(h))
    else:
        sys.stdout.write(flat.emit_schema_ddl(h))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bitfold")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the selection service")
    serve.add_argument("--hierarchy", default=None, help="hierarchy document (env BITFOLD_HIERARCHY)")
    serve.add_argument("--dsn", default=None, help="store path or :memory: (env BITFOLD_DSN)")
    serve.add_argument("--listen", default=None, help=f"host:port (env BITFOLD_LISTEN, default {DEFAULT_LISTEN})")
    serve.add_argument("--backend", default=None, choices=["pbfd", "traditional"],
                       help="storage backend (env BITFOLD_BACKEND, default pbfd)")
    serve.add_argument("--static", default=None,
                       help="serve a built wizard bundle at /ui (env BITFOLD_STATIC)")
    serve.set_defaults(func=_serve)

    bench = sub.add_parser("bench", help="benchmark both storage layouts")
    bench.add_argument("--hierarchy", default="places.json")
    bench.add_argument("--backend", default="both", choices=["pbfd", "traditional", "both"])
    bench.add_argument("--visitors", type=int, default=10000)
    bench.add_argument("--density", type=float, default=0.5)
    bench.add_argument("--seed", type=int, default=42)
    bench.add_argument("--out", default=None, help="CSV output path")
    bench.add_argument("--threads", type=int, default=1)
    bench.add_argument("--quiet", action="store_true")
    bench.set_defaults(func=_bench)

    ddl = sub.add_parser("ddl", help="print generated DDL")
    ddl.add_argument("--hierarchy", default="places.json")
    ddl.add_argument("--backend", default="pbfd", choices=["pbfd", "traditional"])
    ddl.add_argument("--view", action="store_true", help="print the report view instead of tables")
    ddl.set_defaults(func=_ddl)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

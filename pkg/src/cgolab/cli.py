"""``cgolab run <config>`` / ``cgolab list``.

Exit codes: 0 success, 2 an acceptance gate failed, 1 execution or config error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import platform
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import metadata
from pathlib import Path

import numpy as np
import scipy

from .config import ConfigError, parse_config
from .experiments import CATALOG
from .phase import GENERIC_TAU_FACTOR
from .rng import stream

HEADER = ["experiment", "n", "N", "L", "tau", "sample_id", "quantity", "value"]

log = logging.getLogger("cgolab")


def _fmt(x):
    if x == "" or x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _sort_key(row):
    exp, tau, sid, q, _ = row
    return (exp, -1.0 if tau == "" else float(tau), sid, q)


def execute(cfg, threads=1):
    """Run every experiment of ``cfg``; returns ``(rows, gates)`` in canonical order."""
    unknown = [e for e in cfg.experiments if e not in CATALOG]
    if unknown:
        raise ConfigError(f"experiment.name: unknown experiment(s) {', '.join(unknown)}; see `cgolab list`")
    jobs = []
    for name in cfg.experiments:
        for key, fn in CATALOG[name].cells(cfg):
            jobs.append((name, key, fn))

    def run(job):
        name, key, fn = job
        return name, fn(stream(cfg.seed, name, *key))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            done = list(pool.map(run, jobs))
    else:
        done = [run(j) for j in jobs]

    rows, gates = [], []
    per_exp = {}
    for name, res in done:
        per_exp.setdefault(name, []).extend(res.rows)
        gates.extend(res.gates)
    for name, rs in per_exp.items():
        summary = CATALOG[name].summary
        if summary is not None:
            rs = rs + list(summary(cfg, rs))
        rows.extend((name,) + tuple(r) for r in rs)
    rows.sort(key=_sort_key)
    gates.sort(key=lambda g: (g.experiment, g.name))
    return rows, gates


def render_csv(cfg, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for exp, tau, sid, q, v in rows:
        w.writerow([exp, cfg.n, cfg.N, _fmt(cfg.L), _fmt(tau), sid, q, _fmt(v)])
    return buf.getvalue()


def _version():
    try:
        return metadata.version("cgolab")
    except metadata.PackageNotFoundError:
        return "unknown"


def manifest(cfg, gates):
    return {
        "config_sha256": cfg.digest(),
        "seed": cfg.seed,
        "experiments": cfg.experiments,
        "grid": {"n": cfg.n, "N": cfg.N, "L": cfg.L},
        "tolerances": cfg.tolerances,
        "generic_tau_factor": GENERIC_TAU_FACTOR,
        "versions": {
            "cgolab": _version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "gates": [
            {"experiment": g.experiment, "name": g.name, "value": g.value, "limit": g.limit, "passed": g.passed}
            for g in gates
        ],
        "all_gates_passed": all(g.passed for g in gates),
    }


def cmd_run(args):
    try:
        text = Path(args.config).read_text()
    except OSError as e:
        print(f"error: cannot read config: {e}", file=sys.stderr)
        return 1
    try:
        cfg = parse_config(text, seed=args.seed, out=args.out)
        rows, gates = execute(cfg, threads=args.threads)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # noqa: BLE001 -- any failure inside a run maps to exit 1
        log.debug("run failed", exc_info=True)
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "results.csv").write_text(render_csv(cfg, rows))
        (out / "manifest.json").write_text(json.dumps(manifest(cfg, gates), sort_keys=True, indent=2) + "\n")
    except OSError as e:
        print(f"error: cannot write results: {e}", file=sys.stderr)
        return 1
    failed = [g for g in gates if not g.passed]
    for g in failed:
        print(f"gate failed: {g.experiment}: {g.name}: {g.value:.3e} vs {g.limit:.3e}", file=sys.stderr)
    print(f"{len(rows)} rows, {len(gates) - len(failed)}/{len(gates)} gates passed -> {out}")
    return 2 if failed else 0


def catalog_text():
    lines = []
    for name in sorted(CATALOG):
        e = CATALOG[name]
        lines.append(name)
        lines.append(f"  checks:     {e.checks}")
        lines.append(f"  operations: {', '.join(e.operations)}")
        lines.append(f"  requires:   {', '.join('physics.' + k for k in e.required)}")
        lines.append(f"  quantities: {', '.join(e.quantities)}")
    return "\n".join(lines) + "\n"


def main(argv=None):
    ap = argparse.ArgumentParser(prog="cgolab", description="CGO estimate and recovery experiments")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run the experiments named in a config")
    r.add_argument("config")
    r.add_argument("--seed", type=int, default=None, help="overrides experiment.seed")
    r.add_argument("--out", default=None, help="output directory (overrides output.path)")
    r.add_argument("--threads", type=int, default=1)
    sub.add_parser("list", help="print the experiment catalog")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    if args.cmd == "list":
        sys.stdout.write(catalog_text())
        return 0
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 1
    return cmd_run(args)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line driver.

Exit codes: 0 success, 2 invalid input or parameters, 3 numerical failure.
Every subcommand accepts ``--config FILE.json`` whose keys are flag names
(dashes or underscores); flags given on the command line win.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import methods
from .alt import PRES_MAX_NODES
from .analysis import (
    LabelSet,
    center_kernel,
    cmds_coordinates,
    evaluate,
    gen_sbm,
    kernel_kmeans,
    propagate_1nn,
    psd_clip,
    ratio_curve,
    sigmoid_ct_kernel,
)
from .errors import GraphDistError, NumericalError, ValidationError
from .fixtures import FIXTURES, get_fixture
from .graph import CostedGraph, dumps_graph, laplacian_pair, load_graph, write_matrix_csv, write_meta
from .oracle import path_sums
from .rsp import build_core

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3
PARAM_FLAGS = ("beta", "alpha", "gamma", "lam", "p")


# -- helpers ----------------------------------------------------------------

def load_input(spec: str) -> CostedGraph:
    """A path to an edge-list file, or the name of a built-in fixture."""
    path = Path(spec)
    if path.exists():
        return load_graph(path)
    if spec in FIXTURES:
        return get_fixture(spec)
    raise ValidationError(f"{spec!r} is neither a file nor a fixture ({', '.join(sorted(FIXTURES))})")


def read_labels(path: str, n: int) -> LabelSet:
    labels = np.full(n, -1, dtype=int)
    mask = np.zeros(n, dtype=bool)
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValidationError(f"{path} line {lineno}: expected 'node<TAB>label'")
        try:
            node, lab = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValidationError(f"{path} line {lineno}: node and label must be integers") from None
        if not 0 <= node < n:
            raise ValidationError(f"{path} line {lineno}: node {node} outside 0..{n - 1}")
        labels[node], mask[node] = lab, True
    return LabelSet(labels, mask)


def format_labels(labels) -> str:
    return "".join(f"{i}\t{int(c)}\n" for i, c in enumerate(labels))


def emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def method_params(args) -> dict:
    return {k: getattr(args, k) for k in PARAM_FLAGS if getattr(args, k, None) is not None}


def compute_kw(args) -> dict:
    return {"threads": args.threads, "pres_tol": args.pres_tol, "pres_cap": args.pres_cap}


def distance_from_args(g, args):
    params = methods.resolve_params(args.method, method_params(args))
    return methods.compute(g, args.method, params, **compute_kw(args)), params


def _csv(rows, header=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(x) -> str:
    return format(float(x), ".17g")


# -- subcommands ------------------------------------------------------------

def cmd_dist(args) -> int:
    g = load_input(args.input)
    D, params = distance_from_args(g, args)
    write_matrix_csv(D.values, args.output)
    write_meta(args.output, D.method, params, g)
    return EXIT_OK


def cmd_ratio_curve(args) -> int:
    g = load_input(args.input)
    fam = methods.get_family(args.method)
    if fam.param is None:
        raise ValidationError(f"method {fam.name} has no parameter to sweep")
    if (args.min is None) != (args.max is None):
        raise ValidationError("--min and --max go together")
    grid = None
    if args.min is not None:
        grid = np.linspace(args.min, args.max, args.points) if fam.param == "lam" else np.geomspace(args.min, args.max, args.points)
    rows = ratio_curve(g, fam.name, grid=grid, points=args.points, **compute_kw(args))
    text = _csv([[_num(v) for v in row] for row in rows], header=[fam.param, "d01", "d12", "ratio"])
    emit(text, args.output)
    return EXIT_OK


def _kernel(g, args):
    if args.kernel == "sigct":
        K = sigmoid_ct_kernel(laplacian_pair(g), args.a)
    else:
        D, _ = distance_from_args(g, args)
        K = center_kernel(D)
    return psd_clip(K) if args.psd_clip else K


def cmd_cluster(args) -> int:
    g = load_input(args.input)
    part = kernel_kmeans(_kernel(g, args), args.k, restarts=args.restarts, seed=args.seed, threads=args.threads)
    emit(format_labels(part.assignment), args.output)
    print(f"inertia\t{_num(part.inertia)}")
    return EXIT_OK


def cmd_classify(args) -> int:
    g = load_input(args.input)
    seeds = read_labels(args.labels, g.n)
    D, _ = distance_from_args(g, args)
    emit(format_labels(propagate_1nn(D, seeds).labels), args.output)
    return EXIT_OK


def cmd_mds(args) -> int:
    g = load_input(args.input)
    D, _ = distance_from_args(g, args)
    emb = cmds_coordinates(D, args.dims)
    emit(_csv([[_num(v) for v in row] for row in emb.coords]), args.output)
    if emb.zero_filled:
        print(f"zero-filled dimensions: {', '.join(str(j) for j in emb.zero_filled)}", file=sys.stderr)
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    g = load_input(args.input)
    core = build_core(g, args.beta)
    rows, ok = [], True
    for s in range(g.n):
        for t in range(g.n):
            ps = path_sums(g, s, t, args.beta, t_max=args.tmax)
            closed = core.Zh[s, t]
            diff = abs(closed - ps.z)
            ok &= diff <= ps.tail_bound + 1e-12
            rows.append([s, t, _num(closed), _num(ps.z), _num(ps.tail_bound), _num(diff)])
    emit(_csv(rows, header=["s", "t", "closed_form", "oracle", "tail_bound", "abs_diff"]), args.output)
    if not ok:
        print("closed form and oracle disagree beyond the tail bound", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_gen_sbm(args) -> int:
    try:
        blocks = [int(b) for b in str(args.blocks).split(",")]
    except ValueError:
        raise ValidationError(f"--blocks must be comma-separated integers, got {args.blocks!r}") from None
    g, labels = gen_sbm(blocks, args.pin, args.pout, seed=args.seed)
    Path(args.output).write_text(dumps_graph(g))
    Path(args.labels_out or f"{args.output}.labels.tsv").write_text(format_labels(labels))
    return EXIT_OK


def cmd_eval(args) -> int:
    if len(args.input) != len(args.labels):
        raise ValidationError("give one --labels file per -i graph")
    datasets = {}
    for spec, lab in zip(args.input, args.labels):
        g = load_input(spec)
        ls = read_labels(lab, g.n)
        if not ls.mask.all():
            raise ValidationError(f"{lab}: evaluation needs a label for every node")
        datasets[Path(spec).stem] = (g, ls.labels)
    names = [m.strip() for m in args.methods.split(",") if m.strip()]
    rates = [float(r) for r in str(args.rates).split(",")]
    res = evaluate(
        datasets,
        names,
        rates=rates,
        repeats=args.repeats,
        folds=args.folds,
        grid_points=args.grid_points,
        seed=args.seed,
        **compute_kw(args),
    )
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for key in sorted(res.tables):
        dname, rate = key.rsplit("@", 1)
        for m in sorted(res.tables[key]):
            for rep, (acc, val) in enumerate(zip(res.tables[key][m], res.chosen[key][m])):
                rows.append([dname, rate, m, rep, _num(acc), "" if val is None else _num(val)])
    (out / "scores.csv").write_text(_csv(rows, header=["dataset", "rate", "method", "repeat", "accuracy", "param"]))
    (out / "copeland.csv").write_text(_csv([[r.method, r.rank, r.score] for r in res.ranking], header=["method", "rank", "score"]))
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file of flag values; command-line flags take precedence")
    p.add_argument("--json-errors", action="store_true", help="report errors as one JSON object on stderr")
    p.add_argument("--threads", type=int, default=1, help="worker threads for pair-parallel work (default 1)")
    p.add_argument("--pres-tol", type=float, default=1e-9, help="p-resistance gradient-norm tolerance (default 1e-9)")
    p.add_argument("--pres-cap", type=int, default=PRES_MAX_NODES, help=f"largest graph accepted by p-resistance (default {PRES_MAX_NODES})")


def _add_method(p: argparse.ArgumentParser, default: str = "fe") -> None:
    p.add_argument("--method", default=default, choices=sorted(methods.FAMILIES), help=f"distance family (default {default})")
    p.add_argument("--beta", type=float, help="inverse temperature for rsp/fe (defaults 0.02 / 0.07)")
    p.add_argument("--alpha", type=float, help="logfor alpha (default 0.95)")
    p.add_argument("--gamma", type=float, help="logfor gamma (default 1)")
    p.add_argument("--lam", type=float, help="spct mixing weight in [0, 1] (default 1)")
    p.add_argument("--p", type=float, help="pres exponent in [1, 2] (default 1.5)")


def _add_input(p: argparse.ArgumentParser, **kw) -> None:
    p.add_argument("-i", "--input", help="edge-list TSV file or fixture name", **kw)


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(prog="graphdist", description="Parametrized graph node distances.")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = sub.add_parser("dist", help="compute a distance matrix")
    _add_input(p, required=True)
    p.add_argument("-o", "--output", required=True, help="output CSV; metadata goes to <output>.meta.json")
    _add_method(p)
    p.set_defaults(func=cmd_dist)
    subs["dist"] = p

    p = sub.add_parser("ratio-curve", help="D(0,1)/D(1,2) over a parameter grid")
    _add_input(p, default="ext-triangle")
    p.add_argument("--method", required=True, choices=list(methods.PARAMETRIZED))
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--min", type=float, help="grid start (log-spaced except for spct)")
    p.add_argument("--max", type=float, help="grid end")
    p.add_argument("-o", "--output", help="CSV file (default standard output)")
    p.set_defaults(func=cmd_ratio_curve)
    subs["ratio-curve"] = p

    p = sub.add_parser("cluster", help="kernel k-means")
    _add_input(p, required=True)
    p.add_argument("--kernel", choices=("centered", "sigct"), default="centered", help="centered distance kernel or sigmoid commute-time kernel")
    _add_method(p)
    p.add_argument("--a", type=float, default=26.0, help="sigmoid kernel slope (default 26)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--psd-clip", action="store_true", help="zero negative kernel eigenvalues before clustering")
    p.add_argument("-o", "--output", help="partition TSV (default standard output)")
    p.set_defaults(func=cmd_cluster)
    subs["cluster"] = p

    p = sub.add_parser("classify", help="propagate seed labels by nearest neighbor")
    _add_input(p, required=True)
    p.add_argument("--labels", required=True, help="TSV node<TAB>label of the known nodes")
    _add_method(p)
    p.add_argument("-o", "--output", help="labels TSV (default standard output)")
    p.set_defaults(func=cmd_classify)
    subs["classify"] = p

    p = sub.add_parser("mds", help="classical MDS coordinates")
    _add_input(p, required=True)
    _add_method(p)
    p.add_argument("--dims", type=int, default=2)
    p.add_argument("-o", "--output", help="coordinates CSV (default standard output)")
    p.set_defaults(func=cmd_mds)
    subs["mds"] = p

    p = sub.add_parser("oracle-check", help="certify hitting partition functions against path sums")
    _add_input(p, required=True)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--tmax", type=int, default=40, help="longest walk summed")
    p.add_argument("-o", "--output", help="CSV file (default standard output)")
    p.set_defaults(func=cmd_oracle_check)
    subs["oracle-check"] = p

    p = sub.add_parser("gen-sbm", help="generate a planted-partition graph")
    p.add_argument("--blocks", required=True, help="comma-separated block sizes")
    p.add_argument("--pin", type=float, required=True)
    p.add_argument("--pout", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True, help="edge-list TSV")
    p.add_argument("--labels-out", help="labels TSV (default <output>.labels.tsv)")
    p.set_defaults(func=cmd_gen_sbm)
    subs["gen-sbm"] = p

    p = sub.add_parser("eval", help="labeling-rate sweep with cross-validated tuning and Copeland ranking")
    p.add_argument("-i", "--input", action="append", required=True, help="graph (repeatable)")
    p.add_argument("--labels", action="append", required=True, help="labels TSV, one per graph")
    p.add_argument("--methods", default="sp,ct,spct,rsp,fe,logfor")
    p.add_argument("--rates", default="0.1,0.3,0.5,0.7,0.9")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--grid-points", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True, help="output directory for scores.csv and copeland.csv")
    p.set_defaults(func=cmd_eval)
    subs["eval"] = p

    for p in subs.values():
        _add_common(p)
    return parser, subs


def _apply_config(argv, parser, subs):
    """Feed JSON config values in as subparser defaults, under explicit flags."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        cfg = json.loads(Path(known.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config {known.config}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ValidationError("config must be a JSON object")
    command = next((a for a in argv if a in subs), None)
    if command is None:
        return
    target = subs[command]
    dests = {a.dest for a in target._actions}
    values = {}
    for key, val in cfg.items():
        dest = key.replace("-", "_")
        if dest not in dests or dest in ("config", "func", "help"):
            raise ValidationError(f"config key {key!r} is not a flag of {command}")
        values[dest] = val
    # Config satisfies required flags too.
    for action in target._actions:
        if action.dest in values:
            action.required = False
    target.set_defaults(**values)


def _report(exc: Exception, code: int, as_json: bool) -> int:
    if as_json:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}), file=sys.stderr)
    else:
        print(f"error: {exc}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    as_json = "--json-errors" in argv
    parser, subs = build_parser()
    try:
        _apply_config(argv, parser, subs)
        args = parser.parse_args(argv)
        as_json = as_json or args.json_errors
        return args.func(args)
    except ValidationError as exc:
        return _report(exc, EXIT_INVALID, as_json)
    except NumericalError as exc:
        return _report(exc, EXIT_NUMERICAL, as_json)
    except GraphDistError as exc:
        return _report(exc, EXIT_INVALID, as_json)
    except (OSError, KeyError) as exc:
        return _report(exc, EXIT_INVALID, as_json)


if __name__ == "__main__":
    sys.exit(main())

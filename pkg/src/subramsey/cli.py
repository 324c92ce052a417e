"""Command line entry point: ``subramsey <command> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import numerics
from .bigraph import is_expanding, load_edge_list, save_edge_list
from .errors import SubRamseyError
from .goodembed import format_embedding_tsv
from .joinedness import extract_expander, is_alpha_joined, verify_extraction
from .quasirandom import QuasiParams, check_density, check_discrepancy, sample_host
from .subdivision import SubdivisionSpec, check_hypotheses, embed_subdivision, parse_base_graph, parse_sigma
from .trial import TrialConfig, run_batch, run_trial


def _emit(data, path=None):
    text = json.dumps(data, indent=2, sort_keys=True)
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


def _range(text: str) -> list[int]:
    lo, _, hi = text.partition("..")
    return list(range(int(lo), int(hi or lo) + 1))


def _alpha(text: str) -> Fraction:
    """Exact value of ``"1/32"`` or ``"0.03125"``."""
    return Fraction(text)


def _load_config(path) -> TrialConfig:
    return TrialConfig.from_json(json.loads(Path(path).read_text()))


def cmd_gen(args):
    g = sample_host(args.N, args.p, args.seed, jobs=args.jobs or 1)
    save_edge_list(g, args.out)
    _emit({"N": args.N, "p": args.p, "seed": args.seed, "edges": g.num_edges, "out": args.out})


def cmd_check(args):
    g = load_edge_list(args.host)
    if args.mode == "expanding":
        v = is_expanding(g, args.n, args.D, mode="sampled" if args.sampled else "exhaustive",
                         trials=args.trials, seed=args.seed)
        w = v.witness
        _emit({"pass": v.ok, "witness": w.to_json() if w else None, "checked": v.checked}, args.report)
        return 0 if v.ok else 1
    q = QuasiParams(g.size1, args.p, args.epsilon, args.delta, args.c3n)
    if args.mode == "density":
        ok, e, (lo, hi) = check_density(g, q, args.n)
        _emit({"pass": ok, "edges": e, "window": [lo, hi]}, args.report)
        return 0 if ok else 1
    rep = check_discrepancy(g, q, "sampled" if args.sampled else "exhaustive", trials=args.trials, seed=args.seed)
    _emit(rep.to_json(), args.report)
    return 0 if rep.passed else 1


def cmd_check_joined(args):
    v = is_alpha_joined(load_edge_list(args.input), args.alpha)
    _emit(v.to_json(), args.report)
    return 0 if v.joined else 1


def cmd_extract(args):
    g = load_edge_list(args.input)
    res = extract_expander(g, args.alpha, args.y_seed, max_size=args.max_size)
    out = res.to_json()
    if args.verify:
        v = verify_extraction(res.subgraph()[0], args.alpha, g.size1)
        out["verify"] = {"pass": v.ok, "witness": [v.witness[0], v.witness[1].to_json()] if v.witness else None}
    _emit(out, args.out_report)


def cmd_embed(args):
    host = load_edge_list(args.host)
    base = parse_base_graph(Path(args.base).read_text())
    spec = SubdivisionSpec(base, parse_sigma(Path(args.sigma).read_text(), base))
    hyp = check_hypotheses(spec, args.alpha, host.size1)
    res = embed_subdivision(host, spec, args.alpha, mode=args.mode, s_max=args.s_max, mirror=args.mirror)
    if args.out:
        Path(args.out).write_text(format_embedding_tsv(res.host_embedding(host).forward))
    _emit({"hypotheses": hyp.to_json(), **res.to_json()}, args.report)
    return 0 if res.audit.passed else 1


def cmd_params(args):
    _emit(numerics.compute_params(args.r, args.D, args.n).to_json())


def cmd_verify_numerics(args):
    rows = numerics.verify_numerics(_range(args.D_range), _range(args.r_range), args.n)
    out = sys.stdout if args.csv in (None, "-") else open(args.csv, "w", newline="")
    writer = csv.DictWriter(out, fieldnames=list(rows[0]))
    writer.writeheader()
    writer.writerows(rows)
    if out is not sys.stdout:
        out.close()
    if args.figures:
        from . import plotting

        d = Path(args.figures)
        d.mkdir(parents=True, exist_ok=True)
        plotting.plot_f_deficit(rows, d / "f_deficit.png")
        plotting.plot_delta_margins(rows, d / "delta_margins.png")
        plotting.plot_size_bound(rows, d / "size_bound.png")
    ok = all(r["f_lt_1"] and r["gap_ok"] and r["delta_window_ok"] for r in rows)
    return 0 if ok else 1


def cmd_trial(args):
    rep = run_trial(_load_config(args.config))
    _emit(rep.to_json(), args.report)


def cmd_batch(args):
    cfg = _load_config(args.config)
    batch = run_batch(cfg, args.trials, args.jobs)
    _emit(batch, args.report)
    if args.figures:
        from . import plotting

        d = Path(args.figures)
        d.mkdir(parents=True, exist_ok=True)
        plotting.plot_batch(batch, d / "batch_classes.png")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="subramsey", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="sample a seeded G(N, N, p) host")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("check", help="density, discrepancy or expansion certificate")
    p.add_argument("--host", "--in", dest="host", required=True)
    p.add_argument("--mode", choices=("density", "discrepancy", "expanding"), required=True)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--delta", type=float, default=1.5)
    p.add_argument("--c3n", type=int, default=1)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--D", type=float, default=1)
    p.add_argument("--sampled", action="store_true")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("check-joined", help="exact alpha-joinedness check")
    p.add_argument("--alpha", type=_alpha, required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_check_joined)

    p = sub.add_parser("extract", help="expander extraction")
    p.add_argument("--alpha", type=_alpha, required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out-report")
    p.add_argument("--y-seed", default="first", type=lambda s: s if s == "first" else int(s))
    p.add_argument("--max-size", type=int)
    p.add_argument("--verify", action="store_true", help="check all three expansion bullets by enumeration")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("embed", help="embed H^sigma into a host")
    p.add_argument("--host", required=True)
    p.add_argument("--base", required=True)
    p.add_argument("--sigma", required=True)
    p.add_argument("--alpha", type=_alpha, required=True)
    p.add_argument("--mode", choices=("certified", "greedy"), default="greedy")
    p.add_argument("--s-max", type=int, default=2)
    p.add_argument("--mirror", action="store_true")
    p.add_argument("--out")
    p.add_argument("--report")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("params", help="print the parameter system")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--n", type=int, default=1)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("verify-numerics", help="numeric claims table (CSV) and figures")
    p.add_argument("--D-range", default="2..64")
    p.add_argument("--r-range", default="2..10")
    p.add_argument("--n", type=int, default=10**6)
    p.add_argument("--csv", default=None)
    p.add_argument("--figures", default=None, help="directory for PNG figures")
    p.set_defaults(func=cmd_verify_numerics)

    p = sub.add_parser("trial", help="single end-to-end trial")
    p.add_argument("--config", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_trial)

    p = sub.add_parser("batch", help="seeded batch of trials")
    p.add_argument("--config", required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: SUBRAMSEY_THREADS or the CPU count)")
    p.add_argument("--report")
    p.add_argument("--figures", default=None)
    p.set_defaults(func=cmd_batch)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args) or 0
    except SubRamseyError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

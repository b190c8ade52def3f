"""Command-line front end: generate, solve, run experiments, ingest, compare.

Exit codes: 0 success, 1 operational failure (bad files, infeasible
parameters), 2 usage or config-schema errors. Summary lines go to stdout,
diagnostics to stderr, and every output is deterministic for fixed seeds
(timings are never printed).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from graphsym.afp import AfpOptions, afp_solve
from graphsym.brain import binarize_density, connected_components, load_matrix, lr_from_file, lr_halves
from graphsym.generators import (
    distort_lrm,
    gen_ba,
    gen_er,
    gen_grid,
    gen_lrm,
    gen_sbm,
    random_perm_max_fp,
    reshuffle_perm,
    rewire_k,
)
from graphsym.graphs import (
    Graph,
    Permutation,
    hamming,
    load_graph,
    save_graph,
    save_permutation,
    symmetry_coefficient,
)
from graphsym.harness import (
    ConfigError,
    ExperimentConfig,
    read_records_csv,
    run_experiment,
    write_records_csv,
)
from graphsym.qsa import QsaOptions, qsa_solve
from graphsym.reports import InitSpec, stable_seed
from graphsym.stats import bonferroni, cohens_d_paired, paired_t_test

__all__ = ["main", "parse_init_spec"]


def _fmt(v: float) -> str:
    return format(float(v), ".10g")


def _int_list(text: str) -> list[int]:
    try:
        return [int(p) for p in text.replace("x", ",").split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


# ---------------------------------------------------------------------------
# init specs
# ---------------------------------------------------------------------------


def parse_init_spec(spec: str, n: int, seed: int, max_fp=None, lr: Permutation | None = None) -> Permutation:
    """Resolve a composable init spec string to a concrete permutation.

    Grammar: identity | random | lr | lr-file:<path>
           | reshuffle:<inner>:<swaps>=<k>:seed=<s>
    where <swaps> is spelled 'swaps', 'l', or the script ell. 'lr' means the
    supplied lr permutation when one is given, else the half-swap on n.
    """
    if spec == "identity":
        return Permutation.identity(n)
    if spec == "random":
        cap = n if max_fp is None else max_fp
        return random_perm_max_fp(n, cap, stable_seed(seed, "init"))
    if spec == "lr":
        return lr if lr is not None else lr_halves(n)
    if spec.startswith("lr-file:"):
        return lr_from_file(spec[len("lr-file:"):], n)
    if spec.startswith("reshuffle:"):
        rest = spec[len("reshuffle:"):]
        parts = rest.rsplit(":", 2)
        if len(parts) != 3:
            raise ValueError(f"reshuffle spec needs ':<swaps>=<k>:seed=<s>' suffix: {spec!r}")
        inner, k_tok, s_tok = parts
        k = None
        for prefix in ("swaps=", "l=", "ℓ="):
            if k_tok.startswith(prefix):
                k = int(k_tok[len(prefix):])
        if k is None:
            raise ValueError(f"bad swap count token {k_tok!r} in init spec")
        if not s_tok.startswith("seed="):
            raise ValueError(f"bad seed token {s_tok!r} in init spec")
        base = parse_init_spec(inner, n, seed, max_fp=max_fp, lr=lr)
        return reshuffle_perm(base, k, int(s_tok[len("seed="):]))
    raise ValueError(f"unknown init spec {spec!r}")


# ---------------------------------------------------------------------------
# shared solver plumbing
# ---------------------------------------------------------------------------


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=["afp", "qsa", "both"], default="both")
    p.add_argument("--init", default="random", help="identity | random | lr | lr-file:<path> | reshuffle:<inner>:swaps=<k>:seed=<s>")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-fp", type=int, default=None, help="fixed-point cap for afp (default: half of n)")
    p.add_argument("--budget", type=int, default=None, help="afp proposal budget (default: 100*n^2)")
    p.add_argument("--sched-c", type=float, default=None, help="afp cooling numerator (default: calibrated)")
    p.add_argument("--sched-d", type=float, default=2.0, help="afp cooling offset")
    p.add_argument("--max-iters", type=int, default=200, help="qsa iteration cap")
    p.add_argument("--rel-tol", type=float, default=1e-8, help="qsa relative-decrease stop")
    p.add_argument("--penalty", type=float, default=None, help="uniform fixed-point penalty for qsa (default: 2*dmax+1)")
    p.add_argument("--blend", type=float, default=None, help="qsa start blend toward the flat matrix (default: 0.5 for random init)")


def _methods(arg: str) -> list[str]:
    return ["afp", "qsa"] if arg == "both" else [arg]


def _shared_init_cap(args, n: int, methods) -> int | None:
    """Fixed-point cap for random init draws shared across the chosen methods.

    When the annealer participates, draws obey its cap and skip the identity
    (cap n-2 excludes exactly the identity). Descent-only runs are uncapped.
    """
    if "afp" not in methods:
        return None
    return min(n // 2 if args.max_fp is None else args.max_fp, n - 2)


def _run_solver(method: str, g: Graph, init_perm: Permutation, args, seed: int):
    if method == "afp":
        opts = AfpOptions(
            max_fp=g.n // 2 if args.max_fp is None else args.max_fp,
            budget=args.budget,
            sched_c=args.sched_c,
            sched_d=args.sched_d,
            seed=seed,
            init=InitSpec(kind="perm", perm=init_perm),
        )
        return afp_solve(g, opts)
    blend = args.blend
    if blend is None:
        blend = 0.5 if args.init == "random" else 0.0
    opts = QsaOptions(
        max_iters=args.max_iters,
        rel_tol=args.rel_tol,
        penalty=args.penalty,
        init=InitSpec(kind="perm", perm=init_perm, blend=blend),
    )
    return qsa_solve(g, opts, seed)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_gen(args) -> int:
    seed = args.seed
    lr = None
    if args.model == "grid":
        if args.dims is None:
            raise ValueError("grid needs --dims")
        g = gen_grid(args.dims)
    elif args.model == "er":
        _need(args, "n", "p")
        g = gen_er(args.n, args.p, seed)
    elif args.model == "ba":
        _need(args, "n", "m_attach")
        g = gen_ba(args.n, args.m_attach, seed)
    elif args.model == "sbm":
        if args.sizes is None or args.within is None or args.across is None:
            raise ValueError("sbm needs --sizes, --within, --across")
        b = len(args.sizes)
        probs = [[args.within if i == j else args.across for j in range(b)] for i in range(b)]
        g = gen_sbm(args.sizes, probs, seed)
    elif args.model in ("lrm", "lrm-rewired", "lrm-distorted"):
        _need(args, "n", "p", "q")
        inst = gen_lrm(args.n, args.p, args.q, seed)
        g, lr = inst.graph, inst.lr
        if args.model == "lrm-rewired":
            if args.k is None:
                raise ValueError("lrm-rewired needs --k")
            g = rewire_k(g, args.k, stable_seed(seed, "rewire"))
        elif args.model == "lrm-distorted":
            if args.r is None or args.t is None:
                raise ValueError("lrm-distorted needs --r and --t")
            d = distort_lrm(inst, args.r, args.t, stable_seed(seed, "distort"))
            g, lr = d.graph, d.lr
    else:
        raise ValueError(f"unknown model {args.model!r}")
    save_graph(args.out, g)
    if lr is not None:
        save_permutation(args.out + ".lr", lr)
    return 0


def _need(args, *names) -> None:
    for name in names:
        if getattr(args, name) is None:
            raise ValueError(f"model {args.model!r} needs --{name.replace('_', '-')}")


def _cmd_solve(args) -> int:
    g = load_graph(args.graph)
    methods = _methods(args.method)
    cap = _shared_init_cap(args, g.n, methods)
    init_perm = parse_init_spec(args.init, g.n, args.seed, max_fp=cap)
    for method in methods:
        report = _run_solver(method, g, init_perm, args, stable_seed(args.seed, method))
        print(f"{method} {_fmt(report.S)} {report.epsilon} {report.fixed_point_count}")
        if args.report:
            base = args.report if len(methods) == 1 else f"{args.report}.{method}"
            _write_report(base, report)
    return 0


def _write_report(base: str, report) -> None:
    with open(base, "w", encoding="utf-8", newline="\n") as f:
        json.dump(report.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")
    save_permutation(base + ".perm", report.final)


def _cmd_experiment(args) -> int:
    with open(args.config, "r", encoding="utf-8") as f:
        cfg = ExperimentConfig.from_yaml(f.read())
    workers = args.workers if args.workers is not None else (os.cpu_count() or 1)
    progress = None
    if args.progress:
        progress = lambda done, total: print(f"unit {done}/{total}", file=sys.stderr)
    records = run_experiment(cfg, workers=workers, progress=progress)
    write_records_csv(args.out, records)
    print(f"wrote {len(records)} records")
    return 0


def _cmd_brain(args) -> int:
    wm = load_matrix(args.matrix)
    g = binarize_density(wm, args.density)
    print(f"components {connected_components(g)}", file=sys.stderr)
    if args.out_graph:
        save_graph(args.out_graph, g)
    if args.lr.startswith("file:"):
        lr = lr_from_file(args.lr[len("file:"):], g.n)
    elif args.lr == "halves":
        lr = lr_halves(g.n)
    else:
        raise ValueError(f"unknown lr map {args.lr!r} (use 'halves' or 'file:<path>')")
    s_lr = symmetry_coefficient(g, lr)
    methods = _methods(args.method)
    cap = _shared_init_cap(args, g.n, methods)
    best: dict[str, object] = {}
    for r in range(args.runs):
        master = stable_seed(args.seed, r)
        init_perm = parse_init_spec(args.init, g.n, master, max_fp=cap, lr=lr)
        for method in methods:
            report = _run_solver(method, g, init_perm, args, stable_seed(master, method))
            prev = best.get(method)
            if prev is None or report.S < prev.S:
                best[method] = report
    for method in methods:
        report = best[method]
        print(f"{method} {_fmt(report.S)} {_fmt(s_lr)} {_fmt(report.S - s_lr)} {hamming(report.final, lr)}")
    return 0


def _cmd_compare(args) -> int:
    records = read_records_csv(args.records)
    cells: dict[tuple, dict[str, dict[tuple, float]]] = {}
    order: list[tuple] = []
    for r in records:
        key = (r.model, r.params)
        if key not in cells:
            cells[key] = {}
            order.append(key)
        cells[key].setdefault(r.method, {})[(r.seed, r.run_index)] = r.S
    lines = ["model,params,n_pairs,mean_afp,mean_qsa,t,p,p_threshold,significant,cohens_d"]
    threshold = bonferroni(args.alpha, len(order))
    for key in order:
        by_method = cells[key]
        if set(by_method) != {"afp", "qsa"}:
            print(f"error: cell {key} lacks paired afp/qsa records", file=sys.stderr)
            return 1
        afp_runs, qsa_runs = by_method["afp"], by_method["qsa"]
        if set(afp_runs) != set(qsa_runs):
            print(f"error: cell {key} has unpaired runs", file=sys.stderr)
            return 1
        pairs = sorted(afp_runs)
        x = [afp_runs[k] for k in pairs]
        y = [qsa_runs[k] for k in pairs]
        keep = [(a, b) for a, b in zip(x, y) if not (math.isnan(a) or math.isnan(b))]
        dropped = len(pairs) - len(keep)
        if dropped:
            print(f"note: cell {key} dropped {dropped} failed pair(s)", file=sys.stderr)
        if len(keep) < 2:
            print(f"error: cell {key} has fewer than 2 valid pairs", file=sys.stderr)
            return 1
        x = [a for a, _ in keep]
        y = [b for _, b in keep]
        res = paired_t_test(x, y)
        d = cohens_d_paired(x, y)
        mean_afp = sum(x) / len(x)
        mean_qsa = sum(y) / len(y)
        sig = "true" if res.p < threshold else "false"
        lines.append(
            f"{key[0]},{key[1]},{len(x)},{_fmt(mean_afp)},{_fmt(mean_qsa)},"
            f"{_fmt(res.t)},{_fmt(res.p)},{_fmt(threshold)},{sig},{_fmt(d)}"
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphsym", description="Approximate-symmetry toolkit for undirected graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a graph file (plus .lr companion for mirrored models)")
    p.add_argument("--model", required=True, choices=["grid", "er", "ba", "sbm", "lrm", "lrm-rewired", "lrm-distorted"])
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--m-attach", type=int, dest="m_attach")
    p.add_argument("--dims", type=_int_list, help="grid side lengths, e.g. 5,4")
    p.add_argument("--sizes", type=_int_list, help="sbm block sizes, e.g. 50,50")
    p.add_argument("--within", type=float, help="sbm within-block edge probability")
    p.add_argument("--across", type=float, help="sbm across-block edge probability")
    p.add_argument("--k", type=int, help="rewired pair count")
    p.add_argument("--r", type=int, help="distortion anchors per twin")
    p.add_argument("--t", type=int, help="distortion twin count (even)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("solve", help="run a solver on a graph file")
    p.add_argument("graph")
    _add_solver_flags(p)
    p.add_argument("--report", default=None, help="write a JSON report here (and the permutation beside it)")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("experiment", help="run a seeded sweep from a YAML config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=None, help="parallel units (default: CPU count)")
    p.add_argument("--progress", action="store_true", help="print a unit counter to stderr")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("brain", help="binarize a weighted connectivity matrix and search it")
    p.add_argument("--matrix", required=True)
    p.add_argument("--density", type=float, required=True)
    p.add_argument("--lr", default="halves", help="'halves' or 'file:<path>'")
    p.add_argument("--runs", type=int, default=1, help="restarts per method; best result is reported")
    p.add_argument("--out-graph", default=None, help="write the binarized graph here")
    _add_solver_flags(p)
    p.set_defaults(func=_cmd_brain)

    p = sub.add_parser("compare", help="paired per-cell statistics from a records CSV")
    p.add_argument("--in", required=True, dest="records", help="records CSV from 'experiment'")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError, RuntimeError, AssertionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

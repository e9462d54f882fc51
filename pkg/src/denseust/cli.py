"""Command-line entry point.

One binary, subcommands for every experiment and utility. Each run prints
its primary result on stdout (a bare number for `alpha`, one JSON object
otherwise), emits exactly one run manifest on stderr (and to --manifest if
given), and exits 0 on success, 1 on validation errors, 2 on runtime
failures. All randomness is derived from --seed through the per-stream
scheme in seeding.py, so reruns with the same arguments produce
byte-identical result files.
"""

import argparse
import hashlib
import json
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__, seeding
from .crt import crt_distance_matrix
from .graphon import alpha_w, cut_distance_upper, load_graphon
from .graphs import (GAMMA_EXACT_CAP, alpha_tilde, expander_gamma_exact,
                     expander_gamma_mc, save_graph)
from .seeding import derived_rng
from .stats import (ExperimentConfig, goodtree_check, lmb_experiment,
                    resolve_graph, verify_scaling)
from .ust import diameter, height, save_tree, wilson_prefix, wilson_ust
from .walk import (alpha_n_capacity, capacity_exact, capacity_mc,
                   check_mixing_bound, closeness_mc, mixing_time_exact)


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 (not 2) on bad flags, per the exit-code map."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("%s: error: %s\n" % (self.prog, message))
        raise SystemExit(1)


def _digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return "sha256:" + h.hexdigest()


def _emit_manifest(command, args, started, outputs, manifest_path=None):
    digests = {p: _digest(p) for p in outputs}
    # self-check: re-read and compare before reporting
    for p, d in digests.items():
        if _digest(p) != d:
            raise RuntimeError("output %s changed while hashing" % p)
    config = {k: v for k, v in sorted(vars(args).items())
              if k not in ("func",) and v is not None}
    manifest = {
        "command": command,
        "config": config,
        "master_seed": getattr(args, "seed", None),
        "code_version": __version__,
        "wall_clock": {
            "started_utc": datetime.fromtimestamp(
                started, tz=timezone.utc).isoformat(),
            "duration_s": round(time.time() - started, 3),
        },
        "outputs": digests,
    }
    line = json.dumps(manifest, sort_keys=True)
    sys.stderr.write(line + "\n")
    if manifest_path:
        with open(manifest_path, "w") as fh:
            fh.write(line + "\n")
    return manifest


def _add_source_args(p, need_n=True):
    p.add_argument("--graph", help="graph JSON file")
    p.add_argument("--family",
                   help="graph family: complete, bipartite, gnw, or hnw")
    p.add_argument("--graphon", help="step graphon JSON file")
    p.add_argument("--n", type=int, help="vertex count")
    p.add_argument("--a", type=int, help="first side size (bipartite)")
    p.add_argument("--b", type=int, help="second side size (bipartite)")
    p.add_argument("--mode", choices=("g", "h"), default="g",
                   help="graphon sampling: g = binary edges, h = weights")


def _source_from_args(args):
    # gnw/hnw families sample from a graphon, so --graphon is their
    # parameter rather than a competing source.
    if args.family in ("gnw", "hnw"):
        if args.graph is not None:
            raise ValueError("give exactly one of --graph, --family")
        if args.graphon is None or args.n is None:
            raise ValueError("--family %s needs --graphon and --n"
                             % args.family)
        mode = "g" if args.family == "gnw" else "h"
        return {"graphon": args.graphon, "n": args.n, "mode": mode}
    given = [x for x in (args.graph, args.family, args.graphon)
             if x is not None]
    if len(given) != 1:
        raise ValueError("give exactly one of --graph, --family, --graphon")
    if args.graph:
        return {"file": args.graph}
    if args.family:
        src = {"family": args.family}
        if args.a is not None and args.b is not None:
            src["a"], src["b"] = args.a, args.b
        elif args.n is not None:
            src["n"] = args.n
        else:
            raise ValueError("--family needs --n or --a/--b")
        return src
    if args.n is None:
        raise ValueError("--graphon needs --n")
    return {"graphon": args.graphon, "n": args.n, "mode": args.mode}


def _graph_from_args(args):
    return resolve_graph(_source_from_args(args), args.seed)


def _print_json(obj):
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _parse_vertex_list(text):
    try:
        vs = [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise ValueError("vertex lists are comma-separated integers")
    if not vs:
        raise ValueError("vertex list is empty")
    return vs


# ---------------------------------------------------------------- handlers

def _cmd_gen(args):
    G = _graph_from_args(args)
    save_graph(G, args.out)
    _print_json({"n": G.n, "total_weight": G.total_weight,
                 "out": args.out})
    return [args.out]


def _cmd_alpha(args):
    if args.graphon and args.graph is None and args.family is None:
        val = alpha_w(load_graphon(args.graphon))
    else:
        val = alpha_tilde(_graph_from_args(args))
    sys.stdout.write(json.dumps(val) + "\n")
    return []


def _cmd_alpha_n(args):
    G = _graph_from_args(args)
    est = alpha_n_capacity(G, args.kappa, args.outer, args.inner,
                           derived_rng(args.seed, seeding.OUTER))
    _print_json({"estimate": est.estimate, "stderr": est.stderr,
                 "M": est.M, "outer_len": est.outer_len,
                 "kappa": est.kappa, "outer_reps": est.outer_reps,
                 "inner_reps": est.inner_reps,
                 "alpha_tilde": alpha_tilde(G)})
    return []


def _cmd_ust(args):
    G = _graph_from_args(args)
    if args.ordering == "random":
        ordering = derived_rng(args.seed, seeding.MARKS).permutation(G.n)
    else:
        ordering = None
    T = wilson_ust(G, ordering=ordering,
                   rng=derived_rng(args.seed, seeding.WILSON))
    outputs = []
    if args.out:
        save_tree(T, args.out)
        outputs.append(args.out)
    _print_json({"n": T.n, "root": T.root, "edges": T.n - 1,
                 "height": height(T), "diameter": diameter(T),
                 "branches": len(T.branch_lengths), "out": args.out})
    return outputs


def _cmd_crt(args):
    if args.k < 2:
        raise ValueError("k must be at least 2")
    if args.reps < 1:
        raise ValueError("need at least one replicate")
    rows = []
    for r in range(args.reps):
        D = crt_distance_matrix(args.k, derived_rng(args.seed,
                                                    seeding.CRT, r))
        for i in range(args.k):
            for j in range(i + 1, args.k):
                rows.append((r, i, j, D[i, j]))
    outputs = []
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("replicate,i,j,distance\n")
            for r, i, j, d in rows:
                fh.write("%d,%d,%d,%s\n" % (r, i, j, repr(float(d))))
        outputs.append(args.out)
    dists = np.asarray([row[3] for row in rows])
    _print_json({"k": args.k, "replicates": args.reps,
                 "pairs": len(rows), "mean_distance": float(dists.mean()),
                 "out": args.out})
    return outputs


def _cmd_verify(args):
    config = ExperimentConfig(source=_source_from_args(args), k=args.k,
                              replicates=args.reps, rescale=args.rescale,
                              alpha=args.alpha, seed=args.seed,
                              out=args.out, kappa=args.kappa)
    report = verify_scaling(config)
    _print_json(report)
    return [args.out] if args.out else []


def _cmd_lmb(args):
    report = lmb_experiment(_source_from_args(args), args.c, args.reps,
                            args.seed, eps=args.eps)
    _print_json(report)
    return []


def _cmd_cutdist(args):
    W1 = load_graphon(args.a_file)
    W2 = load_graphon(args.b_file)
    rng = derived_rng(args.seed, seeding.CUTNORM)
    val = cut_distance_upper(W1, W2, strategy=args.strategy, rng=rng,
                             restarts=args.restarts)
    _print_json({"upper_bound": val, "strategy": args.strategy})
    return []


def _cmd_expander(args):
    G = _graph_from_args(args)
    if G.n <= GAMMA_EXACT_CAP:
        gamma, exact = expander_gamma_exact(G), True
    else:
        gamma = expander_gamma_mc(G, derived_rng(args.seed, seeding.GAMMA),
                                  trials=args.trials)
        exact = False
    _print_json({"gamma": gamma, "exact": exact, "n": G.n,
                 "trials": None if exact else args.trials})
    return []


def _cmd_mix(args):
    G = _graph_from_args(args)
    t_mix = mixing_time_exact(G, laziness="half")
    rep = check_mixing_bound(G, rng=derived_rng(args.seed, seeding.GAMMA),
                             trials=args.trials)
    _print_json({"t_mix": rep.t_mix, "gamma": rep.gamma,
                 "gamma_exact": rep.gamma_exact, "bound": rep.bound,
                 "holds": rep.holds, "note": rep.note,
                 "t_mix_recomputed": t_mix})
    return []


def _cmd_cap(args):
    G = _graph_from_args(args)
    U = _parse_vertex_list(args.set)
    if args.close is not None:
        Wset = _parse_vertex_list(args.close)
        est = closeness_mc(G, U, Wset, args.k, args.reps,
                           derived_rng(args.seed, seeding.INNER))
        _print_json({"closeness": est.estimate, "stderr": est.stderr,
                     "k": args.k, "reps": args.reps})
        return []
    if args.exact:
        _print_json({"capacity": capacity_exact(G, U, args.k),
                     "k": args.k, "exact": True})
        return []
    est = capacity_mc(G, U, args.k, args.reps,
                      derived_rng(args.seed, seeding.INNER))
    _print_json({"capacity": est.estimate, "stderr": est.stderr,
                 "k": args.k, "reps": args.reps, "exact": False})
    return []


def _cmd_goodtree(args):
    G = _graph_from_args(args)
    if args.full:
        T = wilson_ust(G, rng=derived_rng(args.seed, seeding.WILSON))
    else:
        if args.marks < 2:
            raise ValueError("--marks must be at least 2")
        marks = derived_rng(args.seed, seeding.MARKS).choice(
            G.n, size=args.marks, replace=False)
        T = wilson_prefix(G, marks, derived_rng(args.seed, seeding.WILSON))
    report = goodtree_check(G, T, args.kappa, args.inner,
                            derived_rng(args.seed, seeding.SUBSETS),
                            subsets=args.subsets)
    _print_json(report)
    return []


# ---------------------------------------------------------------- parser

def _build_parser():
    top = _Parser(prog="denseust",
                  description="spanning-tree scaling experiments on dense "
                              "weighted graphs")
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True,
                             parser_class=_Parser)

    def common(p, out_help=None):
        p.add_argument("--seed", type=int, default=0,
                       help="master seed (default 0)")
        p.add_argument("--threads", type=int, default=0,
                       help="worker bound; results do not depend on it")
        p.add_argument("--manifest", help="also write the run manifest here")
        if out_help is not None:
            p.add_argument("--out", help=out_help)

    p = sub.add_parser("gen", help="generate a graph instance")
    _add_source_args(p)
    common(p)
    p.add_argument("--out", required=True, help="graph JSON path")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("alpha", help="exact scaling constant")
    _add_source_args(p)
    common(p)
    p.set_defaults(func=_cmd_alpha)

    p = sub.add_parser("alpha-n", help="capacity-based alpha estimate")
    _add_source_args(p)
    common(p)
    p.add_argument("--kappa", type=float, default=0.02)
    p.add_argument("--outer", type=int, default=1500,
                   help="outer walk replicates")
    p.add_argument("--inner", type=int, default=1600,
                   help="inner walks per outer walk")
    p.set_defaults(func=_cmd_alpha_n)

    p = sub.add_parser("ust", help="sample a spanning tree")
    _add_source_args(p)
    common(p, out_help="tree JSON path")
    p.add_argument("--ordering", choices=("given", "random"),
                   default="given")
    p.set_defaults(func=_cmd_ust)

    p = sub.add_parser("crt", help="sample continuum distance matrices")
    common(p, out_help="CSV path (replicate,i,j,distance)")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--reps", type=int, default=1000)
    p.set_defaults(func=_cmd_crt)

    p = sub.add_parser("verify", help="scaling-limit verification run")
    _add_source_args(p)
    common(p, out_help="CSV path (%s)" % "replicate,i,j,raw,rescaled")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--rescale",
                   choices=("alpha_tilde", "alpha_mc", "fixed"),
                   default="alpha_tilde")
    p.add_argument("--alpha", type=float,
                   help="rescaling constant for --rescale fixed")
    p.add_argument("--kappa", type=float, default=0.02)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("lmb", help="lower-mass-bound experiment")
    _add_source_args(p)
    common(p)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--reps", type=int, default=50)
    p.add_argument("--eps", type=float, default=None)
    p.set_defaults(func=_cmd_lmb)

    p = sub.add_parser("cutdist", help="cut-distance upper bound")
    common(p)
    p.add_argument("--a", dest="a_file", required=True,
                   help="first graphon JSON")
    p.add_argument("--b", dest="b_file", required=True,
                   help="second graphon JSON")
    p.add_argument("--strategy",
                   choices=("degree-sort", "exact-permutation"),
                   default="degree-sort")
    p.add_argument("--restarts", type=int, default=24)
    p.set_defaults(func=_cmd_cutdist)

    p = sub.add_parser("expander", help="expansion constant gamma")
    _add_source_args(p)
    common(p)
    p.add_argument("--trials", type=int, default=200)
    p.set_defaults(func=_cmd_expander)

    p = sub.add_parser("mix", help="mixing time and expander bound")
    _add_source_args(p)
    common(p)
    p.add_argument("--trials", type=int, default=200)
    p.set_defaults(func=_cmd_mix)

    p = sub.add_parser("cap", help="capacity / closeness of vertex sets")
    _add_source_args(p)
    common(p)
    p.add_argument("--set", required=True,
                   help="comma-separated vertex list")
    p.add_argument("--close", help="second vertex list (closeness)")
    p.add_argument("--k", type=int, required=True, help="walk length")
    p.add_argument("--reps", type=int, default=100000)
    p.add_argument("--exact", action="store_true")
    p.set_defaults(func=_cmd_cap)

    p = sub.add_parser("goodtree", help="capacity regularity of a tree")
    _add_source_args(p)
    common(p)
    p.add_argument("--kappa", type=float, default=0.02)
    p.add_argument("--inner", type=int, default=100000,
                   help="walks per sampled subset")
    p.add_argument("--marks", type=int, default=2,
                   help="marked vertices for the branch prefix")
    p.add_argument("--subsets", type=int, default=12)
    p.add_argument("--full", action="store_true",
                   help="check a full spanning tree instead of a prefix")
    p.set_defaults(func=_cmd_goodtree)

    return top


def cli_dispatch(argv):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return int(code) if code is not None else 0
    started = time.time()
    try:
        outputs = args.func(args)
        _emit_manifest(args.command, args, started, outputs,
                       getattr(args, "manifest", None))
    except (ValueError, FileNotFoundError, KeyError,
            json.JSONDecodeError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 1
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    except Exception as exc:  # runtime failure
        sys.stderr.write("failure: %r\n" % exc)
        return 2
    return 0


def main():
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()

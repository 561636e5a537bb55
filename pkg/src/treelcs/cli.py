"""Command-line interface: sample / lcs / estimate / experiment."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import errors
from ._rng import Rng
from . import estimators as est
from . import harness
from . import lcs as lcsmod
from . import samplers as smp
from .offspring import law_from_spec
from .trees import parse, serialize


def _law_arg(text):
    if text.startswith("{"):
        return law_from_spec(json.loads(text))
    return law_from_spec({"kind": text})


def _cmd_sample(args):
    law = _law_arg(args.law)
    rng = Rng(args.seed, ("cli-sample",))
    lines = []
    for i in range(args.count):
        r = rng.child(i)
        if args.mode == "bgw":
            t = smp.sample_bgw(law, r, cap=args.cap)
        elif args.mode == "conditioned":
            t = smp.sample_conditioned(law, args.n, r)
        elif args.mode == "root-biased":
            t = smp.sample_root_biased(law, r, cap=args.cap)
        elif args.mode == "spine":
            t = smp.sample_spine(law, args.n, r, cap=args.cap).tree
        else:
            raise errors.TreeLcsError(f"unknown mode {args.mode}")
        lines.append(serialize(t))
    text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as f:
            f.write(text)
    return 0


def _read_tree(path):
    with open(path) as f:
        return parse(f.read().strip())


def _cmd_lcs(args):
    a = _read_tree(args.tree_a)
    b = _read_tree(args.tree_b)
    if args.mode == "rooted":
        if args.witness:
            value, pairs = lcsmod.lcs_rooted_witness(a, b)
            print(value)
            print(json.dumps(pairs))
        else:
            print(lcsmod.lcs_rooted(a, b))
    elif args.mode == "unrooted":
        if args.witness:
            value, roots, pairs = lcsmod.lcs_unrooted_witness(a, b)
            print(value)
            print(json.dumps({"roots": roots, "pairs": pairs}))
        else:
            print(lcsmod.lcs_unrooted(a, b))
    elif args.mode == "lcs3":
        print(lcsmod.lcs3_length(a, b, args.scale, args.scale2))
    elif args.mode == "span":
        vertices = [int(x) for x in args.vertices.split(",")]
        print(lcsmod.span_length(a, vertices))
    else:
        raise errors.TreeLcsError(f"unknown mode {args.mode}")
    return 0


def _cmd_estimate(args):
    law = _law_arg(args.law)
    law2 = _law_arg(args.law2) if args.law2 else law
    rng = Rng(args.seed, ("cli-estimate", args.what))
    rows, header, result = [], [], None
    if args.what == "c":
        result = est.estimate_c(law, law2, args.samples, rng)
    elif args.what == "tail":
        grid = np.array([float(x) for x in args.h_grid.split(",")])
        sc = est.survival_curve(args.statistic, law, law2, grid,
                                args.samples, rng)
        header = ["h", "survival", "stderr"]
        se = np.sqrt(np.maximum(sc.survival * (1 - sc.survival), 0)
                     / args.samples)
        rows = list(zip(grid, sc.survival, se))
        result = {"slope": sc.slope, "n_censored": sc.n_censored}
    elif args.what == "p-eps":
        grid = np.array([float(x) for x in args.h_grid.split(",")])
        pe = est.estimate_p_eps(law, law2, args.eps, grid, args.samples, rng)
        header = ["h", "p_hat", "count"]
        rows = list(zip(grid, pe.p_hat, pe.counts))
        result = {"n_censored": pe.n_censored}
    elif args.what == "m2o":
        header = ["n", "F", "G", "lhs", "rhs", "rel_error"]
        for n in (int(x) for x in args.n_list.split(",")):
            for f in est.BUILTIN_F:
                for g in est.BUILTIN_G:
                    lhs, rhs, rel = est.many_to_one_check(
                        law, n, f, g, args.samples, rng.child(n, f[0], g[0]))
                    rows.append((n, f[0], g[0], lhs, rhs, rel))
    elif args.what == "big-jumps":
        grid = np.array([float(x) for x in args.t_grid.split(",")])
        step = ({"kind": "pareto"} if args.step == "pareto"
                else {"kind": "tree_size", "law": law})
        bj = est.big_jumps_check(args.alpha, args.s, args.m, grid, step,
                                 args.samples, rng)
        header = ["t", "exceedance", "count"]
        rows = list(zip(grid, bj.exceedance, bj.counts))
        result = {"decay_rate": bj.decay_rate}
    elif args.what == "star":
        result = est.star_lower_bound(law, args.delta, args.samples, rng)
    else:
        raise errors.TreeLcsError(f"unknown estimate {args.what}")
    if rows:
        print(",".join(header))
        for r in rows:
            print(",".join(str(x) for x in r))
    if result is not None:
        payload = result.to_dict() if hasattr(result, "to_dict") else result
        print(json.dumps(payload))
    return 0


def _cmd_experiment(args):
    if args.action == "run":
        with open(args.target) as f:
            config = json.load(f)
        harness.run_experiment(harness.ExperimentConfig.from_dict(config))
        return 0
    if args.action == "summarize":
        text, ok = harness.summarize(args.target)
        sys.stdout.write(text)
        return 0 if ok else 1
    raise errors.TreeLcsError(f"unknown action {args.action}")


def build_parser():
    p = argparse.ArgumentParser(prog="treelcs")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="emit sampled trees, one per line")
    s.add_argument("--law", required=True,
                   help="law name or JSON spec, e.g. geometric_half or "
                        '{"kind": "d_ary", "d": 3}')
    s.add_argument("--mode", required=True,
                   choices=["bgw", "conditioned", "root-biased", "spine"])
    s.add_argument("--n", type=int, default=1,
                   help="target size (conditioned) or spine height")
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--cap", type=int, default=smp.DEFAULT_NODE_CAP)
    s.add_argument("--out", default="-")
    s.set_defaults(fn=_cmd_sample)

    l = sub.add_parser("lcs", help="largest-common-subtree statistics")
    l.add_argument("--mode", required=True,
                   choices=["rooted", "unrooted", "lcs3", "span"])
    l.add_argument("tree_a")
    l.add_argument("tree_b")
    l.add_argument("--scale", type=float, default=1.0)
    l.add_argument("--scale2", type=float, default=1.0)
    l.add_argument("--vertices", default="",
                   help="comma-separated vertex ids for span mode")
    l.add_argument("--witness", action="store_true")
    l.set_defaults(fn=_cmd_lcs)

    e = sub.add_parser("estimate", help="Monte-Carlo estimators")
    e.add_argument("--what", required=True,
                   choices=["c", "tail", "p-eps", "m2o", "big-jumps",
                            "star"])
    e.add_argument("--law", required=True)
    e.add_argument("--law2")
    e.add_argument("--samples", type=int, default=10000)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--statistic", default="lcs_rooted_pair")
    e.add_argument("--h-grid", default="10,20,40,80")
    e.add_argument("--t-grid", default="2,4,6,8")
    e.add_argument("--eps", type=float, default=0.5)
    e.add_argument("--n-list", default="1,2,3,4")
    e.add_argument("--alpha", type=float, default=0.5)
    e.add_argument("--s", type=float, default=1.0)
    e.add_argument("--m", type=int, default=100)
    e.add_argument("--step", default="tree_size",
                   choices=["tree_size", "pareto"])
    e.add_argument("--delta", type=int, default=1000)
    e.set_defaults(fn=_cmd_estimate)

    x = sub.add_parser("experiment", help="run or summarize an experiment")
    x.add_argument("action", choices=["run", "summarize"])
    x.add_argument("target", help="config.json (run) or run dir (summarize)")
    x.set_defaults(fn=_cmd_experiment)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except errors.TreeLcsError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

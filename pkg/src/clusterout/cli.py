"""Command line entry point.

Exit codes: 0 success, 1 invalid input or usage, 2 certification failure.
Relative output paths are resolved against ``$CLUSTEROUT_OUTPUT_DIR`` when set.
"""
import argparse
import json
import os
import sys

import numpy as np

from . import jsonio
from .analysis import compute_classes, default_alpha, lemma_report
from .bench import run_bench, sweep_specs
from .cost import evaluate
from .errors import BudgetExceeded, InstanceError, MoveError
from .exact import solve_exact
from .gaps import gen_kmed_gap, gen_ufl_gap, verify_gap
from .instance import read_instance, write_instance
from .search import SearchConfig, local_search

OUTPUT_DIR_ENV = "CLUSTEROUT_OUTPUT_DIR"
EXIT_OK, EXIT_INVALID, EXIT_CERT = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise UsageError(message)


def _out_path(path):
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, path)
    return path


def _emit(obj, path):
    if path:
        jsonio.dump(obj, _out_path(path))
    else:
        sys.stdout.write(jsonio.dumps(obj))


def _parse_params(text):
    out = {}
    if not text:
        return out
    for item in text.split(","):
        key, _, val = item.partition("=")
        if not _:
            raise InstanceError("params", f"expected key=value, got {item!r}")
        out[key.strip().replace("-", "_")] = json.loads(val)
    return out


# -- subcommands -----------------------------------------------------------

def cmd_solve(args):
    inst = read_instance(args.instance)
    initial = [int(c) for c in args.centers.split(",")] if args.centers else None
    policy = "explicit" if initial else args.seed_policy
    cfg = SearchConfig(rho=args.rho, epsilon_stop=args.epsilon, pivot=args.pivot,
                       max_iterations=args.max_iters, seed_policy=policy, rng_seed=args.seed,
                       initial=initial)
    trace = local_search(inst, cfg)
    _emit(trace.to_json(), args.out)
    return EXIT_OK


def cmd_exact(args):
    inst = read_instance(args.instance)
    res = solve_exact(inst, size_cap=args.size_cap)
    _emit(res.to_json(), args.out)
    return EXIT_OK


def cmd_gap_gen(args):
    p = _parse_params(args.params)
    for key in ("rho", "z", "k", "beta", "gamma", "n", "q"):
        val = getattr(args, key)
        if val is not None:
            p[key] = val
    if args.family == "ufl":
        g = gen_ufl_gap(p.get("rho", 1), p.get("z", 4))
    else:
        g = gen_kmed_gap(p.get("k", 3), p.get("z", 8), p.get("beta", 1.0), p.get("gamma", 2.0),
                         n=p.get("n"), q=p.get("q", 1.0))
    write_instance(g.instance, _out_path(args.out))
    stem = args.out[:-5] if args.out.endswith(".json") else args.out
    local_path = args.local_out or stem + ".local.json"
    opt_path = args.opt_out or stem + ".opt.json"
    jsonio.dump(evaluate(g.instance, g.stated_local).to_json(), _out_path(local_path))
    jsonio.dump(evaluate(g.instance, g.stated_opt).to_json(), _out_path(opt_path))
    return EXIT_OK


def cmd_gap_verify(args):
    inst = read_instance(args.instance)
    local = jsonio.load(args.local)["open"]
    opt = jsonio.load(args.opt)["open"]
    rep = verify_gap(inst, local, opt, args.rho, confirm_opt=not args.no_oracle)
    _emit(rep.to_json(), args.out)
    return EXIT_OK if rep.local_certified else EXIT_CERT


def cmd_pair_verify(args):
    inst = read_instance(args.instance)
    trace = local_search(inst, SearchConfig(rho=args.search_rho, seed_policy="random",
                                            rng_seed=args.seed))
    opt = solve_exact(inst)
    alpha = args.alpha if args.alpha is not None else default_alpha(args.rho)
    rng = np.random.default_rng(args.seed)
    failures = {}
    for _ in range(args.trials):
        rep = lemma_report(inst, trace.solution, opt.solution, policy=args.policy,
                           alpha=alpha, rho=args.rho, rng=rng)
        for name, ok in rep.checks.items():
            failures.setdefault(name, 0)
            if not ok:
                failures[name] += 1
    classes = compute_classes(inst, trace.solution, opt.solution)
    out = {"trials": args.trials, "alpha": alpha, "rho": args.rho, "policy": args.policy,
           "local_open": list(classes.local_open), "global_open": list(classes.global_open),
           "reduced_z": classes.z, "failures": failures,
           "ok": all(v == 0 for v in failures.values())}
    _emit(out, args.out)
    return EXIT_OK if out["ok"] else EXIT_CERT


def cmd_bench(args):
    specs = sweep_specs(args.count, args.seed, n=args.n, m=args.m, k=args.k, z=args.z, q=args.q,
                        rho=args.rho, epsilon_stop=args.epsilon, dim=args.dim,
                        epsilon=args.epsilon_budget, pivot=args.pivot,
                        seed_policy=args.seed_policy)
    report = run_bench(specs, threads=args.threads)
    _emit(report.to_json(timing=args.timing), args.out)
    if args.csv:
        with open(_out_path(args.csv), "w", encoding="utf-8", newline="") as fh:
            fh.write(report.to_csv())
    bad = [r for r in report.rows if r.ratio < 1 - 1e-9]
    return EXIT_CERT if bad else EXIT_OK


# -- parser ----------------------------------------------------------------

def build_parser():
    p = _Parser(prog="clusterout", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=1, help="worker threads for bench rows")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="run multiswap local search")
    s.add_argument("--instance", required=True)
    s.add_argument("--rho", type=int, default=1)
    s.add_argument("--epsilon", type=float, default=1e-6, help="termination slack")
    s.add_argument("--pivot", choices=["first", "best"], default="first")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--seed-policy", choices=["greedy", "random"], default="greedy")
    s.add_argument("--centers", help="explicit comma separated start centres")
    s.add_argument("--max-iters", type=int, default=10_000)
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("exact", help="brute-force optimum")
    s.add_argument("--instance", required=True)
    s.add_argument("--size-cap", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_exact)

    s = sub.add_parser("gap-gen", help="generate a locality-gap instance")
    s.add_argument("--family", choices=["ufl", "kmed"], required=True)
    s.add_argument("--params", help="comma separated key=value overrides, e.g. rho=2,z=5")
    s.add_argument("--rho", type=int)
    s.add_argument("--z", type=int)
    s.add_argument("--k", type=int)
    s.add_argument("--beta", type=float)
    s.add_argument("--gamma", type=float)
    s.add_argument("--n", type=int)
    s.add_argument("--q", type=float)
    s.add_argument("--out", required=True)
    s.add_argument("--local-out")
    s.add_argument("--opt-out")
    s.set_defaults(func=cmd_gap_gen)

    s = sub.add_parser("gap-verify", help="certify a stated local optimum and report the gap")
    s.add_argument("--instance", required=True)
    s.add_argument("--local", required=True)
    s.add_argument("--opt", required=True)
    s.add_argument("--rho", type=int, required=True)
    s.add_argument("--no-oracle", action="store_true", help="skip exact confirmation of --opt")
    s.add_argument("--out")
    s.set_defaults(func=cmd_gap_verify)

    s = sub.add_parser("pair-verify", help="check the outlier pairing/grouping lemmas")
    s.add_argument("--instance", required=True)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--rho", type=int, default=2, help="max centres per side in a part")
    s.add_argument("--alpha", type=int)
    s.add_argument("--policy", choices=["singleton", "random"], default="random")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--search-rho", type=int, default=1, help="swap size for the local solution")
    s.add_argument("--out")
    s.set_defaults(func=cmd_pair_verify)

    s = sub.add_parser("bench", help="local search / oracle ratio sweep")
    s.add_argument("--count", type=int, default=20)
    s.add_argument("--n", type=int, default=12)
    s.add_argument("--m", type=int, default=6)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--z", type=int, default=2)
    s.add_argument("--q", type=float, default=1.0)
    s.add_argument("--rho", type=int, default=1)
    s.add_argument("--epsilon", type=float, default=1e-6, help="termination slack")
    s.add_argument("--epsilon-budget", type=float, default=0.0, help="centre budget slack")
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("--pivot", choices=["first", "best"], default="first")
    s.add_argument("--seed-policy", choices=["greedy", "random"], default="random")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--timing", action="store_true", help="include wall times in the JSON")
    s.add_argument("--out")
    s.add_argument("--csv")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError:
        return EXIT_INVALID
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (InstanceError, MoveError, BudgetExceeded, ValueError, OSError, KeyError) as exc:
        sys.stderr.write(f"clusterout {args.command}: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

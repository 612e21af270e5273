"""Command line: ``exgap {generate,solve,bench,profile}``.

Exit codes: 0 converged, 2 iteration limit, 3 input error, 4 numerical or
subproblem failure.
"""

import argparse
import json
import logging
import os
import sys
import time

from .._validation import ValidationError
from ..subprob import ConfigurationError

EXIT_OK, EXIT_MAXITER, EXIT_INPUT, EXIT_NUMERICAL = 0, 2, 3, 4
ALGORITHMS = ("idda1", "idda2", "fixed-beta1", "admm-v1", "admm-v2", "admm-v3", "pcbdm")
FAMILY_ALIASES = {"bp": "basis_pursuit", "basis_pursuit": "basis_pursuit",
                  "nonsmooth": "nonsmooth_l1", "nonsmooth_l1": "nonsmooth_l1",
                  "qp": "separable_qp", "separable_qp": "separable_qp",
                  "nonlinear": "nonlinear_log", "nonlinear_log": "nonlinear_log"}


class InputError(Exception):
    pass


def status_code(status):
    return {"converged": EXIT_OK, "maxiter": EXIT_MAXITER}.get(status, EXIT_NUMERICAL)


def _build(spec):
    from .generators import GeneratorSpec
    spec = dict(spec)
    family = FAMILY_ALIASES.get(spec.pop("family", None))
    if family is None:
        raise InputError("suite entry needs a known 'family'")
    if "class" in spec:
        spec["cls"] = spec.pop("class")
    try:
        return GeneratorSpec(family=family, **spec).build()
    except TypeError as exc:
        raise InputError(str(exc)) from exc


def _options(args):
    from ..egap.state import SolveOptions
    return SolveOptions(beta0=args.beta0, eps_tilde=args.eps_tilde, tol_feas=args.tol_feas,
                        tol_gap=args.tol_gap, tol_stag=args.tol_stag, window=args.window,
                        maxiter=args.maxiter, n_jobs=args.threads,
                        trace_path=getattr(args, "trace", None))


def _solve(problem, algorithm, opts, eps_f):
    from ..egap.drivers import run
    return run(problem, algorithm, opts, eps_f=eps_f)


def cmd_generate(args):
    from .io import write_problem
    spec = {"family": args.family, "seed": args.seed, "shift_ratio": args.shift_ratio}
    if args.cls is not None:
        spec["cls"] = args.cls
    if args.scenario is not None:
        spec["scenario"] = args.scenario
    if args.m is not None:
        spec["m"] = args.m
    if args.n is not None:
        spec["n"] = args.n
    problem = _build(spec)
    write_problem(problem, args.out)
    print(json.dumps({"problem": problem.name, "M": problem.M, "m": problem.m, "n": problem.n,
                      "out": args.out}))
    return EXIT_OK


def cmd_solve(args):
    from .io import read_problem
    problem = read_problem(args.problem)
    rep = _solve(problem, args.algorithm, _options(args), args.eps_f)
    last = rep.final
    print(json.dumps({"algorithm": rep.algorithm, "status": rep.status,
                      "iterations": rep.iterations, "rpfgap": last.rpfgap, "phi": last.phi,
                      "ms": last.ms}))
    return status_code(rep.status)


def cmd_bench(args):
    from .io import read_problem
    from .profile import RunRecord
    with open(args.suite) as fh:
        suite = json.load(fh)
    if not isinstance(suite, list) or not suite:
        raise InputError("suite file must hold a nonempty JSON list")
    algos = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    bad = [a for a in algos if a not in ALGORITHMS]
    if bad:
        raise InputError(f"unknown algorithms {bad}")
    os.makedirs(args.out, exist_ok=True)
    records = []
    for j, entry in enumerate(suite):
        problem = read_problem(entry) if isinstance(entry, str) else _build(entry)
        pid = problem.name or f"p{j}"
        for a in algos:
            args.trace = os.path.join(args.out, f"{pid}__{a}.csv")
            t0 = time.perf_counter()
            rep = _solve(problem, a, _options(args), args.eps_f)
            elapsed = time.perf_counter() - t0
            rec = RunRecord(solver=a, problem=pid, status=rep.status,
                            iterations=rep.iterations, time=elapsed,
                            rpfgap=rep.final.rpfgap, objective=rep.final.phi)
            records.append(rec)
            print(json.dumps(rec.to_dict()))
    with open(os.path.join(args.out, "records.jsonl"), "w") as fh:
        for r in records:
            fh.write(json.dumps(r.to_dict()) + "\n")
    return EXIT_OK


def load_records(path):
    from .profile import RunRecord
    if os.path.isdir(path):
        path = os.path.join(path, "records.jsonl")
    out = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                out.append(RunRecord(**json.loads(line)))
    return out


def cmd_profile(args):
    from .profile import performance_profile, plot_profile, write_profile_csv
    curves = performance_profile(load_records(args.records),
                                 "iterations" if args.metric == "iters" else "time")
    ext = os.path.splitext(args.out)[1].lower()
    if ext == ".csv":
        write_profile_csv(curves, args.out)
    elif ext == ".svg":
        plot_profile(curves, args.out, args.metric)
    else:
        raise InputError("profile output must end in .csv or .svg")
    return EXIT_OK


def _solver_flags(p):
    p.add_argument("--beta0", type=float, default=1.0)
    p.add_argument("--eps-tilde", type=float, default=1e-3)
    p.add_argument("--eps-f", type=float, default=0.05, help="accuracy for fixed-beta1")
    p.add_argument("--tol-feas", type=float, default=1e-3)
    p.add_argument("--tol-gap", type=float, default=1e-3)
    p.add_argument("--tol-stag", type=float, default=1e-3)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--maxiter", type=int, default=5000)
    p.add_argument("--threads", type=int, default=1)


def build_parser():
    ap = argparse.ArgumentParser(prog="exgap", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a generated instance to a directory")
    g.add_argument("--family", required=True, choices=sorted(FAMILY_ALIASES))
    g.add_argument("--class", dest="cls", type=int)
    g.add_argument("--scenario", choices=("I", "II"))
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--m", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--shift-ratio", type=float, default=0.75)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="solve a problem directory")
    s.add_argument("--problem", required=True)
    s.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    s.add_argument("--trace", help="write the iteration trace as CSV")
    _solver_flags(s)
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="run algorithms over a suite")
    b.add_argument("--suite", required=True,
                   help="JSON list of generator specs or problem directories")
    b.add_argument("--algorithms", required=True, help="comma-separated algorithm ids")
    b.add_argument("--out", required=True)
    _solver_flags(b)
    b.set_defaults(func=cmd_bench)

    pr = sub.add_parser("profile", help="performance profile from bench records")
    pr.add_argument("--records", required=True)
    pr.add_argument("--metric", choices=("iters", "time"), default="iters")
    pr.add_argument("--out", required=True)
    pr.set_defaults(func=cmd_profile)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (InputError, ValidationError, ConfigurationError, FileNotFoundError,
            json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ArithmeticError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())

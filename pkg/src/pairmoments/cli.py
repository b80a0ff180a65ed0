"""Command-line entry point.

Subcommands: ``verify`` (numeric identities and the exact-expectation
catalog), ``estimate`` (run an estimator on a data file), ``expect``
(exact E[kernel] over a finite distribution), ``simulate`` (bias
experiments), ``moments`` (closed-form true values). Every command takes
``--seed``, ``--format {csv,json,md}`` and ``--out PATH``; randomized
commands print the effective seed to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import secrets
import sys

import numpy as np

from . import exact, identities, simulation
from .distributions import DistributionSpec, RngStream, parse_distribution
from .estimators import (
    diff_moment_exhaustive,
    diff_moment_mc,
    gini_variance,
    natural_moment,
)
from .kernels import MomentKernel


class UsageError(Exception):
    pass


def _parse_orders(text: str) -> tuple[int, ...]:
    """Parse '2..8' (inclusive) or '2,3,5' into an order tuple."""
    text = text.strip()
    if ".." in text:
        lo_s, hi_s = text.split("..", 1)
        lo, hi = int(lo_s), int(hi_s)
        if hi < lo:
            raise UsageError(f"empty order range {text!r}")
        return tuple(range(lo, hi + 1))
    return tuple(int(p) for p in text.split(","))


def _resolve_seed(args) -> int:
    seed = args.seed if args.seed is not None else secrets.randbits(48)
    print(f"seed: {seed}", file=sys.stderr)
    return seed


def _emit(text: str, args) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_vector(path: str) -> np.ndarray:
    """Load a data vector from a one-column CSV (header optional) or JSON array."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    stripped = text.lstrip()
    if stripped.startswith("["):
        try:
            values = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path} is not a valid JSON array: {exc}") from exc
        return np.asarray(values, dtype=np.float64)
    rows = [r for r in csv.reader(io.StringIO(text)) if r and r[0].strip()]
    if not rows:
        raise UsageError(f"{path} contains no data")
    try:
        float(rows[0][0])
    except ValueError:
        rows = rows[1:]  # header line
    try:
        return np.array([float(r[0]) for r in rows])
    except ValueError as exc:
        raise UsageError(f"{path} has non-numeric entries: {exc}") from exc


def _render_reports(reports, fmt: str) -> str:
    dicts = [r.to_dict() for r in reports]
    if fmt == "json":
        return json.dumps(dicts, indent=2) + "\n"
    if fmt == "csv":
        out = io.StringIO()
        out.write("name,lhs,rhs,abs_discrepancy,passed\n")
        for d in dicts:
            lhs = d.get("lhs", d["expressions"][0]["value"] if "expressions" in d else "")
            rhs = d.get("rhs", d["expressions"][-1]["value"] if "expressions" in d else "")
            out.write(
                f"{d['name']},{lhs!r},{rhs!r},{d['max_abs_discrepancy'] if 'max_abs_discrepancy' in d else d['abs_discrepancy']!r},{d['passed']}\n"
            )
        return out.getvalue()
    lines = ["| check | discrepancy | passed |", "|---|---|---|"]
    for d in dicts:
        disc = d.get("max_abs_discrepancy", d.get("abs_discrepancy"))
        lines.append(f"| {d['name']} | {disc:.3e} | {'yes' if d['passed'] else 'NO'} |")
    return "\n".join(lines) + "\n"


def _random_inputs_for(signature: str, rng) -> dict:
    if signature == "uni":
        return {"dist": exact.random_finite(rng)}
    if signature == "uni2":
        return {"dist": exact.random_finite(rng), "dist2": exact.random_finite(rng)}
    if signature == "bi":
        return {"dist": exact.random_multivariate(rng, 2)}
    if signature == "bi2":
        return {
            "dist": exact.random_multivariate(rng, 2),
            "dist2": exact.random_multivariate(rng, 2),
        }
    if signature == "quad":
        return {"dist": exact.random_multivariate(rng, 4)}
    if signature == "quad2":
        return {
            "dist": exact.random_multivariate(rng, 4),
            "dist2": exact.random_multivariate(rng, 4),
        }
    raise ValueError(signature)


def _cmd_verify(args) -> int:
    seed = _resolve_seed(args)
    rng = RngStream(seed, (0,)).generator()
    reports = []
    if args.numeric:
        names = (
            list(identities.NUMERIC_CHECKS)
            if args.numeric == "all"
            else [args.numeric]
        )
        for name in names:
            if name not in identities.NUMERIC_CHECKS:
                raise UsageError(f"unknown numeric identity {name!r}")
            for _ in range(args.trials):
                vecs = [
                    rng.uniform(-10, 10, args.n)
                    for _ in range(identities.NUMERIC_CHECKS[name])
                ]
                reports.append(identities.run_numeric_check(name, vecs))
    if args.exact:
        names = list(exact.catalog_names()) if args.exact == "all" else [args.exact]
        for name in names:
            if name not in exact.catalog_names():
                raise UsageError(f"unknown exact identity {name!r}")
            signature = exact.identity_signature(name)
            for _ in range(args.trials):
                if args.dist and signature == "uni":
                    inputs = {"dist": _finite_from_spec(args.dist)}
                else:
                    inputs = _random_inputs_for(signature, rng)
                reports.append(
                    exact.verify_identity(name, order=args.order, **inputs)
                )
    if not reports:
        raise UsageError("nothing to verify; pass --numeric and/or --exact")
    _emit(_render_reports(reports, args.format), args)
    failed = [r for r in reports if not r.passed]
    print(
        f"{len(reports) - len(failed)}/{len(reports)} checks passed",
        file=sys.stderr,
    )
    return 1 if failed else 0


def _finite_from_spec(text: str):
    spec = parse_distribution(text)
    if spec.kind != "finite":
        raise UsageError("exact checks need a finite distribution (finite:@file.json)")
    return spec.dist


def _cmd_estimate(args) -> int:
    x = _read_vector(args.file)
    seed = _resolve_seed(args)
    if args.method == "natural":
        est = natural_moment(x, args.order)
    elif args.method == "diff-exhaustive":
        est = diff_moment_exhaustive(x, args.order)
    elif args.method == "diff-mc":
        gen = RngStream(seed, (0,)).generator()
        est = diff_moment_mc(x, args.order, args.tuples, gen)
    elif args.method == "pairwise":
        if args.order != 2:
            raise UsageError("the pairwise method is the order-2 variance")
        from .estimators import MomentEstimate

        est = MomentEstimate("pairwise", 2, gini_variance(x), x.size)
    else:
        raise UsageError(f"unknown method {args.method!r}")
    payload = {
        "method": est.method,
        "order": est.order,
        "value": est.value,
        "sample_size": est.sample_size,
        "tuples_used": est.tuples_used,
        "mc_std_error": est.mc_std_error,
    }
    if args.format == "json":
        _emit(json.dumps(payload, indent=2) + "\n", args)
    elif args.format == "csv":
        keys = list(payload)
        _emit(
            ",".join(keys) + "\n" + ",".join(repr(payload[k]) for k in keys) + "\n",
            args,
        )
    else:
        _emit(
            "| " + " | ".join(payload) + " |\n"
            + "|" + "---|" * len(payload) + "\n"
            + "| " + " | ".join(str(v) for v in payload.values()) + " |\n",
            args,
        )
    return 0


def _cmd_expect(args) -> int:
    dist = _finite_from_spec(args.dist)
    kern = MomentKernel(args.kernel, args.order)
    value = exact.expect_iid(dist, kern.arity, kern)
    true = exact.central_moment_exact(dist, args.order)
    payload = {
        "kernel": args.kernel,
        "order": args.order,
        "replications": kern.arity,
        "expected_value": value,
        "central_moment": true,
    }
    if args.format == "json":
        _emit(json.dumps(payload, indent=2) + "\n", args)
    elif args.format == "csv":
        keys = list(payload)
        _emit(
            ",".join(keys) + "\n" + ",".join(repr(payload[k]) for k in keys) + "\n",
            args,
        )
    else:
        _emit(
            f"E[{args.kernel} kernel, order {args.order}] = {value!r}"
            f" (exact central moment {true!r})\n",
            args,
        )
    return 0


def _cmd_simulate(args) -> int:
    seed = _resolve_seed(args)
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = simulation.config_from_json(fh.read())
    else:
        if not args.dist:
            raise UsageError("simulate needs --dist or --config")
        config = simulation.ExperimentConfig(
            distribution=parse_distribution(args.dist),
            orders=_parse_orders(args.orders),
            replications=args.reps,
            seed=seed,
            mode=args.mode,
            sample_sizes=tuple(int(s) for s in args.sizes.split(",")) if args.sizes else (),
            mc_tuples=args.tuples,
        )
    report = simulation.run_bias_experiment(config, threads=args.threads)
    _emit(simulation.summarize(report, args.format), args)
    if args.check:
        ok, msgs = simulation.check_invariants(report)
        for m in msgs:
            print(f"check: {m}", file=sys.stderr)
        return 0 if ok else 1
    return 0


def _cmd_moments(args) -> int:
    spec = parse_distribution(args.dist)
    orders = _parse_orders(args.orders)
    values = {k: spec.true_central_moment(k) for k in orders}
    if args.format == "json":
        _emit(json.dumps({"distribution": spec.label(), "moments": values}, indent=2) + "\n", args)
    elif args.format == "csv":
        out = "order,central_moment\n" + "".join(f"{k},{v!r}\n" for k, v in values.items())
        _emit(out, args)
    else:
        head = "| " + " | ".join(f"ord {k}" for k in orders) + " |"
        rule = "|" + "---|" * len(orders)
        body = "| " + " | ".join(f"{values[k]:.10g}" for k in orders) + " |"
        _emit("\n".join([head, rule, body]) + "\n", args)
    return 0


def _add_common(p):
    p.add_argument("--seed", type=int, default=None, help="random seed (printed if omitted)")
    p.add_argument("--format", choices=("csv", "json", "md"), default="md")
    p.add_argument("--out", default=None, help="write output to a file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pairmoments",
        description="Pairwise-difference moment estimators and exact identity checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run identity checks")
    p.add_argument("--numeric", help="vector identity name or 'all'")
    p.add_argument("--exact", help="exact catalog identity name or 'all'")
    p.add_argument("--n", type=int, default=50, help="vector length for numeric checks")
    p.add_argument("--trials", type=int, default=1, help="repetitions per check")
    p.add_argument("--order", type=int, default=None, help="moment order for parameterized entries")
    p.add_argument("--dist", default=None, help="finite distribution for exact checks")
    _add_common(p)
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("estimate", help="run an estimator on a data file")
    p.add_argument("--file", required=True, help="CSV (one column) or JSON array")
    p.add_argument("--order", type=int, required=True)
    p.add_argument(
        "--method",
        choices=("natural", "diff-exhaustive", "diff-mc", "pairwise"),
        default="diff-exhaustive",
    )
    p.add_argument("--tuples", type=int, default=30_000, help="tuple draws for diff-mc")
    _add_common(p)
    p.set_defaults(fn=_cmd_estimate)

    p = sub.add_parser("expect", help="exact expected kernel value on a finite distribution")
    p.add_argument("--dist", required=True, help="finite:@file.json")
    p.add_argument("--kernel", choices=("minimal", "raw", "even", "product"), default="minimal")
    p.add_argument("--order", type=int, required=True)
    _add_common(p)
    p.set_defaults(fn=_cmd_expect)

    p = sub.add_parser("simulate", help="run a bias experiment")
    p.add_argument("--dist", default=None, help="exp:RATE | normal:M,SD | finite:@file.json")
    p.add_argument("--mode", choices=simulation.MODES, default="minimal")
    p.add_argument("--orders", default="2..8")
    p.add_argument("--sizes", default=None, help="comma-separated sample sizes (mc mode)")
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--tuples", type=int, default=30_000)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--config", default=None, help="JSON config file (overrides flags)")
    p.add_argument("--check", action="store_true", help="exit 1 if the report fails its invariants")
    _add_common(p)
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("moments", help="print closed-form central moments")
    p.add_argument("--dist", required=True)
    p.add_argument("--orders", default="2..8")
    _add_common(p)
    p.set_defaults(fn=_cmd_moments)

    return parser


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()

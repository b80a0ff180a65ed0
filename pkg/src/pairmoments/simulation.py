"""Seeded bias experiments: natural vs. difference-tuple estimators.

Two modes. ``minimal`` scores both estimators on samples of size n = k per
order (where the natural estimator's bias is most visible and the
difference estimator reduces to the single symmetrized kernel).
``mc`` uses n > k samples and the Monte Carlo difference estimator with a
fixed tuple budget per replication.

Replications are independent work units: replication r draws its sample
from the stream (seed, r) and, in mc mode, its index tuples from
(seed, r, 1), so both estimators see the same draws (a paired design) and
the report is bit-identical for any thread count.
"""

from __future__ import annotations

import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import estimators
from .distributions import DistributionSpec, RngStream, parse_distribution

MODES = ("minimal", "mc")


@dataclass(frozen=True)
class ExperimentConfig:
    distribution: DistributionSpec
    orders: tuple[int, ...]
    replications: int
    seed: int
    mode: str = "minimal"
    sample_sizes: tuple[int, ...] = ()
    mc_tuples: int = 30_000

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if not self.orders or any(k < 2 for k in self.orders):
            raise ValueError("orders must be >= 2")
        if self.replications < 1:
            raise ValueError("need at least one replication")
        if self.mode == "mc":
            if not self.sample_sizes:
                raise ValueError("mc mode needs explicit sample sizes")
            if any(n < max(self.orders) for n in self.sample_sizes):
                raise ValueError("every sample size must be >= the largest order")
            if self.mc_tuples < 1:
                raise ValueError("need at least one tuple per replication")
        object.__setattr__(self, "orders", tuple(int(k) for k in self.orders))
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))


@dataclass(frozen=True)
class BiasRow:
    estimator: str
    order: int
    n: int
    true_value: float
    mean_bias: float
    std_error: float
    replications: int


@dataclass(frozen=True)
class BiasReport:
    distribution: str
    mode: str
    seed: int
    replications: int
    mc_tuples: int | None
    rows: tuple[BiasRow, ...]

    def row(self, estimator: str, order: int, n: int) -> BiasRow:
        for r in self.rows:
            if (r.estimator, r.order, r.n) == (estimator, order, n):
                return r
        raise KeyError((estimator, order, n))

    def to_json(self) -> str:
        payload = {
            "distribution": self.distribution,
            "mode": self.mode,
            "seed": self.seed,
            "replications": self.replications,
            "mc_tuples": self.mc_tuples,
            "rows": [vars(r) for r in self.rows],
        }
        return json.dumps(payload, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "BiasReport":
        payload = json.loads(text)
        rows = tuple(BiasRow(**r) for r in payload["rows"])
        return cls(
            distribution=payload["distribution"],
            mode=payload["mode"],
            seed=payload["seed"],
            replications=payload["replications"],
            mc_tuples=payload["mc_tuples"],
            rows=rows,
        )

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("estimator,n,order,true_value,mean_bias,std_error,replications\n")
        for r in self.rows:
            out.write(
                f"{r.estimator},{r.n},{r.order},{r.true_value!r},"
                f"{r.mean_bias!r},{r.std_error!r},{r.replications}\n"
            )
        return out.getvalue()

    def to_markdown(self) -> str:
        orders = sorted({r.order for r in self.rows})
        minimal = self.mode == "minimal"
        if minimal:
            groups = sorted({(r.estimator, None) for r in self.rows})
        else:
            groups = sorted({(r.estimator, r.n) for r in self.rows}, key=lambda g: (g[1], g[0]))
        head = "| estimator | n | " + " | ".join(f"ord {k}" for k in orders) + " |"
        rule = "|" + "---|" * (len(orders) + 2)
        true_by_order = {}
        for r in self.rows:
            true_by_order.setdefault(r.order, r.true_value)
        true_cells = " | ".join(f"{true_by_order[k]:.10g}" for k in orders)
        lines = [head, rule, f"| true value |  | {true_cells} |"]
        for est, n in groups:
            cells = []
            for k in orders:
                try:
                    cells.append(f"{self.row(est, k, k if minimal else n).mean_bias:.3f}")
                except KeyError:
                    cells.append("")
            lines.append(f"| {est} | {'=k' if minimal else n} | " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"


def _minimal_block(config, lo, hi, kmax, nat, dex):
    dist = config.distribution
    orders = config.orders
    block = np.empty((hi - lo, kmax))
    for r in range(lo, hi):
        gen = RngStream(config.seed, (r,)).generator()
        block[r - lo] = dist.sample(gen, kmax)
    for j, k in enumerate(orders):
        sub = np.ascontiguousarray(block[:, :k])
        nat[lo:hi, j] = estimators.natural_moment_rows(sub, k)
        dex[lo:hi, j] = estimators.diff_moment_exhaustive_rows(sub, k)


def _mc_block(config, lo, hi, nat, dmc):
    dist = config.distribution
    orders = config.orders
    for r in range(lo, hi):
        sample_gen = RngStream(config.seed, (r,)).generator()
        tuple_gen = RngStream(config.seed, (r, 1)).generator()
        for i, n in enumerate(config.sample_sizes):
            x = dist.sample(sample_gen, n)
            xc = x - x.mean()
            for j, k in enumerate(orders):
                nat[r, i, j] = float(((xc) ** k).sum() / (n - 1))
                est = estimators.diff_moment_mc(x, k, config.mc_tuples, tuple_gen)
                dmc[r, i, j] = est.value


def run_bias_experiment(config: ExperimentConfig, threads: int = 1) -> BiasReport:
    """Run the configured experiment and aggregate per-estimator bias.

    Per-replication estimates land in preallocated arrays indexed by
    replication, so the aggregation (and therefore the report) does not
    depend on how the replication range is split across threads.
    """
    R = config.replications
    orders = config.orders
    threads = max(1, int(threads))
    chunk = max(1, math.ceil(R / max(threads * 4, 1)))
    blocks = [(lo, min(lo + chunk, R)) for lo in range(0, R, chunk)]

    if config.mode == "minimal":
        kmax = max(orders)
        nat = np.empty((R, len(orders)))
        dex = np.empty((R, len(orders)))

        def work(b):
            _minimal_block(config, b[0], b[1], kmax, nat, dex)

        if threads == 1:
            for b in blocks:
                work(b)
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                list(pool.map(work, blocks))
        rows = []
        for j, k in enumerate(orders):
            true = config.distribution.true_central_moment(k)
            for est_name, arr in (("natural", nat), ("diff-exhaustive", dex)):
                rows.append(
                    BiasRow(
                        estimator=est_name,
                        order=k,
                        n=k,
                        true_value=true,
                        mean_bias=float(arr[:, j].mean()) - true,
                        std_error=float(arr[:, j].std(ddof=1)) / math.sqrt(R),
                        replications=R,
                    )
                )
        return BiasReport(
            distribution=config.distribution.label(),
            mode=config.mode,
            seed=config.seed,
            replications=R,
            mc_tuples=None,
            rows=tuple(rows),
        )

    sizes = config.sample_sizes
    nat = np.empty((R, len(sizes), len(orders)))
    dmc = np.empty((R, len(sizes), len(orders)))

    def work(b):
        _mc_block(config, b[0], b[1], nat, dmc)

    if threads == 1:
        for b in blocks:
            work(b)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, blocks))
    rows = []
    for i, n in enumerate(sizes):
        for j, k in enumerate(orders):
            true = config.distribution.true_central_moment(k)
            for est_name, arr in (("natural", nat), ("diff-mc", dmc)):
                rows.append(
                    BiasRow(
                        estimator=est_name,
                        order=k,
                        n=n,
                        true_value=true,
                        mean_bias=float(arr[:, i, j].mean()) - true,
                        std_error=float(arr[:, i, j].std(ddof=1)) / math.sqrt(R),
                        replications=R,
                    )
                )
    return BiasReport(
        distribution=config.distribution.label(),
        mode=config.mode,
        seed=config.seed,
        replications=R,
        mc_tuples=config.mc_tuples,
        rows=tuple(rows),
    )


def summarize(report: BiasReport, fmt: str = "md") -> str:
    """Render a report as csv, json or a markdown table."""
    if fmt == "csv":
        return report.to_csv()
    if fmt == "json":
        return report.to_json()
    if fmt == "md":
        return report.to_markdown()
    raise ValueError(f"unknown format {fmt!r} (use csv, json or md)")


def check_invariants(report: BiasReport) -> tuple[bool, list[str]]:
    """Statistical pass/fail gates for a finished report.

    minimal mode: the difference estimator must look unbiased at every
    order (|mean bias| within 5 standard errors), and for skewed
    exponential targets the natural estimator must never be significantly
    biased in the wrong (positive) direction. mc mode: the difference
    estimator must beat the natural one in absolute bias for a majority
    of orders >= 3 at each sample size (single-order losses inside two
    combined standard errors are tolerated).
    """
    msgs = []
    ok = True
    orders = sorted({r.order for r in report.rows})
    sizes = sorted({r.n for r in report.rows})
    exponential = report.distribution.startswith("exp:")
    if report.mode == "minimal":
        for k in orders:
            d = report.row("diff-exhaustive", k, k)
            if abs(d.mean_bias) > 5 * d.std_error and d.mean_bias != 0.0:
                ok = False
                msgs.append(
                    f"order {k}: difference-estimator bias {d.mean_bias:.4g} "
                    f"exceeds 5 x SE {d.std_error:.4g}"
                )
            if exponential and k >= 3:
                nrow = report.row("natural", k, k)
                if nrow.mean_bias > 5 * nrow.std_error:
                    ok = False
                    msgs.append(
                        f"order {k}: natural bias {nrow.mean_bias:.4g} is "
                        f"significantly positive (SE {nrow.std_error:.4g}); "
                        "expected negative"
                    )
        return ok, msgs
    for n in sizes:
        wins = losses_outside_tol = 0
        comparable = [k for k in orders if k >= 3]
        for k in comparable:
            nrow = report.row("natural", k, n)
            drow = report.row("diff-mc", k, n)
            if abs(drow.mean_bias) < abs(nrow.mean_bias):
                wins += 1
            else:
                combined = math.hypot(nrow.std_error, drow.std_error)
                if abs(drow.mean_bias) - abs(nrow.mean_bias) > 2 * combined:
                    losses_outside_tol += 1
        if comparable and (wins <= len(comparable) // 2 or losses_outside_tol > 1):
            ok = False
            msgs.append(
                f"n={n}: difference estimator beat the natural one on only "
                f"{wins}/{len(comparable)} orders"
            )
    return ok, msgs


def config_from_json(text: str) -> ExperimentConfig:
    """Build a config from its JSON document form."""
    payload = json.loads(text)
    dist = parse_distribution(payload["distribution"])
    return ExperimentConfig(
        distribution=dist,
        orders=tuple(payload["orders"]),
        replications=int(payload["replications"]),
        seed=int(payload["seed"]),
        mode=payload.get("mode", "minimal"),
        sample_sizes=tuple(payload.get("sample_sizes", ())),
        mc_tuples=int(payload.get("mc_tuples", 30_000)),
    )

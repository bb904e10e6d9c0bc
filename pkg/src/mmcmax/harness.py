"""Monte Carlo replication and comparison against the clumping approximations."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .clumping import MaxCdfApprox, Order, gumbel_moments
from .errors import ValidationError
from .queue_model import QueueParams
from .rng import derive_seeds
from .simulator import BACKEND, CountConvention, _check_horizon, _check_seed, simulate_states

#: Replicates handed to one kernel call.
CHUNK = 20_000
#: Tail mass beyond which the approximate pmfs are no longer tabulated.
SUPPORT_TAIL = 1e-9


@dataclass(frozen=True)
class ExperimentSpec:
    params: QueueParams
    horizon_n: float
    replicates: int = 100_000
    master_seed: int = 0
    count_convention: CountConvention = CountConvention.IN_SYSTEM

    def __post_init__(self):
        object.__setattr__(self, "horizon_n", _check_horizon(self.horizon_n))
        object.__setattr__(self, "master_seed", _check_seed(self.master_seed))
        if isinstance(self.replicates, bool) or int(self.replicates) != self.replicates \
                or self.replicates < 1:
            raise ValidationError(f"replicates must be a positive integer, got {self.replicates!r}")
        object.__setattr__(self, "replicates", int(self.replicates))
        object.__setattr__(self, "count_convention", CountConvention(self.count_convention))

    def file_stem(self) -> str:
        n = self.horizon_n
        n_txt = str(int(n)) if n.is_integer() else repr(n)
        return f"mmc_c{self.params.c}_n{n_txt}_R{self.replicates}_seed{self.master_seed}"


@dataclass
class EmpiricalMaxDistribution:
    counts: dict
    replicates: int
    spec: ExperimentSpec
    events: int = 0

    def support(self) -> range:
        return range(0, max(self.counts) + 1)

    def pmf(self, m_max: int | None = None) -> np.ndarray:
        top = max(self.counts) if m_max is None else m_max
        out = np.zeros(top + 1)
        for m, k in self.counts.items():
            if m <= top:
                out[m] = k / self.replicates
        return out

    def pmf_exact(self, m: int) -> Fraction:
        return Fraction(self.counts.get(m, 0), self.replicates)

    def mean(self) -> float:
        return math.fsum(m * k for m, k in self.counts.items()) / self.replicates

    def variance(self) -> float:
        """Population variance of the recorded maxima."""
        mu = self.mean()
        return math.fsum(k * (m - mu) ** 2 for m, k in self.counts.items()) / self.replicates


@dataclass
class ComparisonReport:
    tv_low: float
    tv_high: float
    emp_mean: float
    emp_var: float
    heur_mean: float
    heur_var: float
    flags: list = field(default_factory=list)
    m: np.ndarray = field(default=None, repr=False)
    empirical_pmf: np.ndarray = field(default=None, repr=False)
    low_pmf: np.ndarray = field(default=None, repr=False)
    high_pmf: np.ndarray = field(default=None, repr=False)


def _run_chunk(args):
    params, horizon, master_seed, start, count = args
    maxima, events, _ = simulate_states(params, horizon, derive_seeds(master_seed, start, count))
    return np.bincount(maxima), int(events.sum())


def _chunks(spec: ExperimentSpec, chunk: int):
    for start in range(0, spec.replicates, chunk):
        yield (spec.params, spec.horizon_n, spec.master_seed, start,
               min(chunk, spec.replicates - start))


def run_experiment(spec: ExperimentSpec, workers: int = 1, chunk: int = CHUNK) -> EmpiricalMaxDistribution:
    """Simulate ``spec.replicates`` independent queues and bin their maxima.

    Replicate i is seeded from (master_seed, i) alone, so counts do not depend
    on ``workers`` or ``chunk``.
    """
    jobs = list(_chunks(spec, chunk))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    else:
        parts = [_run_chunk(job) for job in jobs]

    raw = Counter()
    events = 0
    for hist, ev in parts:
        events += ev
        for k in np.flatnonzero(hist):
            raw[int(k)] += int(hist[k])
    c = spec.params.c
    counts = Counter()
    for k, v in raw.items():
        counts[int(spec.count_convention.apply(k, c))] += v
    return EmpiricalMaxDistribution(
        counts=dict(sorted(counts.items())),
        replicates=spec.replicates,
        spec=spec,
        events=events,
    )


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    size = max(len(p), len(q))
    p = np.pad(np.asarray(p, dtype=float), (0, size - len(p)))
    q = np.pad(np.asarray(q, dtype=float), (0, size - len(q)))
    return min(0.5 * float(np.abs(p - q).sum()), 1.0)


def compare(empirical: EmpiricalMaxDistribution) -> ComparisonReport:
    """Total-variation distances and moments against both approximations.

    The pmfs are tabulated over the empirical support, extended until both
    approximate CDFs exceed 1 - 1e-9.
    """
    spec = empirical.spec
    low = MaxCdfApprox(spec.params, spec.horizon_n, Order.LOW)
    high = MaxCdfApprox(spec.params, spec.horizon_n, Order.HIGH)
    top = max(max(empirical.counts), low.support_end(SUPPORT_TAIL), high.support_end(SUPPORT_TAIL))
    low_tab = low.table(top)
    high_tab = high.table(top)
    emp = empirical.pmf(top)
    moments = gumbel_moments(spec.params)
    flags = list(high_tab.flags)
    if spec.count_convention is not CountConvention.IN_SYSTEM_MINUS_ONE:
        flags.append(
            f"count convention '{spec.count_convention.value}' differs from the "
            "'in-system-minus-one' indexing the approximations are calibrated to"
        )
    return ComparisonReport(
        tv_low=total_variation(emp, low_tab.pmf),
        tv_high=total_variation(emp, high_tab.pmf),
        emp_mean=empirical.mean(),
        emp_var=empirical.variance(),
        heur_mean=moments.mean(spec.horizon_n),
        heur_var=moments.variance,
        flags=flags,
        m=np.arange(top + 1),
        empirical_pmf=emp,
        low_pmf=low_tab.pmf,
        high_pmf=high_tab.pmf,
    )


def _fmt(x: float) -> str:
    return repr(float(x))


def report_csv(empirical: EmpiricalMaxDistribution, report: ComparisonReport) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["m", "empirical_pmf", "low_order_pmf", "high_order_pmf"])
    for i, m in enumerate(report.m):
        writer.writerow([int(m), _fmt(report.empirical_pmf[i]), _fmt(report.low_pmf[i]),
                         _fmt(report.high_pmf[i])])
    return buf.getvalue().encode()


def report_dict(empirical: EmpiricalMaxDistribution, report: ComparisonReport,
                timestamp: bool = True) -> dict:
    spec = empirical.spec
    p = spec.params
    moments = gumbel_moments(p)
    out = {
        "tool": "mmcmax",
        "version": __version__,
        "backend": BACKEND,
        "spec": {
            "c": p.c,
            "lambda": p.lam,
            "mu": p.mu,
            "rho": p.rho,
            "horizon_n": spec.horizon_n,
            "replicates": spec.replicates,
            "count_convention": spec.count_convention.value,
        },
        "seeds": {
            "master_seed": spec.master_seed,
            "derivation": "replicate i uses mix64(master_seed ^ mix64(i)), xoshiro256** stream",
        },
        "moments": {
            "slope": moments.slope,
            "intercept": moments.intercept,
            "heuristic_mean": report.heur_mean,
            "heuristic_variance": report.heur_var,
            "empirical_mean": report.emp_mean,
            "empirical_variance": report.emp_var,
        },
        "tv_low": report.tv_low,
        "tv_high": report.tv_high,
        "flags": list(report.flags),
        "counts": {str(m): k for m, k in sorted(empirical.counts.items())},
        "events": empirical.events,
        "pmf": [
            {"m": int(m), "empirical": float(report.empirical_pmf[i]),
             "low_order": float(report.low_pmf[i]), "high_order": float(report.high_pmf[i])}
            for i, m in enumerate(report.m)
        ],
    }
    if timestamp:
        out["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    return out


def report_json(empirical: EmpiricalMaxDistribution, report: ComparisonReport,
                timestamp: bool = True) -> bytes:
    return (json.dumps(report_dict(empirical, report, timestamp), indent=2) + "\n").encode()


def emit_report(empirical: EmpiricalMaxDistribution, report: ComparisonReport,
                fmt: str = "json", stream=None) -> bytes:
    """Serialize a comparison as CSV or JSON; also write it to ``stream`` if given."""
    fmt = fmt.lower()
    if fmt == "csv":
        data = report_csv(empirical, report)
    elif fmt == "json":
        data = report_json(empirical, report)
    else:
        raise ValidationError(f"format must be 'csv' or 'json', got {fmt!r}")
    if stream is not None:
        stream.write(data)
    return data


def load_report(path) -> EmpiricalMaxDistribution:
    """Rebuild the empirical distribution stored in a JSON report."""
    with open(path, "rb") as fh:
        doc = json.load(fh)
    s = doc["spec"]
    spec = ExperimentSpec(
        params=QueueParams(s["c"], s["lambda"], s["mu"]),
        horizon_n=s["horizon_n"],
        replicates=s["replicates"],
        master_seed=doc["seeds"]["master_seed"],
        count_convention=CountConvention(s["count_convention"]),
    )
    counts = {int(m): int(k) for m, k in doc["counts"].items()}
    if sum(counts.values()) != spec.replicates:
        raise ValidationError("report counts do not sum to the replicate count")
    return EmpiricalMaxDistribution(counts=counts, replicates=spec.replicates, spec=spec,
                                    events=int(doc.get("events", 0)))

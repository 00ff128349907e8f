"""Bypass versus optical-processing benchmark studies."""

from __future__ import annotations

import csv
import hashlib
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .net_model import DemandSet, TransceiverTable, default_table, generate_traffic, resolve_topology
from .solver import DesignInstance, InfeasibleError, enumerate_candidates, solve_exact

log = logging.getLogger(__name__)

STUDIES = {
    # study -> (paradigm, topology, destinations, rate)
    "aggregation": ("aggregation", "cost239", 7, 100),
    "xor": ("xor", "nsfnet", "all", 200),
}

# published maxima shown next to the observed ones
REFERENCE_MAX_GAIN = {"aggregation": "more than 30%", "xor": "17%"}

CSV_COLUMNS = ["set", "seed", "bypass_cost", "processing_cost", "gain_percent"]


@dataclass(frozen=True)
class StudySpec:
    study: str
    topology: str | None = None
    n_sets: int = 10
    seed: int = 1
    k: int = 5
    rate_gbps: int | None = None
    n_destinations: int | str | None = None
    protected: bool = True
    agg_scope: str = "both"
    same_dst: bool = True
    per_source: bool = False
    table: TransceiverTable | None = None
    # fixed traffic replaces the generated sets (one set)
    traffic: DemandSet | None = None

    def __post_init__(self):
        if self.study not in STUDIES:
            raise ValueError(f"unknown study {self.study!r}; choose from {sorted(STUDIES)}")
        if self.n_sets < 1:
            raise ValueError("n_sets must be >= 1")

    @property
    def paradigm(self) -> str:
        return STUDIES[self.study][0]

    def resolved(self) -> dict:
        _, topo, ndest, rate = STUDIES[self.study]
        return {
            "topology": self.topology or topo,
            "n_destinations": self.n_destinations if self.n_destinations is not None else ndest,
            "rate_gbps": self.rate_gbps or rate,
        }


@dataclass(frozen=True)
class StudyRow:
    set: int
    seed: int | None
    bypass_cost: int
    processing_cost: int
    demand_hash: str = ""

    @property
    def gain_percent(self) -> float:
        return (self.bypass_cost - self.processing_cost) / self.bypass_cost * 100.0


@dataclass
class StudyResult:
    study: str
    rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)  # (set, seed, reason)
    scope: str = "both"

    @property
    def max_gain(self) -> float:
        return max((r.gain_percent for r in self.rows), default=0.0)

    @property
    def mean_gain(self) -> float:
        if not self.rows:
            return 0.0
        return sum(r.gain_percent for r in self.rows) / len(self.rows)

    @property
    def strictly_better(self) -> int:
        return sum(1 for r in self.rows if r.processing_cost < r.bypass_cost)


def demand_hash(demands: DemandSet) -> str:
    return hashlib.sha256(demands.to_json().encode()).hexdigest()[:16]


def _solve_set(args):
    spec, index = args
    conf = spec.resolved()
    topology = resolve_topology(conf["topology"])
    seed = spec.seed + index
    if spec.traffic is not None:
        demands = spec.traffic
        seed = demands.seed
    else:
        demands = generate_traffic(
            topology, conf["n_destinations"], conf["rate_gbps"], spec.protected, seed, spec.per_source
        )
    instance = DesignInstance(
        topology, demands, spec.table or default_table(), spec.paradigm,
        spec.k, spec.agg_scope, spec.same_dst,
    )
    try:
        processing = enumerate_candidates(instance)
    except InfeasibleError as e:
        return index, seed, None, str(e)
    # the bypass candidates are the solo part of the processing candidate set
    bypass = type(processing)(processing.solo, {}, processing.order)
    b = solve_exact(instance.with_paradigm("bypass"), bypass).total_cost
    p = solve_exact(instance, processing).total_cost
    return index, seed, StudyRow(index + 1, seed, b, p, demand_hash(demands)), None


def run_study(spec: StudySpec, jobs: int = 1) -> StudyResult:
    """Solve every traffic set under bypass and the study's processing paradigm."""
    n = 1 if spec.traffic is not None else spec.n_sets
    tasks = [(spec, i) for i in range(n)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            outcomes = list(pool.map(_solve_set, tasks))
    else:
        outcomes = [_solve_set(t) for t in tasks]
    result = StudyResult(spec.study, scope=spec.agg_scope)
    for index, seed, row, error in sorted(outcomes, key=lambda o: o[0]):
        if row is None:
            log.warning("set %d (seed %s) skipped: %s", index + 1, seed, error)
            result.failures.append((index + 1, seed, error))
            continue
        log.info(
            "set %d seed %s demands %s: bypass %d, %s %d",
            row.set, row.seed, row.demand_hash, row.bypass_cost, spec.paradigm, row.processing_cost,
        )
        result.rows.append(row)
    return result


def to_csv(result: StudyResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in result.rows:
        writer.writerow([r.set, r.seed, r.bypass_cost, r.processing_cost, f"{r.gain_percent:.4f}"])
    return buf.getvalue()


def to_text(result: StudyResult) -> str:
    label = "aggregation" if result.study == "aggregation" else "xor coding"
    head = ["set", "seed", "bypass", label, "gain %"]
    body = [
        [str(r.set), str(r.seed), str(r.bypass_cost), str(r.processing_cost), f"{r.gain_percent:.2f}"]
        for r in result.rows
    ]
    widths = [max(len(x) for x in col) for col in zip(head, *body)]
    lines = ["  ".join(x.rjust(w) for x, w in zip(row, widths)) for row in [head, *body]]
    n = len(result.rows)
    lines += [
        "",
        f"max gain: {result.max_gain:.2f}% (reference: up to {REFERENCE_MAX_GAIN[result.study]})",
        f"mean gain: {result.mean_gain:.2f}%",
        f"strictly better in {result.strictly_better}/{n} sets",
    ]
    if result.study == "aggregation":
        lines.append(f"aggregation scope: {result.scope}")
    for set_no, seed, reason in result.failures:
        lines.append(f"set {set_no} (seed {seed}) infeasible: {reason}")
    return "\n".join(lines) + "\n"


def emit(result: StudyResult, format: str = "csv") -> str:
    if format == "csv":
        return to_csv(result)
    if format == "text":
        return to_text(result)
    raise ValueError(f"unknown output format {format!r}")

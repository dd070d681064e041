"""Discrete-event engine: Poisson arrivals, exponential holding, sweeps.

One replication processes a fixed number of connection requests plus
their departures in time order.  Arrivals follow a Poisson process whose
rate is ``load_erlangs / mean_holding_s``; endpoints are uniform over
ordered distinct node pairs; the bandwidth is uniform over the
configured choices; holding times are exponential.

Randomness comes from a counter-based Philox generator seeded with
``base_seed + replication_index``, so every replication result is a pure
function of (seed, configuration) and is bit-identical across reruns.

After the last arrival the circuits still active are drained without
generating new traffic; utilization statistics integrate exact busy time
from t=0 up to the last arrival, so the drain tail does not dilute them.
"""

from __future__ import annotations

import heapq
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import metrics
from .control_plane import (
    DEFAULT_DETECTION_TOLERANCE_DB,
    Blocked,
    ControlMode,
    NetworkState,
    handle_request,
)
from .jammer import GroundTruth, JammerConfig, ground_truth_channels, resolve_target
from .phy import PhyParams
from .topology import Topology

__all__ = [
    "TrafficModel",
    "Request",
    "Event",
    "DEPARTURE",
    "ARRIVAL",
    "generate_request",
    "run_replication",
    "compute_utilization_ranking",
    "epsilon_sweep_values",
    "ScenarioPoint",
    "ScenarioResult",
    "run_scenario",
]

DEPARTURE = 0
ARRIVAL = 1


@dataclass(frozen=True)
class TrafficModel:
    """Offered-load description; defaults match the reference workload."""

    load_erlangs: float = 200.0
    mean_holding_s: float = 600.0
    bandwidth_choices_gbps: tuple[float, ...] = (40.0, 200.0, 400.0)
    requests_per_replication: int = 100_000
    replications: int = 10

    def __post_init__(self) -> None:
        if self.load_erlangs <= 0 or self.mean_holding_s <= 0:
            raise ValueError("load and holding time must be positive")
        if not self.bandwidth_choices_gbps or any(b <= 0 for b in self.bandwidth_choices_gbps):
            raise ValueError("bandwidth choices must be positive")
        if self.requests_per_replication < 0 or self.replications < 1:
            raise ValueError("request count must be >= 0 and replications >= 1")

    @property
    def arrival_rate(self) -> float:
        """Requests per second: offered load over mean holding time."""
        return self.load_erlangs / self.mean_holding_s


@dataclass(frozen=True)
class Request:
    id: int
    source: str
    destination: str
    bandwidth_gbps: float
    arrival_time: float
    holding_s: float


class Event(NamedTuple):
    """Heap entry; ties break departure-before-arrival, then by seq."""

    time: float
    kind: int
    seq: int
    payload: object


def generate_request(
    rng: np.random.Generator,
    topology: Topology,
    traffic: TrafficModel,
    previous_arrival_time: float,
    request_id: int = 0,
) -> tuple[Request, float]:
    """Draw the next request after ``previous_arrival_time``.

    Draw order is fixed (inter-arrival, source, destination, bandwidth,
    holding) so that a seed pins the whole request sequence.
    """
    arrival = previous_arrival_time + rng.exponential(1.0 / traffic.arrival_rate)
    n = len(topology.nodes)
    i = int(rng.integers(n))
    j = int(rng.integers(n - 1))
    if j >= i:
        j += 1
    bandwidth = traffic.bandwidth_choices_gbps[int(rng.integers(len(traffic.bandwidth_choices_gbps)))]
    holding = float(rng.exponential(traffic.mean_holding_s))
    request = Request(
        id=request_id,
        source=topology.nodes[i],
        destination=topology.nodes[j],
        bandwidth_gbps=bandwidth,
        arrival_time=float(arrival),
        holding_s=holding,
    )
    return request, float(arrival)


def run_replication(
    seed: int,
    topology: Topology,
    traffic: TrafficModel,
    mode: ControlMode,
    jammer_config: JammerConfig | None = None,
    params: PhyParams | None = None,
    detection_tolerance_db: float = DEFAULT_DETECTION_TOLERANCE_DB,
    utilization_ranking=None,
    audit_hook=None,
    audit_every: int = 0,
) -> metrics.ReplicationResult:
    """Simulate one seeded replication and aggregate its statistics.

    ``utilization_ranking`` is required when the jammer targets the
    most- or least-used link.  ``audit_hook(state, kind, time)`` is
    invoked every ``audit_every`` processed events when set (testing
    aid).
    """
    if params is None:
        params = PhyParams()
    if mode is ControlMode.NO_JAMMING:
        if jammer_config is not None:
            raise ValueError("no_jamming runs must not carry a jammer")
        ground_truth: GroundTruth | None = None
    else:
        if jammer_config is None:
            raise ValueError(f"mode {mode.value} requires a jammer config")
        target = resolve_target(jammer_config, utilization_ranking)
        topology.link_by_id(target)
        ground_truth = ground_truth_channels(jammer_config, params, target_link_id=target)

    state = NetworkState(topology, params)
    rng = np.random.Generator(np.random.Philox(seed))
    n_requests = traffic.requests_per_replication

    blocked_by_reason: dict[str, int] = {}
    established = 0
    heap: list[Event] = []
    seq = 0
    arrivals_emitted = 0
    if n_requests > 0:
        request, arrival = generate_request(rng, topology, traffic, 0.0, request_id=1)
        heapq.heappush(heap, Event(arrival, ARRIVAL, seq, request))
        seq += 1
        arrivals_emitted = 1

    cutoff: float | None = None
    processed = 0
    while heap:
        event = heapq.heappop(heap)
        now = event.time if cutoff is None else min(event.time, cutoff)
        if event.kind == DEPARTURE:
            state.depart(event.payload, now)
        else:
            request = event.payload
            outcome = handle_request(
                request,
                state,
                mode,
                ground_truth,
                params,
                tolerance_db=detection_tolerance_db,
                now=now,
            )
            if isinstance(outcome, Blocked):
                blocked_by_reason[outcome.reason] = blocked_by_reason.get(outcome.reason, 0) + 1
            else:
                established += 1
                heapq.heappush(heap, Event(outcome.departs_at, DEPARTURE, seq, outcome.id))
                seq += 1
            if arrivals_emitted < n_requests:
                nxt, arrival = generate_request(
                    rng, topology, traffic, request.arrival_time, request_id=request.id + 1
                )
                heapq.heappush(heap, Event(arrival, ARRIVAL, seq, nxt))
                seq += 1
                arrivals_emitted += 1
            elif cutoff is None:
                cutoff = request.arrival_time
        processed += 1
        if audit_hook is not None and audit_every and processed % audit_every == 0:
            audit_hook(state, event.kind, now)

    horizon = cutoff if cutoff is not None else 0.0
    if state.actives:
        raise RuntimeError("drain left active circuits behind")
    state.flush_time(horizon)

    slot_count = next(iter(state.grids.values())).slot_count if state.grids else 0
    by_link: dict[str, np.ndarray] = {}
    used_by_link: dict[str, np.ndarray] = {}
    all_grids = []
    for grid in state.grids.values():
        if horizon > 0:
            fractions = grid.reserved_seconds / horizon
            used_vec = grid.used_seconds / horizon
        else:
            fractions = np.zeros(slot_count)
            used_vec = np.zeros(slot_count)
        all_grids.append(fractions)
        if grid.link_id in by_link:
            by_link[grid.link_id] = (by_link[grid.link_id] + fractions) / 2.0
            used_by_link[grid.link_id] = (used_by_link[grid.link_id] + used_vec) / 2.0
        else:
            by_link[grid.link_id] = fractions
            used_by_link[grid.link_id] = used_vec
    slot_utilization = (
        np.mean(np.stack(all_grids), axis=0) if all_grids else np.zeros(slot_count)
    )
    link_used = {link_id: float(np.mean(vec)) for link_id, vec in used_by_link.items()}

    return metrics.ReplicationResult(
        requests=n_requests,
        blocked_by_reason=dict(sorted(blocked_by_reason.items())),
        slot_utilization=slot_utilization,
        link_mean_utilization=link_used,
        slot_utilization_by_link=by_link,
        slot_used_by_link=used_by_link,
        established=established,
        horizon_s=horizon,
    )


def epsilon_sweep_values(start: float, stop: float, step: float) -> list[float]:
    """Inclusive sweep grid, robust to floating-point step accumulation."""
    if step <= 0:
        raise ValueError(f"sweep step must be positive, got {step}")
    if stop < start:
        raise ValueError("sweep stop must be >= start")
    count = int(round((stop - start) / step))
    values = [round(start + i * step, 10) for i in range(count + 1)]
    return [v for v in values if v <= stop + 1e-9]


def _replication_job(args):
    (
        seed,
        topology,
        traffic,
        mode,
        jammer_config,
        params,
        tolerance,
        ranking,
    ) = args
    return run_replication(
        seed,
        topology,
        traffic,
        mode,
        jammer_config,
        params,
        detection_tolerance_db=tolerance,
        utilization_ranking=ranking,
    )


def _run_jobs(jobs, workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [_replication_job(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_replication_job, jobs))


def compute_utilization_ranking(
    topology: Topology,
    traffic: TrafficModel,
    base_seed: int,
    params: PhyParams | None = None,
    workers: int = 1,
) -> list[tuple[str, float]]:
    """Rank links by mean utilization from a jammer-free pre-run.

    Uses the same seed set as the main runs so the most/least-used
    selection is reproducible.
    """
    if params is None:
        params = PhyParams()
    jobs = [
        (base_seed + r, topology, traffic, ControlMode.NO_JAMMING, None, params, 0.1, None)
        for r in range(traffic.replications)
    ]
    results = _run_jobs(jobs, workers)
    return metrics.utilization_ranking(results)


@dataclass(frozen=True)
class ScenarioPoint:
    """All replications of one (mode, epsilon) sweep point."""

    mode: ControlMode
    target_link_id: str | None
    epsilon_db: float | None
    results: tuple[metrics.ReplicationResult, ...]

    @property
    def mean_blocking(self) -> float:
        return float(np.mean([metrics.blocking_probability(r) for r in self.results]))

    @property
    def mean_slot_utilization(self) -> np.ndarray:
        return metrics.slot_histogram(self.results)


@dataclass(frozen=True)
class ScenarioResult:
    points: tuple[ScenarioPoint, ...]
    ranking: tuple[tuple[str, float], ...] | None = None


def run_scenario(config, ranking=None) -> ScenarioResult:
    """Run every (mode, epsilon, replication) combination of a scenario.

    ``config`` is a :class:`eonjam.cli.ScenarioConfig` (or anything with
    the same attributes).  The no-jamming mode ignores the sweep: its
    blocking is constant in epsilon, so it contributes a single point.
    A link-utilization ranking is computed from a jammer-free pre-run
    when the jammer uses a most/least-used selector and none is given.
    """
    topology = config.load_topology()
    params = PhyParams()
    traffic = config.traffic
    seeds = [config.base_seed + r for r in range(traffic.replications)]

    needs_jammer = any(m is not ControlMode.NO_JAMMING for m in config.modes)
    target_link_id = None
    if needs_jammer:
        if config.jammer is None:
            raise ValueError("jamming modes require a jammer section")
        if config.jammer.uses_selector and ranking is None:
            ranking = compute_utilization_ranking(
                topology, traffic, config.base_seed, params, workers=config.workers
            )
        target_link_id = resolve_target(config.jammer, ranking)
        topology.link_by_id(target_link_id)

    sweep = (
        epsilon_sweep_values(*config.epsilon_sweep)
        if config.epsilon_sweep is not None
        else [0.0]
    )

    jobs = []
    keys = []
    for mode in config.modes:
        if mode is ControlMode.NO_JAMMING:
            eps_values = [None]
        else:
            eps_values = list(sweep)
        for eps in eps_values:
            for rep_index, seed in enumerate(seeds):
                if mode is ControlMode.NO_JAMMING:
                    jam = None
                else:
                    jam = JammerConfig(
                        target=target_link_id,
                        jammed_ranges=config.jammer.jammed_ranges,
                        epsilon_db=eps,
                    )
                jobs.append(
                    (
                        seed,
                        topology,
                        traffic,
                        mode,
                        jam,
                        params,
                        config.detection_tolerance_db,
                        None,
                    )
                )
                keys.append((mode, eps, rep_index))

    outputs = _run_jobs(jobs, config.workers)

    grouped: dict[tuple, list] = {}
    for key, result in zip(keys, outputs):
        grouped.setdefault(key[:2], []).append(result)
    points = tuple(
        ScenarioPoint(
            mode=mode,
            target_link_id=None if mode is ControlMode.NO_JAMMING else target_link_id,
            epsilon_db=eps,
            results=tuple(results),
        )
        for (mode, eps), results in grouped.items()
    )
    return ScenarioResult(
        points=points,
        ranking=None if ranking is None else tuple(ranking),
    )

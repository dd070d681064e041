"""Admission control: RSA loop, QoT evaluation, jamming detection.

A request is served by the flowchart loop in :func:`handle_request`:
the cached shortest route is fixed, then modulation formats are tried
from the most to the least spectrally efficient.  For each format the
First Fit block is evaluated against the true physical model (the
jamming noise is physically present whether or not the control plane
knows about it):

* the candidate itself must meet its modulation SNR threshold;
* no already-active circuit sharing a link may be pushed below its own
  threshold by the candidate's added interference;
* in aware mode, the measured SNR (which includes jamming) is compared
  with the estimate from the interference model; a mismatch beyond the
  tolerance on a candidate whose spectrum overlaps a jammed range gets
  the range marked forbidden for the rest of the run, and First Fit is
  asked for a different block at the same modulation.

A mismatch on a candidate that does not overlap any jammed range (pure
out-of-band interference from an empty jammed channel) is observable via
:func:`detect_jamming` but does not reject the candidate: the leaked
interference is already priced into the QoT checks, and refusing all
spectrum within measurement reach of the attack would shut down the
whole attacked link at high jamming powers.

QoT rejection falls through to the next lower modulation; when all
formats are exhausted the request is blocked with the dominant reason.

The engine tracks each active circuit's noise incrementally: the ASE,
self-channel and jamming terms are constants of its route and block, and
the cross-channel term is updated by the exact pair contribution when a
neighbour arrives or departs.  This keeps admission checks O(shared
neighbours) instead of rescanning the whole network.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from . import phy
from .jammer import GroundTruth
from .spectrum import SlotBlock, SlotGrid, allocate, first_fit, release
from .topology import Route, Topology

__all__ = [
    "ControlMode",
    "Verdict",
    "Lightpath",
    "Blocked",
    "NetworkState",
    "REASON_NO_SPECTRUM",
    "REASON_QOT",
    "REASON_JAMMED",
    "required_slots",
    "handle_request",
    "evaluate_candidate",
    "detect_jamming",
    "verify_state_invariants",
]

DEFAULT_DETECTION_TOLERANCE_DB = 0.1

REASON_NO_SPECTRUM = "no-spectrum"
REASON_QOT = "qot-fail"
REASON_JAMMED = "jammed-no-alternative"


class ControlMode(str, Enum):
    NO_JAMMING = "no_jamming"
    UNAWARE = "unaware"
    AWARE = "aware"


class Verdict(Enum):
    ACCEPT = "accept"
    REJECT_QOT = "reject_qot"
    REJECT_JAMMED = "reject_jammed"


@dataclass
class Lightpath:
    """A circuit (candidate or established) plus its live noise state.

    ``ase_psd``, ``sci_psd`` and ``jam_psd`` are constants of the route,
    block and static attack; ``xci_psd`` is the accumulated cross-channel
    interference from currently co-propagating circuits.
    """

    id: int
    route: Route
    block: SlotBlock
    modulation: phy.Modulation
    bandwidth_gbps: float
    established_at: float
    departs_at: float
    channel: phy.Channel
    ase_psd: float
    sci_psd: float
    jam_psd: float
    xci_psd: float = 0.0

    @property
    def noise_psd(self) -> float:
        return self.ase_psd + self.sci_psd + self.xci_psd + self.jam_psd

    @property
    def snr(self) -> float:
        """True (measured) SNR, jamming included."""
        return self.channel.psd_w_per_hz / self.noise_psd

    @property
    def snr_estimated(self) -> float:
        """SNR predicted by the jamming-blind interference model."""
        return self.channel.psd_w_per_hz / (self.ase_psd + self.sci_psd + self.xci_psd)

    def meets_threshold(self) -> bool:
        return phy.qot_verdict(self.snr, self.modulation)


@dataclass(frozen=True)
class Blocked:
    """A denied request and the dominant reason."""

    reason: str
    source: str
    destination: str
    bandwidth_gbps: float


class NetworkState:
    """Slot grids, active circuits and the forbidden-slot registry."""

    def __init__(self, topology: Topology, params: phy.PhyParams):
        self.topology = topology
        self.params = params
        self.grids: dict[tuple[str, str], SlotGrid] = {}
        self.grid_actives: dict[tuple[str, str], dict[int, Lightpath]] = {}
        for link in topology.links:
            for direction in ((link.source, link.destination), (link.destination, link.source)):
                self.grids[direction] = SlotGrid(link.id, direction)
                self.grid_actives[direction] = {}
        self.actives: dict[int, Lightpath] = {}
        self.forbidden_ranges: dict[str, list[SlotBlock]] = {}
        # Engine-local constants, hoisted out of the admission hot loop.
        self._g0 = phy.g0_ase(params)
        self._phi = params.phi
        self._rho = params.rho
        self._tx_power_w = params.tx_power_w

    def grids_for_route(self, route: Route) -> list[SlotGrid]:
        return [self.grids[hop] for hop in route.directed_hops]

    def forbid_range(self, link_id: str, block: SlotBlock) -> bool:
        """Register ``block`` as forbidden on both directions of a link.

        Returns False when the range was already registered.  Only free
        slots are painted; slots still held by an active circuit are
        painted when that circuit releases them.
        """
        registered = self.forbidden_ranges.setdefault(link_id, [])
        if block in registered:
            return False
        registered.append(block)
        link = self.topology.link_by_id(link_id)
        for direction in ((link.source, link.destination), (link.destination, link.source)):
            grid = self.grids[direction]
            segment = grid.occupancy[block.start:block.end]
            segment[segment == 0] = -1
            grid.invalidate_coverage()
        return True

    def _repaint_forbidden(self, grid: SlotGrid) -> None:
        for block in self.forbidden_ranges.get(grid.link_id, ()):
            segment = grid.occupancy[block.start:block.end]
            segment[segment == 0] = -1
            grid.invalidate_coverage()

    def advance_time(self, route: Route, now: float) -> None:
        for grid in self.grids_for_route(route):
            grid.advance_time(now)

    def flush_time(self, now: float) -> None:
        for grid in self.grids.values():
            grid.advance_time(now)

    def establish(self, lightpath: Lightpath, now: float) -> None:
        """Allocate spectrum and fold the circuit's NLI onto its neighbours."""
        grids = self.grids_for_route(lightpath.route)
        for grid in grids:
            grid.advance_time(now)
        allocate(grids, lightpath.block, lightpath.id)
        for neighbour_id, delta in _neighbour_deltas(self, lightpath).items():
            self.actives[neighbour_id].xci_psd += delta
        for hop in lightpath.route.directed_hops:
            self.grid_actives[hop][lightpath.id] = lightpath
        self.actives[lightpath.id] = lightpath

    def depart(self, lightpath_id: int, now: float) -> None:
        """Release spectrum and remove the circuit's NLI from neighbours."""
        lightpath = self.actives.pop(lightpath_id)
        for hop in lightpath.route.directed_hops:
            del self.grid_actives[hop][lightpath_id]
        grids = self.grids_for_route(lightpath.route)
        for grid in grids:
            grid.advance_time(now)
        release(grids, lightpath_id)
        for grid in grids:
            self._repaint_forbidden(grid)
        for neighbour_id, delta in _neighbour_deltas(self, lightpath).items():
            self.actives[neighbour_id].xci_psd -= delta


def required_slots(bandwidth_gbps: float, modulation: phy.Modulation, params: phy.PhyParams) -> int:
    """Contiguous slots needed to carry ``bandwidth_gbps`` at this format."""
    if bandwidth_gbps <= 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth_gbps}")
    slot_gbps = params.slot_width_hz / 1e9
    return math.ceil(bandwidth_gbps / (slot_gbps * modulation.bits_per_symbol))


def _pair_xci_psd(
    victim: phy.Channel,
    interferer: phy.Channel,
    span_count: int,
    phi: float,
) -> float:
    """Cross-channel NLI PSD one interferer adds to one victim per link."""
    spacing = abs(victim.center_frequency_hz - interferer.center_frequency_hz)
    half = interferer.bandwidth_hz / 2.0
    return (
        span_count
        * phi
        * victim.psd_w_per_hz
        * interferer.psd_w_per_hz**2
        * math.log((spacing + half) / (spacing - half))
    )


def _neighbour_deltas(state: NetworkState, lightpath: Lightpath) -> dict[int, float]:
    """Per-neighbour XCI this circuit contributes, summed over shared links."""
    deltas: dict[int, float] = {}
    phi = state._phi
    for link, hop in zip(lightpath.route.links, lightpath.route.directed_hops):
        for other_id, other in state.grid_actives[hop].items():
            if other_id == lightpath.id:
                continue
            term = _pair_xci_psd(other.channel, lightpath.channel, link.span_count, phi)
            deltas[other_id] = deltas.get(other_id, 0.0) + term
    return deltas


def _jamming_noise(
    channel: phy.Channel,
    route: Route,
    ground_truth: GroundTruth | None,
    state: NetworkState,
) -> float:
    """Constant jamming noise PSD for a circuit on ``route``.

    Out-of-band jammed channels contribute accumulated NLI per span of
    the attacked link; an overlapping jammed channel adds the in-band
    excess once.  Exactly 0.0 when the attack is absent or inert.
    """
    if ground_truth is None:
        return 0.0
    total = 0.0
    eps = ground_truth.epsilon_w
    excess = eps * eps + 2.0 * eps * state._tx_power_w
    for link in route.links:
        if link.id != ground_truth.link_id:
            continue
        for jam in ground_truth.channels:
            if channel.overlap_hz(jam) > 0.0:
                total += phy.inband_jamming_psd(channel, jam, eps)
            else:
                spacing = abs(channel.center_frequency_hz - jam.center_frequency_hz)
                half = jam.bandwidth_hz / 2.0
                total += (
                    link.span_count
                    * state._phi
                    * channel.psd_w_per_hz
                    * (excess / jam.bandwidth_hz**2)
                    * math.log((spacing + half) / (spacing - half))
                )
    return total


def _build_candidate(
    request_id: int,
    route: Route,
    block: SlotBlock,
    modulation: phy.Modulation,
    bandwidth_gbps: float,
    arrival_time: float,
    holding_s: float,
    state: NetworkState,
    ground_truth: GroundTruth | None,
) -> Lightpath:
    """Assemble a candidate circuit with its noise terms evaluated."""
    channel = phy.channel_for_block(block, state.params)
    g = channel.psd_w_per_hz
    ase = route.total_spans * state._g0
    sci = (
        route.total_spans
        * state._phi
        * g**3
        * math.asinh(state._rho * channel.bandwidth_hz**2)
    )
    xci = 0.0
    for link, hop in zip(route.links, route.directed_hops):
        for other in state.grid_actives[hop].values():
            xci += _pair_xci_psd(channel, other.channel, link.span_count, state._phi)
    jam = _jamming_noise(channel, route, ground_truth, state)
    return Lightpath(
        id=request_id,
        route=route,
        block=block,
        modulation=modulation,
        bandwidth_gbps=bandwidth_gbps,
        established_at=arrival_time,
        departs_at=arrival_time + holding_s,
        channel=channel,
        ase_psd=ase,
        sci_psd=sci,
        jam_psd=jam,
        xci_psd=xci,
    )


def detect_jamming(
    candidate: Lightpath,
    state: NetworkState,
    ground_truth: GroundTruth | None,
    params: phy.PhyParams,
    tolerance_db: float = DEFAULT_DETECTION_TOLERANCE_DB,
) -> bool:
    """Compare measured and estimated SNR of a candidate circuit.

    The measured value comes from the emulated physical feed (jamming
    included); the estimate is what the interference model predicts
    without an attacker.  True when they disagree by more than the
    tolerance.
    """
    if ground_truth is None or candidate.jam_psd == 0.0:
        return False
    gap_db = phy.linear_to_db(candidate.snr_estimated) - phy.linear_to_db(candidate.snr)
    return abs(gap_db) > tolerance_db


def evaluate_candidate(
    candidate: Lightpath,
    state: NetworkState,
    mode: ControlMode,
    ground_truth: GroundTruth | None,
    params: phy.PhyParams,
    tolerance_db: float = DEFAULT_DETECTION_TOLERANCE_DB,
) -> Verdict:
    """Admission decision for one candidate circuit.

    Checks, in order: the candidate's own QoT under true physics, the
    survival of every active circuit sharing a link, and (aware mode)
    the jamming-detection comparison for candidates overlapping a
    jammed range.
    """
    if not candidate.meets_threshold():
        return Verdict.REJECT_QOT
    for neighbour_id, delta in _neighbour_deltas(state, candidate).items():
        neighbour = state.actives[neighbour_id]
        degraded = neighbour.channel.psd_w_per_hz / (neighbour.noise_psd + delta)
        if not phy.qot_verdict(degraded, neighbour.modulation):
            return Verdict.REJECT_QOT
    if mode is ControlMode.AWARE and ground_truth is not None:
        if detect_jamming(candidate, state, ground_truth, params, tolerance_db):
            if ground_truth.ranges_overlapping(candidate.block):
                return Verdict.REJECT_JAMMED
    return Verdict.ACCEPT


def handle_request(
    request,
    state: NetworkState,
    mode: ControlMode,
    ground_truth: GroundTruth | None,
    params: phy.PhyParams,
    tolerance_db: float = DEFAULT_DETECTION_TOLERANCE_DB,
    now: float | None = None,
) -> Lightpath | Blocked:
    """Serve one connection request through the admission flowchart.

    Returns the established :class:`Lightpath` or a :class:`Blocked`
    record.  ``now`` is the clock used for utilization integration and
    defaults to the request arrival time.
    """
    route = state.topology.shortest_path(request.source, request.destination)
    grids = state.grids_for_route(route)
    aware = mode is ControlMode.AWARE
    saw_qot = False
    saw_jammed = False

    for modulation in reversed(phy.MODULATIONS):
        width = required_slots(request.bandwidth_gbps, modulation, params)
        while True:
            block = first_fit(grids, width, forbidden_aware=aware)
            if block is None:
                break
            candidate = _build_candidate(
                request.id,
                route,
                block,
                modulation,
                request.bandwidth_gbps,
                request.arrival_time,
                request.holding_s,
                state,
                ground_truth,
            )
            verdict = evaluate_candidate(
                candidate, state, mode, ground_truth, params, tolerance_db
            )
            if verdict is Verdict.ACCEPT:
                state.establish(candidate, request.arrival_time if now is None else now)
                return candidate
            if verdict is Verdict.REJECT_QOT:
                saw_qot = True
                break
            saw_jammed = True
            for jammed_range in ground_truth.ranges_overlapping(candidate.block):
                state.forbid_range(ground_truth.link_id, jammed_range)

    if saw_jammed:
        reason = REASON_JAMMED
    elif saw_qot:
        reason = REASON_QOT
    else:
        reason = REASON_NO_SPECTRUM
    return Blocked(
        reason=reason,
        source=request.source,
        destination=request.destination,
        bandwidth_gbps=request.bandwidth_gbps,
    )


def verify_state_invariants(
    state: NetworkState,
    mode: ControlMode,
    ground_truth: GroundTruth | None,
    rel_tol: float = 1e-9,
) -> None:
    """Audit the live engine state against the declarative model.

    Recomputes every active circuit's SNR from scratch through the
    physical-layer module and checks slot bookkeeping.  Raises
    ``AssertionError`` on any violation; used by the test suite.
    """
    params = state.params
    for hop, grid in state.grids.items():
        used = grid.used_count()
        free = grid.free_count()
        forbidden = grid.forbidden_count()
        assert used + free + forbidden == grid.slot_count, f"slot conservation broken on {hop}"

    for link_id, ranges in state.forbidden_ranges.items():
        if ground_truth is not None:
            assert link_id == ground_truth.link_id, "forbidden marks off the attacked link"
            for block in ranges:
                assert block in ground_truth.jammed_ranges, "forbidden mark outside jammed ranges"

    eps = None if ground_truth is None else ground_truth.epsilon_w
    for lightpath in state.actives.values():
        per_link_state = []
        for link, hop in zip(lightpath.route.links, lightpath.route.directed_hops):
            channels = [
                other.channel
                for other_id, other in state.grid_actives[hop].items()
                if other_id != lightpath.id
            ]
            if ground_truth is not None and link.id == ground_truth.link_id:
                channels.extend(ground_truth.channels)
            per_link_state.append(channels)
        reference = phy.snr(lightpath.channel, lightpath.route, per_link_state, eps, params)
        assert math.isclose(lightpath.snr, reference, rel_tol=rel_tol), (
            f"incremental SNR drifted for lightpath {lightpath.id}: "
            f"{lightpath.snr} vs {reference}"
        )
        threshold = lightpath.modulation.snr_threshold_db
        assert phy.linear_to_db(lightpath.snr) >= threshold - 1e-9, (
            f"active lightpath {lightpath.id} below threshold"
        )
        for hop in lightpath.route.directed_hops:
            grid = state.grids[hop]
            slots = grid.lightpath_slots(lightpath.id)
            assert len(slots) == lightpath.block.width, "allocation width mismatch"
            assert slots[0] == lightpath.block.start, "allocation start mismatch"
            if mode is ControlMode.AWARE:
                for block in state.forbidden_ranges.get(grid.link_id, ()):
                    assert not block.overlaps(lightpath.block), (
                        "aware-mode circuit occupies a detected range"
                    )

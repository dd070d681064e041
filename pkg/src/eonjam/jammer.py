"""Attacker model and the emulated physical-measurement feed.

The attacker injects a high-power signal into fixed slot ranges of one
fibre (both directions).  Each jammed range behaves like one channel
whose power is the normal per-channel launch power plus an extra
``epsilon``; with ``epsilon_db = 0`` the attack is physically inert.

:class:`GroundTruth` is what the real network would expose through a
measurement interface: the attacked link, the jammer channels, and the
extra linear power.  The simulator's control plane only sees it through
the measured-SNR comparison in the detection step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .phy import Channel, PhyParams, channel_for_block, db_to_linear
from .spectrum import SLOT_COUNT, SlotBlock

__all__ = [
    "MOST_USED",
    "LEAST_USED",
    "DEFAULT_JAMMED_RANGES",
    "JammerConfig",
    "GroundTruth",
    "resolve_target",
    "ground_truth_channels",
]

MOST_USED = "most_used"
LEAST_USED = "least_used"

DEFAULT_JAMMED_RANGES: tuple[SlotBlock, ...] = (
    SlotBlock(50, 10),
    SlotBlock(140, 10),
    SlotBlock(230, 10),
)


@dataclass(frozen=True)
class JammerConfig:
    """Which link is attacked, where in the spectrum, and how hard.

    ``target`` is ``"most_used"``, ``"least_used"`` or an explicit link
    id.  Ranges must be disjoint and inside the grid.
    """

    target: str
    jammed_ranges: tuple[SlotBlock, ...] = DEFAULT_JAMMED_RANGES
    epsilon_db: float = 0.0

    def __post_init__(self) -> None:
        if self.epsilon_db < 0.0:
            raise ValueError(f"epsilon_db must be >= 0, got {self.epsilon_db}")
        if not self.jammed_ranges:
            raise ValueError("at least one jammed range is required")
        ordered = sorted(self.jammed_ranges, key=lambda b: b.start)
        for block in ordered:
            if block.end > SLOT_COUNT:
                raise ValueError(f"jammed range {block} exceeds the {SLOT_COUNT}-slot grid")
        for left, right in zip(ordered, ordered[1:]):
            if left.end > right.start:
                raise ValueError(f"jammed ranges {left} and {right} overlap")

    @property
    def uses_selector(self) -> bool:
        return self.target in (MOST_USED, LEAST_USED)


@dataclass(frozen=True)
class GroundTruth:
    """Resolved attack state: the emulated measurement-plane view."""

    link_id: str
    channels: tuple[Channel, ...]
    epsilon_w: float
    jammed_ranges: tuple[SlotBlock, ...] = field(default=())

    def ranges_overlapping(self, block: SlotBlock) -> tuple[SlotBlock, ...]:
        return tuple(r for r in self.jammed_ranges if r.overlaps(block))


def resolve_target(config: JammerConfig, utilization_ranking) -> str:
    """Pick the attacked link id from a descending utilization ranking."""
    if config.target == MOST_USED:
        if not utilization_ranking:
            raise ValueError("most_used selector needs a non-empty ranking")
        return utilization_ranking[0][0]
    if config.target == LEAST_USED:
        if not utilization_ranking:
            raise ValueError("least_used selector needs a non-empty ranking")
        return utilization_ranking[-1][0]
    return config.target


def ground_truth_channels(
    config: JammerConfig,
    params: PhyParams,
    target_link_id: str | None = None,
) -> GroundTruth:
    """Materialise the jammer channels for a resolved target link.

    Each jammed range becomes one jammer channel centred on the range
    with bandwidth ``width * slot_width`` and power ``P + epsilon``.
    ``target_link_id`` must be given when the config uses a selector.
    """
    if target_link_id is None:
        if config.uses_selector:
            raise ValueError("selector-based jammer needs target_link_id resolved first")
        target_link_id = config.target
    epsilon_w = params.tx_power_w * (db_to_linear(config.epsilon_db) - 1.0)
    channels = tuple(
        channel_for_block(
            block,
            params,
            power_w=params.tx_power_w + epsilon_w,
            is_jammer=True,
        )
        for block in config.jammed_ranges
    )
    return GroundTruth(
        link_id=target_link_id,
        channels=channels,
        epsilon_w=epsilon_w,
        jammed_ranges=tuple(config.jammed_ranges),
    )

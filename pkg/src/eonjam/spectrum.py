"""Per-link slot-grid bookkeeping: occupancy, First Fit, guardbands.

Each directed link owns a :class:`SlotGrid` of 320 slots.  A slot is
free, used by exactly one lightpath, or forbidden (reserved by the
jamming-aware control plane).  First Fit scans for the lowest start
index where a block fits on every grid of a route with a 2-slot
guardband separating it from used spectrum; when asked to respect
forbidden marks it treats them exactly like used slots, guardband
included.

Grids also integrate per-slot busy time so that utilization statistics
come from exact event-time integration instead of sampling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SLOT_COUNT",
    "GUARDBAND_SLOTS",
    "FREE",
    "FORBIDDEN",
    "SpectrumError",
    "AllocationCollisionError",
    "UnknownLightpathError",
    "SlotBlock",
    "SlotGrid",
    "first_fit",
    "allocate",
    "release",
    "utilization",
]

SLOT_COUNT = 320
GUARDBAND_SLOTS = 2

FREE = 0
FORBIDDEN = -1


class SpectrumError(ValueError):
    pass


class AllocationCollisionError(SpectrumError):
    """Allocation hit a used or forbidden slot: an RSA bookkeeping bug."""


class UnknownLightpathError(SpectrumError):
    """Release was asked for a lightpath that holds no slots here."""


@dataclass(frozen=True)
class SlotBlock:
    """A contiguous run of ``width`` slots starting at ``start``."""

    start: int
    width: int

    def __post_init__(self) -> None:
        if self.start < 0:
            raise SpectrumError(f"block start must be >= 0, got {self.start}")
        if self.width < 1:
            raise SpectrumError(f"block width must be >= 1, got {self.width}")

    @property
    def end(self) -> int:
        """One past the last slot."""
        return self.start + self.width

    def slots(self) -> range:
        return range(self.start, self.end)

    def overlaps(self, other: "SlotBlock") -> bool:
        return self.start < other.end and other.start < self.end


class SlotGrid:
    """Occupancy of one direction of one fibre link.

    ``occupancy[i]`` is 0 (free), -1 (forbidden) or a positive lightpath
    id.  Two busy-time integrals are advanced by the simulation clock
    through :meth:`advance_time`: ``used_seconds`` counts slots actually
    carrying a circuit, while ``reserved_seconds`` additionally counts
    each circuit's guardband shadow, the ``GUARDBAND_SLOTS`` slots above
    its block.  A shadow slot cannot be allocated while the circuit
    lives, so it is reserved spectrum rather than available capacity;
    attributing the shared inter-circuit gap to the lower circuit keeps
    the count one-sided.
    """

    __slots__ = (
        "link_id",
        "direction",
        "slot_count",
        "occupancy",
        "used_seconds",
        "reserved_seconds",
        "_clock",
        "_covered",
    )

    def __init__(self, link_id: str, direction: tuple[str, str], slot_count: int = SLOT_COUNT):
        if slot_count < 1:
            raise SpectrumError(f"slot_count must be positive, got {slot_count}")
        self.link_id = link_id
        self.direction = direction
        self.slot_count = slot_count
        self.occupancy = np.zeros(slot_count, dtype=np.int64)
        self.used_seconds = np.zeros(slot_count, dtype=np.float64)
        self.reserved_seconds = np.zeros(slot_count, dtype=np.float64)
        self._clock = 0.0
        self._covered: np.ndarray | None = None

    def invalidate_coverage(self) -> None:
        self._covered = None

    def coverage_mask(self, guard_slots: int = GUARDBAND_SLOTS) -> np.ndarray:
        """Slots that are used or inside a circuit's guardband shadow."""
        if self._covered is not None:
            return self._covered
        used = self.occupancy > 0
        covered = used.copy()
        for k in range(1, guard_slots + 1):
            covered[k:] |= used[:-k]
        self._covered = covered
        return self._covered

    def advance_time(self, now: float) -> None:
        """Integrate busy time up to ``now`` (monotone, clamped below)."""
        dt = now - self._clock
        if dt <= 0.0:
            return
        self.used_seconds[self.occupancy > 0] += dt
        self.reserved_seconds[self.coverage_mask()] += dt
        self._clock = now

    def used_count(self) -> int:
        return int(np.count_nonzero(self.occupancy > 0))

    def forbidden_count(self) -> int:
        return int(np.count_nonzero(self.occupancy == FORBIDDEN))

    def free_count(self) -> int:
        return int(np.count_nonzero(self.occupancy == FREE))

    def forbid(self, block: SlotBlock) -> None:
        """Mark a block forbidden.  Only free slots may be marked."""
        if block.end > self.slot_count:
            raise SpectrumError(f"block {block} exceeds grid of {self.slot_count} slots")
        segment = self.occupancy[block.start:block.end]
        if np.any(segment > 0):
            raise AllocationCollisionError(
                f"cannot forbid {block} on {self.link_id}{self.direction}: slots in use"
            )
        segment[:] = FORBIDDEN
        self.invalidate_coverage()

    def lightpath_slots(self, lightpath_id: int) -> np.ndarray:
        return np.flatnonzero(self.occupancy == lightpath_id)


def first_fit(
    grids,
    width: int,
    forbidden_aware: bool = False,
    guard_slots: int = GUARDBAND_SLOTS,
) -> SlotBlock | None:
    """Lowest-index block of ``width`` slots feasible on every grid.

    A candidate ``[s, s+width)`` is feasible when none of its slots is
    used (or forbidden, when ``forbidden_aware``) on any grid, and the
    ``guard_slots`` slots on either side contain no used slot.  With
    ``forbidden_aware`` set, forbidden slots are treated as unavailable
    for the guardband as well.  Returns ``None`` when nothing fits.
    """
    if width < 1:
        raise SpectrumError(f"width must be >= 1, got {width}")
    if not grids:
        raise SpectrumError("first_fit needs at least one grid")
    counts = {g.slot_count for g in grids}
    if len(counts) != 1:
        raise SpectrumError(f"grids disagree on slot_count: {sorted(counts)}")
    slot_count = counts.pop()
    if width > slot_count:
        return None

    blocked = grids[0].occupancy > 0
    for grid in grids[1:]:
        blocked = blocked | (grid.occupancy > 0)
    if forbidden_aware:
        for grid in grids:
            blocked = blocked | (grid.occupancy == FORBIDDEN)

    # Prefix sums let every candidate window be tested in O(1).
    csum = np.zeros(slot_count + 1, dtype=np.int64)
    np.cumsum(blocked, out=csum[1:])
    starts = np.arange(0, slot_count - width + 1)
    lo = np.maximum(starts - guard_slots, 0)
    hi = np.minimum(starts + width + guard_slots, slot_count)
    feasible = (csum[hi] - csum[lo]) == 0
    idx = int(np.argmax(feasible))
    if not feasible[idx]:
        return None
    return SlotBlock(start=idx, width=width)


def allocate(grids, block: SlotBlock, lightpath_id: int) -> None:
    """Mark ``block`` used by ``lightpath_id`` on every grid."""
    if lightpath_id <= 0:
        raise SpectrumError(f"lightpath id must be positive, got {lightpath_id}")
    for grid in grids:
        if block.end > grid.slot_count:
            raise SpectrumError(f"block {block} exceeds grid of {grid.slot_count} slots")
        if np.any(grid.occupancy[block.start:block.end] != FREE):
            raise AllocationCollisionError(
                f"block {block} not free on {grid.link_id}{grid.direction}"
            )
    for grid in grids:
        grid.occupancy[block.start:block.end] = lightpath_id
        grid.invalidate_coverage()


def release(grids, lightpath_id: int) -> None:
    """Return every slot held by ``lightpath_id`` to free."""
    held_anywhere = False
    for grid in grids:
        held = grid.occupancy == lightpath_id
        if np.any(held):
            held_anywhere = True
            grid.occupancy[held] = FREE
            grid.invalidate_coverage()
    if not held_anywhere:
        raise UnknownLightpathError(f"lightpath {lightpath_id} holds no slots on these grids")


def utilization(grid: SlotGrid) -> float:
    """Instantaneous used fraction; forbidden slots count as not used."""
    return grid.used_count() / grid.slot_count

#!/usr/bin/env python3
"""Spectrum bookkeeping in slow motion.

Shows how First Fit packs a route's slot grids: guardbands keep blocks
two slots apart, forbidden ranges (aware mode) repel allocations and
their guardbands, and release returns spectrum exactly as it was.

Run:  python demos/first_fit_walkthrough.py
"""

from eonjam.spectrum import SlotBlock, SlotGrid, allocate, first_fit, release, utilization


def show(grid, upto=40):
    cells = []
    for value in grid.occupancy[:upto]:
        if value == 0:
            cells.append(".")
        elif value == -1:
            cells.append("x")
        else:
            cells.append(str(value % 10))
    print("".join(cells), f"  (used {grid.used_count()}, util {utilization(grid):.3f})")


grid = SlotGrid("demo", ("a", "b"), 320)
print("empty grid:")
show(grid)

print("\nallocate widths 3, 2, 4 by First Fit (2-slot guardbands):")
for lightpath_id, width in ((1, 3), (2, 2), (3, 4)):
    block = first_fit([grid], width)
    allocate([grid], block, lightpath_id)
    print(f"  lightpath {lightpath_id} width {width} -> start {block.start}")
    show(grid)

print("\nrelease lightpath 2: its hole is reusable only by narrow blocks")
release([grid], 2)
show(grid)
print("width 2 fits back into the hole:", first_fit([grid], 2))
print("width 3 skips past it         :", first_fit([grid], 3))

print("\nforbid slots 20-29 (as the jamming-aware plane would):")
grid.forbid(SlotBlock(20, 10))
show(grid)
print("aware search for width 6 keeps a guardband from the range:",
      first_fit([grid], 6, forbidden_aware=True))
print("an unaware search would dive right in                    :",
      first_fit([grid], 6, forbidden_aware=False))

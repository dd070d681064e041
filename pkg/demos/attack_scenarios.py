#!/usr/bin/env python3
"""Small-scale rendition of the jamming study.

Runs the three control planes (clean network, attack-unaware,
attack-aware) against a most-used-link attack over a coarse power
sweep, prints the blocking table, and sketches the slot-utilization
profile of the attacked link.  Scaled down (2,000 requests, 2
replications) so the whole script finishes in about a minute; bump the
numbers for smoother curves.

Run:  python demos/attack_scenarios.py
"""

import numpy as np

from eonjam import (
    ControlMode,
    JammerConfig,
    TrafficModel,
    blocking_probability,
    compute_utilization_ranking,
    nsfnet,
    run_replication,
)

BASE_SEED = 7
topology = nsfnet()
traffic = TrafficModel(requests_per_replication=2_000, replications=2)

print("ranking links by a jamming-free pre-run...")
ranking = compute_utilization_ranking(topology, traffic, BASE_SEED, workers=2)
mu_link = ranking[0][0]
lu_link = ranking[-1][0]
print(f"most used link: {mu_link}  (mean utilization {ranking[0][1]:.4f})")
print(f"least used link: {lu_link} (mean utilization {ranking[-1][1]:.4f})")
print()


def mean_blocking(mode, target, eps):
    values = []
    for r in range(traffic.replications):
        jam = None if mode is ControlMode.NO_JAMMING else JammerConfig(
            target=target, epsilon_db=eps
        )
        result = run_replication(BASE_SEED + r, topology, traffic, mode, jam)
        values.append(blocking_probability(result))
    return float(np.mean(values))


baseline = mean_blocking(ControlMode.NO_JAMMING, None, 0.0)
print(f"blocking without any attack: {baseline:.4f}")
print()
print("eps_dB   MU unaware   MU aware   LU unaware")
for eps in (0.0, 1.0, 2.25, 3.5, 5.0):
    mu_j = mean_blocking(ControlMode.UNAWARE, mu_link, eps)
    mu_ja = mean_blocking(ControlMode.AWARE, mu_link, eps)
    lu_j = mean_blocking(ControlMode.UNAWARE, lu_link, eps)
    print(f"{eps:5.2f}   {mu_j:9.4f}   {mu_ja:8.4f}   {lu_j:10.4f}")
print()

print("attacked-link slot profile, first 80 slots ('#' >40%, '+' >20%, '.' >2% busy)")
for label, mode, eps in (
    ("unaware 0 dB", ControlMode.UNAWARE, 0.0),
    ("unaware 5 dB", ControlMode.UNAWARE, 5.0),
    ("aware   5 dB", ControlMode.AWARE, 5.0),
):
    jam = JammerConfig(target=mu_link, epsilon_db=eps)
    result = run_replication(BASE_SEED, topology, traffic, mode, jam)
    profile = result.slot_utilization_by_link[mu_link][:80]
    bars = "".join("#" if v > 0.4 else "+" if v > 0.2 else "." if v > 0.02 else " "
                   for v in profile)
    print(f"{label}: |{bars}|")
print("         (slots 50-59 sit inside the first jammed range)")

"""Scenario files, validation, orchestration and CSV emission.

A scenario is a single YAML file::

    topology: nsfnet            # bundled topology, or a file path
    modes: [no_jamming, unaware, aware]
    jammer:
      target: most_used         # most_used | least_used | <link id>
      jammed_ranges: [[50, 10], [140, 10], [230, 10]]
    epsilon_sweep: {start: 0.0, stop: 5.0, step: 0.5}
    traffic:
      load_erlangs: 200
      mean_holding_s: 600
      bandwidth_choices_gbps: [40, 200, 400]
      requests_per_replication: 10000
      replications: 3
    base_seed: 1
    output_dir: results/example
    detection_tolerance_db: 0.1
    workers: 1

``eonjam simulate <config>`` writes ``blocking.csv`` (one row per mode,
epsilon and replication) and ``slots.csv`` (per-slot mean utilization),
plus ``slots_by_link.csv`` with ``--per-link-slots``.  ``eonjam
validate`` runs the static checks only; ``eonjam rank-links`` emits the
jammer-free link-utilization ranking.  Numeric CSV fields use 10
significant digits, and identical configs with the same base seed
reproduce byte-identical CSV bodies.  The no-jamming mode is constant in
epsilon, so its rows carry ``na`` in the epsilon and target columns.

Exit codes: 0 success, 1 configuration error, 2 runtime error.  The
environment variable ``EONJAM_OUTPUT_DIR`` overrides ``output_dir``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import yaml

from . import metrics, sim
from .control_plane import DEFAULT_DETECTION_TOLERANCE_DB, ControlMode
from .jammer import DEFAULT_JAMMED_RANGES, JammerConfig
from .spectrum import SLOT_COUNT, SlotBlock
from .topology import Topology, load_topology_file, nsfnet

__all__ = ["ScenarioConfig", "load_config", "validate", "run", "main"]

_NA = "na"


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario: what to simulate and where to write results."""

    topology: str
    modes: tuple[ControlMode, ...]
    jammer: JammerConfig | None
    epsilon_sweep: tuple[float, float, float] | None
    traffic: sim.TrafficModel
    base_seed: int
    output_dir: str
    detection_tolerance_db: float = DEFAULT_DETECTION_TOLERANCE_DB
    workers: int = 1

    def load_topology(self) -> Topology:
        if self.topology == "nsfnet":
            return nsfnet()
        return load_topology_file(self.topology)


def _parse_config(data: dict, config_dir: Path) -> tuple[ScenarioConfig | None, list[str]]:
    violations: list[str] = []
    if not isinstance(data, dict):
        return None, ["config: top level must be a mapping"]

    topology = data.get("topology", "nsfnet")
    if not isinstance(topology, str) or not topology:
        violations.append("topology: must be 'nsfnet' or a file path")
    elif topology != "nsfnet":
        resolved = Path(topology)
        if not resolved.is_absolute():
            resolved = config_dir / resolved
        if not resolved.is_file():
            violations.append(f"topology: file not found: {topology}")
        topology = str(resolved)

    raw_modes = data.get("modes", data.get("mode"))
    if isinstance(raw_modes, str):
        raw_modes = [raw_modes]
    modes: list[ControlMode] = []
    if not raw_modes:
        violations.append("modes: at least one mode is required")
    else:
        for entry in raw_modes:
            try:
                modes.append(ControlMode(entry))
            except ValueError:
                violations.append(f"modes: unknown mode {entry!r}")

    jammer_data = data.get("jammer")
    jammer = None
    if jammer_data is not None:
        target = jammer_data.get("target")
        if not isinstance(target, str) or not target:
            violations.append("jammer.target: required (most_used, least_used or a link id)")
        ranges_raw = jammer_data.get("jammed_ranges")
        ranges: list[SlotBlock] = []
        if ranges_raw is None:
            ranges = list(DEFAULT_JAMMED_RANGES)
        else:
            for index, pair in enumerate(ranges_raw):
                try:
                    block = SlotBlock(int(pair[0]), int(pair[1]))
                except (TypeError, ValueError, IndexError):
                    violations.append(f"jammer.jammed_ranges[{index}]: expected [start, width]")
                    continue
                if block.end > SLOT_COUNT:
                    violations.append(f"jammer.jammed_ranges[{index}]: range exceeds grid")
                    continue
                ranges.append(block)
        if target and ranges and not violations:
            try:
                jammer = JammerConfig(target=target, jammed_ranges=tuple(ranges))
            except ValueError as exc:
                violations.append(f"jammer: {exc}")

    sweep_raw = data.get("epsilon_sweep")
    sweep = None
    if sweep_raw is not None:
        try:
            sweep = (
                float(sweep_raw["start"]),
                float(sweep_raw["stop"]),
                float(sweep_raw["step"]),
            )
        except (KeyError, TypeError, ValueError):
            violations.append("epsilon_sweep: expected {start, stop, step}")
        else:
            if sweep[2] <= 0:
                violations.append("sweep.step: must be positive")
            if sweep[1] < sweep[0]:
                violations.append("sweep.stop: must be >= sweep.start")

    traffic_raw = data.get("traffic", {})
    try:
        traffic = sim.TrafficModel(
            load_erlangs=float(traffic_raw.get("load_erlangs", 200.0)),
            mean_holding_s=float(traffic_raw.get("mean_holding_s", 600.0)),
            bandwidth_choices_gbps=tuple(
                float(b) for b in traffic_raw.get("bandwidth_choices_gbps", (40, 200, 400))
            ),
            requests_per_replication=int(traffic_raw.get("requests_per_replication", 100_000)),
            replications=int(traffic_raw.get("replications", 10)),
        )
    except (TypeError, ValueError) as exc:
        violations.append(f"traffic: {exc}")
        traffic = sim.TrafficModel()

    jamming_modes = [m for m in modes if m is not ControlMode.NO_JAMMING]
    if jamming_modes and jammer is None and not violations:
        violations.append("jammer: required by modes other than no_jamming")
    if modes and not jamming_modes and jammer_data is not None:
        violations.append("jammer: must be absent when the only mode is no_jamming")
    if jamming_modes and sweep is None:
        violations.append("epsilon_sweep: required by modes other than no_jamming")

    try:
        base_seed = int(data.get("base_seed", 1))
    except (TypeError, ValueError):
        violations.append("base_seed: must be an integer")
        base_seed = 1
    output_dir = data.get("output_dir", "results")
    if not isinstance(output_dir, str) or not output_dir:
        violations.append("output_dir: must be a non-empty string")
        output_dir = "results"
    try:
        tolerance = float(data.get("detection_tolerance_db", DEFAULT_DETECTION_TOLERANCE_DB))
        if tolerance < 0:
            violations.append("detection_tolerance_db: must be >= 0")
    except (TypeError, ValueError):
        violations.append("detection_tolerance_db: must be a number")
        tolerance = DEFAULT_DETECTION_TOLERANCE_DB
    try:
        workers = int(data.get("workers", 1))
        if workers < 1:
            violations.append("workers: must be >= 1")
    except (TypeError, ValueError):
        violations.append("workers: must be an integer")
        workers = 1

    if violations:
        return None, violations
    return (
        ScenarioConfig(
            topology=topology,
            modes=tuple(modes),
            jammer=jammer,
            epsilon_sweep=sweep,
            traffic=traffic,
            base_seed=base_seed,
            output_dir=output_dir,
            detection_tolerance_db=tolerance,
            workers=workers,
        ),
        [],
    )


def load_config(path) -> tuple[ScenarioConfig | None, list[str]]:
    """Load and statically check a scenario file."""
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        return None, [f"config: file not found: {path}"]
    except yaml.YAMLError as exc:
        return None, [f"config: invalid YAML: {exc}"]
    return _parse_config(data, path.parent)


def validate(path) -> list[str]:
    """Static checks only; returns the (possibly empty) violation list."""
    _, violations = load_config(path)
    return violations


def _fmt(value: float) -> str:
    return f"{value:.10g}"


def _output_dir(config: ScenarioConfig) -> Path:
    override = os.environ.get("EONJAM_OUTPUT_DIR")
    return Path(override) if override else Path(config.output_dir)


def _ranking_cache_key(config: ScenarioConfig) -> str:
    traffic = config.traffic
    payload = json.dumps(
        {
            "topology": config.topology,
            "load": traffic.load_erlangs,
            "holding": traffic.mean_holding_s,
            "bandwidths": traffic.bandwidth_choices_gbps,
            "requests": traffic.requests_per_replication,
            "replications": traffic.replications,
            "base_seed": config.base_seed,
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()


def _load_or_compute_ranking(config: ScenarioConfig, outdir: Path):
    cache = outdir / "link_ranking.csv"
    meta = outdir / "link_ranking.meta.json"
    key = _ranking_cache_key(config)
    if cache.is_file() and meta.is_file():
        try:
            if json.loads(meta.read_text())["key"] == key:
                ranking = []
                for line in cache.read_text().splitlines()[1:]:
                    rank, link_id, value = line.split(",")
                    ranking.append((link_id, float(value)))
                return ranking
        except (KeyError, ValueError, json.JSONDecodeError):
            pass
    ranking = sim.compute_utilization_ranking(
        config.load_topology(), config.traffic, config.base_seed, workers=config.workers
    )
    lines = ["rank,link_id,mean_utilization"]
    lines += [f"{i + 1},{link_id},{_fmt(value)}" for i, (link_id, value) in enumerate(ranking)]
    cache.write_text("\n".join(lines) + "\n")
    meta.write_text(json.dumps({"key": key}) + "\n")
    return ranking


def _sorted_points(result: sim.ScenarioResult):
    order = {mode: i for i, mode in enumerate(ControlMode)}
    return sorted(
        result.points,
        key=lambda p: (order[p.mode], -1.0 if p.epsilon_db is None else p.epsilon_db),
    )


def _write_outputs(config: ScenarioConfig, result: sim.ScenarioResult, outdir: Path, per_link: bool):
    blocking_lines = [
        "mode,target,epsilon_db,replication,blocking_probability,"
        "blocked_no_spectrum,blocked_qot,blocked_jammed"
    ]
    slot_lines = ["mode,target,epsilon_db,slot_index,mean_utilization"]
    per_link_lines = ["mode,target,epsilon_db,link_id,slot_index,mean_utilization"]

    for point in _sorted_points(result):
        eps = _NA if point.epsilon_db is None else _fmt(point.epsilon_db)
        target = point.target_link_id if point.target_link_id else _NA
        for rep_index, rep in enumerate(point.results):
            blocking_lines.append(
                ",".join(
                    (
                        point.mode.value,
                        target,
                        eps,
                        str(rep_index),
                        _fmt(metrics.blocking_probability(rep)),
                        str(rep.blocked_by_reason.get("no-spectrum", 0)),
                        str(rep.blocked_by_reason.get("qot-fail", 0)),
                        str(rep.blocked_by_reason.get("jammed-no-alternative", 0)),
                    )
                )
            )
        histogram = point.mean_slot_utilization
        for index, value in enumerate(histogram):
            slot_lines.append(
                ",".join((point.mode.value, target, eps, str(index), _fmt(float(value))))
            )
        if per_link:
            by_link: dict[str, list] = {}
            for rep in point.results:
                for link_id, vec in rep.slot_utilization_by_link.items():
                    by_link.setdefault(link_id, []).append(vec)
            for link_id in sorted(by_link):
                mean_vec = sum(by_link[link_id]) / len(by_link[link_id])
                for index, value in enumerate(mean_vec):
                    per_link_lines.append(
                        ",".join(
                            (point.mode.value, target, eps, link_id, str(index), _fmt(float(value)))
                        )
                    )

    (outdir / "blocking.csv").write_text("\n".join(blocking_lines) + "\n")
    (outdir / "slots.csv").write_text("\n".join(slot_lines) + "\n")
    if per_link:
        (outdir / "slots_by_link.csv").write_text("\n".join(per_link_lines) + "\n")


def _print_summary(result: sim.ScenarioResult) -> None:
    if result.ranking:
        most = result.ranking[0]
        least = result.ranking[-1]
        print(f"link ranking: most used {most[0]} ({most[1]:.4f}), least used {least[0]} ({least[1]:.4f})")
    for point in _sorted_points(result):
        eps = _NA if point.epsilon_db is None else f"{point.epsilon_db:g} dB"
        target = point.target_link_id or _NA
        reasons = {"no-spectrum": 0, "qot-fail": 0, "jammed-no-alternative": 0}
        for rep in point.results:
            for reason, count in rep.blocked_by_reason.items():
                reasons[reason] = reasons.get(reason, 0) + count
        print(
            f"{point.mode.value:10s} target={target:5s} eps={eps:8s} "
            f"blocking={point.mean_blocking:.6f} "
            f"(no-spectrum={reasons['no-spectrum']} qot={reasons['qot-fail']} "
            f"jammed={reasons['jammed-no-alternative']})"
        )


def run(config_path, per_link_slots: bool = False) -> int:
    """Execute a scenario file and write its CSV artifacts."""
    config, violations = load_config(config_path)
    if violations:
        for violation in violations:
            print(f"config error: {violation}", file=sys.stderr)
        return 1
    try:
        outdir = _output_dir(config)
        outdir.mkdir(parents=True, exist_ok=True)
        ranking = None
        if config.jammer is not None and config.jammer.uses_selector:
            ranking = _load_or_compute_ranking(config, outdir)
        result = sim.run_scenario(config, ranking=ranking)
        _write_outputs(config, result, outdir, per_link_slots)
        _print_summary(result)
        print(f"wrote {outdir / 'blocking.csv'} and {outdir / 'slots.csv'}")
    except (OSError, ValueError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    return 0


def _cmd_rank_links(config_path) -> int:
    config, violations = load_config(config_path)
    if violations:
        for violation in violations:
            print(f"config error: {violation}", file=sys.stderr)
        return 1
    try:
        outdir = _output_dir(config)
        outdir.mkdir(parents=True, exist_ok=True)
        ranking = _load_or_compute_ranking(config, outdir)
        for index, (link_id, value) in enumerate(ranking, start=1):
            print(f"{index:2d}. {link_id}  {value:.6f}")
        print(f"wrote {outdir / 'link_ranking.csv'}")
    except (OSError, ValueError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="eonjam",
        description="Elastic optical network simulator with jamming-aware control planes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a scenario and write CSV results")
    p_sim.add_argument("config", help="scenario YAML file")
    p_sim.add_argument(
        "--per-link-slots",
        action="store_true",
        help="also write slots_by_link.csv with the per-link breakdown",
    )

    p_val = sub.add_parser("validate", help="check a scenario file without running it")
    p_val.add_argument("config", help="scenario YAML file")

    p_rank = sub.add_parser("rank-links", help="write the jammer-free link utilization ranking")
    p_rank.add_argument("config", help="scenario YAML file")

    args = parser.parse_args(argv)
    if args.command == "simulate":
        return run(args.config, per_link_slots=args.per_link_slots)
    if args.command == "validate":
        violations = validate(args.config)
        if violations:
            for violation in violations:
                print(f"config error: {violation}", file=sys.stderr)
            return 1
        print("ok")
        return 0
    return _cmd_rank_links(args.config)


if __name__ == "__main__":
    sys.exit(main())

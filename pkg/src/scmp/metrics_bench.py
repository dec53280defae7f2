"""Evaluation metrics and benchmark scenario generation.

The two formation-quality metrics average over the formation window
[S, M]: S is the first tick by which every member has left its start pose,
M the last tick before the first arrival (full horizon when degenerate).
Angle deviation is the mean absolute yaw offset from the group's mean
heading; coordinate deviation anchors the shape template at each member in
turn and averages every member's planar distance to its ideal spot.
"""

import math
import random
import time
from dataclasses import dataclass

from . import kernels
from .config import PlannerConfig
from .conflict_tree import (
    GroupDef,
    PlanLimits,
    Scenario,
    ScenarioError,
    Stage,
    plan_stage,
    validate_scenario,
)
from .model import AgentSpec, AgentState
from .search_coop import RelativeStates, ideal_states_cal
from .world import CircleObstacle, World


@dataclass
class RunMetrics:
    """Per-run indicator set; angle/coordinate deviation are None for
    scenarios without groups, runtime is None when timing is suppressed."""

    success: bool
    runtime_s: float = None
    avg_flowtime_s: float = None
    low_level_nodes: int = 0
    high_level_nodes: int = 0
    ad_rad: float = None
    cd_m: float = None


def formation_window(trajectories, eps=1e-9):
    """(S, M) window of the formation phase; falls back to the full horizon
    when no member moves or someone arrives before everyone has started."""
    horizon = max(t.horizon for t in trajectories)
    start_ticks = []
    for traj in trajectories:
        s0 = traj.states[0]
        left = None
        for st in traj.states:
            if abs(st.x - s0.x) > eps or abs(st.y - s0.y) > eps or abs(st.yaw - s0.yaw) > eps:
                left = st.t
                break
        start_ticks.append(left if left is not None else 0)
    s = max(start_ticks)
    m = min(t.arrival_tick for t in trajectories) - 1
    if s > m:
        return 0, horizon
    return s, m


def angle_deviation(trajectories, window):
    """Mean absolute yaw offset (wrapped into [0, pi]) from the per-tick mean
    heading, averaged over the window."""
    s, m = window
    if m < s:
        raise ValueError("empty formation window")
    n = len(trajectories)
    total = 0.0
    for tick in range(s, m + 1):
        yaws = [t.state_at(tick).yaw for t in trajectories]
        mean_yaw = math.atan2(
            sum(math.sin(y) for y in yaws) / n,
            sum(math.cos(y) for y in yaws) / n,
        )
        dev = sum(abs(kernels.normalize_angle(y - mean_yaw)) for y in yaws) / n
        total += dev
    return total / (m - s + 1)


def coordinate_deviation(trajectories, offsets, window):
    """Mean planar deviation from the shape template, each member serving as
    the anchor in turn, averaged over members and the window."""
    s, m = window
    if m < s:
        raise ValueError("empty formation window")
    offsets = offsets.offsets if isinstance(offsets, RelativeStates) else tuple(offsets)
    n = len(trajectories)
    total = 0.0
    for tick in range(s, m + 1):
        poses = [t.state_at(tick) for t in trajectories]
        tick_sum = 0.0
        for i in range(n):
            ideal = ideal_states_cal(poses[i].pose, i, offsets)
            tick_sum += (
                sum(math.hypot(poses[j].x - ideal[j][0], poses[j].y - ideal[j][1]) for j in range(n)) / n
            )
        total += tick_sum / n
    return total / (m - s + 1)


def avg_flowtime(solution, sample_time):
    """Mean per-agent arrival time in seconds."""
    trajs = list(solution.values()) if isinstance(solution, dict) else list(solution)
    return sum(t.arrival_tick * sample_time for t in trajs) / len(trajs)


def group_deviations(result, stage):
    """Mean AD/CD over a stage's groups for a successful result; (None, None)
    when the stage has no groups."""
    if not stage.groups:
        return None, None
    ads = []
    cds = []
    for g in stage.groups:
        trajs = [result.solution[m] for m in g.member_ids]
        window = formation_window(trajs)
        ads.append(angle_deviation(trajs, window))
        cds.append(coordinate_deviation(trajs, g.shape, window))
    return sum(ads) / len(ads), sum(cds) / len(cds)


# ---------------------------------------------------------------------------
# Benchmark generation: obstacles in the core map, start rows in the bottom
# band, goal rows in the top band, 10 m between lane slots; goal anchors are
# shuffled so routes cross.
# ---------------------------------------------------------------------------


def generate_benchmark(
    width,
    height,
    obstacle_count,
    obstacle_radius,
    group_sizes=(4,),
    n_outliers=2,
    seed=0,
    spec=None,
    lane_spacing=10.0,
    margin=5.0,
):
    """Deterministic scenario from layout parameters and a seed."""
    rng = random.Random(seed)
    spec = spec or AgentSpec()
    slots_per_row = int((width - 2.0 * margin) // lane_spacing) + 1
    if slots_per_row < 1:
        raise ScenarioError("map too narrow for a single lane slot")
    units = [("group", int(s)) for s in group_sizes] + [("outlier", 1)] * int(n_outliers)
    if not units:
        raise ScenarioError("benchmark needs at least one agent")
    for _, size in units:
        if size > slots_per_row:
            raise ScenarioError(f"a {size}-agent group does not fit {slots_per_row} lane slots")

    def allocate(order):
        place = {}
        row = 0
        col = 0
        for ui in order:
            size = units[ui][1]
            if col + size > slots_per_row:
                row += 1
                col = 0
            place[ui] = (row, col)
            col += size
        return place, row

    start_place, start_rows = allocate(range(len(units)))
    # groups travel straight ahead (goal anchor above the start anchor, as in
    # the template-arranged layout); outlier goal slots are shuffled among
    # themselves so individual routes cross
    goal_place = dict(start_place)
    outlier_units = [ui for ui, (kind, _) in enumerate(units) if kind == "outlier"]
    shuffled = list(outlier_units)
    rng.shuffle(shuffled)
    for ui, src in zip(outlier_units, shuffled):
        goal_place[ui] = start_place[src]
    goal_rows = start_rows
    band = margin + (max(start_rows, goal_rows) + 1) * lane_spacing

    yaw = math.pi / 2.0
    groups = []
    outliers = []
    starts = {}
    goals = {}
    next_id = 0
    for ui, (kind, size) in enumerate(units):
        srow, scol = start_place[ui]
        grow, gcol = goal_place[ui]
        sx = margin + scol * lane_spacing
        sy = -(margin + srow * lane_spacing)
        gx = margin + gcol * lane_spacing
        gy = height + margin + grow * lane_spacing
        ids = tuple(range(next_id, next_id + size))
        next_id += size
        for m, aid in enumerate(ids):
            starts[aid] = AgentState(sx + m * lane_spacing, sy, yaw)
            goals[aid] = AgentState(gx + m * lane_spacing, gy, yaw)
        if kind == "group":
            shape = RelativeStates(tuple((m * lane_spacing, 0.0) for m in range(size)))
            groups.append(GroupDef(shape, ids))
        else:
            outliers.append(ids[0])

    obstacles = [
        CircleObstacle(
            rng.uniform(obstacle_radius, width - obstacle_radius),
            rng.uniform(obstacle_radius, height - obstacle_radius),
            obstacle_radius,
        )
        for _ in range(obstacle_count)
    ]
    world = World(width, height, obstacles, band_expansion=band)
    scenario = Scenario(world, spec, [Stage(groups, outliers, starts, goals)])
    return validate_scenario(scenario)


def run_one(scenario, limits, cfg, algo="cp"):
    """Plan one scenario and derive its RunMetrics.

    algo "cp" runs the full conflict tree; "csha" runs the unconstrained
    root only (success iff it is already conflict-free).
    """
    if algo == "csha":
        limits = PlanLimits(time_limit_s=limits.time_limit_s, high_level_budget=0)
    elif algo != "cp":
        raise ValueError(f"unknown algo: {algo}")
    stage = scenario.stages[0]
    result = plan_stage(scenario, stage, cfg, limits)
    if not result.success:
        return result, RunMetrics(
            False,
            runtime_s=result.wall_time_s,
            low_level_nodes=result.low_level_nodes,
            high_level_nodes=result.high_level_nodes,
        )
    ad, cd = group_deviations(result, stage)
    return result, RunMetrics(
        True,
        runtime_s=result.wall_time_s,
        avg_flowtime_s=avg_flowtime(result.solution, scenario.spec.sample_time),
        low_level_nodes=result.low_level_nodes,
        high_level_nodes=result.high_level_nodes,
        ad_rad=ad,
        cd_m=cd,
    )


def _mean(values):
    values = [v for v in values if v is not None]
    return sum(values) / len(values) if values else None


def run_suite(scenarios, limits=None, cfg=None, algo="cp", with_timing=False, labels=None):
    """Run a list of scenarios and aggregate the indicator set.

    Returns a report dict with one record per scenario plus aggregate rows;
    wall-clock fields are included only when with_timing is set, keeping the
    default report byte-reproducible.
    """
    limits = limits or PlanLimits()
    cfg = cfg or PlannerConfig()
    records = []
    timings = []
    for idx, scenario in enumerate(scenarios):
        t0 = time.monotonic()
        _, metrics = run_one(scenario, limits, cfg, algo)
        wall = time.monotonic() - t0
        timings.append(wall)
        rec = {
            "label": labels[idx] if labels else str(idx),
            "success": metrics.success,
            "avg_flowtime_s": metrics.avg_flowtime_s,
            "low_level_nodes": metrics.low_level_nodes,
            "high_level_nodes": metrics.high_level_nodes,
            "ad_rad": metrics.ad_rad,
            "cd_m": metrics.cd_m,
        }
        if with_timing:
            rec["runtime_s"] = wall
        records.append(rec)
    succ = [r for r in records if r["success"]]
    aggregate = {
        "scenario_count": len(records),
        "success_rate": len(succ) / len(records) if records else 0.0,
        "mean_flowtime_s": _mean([r["avg_flowtime_s"] for r in succ]),
        "mean_low_level_nodes": _mean([r["low_level_nodes"] for r in succ]),
        "mean_high_level_nodes": _mean([r["high_level_nodes"] for r in succ]),
        "mean_ad_rad": _mean([r["ad_rad"] for r in succ]),
        "mean_cd_m": _mean([r["cd_m"] for r in succ]),
    }
    if with_timing:
        aggregate["mean_runtime_s"] = _mean(
            [w for w, r in zip(timings, records) if r["success"]]
        )
    return {
        "algo": algo,
        "time_limit_s": limits.time_limit_s,
        "records": records,
        "aggregate": aggregate,
    }


def format_report(report):
    """Human-readable table for a suite report."""
    lines = []
    agg = report["aggregate"]
    lines.append(f"algo={report['algo']}  scenarios={agg['scenario_count']}  time_limit={report['time_limit_s']}s")
    header = f"{'label':>10} {'ok':>3} {'flowtime':>9} {'ll_nodes':>9} {'hl':>4} {'AD_deg':>7} {'CD_m':>6}"
    lines.append(header)
    for r in report["records"]:
        ad = f"{math.degrees(r['ad_rad']):7.2f}" if r["ad_rad"] is not None else "      -"
        cd = f"{r['cd_m']:6.2f}" if r["cd_m"] is not None else "     -"
        ft = f"{r['avg_flowtime_s']:9.2f}" if r["avg_flowtime_s"] is not None else "        -"
        lines.append(
            f"{r['label']:>10} {'y' if r['success'] else 'n':>3} {ft} {r['low_level_nodes']:9d} "
            f"{r['high_level_nodes']:4d} {ad} {cd}"
        )
    sr = agg["success_rate"] * 100.0
    mean_ad = f"{math.degrees(agg['mean_ad_rad']):.2f} deg" if agg["mean_ad_rad"] is not None else "-"
    mean_cd = f"{agg['mean_cd_m']:.2f} m" if agg["mean_cd_m"] is not None else "-"
    mean_ft = f"{agg['mean_flowtime_s']:.2f} s" if agg["mean_flowtime_s"] is not None else "-"
    lines.append(
        f"success {sr:.1f}%  mean flowtime {mean_ft}  mean AD {mean_ad}  mean CD {mean_cd}"
    )
    if "mean_runtime_s" in agg and agg["mean_runtime_s"] is not None:
        lines.append(f"mean runtime over successes {agg['mean_runtime_s']:.2f} s")
    return "\n".join(lines)

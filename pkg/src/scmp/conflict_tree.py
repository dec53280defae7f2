"""High-level planning: best-first search over a binary conflict tree.

The root plans every agent unconstrained (outliers individually, groups
jointly).  Each iteration pops the cheapest node, scans its solution for the
earliest body conflict, and on a conflict spawns two children, each
constraining one conflicting agent against the other's pose at that moment
and replanning it (the whole group when the agent belongs to one).  A
conflict-free node is the answer.  Multi-stage scenarios chain plans, each
stage starting from the previous stage's exact final poses.
"""

import heapq
import math
import time
from dataclasses import dataclass, field

from . import kernels
from .config import PlannerConfig
from .model import AgentSpec, AgentState
from .search_coop import RelativeStates, plan_group
from .search_single import AvoidConstraint, SearchStats, plan_single
from .world import BodyGeometry, World, bodies_overlap, state_collides


class ScenarioError(ValueError):
    """Scenario file or construction violates a precondition."""


@dataclass(frozen=True)
class GroupDef:
    """One formation group in a stage: a template plus its member agent ids
    (template index -> agent id)."""

    shape: RelativeStates
    member_ids: tuple

    def __post_init__(self):
        if len(self.member_ids) != len(self.shape):
            raise ScenarioError("group member count does not match its template")


@dataclass
class Stage:
    groups: list
    outliers: list  # agent ids
    starts: dict  # agent id -> AgentState
    goals: dict  # agent id -> AgentState

    def agent_ids(self):
        ids = list(self.outliers)
        for g in self.groups:
            ids.extend(g.member_ids)
        return sorted(ids)

    def group_of(self, agent_id):
        for g in self.groups:
            if agent_id in g.member_ids:
                return g
        return None


@dataclass
class Scenario:
    world: World
    spec: AgentSpec
    stages: list

    def agent_ids(self):
        return self.stages[0].agent_ids()


def validate_scenario(scenario, cfg=None):
    """Check the static preconditions; raises ScenarioError naming the issue."""
    cfg = cfg or PlannerConfig()
    if not scenario.stages:
        raise ScenarioError("scenario has no stages")
    if not scenario.world.contains_obstacles():
        raise ScenarioError("an obstacle lies outside the core map")
    ids0 = scenario.stages[0].agent_ids()
    if len(ids0) != len(set(ids0)):
        raise ScenarioError("duplicate agent id in stage 0")
    for si, stage in enumerate(scenario.stages):
        ids = stage.agent_ids()
        if len(ids) != len(set(ids)):
            raise ScenarioError(f"duplicate agent id in stage {si}")
        if ids != ids0:
            raise ScenarioError(f"stage {si} does not cover the same agent ids as stage 0")
        for aid in ids:
            if aid not in stage.starts:
                raise ScenarioError(f"stage {si}: agent {aid} has no start")
            if aid not in stage.goals:
                raise ScenarioError(f"stage {si}: agent {aid} has no goal")
            for tag, st in (("start", stage.starts[aid]), ("goal", stage.goals[aid])):
                if state_collides(st, scenario.spec, scenario.world, cfg.inflation):
                    raise ScenarioError(f"stage {si}: agent {aid} {tag} pose is not in free space")
        for a in range(len(ids)):
            for b in range(a + 1, len(ids)):
                i, j = ids[a], ids[b]
                if bodies_overlap(stage.starts[i], scenario.spec, stage.starts[j], scenario.spec):
                    raise ScenarioError(f"stage {si}: start footprints of agents {i} and {j} overlap")
                if bodies_overlap(stage.goals[i], scenario.spec, stage.goals[j], scenario.spec):
                    raise ScenarioError(f"stage {si}: goal footprints of agents {i} and {j} overlap")
        if si > 0:
            prev = scenario.stages[si - 1]
            for aid in ids:
                p = prev.goals[aid]
                s = stage.starts[aid]
                if math.hypot(p.x - s.x, p.y - s.y) > 1e-6 or abs(kernels.normalize_angle(p.yaw - s.yaw)) > 1e-6:
                    raise ScenarioError(
                        f"stage {si}: agent {aid} start does not chain from the previous stage's goal"
                    )
    return scenario


@dataclass(frozen=True)
class BodyConflict:
    """Earliest pairwise body overlap: agents, the tick it falls in, and the
    two overlapping poses (possibly between-tick samples)."""

    agent_i: int
    agent_j: int
    t: int
    states: tuple  # (AgentState of i, AgentState of j)


@dataclass
class CtNode:
    constraints: dict  # agent id -> frozenset[AvoidConstraint]
    solution: dict  # agent id -> Trajectory
    cost: float


@dataclass(frozen=True)
class PlanLimits:
    time_limit_s: float = 90.0
    high_level_budget: int = 100_000


@dataclass
class PlanResult:
    success: bool
    solution: dict = field(default_factory=dict)
    cost: float = math.inf
    high_level_nodes: int = 0
    low_level_nodes: int = 0
    wall_time_s: float = 0.0
    reason: str = ""


def cost_sum(solution, sample_time):
    """Total cost of a solution: sum of per-agent arrival times in seconds
    (padding beyond arrival adds nothing)."""
    return sum(traj.arrival_tick * sample_time for traj in solution.values())


def _interp_pose(state, control, lam, dt):
    return (
        state.x + lam * dt * control.v * math.cos(state.yaw),
        state.y + lam * dt * control.v * math.sin(state.yaw),
        kernels.normalize_angle(state.yaw + lam * dt * control.omega),
    )


def find_first_body_conflict(solution, spec, cfg=None, samples_per_tick=5):
    """Earliest body overlap between any two trajectories.

    Scans ticks in increasing order, sampling each tick interval at
    samples_per_tick points along the discrete motion (interval T_s/5 by
    default); within a tick, agent pairs are scanned in (i, j) order.
    """
    cfg = cfg or PlannerConfig()
    ids = sorted(solution.keys())
    if len(ids) < 2:
        return None
    geom = BodyGeometry.of(spec, cfg.inflation)
    horizon = max(solution[i].horizon for i in ids)
    dt = spec.sample_time
    reach = 2.0 * (geom.circ_r + spec.v_forward_max * dt)
    reach2 = reach * reach
    lams = [k / samples_per_tick for k in range(samples_per_tick)]
    for tick in range(horizon + 1):
        cur = {}
        for i in ids:
            traj = solution[i]
            cur[i] = (traj.state_at(tick), traj.control_at(tick))
        last = tick == horizon
        for a in range(len(ids)):
            for b in range(a + 1, len(ids)):
                i, j = ids[a], ids[b]
                si, ui = cur[i]
                sj, uj = cur[j]
                dx = si.x - sj.x
                dy = si.y - sj.y
                if dx * dx + dy * dy > reach2:
                    continue
                for lam in [0.0] if last else lams:
                    pi = _interp_pose(si, ui, lam, dt)
                    pj = _interp_pose(sj, uj, lam, dt)
                    if kernels.poses_overlap(
                        pi[0], pi[1], pi[2], geom.front, geom.rear, geom.half_w,
                        pj[0], pj[1], pj[2], geom.front, geom.rear, geom.half_w,
                    ):
                        return BodyConflict(
                            i,
                            j,
                            tick,
                            (
                                AgentState(pi[0], pi[1], pi[2], tick),
                                AgentState(pj[0], pj[1], pj[2], tick),
                            ),
                        )
    return None


def _member_constraints(constraints, group):
    """Per-member constraint tuples for a group replan: the union of all
    members' sets, minus each member's self-referencing entries."""
    union = set()
    for mid in group.member_ids:
        union |= constraints.get(mid, frozenset())
    return [
        tuple(sorted((c for c in union if c.other_agent != mid), key=_constraint_order))
        for mid in group.member_ids
    ]


def _constraint_order(c):
    return (c.state.t, c.other_agent, c.state.x, c.state.y, c.state.yaw)


def branch(node, conflict, stage, scenario, cfg, *, stats, deadline=None, starts=None):
    """The two children of a conflict: each constrains one conflicting agent
    against the other's conflicting pose and replans it (or its whole
    group).  Children whose replan fails are dropped."""
    starts = starts if starts is not None else stage.starts
    children = []
    sides = (
        (conflict.agent_i, conflict.agent_j, conflict.states[1]),
        (conflict.agent_j, conflict.agent_i, conflict.states[0]),
    )
    for agent, other, other_state in sides:
        new_c = AvoidConstraint(other, other_state)
        agent_set = node.constraints.get(agent, frozenset())
        if new_c in agent_set:
            continue  # would re-create an identical node
        constraints = dict(node.constraints)
        constraints[agent] = agent_set | {new_c}
        solution = dict(node.solution)
        group = stage.group_of(agent)
        if group is not None:
            member_constraints = _member_constraints(constraints, group)
            trajs = plan_group(
                [starts[m] for m in group.member_ids],
                [stage.goals[m] for m in group.member_ids],
                scenario.spec,
                scenario.world,
                member_constraints,
                group.shape,
                cfg,
                stats=stats,
                deadline=deadline,
            )
            if trajs is None:
                continue
            for mid, traj in zip(group.member_ids, trajs):
                solution[mid] = traj
        else:
            traj = plan_single(
                starts[agent],
                stage.goals[agent],
                scenario.spec,
                scenario.world,
                tuple(sorted(constraints[agent], key=_constraint_order)),
                cfg,
                stats=stats,
                deadline=deadline,
            )
            if traj is None:
                continue
            solution[agent] = traj
        children.append(CtNode(constraints, solution, cost_sum(solution, scenario.spec.sample_time)))
    return children


def _pad_solution(solution):
    horizon = max(t.horizon for t in solution.values())
    return {aid: traj.padded_to(horizon) for aid, traj in solution.items()}


def plan_stage(scenario, stage, cfg, limits, *, stats=None, deadline=None, starts=None):
    """One conflict-tree search over a single stage; returns a PlanResult."""
    t0 = time.monotonic()
    stats = stats if stats is not None else SearchStats()
    cfg = cfg or PlannerConfig()
    deadline = deadline if deadline is not None else t0 + limits.time_limit_s
    starts = starts if starts is not None else stage.starts
    hl_nodes = 0
    ll_base = stats.low_level_nodes

    root_solution = {}
    for aid in stage.outliers:
        traj = plan_single(
            starts[aid], stage.goals[aid], scenario.spec, scenario.world, (), cfg, stats=stats, deadline=deadline
        )
        if traj is None:
            return PlanResult(False, reason=f"root plan failed for outlier {aid}",
                              high_level_nodes=0, low_level_nodes=stats.low_level_nodes - ll_base,
                              wall_time_s=time.monotonic() - t0)
        root_solution[aid] = traj
    for g in stage.groups:
        trajs = plan_group(
            [starts[m] for m in g.member_ids],
            [stage.goals[m] for m in g.member_ids],
            scenario.spec,
            scenario.world,
            [()] * len(g.member_ids),
            g.shape,
            cfg,
            stats=stats,
            deadline=deadline,
        )
        if trajs is None:
            return PlanResult(False, reason="root plan failed for a group",
                              high_level_nodes=0, low_level_nodes=stats.low_level_nodes - ll_base,
                              wall_time_s=time.monotonic() - t0)
        for mid, traj in zip(g.member_ids, trajs):
            root_solution[mid] = traj

    root = CtNode({}, root_solution, cost_sum(root_solution, scenario.spec.sample_time))
    open_list = [(root.cost, 0, root)]
    seq = 1
    while open_list:
        if time.monotonic() > deadline:
            return PlanResult(False, reason="time limit", high_level_nodes=hl_nodes,
                              low_level_nodes=stats.low_level_nodes - ll_base, wall_time_s=time.monotonic() - t0)
        if hl_nodes > limits.high_level_budget:
            return PlanResult(False, reason="high-level budget", high_level_nodes=hl_nodes,
                              low_level_nodes=stats.low_level_nodes - ll_base, wall_time_s=time.monotonic() - t0)
        _, _, node = heapq.heappop(open_list)
        conflict = find_first_body_conflict(node.solution, scenario.spec, cfg)
        if conflict is None:
            return PlanResult(True, _pad_solution(node.solution), node.cost, hl_nodes,
                              stats.low_level_nodes - ll_base, time.monotonic() - t0)
        hl_nodes += 2
        for child in branch(node, conflict, stage, scenario, cfg, stats=stats, deadline=deadline, starts=starts):
            heapq.heappush(open_list, (child.cost, seq, child))
            seq += 1
    return PlanResult(False, reason="conflict tree exhausted", high_level_nodes=hl_nodes,
                      low_level_nodes=stats.low_level_nodes - ll_base, wall_time_s=time.monotonic() - t0)


def plan(scenario, limits=None, cfg=None):
    """Plan a single-stage scenario (the first stage of a multi-stage one)."""
    limits = limits or PlanLimits()
    cfg = cfg or PlannerConfig()
    return plan_stage(scenario, scenario.stages[0], cfg, limits)


def plan_stages(scenario, limits=None, cfg=None):
    """Plan all stages sequentially under one overall time limit.

    Stage s+1 starts from stage s's exact achieved final poses (time reset
    to 0), so concatenated per-agent trajectories are pose-continuous at the
    boundaries.  Returns (results, success): per-stage PlanResults.
    """
    limits = limits or PlanLimits()
    cfg = cfg or PlannerConfig()
    deadline = time.monotonic() + limits.time_limit_s
    stats = SearchStats()
    results = []
    starts = None
    for stage in scenario.stages:
        result = plan_stage(scenario, stage, cfg, limits, stats=stats, deadline=deadline, starts=starts)
        results.append(result)
        if not result.success:
            return results, False
        starts = {
            aid: AgentState(t.final_state.x, t.final_state.y, t.final_state.yaw, 0)
            for aid, t in result.solution.items()
        }
    return results, True

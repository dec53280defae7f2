"""Cooperative batch search for one formation group.

A leaderless, synchronized search: every batch, the member currently
closest to its own goal (the first agent) advances one step and anchors the
group's shape template at the top of its open list, producing per-member
ideal poses.  The remaining members then each advance one step, with the
child closest to its ideal pose rewarded on g so the group tracks the
template.  When the others lag too far behind, the first agent expands only
a wait successor whose f is forced to 0, guaranteeing it is re-expanded
next batch.
"""

import math
import time
from dataclasses import dataclass, field

from .config import CshaConfig, PlannerConfig
from .model import Trajectory
from .search_single import (
    AgentSearch,
    SearchStats,
    plan_single,
    shape_distance,
)

__all__ = [
    "RelativeStates",
    "BatchState",
    "CshaConfig",
    "first_agent_cal",
    "ideal_states_cal",
    "shape_distance",
    "remote_dis",
    "plan_group",
]


@dataclass(frozen=True)
class RelativeStates:
    """Formation template: per-member planar offsets from member 0, in the
    map frame (the template translates with the group; it does not rotate)."""

    offsets: tuple  # ((dx, dy) * n), offsets[0] == (0, 0)

    def __post_init__(self):
        if not self.offsets:
            raise ValueError("formation template needs at least one member")
        ox, oy = self.offsets[0]
        if ox != 0.0 or oy != 0.0:
            raise ValueError("offsets[0] must be exactly (0, 0)")

    def __len__(self):
        return len(self.offsets)

    def diameter_from(self, k):
        """Largest planar offset distance from member k to any member."""
        kx, ky = self.offsets[k]
        return max(math.hypot(ox - kx, oy - ky) for ox, oy in self.offsets)


@dataclass
class BatchState:
    """Mutable per-query bookkeeping of the batch loop (mostly for tests)."""

    latest: list
    ideal: list = None
    first_agent: int = -1
    finished: list = field(default_factory=list)


def first_agent_cal(latest, goals, finished):
    """Index of the unfinished member whose latest position is closest (in
    the Euclidean sense) to its own goal; ties go to the smaller index."""
    best = -1
    best_d = math.inf
    for j, (pose, goal) in enumerate(zip(latest, goals)):
        if finished[j]:
            continue
        d = math.hypot(pose[0] - goal.x, pose[1] - goal.y)
        if d < best_d:
            best_d = d
            best = j
    if best < 0:
        raise ValueError("all members finished")
    return best


def ideal_states_cal(first_pose, k, offsets):
    """Per-member ideal poses from the first agent's pose and the template.

    The template is anchored so member k sits exactly at first_pose; every
    member shares the first agent's yaw.
    """
    ox, oy = offsets[k]
    dx = first_pose[0] - ox
    dy = first_pose[1] - oy
    yaw = first_pose[2]
    return [(o[0] + dx, o[1] + dy, yaw) for o in offsets]


def remote_dis(latest, ideal_prev, first, offsets, csha, finished=None):
    """True when the first agent has advanced too far from the others.

    Either some other member sits further than the threshold from its
    previous ideal pose, or its distance to the first agent exceeds the
    template's member spacing plus the threshold (both strict comparisons).
    """
    n = len(latest)
    fx, fy = latest[first][0], latest[first][1]
    kx, ky = offsets[first]
    for j in range(n):
        if j == first or (finished is not None and finished[j]):
            continue
        jx, jy = latest[j][0], latest[j][1]
        if ideal_prev is not None:
            ix, iy = ideal_prev[j][0], ideal_prev[j][1]
            if math.hypot(jx - ix, jy - iy) > csha.remote_threshold:
                return True
        ox, oy = offsets[j]
        spacing = math.hypot(ox - kx, oy - ky)
        if math.hypot(jx - fx, jy - fy) > spacing + csha.remote_threshold:
            return True
    return False


def plan_group(starts, goals, spec, world, constraints, offsets, cfg=None, *, stats=None, deadline=None):
    """Plan all members of one group jointly under the shape template.

    constraints is a per-member sequence of avoid-constraint collections.
    Returns a list of Trajectories (member order) or None on failure (any
    member's open list emptying, node budget, or deadline).  A single-member
    group degenerates to the individual planner.
    """
    cfg = cfg or PlannerConfig()
    stats = stats if stats is not None else SearchStats()
    offsets = offsets.offsets if isinstance(offsets, RelativeStates) else tuple(offsets)
    n = len(offsets)
    if len(starts) != n or len(goals) != n or len(constraints) != n:
        raise ValueError("member count mismatch with the formation template")
    if n == 1:
        traj = plan_single(starts[0], goals[0], spec, world, constraints[0], cfg, stats=stats, deadline=deadline)
        return None if traj is None else [traj]

    csha = cfg.csha()
    searches = [
        AgentSearch(starts[j], goals[j], spec, world, constraints[j], cfg, stats=stats)
        for j in range(n)
    ]
    # finished members become static bodies for the ones still searching
    batch = BatchState(latest=[s.pose for s in starts], finished=[False] * n)
    best_goal_dist = [math.hypot(s.x - g.x, s.y - g.y) for s, g in zip(starts, goals)]
    trajectories = [None] * n
    ideal_prev = None

    def note_progress(j, pose):
        # track each member's most goal-advanced pose: raw pops bounce around
        # the tree during backtracking and would thrash the wait gate
        d = math.hypot(pose[0] - goals[j].x, pose[1] - goals[j].y)
        if d < best_goal_dist[j]:
            best_goal_dist[j] = d
            batch.latest[j] = pose

    def park(j, traj):
        batch.finished[j] = True
        trajectories[j] = traj
        pose = traj.final_state.pose
        batch.latest[j] = pose
        for srch in searches:
            if srch is not searches[j]:
                srch.index.add_parked(traj.arrival_tick, pose)

    while True:
        if all(batch.finished):
            return trajectories
        if deadline is not None and time.monotonic() > deadline:
            return None
        if sum(s.query_nodes for s in searches) > cfg.node_budget:
            return None

        k = first_agent_cal(batch.latest, goals, batch.finished)
        batch.first_agent = k
        srch = searches[k]
        node = srch.pop_best()
        if node is None:
            return None
        note_progress(k, node.state.pose)
        traj = srch.try_finish(node)
        if traj is not None:
            park(k, traj)
        else:
            none_finished = not any(batch.finished)
            if none_finished and remote_dis(batch.latest, ideal_prev, k, offsets, csha, batch.finished):
                srch.expand(node, wait_only=True, zero_f=True)
            else:
                srch.expand(node)
            top = srch.peek_best()
            if top is None:
                return None
            ideal_prev = ideal_states_cal(top.state.pose, k, offsets)
            batch.ideal = ideal_prev

        for j in range(n):
            if j == k or batch.finished[j]:
                continue
            srch_j = searches[j]
            node_j = srch_j.pop_best()
            if node_j is None:
                return None
            note_progress(j, node_j.state.pose)
            traj_j = srch_j.try_finish(node_j)
            if traj_j is not None:
                park(j, traj_j)
                continue
            ideal_j = ideal_prev[j] if ideal_prev is not None else None
            srch_j.expand(
                node_j,
                ideal=ideal_j,
                angle_weight=csha.angle_weight,
                closest_reward=csha.closest_reward if ideal_j is not None else None,
            )
            if srch_j.open_empty():
                return None

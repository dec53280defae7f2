"""Spatiotemporal hybrid A* for a single agent.

States carry a time tick; avoid-constraints forbid body overlap with another
agent's recorded pose inside a small time window around the constraint's
tick.  The search expands 7 motion primitives per step, de-duplicates on a
discretized (x, y, yaw, t) key, and finishes through an analytic
minimum-turning-radius tail onto the goal.  The same machinery (AgentSearch)
drives the per-member searches of the cooperative group planner.
"""

import heapq
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import analytic, kernels
from .config import PlannerConfig
from .model import (
    BACKWARD,
    WAIT,
    AgentState,
    Trajectory,
    motion_primitives,
    primitive_control,
    substeps_per_primitive,
)
from .world import BodyGeometry, pose_blocked_static

_EMPTY_RECTS = np.empty((0, 8), dtype=np.float64)


@dataclass(frozen=True)
class AvoidConstraint:
    """Forbids body overlap with other_agent's pose around tick state.t."""

    other_agent: int
    state: AgentState


@dataclass
class SearchStats:
    """Counters shared across the low-level queries of one planning run."""

    low_level_nodes: int = 0
    expansions: int = 0


class BudgetExceeded(Exception):
    """Per-query node budget or wall-clock deadline ran out."""


class SearchNode:
    __slots__ = ("state", "g", "h", "f", "parent", "primitive", "rewarded")

    def __init__(self, state, g, h, f, parent=None, primitive=None, rewarded=False):
        self.state = state
        self.g = g
        self.h = h
        self.f = f
        self.parent = parent
        self.primitive = primitive
        self.rewarded = rewarded


def discrete_key(state, cfg):
    """Duplicate-detection bin of a state: (x bin, y bin, yaw bin, tick)."""
    return (
        math.floor(state.x / cfg.bin_xy),
        math.floor(state.y / cfg.bin_xy),
        math.floor((state.yaw + math.pi) / cfg.bin_yaw),
        state.t,
    )


class GridHeuristic:
    """Obstacle-aware distance-to-goal field: 8-connected Dijkstra over a
    coarse occupancy grid of the workspace (bands included)."""

    def __init__(self, world, goal_xy, cell=1.0):
        self.cell = cell
        xmin, xmax, ymin, ymax = world.bounds
        self.xmin = xmin
        self.ymin = ymin
        nx = max(1, math.ceil((xmax - xmin) / cell))
        ny = max(1, math.ceil((ymax - ymin) / cell))
        self.nx = nx
        self.ny = ny
        blocked = np.zeros((nx, ny), dtype=bool)
        if world.obstacles:
            cx = xmin + (np.arange(nx) + 0.5) * cell
            cy = ymin + (np.arange(ny) + 0.5) * cell
            gx, gy = np.meshgrid(cx, cy, indexing="ij")
            for o in world.obstacles:
                if hasattr(o, "radius"):
                    blocked |= (gx - o.cx) ** 2 + (gy - o.cy) ** 2 <= o.radius**2
                else:
                    inside = np.ones_like(blocked)
                    pts = o.corners
                    for k in range(4):
                        ax, ay = pts[k]
                        bx, by = pts[(k + 1) % 4]
                        inside &= (bx - ax) * (gy - ay) - (by - ay) * (gx - ax) >= 0
                    blocked |= inside
        dist = np.full((nx, ny), np.inf)
        gi = min(max(int((goal_xy[0] - xmin) / cell), 0), nx - 1)
        gj = min(max(int((goal_xy[1] - ymin) / cell), 0), ny - 1)
        if blocked[gi, gj]:
            free = np.argwhere(~blocked)
            if free.size:
                d2 = (free[:, 0] - gi) ** 2 + (free[:, 1] - gj) ** 2
                gi, gj = free[int(np.argmin(d2))]
        diag = cell * math.sqrt(2.0)
        dist[gi, gj] = 0.0
        pq = [(0.0, int(gi), int(gj))]
        moves = ((1, 0, cell), (-1, 0, cell), (0, 1, cell), (0, -1, cell),
                 (1, 1, diag), (1, -1, diag), (-1, 1, diag), (-1, -1, diag))
        while pq:
            d, i, j = heapq.heappop(pq)
            if d > dist[i, j]:
                continue
            for di, dj, w in moves:
                ni = i + di
                nj = j + dj
                if 0 <= ni < nx and 0 <= nj < ny and not blocked[ni, nj]:
                    nd = d + w
                    if nd < dist[ni, nj]:
                        dist[ni, nj] = nd
                        heapq.heappush(pq, (nd, ni, nj))
        self.dist = dist

    def __call__(self, x, y):
        i = int((x - self.xmin) / self.cell)
        j = int((y - self.ymin) / self.cell)
        if 0 <= i < self.nx and 0 <= j < self.ny:
            return float(self.dist[i, j])
        return math.inf


def grid_heuristic_for(world, goal, cell=1.0):
    """Per-(world, goal) cache of GridHeuristic instances."""
    key = (round(goal.x, 6), round(goal.y, 6), cell)
    cache = world._heuristic_cache
    if key not in cache:
        cache[key] = GridHeuristic(world, (goal.x, goal.y), cell)
    return cache[key]


def heuristic(state, goal, world, spec, grid=None, cell=1.0):
    """Admissible cost-to-go: max of the bounded-curvature distance ignoring
    obstacles and the obstacle-aware grid distance."""
    if grid is None:
        grid = grid_heuristic_for(world, goal, cell)
    r = spec.min_turn_radius
    lx, ly, lphi = analytic.to_local(state.pose, goal.pose, r)
    rs = kernels.rs_length(lx, ly, lphi) * r
    hg = grid(state.x, state.y)
    if hg == math.inf:
        return hg
    return max(rs, hg, 0.0)


class ConstraintIndex:
    """Per-tick lookup of forbidden body rectangles.

    Each avoid-constraint contributes its pose's footprint to every tick in
    [t - window, t + window]; parked bodies (finished group members) occupy
    their pose from their arrival tick onward.
    """

    def __init__(self, constraints, geom, window):
        self.window = window
        self.geom = geom
        per_tick = {}
        self._entries = []
        for c in constraints:
            s = c.state
            rect = kernels.rect_corners(s.x, s.y, s.yaw, geom.front, geom.rear, geom.half_w)
            self._entries.append((s.t, rect))
            for tick in range(max(0, s.t - window), s.t + window + 1):
                per_tick.setdefault(tick, []).append(rect)
        self.per_tick = {
            tick: np.array(rows, dtype=np.float64) for tick, rows in per_tick.items()
        }
        self.parked = []  # (from_tick, rect)
        self._park_rows = _EMPTY_RECTS
        self._cache = {}

    def add_parked(self, from_tick, pose):
        rect = kernels.rect_corners(pose[0], pose[1], pose[2], self.geom.front, self.geom.rear, self.geom.half_w)
        self.parked.append((from_tick, rect))
        self.parked.sort(key=lambda p: p[0])
        self._park_rows = np.array([r for _, r in self.parked], dtype=np.float64)
        self._cache.clear()

    def rects_at(self, tick):
        """(n, 8) array of forbidden rectangles active at a tick."""
        got = self._cache.get(tick)
        if got is not None:
            return got
        base = self.per_tick.get(tick)
        if self.parked:
            k = 0
            for from_tick, _ in self.parked:
                if from_tick <= tick:
                    k += 1
                else:
                    break
            if k:
                park = self._park_rows[:k]
                rows = park if base is None else np.vstack((base, park))
            else:
                rows = base if base is not None else _EMPTY_RECTS
        else:
            rows = base if base is not None else _EMPTY_RECTS
        self._cache[tick] = rows
        return rows

    def pose_clear_from(self, pose, from_tick):
        """True if a pose parked from from_tick onward never overlaps a
        constraint at tick >= from_tick - window nor any parked body."""
        x, y, yaw = pose
        rect_rows = [r for t, r in self._entries if t >= from_tick - self.window]
        rect_rows += [r for _, r in self.parked]
        if not rect_rows:
            return True
        rows = np.array(rect_rows, dtype=np.float64)
        return not kernels.pose_overlaps_any(x, y, yaw, self.geom.front, self.geom.rear, self.geom.half_w, rows)


class AgentSearch:
    """Open/closed-list machinery for one agent's spatiotemporal search."""

    def __init__(self, start, goal, spec, world, constraints, cfg, *, stats=None, grid=None, shared_index=None):
        self.start = start
        self.goal = goal
        self.spec = spec
        self.world = world
        self.cfg = cfg
        self.stats = stats if stats is not None else SearchStats()
        self.geom = BodyGeometry.of(spec, cfg.inflation)
        self.n_sub = substeps_per_primitive(spec, cfg.search_step_time)
        self.dt = spec.sample_time
        self.r_min = spec.min_turn_radius
        self.grid = grid if grid is not None else grid_heuristic_for(world, goal, cfg.heuristic_cell)
        self.index = shared_index if shared_index is not None else ConstraintIndex(
            constraints, self.geom, cfg.constraint_window
        )
        self.primitives = motion_primitives(spec, cfg.search_step_time)
        self.controls = [primitive_control(p, spec) for p in self.primitives]
        # swept-collision sample count per tick: distance interval is
        # min(half body width, v_max * T_s / 5)
        interval = min(0.5 * spec.width, spec.v_forward_max * self.dt / 5.0)
        self.n_checks = [
            max(1, math.ceil(abs(u.v) * self.dt / interval)) if u.v != 0.0 else 1 for u in self.controls
        ]
        self.open = []
        self.best_g = {}
        self.closed = set()
        self.seq = 0
        self.query_nodes = 0
        self._since_analytic = 0
        h0 = self._h(start)
        root = SearchNode(start, 0.0, h0, h0)
        self._push(root)

    # -- heuristic / bookkeeping -------------------------------------------

    def _h(self, state):
        r = self.r_min
        lx, ly, lphi = analytic.to_local(state.pose, self.goal.pose, r)
        rs = kernels.rs_length(lx, ly, lphi) * r
        hg = self.grid(state.x, state.y)
        if hg == math.inf:
            return hg
        return max(rs, hg, 0.0)

    def _push(self, node):
        heapq.heappush(self.open, (node.f, node.h, self.seq, node))
        self.seq += 1

    def pop_best(self):
        """Pop the lowest-f node not yet closed; None if exhausted."""
        while self.open:
            _, _, _, node = heapq.heappop(self.open)
            key = discrete_key(node.state, self.cfg)
            if key in self.closed:
                continue
            self.closed.add(key)
            self.stats.expansions += 1
            return node
        return None

    def peek_best(self):
        """Best not-yet-closed open node, without removing it."""
        while self.open:
            _, _, _, node = self.open[0]
            if discrete_key(node.state, self.cfg) in self.closed:
                heapq.heappop(self.open)
                continue
            return node
        return None

    def open_empty(self):
        return self.peek_best() is None

    # -- goal handling ------------------------------------------------------

    def within_goal_tol(self, state):
        if math.hypot(state.x - self.goal.x, state.y - self.goal.y) > self.cfg.goal_tol_xy:
            return False
        return abs(kernels.normalize_angle(state.yaw - self.goal.yaw)) <= self.cfg.goal_tol_yaw

    def _tail_from(self, node):
        """Integrate the shortest feasible analytic word from node to the
        goal; returns (states, controls) or None."""
        cfg = self.cfg
        candidates = analytic.paths_between(node.state.pose, self.goal.pose, self.r_min)
        if not candidates:
            return None
        shortest = candidates[0][0]
        interval = min(0.5 * self.spec.width, self.spec.v_forward_max * self.dt / 5.0)
        for length, word in candidates:
            if length > shortest + 2.0 * self.r_min or length > cfg.analytic_gate * 1.5:
                break
            controls = analytic.word_controls(word, self.spec, self.r_min)
            x, y, yaw = node.state.pose
            t = node.state.t
            states = []
            ok = True
            for u in controls:
                tick = t + len(states) + 1
                n_check = max(1, math.ceil(abs(u.v) * self.dt / interval)) if u.v != 0.0 else 1
                xmin, xmax, ymin, ymax = self.world.bounds
                blocked, x, y, yaw = kernels.motion_blocked(
                    x, y, yaw, u.v, u.omega, self.dt, n_check,
                    self.geom.front, self.geom.rear, self.geom.half_w, self.geom.circ_r,
                    xmin, xmax, ymin, ymax,
                    self.world.circles, self.world.rects, self.index.rects_at(tick),
                )
                if blocked:
                    ok = False
                    break
                states.append(AgentState(x, y, yaw, tick))
            if not ok:
                continue
            end = states[-1] if states else node.state
            if math.hypot(end.x - self.goal.x, end.y - self.goal.y) > cfg.goal_tol_xy:
                continue
            if abs(kernels.normalize_angle(end.yaw - self.goal.yaw)) > cfg.goal_tol_yaw:
                continue
            if not self.index.pose_clear_from(end.pose, end.t):
                continue
            return states, controls
        return None

    def try_finish(self, node):
        """Goal-gated finish: only attempted within goal tolerance."""
        if not self.within_goal_tol(node.state):
            return None
        tail = self._tail_from(node)
        if tail is None:
            return None
        return self._build_trajectory(node, *tail)

    def try_analytic_shot(self, node):
        """Scheduled far-from-goal analytic attempt (shrinking period)."""
        self._since_analytic += 1
        if node.h > self.cfg.analytic_gate:
            return None
        period = min(10, max(1, int(node.h / (2.0 * self.r_min))))
        if self._since_analytic < period:
            return None
        self._since_analytic = 0
        tail = self._tail_from(node)
        if tail is None:
            return None
        return self._build_trajectory(node, *tail)

    def _build_trajectory(self, node, tail_states, tail_controls):
        prims = []
        cur = node
        while cur.parent is not None:
            prims.append(cur.primitive)
            cur = cur.parent
        prims.reverse()
        states = [self.start]
        controls = []
        x, y, yaw = self.start.pose
        t = self.start.t
        for prim in prims:
            u = self.controls[self.primitives.index(prim)]
            for _ in range(self.n_sub):
                x, y, yaw = kernels.integrate_steps(x, y, yaw, u.v, u.omega, self.dt, 1)
                t += 1
                states.append(AgentState(x, y, yaw, t))
                controls.append(u)
        states.extend(tail_states)
        controls.extend(tail_controls)
        return Trajectory(states, controls, states[-1].t)

    # -- expansion ----------------------------------------------------------

    def _step_cost(self, prim, parent_prim):
        cfg = self.cfg
        if prim.direction == WAIT:
            arc = self.spec.v_forward_max * cfg.search_step_time
            return arc * cfg.wait_penalty
        cost = prim.arc_length * (cfg.reverse_penalty if prim.direction == BACKWARD else 1.0)
        if parent_prim is not None and prim.steering != parent_prim.steering:
            cost += cfg.steer_change_penalty
        return cost

    def expand(self, node, *, ideal=None, angle_weight=1.0, closest_reward=None, wait_only=False, zero_f=False):
        """Generate this node's feasible children and push them on the open
        list.  With ideal set, the child minimizing the shape distance gets
        its g multiplied by closest_reward; with wait_only/zero_f, only the
        wait child is generated and its f forced to 0.  Returns the pushed
        children for inspection."""
        cfg = self.cfg
        xmin, xmax, ymin, ymax = self.world.bounds
        candidates = []
        for idx, prim in enumerate(self.primitives):
            if wait_only and prim.direction != WAIT:
                continue
            u = self.controls[idx]
            n_check = self.n_checks[idx]
            x, y, yaw = node.state.pose
            t = node.state.t
            blocked = False
            for k in range(self.n_sub):
                tick = t + k + 1
                blocked, x, y, yaw = kernels.motion_blocked(
                    x, y, yaw, u.v, u.omega, self.dt, n_check,
                    self.geom.front, self.geom.rear, self.geom.half_w, self.geom.circ_r,
                    xmin, xmax, ymin, ymax,
                    self.world.circles, self.world.rects, self.index.rects_at(tick),
                )
                if blocked:
                    break
            if blocked:
                continue
            child = AgentState(x, y, yaw, t + self.n_sub)
            key = discrete_key(child, cfg)
            if key in self.closed:
                continue
            g = node.g + self._step_cost(prim, node.primitive)
            self.stats.low_level_nodes += 1
            self.query_nodes += 1
            candidates.append([idx, prim, child, key, g])
        if not candidates:
            return []
        reward_i = -1
        if ideal is not None and closest_reward is not None:
            best_d = None
            for i, cand in enumerate(candidates):
                d = shape_distance(cand[2], ideal, angle_weight)
                if best_d is None or d < best_d:
                    best_d = d
                    reward_i = i
        pushed = []
        for i, (idx, prim, child, key, g) in enumerate(candidates):
            if not zero_f:
                seen = self.best_g.get(key)
                if seen is not None and seen <= g:
                    continue
                self.best_g[key] = g
            h = self._h(child)
            # the shape reward discounts the child's queue priority (not the
            # cost carried along the path): g stays the true cost, f uses the
            # discounted value so the child is the likely next-batch pop
            rewarded = i == reward_i
            if zero_f:
                f = 0.0
            elif rewarded:
                f = g * closest_reward + h
            else:
                f = g + h
            sn = SearchNode(child, g, h, f, node, prim, rewarded)
            self._push(sn)
            pushed.append(sn)
        return pushed


def shape_distance(state, ideal, angle_weight):
    """Squared planar offset plus weighted absolute yaw difference (wrapped
    into [0, pi]) between a state and its ideal pose."""
    dx = state.x - ideal[0]
    dy = state.y - ideal[1]
    dyaw = abs(kernels.normalize_angle(state.yaw - ideal[2]))
    return dx * dx + dy * dy + angle_weight * dyaw


def plan_single(start, goal, spec, world, constraints=(), cfg=None, *, stats=None, deadline=None):
    """Plan one agent from start to goal under avoid-constraints.

    Returns a Trajectory or None (open list exhausted, node budget spent or
    deadline passed).  The trajectory ends within the goal tolerance and is
    implicitly padded at its final pose afterwards.
    """
    cfg = cfg or PlannerConfig()
    stats = stats if stats is not None else SearchStats()
    geom = BodyGeometry.of(spec, cfg.inflation)
    if pose_blocked_static(start, geom, world) or pose_blocked_static(goal, geom, world):
        return None
    search = AgentSearch(start, goal, spec, world, constraints, cfg, stats=stats)
    while True:
        if deadline is not None and time.monotonic() > deadline:
            return None
        if search.query_nodes > cfg.node_budget:
            return None
        node = search.pop_best()
        if node is None:
            return None
        if search.within_goal_tol(node.state):
            traj = search.try_finish(node)
            if traj is not None:
                return traj
        else:
            traj = search.try_analytic_shot(node)
            if traj is not None:
                return traj
        search.expand(node)

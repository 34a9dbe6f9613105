"""Solvers for the pinned space-time subproblems.

Every problem this module solves has the same shape: a sum of quadratic
stage costs over a space-time window, some slots pinned to given values,
the rest free inside their boxes.  ``_WindowProblem`` folds the pinned
values into a single box QP over the free slots (ordering: time-major,
then vertex-major, then coordinate) and hands it to either backend:

* "direct": active-set linear solves (exact for quadratics),
* "projected-gradient": first-order iteration, the independent cross-check.

Entry points: :func:`local_psi` (one agent's windowed problem with
neighborhood pins), :func:`clairvoyant_pinned` (global, both ends pinned),
:func:`clairvoyant_tail` (global, pinned only at the start), and
:func:`offline_opt` (the tail problem from the true start).
"""

from __future__ import annotations

import dataclasses
from typing import Mapping

import numpy as np

from . import boxqp
from .boxqp import SolverDiverged
from .graph import st_neighborhood
from .instances import Instance
from .trajectory import Trajectory

__all__ = [
    "SolveSettings",
    "SolveReport",
    "SolverDiverged",
    "local_psi",
    "clairvoyant_pinned",
    "clairvoyant_tail",
    "offline_opt",
]


@dataclasses.dataclass(frozen=True)
class SolveSettings:
    backend: str = "direct"        # "direct" | "projected-gradient"
    tol: float = 1e-10
    max_iter: int = 5_000_000
    accelerated: bool = True

    def __post_init__(self):
        if self.backend not in ("direct", "projected-gradient"):
            raise ValueError(f"unknown backend {self.backend!r}")


DEFAULT_SETTINGS = SolveSettings()


@dataclasses.dataclass
class SolveReport:
    """Solution of one pinned window problem."""
    actions: dict[tuple[int, int], np.ndarray]  # free (t, v) -> action
    objective: float
    kkt_residual: float
    iterations: int
    method: str

    def action(self, t: int, v: int) -> np.ndarray:
        return self.actions[(t, v)]

    def window_array(self, t_start: int, t_end: int, vertex_count: int,
                     dim: int) -> np.ndarray:
        """Dense (t_end-t_start+1, V, n) view; all slots must be present."""
        out = np.empty((t_end - t_start + 1, vertex_count, dim))
        for t in range(t_start, t_end + 1):
            for v in range(vertex_count):
                out[t - t_start, v] = self.actions[(t, v)]
        return out


class _WindowProblem:
    """Box QP over free space-time slots with pinned values folded in."""

    def __init__(self, inst: Instance, free: list[tuple[int, int]],
                 pins: Mapping[tuple[int, int], np.ndarray]):
        self.inst = inst
        n = inst.dim
        self.free = sorted(free)  # time-major, then vertex-major
        self.slot = {key: i * n for i, key in enumerate(self.free)}
        self.pins = {key: np.asarray(val, dtype=float).reshape(n)
                     for key, val in pins.items()}
        m = len(self.free) * n
        self.Q = np.zeros((m, m))
        self.q = np.zeros(m)
        self.const = 0.0
        self.lo = np.empty(m)
        self.hi = np.empty(m)
        for (t, v), off in self.slot.items():
            box = inst.box(t, v)
            self.lo[off:off + n] = box.lower
            self.hi[off:off + n] = box.upper

    def _fold(self, cost, keys: list[tuple[int, int]]) -> None:
        """Add a quadratic acting on the stacked blocks `keys` (free or pinned)."""
        n = self.inst.dim
        free_local: list[int] = []
        free_global: list[int] = []
        pinned_local: list[int] = []
        pinned_vals: list[np.ndarray] = []
        for i, key in enumerate(keys):
            if key in self.slot:
                free_local.extend(range(i * n, (i + 1) * n))
                free_global.extend(range(self.slot[key], self.slot[key] + n))
            else:
                pinned_local.extend(range(i * n, (i + 1) * n))
                pinned_vals.append(self.pins[key])
        A, b = cost.A, cost.b
        if not free_local:
            z = np.concatenate(pinned_vals)
            self.const += 0.5 * z @ A @ z + b @ z + cost.c
            return
        gf = np.asarray(free_global)
        fl = np.asarray(free_local)
        self.Q[np.ix_(gf, gf)] += A[np.ix_(fl, fl)]
        self.q[gf] += b[fl]
        self.const += cost.c
        if pinned_local:
            pl = np.asarray(pinned_local)
            p = np.concatenate(pinned_vals)
            self.q[gf] += A[np.ix_(fl, pl)] @ p
            self.const += 0.5 * p @ A[np.ix_(pl, pl)] @ p + b[pl] @ p

    def add_node(self, t: int, v: int) -> None:
        self._fold(self.inst.node_cost(t, v), [(t, v)])

    def add_temporal(self, t: int, v: int) -> None:
        cost = self.inst.temporal_cost(t, v)
        if cost is not None:
            self._fold(cost, [(t, v), (t - 1, v)])

    def add_spatial(self, t: int, e: tuple[int, int]) -> None:
        cost = self.inst.spatial_cost(t, e)
        if cost is not None:
            self._fold(cost, [(t, e[0]), (t, e[1])])

    def solve(self, settings: SolveSettings) -> SolveReport:
        if settings.backend == "direct":
            res = boxqp.solve_direct(self.Q, self.q, self.lo, self.hi,
                                     tol=settings.tol)
            method = res.method
            if res.x.size and (np.any(res.x <= self.lo + settings.tol)
                               or np.any(res.x >= self.hi - settings.tol)):
                method = "active-set"
        else:
            res = boxqp.solve_projected_gradient(
                self.Q, self.q, self.lo, self.hi, tol=settings.tol,
                max_iter=settings.max_iter, accelerated=settings.accelerated)
            method = res.method
        n = self.inst.dim
        actions = {key: res.x[off:off + n].copy() for key, off in self.slot.items()}
        objective = float(0.5 * res.x @ self.Q @ res.x + self.q @ res.x + self.const)
        return SolveReport(actions=actions, objective=objective,
                           kkt_residual=res.residual, iterations=res.iterations,
                           method=method)


def _check_pin_feasible(inst: Instance, key: tuple[int, int], value,
                        tol: float = 1e-9) -> np.ndarray:
    value = np.asarray(value, dtype=float).reshape(inst.dim)
    t, v = key
    if t >= 1 and not inst.box(t, v).contains(value, tol):
        raise ValueError(f"pinned value at (t={t}, v={v}) outside its box")
    return value


def local_psi(inst: Instance, t: int, v: int, k: int, r: int,
              y: Mapping[int, np.ndarray],
              z: Mapping[tuple[int, int], np.ndarray],
              settings: SolveSettings = DEFAULT_SETTINGS,
              check_pins: bool = True) -> SolveReport:
    """One agent's windowed problem with pinned boundary.

    Minimizes, over the free slots {t..t+k-2} x (r-1)-hop neighborhood, the
    window sum of: node costs on the (r-1)-neighborhood, all edge couplings
    inside the r-neighborhood, and movement costs for every agent of the
    r-neighborhood.  ``y`` pins the previous actions of the r-neighborhood,
    ``z`` pins the remaining window boundary.
    """
    if k < 2 or r < 1:
        raise ValueError(f"need k >= 2 and r >= 1, got k={k}, r={r}")
    net = inst.net
    inner = net.neighborhood(v, r - 1)
    full = net.neighborhood(v, r)
    interior, boundary = st_neighborhood(net, t, v, k, r)

    pins: dict[tuple[int, int], np.ndarray] = {}
    for u in full:
        val = y[u] if check_pins is False else _check_pin_feasible(inst, (t - 1, u), y[u])
        pins[(t - 1, u)] = np.asarray(val, dtype=float).reshape(inst.dim)
    for key in boundary:
        val = z[key] if check_pins is False else _check_pin_feasible(inst, key, z[key])
        pins[key] = np.asarray(val, dtype=float).reshape(inst.dim)

    prob = _WindowProblem(inst, list(interior), pins)
    inner_edges = net.edges_within(full)
    for tau in range(t, t + k):
        for u in inner:
            prob.add_node(tau, u)
        for e in inner_edges:
            prob.add_spatial(tau, e)
        for u in full:
            prob.add_temporal(tau, u)
    return prob.solve(settings)


def clairvoyant_pinned(inst: Instance, t: int, p: int,
                       y, z, settings: SolveSettings = DEFAULT_SETTINGS) -> SolveReport:
    """Global window problem pinned at both ends.

    Minimizes the full stage costs over times t..t+p-1 subject to
    x_{t-1} = y and x_{t+p-1} = z; the free slots are t..t+p-2 (p=1 pins
    everything and just evaluates).  Windows may extend past the horizon.
    """
    if t < 1 or p < 1:
        raise ValueError(f"need t >= 1 and p >= 1, got t={t}, p={p}")
    V = inst.net.vertex_count
    y = np.asarray(y, dtype=float).reshape(V, inst.dim)
    z = np.asarray(z, dtype=float).reshape(V, inst.dim)
    pins = {(t - 1, u): y[u] for u in range(V)}
    pins.update({(t + p - 1, u): z[u] for u in range(V)})
    free = [(tau, u) for tau in range(t, t + p - 1) for u in range(V)]
    prob = _WindowProblem(inst, free, pins)
    for tau in range(t, t + p):
        for u in range(V):
            prob.add_node(tau, u)
            prob.add_temporal(tau, u)
        for e in inst.spatial_costs_at(tau):
            prob.add_spatial(tau, e)
    return prob.solve(settings)


def clairvoyant_tail(inst: Instance, t: int, y,
                     settings: SolveSettings = DEFAULT_SETTINGS) -> SolveReport:
    """Global problem over t..H with only the past pinned: x_{t-1} = y."""
    if not (1 <= t <= inst.horizon):
        raise ValueError(f"need 1 <= t <= H={inst.horizon}, got t={t}")
    V = inst.net.vertex_count
    y = np.asarray(y, dtype=float).reshape(V, inst.dim)
    pins = {(t - 1, u): y[u] for u in range(V)}
    free = [(tau, u) for tau in range(t, inst.horizon + 1) for u in range(V)]
    prob = _WindowProblem(inst, free, pins)
    for tau in range(t, inst.horizon + 1):
        for u in range(V):
            prob.add_node(tau, u)
            prob.add_temporal(tau, u)
        for e in inst.spatial_costs_at(tau):
            prob.add_spatial(tau, e)
    return prob.solve(settings)


def offline_opt(inst: Instance,
                settings: SolveSettings = DEFAULT_SETTINGS) -> tuple[Trajectory, float]:
    """Global minimizer over all feasible trajectories and its cost."""
    report = clairvoyant_tail(inst, 1, inst.x0, settings)
    V, n, H = inst.net.vertex_count, inst.dim, inst.horizon
    actions = np.empty((H + 1, V, n))
    actions[0] = inst.x0
    actions[1:] = report.window_array(1, H, V, n)
    traj = Trajectory.from_actions(inst, actions)
    return traj, report.objective

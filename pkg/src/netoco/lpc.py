"""Localized predictive control on networks, plus baselines and diagnostics.

At each round every agent solves a windowed problem that sees only a bounded
graph neighborhood and a bounded lookahead: the previous round pins the time
boundary behind, per-node cost minimizers pin the space-time boundary ahead,
and only the first own action is committed.  The module also provides the
myopic one-round baseline, the per-round distance to the clairvoyant tail
solution, and the end-to-end competitive ratio against the offline optimum.
"""

from __future__ import annotations

import dataclasses
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .boxqp import SolverDiverged
from .graph import st_neighborhood
from .instances import Instance
from .solver import (DEFAULT_SETTINGS, SolveSettings, _WindowProblem,
                     clairvoyant_tail, local_psi, offline_opt)
from .theory import CrBound, DecayParams, cr_upper_bound, decay_params_for_instance
from .trajectory import Trajectory

__all__ = [
    "THREAD_ENV_VAR",
    "LpcConfig",
    "DegenerateOptimum",
    "CompetitiveRatioReport",
    "lpc_step",
    "lpc_run",
    "greedy_run",
    "per_step_errors",
    "competitive_ratio",
    "Trajectory",
]

THREAD_ENV_VAR = "NETOCO_THREADS"


class DegenerateOptimum(ValueError):
    """The offline cost is numerically zero, so a cost ratio is meaningless."""


@dataclasses.dataclass(frozen=True)
class LpcConfig:
    """Controller knobs: lookahead k (window of k-1 free steps) and radius r."""
    k: int
    r: int
    settings: SolveSettings = DEFAULT_SETTINGS

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"lookahead k must be >= 2, got {self.k}")
        if self.r < 1:
            raise ValueError(f"radius r must be >= 1, got {self.r}")


def _worker_count() -> int:
    raw = os.environ.get(THREAD_ENV_VAR, "").strip()
    if not raw:
        return 1
    try:
        count = int(raw)
    except ValueError as exc:
        raise ValueError(f"{THREAD_ENV_VAR} must be an integer, got {raw!r}") from exc
    return max(1, count)


def lpc_step(inst: Instance, t: int, prev, cfg: LpcConfig) -> np.ndarray:
    """All agents' committed actions at round t, given the previous round.

    Agents are independent given ``prev``; set NETOCO_THREADS to solve the
    per-agent problems on a thread pool.
    """
    if not (1 <= t <= inst.horizon):
        raise ValueError(f"need 1 <= t <= H={inst.horizon}, got t={t}")
    net = inst.net
    prev = np.asarray(prev, dtype=float).reshape(net.vertex_count, inst.dim)

    def commit(v: int) -> np.ndarray:
        y = {u: prev[u] for u in net.neighborhood(v, cfg.r)}
        _, boundary = st_neighborhood(net, t, v, cfg.k, cfg.r)
        z = {key: inst.theta(*key) for key in boundary}
        try:
            report = local_psi(inst, t, v, cfg.k, cfg.r, y, z, cfg.settings)
        except SolverDiverged as exc:
            raise SolverDiverged(f"agent {v} at t={t}: {exc}") from exc
        return report.action(t, v)

    workers = _worker_count()
    if workers == 1:
        rows = [commit(v) for v in range(net.vertex_count)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(commit, range(net.vertex_count)))
    return np.stack(rows)


def lpc_run(inst: Instance, cfg: LpcConfig) -> Trajectory:
    """Run the controller over the whole horizon from the fixed start point."""
    V, n, H = inst.net.vertex_count, inst.dim, inst.horizon
    actions = np.empty((H + 1, V, n))
    actions[0] = inst.x0
    for t in range(1, H + 1):
        actions[t] = lpc_step(inst, t, actions[t - 1], cfg)
    return Trajectory.from_actions(inst, actions)


def greedy_run(inst: Instance,
               settings: SolveSettings = DEFAULT_SETTINGS) -> Trajectory:
    """Myopic baseline: each round minimizes that round's stage cost alone."""
    V, n, H = inst.net.vertex_count, inst.dim, inst.horizon
    actions = np.empty((H + 1, V, n))
    actions[0] = inst.x0
    for t in range(1, H + 1):
        prob = _WindowProblem(inst, [(t, u) for u in range(V)],
                              {(t - 1, u): actions[t - 1, u] for u in range(V)})
        for u in range(V):
            prob.add_node(t, u)
            prob.add_temporal(t, u)
        for e in inst.spatial_costs_at(t):
            prob.add_spatial(t, e)
        report = prob.solve(settings)
        actions[t] = report.window_array(t, t, V, n)[0]
    return Trajectory.from_actions(inst, actions)


def per_step_errors(inst: Instance, traj: Trajectory,
                    settings: SolveSettings = DEFAULT_SETTINGS) -> np.ndarray:
    """Distance, per round, from the committed actions to the clairvoyant tail.

    Entry t-1 is the Euclidean norm over all agents and coordinates of
    x_t - psi_t(x_{t-1})_t, where psi_t re-solves the remaining horizon from
    the trajectory's own previous round.
    """
    H = inst.horizon
    if traj.horizon != H:
        raise ValueError(f"trajectory horizon {traj.horizon} != instance horizon {H}")
    V, n = inst.net.vertex_count, inst.dim
    errors = np.empty(H)
    for t in range(1, H + 1):
        report = clairvoyant_tail(inst, t, traj.actions[t - 1], settings)
        target = report.window_array(t, t, V, n)[0]
        errors[t - 1] = float(np.linalg.norm(traj.actions[t] - target))
    return errors


@dataclasses.dataclass(frozen=True)
class CompetitiveRatioReport:
    k: int
    r: int
    algorithm_cost: float
    optimal_cost: float
    ratio: float
    bound: CrBound
    params: DecayParams
    algorithm: Trajectory
    optimum: Trajectory


def competitive_ratio(inst: Instance, cfg: LpcConfig,
                      b1: float = 1.0, b2: float = 1.0) -> CompetitiveRatioReport:
    """Measured cost ratio of the controller against the offline optimum.

    Also evaluates the closed-form ceiling for the instance's constants at
    the same (k, r); the ceiling's gate may fail, in which case the bound
    carries value None.
    """
    alg = lpc_run(inst, cfg)
    opt, opt_cost = offline_opt(inst, cfg.settings)
    if opt_cost <= 1e-12:
        raise DegenerateOptimum(f"offline cost {opt_cost:.3e} is numerically zero")
    ratio = alg.cost / opt_cost
    if ratio < 1.0 - 1e-6:
        raise RuntimeError(
            f"measured ratio {ratio:.9f} fell below 1; solver tolerances too loose")
    params = decay_params_for_instance(inst, cfg.k, cfg.r, b1, b2)
    bound = cr_upper_bound(params)
    return CompetitiveRatioReport(
        k=cfg.k, r=cfg.r, algorithm_cost=alg.cost, optimal_cost=opt_cost,
        ratio=ratio, bound=bound, params=params, algorithm=alg, optimum=opt)

"""Problem instances: cost tables on a network plus generators.

An :class:`Instance` owns the full cost data of one finite-horizon problem:
per-(t, v) node costs, per-(t, v) movement costs coupling consecutive
actions, per-(t, e) coupling costs between neighboring agents, and a box
feasible set per (t, v).  Time indices run 1..H; index 0 is the fixed start
``x0``.  Queries past the horizon return the standard continuation problem
(pure quadratic recentering at 0, no couplings, unconstrained), so solvers
never special-case windows that stick out past H.

Generators:

* :func:`random_instance` — seeded quadratic instances whose certified
  convexity/smoothness constants equal the requested ones exactly,
* :func:`pricing_instance` — multiproduct pricing with linear demand, whose
  total cost equals a constant minus revenue,
* :func:`temporal_adversary_instance` — a single agent chasing a jumpy
  target, used for movement-cost lower-bound demos,
* :func:`spatial_onestep_instance` — one-shot quadratic field on a graph
  with a closed-form optimum through the graph Laplacian.
"""

from __future__ import annotations

import dataclasses
import json
from typing import Callable, Mapping, Sequence

import numpy as np

from .costs import (Box, CertificationError, NodeCost, PairCost, certify_node,
                    certify_pair, node_minimizer)
from .graph import Network, from_json_dict as network_from_json_dict
from .graph import laplacian, make_network

__all__ = [
    "Instance",
    "InstanceConstants",
    "InstanceInfeasible",
    "PricingParams",
    "PricingModel",
    "SpatialOneStep",
    "random_instance",
    "pricing_instance",
    "random_pricing_params",
    "temporal_adversary_instance",
    "spatial_onestep_instance",
    "instance_from_config",
]

SCHEMA = "netoco-instance/1"


class InstanceInfeasible(ValueError):
    """A generator's feasibility condition failed; names the offending index."""


@dataclasses.dataclass(frozen=True)
class InstanceConstants:
    mu: float
    l_f: float
    l_T: float
    l_S: float


class Instance:
    """Immutable container of all cost data for one problem.

    node_costs[t-1][v], temporal_costs[t-1][v] (None means identically 0),
    spatial_costs[t-1][edge] (dict keyed by canonical edge; missing means 0),
    boxes[t-1][v], for t = 1..H.
    """

    def __init__(self, net: Network, horizon: int, dim: int, x0,
                 node_costs, temporal_costs, spatial_costs, boxes,
                 mu: float, l_f: float, l_T: float, l_S: float):
        if horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {horizon}")
        if dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        self.net = net
        self.horizon = int(horizon)
        self.dim = int(dim)
        self.x0 = np.asarray(x0, dtype=float).reshape(net.vertex_count, dim).copy()
        self.x0.flags.writeable = False
        self._node = node_costs
        self._temporal = temporal_costs
        self._spatial = spatial_costs
        self._boxes = boxes
        self.mu = float(mu)
        self.l_f = float(l_f)
        self.l_T = float(l_T)
        self.l_S = float(l_S)
        self._theta_cache: dict[tuple[int, int], np.ndarray] = {}
        self._ext_node = NodeCost(self.mu * np.eye(dim), np.zeros(dim), 0.0)
        self._ext_box = Box.unbounded(dim)
        self._check_shapes()

    def _check_shapes(self) -> None:
        V, H = self.net.vertex_count, self.horizon
        for table, name in ((self._node, "node cost"), (self._temporal, "movement cost"),
                            (self._boxes, "box")):
            if len(table) != H or any(len(row) != V for row in table):
                raise ValueError(f"{name} table must be H x V = {H} x {V}")
        if len(self._spatial) != H:
            raise ValueError(f"edge cost table must have {H} time slices")
        edge_set = set(self.net.edges)
        for t0, slice_ in enumerate(self._spatial):
            for e in slice_:
                if e not in edge_set:
                    raise ValueError(f"edge cost at t={t0 + 1} on non-edge {e}")

    # -- accessors (t past the horizon returns the continuation problem) ----

    def node_cost(self, t: int, v: int) -> NodeCost:
        if t < 1:
            raise IndexError(f"time index must be >= 1, got {t}")
        return self._node[t - 1][v] if t <= self.horizon else self._ext_node

    def temporal_cost(self, t: int, v: int) -> PairCost | None:
        if t < 1:
            raise IndexError(f"time index must be >= 1, got {t}")
        return self._temporal[t - 1][v] if t <= self.horizon else None

    def spatial_cost(self, t: int, e: tuple[int, int]) -> PairCost | None:
        if t < 1:
            raise IndexError(f"time index must be >= 1, got {t}")
        if t > self.horizon:
            return None
        u, w = (e[0], e[1]) if e[0] < e[1] else (e[1], e[0])
        return self._spatial[t - 1].get((u, w))

    def spatial_costs_at(self, t: int) -> Mapping[tuple[int, int], PairCost]:
        return self._spatial[t - 1] if 1 <= t <= self.horizon else {}

    def box(self, t: int, v: int) -> Box:
        if t < 1:
            raise IndexError(f"time index must be >= 1, got {t}")
        return self._boxes[t - 1][v] if t <= self.horizon else self._ext_box

    def theta(self, t: int, v: int) -> np.ndarray:
        """Per-node feasible minimizer of the node cost (cached)."""
        if t > self.horizon:
            return np.zeros(self.dim)
        key = (t, v)
        if key not in self._theta_cache:
            self._theta_cache[key] = node_minimizer(self.node_cost(t, v), self.box(t, v))
        return self._theta_cache[key]

    # -- evaluation ----------------------------------------------------------

    def stage_hitting(self, t: int, x) -> float:
        """Node costs plus all same-time edge couplings at time t; x is (V, n)."""
        x = np.asarray(x, dtype=float).reshape(self.net.vertex_count, self.dim)
        if t > self.horizon:
            return float(0.5 * self.mu * np.sum(x * x))
        total = sum(self._node[t - 1][v].value(x[v]) for v in range(self.net.vertex_count))
        for (u, w), cost in self._spatial[t - 1].items():
            total += cost.value_pair(x[u], x[w])
        return float(total)

    def stage_switching(self, t: int, x, x_prev) -> float:
        if t > self.horizon:
            return 0.0
        x = np.asarray(x, dtype=float).reshape(self.net.vertex_count, self.dim)
        x_prev = np.asarray(x_prev, dtype=float).reshape(self.net.vertex_count, self.dim)
        total = 0.0
        for v in range(self.net.vertex_count):
            cost = self._temporal[t - 1][v]
            if cost is not None:
                total += cost.value_pair(x[v], x_prev[v])
        return float(total)

    def trajectory_costs(self, actions) -> tuple[np.ndarray, np.ndarray]:
        """Per-step (hitting, switching) for actions of shape (H+1, V, n)."""
        actions = np.asarray(actions, dtype=float)
        H = self.horizon
        if actions.shape != (H + 1, self.net.vertex_count, self.dim):
            raise ValueError(f"actions must have shape {(H + 1, self.net.vertex_count, self.dim)}, "
                             f"got {actions.shape}")
        hit = np.array([self.stage_hitting(t, actions[t]) for t in range(1, H + 1)])
        switch = np.array([self.stage_switching(t, actions[t], actions[t - 1])
                           for t in range(1, H + 1)])
        return hit, switch

    def total_cost(self, actions) -> float:
        hit, switch = self.trajectory_costs(actions)
        return float(hit.sum() + switch.sum())

    def feasible(self, actions, tol: float = 1e-9) -> bool:
        actions = np.asarray(actions, dtype=float)
        return all(self.box(t, v).contains(actions[t, v], tol)
                   for t in range(1, self.horizon + 1)
                   for v in range(self.net.vertex_count))

    # -- certification -------------------------------------------------------

    def certify(self, tol: float = 1e-9) -> InstanceConstants:
        """Validate every cost against the stored constants; return tight ones.

        Raises CertificationError naming the first offending (t, v) or (t, e).
        """
        V, H = self.net.vertex_count, self.horizon
        mu_seen, lf_seen, lt_seen, ls_seen = np.inf, 0.0, 0.0, 0.0
        for t in range(1, H + 1):
            for v in range(V):
                try:
                    rep = certify_node(self._node[t - 1][v], self._boxes[t - 1][v],
                                       self.mu, self.l_f, tol)
                except CertificationError as exc:
                    raise type(exc)(f"node cost at (t={t}, v={v}): {exc}") from None
                mu_seen = min(mu_seen, rep.eig_min)
                lf_seen = max(lf_seen, rep.eig_max)
                cost = self._temporal[t - 1][v]
                if cost is not None:
                    try:
                        rep = certify_pair(cost, self.l_T, None, tol)
                    except CertificationError as exc:
                        raise type(exc)(f"movement cost at (t={t}, v={v}): {exc}") from None
                    lt_seen = max(lt_seen, rep.eig_max)
            for e, cost in self._spatial[t - 1].items():
                try:
                    rep = certify_pair(cost, self.l_S, None, tol)
                except CertificationError as exc:
                    raise type(exc)(f"edge cost at (t={t}, e={e}): {exc}") from None
                ls_seen = max(ls_seen, rep.eig_max)
        return InstanceConstants(mu=float(mu_seen), l_f=float(lf_seen),
                                 l_T=float(lt_seen), l_S=float(ls_seen))

    # -- serialization -------------------------------------------------------

    def to_json_dict(self) -> dict:
        H, V = self.horizon, self.net.vertex_count
        return {
            "schema": SCHEMA,
            "network": self.net.to_json_dict(),
            "horizon": H,
            "dim": self.dim,
            "constants": {"mu": self.mu, "l_f": self.l_f, "l_T": self.l_T, "l_S": self.l_S},
            "x0": self.x0.tolist(),
            "node_costs": [[self._node[t][v].to_json_dict() for v in range(V)]
                           for t in range(H)],
            "temporal_costs": [[None if self._temporal[t][v] is None
                                else self._temporal[t][v].to_json_dict()
                                for v in range(V)] for t in range(H)],
            "spatial_costs": [[{"edge": list(e), **cost.to_json_dict()}
                               for e, cost in sorted(self._spatial[t].items())]
                              for t in range(H)],
            "boxes": [[self._boxes[t][v].to_json_dict() for v in range(V)]
                      for t in range(H)],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Instance":
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unsupported schema {data.get('schema')!r}, expected {SCHEMA!r}")
        net = network_from_json_dict(data["network"])
        H, V = data["horizon"], net.vertex_count
        node = [[NodeCost.from_json_dict(data["node_costs"][t][v]) for v in range(V)]
                for t in range(H)]
        temporal = [[None if data["temporal_costs"][t][v] is None
                     else PairCost.from_json_dict(data["temporal_costs"][t][v])
                     for v in range(V)] for t in range(H)]
        spatial = [{tuple(entry["edge"]): PairCost.from_json_dict(entry)
                    for entry in data["spatial_costs"][t]} for t in range(H)]
        boxes = [[Box.from_json_dict(data["boxes"][t][v]) for v in range(V)]
                 for t in range(H)]
        consts = data["constants"]
        return cls(net, H, data["dim"], np.asarray(data["x0"], dtype=float),
                   node, temporal, spatial, boxes,
                   consts["mu"], consts["l_f"], consts["l_T"], consts["l_S"])

    def save_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh)

    @classmethod
    def load_json(cls, path) -> "Instance":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


# ---------------------------------------------------------------------------
# random quadratic instances


def _random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    if n == 1:
        return np.ones((1, 1))
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def _spd_with_eigs(rng: np.random.Generator, eigs: np.ndarray) -> np.ndarray:
    q = _random_orthogonal(rng, eigs.shape[0])
    a = (q * eigs) @ q.T
    return 0.5 * (a + a.T)


def random_instance(net: Network, horizon: int, dim: int,
                    mu: float, l_f: float, l_T: float, l_S: float,
                    seed: int, box_low: float = 0.0, box_high: float = 1.0) -> Instance:
    """Seeded instance whose certified constants equal the requested ones.

    One designated node cost realizes both spectrum endpoints (for dim 1,
    two designated slots realize one endpoint each); one designated movement
    cost and one designated edge cost realize the coupling smoothness bounds
    exactly.  All remaining spectra are drawn inside the allowed intervals,
    so recomputing the constants from the data reproduces the request.
    """
    if not (0 < mu <= l_f):
        raise ValueError(f"need 0 < mu <= l_f, got mu={mu}, l_f={l_f}")
    if l_T < 0 or l_S < 0:
        raise ValueError(f"coupling smoothness must be >= 0, got l_T={l_T}, l_S={l_S}")
    if l_S > 0 and not net.edges:
        raise ValueError("l_S > 0 requires a network with at least one edge")
    if dim == 1 and mu < l_f and horizon * net.vertex_count < 2:
        raise ValueError("cannot realize distinct mu and l_f with a single scalar cost")
    rng = np.random.default_rng(seed)
    V, H = net.vertex_count, horizon
    box = Box.interval(box_low, box_high, dim)

    node: list[list[NodeCost]] = []
    for t in range(1, H + 1):
        row = []
        for v in range(V):
            if dim >= 2:
                eigs = (np.linspace(mu, l_f, dim) if (t, v) == (1, 0)
                        else rng.uniform(mu, l_f, dim))
            else:
                if (t, v) == (1, 0):
                    eigs = np.array([mu])
                elif (t, v) == (H, V - 1):
                    eigs = np.array([l_f])
                else:
                    eigs = rng.uniform(mu, l_f, 1)
            theta = rng.uniform(box_low, box_high, dim)
            row.append(NodeCost.centered(_spd_with_eigs(rng, eigs), theta))
        node.append(row)

    temporal: list[list[PairCost | None]] = []
    for t in range(1, H + 1):
        row = []
        for v in range(V):
            if l_T == 0:
                row.append(None)
                continue
            eigs = rng.uniform(0.0, l_T / 2.0, dim)
            if (t, v) == (1, 0):
                eigs[-1] = l_T / 2.0
            row.append(PairCost.weighted_difference(_spd_with_eigs(rng, eigs)))
        temporal.append(row)

    spatial: list[dict[tuple[int, int], PairCost]] = []
    for t in range(1, H + 1):
        slice_: dict[tuple[int, int], PairCost] = {}
        for j, e in enumerate(net.edges):
            if l_S == 0:
                continue
            eigs = rng.uniform(0.0, l_S / 2.0, dim)
            if t == 1 and j == 0:
                eigs[-1] = l_S / 2.0
            sign = 1.0 if rng.random() < 0.5 else -1.0
            slice_[e] = PairCost.weighted_sum(_spd_with_eigs(rng, eigs), sign)
        spatial.append(slice_)

    boxes = [[box for _ in range(V)] for _ in range(H)]
    x0 = rng.uniform(box_low, box_high, (V, dim))
    return Instance(net, H, dim, x0, node, temporal, spatial, boxes, mu, l_f, l_T, l_S)


# ---------------------------------------------------------------------------
# multiproduct pricing


@dataclasses.dataclass
class PricingParams:
    """Linear-demand pricing data on a product network.

    Demand for product v at time t:
        a[t,v] - k[t,v] * x_t^v - sum_u eta[t, e, dir] * x_t^u + b[t,v] * x_{t-1}^v,
    where for canonical edge e = (u, v) with u < v, eta[t, e, 0] scales the
    effect of u's price on v's demand and eta[t, e, 1] the reverse.
    Arrays are indexed t = 0..H-1 for times 1..H.  p_bar entries may be inf.
    """
    net: Network
    horizon: int
    a: np.ndarray
    k: np.ndarray
    b: np.ndarray
    eta: np.ndarray
    p_bar: np.ndarray

    def __post_init__(self):
        H, V, E = self.horizon, self.net.vertex_count, len(self.net.edges)
        for name in ("a", "k", "b", "p_bar"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (H, V):
                raise ValueError(f"{name} must have shape {(H, V)}, got {arr.shape}")
            setattr(self, name, arr)
        self.eta = np.asarray(self.eta, dtype=float)
        if self.eta.shape != (H, E, 2):
            raise ValueError(f"eta must have shape {(H, E, 2)}, got {self.eta.shape}")
        if np.any(self.a <= 0) or np.any(self.k <= 0):
            raise ValueError("nominal demand a and own-elasticity k must be positive")
        if np.any(self.b < 0):
            raise ValueError("carryover coefficients b must be nonnegative")
        if np.any(self.p_bar <= 0):
            raise ValueError("price caps must be positive")

    def gamma(self) -> np.ndarray:
        """Symmetrized cross-elasticity per (t, edge)."""
        return 0.5 * (self.eta[:, :, 0] + self.eta[:, :, 1])

    def xi(self) -> np.ndarray:
        """Own-elasticity margin per (t, v) after subtracting all couplings."""
        H, V = self.horizon, self.net.vertex_count
        gam = np.abs(self.gamma())
        out = self.k.copy()
        for j, (u, w) in enumerate(self.net.edges):
            out[:, u] -= gam[:, j]
            out[:, w] -= gam[:, j]
        b_next = np.vstack([self.b[1:], np.zeros((1, V))])
        out -= 0.5 * (self.b + b_next)
        return out


@dataclasses.dataclass
class PricingModel:
    """A pricing instance together with its revenue-side bookkeeping."""
    params: PricingParams
    instance: Instance
    offset_constant: float  # total cost == offset_constant - revenue
    revenue_eta: float      # margin constant in the revenue-ratio guarantee
    b_tilde: float
    c_tilde: float

    def demand(self, t: int, x, x_prev) -> np.ndarray:
        p = self.params
        x = np.asarray(x, dtype=float).reshape(p.net.vertex_count)
        x_prev = np.asarray(x_prev, dtype=float).reshape(p.net.vertex_count)
        d = p.a[t - 1] - p.k[t - 1] * x + p.b[t - 1] * x_prev
        for j, (u, w) in enumerate(p.net.edges):
            d[w] -= p.eta[t - 1, j, 0] * x[u]
            d[u] -= p.eta[t - 1, j, 1] * x[w]
        return d

    def revenue(self, actions) -> float:
        """Total revenue of a price trajectory with shape (H+1, V) or (H+1, V, 1)."""
        p = self.params
        actions = np.asarray(actions, dtype=float).reshape(p.horizon + 1, p.net.vertex_count)
        total = 0.0
        for t in range(1, p.horizon + 1):
            total += float(actions[t] @ self.demand(t, actions[t], actions[t - 1]))
        return total

    def min_demand(self, actions) -> float:
        """Smallest demand along the trajectory (reported, not enforced)."""
        p = self.params
        actions = np.asarray(actions, dtype=float).reshape(p.horizon + 1, p.net.vertex_count)
        return min(float(self.demand(t, actions[t], actions[t - 1]).min())
                   for t in range(1, p.horizon + 1))


def pricing_instance(params: PricingParams) -> PricingModel:
    """Build the cost-minimization instance equivalent to revenue maximization.

    Starting prices are pinned to 0 and carryover past the horizon is dropped;
    under those conventions the total cost of any feasible price trajectory
    equals ``offset_constant - revenue``.
    """
    net, H, V = params.net, params.horizon, params.net.vertex_count
    xi = params.xi()
    if np.any(xi <= 0):
        t0, v0 = np.argwhere(xi <= 0)[0]
        raise InstanceInfeasible(
            f"own-elasticity margin xi = {xi[t0, v0]:.6g} <= 0 at (t={t0 + 1}, v={v0}): "
            "couplings overwhelm k")
    gam = params.gamma()
    mu = float(2.0 * xi.min())
    l_f = float(2.0 * xi.max())
    l_T = float(2.0 * params.b.max()) if np.any(params.b > 0) else 0.0
    l_S = float(4.0 * np.abs(gam).max()) if gam.size and np.any(gam != 0) else 0.0

    node = [[NodeCost.centered(np.array([[2.0 * xi[t, v]]]),
                               np.array([params.a[t, v] / (2.0 * xi[t, v])]))
             for v in range(V)] for t in range(H)]
    temporal = [[PairCost.weighted_difference(np.array([[params.b[t, v]]]))
                 if params.b[t, v] > 0 else None
                 for v in range(V)] for t in range(H)]
    spatial: list[dict[tuple[int, int], PairCost]] = []
    for t in range(H):
        slice_ = {}
        for j, e in enumerate(net.edges):
            g = gam[t, j]
            if g != 0.0:
                slice_[e] = PairCost.weighted_sum(np.array([[2.0 * abs(g)]]), np.sign(g))
        spatial.append(slice_)
    boxes = [[Box(np.array([0.0]), np.array([params.p_bar[t, v]])) for v in range(V)]
             for t in range(H)]
    inst = Instance(net, H, 1, np.zeros((V, 1)), node, temporal, spatial, boxes,
                    mu, l_f, l_T, l_S)

    offset = float(np.sum(params.a ** 2 / (4.0 * xi)))
    # class-level constants from the raw parameters (not the realized spectra)
    l_f_class = float(2.0 * params.k.max())
    gamma_sup = float(np.abs(params.eta).max()) if params.eta.size else 0.0
    if net.edges:
        ratios = [params.a[:, u] / params.a[:, w] for (u, w) in net.edges]
        ratios += [params.a[:, w] / params.a[:, u] for (u, w) in net.edges]
        b_tilde = float(np.max(ratios))
    else:
        b_tilde = 1.0
    with np.errstate(divide="ignore"):
        cap_ratio = np.where(np.isfinite(params.p_bar), params.a / params.p_bar, 0.0)
    c_tilde = float(cap_ratio.max())
    eta_margin = max(2.0 * (l_f_class + net.max_degree * b_tilde * gamma_sup) / mu,
                     c_tilde / mu)
    return PricingModel(params=params, instance=inst, offset_constant=offset,
                        revenue_eta=eta_margin, b_tilde=b_tilde, c_tilde=c_tilde)


def random_pricing_params(net: Network, horizon: int, seed: int,
                          cap_fraction_inf: float = 0.5) -> PricingParams:
    """Seeded feasible pricing data: couplings scaled until margins stay positive."""
    rng = np.random.default_rng(seed)
    H, V, E = horizon, net.vertex_count, len(net.edges)
    a = rng.uniform(1.0, 3.0, (H, V))
    k = rng.uniform(1.0, 2.0, (H, V))
    deg = max(1, net.max_degree)
    eta = rng.uniform(-0.4, 0.4, (H, E, 2)) / deg
    b = rng.uniform(0.0, 0.3, (H, V))
    p_bar = np.where(rng.random((H, V)) < cap_fraction_inf, np.inf,
                     rng.uniform(2.0, 6.0, (H, V)))
    params = PricingParams(net, H, a, k, b, eta, p_bar)
    floor = 0.05
    while params.xi().min() < floor:
        eta = eta * 0.5
        b = b * 0.5
        params = PricingParams(net, H, a, k, b, eta, p_bar)
    return params


# ---------------------------------------------------------------------------
# lower-bound families


def temporal_adversary_instance(mu: float, l_T: float, horizon: int,
                                seed: int | None = None) -> Instance:
    """Single agent on [0, 1] chasing a jumpy target.

    Node cost (mu/2)(x - theta_t)^2 with movement penalty (l_T/2)(x - y)^2;
    the movement penalty's smoothness on the pair space is 2*l_T, which is
    what the instance certifies.  With seed None the targets alternate 0/1
    (total variation H-1); otherwise they are random corner values, nudged
    to be nonconstant so the offline optimum has positive cost.
    """
    if horizon < 2:
        raise ValueError(f"horizon must be >= 2, got {horizon}")
    if mu <= 0 or l_T < 0:
        raise ValueError("need mu > 0 and l_T >= 0")
    if seed is None:
        theta = np.array([float(t % 2) for t in range(horizon)])
    else:
        rng = np.random.default_rng(seed)
        theta = rng.integers(0, 2, horizon).astype(float)
        if np.all(theta == theta[0]):
            theta[1] = 1.0 - theta[0]
    net = Network(1, [])
    node = [[NodeCost.centered(np.array([[mu]]), np.array([theta[t]]))] for t in range(horizon)]
    temporal = [[PairCost.weighted_difference(np.array([[l_T]])) if l_T > 0 else None]
                for _ in range(horizon)]
    spatial: list[dict] = [{} for _ in range(horizon)]
    boxes = [[Box.interval(0.0, 1.0, 1)] for _ in range(horizon)]
    return Instance(net, horizon, 1, np.zeros((1, 1)), node, temporal, spatial, boxes,
                    mu, mu, 2.0 * l_T, 0.0)


@dataclasses.dataclass
class SpatialOneStep:
    """A one-shot coupled field problem with its closed-form optimum."""
    instance: Instance
    w: np.ndarray
    laplacian: np.ndarray
    x_star: np.ndarray
    opt_cost: float


def spatial_onestep_instance(net: Network, coupling: float,
                             w=None, seed: int | None = None) -> SpatialOneStep:
    """One time step: node costs (x_i + w_i)^2, edge costs coupling*(x_i - x_j)^2.

    The unconstrained optimum is x* = -(I + coupling*L)^{-1} w with L the
    graph Laplacian, and the optimal value is w' (I - (I + coupling*L)^{-1}) w.
    """
    if coupling < 0:
        raise ValueError(f"coupling must be >= 0, got {coupling}")
    V = net.vertex_count
    if w is None:
        if seed is None:
            raise ValueError("provide either w or a seed to draw it")
        w = np.random.default_rng(seed).standard_normal(V)
    w = np.asarray(w, dtype=float).reshape(V)
    node = [[NodeCost.centered(np.array([[2.0]]), np.array([-w[v]])) for v in range(V)]]
    temporal: list[list[None]] = [[None] * V]
    spatial = [{e: PairCost.weighted_difference(np.array([[2.0 * coupling]]))
                for e in net.edges}] if coupling > 0 else [{}]
    boxes = [[Box.unbounded(1) for _ in range(V)]]
    inst = Instance(net, 1, 1, np.zeros((V, 1)), node, temporal, spatial, boxes,
                    2.0, 2.0, 0.0, 4.0 * coupling)
    L = laplacian(net)
    M = np.eye(V) + coupling * L
    x_star = np.linalg.solve(M, -w)
    opt_cost = float(w @ (np.eye(V) - np.linalg.inv(M)) @ w)
    return SpatialOneStep(instance=inst, w=w, laplacian=L, x_star=x_star, opt_cost=opt_cost)


# ---------------------------------------------------------------------------
# config-driven construction


def instance_from_config(cfg: Mapping) -> Instance:
    """Build an instance from a parsed TOML/JSON config mapping.

    cfg["kind"] selects the generator; randomized kinds require cfg["seed"].
    """
    kind = cfg.get("kind")
    if kind == "random":
        for field in ("seed",):
            if field not in cfg:
                raise ValueError(f"config kind 'random' requires '{field}'")
        net = make_network(cfg["graph"], **cfg.get("graph_params", {}))
        return random_instance(
            net, cfg["horizon"], cfg.get("dim", 1),
            cfg["mu"], cfg["l_f"], cfg["l_T"], cfg["l_S"], cfg["seed"],
            box_low=cfg.get("box_low", 0.0), box_high=cfg.get("box_high", 1.0))
    if kind == "pricing-random":
        if "seed" not in cfg:
            raise ValueError("config kind 'pricing-random' requires 'seed'")
        net = make_network(cfg["graph"], **cfg.get("graph_params", {}))
        return pricing_instance(random_pricing_params(net, cfg["horizon"], cfg["seed"])).instance
    if kind == "temporal-adversary":
        return temporal_adversary_instance(cfg["mu"], cfg["l_T"], cfg["horizon"],
                                           cfg.get("seed"))
    if kind == "spatial-onestep":
        if "seed" not in cfg:
            raise ValueError("config kind 'spatial-onestep' requires 'seed'")
        net = make_network(cfg["graph"], **cfg.get("graph_params", {}))
        return spatial_onestep_instance(net, cfg["coupling"], seed=cfg["seed"]).instance
    if kind == "file":
        return Instance.load_json(cfg["path"])
    raise ValueError(f"unknown instance kind {kind!r}")

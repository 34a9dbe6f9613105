"""Quadratic cost family, box feasible sets, and certification.

Every stage cost in the simulator is a quadratic 0.5 z'Az + b'z + c:

* :class:`NodeCost` on a single agent's action (strongly convex),
* :class:`PairCost` on a pair of actions (convex; couples an agent with its
  own previous action, or with a neighbor's simultaneous action),
* :class:`Box` per-coordinate feasible sets with closed-form projection.

``certify`` checks the convexity/smoothness window of the Hessian spectrum
and nonnegativity of the minimum value, raising :class:`NotStronglyConvex`,
:class:`NotSmooth` or :class:`NegativeCost` with the violated clause.
Nonnegativity is required over the feasible box; the global minimum over the
whole space is also reported when it exists (some cost families are
nonnegative everywhere, which is stronger than the simulator needs).
"""

from __future__ import annotations

import dataclasses
from typing import Sequence

import numpy as np

from . import boxqp

__all__ = [
    "Box",
    "NodeCost",
    "PairCost",
    "CertificationReport",
    "CertificationError",
    "NotStronglyConvex",
    "NotSmooth",
    "NegativeCost",
    "CannotCertify",
    "certify_node",
    "certify_pair",
    "node_minimizer",
]

CERT_TOL = 1e-9


class CertificationError(ValueError):
    """Base class for certification failures; names the violated clause."""


class NotStronglyConvex(CertificationError):
    pass


class NotSmooth(CertificationError):
    pass


class NegativeCost(CertificationError):
    pass


class CannotCertify(CertificationError):
    """Nonnegativity could not be decided (unbounded box, singular Hessian)."""


# ---------------------------------------------------------------------------
# feasible sets


class Box:
    """Per-coordinate bounds, either of which may be infinite."""

    __slots__ = ("lower", "upper")

    def __init__(self, lower, upper):
        lo = np.atleast_1d(np.asarray(lower, dtype=float))
        hi = np.atleast_1d(np.asarray(upper, dtype=float))
        if lo.shape != hi.shape:
            raise ValueError(f"bound shapes differ: {lo.shape} vs {hi.shape}")
        if np.any(lo > hi):
            raise ValueError("lower bound exceeds upper bound")
        finite = np.isfinite(lo) & np.isfinite(hi)
        if np.any(finite & (lo >= hi)):
            raise ValueError("box must have nonempty interior where both bounds are finite")
        self.lower = lo
        self.upper = hi
        self.lower.flags.writeable = False
        self.upper.flags.writeable = False

    @classmethod
    def interval(cls, lo: float, hi: float, n: int) -> "Box":
        return cls(np.full(n, float(lo)), np.full(n, float(hi)))

    @classmethod
    def unbounded(cls, n: int) -> "Box":
        return cls(np.full(n, -np.inf), np.full(n, np.inf))

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def is_bounded(self) -> bool:
        return bool(np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper)))

    def project(self, x) -> np.ndarray:
        return np.clip(np.asarray(x, dtype=float), self.lower, self.upper)

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def product(self, other: "Box") -> "Box":
        """Concatenated box over the stacked coordinates."""
        return Box(np.concatenate([self.lower, other.lower]),
                   np.concatenate([self.upper, other.upper]))

    def to_json_dict(self) -> dict:
        none_for_inf = lambda arr: [None if not np.isfinite(v) else float(v) for v in arr]
        return {"lower": none_for_inf(self.lower), "upper": none_for_inf(self.upper)}

    @classmethod
    def from_json_dict(cls, data: dict) -> "Box":
        lo = [-np.inf if v is None else float(v) for v in data["lower"]]
        hi = [np.inf if v is None else float(v) for v in data["upper"]]
        return cls(lo, hi)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Box)
                and np.array_equal(self.lower, other.lower)
                and np.array_equal(self.upper, other.upper))

    def __repr__(self) -> str:  # pragma: no cover
        return f"Box(lower={self.lower!r}, upper={self.upper!r})"


# ---------------------------------------------------------------------------
# quadratics


class _Quadratic:
    """0.5 z'Az + b'z + c with symmetric A."""

    __slots__ = ("A", "b", "c", "_eigs")

    def __init__(self, A, b, c: float = 0.0):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        if A.shape[0] != A.shape[1]:
            raise ValueError(f"Hessian must be square, got {A.shape}")
        if b.shape != (A.shape[0],):
            raise ValueError(f"linear term shape {b.shape} mismatches Hessian {A.shape}")
        if not np.allclose(A, A.T, atol=1e-12, rtol=1e-12):
            raise ValueError("Hessian must be symmetric")
        self.A = 0.5 * (A + A.T)  # exact symmetry for eigvalsh
        self.b = b
        self.c = float(c)
        self.A.flags.writeable = False
        self.b.flags.writeable = False
        self._eigs = None

    @property
    def dim(self) -> int:
        return self.b.shape[0]

    def value(self, z) -> float:
        z = np.asarray(z, dtype=float).reshape(self.dim)
        return float(0.5 * z @ self.A @ z + self.b @ z + self.c)

    def gradient(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float).reshape(self.dim)
        return self.A @ z + self.b

    def hessian(self) -> np.ndarray:
        return self.A

    def eig_bounds(self) -> tuple[float, float]:
        if self._eigs is None:
            w = np.linalg.eigvalsh(self.A)
            self._eigs = (float(w[0]), float(w[-1]))
        return self._eigs

    def to_json_dict(self) -> dict:
        return {"A": self.A.tolist(), "b": self.b.tolist(), "c": self.c}

    def global_min_value(self, tol: float = 1e-9) -> float:
        """Minimum over the whole space: -inf if unbounded below."""
        eig_min, eig_max = self.eig_bounds()
        scale = max(1.0, abs(eig_max), float(np.abs(self.b).max(initial=0.0)))
        if eig_min < -tol * scale:
            return -np.inf
        z, *_ = np.linalg.lstsq(self.A, -self.b, rcond=None)
        if np.linalg.norm(self.A @ z + self.b) > 1e-7 * scale * (1.0 + np.linalg.norm(z)):
            return -np.inf  # linear term has a flat-direction component
        return self.value(z)


class NodeCost(_Quadratic):
    """Per-agent, per-time cost on the agent's own action."""

    @classmethod
    def centered(cls, A, center, offset: float = 0.0) -> "NodeCost":
        """0.5 (x-center)'A(x-center) + offset (nonnegative when offset >= 0)."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        center = np.atleast_1d(np.asarray(center, dtype=float))
        return cls(A, -A @ center, 0.5 * center @ A @ center + offset)

    @classmethod
    def from_json_dict(cls, data: dict) -> "NodeCost":
        return cls(data["A"], data["b"], data.get("c", 0.0))


class PairCost(_Quadratic):
    """Convex quadratic on a stacked pair (x, y) of n-vectors.

    Used for both coupling kinds: y is the same agent's previous action
    (temporal) or a neighboring agent's simultaneous action (spatial).
    """

    def __init__(self, A, b, c: float = 0.0):
        super().__init__(A, b, c)
        if self.dim % 2 != 0:
            raise ValueError(f"pair cost dimension must be even, got {self.dim}")

    @property
    def half_dim(self) -> int:
        return self.dim // 2

    def value_pair(self, x, y) -> float:
        return self.value(np.concatenate([np.atleast_1d(np.asarray(x, dtype=float)),
                                          np.atleast_1d(np.asarray(y, dtype=float))]))

    @classmethod
    def weighted_difference(cls, B) -> "PairCost":
        """0.5 (x-y)'B(x-y): the usual movement penalty."""
        B = np.atleast_2d(np.asarray(B, dtype=float))
        A = np.block([[B, -B], [-B, B]])
        return cls(A, np.zeros(2 * B.shape[0]), 0.0)

    @classmethod
    def weighted_sum(cls, B, sign: float) -> "PairCost":
        """0.5 (x + sign*y)'B(x + sign*y) with sign in {-1, +1}."""
        B = np.atleast_2d(np.asarray(B, dtype=float))
        s = float(np.sign(sign)) or 1.0
        A = np.block([[B, s * B], [s * B, B]])
        return cls(A, np.zeros(2 * B.shape[0]), 0.0)

    @classmethod
    def zero(cls, n: int) -> "PairCost":
        return cls(np.zeros((2 * n, 2 * n)), np.zeros(2 * n), 0.0)

    @classmethod
    def from_json_dict(cls, data: dict) -> "PairCost":
        return cls(data["A"], data["b"], data.get("c", 0.0))


# ---------------------------------------------------------------------------
# certification


@dataclasses.dataclass
class CertificationReport:
    eig_min: float
    eig_max: float
    box_min: float | None
    global_min: float
    nonnegative_on_box: bool
    nonnegative_globally: bool


def _box_min_value(cost: _Quadratic, box: Box, tol: float) -> float | None:
    """Minimum of the quadratic over the box; None when undecidable."""
    eig_min, _ = cost.eig_bounds()
    if eig_min > tol:
        res = boxqp.solve_direct(cost.A, cost.b, box.lower, box.upper, tol=1e-10)
        return cost.value(res.x)
    gmin = cost.global_min_value(tol)
    if gmin > -np.inf:
        if box.is_bounded:
            res = boxqp.solve_projected_gradient(cost.A, cost.b, box.lower, box.upper,
                                                 tol=1e-9, max_iter=200_000,
                                                 accelerated=False)
            return cost.value(res.x)
        # minimum over any subset is at least the global minimum; when the
        # global minimum is already >= 0 that settles nonnegativity
        return None
    if box.is_bounded:
        res = boxqp.solve_projected_gradient(cost.A, cost.b, box.lower, box.upper,
                                             tol=1e-9, max_iter=200_000,
                                             accelerated=False)
        return cost.value(res.x)
    return None


def _certify(cost: _Quadratic, box: Box, eig_lo: float | None, eig_hi: float,
             tol: float) -> CertificationReport:
    eig_min, eig_max = cost.eig_bounds()
    scale = max(1.0, abs(eig_max))
    if eig_lo is not None and eig_min < eig_lo - tol * scale:
        raise NotStronglyConvex(
            f"Hessian minimum eigenvalue {eig_min:.6g} below required {eig_lo:.6g}")
    if eig_lo is None and eig_min < -tol * scale:
        raise NotStronglyConvex(f"Hessian not positive semidefinite: eig_min = {eig_min:.6g}")
    if eig_max > eig_hi + tol * scale:
        raise NotSmooth(
            f"Hessian maximum eigenvalue {eig_max:.6g} above smoothness bound {eig_hi:.6g}")

    gmin = cost.global_min_value(tol)
    bmin = _box_min_value(cost, box, tol)
    value_scale = max(1.0, abs(cost.c))
    if bmin is None:
        if gmin >= -tol * value_scale:
            bmin_effective = gmin
        else:
            raise CannotCertify(
                "nonnegativity undecidable: unbounded feasible set and the quadratic "
                "has no finite global minimum")
    else:
        bmin_effective = bmin
    if bmin_effective < -tol * value_scale:
        raise NegativeCost(
            f"cost attains {bmin_effective:.6g} < 0 on the feasible set")
    return CertificationReport(
        eig_min=eig_min, eig_max=eig_max,
        box_min=bmin, global_min=gmin,
        nonnegative_on_box=True,
        nonnegative_globally=bool(gmin >= -tol * value_scale),
    )


def certify_node(f: NodeCost, box: Box, mu: float, l_f: float,
                 tol: float = CERT_TOL) -> CertificationReport:
    """Check strong convexity >= mu, smoothness <= l_f, nonnegativity on box."""
    if mu <= 0:
        raise NotStronglyConvex(f"required strong convexity mu must be positive, got {mu}")
    if box.dim != f.dim:
        raise ValueError(f"box dimension {box.dim} mismatches cost dimension {f.dim}")
    return _certify(f, box, mu, l_f, tol)


def certify_pair(cost: PairCost, smooth_bound: float, box: Box | None = None,
                 tol: float = CERT_TOL) -> CertificationReport:
    """Check convexity (PSD), smoothness <= bound, nonnegativity on the product box."""
    if box is None:
        box = Box.unbounded(cost.dim)
    if box.dim != cost.dim:
        raise ValueError(f"box dimension {box.dim} mismatches pair dimension {cost.dim}")
    return _certify(cost, box, None, smooth_bound, tol)


def node_minimizer(f: NodeCost, box: Box, tol: float = 1e-11) -> np.ndarray:
    """The unique feasible minimizer of a strongly convex node cost."""
    eig_min, _ = f.eig_bounds()
    if eig_min <= 0:
        raise NotStronglyConvex(f"node cost is not strongly convex: eig_min = {eig_min:.6g}")
    res = boxqp.solve_direct(f.A, f.b, box.lower, box.upper, tol=tol)
    return res.x


def assemble_quadratic(parts: Sequence[tuple[_Quadratic, Sequence[int]]],
                       dim: int) -> _Quadratic:
    """Sum quadratic pieces into one quadratic over `dim` stacked coordinates.

    Each part is a quadratic plus the coordinate indices it acts on.  Used by
    tests as an independently coded evaluator of assembled stage costs.
    """
    A = np.zeros((dim, dim))
    b = np.zeros(dim)
    c = 0.0
    for cost, idx in parts:
        idx = np.asarray(idx, dtype=int)
        A[np.ix_(idx, idx)] += cost.A
        b[idx] += cost.b
        c += cost.c
    return _Quadratic(A, b, c)

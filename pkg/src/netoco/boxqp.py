"""Box-constrained convex quadratic programming primitives.

Two independent routes for  min_x  0.5 x'Qx + q'x  s.t.  lo <= x <= hi:

* ``solve_direct``   -- clamping active-set iteration around exact linear
  solves (finite termination in practice; iteration cap raises
  :class:`SolverDiverged`),
* ``solve_projected_gradient`` -- fixed-step projected gradient, optionally
  with Nesterov momentum, used as the independent cross-check oracle.

Both return a :class:`BoxQpResult` carrying the unit-step fixed-point
residual ||x - clip(x - (Qx+q))|| as the optimality certificate.
Q must be symmetric positive definite (every caller's objective carries a
strongly convex node cost on each variable).
"""

from __future__ import annotations

import dataclasses

import numpy as np
import scipy.linalg


class SolverDiverged(RuntimeError):
    """Iteration cap hit with the residual still above tolerance."""


@dataclasses.dataclass
class BoxQpResult:
    x: np.ndarray
    iterations: int
    residual: float
    method: str


def kkt_residual(Q: np.ndarray, q: np.ndarray, lo: np.ndarray, hi: np.ndarray,
                 x: np.ndarray) -> float:
    """Euclidean norm of the unit-step projected-gradient fixed-point map."""
    g = Q @ x + q
    return float(np.linalg.norm(x - np.clip(x - g, lo, hi)))


def _solve_spd(Q: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        return scipy.linalg.solve(Q, rhs, assume_a="pos")
    except scipy.linalg.LinAlgError:
        # last resort for borderline conditioning
        return np.linalg.lstsq(Q, rhs, rcond=None)[0]


def solve_direct(Q: np.ndarray, q: np.ndarray, lo: np.ndarray, hi: np.ndarray,
                 tol: float = 1e-9, max_iter: int | None = None) -> BoxQpResult:
    """Active-set solve.

    Each pass solves the equality-pinned system on the free variables, then
    clamps every box violation into the active set; once feasible, active
    coordinates whose multiplier has the wrong sign are released.  Interior
    problems finish in a single linear solve.  To rule out add/drop cycling,
    late passes release only the single worst offender.
    """
    m = Q.shape[0]
    if m == 0:
        return BoxQpResult(np.zeros(0), 0, 0.0, "direct")
    if max_iter is None:
        max_iter = 100 + 10 * m

    if not (np.any(np.isfinite(lo)) or np.any(np.isfinite(hi))):
        x = _solve_spd(Q, -q)
        return BoxQpResult(x, 1, kkt_residual(Q, q, lo, hi, x), "direct")

    active_lo = np.zeros(m, dtype=bool)
    active_hi = np.zeros(m, dtype=bool)

    for it in range(1, max_iter + 1):
        x = np.empty(m)
        x[active_lo] = lo[active_lo]
        x[active_hi] = hi[active_hi]
        free = ~(active_lo | active_hi)
        if np.any(free):
            pinned = ~free
            rhs = -q[free].copy()
            if np.any(pinned):
                rhs -= Q[np.ix_(free, pinned)] @ x[pinned]
            x[free] = _solve_spd(Q[np.ix_(free, free)], rhs)

        below = free & (x < lo)
        above = free & (x > hi)
        if np.any(below) or np.any(above):
            active_lo |= below
            active_hi |= above
            continue

        g = Q @ x + q
        scale = 1.0 + float(np.abs(g).max(initial=0.0))
        # multiplier sign test: a lower face needs g >= 0, an upper face g <= 0;
        # release faces violating that (the objective improves moving inward)
        drop_lo = active_lo & (g < -tol * scale)
        drop_hi = active_hi & (g > tol * scale)
        if np.any(drop_lo) or np.any(drop_hi):
            if it > m + 20:
                # anti-cycling: release only the worst violator
                viol = np.where(drop_lo, -g, 0.0) + np.where(drop_hi, g, 0.0)
                worst = int(np.argmax(viol))
                drop_lo = np.zeros(m, dtype=bool)
                drop_hi = np.zeros(m, dtype=bool)
                if active_lo[worst]:
                    drop_lo[worst] = True
                else:
                    drop_hi[worst] = True
            active_lo &= ~drop_lo
            active_hi &= ~drop_hi
            continue

        x = np.clip(x, lo, hi)  # remove solve round-off on the faces
        return BoxQpResult(x, it, kkt_residual(Q, q, lo, hi, x), "direct")

    raise SolverDiverged(
        f"active-set iteration cap {max_iter} hit (dim {m}); residual above tolerance")


def solve_projected_gradient(Q: np.ndarray, q: np.ndarray, lo: np.ndarray,
                             hi: np.ndarray, tol: float = 1e-10,
                             max_iter: int = 2_000_000,
                             accelerated: bool = False,
                             x0: np.ndarray | None = None) -> BoxQpResult:
    """Projected gradient with step 1/L; optional Nesterov momentum for
    strongly convex objectives.  Converges for any PSD Q on a nonempty box."""
    m = Q.shape[0]
    if m == 0:
        return BoxQpResult(np.zeros(0), 0, 0.0, "projected-gradient")
    eigs = np.linalg.eigvalsh(Q)
    L = float(eigs[-1])
    mu = float(max(eigs[0], 0.0))
    if L <= 0.0:
        x = np.clip(np.zeros(m) if x0 is None else x0, lo, hi)
        return BoxQpResult(x, 0, kkt_residual(Q, q, lo, hi, x), "projected-gradient")
    step = 1.0 / L
    beta = 0.0
    if accelerated and mu > 0.0:
        sl, sm = np.sqrt(L), np.sqrt(mu)
        beta = (sl - sm) / (sl + sm)

    x = np.clip(np.zeros(m) if x0 is None else np.asarray(x0, dtype=float), lo, hi)
    y = x.copy()
    check_every = 16
    for it in range(1, max_iter + 1):
        g = Q @ y + q
        x_new = np.clip(y - step * g, lo, hi)
        y = x_new + beta * (x_new - x) if beta else x_new
        x = x_new
        if it % check_every == 0 or it == max_iter:
            res = kkt_residual(Q, q, lo, hi, x)
            if res <= tol:
                return BoxQpResult(x, it, res, "projected-gradient")
    res = kkt_residual(Q, q, lo, hi, x)
    if res <= tol:
        return BoxQpResult(x, max_iter, res, "projected-gradient")
    raise SolverDiverged(
        f"projected gradient cap {max_iter} hit (dim {m}); residual {res:.3e} > tol {tol:.1e}")

"""Closed-form decay factors, constants, and the inequalities linking them.

Everything here is exact arithmetic on the instance-level constants
(mu, l_f, l_T, l_S, max degree, boundary growth h): the per-window
perturbation-decay factors and their two constant variants (the always-valid
"basic" one and the sharper series-based "tight" one), the global decay pair,
the explicit competitive-ratio ceiling with its largeness gate, the
lower-bound decay factors, the augmentation inequalities between upper and
lower factors, and the elementwise floor for inverses (I + l*L)^{-1} of
scaled graph Laplacians.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable, Sequence

from .graph import Network, laplacian  # noqa: F401  (laplacian re-exported for demos)

__all__ = [
    "HypothesisViolated",
    "DistanceTooSmall",
    "BasicDecay",
    "TightDecay",
    "GlobalDecay",
    "LowerBoundFactors",
    "DecayParams",
    "CrBound",
    "AugmentationVerdicts",
    "LaplacianFloor",
    "decay_basic",
    "decay_tight",
    "decay_global",
    "lower_bound_factors",
    "c3",
    "compute_decay_params",
    "decay_params_for_instance",
    "cr_upper_bound",
    "augmentation_relations",
    "laplacian_decay_floor",
    "geometric_b_pair",
]

SERIES_CUTOFF = 1e-15
SERIES_MAX_TERMS = 200_000


class HypothesisViolated(ValueError):
    """A theorem hypothesis failed; the message names which one."""


class DistanceTooSmall(ValueError):
    """The Laplacian floor only covers vertex pairs at hop distance >= 3."""


HFunc = Callable[[int], float]


def _as_h_func(h) -> HFunc:
    """Accept h as a callable or as a finite sequence (zero past the end)."""
    if callable(h):
        return lambda g: float(h(g))
    seq = [float(v) for v in h]
    return lambda g: seq[g] if 0 <= g < len(seq) else 0.0


def _weighted_series(h: HFunc, x: float, label: str) -> float:
    """Sum of x^gamma * h(gamma) for gamma >= 0, or HypothesisViolated.

    Terms are accumulated until three consecutive terms drop below the
    cutoff relative to the running total; a long non-decreasing run of
    sizable terms (the ratio test, in effect) flags divergence early.
    """
    total = 0.0
    small_run = 0
    rising_run = 0
    prev = math.inf
    power = 1.0
    for gamma in range(SERIES_MAX_TERMS):
        try:
            term = power * h(gamma)
        except OverflowError:
            raise HypothesisViolated(f"series {label} diverges (term overflow)") from None
        if not math.isfinite(term) or total > 1e150:
            raise HypothesisViolated(f"series {label} diverges (terms blow up)")
        total += term
        if term <= SERIES_CUTOFF * max(1.0, total):
            small_run += 1
            if small_run >= 3:
                return total
        else:
            small_run = 0
        rising_run = rising_run + 1 if term >= prev and term > SERIES_CUTOFF else 0
        if rising_run >= 1000:
            raise HypothesisViolated(f"series {label} diverges (terms stopped decreasing)")
        prev = term
        power *= x
    raise HypothesisViolated(f"series {label} did not converge within {SERIES_MAX_TERMS} terms")


# ---------------------------------------------------------------------------
# decay factors


@dataclasses.dataclass(frozen=True)
class BasicDecay:
    rho_T: float
    rho_S: float
    c1: float
    c2: float


def decay_basic(mu: float, l_T: float, l_S: float, delta: int) -> BasicDecay:
    """Always-valid decay factors and constants for the local window problem."""
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    rho_T = math.sqrt(1.0 - 2.0 / (math.sqrt(1.0 + 2.0 * l_T / mu) + 1.0))
    rho_S = math.sqrt(1.0 - 2.0 / (math.sqrt(1.0 + delta * l_S / mu) + 1.0))
    c = 2.0 * math.sqrt(delta * l_S * l_T) / mu
    return BasicDecay(rho_T=rho_T, rho_S=rho_S, c1=c, c2=c)


@dataclasses.dataclass(frozen=True)
class TightDecay:
    rho_T: float
    rho_S: float
    c1: float
    c2: float
    a: float
    a_tilde: float
    gamma_S: float
    hypotheses: tuple[tuple[str, bool], ...]


def decay_tight(mu: float, l_T: float, l_S: float, delta: int, h,
                b1: float, b2: float) -> TightDecay:
    """Sharper decay factors valid under the series and margin hypotheses.

    h is the boundary-growth profile (sequence or callable); b1, b2 > 0 are
    the free weights trading the two decay factors against each other.
    Raises HypothesisViolated naming the failed hypothesis.
    """
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    if b1 <= 0 or b2 <= 0:
        raise ValueError(f"need b1, b2 > 0, got b1={b1}, b2={b2}")
    hf = _as_h_func(h)
    a = _weighted_series(hf, (1.0 + b1) / (1.0 + b1 + b2), "a")
    a_tilde = _weighted_series(hf, 1.0 / (1.0 + b1), "a~")
    checks = [("a finite", True), ("a~ finite", True)]

    margin_T = 8.0 * a_tilde * l_T
    margin_S = delta * l_S * (b1 + b2) / 4.0
    ok_T = mu >= margin_T
    ok_S = mu >= margin_S
    checks += [("mu >= 8*a~*l_T", ok_T), ("mu >= Delta*l_S*(b1+b2)/4", ok_S)]
    if not ok_T:
        raise HypothesisViolated(
            f"mu = {mu:.6g} < 8*a~*l_T = {margin_T:.6g}")
    if not ok_S:
        raise HypothesisViolated(
            f"mu = {mu:.6g} < Delta*l_S*(b1+b2)/4 = {margin_S:.6g}")

    s = math.sqrt(1.0 + delta * l_S / mu)
    gamma_S = (s - 1.0) / (s + 1.0)
    rho_T = 4.0 * a_tilde * l_T / mu
    rho_S = (1.0 + b1 + b2) * gamma_S
    denom = 1.0 - 4.0 * a_tilde * l_T / mu
    first = a * a / (2.0 * a_tilde * denom)
    if delta * l_S == 0:
        second = 0.0
    else:
        second = (2.0 * a * a * delta * l_S / mu) / (gamma_S * (1.0 + b1 + b2) * denom)
    c = max(first, second)
    return TightDecay(rho_T=rho_T, rho_S=rho_S, c1=c, c2=c, a=a, a_tilde=a_tilde,
                      gamma_S=gamma_S, hypotheses=tuple(checks))


def geometric_b_pair(delta: int) -> tuple[float, float]:
    """The weight pair that turns h(gamma) = Delta^gamma into a = a~ = 2."""
    return 2.0 * delta - 1.0, 4.0 * delta * delta - 2.0 * delta


@dataclasses.dataclass(frozen=True)
class GlobalDecay:
    rho_G: float
    c_G: float
    c0: float


def decay_global(mu: float, l_T: float) -> GlobalDecay:
    """Decay of the globally pinned problem in the window length."""
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    rho_G = 1.0 - 2.0 / (math.sqrt(1.0 + 2.0 * l_T / mu) + 1.0)
    c_G = 2.0 * l_T / mu
    return GlobalDecay(rho_G=rho_G, c_G=c_G, c0=max(1.0, c_G))


@dataclasses.dataclass(frozen=True)
class LowerBoundFactors:
    lambda_T: float
    lambda_S: float
    lambda_S_branch: str          # "below-threshold" | "max-first" | "max-second"
    lambda_S_second: float | None  # the large-coupling arm, once it applies
    spatial_construction_ok: bool  # the lambda_S statement needs max degree >= 3


def lower_bound_factors(mu: float, l_T: float, l_S: float,
                        delta: int) -> LowerBoundFactors:
    """Decay factors appearing in the impossibility results."""
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    lam_T = (1.0 - 2.0 / (math.sqrt(1.0 + 4.0 * l_T / mu) + 1.0)) ** 2
    x = delta * l_S / mu
    first = x / (3.0 + 3.0 * x)
    if x < 48.0:
        lam_S, branch, second = first, "below-threshold", None
    else:
        second = (1.0 - 4.0 * math.sqrt(3.0) / math.sqrt(x)) ** 2
        lam_S = max(first, second)
        branch = "max-first" if first >= second else "max-second"
    return LowerBoundFactors(lambda_T=lam_T, lambda_S=lam_S, lambda_S_branch=branch,
                             lambda_S_second=second,
                             spatial_construction_ok=delta >= 3)


def c3(h, rho_S: float, r: int) -> float:
    """Windowed boundary-growth sum: sum over gamma=0..r of h(gamma)*rho_S^gamma."""
    if not (0.0 <= rho_S < 1.0):
        raise ValueError(f"need rho_S in [0, 1), got {rho_S}")
    if r < 0:
        raise ValueError(f"need r >= 0, got {r}")
    hf = _as_h_func(h)
    return sum(hf(g) * rho_S ** g for g in range(r + 1))


# ---------------------------------------------------------------------------
# assembled parameter bundle


@dataclasses.dataclass(frozen=True)
class DecayParams:
    """Every constant of the analysis for one parameter set.

    The basic variant (rho_T, rho_S, c1, c2) always exists; the tight variant
    is None when its hypotheses fail, with the reasons in tight_failure.
    """
    # inputs
    mu: float
    l_f: float
    l_T: float
    l_S: float
    delta: int
    b1: float
    b2: float
    k: int
    r: int
    h_values: tuple[float, ...]
    # basic variant
    rho_T: float
    rho_S: float
    c1: float
    c2: float
    # tight variant (None when hypotheses fail)
    tight: TightDecay | None
    tight_failure: str | None
    # global decay
    rho_G: float
    c_G: float
    c0: float
    # lower bounds
    lambda_T: float
    lambda_S: float
    # window sums
    c3_r: float

    def h(self, gamma: int) -> float:
        return self.h_values[gamma] if 0 <= gamma < len(self.h_values) else 0.0


def compute_decay_params(mu: float, l_f: float, l_T: float, l_S: float,
                         delta: int, h, k: int, r: int,
                         b1: float = 1.0, b2: float = 1.0) -> DecayParams:
    """Evaluate every derived constant for one (instance, k, r) parameter set."""
    hf = _as_h_func(h)
    h_values = tuple(hf(g) for g in range(max(r, 0) + 1))
    basic = decay_basic(mu, l_T, l_S, delta)
    glob = decay_global(mu, l_T)
    lower = lower_bound_factors(mu, l_T, l_S, delta)
    try:
        tight = decay_tight(mu, l_T, l_S, delta, h, b1, b2)
        tight_failure = None
    except HypothesisViolated as exc:
        tight = None
        tight_failure = str(exc)
    return DecayParams(
        mu=mu, l_f=l_f, l_T=l_T, l_S=l_S, delta=delta, b1=b1, b2=b2, k=k, r=r,
        h_values=h_values,
        rho_T=basic.rho_T, rho_S=basic.rho_S, c1=basic.c1, c2=basic.c2,
        tight=tight, tight_failure=tight_failure,
        rho_G=glob.rho_G, c_G=glob.c_G, c0=glob.c0,
        lambda_T=lower.lambda_T, lambda_S=lower.lambda_S,
        c3_r=c3(h, basic.rho_S, r),
    )


def decay_params_for_instance(inst, k: int, r: int,
                              b1: float = 1.0, b2: float = 1.0) -> DecayParams:
    """Constants for a concrete instance: degree and h measured from its network."""
    net = inst.net
    growth = net.boundary_growth(max(r, int(net.diameter) if net.is_connected else r))
    return compute_decay_params(inst.mu, inst.l_f, inst.l_T, inst.l_S,
                                net.max_degree, growth, k, r, b1, b2)


# ---------------------------------------------------------------------------
# competitive-ratio ceiling


@dataclasses.dataclass(frozen=True)
class CrBound:
    k: int
    r: int
    gate_lhs: float
    gate_ok: bool
    value: float | None   # None when the largeness gate fails
    spatial_term: float | None
    temporal_term: float | None


def cr_upper_bound(params: DecayParams, k: int | None = None,
                   r: int | None = None) -> CrBound:
    """Explicit competitive-ratio ceiling, gated on (k, r) being large enough.

    A failed gate is reported in the return value, not raised: the ceiling
    simply does not apply there.
    """
    k = params.k if k is None else k
    r = params.r if r is None else r
    if k < 2 or r < 1:
        raise ValueError(f"need k >= 2 and r >= 1, got k={k}, r={r}")
    rho_T, rho_S = params.rho_T, params.rho_S
    rho_G, c0, c1 = params.rho_G, params.c0, params.c1
    hr = params.h(r)
    c3r = c3(params.h_values, rho_S, r)

    gate_lhs = (4.0 * c1 ** 2 * c0 ** 4 / (1.0 - rho_G) ** 2) * (
        hr ** 2 * rho_G ** 2 / ((1.0 - rho_T) * (1.0 - rho_G ** 2 * rho_T)) * rho_S ** (2 * r)
        + c3r ** 2 * rho_T ** (2 * (k - 1)) * rho_G ** (2 * k))
    if gate_lhs > 0.5:
        return CrBound(k=k, r=r, gate_lhs=gate_lhs, gate_ok=False,
                       value=None, spatial_term=None, temporal_term=None)

    shared = 32.0 * c0 ** 2 * c1 ** 2 * (params.l_f + params.delta * params.l_S
                                         + 2.0 * params.l_T) / (params.mu * (1.0 - rho_G) ** 2)
    spatial = (1.0 + shared * hr ** 2 / (1.0 - rho_T) ** 2) * rho_S ** r
    temporal = (1.0 + shared * c3r ** 2) * rho_T ** (k - 1)
    return CrBound(k=k, r=r, gate_lhs=gate_lhs, gate_ok=True,
                   value=1.0 + spatial + temporal,
                   spatial_term=spatial, temporal_term=temporal)


# ---------------------------------------------------------------------------
# relations between upper and lower decay factors


@dataclasses.dataclass(frozen=True)
class AugmentationVerdicts:
    rho_T: float
    rho_S: float
    lambda_T: float
    lambda_S: float
    temporal_lower_ok: bool   # rho_T^4 <= lambda_T
    temporal_upper_ok: bool   # lambda_T <= rho_T^2
    spatial_ok: bool          # rho_S^32 <= lambda_S
    temporal_lower_margin: float
    temporal_upper_margin: float
    spatial_margin: float


def augmentation_relations(mu: float, l_T: float, l_S: float,
                           delta: int) -> AugmentationVerdicts:
    """How far the achievable decay factors sit from the impossibility ones."""
    basic = decay_basic(mu, l_T, l_S, delta)
    lower = lower_bound_factors(mu, l_T, l_S, delta)
    t_low = lower.lambda_T - basic.rho_T ** 4
    t_up = basic.rho_T ** 2 - lower.lambda_T
    s_m = lower.lambda_S - basic.rho_S ** 32
    return AugmentationVerdicts(
        rho_T=basic.rho_T, rho_S=basic.rho_S,
        lambda_T=lower.lambda_T, lambda_S=lower.lambda_S,
        temporal_lower_ok=t_low >= 0.0, temporal_upper_ok=t_up >= 0.0,
        spatial_ok=s_m >= 0.0,
        temporal_lower_margin=t_low, temporal_upper_margin=t_up, spatial_margin=s_m)


# ---------------------------------------------------------------------------
# Laplacian inverse floor


@dataclasses.dataclass(frozen=True)
class LaplacianFloor:
    i: int
    j: int
    kappa: int
    half_degree: int
    first_claim: float
    second_claim: float | None   # only when the coupling exceeds 16/half_degree


def laplacian_decay_floor(net: Network, coupling: float, i: int, j: int) -> LaplacianFloor:
    """Elementwise lower bound for ((I + coupling*L)^{-1})_{ij}.

    Applies to the regular block-ring family (max degree 2d); pairs closer
    than 3 hops raise DistanceTooSmall.
    """
    if coupling < 0:
        raise ValueError(f"coupling must be >= 0, got {coupling}")
    dist = net.distance(i, j)
    if not math.isfinite(dist):
        raise ValueError(f"vertices {i} and {j} are disconnected")
    kappa = int(dist)
    if kappa < 3:
        raise DistanceTooSmall(f"pair ({i}, {j}) at distance {kappa} < 3")
    d = net.max_degree // 2
    if d < 1:
        raise ValueError("network must have max degree >= 2")
    dl = d * coupling
    first = kappa / (d * d * (2.0 * dl + 1.0)) * (dl / (2.0 * dl + 1.0)) ** kappa
    second = None
    if coupling > 16.0 / d:
        second = (1.0 / (4.0 * math.sqrt(math.pi * kappa * math.sqrt(dl))
                         * d * d * (2.0 * dl + 1.0))
                  * (1.0 - 4.0 / math.sqrt(dl)) ** kappa)
    return LaplacianFloor(i=i, j=j, kappa=kappa, half_degree=d,
                          first_claim=first, second_claim=second)

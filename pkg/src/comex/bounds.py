"""Closed-form upper bounds on expected group regret and communication
cost for the three analyzed variants, plus the tail-probability and
tail-sum bounds they rest on.

The greedy clique-cover / dominating-set counts stand in for the exact
NP-hard numbers; since the surrogates are never smaller, the computed
values stay valid upper bounds (only looser).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .env import BanditEnv
from .graph import Topology, analyze

BOUND_VARIANTS = ("ucb_share", "mp_ucb", "lf_ucb")

SURROGATE_NOTE = (
    "cover and dominating numbers are greedy upper bounds; "
    "each reported value upper-bounds the exact theorem value"
)


@dataclass(frozen=True)
class BoundInputs:
    gaps: tuple[float, ...]
    optimal_index: int
    min_gap: float | None
    sigma: float
    xi: float
    horizon: float
    n_agents: int
    gamma: int
    chi_hat: int
    gammabar_hat: int
    degrees: tuple[int, ...]  # base graph G
    degrees_gamma: tuple[int, ...]  # power graph G_gamma
    degrees_gamma_minus_plus: tuple[int, ...]  # d_{gamma-1}^(i) + 1
    zeta: float = 1.3

    def __post_init__(self):
        if self.xi < 1.1:
            raise ValueError(f"theorems require xi >= 1.1, got {self.xi}")
        if self.zeta <= 1:
            raise ValueError(f"zeta must be > 1, got {self.zeta}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")

    @property
    def suboptimal_gaps(self) -> list[float]:
        return [g for k, g in enumerate(self.gaps) if k != self.optimal_index]

    @property
    def n_arms(self) -> int:
        return len(self.gaps)


def bound_inputs(env: BanditEnv, topo: Topology, gamma: int, xi: float, horizon: float, zeta: float = 1.3) -> BoundInputs:
    """Assemble bound inputs from an environment and a topology."""
    a = analyze(topo, gamma)
    if gamma >= 2:
        d_minus = analyze(topo, gamma - 1).degrees_gamma
    else:
        d_minus = (0,) * topo.n  # zeroth power has no edges
    return BoundInputs(
        gaps=env.gaps,
        optimal_index=env.optimal_index,
        min_gap=env.min_gap,
        sigma=env.sigma,
        xi=xi,
        horizon=horizon,
        n_agents=topo.n,
        gamma=gamma,
        chi_hat=a.chi_hat,
        gammabar_hat=a.gammabar_hat,
        degrees=topo.degree,
        degrees_gamma=a.degrees_gamma,
        degrees_gamma_minus_plus=tuple(d + 1 for d in d_minus),
        zeta=zeta,
    )


def g_term(m: float, degrees) -> float:
    """g(M, d) = M + sum_i (12 log(3(d_i+1)) + 3 log(d_i+1))."""
    d = np.asarray(degrees, dtype=float)
    if (d < 0).any():
        raise ValueError("degrees must be nonnegative")
    return float(m + (12.0 * np.log(3.0 * (d + 1.0)) + 3.0 * np.log(d + 1.0)).sum())


def _check_variant(variant: str, b: BoundInputs) -> None:
    if variant not in BOUND_VARIANTS:
        raise ValueError(f"no closed-form bound for variant {variant!r}")
    if variant == "ucb_share" and b.gamma != 1:
        raise ValueError("ucb_share bounds use gamma=1 quantities")
    if any(g <= 0 for g in b.suboptimal_gaps):
        raise ValueError("every suboptimal gap must be > 0")


def regret_bound(variant: str, b: BoundInputs) -> float:
    """Upper bound on expected cumulative group regret at the horizon."""
    _check_variant(variant, b)
    sub = b.suboptimal_gaps
    log_t = math.log(b.horizon)
    lead_unit = sum(8.0 * (b.xi + 1.0) * b.sigma / g for g in sub)
    sum_gaps = sum(sub)
    if variant == "ucb_share":
        return lead_unit * b.chi_hat * log_t + sum_gaps * g_term(4.0 * b.n_agents, b.degrees)
    if variant == "mp_ucb":
        delay = (b.n_agents - b.chi_hat) * (b.gamma - 1)
        return lead_unit * b.chi_hat * log_t + sum_gaps * (delay + g_term(4.0 * b.n_agents, b.degrees_gamma))
    delay = (b.n_agents - b.gammabar_hat) * (3 * b.gamma - 1)
    return lead_unit * b.gammabar_hat * log_t + sum_gaps * (
        delay + b.gammabar_hat * g_term(4.0 * b.n_agents, b.degrees_gamma)
    )


def comm_bound(variant: str, b: BoundInputs) -> float:
    """Upper bound on expected group communication cost at the horizon."""
    _check_variant(variant, b)
    if b.min_gap is None:
        raise ValueError("communication bound needs a positive minimum gap")
    sub = b.suboptimal_gaps
    log_t = math.log(b.horizon)
    k = b.n_arms
    n = b.n_agents
    cover = b.gammabar_hat if variant == "lf_ucb" else b.chi_hat
    log_part = (
        8.0 * (b.xi + 1.0) * b.sigma * (n / b.min_gap**2 + sum(cover / g**2 for g in sub)) * log_t
    )
    if variant == "ucb_share":
        return log_part + k * g_term(7.0 * n, b.degrees)
    relay = sum(b.degrees_gamma_minus_plus)
    if variant == "mp_ucb":
        delay = k * (n - b.chi_hat) * (b.gamma - 1)
        return (log_part + delay) * relay + k * relay * g_term(7.0 * n, b.degrees_gamma)
    # lf_ucb delay term, clamped at zero for large gamma
    delay = k * max(0.0, n - 3.0 * b.gammabar_hat * (b.gamma - 1))
    return (log_part + delay) * relay + k * relay * b.gammabar_hat * g_term(7.0 * n, b.degrees_gamma)


def comm_cap(b: BoundInputs) -> float:
    """Hard cap on communication cost: every agent relaying every step."""
    return b.horizon * sum(b.degrees_gamma_minus_plus)


def comm_bound_capped(variant: str, b: BoundInputs) -> float:
    """min(theorem bound, hard cap); what acceptance checks use."""
    return min(comm_bound(variant, b), comm_cap(b))


def tail_bound(t: float, xi: float, degree_bound: float, zeta: float = 1.3, clamp: bool = False) -> float:
    """Bound on P(|empirical mean - true mean| >= confidence width):
    (1/log zeta) * log((d+1) t) / t^((xi+1)(1 - (zeta-1)^2/16))."""
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    if zeta <= 1:
        raise ValueError(f"zeta must be > 1, got {zeta}")
    if xi < 1.1:
        raise ValueError(f"tail bound requires xi >= 1.1, got {xi}")
    if degree_bound < 0:
        raise ValueError(f"degree must be >= 0, got {degree_bound}")
    exponent = (xi + 1.0) * (1.0 - (zeta - 1.0) ** 2 / 16.0)
    val = math.log((degree_bound + 1.0) * t) / (math.log(zeta) * t**exponent)
    return min(val, 1.0) if clamp else val


def tail_sum_bound(degree_bound: float) -> float:
    """Closed-form bound on the tail-probability series (zeta = 1.3):
    12 log(3(d+1)) + 3 (log(d+1) + 1)."""
    if degree_bound < 0:
        raise ValueError(f"degree must be >= 0, got {degree_bound}")
    d1 = degree_bound + 1.0
    return 12.0 * math.log(3.0 * d1) + 3.0 * (math.log(d1) + 1.0)


def regret_bound_complete_modified(b: BoundInputs, n_agents: float) -> float:
    """Regret bound for the modified index on a complete graph:
    sum_k 8(xi+1) sigma / Delta_k * log(T N) + (N+3) sum Delta_k
    + (1/N) sum_i (12 log(3(d_i+1)) + 3 log(d_i+1)) * sum Delta_k."""
    if any(d != b.n_agents - 1 for d in b.degrees):
        raise ValueError("modified bound applies to complete graphs only")
    sub = b.suboptimal_gaps
    if any(g <= 0 for g in sub):
        raise ValueError("every suboptimal gap must be > 0")
    lead = sum(8.0 * (b.xi + 1.0) * b.sigma / g for g in sub) * math.log(b.horizon * n_agents)
    sum_gaps = sum(sub)
    tail = g_term(0.0, b.degrees) / b.n_agents
    return lead + (n_agents + 3.0) * sum_gaps + tail * sum_gaps

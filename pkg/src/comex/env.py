"""Bandit environments: arm distributions, reward sampling and gap structure.

Arms are sub-Gaussian reward distributions.  Three kinds are supported:
``gaussian(mean, variance)``, ``triangular01(mode)`` (triangular on [0, 1])
and ``bernoulli(p)``.  The environment exposes the per-arm means, the gaps
to the best arm and a common variance-proxy upper bound ``sigma`` used by
the UCB policies and the bound calculators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

KINDS = ("gaussian", "triangular01", "bernoulli")

# Any [0,1]-bounded reward is sub-Gaussian with proxy 1/2 (Hoeffding).
BOUNDED_PROXY = 0.5


@dataclass(frozen=True)
class ArmSpec:
    """One arm's reward distribution."""

    kind: str
    mean: float | None = None
    variance: float | None = None
    mode: float | None = None
    p: float | None = None

    def __post_init__(self):
        if self.kind == "gaussian":
            if self.mean is None or self.variance is None:
                raise ValueError("gaussian arm needs mean and variance")
            if self.variance < 0:
                raise ValueError(f"gaussian variance must be >= 0, got {self.variance}")
        elif self.kind == "triangular01":
            if self.mode is None or not 0.0 <= self.mode <= 1.0:
                raise ValueError(f"triangular01 mode must be in [0, 1], got {self.mode}")
        elif self.kind == "bernoulli":
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise ValueError(f"bernoulli p must be in [0, 1], got {self.p}")
        else:
            raise ValueError(f"unknown arm kind {self.kind!r}, expected one of {KINDS}")


def gaussian(mean: float, variance: float) -> ArmSpec:
    return ArmSpec("gaussian", mean=mean, variance=variance)


def triangular01(mode: float) -> ArmSpec:
    return ArmSpec("triangular01", mode=mode)


def bernoulli(p: float) -> ArmSpec:
    return ArmSpec("bernoulli", p=p)


def arm_mean(spec: ArmSpec) -> float:
    """Analytic mean of the arm's distribution."""
    if spec.kind == "gaussian":
        return spec.mean
    if spec.kind == "triangular01":
        # mean of a triangular(0, c, 1) distribution
        return (0.0 + 1.0 + spec.mode) / 3.0
    return spec.p


def arm_default_proxy(spec: ArmSpec) -> float:
    """Default sub-Gaussian variance-proxy bound (as a standard deviation)."""
    if spec.kind == "gaussian":
        return math.sqrt(spec.variance)
    return BOUNDED_PROXY


@dataclass(frozen=True)
class BanditEnv:
    """Immutable K-armed environment; safe to share across concurrent runs."""

    arms: tuple[ArmSpec, ...]
    sigma: float
    means: tuple[float, ...]
    optimal_index: int
    gaps: tuple[float, ...]
    min_gap: float | None

    @property
    def n_arms(self) -> int:
        return len(self.arms)


def make_env(specs: list[ArmSpec] | tuple[ArmSpec, ...], sigma_override: float | None = None) -> BanditEnv:
    """Build a BanditEnv from arm specs.

    ``sigma`` defaults to the largest per-arm default proxy; an explicit
    override must not fall below any arm's default proxy.  Ties for the
    best arm resolve to the lowest arm index.
    """
    if not specs:
        raise ValueError("need at least one arm")
    specs = tuple(specs)
    means = tuple(arm_mean(s) for s in specs)
    default = max(arm_default_proxy(s) for s in specs)
    if sigma_override is not None:
        if sigma_override < default:
            raise ValueError(
                f"sigma_override {sigma_override} is below an arm's default proxy {default}"
            )
        sigma = float(sigma_override)
    else:
        sigma = default
    if sigma <= 0:
        raise ValueError("sigma must be > 0; pass a positive sigma_override for degenerate arms")
    best = int(np.argmax(means))
    gaps = tuple(means[best] - m for m in means)
    sub = [g for k, g in enumerate(gaps) if k != best and g > 0]
    min_gap = min(sub) if sub else None
    return BanditEnv(specs, sigma, means, best, gaps, min_gap)


def _reward_from_draws(spec: ArmSpec, z: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Map standard-normal draws ``z`` and uniform draws ``u`` to rewards."""
    if spec.kind == "gaussian":
        return spec.mean + math.sqrt(spec.variance) * z
    if spec.kind == "triangular01":
        # inverse CDF of triangular(0, c, 1); handles the degenerate modes 0 and 1
        c = spec.mode
        lo = np.sqrt(u * c) if c > 0 else np.zeros_like(u)
        hi = 1.0 - np.sqrt((1.0 - u) * (1.0 - c)) if c < 1 else np.ones_like(u)
        return np.where(u < c, lo, hi)
    return (u < spec.p).astype(float)


def sample_reward(env: BanditEnv, arm: int, rng: np.random.Generator) -> float:
    """Draw one reward from the given arm."""
    if not 0 <= arm < env.n_arms:
        raise IndexError(f"arm index {arm} out of range [0, {env.n_arms})")
    spec = env.arms[arm]
    if spec.kind == "gaussian":
        z, u = rng.standard_normal(1), np.zeros(1)
    else:
        z, u = np.zeros(1), rng.random(1)
    return float(_reward_from_draws(spec, z, u)[0])


def sample_rewards(env: BanditEnv, arms: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Draw one reward per agent for the chosen arms, in one batch.

    Consumes exactly ``len(arms)`` standard normals followed by
    ``len(arms)`` uniforms regardless of which arms are pulled, so the
    reward stream stays aligned across algorithm variants run with the
    same seed (common random numbers).
    """
    arms = np.asarray(arms)
    z = rng.standard_normal(arms.shape[0])
    u = rng.random(arms.shape[0])
    out = np.empty(arms.shape[0], dtype=float)
    for k in range(env.n_arms):
        mask = arms == k
        if mask.any():
            out[mask] = _reward_from_draws(env.arms[k], z[mask], u[mask])
    return out


def gap_profile(env: BanditEnv) -> tuple[tuple[float, ...], float | None, int]:
    """Return (gaps, min positive gap or None, optimal arm index)."""
    return env.gaps, env.min_gap, env.optimal_index

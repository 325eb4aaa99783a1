"""Per-agent sampling rules: cooperative UCB, the instantaneous-best test
behind the explore-only gate, estimate updates, and Gaussian Thompson
sampling.

Scalar operations act on one agent's state; the ``*_rows`` helpers are the
batched forms the simulation engine uses, kept here so both routes share
one module and can be cross-checked in tests.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

# Theorem validity needs xi >= 1.1; smaller values (the experiments use
# 1.01) still run, with a warning.
XI_THEOREM_MIN = 1.1


@dataclass
class UcbParams:
    xi: float
    sigma: float

    def __post_init__(self):
        if self.xi <= 0:
            raise ValueError(f"xi must be > 0, got {self.xi}")
        if self.xi < XI_THEOREM_MIN:
            warnings.warn(
                f"xi={self.xi} is below {XI_THEOREM_MIN}; regret/cost theorems do not apply",
                stacklevel=2,
            )
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")


@dataclass
class AgentEstimates:
    """One agent's per-arm counts and running reward sums.

    ``obs_count`` counts own pulls plus incorporated foreign observations;
    ``pull_count`` counts own pulls only.  Owned by exactly one agent
    within one run; never shared.
    """

    obs_count: np.ndarray
    pull_count: np.ndarray
    reward_sum: np.ndarray

    @classmethod
    def fresh(cls, n_arms: int) -> "AgentEstimates":
        return cls(
            np.zeros(n_arms, dtype=np.int64),
            np.zeros(n_arms, dtype=np.int64),
            np.zeros(n_arms, dtype=float),
        )

    @property
    def n_arms(self) -> int:
        return self.obs_count.shape[0]

    @property
    def mean_hat(self) -> np.ndarray:
        """Empirical means; unobserved arms report 0."""
        out = np.zeros(self.n_arms)
        seen = self.obs_count > 0
        out[seen] = self.reward_sum[seen] / self.obs_count[seen]
        return out


def update_estimates(est: AgentEstimates, arm: int, reward: float, own_pull: bool) -> AgentEstimates:
    """Incorporate one observation; callers guarantee each foreign message
    is incorporated at most once (dedup lives in the protocol layer)."""
    if not 0 <= arm < est.n_arms:
        raise IndexError(f"arm index {arm} out of range")
    est.obs_count[arm] += 1
    est.reward_sum[arm] += reward
    if own_pull:
        est.pull_count[arm] += 1
    return est


def ucb_index(est: AgentEstimates, arm: int, t: float, p: UcbParams) -> float:
    """Empirical mean plus the confidence width; +inf for unobserved arms."""
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    n = est.obs_count[arm]
    if n == 0:
        return math.inf
    width = p.sigma * math.sqrt(2.0 * (p.xi + 1.0) * math.log(t) / n)
    return est.reward_sum[arm] / n + width


def select_arm_ucb(est: AgentEstimates, t: float, p: UcbParams) -> int:
    """Argmax of the UCB index, ties to the lowest arm index."""
    return int(np.argmax([ucb_index(est, k, t, p) for k in range(est.n_arms)]))


def instantaneously_best(est: AgentEstimates) -> int:
    """Arm with the highest empirical mean (unobserved arms count as 0)."""
    return int(np.argmax(est.mean_hat))


def modified_ucb_index_complete(
    est: AgentEstimates, arm: int, t: float, xi_bar: float, sigma: float, n_agents: float
) -> float:
    """UCB index with the complete-graph uncertainty term
    sigma * sqrt(2 log(t^(xi_bar+1) N) / N_k); reduces to ``ucb_index``
    when n_agents == 1."""
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    if n_agents < 1:
        raise ValueError(f"n_agents must be >= 1, got {n_agents}")
    n = est.obs_count[arm]
    if n == 0:
        return math.inf
    width = sigma * math.sqrt(2.0 * ((xi_bar + 1.0) * math.log(t) + math.log(n_agents)) / n)
    return est.reward_sum[arm] / n + width


# ---------------------------------------------------------------------------
# Gaussian Thompson sampling (conjugate normal-normal updates)
# ---------------------------------------------------------------------------

@dataclass
class ThompsonState:
    posterior_mean: np.ndarray
    posterior_var: np.ndarray
    prior_mean: float
    prior_var: float
    likelihood_var: float

    @classmethod
    def fresh(
        cls, n_arms: int, prior_mean: float = 0.0, prior_var: float = 1e6, likelihood_var: float = 1.0
    ) -> "ThompsonState":
        if prior_var <= 0 or likelihood_var <= 0:
            raise ValueError("prior_var and likelihood_var must be > 0")
        return cls(
            np.full(n_arms, float(prior_mean)),
            np.full(n_arms, float(prior_var)),
            prior_mean,
            prior_var,
            likelihood_var,
        )


def thompson_update(state: ThompsonState, arm: int, reward: float) -> ThompsonState:
    """One conjugate Gaussian posterior update."""
    v, m = state.posterior_var[arm], state.posterior_mean[arm]
    v_new = 1.0 / (1.0 / v + 1.0 / state.likelihood_var)
    state.posterior_mean[arm] = v_new * (m / v + reward / state.likelihood_var)
    state.posterior_var[arm] = v_new
    return state


def thompson_select(state: ThompsonState, rng: np.random.Generator) -> int:
    """Sample each arm's posterior, return the argmax (ties lowest index)."""
    draws = state.posterior_mean + np.sqrt(state.posterior_var) * rng.standard_normal(
        state.posterior_mean.shape[0]
    )
    return int(np.argmax(draws))


# ---------------------------------------------------------------------------
# Batched forms over an (agents x arms) estimate bank
# ---------------------------------------------------------------------------

def mean_rows(obs: np.ndarray, rsum: np.ndarray) -> np.ndarray:
    out = np.zeros_like(rsum)
    np.divide(rsum, obs, out=out, where=obs > 0)
    return out


def best_arm_rows(obs: np.ndarray, rsum: np.ndarray) -> np.ndarray:
    """Per-agent instantaneously best arm."""
    return np.argmax(mean_rows(obs, rsum), axis=1)


def ucb_select_rows(obs: np.ndarray, rsum: np.ndarray, t: float, p: UcbParams) -> np.ndarray:
    """Per-agent UCB argmax; unobserved arms dominate via +inf."""
    index = np.full(rsum.shape, np.inf)
    seen = obs > 0
    width = np.empty_like(rsum)
    np.divide(2.0 * (p.xi + 1.0) * math.log(t), obs, out=width, where=seen)
    index[seen] = rsum[seen] / obs[seen] + p.sigma * np.sqrt(width[seen])
    return np.argmax(index, axis=1)


def thompson_posterior_rows(
    obs: np.ndarray, rsum: np.ndarray, prior_mean: float, prior_var: float, likelihood_var: float
) -> tuple[np.ndarray, np.ndarray]:
    """Posterior (mean, var) after incorporating ``obs`` observations with
    reward sums ``rsum``; equals obs-many sequential ``thompson_update``
    calls."""
    prec = 1.0 / prior_var + obs / likelihood_var
    var = 1.0 / prec
    mean = var * (prior_mean / prior_var + rsum / likelihood_var)
    return mean, var

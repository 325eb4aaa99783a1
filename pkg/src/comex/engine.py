"""Time-stepped simulation of the cooperative bandit variants.

Each step runs four phases in a fixed order: (1) every agent samples and
pulls, (2) agents assemble outgoing message bundles, (3) bundles are
delivered synchronously to graph neighbors, (4) agents incorporate their
own pull and any newly seen foreign messages.  Group regret is the
expected-regret estimator (true gaps times pull counts); communication
cost counts every transmission of every single message, with a
concatenated bundle costing its element count.

Message relaying is executed by a vectorized synchronous-flood kernel
(``_Flood``) whose semantics match the per-agent buffer operations in
``protocol``; the equivalence is asserted exactly in the test suite.
"""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .env import ArmSpec, BanditEnv, make_env, sample_rewards
from .graph import (
    GraphAnalysis,
    GraphSpec,
    Topology,
    adjacency_matrix,
    analyze,
    bfs_distances,
    generate_topology,
    leader_assignment,
)
from .policy import UcbParams, best_arm_rows, mean_rows, thompson_posterior_rows, ucb_select_rows
from .protocol import metropolis_weights

VARIANTS = ("ucb_share", "mp_ucb", "lf_ucb", "est_ucb", "mp_thompson")
GATES = ("comex", "full")
RELAY_VARIANTS = ("mp_ucb", "lf_ucb", "mp_thompson")

# entropy tag separating the graph stream from per-run streams
_GRAPH_TAG = 0x1_746F_706F


@dataclass(frozen=True)
class SimConfig:
    arms: tuple[ArmSpec, ...]
    graph: GraphSpec
    variant: str
    gate: str
    horizon: int
    gamma: int = 1
    xi: float = 1.1
    sigma: float | None = None
    prior_mean: float = 0.0
    prior_var: float = 1e6
    runs: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}, expected one of {VARIANTS}")
        if self.gate not in GATES:
            raise ValueError(f"unknown gate {self.gate!r}, expected one of {GATES}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.gamma < 1:
            raise ValueError(f"gamma must be >= 1, got {self.gamma}")
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")

    @property
    def effective_gamma(self) -> int:
        """Hop radius actually used; instantaneous reward sharing is 1-hop."""
        return self.gamma if self.variant in RELAY_VARIANTS else 1


def rng_streams(seed: int, run_index: int):
    """Per-run random streams, split by purpose so variants sharing a seed
    see common random numbers.

    Consumption contract (relied on by replay oracles): the bootstrap
    stream yields ``integers(0, K, size=N)`` once at t=1, then any
    follower fallback draws in ascending agent order; the environment
    stream yields ``standard_normal(N)`` then ``random(N)`` every step;
    the Thompson stream yields ``standard_normal((N, K))`` per step from
    t=2 on.
    """
    children = np.random.SeedSequence([seed, run_index]).spawn(3)
    return tuple(np.random.Generator(np.random.PCG64(c)) for c in children)


def graph_rng(seed: int) -> np.random.Generator:
    """Topology stream; one graph per experiment, shared by all runs."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, _GRAPH_TAG])))


@dataclass
class AuditLog:
    """Per-event trace for small-scale invariant checks."""

    incorporations: list = field(default_factory=list)  # (step, origin, origin_time, arm, receiver)
    transmissions: list = field(default_factory=list)  # (step, origin, origin_time, arm, sender)
    actions: np.ndarray | None = None  # (T, N)
    bundle_sizes: np.ndarray | None = None  # (T, N)
    obs_history: np.ndarray | None = None  # (T, N, K), post-step
    pull_history: np.ndarray | None = None  # (T, N, K), post-step


@dataclass
class RunMetrics:
    regret: np.ndarray  # (T,) cumulative group regret
    comm_cost: np.ndarray  # (T,) cumulative transmissions
    control_msgs: np.ndarray  # (T,) cumulative leader action broadcasts
    final_pulls: np.ndarray  # (N, K)
    comm_cost_per_arm: np.ndarray | None = None  # est_ucb alternative count
    audit: AuditLog | None = None


class _Flood:
    """Columnar synchronous gamma-hop flood with per-agent dedup.

    Equivalent to the buffer rules: the origin transmits at birth, every
    agent retransmits a message exactly once, one step after first receipt,
    while the message is younger than gamma; delivery reaches all graph
    neighbors of each transmitter.  Transmissions by isolated agents are
    not counted (there is nobody to send to).
    """

    def __init__(self, n: int, gamma: int, adj: np.ndarray, track_audit: bool = False):
        self.n = n
        self.gamma = gamma
        self.adj_f = adj.astype(np.float32)
        self.can_send = adj.any(axis=1)
        self.track_audit = track_audit
        self.origin = np.zeros(0, dtype=np.int64)
        self.born = np.zeros(0, dtype=np.int64)
        self.arm = np.zeros(0, dtype=np.int64)
        self.value = np.zeros(0, dtype=float)
        self.seen = np.zeros((0, n), dtype=bool)
        self.frontier = np.zeros((0, n), dtype=bool)
        self.is_new = np.zeros(0, dtype=bool)

    def step(self, t: int, origins, arms, values):
        """Advance one step: inject newly initiated messages, relay live
        ones, and return (tx_count, incorporation arrays, audit info)."""
        m_new = len(origins)
        if m_new:
            self.origin = np.concatenate([self.origin, np.asarray(origins, dtype=np.int64)])
            self.born = np.concatenate([self.born, np.full(m_new, t, dtype=np.int64)])
            self.arm = np.concatenate([self.arm, np.asarray(arms, dtype=np.int64)])
            self.value = np.concatenate([self.value, np.asarray(values, dtype=float)])
            seen_new = np.zeros((m_new, self.n), dtype=bool)
            seen_new[np.arange(m_new), np.asarray(origins, dtype=np.int64)] = True
            self.seen = np.concatenate([self.seen, seen_new]) if self.seen.size else seen_new
            self.frontier = (
                np.concatenate([self.frontier, np.zeros((m_new, self.n), dtype=bool)])
                if self.frontier.size
                else np.zeros((m_new, self.n), dtype=bool)
            )
            self.is_new = np.concatenate([self.is_new, np.ones(m_new, dtype=bool)])

        m = self.origin.shape[0]
        if m == 0:
            empty_inc = (np.zeros(0, np.int64),) * 4 + (np.zeros(0, float),)
            audit = None
            if self.track_audit:
                audit = {
                    "tx_pairs": ((np.zeros(0, np.int64),) * 4),
                    "sender_counts": np.zeros(self.n, dtype=np.int64),
                }
            return 0, empty_inc, audit

        # transmitters: origins of new messages, plus last step's first
        # receivers while the message is younger than gamma
        tx = np.zeros((m, self.n), dtype=bool)
        tx[self.is_new, self.origin[self.is_new]] = True
        age = t - self.born
        relay_ok = ~self.is_new & (age <= self.gamma - 1)
        tx[relay_ok] = self.frontier[relay_ok]

        tx_eff = tx & self.can_send[None, :]
        tx_count = int(tx_eff.sum())

        reach = (tx_eff.astype(np.float32) @ self.adj_f) > 0
        new_recv = reach & ~self.seen
        self.seen |= new_recv

        rows, recv = np.nonzero(new_recv)
        inc = (
            self.origin[rows],
            self.born[rows],
            self.arm[rows],
            recv.astype(np.int64),
            self.value[rows],
        )

        audit = None
        if self.track_audit:
            trows, senders = np.nonzero(tx_eff)
            audit = {
                "tx_pairs": (self.origin[trows], self.born[trows], self.arm[trows], senders),
                "sender_counts": tx_eff.sum(axis=0).astype(np.int64),
            }

        # retire messages that can never transmit again
        self.frontier = new_recv
        self.is_new = np.zeros(m, dtype=bool)
        keep = (age <= self.gamma - 2) & self.frontier.any(axis=1)
        if not keep.all():
            self.origin = self.origin[keep]
            self.born = self.born[keep]
            self.arm = self.arm[keep]
            self.value = self.value[keep]
            self.seen = self.seen[keep]
            self.frontier = self.frontier[keep]
            self.is_new = self.is_new[keep]

        return tx_count, inc, audit


@dataclass
class SimWorld:
    """Immutable per-experiment inputs shared by all Monte-Carlo runs."""

    env: BanditEnv
    topo: Topology
    adj: np.ndarray
    diameter: int
    analysis: GraphAnalysis | None = None  # lf_ucb only
    assignment: dict | None = None  # lf_ucb only


def build_world(cfg: SimConfig) -> SimWorld:
    env = make_env(cfg.arms, sigma_override=cfg.sigma)
    topo = generate_topology(cfg.graph, graph_rng(cfg.seed))
    adj = adjacency_matrix(topo)
    dist = bfs_distances(topo)
    finite = dist[np.isfinite(dist)]
    diameter = int(finite.max()) if finite.size else 0
    analysis = assignment = None
    if cfg.variant in RELAY_VARIANTS and cfg.effective_gamma > diameter:
        warnings.warn(
            f"gamma={cfg.effective_gamma} exceeds the graph diameter {diameter}; "
            "relaying past the diameter only adds forwarding cost",
            stacklevel=2,
        )
    if cfg.variant == "lf_ucb":
        analysis = analyze(topo, cfg.effective_gamma)
        assignment = leader_assignment(analysis)
    return SimWorld(env, topo, adj, diameter, analysis, assignment)


def run_simulation(cfg: SimConfig, run_index: int, audit: bool = False, world: SimWorld | None = None) -> RunMetrics:
    """Execute one seeded run of the configured variant and gate."""
    if world is None:
        world = build_world(cfg)
    if cfg.variant == "est_ucb":
        return _run_estimate_sharing(cfg, run_index, world, audit)
    return _run_reward_sharing(cfg, run_index, world, audit)


def _make_audit(T: int, N: int, K: int) -> AuditLog:
    return AuditLog(
        actions=np.zeros((T, N), dtype=np.int64),
        bundle_sizes=np.zeros((T, N), dtype=np.int64),
        obs_history=np.zeros((T, N, K), dtype=np.int64),
        pull_history=np.zeros((T, N, K), dtype=np.int64),
    )


def _run_reward_sharing(cfg: SimConfig, run_index: int, world: SimWorld, audit: bool) -> RunMetrics:
    env, topo = world.env, world.topo
    N, K, T = topo.n, env.n_arms, cfg.horizon
    gamma = cfg.effective_gamma
    gaps = np.asarray(env.gaps)
    params = UcbParams(cfg.xi, env.sigma)
    env_rng, boot_rng, ts_rng = rng_streams(cfg.seed, run_index)

    obs = np.zeros((N, K), dtype=np.int64)
    pulls = np.zeros((N, K), dtype=np.int64)
    rsum = np.zeros((N, K), dtype=float)

    flood = _Flood(N, gamma, world.adj, track_audit=audit)
    is_lf = cfg.variant == "lf_ucb"
    if is_lf:
        leaders = np.array(sorted(world.analysis.dominating_set), dtype=np.int64)
        lead_of = np.arange(N, dtype=np.int64)
        dist_of = np.zeros(N, dtype=np.int64)
        for j, (leader, d) in world.assignment.items():
            lead_of[j], dist_of[j] = leader, d
        is_follower = dist_of > 0
        hist_arm = np.zeros((T + 1, N), dtype=np.int64)
        hist_flag = np.zeros((T + 1, N), dtype=bool)
        ctrl_flood = _Flood(N, gamma, world.adj)

    regret = np.zeros(T)
    cost = np.zeros(T, dtype=np.int64)
    ctrl = np.zeros(T, dtype=np.int64)
    log = _make_audit(T, N, K) if audit else None

    cum_regret = 0.0
    cum_cost = 0
    cum_ctrl = 0
    rows = np.arange(N)

    for t in range(1, T + 1):
        best = best_arm_rows(obs, rsum)

        # phase 1: sample and pull
        if t == 1:
            actions = boot_rng.integers(0, K, size=N)
        elif cfg.variant == "mp_thompson":
            pm, pv = thompson_posterior_rows(obs, rsum, cfg.prior_mean, cfg.prior_var, env.sigma**2)
            draws = pm + np.sqrt(pv) * ts_rng.standard_normal((N, K))
            actions = np.argmax(draws, axis=1)
        elif is_lf:
            actions = ucb_select_rows(obs, rsum, t, params)
            copying = is_follower & (t > dist_of)
            actions[copying] = hist_arm[t - dist_of[copying], lead_of[copying]]
            waiting = np.flatnonzero(is_follower & (t <= dist_of))
            if waiting.size:
                actions[waiting] = boot_rng.integers(0, K, size=waiting.size)
        else:
            actions = ucb_select_rows(obs, rsum, t, params)
        rewards = sample_rewards(env, actions, env_rng)

        cum_regret += float(gaps[actions].sum())
        np.add.at(pulls, (rows, actions), 1)

        # phase 2: gate decisions
        suboptimal = actions != best
        if is_lf:
            hist_arm[t] = actions
            hist_flag[t] = suboptimal
        if cfg.gate == "full" or t == 1:
            initiate = np.ones(N, dtype=bool)
        elif is_lf:
            initiate = np.zeros(N, dtype=bool)
            initiate[leaders] = suboptimal[leaders]
            copying = is_follower & (t > dist_of)
            initiate[copying] = hist_flag[t - dist_of[copying], lead_of[copying]]
        else:
            initiate = suboptimal

        # phases 3 and 4: synchronous delivery, then incorporation
        senders = np.flatnonzero(initiate)
        tx, inc, flood_audit = flood.step(t, senders, actions[senders], rewards[senders])
        cum_cost += tx

        if is_lf:
            ctrl_tx, _, _ = ctrl_flood.step(t, leaders, actions[leaders], hist_flag[t, leaders].astype(float))
            cum_ctrl += ctrl_tx

        obs[rows, actions] += 1
        rsum[rows, actions] += rewards
        inc_origin, inc_born, inc_arm, inc_recv, inc_val = inc
        if inc_recv.size:
            np.add.at(obs, (inc_recv, inc_arm), 1)
            np.add.at(rsum, (inc_recv, inc_arm), inc_val)

        regret[t - 1] = cum_regret
        cost[t - 1] = cum_cost
        ctrl[t - 1] = cum_ctrl

        if audit:
            log.actions[t - 1] = actions
            log.bundle_sizes[t - 1] = flood_audit["sender_counts"]
            for o, b, a, s in zip(*flood_audit["tx_pairs"]):
                log.transmissions.append((t, int(o), int(b), int(a), int(s)))
            for o, b, a, r in zip(inc_origin, inc_born, inc_arm, inc_recv):
                log.incorporations.append((t, int(o), int(b), int(a), int(r)))
            log.obs_history[t - 1] = obs
            log.pull_history[t - 1] = pulls

    return RunMetrics(regret, cost, ctrl, pulls, audit=log)


def _run_estimate_sharing(cfg: SimConfig, run_index: int, world: SimWorld, audit: bool) -> RunMetrics:
    """Consensus variant: agents average per-arm (count, reward-sum)
    estimates with neighbors instead of exchanging raw rewards.

    Under the explore gate an agent broadcasts its snapshot only on an
    instantaneously suboptimal pull, and a receiver averages only the arms
    it currently flags as suboptimal; under full communication everyone
    broadcasts and averages every arm.  A missing neighbor's weight is
    folded back onto the diagonal for that step.
    """
    env, topo = world.env, world.topo
    N, K, T = topo.n, env.n_arms, cfg.horizon
    gaps = np.asarray(env.gaps)
    params = UcbParams(cfg.xi, env.sigma)
    env_rng, boot_rng, _ = rng_streams(cfg.seed, run_index)
    deg = np.asarray(topo.degree, dtype=np.int64)
    W = metropolis_weights(topo)

    n_hat = np.zeros((N, K))
    s_hat = np.zeros((N, K))
    pulls = np.zeros((N, K), dtype=np.int64)

    regret = np.zeros(T)
    cost = np.zeros(T, dtype=np.int64)
    per_arm = np.zeros(T, dtype=np.int64)
    log = _make_audit(T, N, K) if audit else None

    cum_regret = 0.0
    cum_cost = 0
    cum_per_arm = 0
    rows = np.arange(N)

    for t in range(1, T + 1):
        best = best_arm_rows(n_hat, s_hat)

        if t == 1:
            actions = boot_rng.integers(0, K, size=N)
        else:
            actions = ucb_select_rows(n_hat, s_hat, t, params)
        rewards = sample_rewards(env, actions, env_rng)

        cum_regret += float(gaps[actions].sum())
        np.add.at(pulls, (rows, actions), 1)

        if cfg.gate == "full" or t == 1:
            send = np.ones(N, dtype=bool)
        else:
            send = actions != best
        arms_shared = K if cfg.gate == "full" else K - 1
        cum_cost += int(deg[send].sum())
        cum_per_arm += int(deg[send].sum()) * arms_shared

        # averaging round over available snapshots
        w_eff = W * send[None, :]
        np.fill_diagonal(w_eff, 0.0)
        diag = 1.0 - w_eff.sum(axis=1)
        w_eff[rows, rows] = diag
        if cfg.gate == "full":
            flagged = np.ones((N, K), dtype=bool)
        else:
            flagged = np.ones((N, K), dtype=bool)
            flagged[rows, best] = False
        n_hat = np.where(flagged, w_eff @ n_hat, n_hat)
        s_hat = np.where(flagged, w_eff @ s_hat, s_hat)

        n_hat[rows, actions] += 1.0
        s_hat[rows, actions] += rewards

        regret[t - 1] = cum_regret
        cost[t - 1] = cum_cost
        per_arm[t - 1] = cum_per_arm
        if audit:
            log.actions[t - 1] = actions
            log.obs_history[t - 1] = pulls
            log.pull_history[t - 1] = pulls

    return RunMetrics(regret, cost, np.zeros(T, dtype=np.int64), pulls, comm_cost_per_arm=per_arm, audit=log)


@dataclass
class AggregateResult:
    """Stacked per-run trajectories plus pointwise mean/std (population)."""

    cfg: SimConfig
    regret: np.ndarray  # (runs, T)
    comm_cost: np.ndarray
    control_msgs: np.ndarray
    comm_cost_per_arm: np.ndarray | None
    regret_mean: np.ndarray
    regret_std: np.ndarray
    comm_mean: np.ndarray
    comm_std: np.ndarray
    control_mean: np.ndarray
    control_std: np.ndarray


def _worker(args) -> RunMetrics:
    cfg, idx = args
    return run_simulation(cfg, idx)


def n_workers() -> int:
    return max(1, int(os.environ.get("COMEX_THREADS", "1")))


def aggregate_runs(cfg: SimConfig) -> AggregateResult:
    """Run the configured Monte-Carlo batch; bit-identical for a given
    (config, seed) regardless of worker count."""
    workers = min(n_workers(), cfg.runs)
    if workers <= 1:
        world = build_world(cfg)
        metrics = [run_simulation(cfg, i, world=world) for i in range(cfg.runs)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            metrics = list(pool.map(_worker, [(cfg, i) for i in range(cfg.runs)], chunksize=1))
    regret = np.stack([m.regret for m in metrics])
    comm = np.stack([m.comm_cost for m in metrics])
    control = np.stack([m.control_msgs for m in metrics])
    per_arm = None
    if metrics[0].comm_cost_per_arm is not None:
        per_arm = np.stack([m.comm_cost_per_arm for m in metrics])
    return AggregateResult(
        cfg=cfg,
        regret=regret,
        comm_cost=comm,
        control_msgs=control,
        comm_cost_per_arm=per_arm,
        regret_mean=regret.mean(axis=0),
        regret_std=regret.std(axis=0),
        comm_mean=comm.mean(axis=0),
        comm_std=comm.std(axis=0),
        control_mean=control.mean(axis=0),
        control_std=control.std(axis=0),
    )


def write_audit_csv(log: AuditLog, path) -> None:
    """Dump incorporation events: step,origin,origin_time,arm,hop_count,receiver."""
    with open(path, "w") as f:
        f.write("step,origin,origin_time,arm,hop_count,receiver\n")
        for step, origin, born, arm, receiver in log.incorporations:
            f.write(f"{step},{origin},{born},{arm},{step - born + 1},{receiver}\n")

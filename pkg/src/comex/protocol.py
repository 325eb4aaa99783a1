"""Message creation, gamma-hop relay with per-hop delay, dedup/discard
rules, leader action broadcasts and the estimate-sharing consensus step.

This is the per-agent reference implementation of the relay semantics.
The engine runs a vectorized equivalent (``engine._Flood``) for speed;
the two are cross-checked exactly in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Topology
from .policy import AgentEstimates, instantaneously_best, update_estimates


class ProtocolError(RuntimeError):
    pass


@dataclass(frozen=True)
class RewardMessage:
    """One pull's record; identity is (origin, origin_time)."""

    origin: int
    origin_time: int
    arm: int
    reward: float

    @property
    def ident(self) -> tuple[int, int]:
        return (self.origin, self.origin_time)


@dataclass(frozen=True)
class LeaderActionMessage:
    """A leader's broadcast: which arm it pulled and whether that pull was
    instantaneously suboptimal."""

    origin: int
    origin_time: int
    arm: int
    suboptimal_flag: bool

    @property
    def ident(self) -> tuple[int, int]:
        return (self.origin, self.origin_time)


@dataclass(frozen=True)
class EstimateSnapshot:
    """Estimate-sharing payload: per-arm observation-count and mean
    estimates, plus the arms the origin currently flags as suboptimal."""

    origin: int
    origin_time: int
    obs_hat: tuple[float, ...]
    mean_hat: tuple[float, ...]
    flagged_arms: frozenset[int]


@dataclass
class MessageBuffer:
    """One agent's relay store: held messages, plus dedup sets for
    incorporation (``seen``) and forwarding (``forwarded``)."""

    held: dict = field(default_factory=dict)
    seen: set = field(default_factory=set)
    forwarded: set = field(default_factory=set)


def comex_gate(est: AgentEstimates, pulled_arm: int) -> bool:
    """Share only when the pulled arm differs from the current empirical
    argmax (evaluated on the estimates from the end of the previous step)."""
    return pulled_arm != instantaneously_best(est)


def full_gate() -> bool:
    """Full communication: share every step."""
    return True


def outgoing_bundle(buf: MessageBuffer, own_new, now: int, gamma: int) -> list:
    """Assemble this step's outgoing concatenated message.

    The bundle is the agent's own new message (if any) plus every held
    message aged 1..gamma-1 that this agent has not yet relayed.  Bundled
    identities are marked forwarded; held messages older than gamma are
    purged.  With gamma=1 the bundle is the own message only.
    """
    bundle = []
    if own_new is not None:
        buf.seen.add(own_new.ident)
        buf.forwarded.add(own_new.ident)
        bundle.append(own_new)
    for ident, msg in list(buf.held.items()):
        age = now - msg.origin_time
        if age > gamma:
            del buf.held[ident]
        elif 1 <= age <= gamma - 1 and ident not in buf.forwarded:
            buf.forwarded.add(ident)
            bundle.append(msg)
    return bundle


def deliver_and_incorporate(
    buffers: list[MessageBuffer],
    bundles: list[list],
    topo: Topology,
    estimates: list[AgentEstimates] | None,
) -> list[tuple[int, RewardMessage]]:
    """Synchronously deliver every bundle to the sender's neighbors.

    A receiver incorporates each message identity at most once (duplicates
    arriving over several paths are dropped), never incorporates its own
    message, and stores first receipts for potential relay.  When
    ``estimates`` is given, reward messages update the receiver's counts as
    foreign observations.  Returns the (receiver, message) incorporation
    events in delivery order.
    """
    events = []
    for sender, bundle in enumerate(bundles):
        if not bundle:
            continue
        for receiver in topo.neighbors[sender]:
            buf = buffers[receiver]
            for msg in bundle:
                if msg.ident in buf.seen:
                    continue
                buf.seen.add(msg.ident)
                buf.held[msg.ident] = msg
                if estimates is not None and isinstance(msg, RewardMessage):
                    update_estimates(estimates[receiver], msg.arm, msg.reward, own_pull=False)
                events.append((receiver, msg))
    return events


def metropolis_weights(g: Topology) -> np.ndarray:
    """Symmetric doubly stochastic consensus weights from local degrees:
    w_ij = 1/(1 + max(d_i, d_j)) on edges, remainder on the diagonal."""
    n = g.n
    deg = g.degree
    w = np.zeros((n, n))
    for i in range(n):
        for j in g.neighbors[i]:
            w[i, j] = 1.0 / (1.0 + max(deg[i], deg[j]))
    np.fill_diagonal(w, 1.0 - w.sum(axis=1))
    return w


def consensus_step(
    n_hat: np.ndarray,
    s_hat: np.ndarray,
    flagged: np.ndarray,
    weights: np.ndarray,
    pulls: list[tuple[int, float]] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """One averaging round over (count, reward-sum) estimates.

    For each arm an agent flags, its estimates are replaced by the
    weight-averaged neighborhood values; unflagged arms are untouched.
    When per-agent ``pulls`` [(arm, reward), ...] are given, each agent's
    own new pull is incorporated after the averaging.
    """
    row_sums = weights.sum(axis=1)
    if not np.allclose(row_sums, 1.0, atol=1e-9):
        raise ValueError("consensus weights must be row-stochastic")
    flagged = np.asarray(flagged, dtype=bool)
    new_n = np.where(flagged, weights @ n_hat, n_hat)
    new_s = np.where(flagged, weights @ s_hat, s_hat)
    if pulls is not None:
        for i, (arm, reward) in enumerate(pulls):
            new_n[i, arm] += 1.0
            new_s[i, arm] += reward
    return new_n, new_s


def follower_action(
    assignment: dict[int, tuple[int, int]],
    leader_messages: dict[tuple[int, int], LeaderActionMessage],
    t: int,
    rng: np.random.Generator,
    n_arms: int,
) -> dict[int, tuple[int, bool]]:
    """Resolve each follower's pull at step t.

    A follower replays its leader's action from d(i,j) steps ago when that
    action is available (t > d), pulling a uniformly random arm otherwise,
    and initiates a reward message only when the replayed action carried
    the suboptimal flag.
    """
    out = {}
    for j in sorted(assignment):
        leader, d = assignment[j]
        if leader == j:
            continue
        if t > d:
            key = (leader, t - d)
            if key not in leader_messages:
                raise ProtocolError(f"missing action message from leader {leader} at t={t - d}")
            msg = leader_messages[key]
            out[j] = (msg.arm, bool(msg.suboptimal_flag))
        else:
            out[j] = (int(rng.integers(n_arms)), False)
    return out

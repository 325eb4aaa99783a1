"""Theoretical bound calculators next to a matching simulation.

Evaluates the closed-form regret and communication-cost upper bounds for
the three analyzed variants on one instance, then runs the simulator to
confirm the empirical curves sit below them.
"""

from comex.bounds import bound_inputs, comm_bound_capped, comm_cap, regret_bound, tail_bound
from comex.engine import SimConfig, aggregate_runs, build_world
from comex.env import gaussian
from comex.graph import GraphSpec

arms = tuple([gaussian(11, 1)] + [gaussian(10, 1)] * 4)
graph = GraphSpec("cycle", 20)
horizon, xi, gamma = 400, 1.1, 3

cfg = SimConfig(arms=arms, graph=graph, variant="ucb_share", gate="comex",
                horizon=horizon, xi=xi, runs=10, seed=4)
world = build_world(cfg)

print(f"instance: N=20 (cycle), K=5, T={horizon}, xi={xi}, gamma={gamma}")
print(f"{'variant':<10} {'regret bound':>14} {'cost bound (capped)':>20}")
for variant in ("ucb_share", "mp_ucb", "lf_ucb"):
    b = bound_inputs(world.env, world.topo, 1 if variant == "ucb_share" else gamma, xi, horizon)
    print(f"{variant:<10} {regret_bound(variant, b):>14.1f} {comm_bound_capped(variant, b):>20.1f}"
          f"   (cap {comm_cap(b):.0f})")

print("\nempirical means over 10 runs (explore gate):")
for variant in ("ucb_share", "mp_ucb", "lf_ucb"):
    agg = aggregate_runs(SimConfig(
        arms=arms, graph=graph, variant=variant, gate="comex",
        horizon=horizon, gamma=1 if variant == "ucb_share" else gamma, xi=xi, runs=10, seed=4))
    print(f"{variant:<10} R(T)={agg.regret_mean[-1]:8.1f}   L(T)={agg.comm_mean[-1]:9.1f}")

print("\ntail-probability bound at t in {50, 200, 1000} (single agent, zeta=1.3):")
for t in (50, 200, 1000):
    print(f"  t={t:5d}: {tail_bound(t, xi=1.1, degree_bound=0, zeta=1.3, clamp=True):.6f}")

"""Tour of the building blocks: arm environments and communication graphs.

Builds the two reward settings used by the bundled experiment presets,
samples from them, and analyzes a topology's power graph, clique cover
and dominating set.
"""

import numpy as np

from comex.env import gap_profile, gaussian, make_env, sample_rewards, triangular01
from comex.graph import GraphSpec, analyze, generate_topology, leader_assignment, to_adjacency_text

print("== Gaussian environment (1 good arm, 9 equal suboptimal arms) ==")
env = make_env([gaussian(11, 1)] + [gaussian(10, 1)] * 9)
gaps, min_gap, best = gap_profile(env)
print(f"means: {env.means[:3]}... sigma={env.sigma}")
print(f"optimal arm: {best}, min gap: {min_gap}")

print("\n== Bounded environment (triangular on [0,1]) ==")
env01 = make_env([triangular01(1)] + [triangular01(0)] * 9)
rng = np.random.default_rng(0)
draws = sample_rewards(env01, np.zeros(100_000, dtype=int), rng)
print(f"best-arm mean {env01.means[0]:.4f}, empirical {draws.mean():.4f}, proxy sigma={env01.sigma}")

print("\n== A small communication graph and its 2nd power ==")
topo = generate_topology(GraphSpec("cycle", 8))
print(to_adjacency_text(topo))
a = analyze(topo, gamma=2)
print(f"diameter={a.diameter}")
print(f"power-graph degrees: {a.degrees_gamma}")
print(f"greedy clique cover ({a.chi_hat} blocks): {a.clique_cover}")
print(f"greedy dominating set ({a.gammabar_hat} leaders): {a.dominating_set}")
print(f"leader assignment: {leader_assignment(a)}")

"""Cooperative stochastic bandit simulator with explore-gated communication.

Submodules: ``env`` (arms and rewards), ``graph`` (topologies, power
graphs, covers), ``policy`` (UCB and Thompson rules), ``protocol``
(message gating, relay and consensus), ``engine`` (simulation driver),
``bounds`` (theoretical regret/cost bounds), ``cli`` (experiment runner).
"""

from . import bounds, cli, engine, env, graph, policy, protocol

__all__ = ["bounds", "cli", "engine", "env", "graph", "policy", "protocol"]
__version__ = "0.1.0"

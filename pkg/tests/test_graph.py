import numpy as np
import pytest

from comex.graph import (
    GraphSpec,
    adjacency_matrix,
    analyze,
    bfs_distances,
    exact_clique_cover_number,
    exact_dominating_number,
    generate_topology,
    greedy_clique_cover,
    greedy_dominating_set,
    is_connected,
    leader_assignment,
    to_adjacency_text,
    topology_from_edges,
)


def random_topology(rng, n=None, p=None):
    n = n or int(rng.integers(2, 13))
    p = p if p is not None else float(rng.uniform(0.2, 0.9))
    return generate_topology(GraphSpec("erdos_renyi", n, p, require_connected=False), rng)


def test_er_p1_is_complete():
    g = generate_topology(GraphSpec("erdos_renyi", 6, 1.0), np.random.default_rng(0))
    assert g.degree == (5,) * 6


def test_er_mean_degree():
    # E[degree] = (N-1) p = 69.3 for N=100, p=0.7
    total = 0.0
    for seed in range(100):
        g = generate_topology(GraphSpec("erdos_renyi", 100, 0.7), np.random.default_rng(seed))
        total += np.mean(g.degree)
    assert abs(total / 100 - 69.3) <= 1.5


def test_path_star_cycle_complete():
    path = generate_topology(GraphSpec("path", 3))
    assert path.neighbors == ((1,), (0, 2), (1,))
    assert path.degree == (1, 2, 1)
    star = generate_topology(GraphSpec("star", 5))
    assert star.degree == (4, 1, 1, 1, 1)
    cycle = generate_topology(GraphSpec("cycle", 4))
    assert cycle.degree == (2, 2, 2, 2)
    comp = generate_topology(GraphSpec("complete", 4))
    assert comp.degree == (3, 3, 3, 3)


def test_er_connectivity_unreachable():
    with pytest.raises(RuntimeError):
        generate_topology(GraphSpec("erdos_renyi", 3, 0.0), np.random.default_rng(0))


def test_graph_spec_validation():
    with pytest.raises(ValueError):
        GraphSpec("torus", 4)
    with pytest.raises(ValueError):
        GraphSpec("erdos_renyi", 4, p=1.5)
    with pytest.raises(ValueError):
        GraphSpec("path", 0)


def test_topology_validation():
    from comex.graph import Topology

    # constructor drops self-loops (the self-edge is implicit semantics)
    assert topology_from_edges(2, [(0, 0), (0, 1)]).neighbors == ((1,), (0,))
    with pytest.raises(ValueError):
        Topology(2, ((0, 1), (0,)))  # stored self-loop
    with pytest.raises(ValueError):
        Topology(2, ((1,), ()))  # asymmetric


def test_analyze_path3_gamma2_power_complete():
    g = generate_topology(GraphSpec("path", 3))
    a = analyze(g, 2)
    assert a.power.degree == (2, 2, 2)
    assert a.diameter == 2


def test_analyze_gamma1_identity():
    rng = np.random.default_rng(3)
    for _ in range(10):
        g = random_topology(rng)
        a = analyze(g, 1)
        assert a.power.neighbors == g.neighbors
        assert a.degrees_gamma == g.degree


def test_cycle4_cover_and_dominating():
    g = generate_topology(GraphSpec("cycle", 4))
    a = analyze(g, 1)
    assert a.chi_hat == 2
    assert a.gammabar_hat == 2
    assert sorted(v for block in a.clique_cover for v in block) == [0, 1, 2, 3]


def test_power_complete_beyond_diameter():
    rng = np.random.default_rng(7)
    for _ in range(10):
        g = random_topology(rng)
        if not is_connected(g):
            continue
        a = analyze(g, max(analyze(g, 1).diameter, 1))
        assert a.power.degree == (g.n - 1,) * g.n


def test_cover_counts_nonincreasing_in_gamma():
    rng = np.random.default_rng(11)
    for _ in range(15):
        g = random_topology(rng)
        if not is_connected(g):
            continue
        diam = max(analyze(g, 1).diameter, 1)
        chis, doms = [], []
        for gamma in range(1, diam + 1):
            a = analyze(g, gamma)
            chis.append(a.chi_hat)
            doms.append(a.gammabar_hat)
        assert all(a >= b for a, b in zip(chis, chis[1:]))
        assert all(a >= b for a, b in zip(doms, doms[1:]))


def test_distances_metric_properties():
    rng = np.random.default_rng(13)
    for _ in range(10):
        g = random_topology(rng)
        d = bfs_distances(g)
        assert np.array_equal(d, d.T)
        assert (np.diag(d) == 0).all()
        finite = np.isfinite(d)
        for i in range(g.n):
            for j in range(g.n):
                for k in range(g.n):
                    if finite[i, k] and finite[k, j]:
                        assert d[i, j] <= d[i, k] + d[k, j]


def _assert_valid_cover(adj, cover, n):
    seen = sorted(v for block in cover for v in block)
    assert seen == list(range(n))
    for block in cover:
        for x in block:
            for y in block:
                assert x == y or adj[x, y]


def _assert_dominating(adj, dom, n):
    closed = adj.copy()
    np.fill_diagonal(closed, True)
    assert closed[list(dom)].any(axis=0).all()


def test_greedy_vs_exact_small_graphs():
    rng = np.random.default_rng(17)
    for _ in range(40):
        g = random_topology(rng)
        gamma = int(rng.integers(1, 4))
        a = analyze(g, gamma)
        adj = adjacency_matrix(a.power)
        _assert_valid_cover(adj, a.clique_cover, g.n)
        _assert_dominating(adj, a.dominating_set, g.n)
        assert a.chi_hat >= exact_clique_cover_number(adj)
        assert a.gammabar_hat >= exact_dominating_number(adj)


def test_greedy_exact_on_known_graphs():
    comp = adjacency_matrix(generate_topology(GraphSpec("complete", 5)))
    assert exact_clique_cover_number(comp) == 1
    assert exact_dominating_number(comp) == 1
    path = adjacency_matrix(generate_topology(GraphSpec("path", 5)))
    assert exact_clique_cover_number(path) == 3
    assert exact_dominating_number(path) == 2
    assert len(greedy_clique_cover(path)) >= 3
    assert len(greedy_dominating_set(path)) >= 2


def test_leader_assignment_complete():
    g = generate_topology(GraphSpec("complete", 5))
    a = analyze(g, 1)
    assert a.dominating_set == (0,)
    assignment = leader_assignment(a)
    assert assignment[0] == (0, 0)
    assert all(assignment[j] == (0, 1) for j in range(1, 5))


def test_leader_assignment_star():
    g = generate_topology(GraphSpec("star", 5))
    a = analyze(g, 1)
    assert a.dominating_set == (0,)
    assignment = leader_assignment(a)
    assert all(assignment[j] == (0, 1) for j in range(1, 5))


def test_leader_assignment_path_gamma2():
    g = generate_topology(GraphSpec("path", 5))
    a = analyze(g, 2)
    assignment = leader_assignment(a)
    for j, (leader, dist) in assignment.items():
        assert dist <= 2
        assert a.distances[leader, j] == dist


def test_leader_assignment_disconnected_errors():
    g = topology_from_edges(4, [(0, 1), (2, 3)])
    a = analyze(g, 1)
    with pytest.raises(ValueError):
        leader_assignment(a)


def test_analyze_gamma_zero_errors():
    g = generate_topology(GraphSpec("path", 3))
    with pytest.raises(ValueError):
        analyze(g, 0)


def test_adjacency_text_export():
    g = generate_topology(GraphSpec("path", 3))
    assert to_adjacency_text(g) == "0: 1\n1: 0 2\n2: 1"

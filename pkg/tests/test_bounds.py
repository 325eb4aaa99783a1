import math

import numpy as np
import pytest

from comex.bounds import (
    BoundInputs,
    bound_inputs,
    comm_bound,
    comm_bound_capped,
    comm_cap,
    g_term,
    regret_bound,
    regret_bound_complete_modified,
    tail_bound,
    tail_sum_bound,
)
from comex.env import gaussian, make_env
from comex.graph import (
    GraphSpec,
    adjacency_matrix,
    analyze,
    exact_clique_cover_number,
    exact_dominating_number,
    generate_topology,
)


def toy_inputs(**kw):
    """K=2, gap 1, sigma 1, xi 1.1, complete graph on 2 agents, T=e."""
    base = dict(
        gaps=(0.0, 1.0),
        optimal_index=0,
        min_gap=1.0,
        sigma=1.0,
        xi=1.1,
        horizon=math.e,
        n_agents=2,
        gamma=1,
        chi_hat=1,
        gammabar_hat=1,
        degrees=(1, 1),
        degrees_gamma=(1, 1),
        degrees_gamma_minus_plus=(1, 1),
    )
    base.update(kw)
    return BoundInputs(**base)


def test_g_term_values():
    assert g_term(4, [0]) == pytest.approx(17.183347464017316, abs=1e-12)
    assert g_term(0, [0, 0, 0]) == pytest.approx(36 * math.log(3), abs=1e-12)
    assert g_term(8, [1, 1]) == pytest.approx(55.16111034483299, abs=1e-11)


def test_g_term_rejects_negative_degree():
    with pytest.raises(ValueError):
        g_term(1, [-1])


def test_regret_bound_toy_value():
    assert regret_bound("ucb_share", toy_inputs()) == pytest.approx(71.96111034483299, abs=1e-10)


def test_regret_bound_t1_constants_only():
    b = toy_inputs(horizon=1.0)
    assert regret_bound("ucb_share", b) == pytest.approx(g_term(8, (1, 1)), abs=1e-12)
    b5 = toy_inputs(horizon=1.0, gamma=5)
    assert regret_bound("mp_ucb", b5) == pytest.approx(
        (2 - 1) * 4 + g_term(8, (1, 1)), abs=1e-12
    )


def test_mp_equals_share_on_complete_graph_gamma1():
    # at gamma=1 the delay term vanishes and the degree lists coincide
    b = toy_inputs()
    assert regret_bound("mp_ucb", b) == pytest.approx(regret_bound("ucb_share", b), rel=1e-12)


def test_comm_bound_toy_value():
    assert comm_bound("ucb_share", toy_inputs()) == pytest.approx(172.722220689666, abs=1e-9)


def test_comm_bound_t1_constants_only():
    b = toy_inputs(horizon=1.0)
    assert comm_bound("ucb_share", b) == pytest.approx(2 * g_term(14, (1, 1)), abs=1e-12)


def test_comm_bound_mp_gamma1_multiplier_is_n():
    # d_0 = 0 by convention, so every agent relays only itself
    b = toy_inputs()
    expect = (comm_bound("ucb_share", b) - 2 * g_term(14, (1, 1))) * 2 + 2 * 2 * g_term(14, (1, 1))
    assert comm_bound("mp_ucb", b) == pytest.approx(expect, rel=1e-12)


def test_comm_cap_and_capped():
    b = toy_inputs(horizon=2.0)
    assert comm_cap(b) == 2.0 * 2
    assert comm_bound_capped("ucb_share", b) == min(comm_bound("ucb_share", b), 4.0)
    assert comm_bound_capped("ucb_share", b) == 4.0  # theorem constants dwarf the cap here


def test_lf_bounds_use_dominating_number():
    b = toy_inputs(gamma=2, chi_hat=3, gammabar_hat=1, n_agents=5, degrees_gamma_minus_plus=(2,) * 5)
    r = regret_bound("lf_ucb", b)
    lead = 8 * 2.1 * 1 * 1 * math.log(math.e)
    const = 1.0 * ((5 - 1) * (3 * 2 - 1) + 1 * g_term(20, (1, 1)))
    assert r == pytest.approx(lead + const, rel=1e-12)
    # the printed lf delay term clamps at zero when 3*gammabar*(gamma-1) > N
    b2 = toy_inputs(gamma=9, gammabar_hat=2, n_agents=4, degrees_gamma_minus_plus=(1,) * 4)
    assert comm_bound("lf_ucb", b2) >= 0


def test_bound_input_validation():
    with pytest.raises(ValueError):
        toy_inputs(xi=1.01)
    with pytest.raises(ValueError):
        toy_inputs(zeta=1.0)
    with pytest.raises(ValueError):
        regret_bound("ucb_share", toy_inputs(gaps=(0.0, 0.0)))
    with pytest.raises(ValueError):
        regret_bound("est_ucb", toy_inputs())
    with pytest.raises(ValueError):
        regret_bound("ucb_share", toy_inputs(gamma=2))
    with pytest.raises(ValueError):
        comm_bound("ucb_share", toy_inputs(min_gap=None))


def test_tail_bound_hand_value():
    # zeta=1.3, xi=1.1, d=0, t=e
    assert tail_bound(math.e, 1.1, 0, 1.3) == pytest.approx(0.47228810787630265, abs=1e-12)


def test_tail_bound_monotone_beyond_t3():
    vals = [tail_bound(t, 1.1, 5, 1.3) for t in range(3, 2000)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-4


def test_tail_bound_clamped_as_probability():
    raw = tail_bound(1.0001, 1.1, 99, 1.3)
    assert raw > 1
    assert tail_bound(1.0001, 1.1, 99, 1.3, clamp=True) == 1.0


def test_tail_bound_validation():
    with pytest.raises(ValueError):
        tail_bound(0.5, 1.1, 0)
    with pytest.raises(ValueError):
        tail_bound(2, 1.0, 0)
    with pytest.raises(ValueError):
        tail_bound(2, 1.1, 0, zeta=0.9)
    with pytest.raises(ValueError):
        tail_bound(2, 1.1, -1)


@pytest.mark.parametrize("d", [0, 10, 99])
def test_tail_sum_below_closed_form(d):
    # truncated numerical summation against the closed-form series bound
    t = np.arange(1, 10**6 + 1, dtype=float)
    expo = 2.1 * (1 - 0.09 / 16)
    series = (np.log((d + 1) * t) / (math.log(1.3) * t**expo)).sum()
    assert series <= tail_sum_bound(d)


def test_tail_bound_matches_independent_form():
    # same formula assembled through exp/log instead of power
    rng = np.random.default_rng(0)
    for _ in range(100):
        t = float(rng.uniform(1, 1e6))
        xi = float(rng.uniform(1.1, 3.0))
        d = float(rng.integers(0, 200))
        zeta = float(rng.uniform(1.05, 1.9))
        expo = (xi + 1) * (1 - (zeta - 1) ** 2 / 16)
        alt = math.exp(math.log(math.log((d + 1) * t)) - expo * math.log(t) - math.log(math.log(zeta))) if (d + 1) * t > 1 else 0.0
        assert tail_bound(t, xi, d, zeta) == pytest.approx(alt, rel=1e-12)


def test_modified_complete_bound_toy():
    b = toy_inputs(n_agents=1, horizon=math.e, degrees=(0,), gaps=(0.0, 1.0))
    val = regret_bound_complete_modified(b, 1)
    assert val == pytest.approx(33.983347464017314, abs=1e-10)


def test_modified_complete_leading_term_additive_in_log_n():
    b = toy_inputs(n_agents=1, degrees=(0,))
    lead = lambda n: sum(8 * 2.1 / g for g in (1.0,)) * math.log(b.horizon * n)
    assert lead(math.e * 4) - lead(4) == pytest.approx(8 * 2.1, rel=1e-12)


def test_modified_complete_sigma_zero_constants_only():
    b = toy_inputs(n_agents=2, degrees=(1, 1), sigma=0.0)
    val = regret_bound_complete_modified(b, 2)
    assert val == pytest.approx((2 + 3) * 1.0 + g_term(0, (1, 1)) / 2 * 1.0, rel=1e-12)


def test_modified_complete_rejects_incomplete_graph():
    b = toy_inputs(n_agents=3, degrees=(1, 2, 1))
    with pytest.raises(ValueError):
        regret_bound_complete_modified(b, 3)


def test_bounds_monotone_in_horizon_gap_sigma():
    for variant in ("ucb_share", "mp_ucb", "lf_ucb"):
        gamma = 1 if variant == "ucb_share" else 2
        mk = lambda T, gap, sigma: BoundInputs(
            gaps=(0.0, gap),
            optimal_index=0,
            min_gap=gap,
            sigma=sigma,
            xi=1.1,
            horizon=T,
            n_agents=4,
            gamma=gamma,
            chi_hat=2,
            gammabar_hat=1,
            degrees=(2, 2, 2, 2),
            degrees_gamma=(3, 3, 3, 3),
            degrees_gamma_minus_plus=(1, 1, 1, 1) if gamma == 1 else (3, 3, 3, 3),
        )
        for f in (regret_bound, comm_bound):
            ts = [f(variant, mk(T, 0.5, 1.0)) for T in (10, 50, 200, 1000)]
            assert all(a < b for a, b in zip(ts, ts[1:]))
            # gap monotonicity holds where the log term dominates the
            # linear-in-gap constants: small gaps, long horizon
            gaps = [f(variant, mk(1000, g, 1.0)) for g in (0.1, 0.2, 0.4, 0.6)]
            assert all(a > b for a, b in zip(gaps, gaps[1:]))
            sigmas = [f(variant, mk(100, 0.5, s)) for s in (0.5, 1.0, 2.0)]
            assert all(a < b for a, b in zip(sigmas, sigmas[1:]))


def test_exact_cover_bound_never_above_greedy_bound():
    rng = np.random.default_rng(31)
    env = make_env([gaussian(1, 1), gaussian(0, 1)])
    for _ in range(20):
        n = int(rng.integers(3, 11))
        topo = generate_topology(GraphSpec("erdos_renyi", n, 0.5), rng)
        gamma = int(rng.integers(1, 3))
        b = bound_inputs(env, topo, gamma, 1.1, 100.0)
        padj = adjacency_matrix(analyze(topo, gamma).power)
        exact = BoundInputs(
            **{
                **{f: getattr(b, f) for f in b.__dataclass_fields__},
                "chi_hat": exact_clique_cover_number(padj),
                "gammabar_hat": exact_dominating_number(padj),
            }
        )
        for variant in ("mp_ucb", "lf_ucb") if gamma > 1 else ("ucb_share",):
            assert regret_bound(variant, exact) <= regret_bound(variant, b) + 1e-9
            assert comm_bound(variant, exact) <= comm_bound(variant, b) + 1e-9


def test_bound_inputs_builder():
    env = make_env([gaussian(11, 1), gaussian(10, 1)])
    topo = generate_topology(GraphSpec("path", 4))
    b = bound_inputs(env, topo, 2, 1.1, 500)
    assert b.degrees == (1, 2, 2, 1)
    assert b.degrees_gamma == (2, 3, 3, 2)
    assert b.degrees_gamma_minus_plus == (2, 3, 3, 2)  # d_1 + 1
    b1 = bound_inputs(env, topo, 1, 1.1, 500)
    assert b1.degrees_gamma_minus_plus == (1, 1, 1, 1)  # d_0 = 0 by convention

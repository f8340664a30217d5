import numpy as np
import pytest

from cachemec.dual import dual_function, solve_optimal, stopping_residual, subgradient, subgradients
from cachemec.energy import average_energy
from cachemec.knapsack import build_instance
from cachemec.oracle import feasible_cachings
from cachemec.report import feasibility_violations
from cachemec.scenario import Scenario, StateSpace, SystemState, linear_catalog, reference_scenario
from cachemec.time_alloc import deadline_tight_allocations, priced_tables


@pytest.fixture(scope="module")
def base_report(base_case):
    s, space = base_case
    return solve_optimal(s, space=space, keep_trace=True)


def test_dual_at_zero_prices(base_case):
    s, space = base_case
    g, c, tables = dual_function(np.zeros(len(space)), space)
    inst = build_instance(tables[2], s)
    best = max(inst.value(v) for v in feasible_cachings(s))
    assert inst.value(c) == pytest.approx(best, rel=1e-14)
    full = np.where(space.active, s.deadline, 0.0)
    assert g == pytest.approx(average_energy(c, full, full, space), rel=1e-13)


def test_dual_concave_single_state():
    s = reference_scenario()
    space = StateSpace.from_states(s, [SystemState((0, 1), (5e-7, 1.5e-6), 0.4)])
    grid = np.logspace(-9, -3, 60)
    g = np.array([dual_function(np.array([v]), space)[0] for v in grid])
    for i in range(len(grid) - 2):
        for j in range(i + 2, len(grid), 7):
            mid = 0.5 * (grid[i] + grid[j])
            gm = dual_function(np.array([mid]), space)[0]
            assert gm >= 0.5 * (g[i] + g[j]) - 1e-15 * abs(gm)


def test_weak_duality_sampling(base_case):
    s, space = base_case
    rng = np.random.default_rng(4)
    primal = []
    for c in feasible_cachings(s):
        tu, td, _, _ = deadline_tight_allocations(c, space)
        primal.append(average_energy(c, tu, td, space))
        # equal split over the state's transfers is feasible too
        slots = ((1 - c)[None, :] + 1) * space.active
        share = s.deadline / slots.sum(axis=1, keepdims=True)
        primal.append(average_energy(c, np.where(space.active & (c == 0), share, 0.0),
                                     np.where(space.active, share, 0.0), space))
    floor = min(primal)
    for _ in range(30):
        lam = rng.uniform(0, 1, len(space)) * 10 ** rng.uniform(-9, -4)
        assert dual_function(lam, space)[0] <= floor * (1 + 1e-12)


def test_subgradient_examples():
    s = reference_scenario()
    st_ = SystemState((0, 0), (5e-7, 1.5e-6), 0.1)
    assert subgradient(st_, 0.0, np.array([0, 0, 0]), s) == pytest.approx(s.deadline, rel=1e-15)
    assert subgradient(st_, 0.0, np.array([1, 0, 0]), s) == pytest.approx(0.0, abs=1e-18)


def test_stopping_residual_one_sided():
    sub = np.array([-0.5, 0.2, -0.1])
    lam = np.array([0.0, 0.0, 1.0])
    assert stopping_residual(sub, lam) == pytest.approx(0.2)
    assert stopping_residual(np.array([-0.5]), np.array([0.0])) == 0.0


def test_fig3_gap_and_feasibility(base_case, base_report):
    s, space = base_case
    r = base_report
    assert r.converged
    assert -1e-9 <= r.duality_gap_rel <= 1e-3
    assert r.caching.tolist() == [0, 1, 0]
    assert np.all(r.multipliers >= 0)
    assert feasibility_violations(r, space) == []
    assert r.subgradient_max_residual < 1e-4 * s.deadline


def test_trace(base_report):
    r = base_report
    its = [row[0] for row in r.trace]
    assert its == list(range(1, r.iterations + 1))
    gs = np.array([row[1] for row in r.trace])
    # weak duality at every iterate, and the reported bound is the best seen
    assert np.all(gs <= r.average_energy * (1 + 1e-9))
    assert r.dual_value >= gs.max()
    assert np.all(np.diff(np.maximum.accumulate(gs)) >= 0)


def test_generous_budget_caches_useful_tasks():
    s = reference_scenario(cache_size=1.5e5, deadline=2.0)
    r = solve_optimal(s)
    assert r.caching.tolist() == [1, 1, 1]
    assert r.converged and abs(r.duality_gap_rel) <= 1e-3


def test_raw_step_rule_still_returns_feasible_policy(base_case):
    s, space = base_case
    r = solve_optimal(s, space=space, step_scale=1.0, max_iter=50)
    assert not r.converged and r.iterations == 50
    assert feasibility_violations(r, space) == []
    assert r.dual_value <= r.average_energy


def test_step_m_zero_allowed(base_case):
    s, space = base_case
    r = solve_optimal(s, space=space, step_m=0.0, max_iter=200)
    assert feasibility_violations(r, space) == []


def test_bad_max_iter(base_case):
    with pytest.raises(ValueError):
        solve_optimal(base_case[0], max_iter=0)


def test_subgradients_vectorized(base_case):
    s, space = base_case
    lam = np.random.default_rng(8).uniform(0, 2e-6, len(space))
    c = np.array([0, 1, 0])
    sub = subgradients(c, priced_tables(space, lam), s.deadline)
    for i in range(0, len(space), 3):
        assert sub[i] == pytest.approx(subgradient(space.state(i), lam[i], c, s), rel=1e-13, abs=1e-18)


def test_single_task_single_mobile():
    s = Scenario.build(1, linear_catalog(1), (1e-6,), (1.0,), zipf_gamma=0.0, cache_size=0.0)
    r = solve_optimal(s)
    assert r.caching.tolist() == [0]
    assert r.t_up[0, 0] + r.t_down[0, 0] == pytest.approx(s.deadline, rel=1e-9)


def test_zero_probability_states():
    # task 3 is never requested, so a third of the enumerated states carry no weight
    s = Scenario.build(2, linear_catalog(3), (5e-7, 1.5e-6), (0.5, 0.5), task_pmf=(0.6, 0.4, 0.0),
                       cache_size=5e4)
    r = solve_optimal(s)
    from cachemec.oracle import solve_bruteforce
    from cachemec.scenario import state_space
    space = state_space(s)
    assert feasibility_violations(r, space) == []
    assert np.all(np.isfinite(r.multipliers))
    assert r.average_energy == pytest.approx(solve_bruteforce(s, space=space).average_energy, rel=1e-3)

import numpy as np
import pytest

from cachemec.baselines import solve_baseline
from cachemec.energy import exec_energy_per_task, transfer_energy
from cachemec.heuristic import solve_suboptimal
from cachemec.report import feasibility_violations, used_time_per_state
from cachemec.scenario import Scenario, StateSpace, SystemState, TaskSpec, reference_scenario


def _one_state(s, tasks, channels):
    return StateSpace.from_states(s, [SystemState(tasks, channels, 1.0)])


def test_equal_split_two_uncached_tasks():
    s = reference_scenario()
    space = _one_state(s, (0, 1), (5e-7, 1.5e-6))
    r = solve_baseline(3, s, space=space)
    assert np.allclose(r.t_up, s.deadline / 4) and np.allclose(r.t_down, s.deadline / 4)


def test_equal_split_all_cached():
    s = reference_scenario(cache_size=1.5e5)
    space = _one_state(s, (0, 2), (5e-7, 1.5e-6))
    r = solve_baseline(1, s, c_dagger=[1, 1, 1], space=space)
    assert np.all(r.t_up == 0) and np.allclose(r.t_down, s.deadline / 2)


def test_proportional_split_one_task():
    s = Scenario.build(1, [TaskSpec(5e4, 1e4, 3e4)], (1e-6,), (1.0,), zipf_gamma=0.0)
    space = _one_state(s, (0,), (1e-6,))
    r = solve_baseline(2, s, c_dagger=[0], space=space)
    assert r.t_up[0, 0] == pytest.approx(s.deadline * 5 / 8, rel=1e-15)
    assert r.t_down[0, 0] == pytest.approx(s.deadline * 3 / 8, rel=1e-15)


def test_shared_task_is_sent_twice():
    # both mobiles want task 1: two uploads and two unicast downloads
    s = reference_scenario()
    space = _one_state(s, (0, 0), (5e-7, 1.5e-6))
    r = solve_baseline(3, s, space=space)
    T = s.deadline
    want = (transfer_energy(T / 4, 5e4, 5e-7, s) + transfer_energy(T / 4, 5e4, 1.5e-6, s)
            + transfer_energy(T / 4, 3e4, 5e-7, s) + transfer_energy(T / 4, 3e4, 1.5e-6, s)
            + exec_energy_per_task(s)[0])
    assert r.average_energy == pytest.approx(want, rel=1e-14)
    task = solve_baseline(3, s, reading="per_task", space=space)
    assert task.t_up.shape == (1, 3)
    want_task = (transfer_energy(T / 2, 5e4, 1.5e-6, s) + transfer_energy(T / 2, 3e4, 5e-7, s)
                 + exec_energy_per_task(s)[0])
    assert task.average_energy == pytest.approx(want_task, rel=1e-14)


def test_baseline3_average_recomputed_by_loops(base_case):
    s, space = base_case
    r = solve_baseline(3, s, space=space)
    total = 0.0
    for i in range(len(space)):
        st_ = space.state(i)
        t = s.deadline / (2 * s.num_mobiles)
        e = 0.0
        for x, h in zip(st_.tasks, st_.channels):
            task = s.tasks[x]
            e += transfer_energy(t, task.upload_bits, h, s) + transfer_energy(t, task.result_bits, h, s)
        for n in set(st_.tasks):
            e += s.mu * s.tasks[n].cycles * s.cpu_freq ** 2
        total += st_.probability * e
    assert r.average_energy == pytest.approx(total, rel=1e-13)


@pytest.mark.parametrize("reading", ["per_request", "per_task"])
def test_feasible_and_ordered(base_case, reading):
    s, space = base_case
    sub = solve_suboptimal(s, space=space)
    rs = {i: solve_baseline(i, s, sub.caching, reading=reading, space=space) for i in (1, 2, 3, 4)}
    for r in rs.values():
        assert feasibility_violations(r, space) == []
        assert np.all(used_time_per_state(r, space) <= s.deadline * (1 + 1e-12))
        assert r.metadata["reading"] == reading
    e = {i: r.average_energy for i, r in rs.items()}
    assert sub.average_energy <= e[1] <= e[3]
    assert sub.average_energy <= e[2] <= e[4]
    assert rs[3].caching.tolist() == [0, 0, 0]


def test_default_caching_comes_from_heuristic(base_case):
    s, space = base_case
    r = solve_baseline(1, s, space=space)
    assert r.caching.tolist() == solve_suboptimal(s, space=space).caching.tolist()


def test_bad_arguments(base_case):
    s, space = base_case
    with pytest.raises(ValueError):
        solve_baseline(5, s, space=space)
    with pytest.raises(ValueError):
        solve_baseline(1, s, [0, 0, 0], reading="other", space=space)
    with pytest.raises(ValueError):
        solve_baseline(1, s, [1, 1, 1], space=space)

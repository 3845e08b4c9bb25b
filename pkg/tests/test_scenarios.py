import numpy as np
import pytest

from dbada.association import StateVector
from dbada.scenarios import (DBADA, EA, MO, PA, PFS, K_MAX, EnergyModel, ScenarioSpec,
                             dbada_optimize, evaluate_state, network_power,
                             parse_scenario, run_scenario, state_utilities)
from dbada.topology import (LayoutConfig, LinkGainTable, UserSet, build_layout,
                            drop_users, link_gains)

from conftest import make_drop


def test_network_power_examples(energy):
    assert network_power(StateVector.all_idle(6), energy) == pytest.approx(1173.0)
    assert network_power(StateVector.all_active(6), energy) == pytest.approx(1224.0)
    assert network_power(StateVector(()), energy) == pytest.approx(1170.0)


def test_energy_model_validation():
    with pytest.raises(ValueError):
        EnergyModel(pico_active_w=0.5, pico_idle_w=0.5)


def _empty_gains(k=6):
    return LinkGainTable(np.zeros((0, k + 1)))


def test_empty_drop_objective(params, energy):
    ev = evaluate_state(StateVector.all_active(6), _empty_gains(), params, energy, beta=1.0)
    assert ev.utility_sum == 0.0
    assert ev.objective == -1224.0
    best = dbada_optimize(_empty_gains(), params, energy, beta=1.0)
    assert str(best.state) == "000000"


def test_all_idle_equals_mo_pfs(params, energy):
    g = make_drop(3, 4)
    idle = evaluate_state(StateVector.all_idle(6), g, params, energy, beta=0.5)
    mo = run_scenario(ScenarioSpec(MO, PFS), g, params, energy)
    np.testing.assert_array_equal(idle.rate_bps, mo.rate_bps)
    assert idle.objective == mo.utility_sum - 0.5 * 1173.0


def test_unused_pico_changes_only_energy(params, energy):
    layout = build_layout()
    # both users right next to the macro
    users = UserSet(np.array([[50.0, 0.0], [0.0, -60.0]]), np.array([-1, -1]))
    g = link_gains(layout, users)
    off = evaluate_state(StateVector.all_idle(6), g, params, energy, beta=0.7)
    on = evaluate_state(StateVector((0, 0, 1, 0, 0, 0)), g, params, energy, beta=0.7)
    assert on.utility_sum == off.utility_sum
    assert off.objective - on.objective == pytest.approx(0.7 * (9.0 - 0.5), rel=1e-12)


def test_evaluation_consistency(params, energy):
    g = make_drop(5, 6)
    ev = evaluate_state(StateVector((1, 1, 0, 0, 1, 0)), g, params, energy, beta=0.3)
    util = np.log(ev.rate_bps).sum()
    assert ev.objective == pytest.approx(util - 0.3 * ev.network_power_w, abs=1e-9)
    assert sorted(ev.allocation.users.tolist()) == list(range(g.n_users))


def test_dbada_without_picos_is_mo(params, energy):
    layout = build_layout(LayoutConfig(hotspots=0))
    users = drop_users(layout, 40, 0, np.random.default_rng(0))
    g = link_gains(layout, users)
    d = dbada_optimize(g, params, energy, beta=0.5)
    mo = run_scenario(ScenarioSpec(MO, PFS), g, params, energy)
    assert len(d.state) == 0
    np.testing.assert_array_equal(d.rate_bps, mo.rate_bps)


def test_huge_beta_selects_all_idle(params, energy):
    g = make_drop(11, 8)
    util = state_utilities(g, params)
    spread = util.max() - util.min()
    beta = max(1e6, 2 * spread / (energy.pico_active_w - energy.pico_idle_w))
    assert str(dbada_optimize(g, params, energy, beta).state) == "000000"


def test_zero_beta_prefers_utility(params, energy):
    g = make_drop(11, 8)
    util = state_utilities(g, params)
    d = dbada_optimize(g, params, energy, 0.0)
    assert d.utility_sum == pytest.approx(util.max(), abs=1e-9)


def test_unit_rescaling_keeps_argmax(params, energy):
    for hour in (0, 4, 8):
        g = make_drop(21, hour)
        for beta in (0.0, 0.1, 0.5):
            a = dbada_optimize(g, params, energy, beta)
            b = dbada_optimize(g, params, energy, beta, rate_unit_bps=1e6)
            assert a.state == b.state


def test_dbada_reports_evaluate_state_exactly(params, energy):
    g = make_drop(8, 7)
    d = run_scenario(ScenarioSpec(DBADA, beta=0.5), g, params, energy)
    e = evaluate_state(d.state, g, params, energy, 0.5)
    assert d.objective == e.objective
    np.testing.assert_array_equal(d.rate_bps, e.rate_bps)


def test_state_utilities_match_evaluate_state(params, energy):
    g = make_drop(2, 6)
    util = state_utilities(g, params)
    for bits in (0, 5, 42, 63):
        ev = evaluate_state(StateVector.from_bits(bits, 6), g, params, energy, 0.0)
        assert util[bits] == ev.utility_sum


def test_dominance_over_enumerated_extremes(params, energy):
    for hour in range(0, 9, 2):
        g = make_drop(4, hour)
        d = dbada_optimize(g, params, energy, 0.5)
        for s in (StateVector.all_idle(6), StateVector.all_active(6)):
            assert d.objective >= evaluate_state(s, g, params, energy, 0.5).objective


def test_k_max_enforced(params, energy):
    g = LinkGainTable(np.full((2, K_MAX + 2), 1e-10))
    with pytest.raises(ValueError):
        dbada_optimize(g, params, energy, 0.5)


def test_tie_break_prefers_fewer_active():
    from dbada.scenarios import select_state
    obj = np.array([1.0, 2.0, 2.0, 2.0 - 1e-12])
    assert str(select_state(obj, 2)) == "01"
    obj = np.array([0.0, 3.0, 3.0 + 5e-10, 1.0])
    assert str(select_state(obj, 2)) == "01"


def test_pa_alpha_zero_matches_mo_without_pico_users(params, energy):
    layout = build_layout()
    users = UserSet(np.array([[60.0, 10.0], [-100.0, 40.0], [0.0, 200.0]]), np.full(3, -1))
    g = link_gains(layout, users)
    for sched in (PFS, EA):
        pa = run_scenario(ScenarioSpec(PA, sched, alpha_percent=0.0), g, params, energy)
        mo = run_scenario(ScenarioSpec(MO, sched), g, params, energy)
        np.testing.assert_array_equal(pa.rate_bps, mo.rate_bps)


def test_pa50_ea_splits_pools(params, energy):
    layout = build_layout()
    ang = 2 * np.pi * np.arange(10) / 10
    macro_users = 100 * np.column_stack([np.cos(ang), np.sin(ang)])
    pico_users = layout.pico_positions[0] + 15 * np.column_stack([np.cos(ang), np.sin(ang)])
    users = UserSet(np.vstack([macro_users, pico_users]), np.r_[np.full(10, -1), np.zeros(10, int)])
    g = link_gains(layout, users)
    ev = run_scenario(ScenarioSpec(PA, EA, alpha_percent=50.0), g, params, energy)
    assert (ev.association.serving_bs[:10] == 0).all()
    assert (ev.association.serving_bs[10:] == 1).all()
    np.testing.assert_allclose(ev.bandwidth_hz, 5e6)


def test_pa_empty_pool_leaves_budget_unused(params, energy):
    layout = build_layout()
    users = UserSet(np.array([[60.0, 10.0], [-100.0, 40.0]]), np.full(2, -1))
    g = link_gains(layout, users)
    ev = run_scenario(ScenarioSpec(PA, PFS, alpha_percent=20.0), g, params, energy)
    assert ev.bandwidth_hz.sum() == pytest.approx(80e6, rel=1e-12)


def test_pa_pfs_utility_at_least_ea(params, energy):
    for hour in (1, 5, 8):
        g = make_drop(6, hour)
        for alpha in (20.0, 50.0, 80.0):
            pfs = run_scenario(ScenarioSpec(PA, PFS, alpha_percent=alpha), g, params, energy)
            ea = run_scenario(ScenarioSpec(PA, EA, alpha_percent=alpha), g, params, energy)
            assert pfs.utility_sum >= ea.utility_sum - 1e-9


@pytest.mark.parametrize("kwargs", [
    dict(kind="XX"),
    dict(kind=PA),
    dict(kind=MO, alpha_percent=20.0),
    dict(kind=DBADA),
    dict(kind=DBADA, beta=0.5, scheduler=EA),
    dict(kind=PA, alpha_percent=120.0),
])
def test_invalid_specs(kwargs):
    with pytest.raises(ValueError):
        ScenarioSpec(**kwargs)


def test_parse_scenarios():
    assert parse_scenario("MO/PFS")[0].label == "MO/PFS"
    assert parse_scenario("PA20%/EA")[0].label == "PA20/EA"
    assert [s.label for s in parse_scenario("DBADA", (0.0, 0.5))] == [
        "DBADA/beta=0", "DBADA/beta=0.5"]
    assert parse_scenario("DBADA/beta=2")[0].beta == 2.0
    with pytest.raises(ValueError):
        parse_scenario("PA/EA")

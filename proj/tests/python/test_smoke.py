"""Smoke tests for the python bindings."""

import math

import pytest

import crnstab as cs


def default_params():
    return cs.PartitionParams()


def default_energy():
    return cs.EnergyParams.make(default_params())


def test_falling_factorial():
    assert cs.falling_factorial(5, 3) == 60
    assert cs.falling_factorial(2, 4) == 0
    assert cs.falling_factorial(4, 4) == 24
    # exact 80-bit value, checked against python integer arithmetic
    expected = 65536 * 65535 * 65534 * 65533 * 65532
    assert cs.falling_factorial(65536, 5) == expected
    with pytest.raises(OverflowError):
        cs.falling_factorial(2**63, 4)


def test_propensities_and_targets():
    assert cs.propensities(cs.Chain.X, cs.State(3, 2)) == [12, 0, 0, 0, 1]
    assert cs.propensities(cs.Chain.Y, cs.State(1, 5)) == [0, 3]
    targets = cs.jump_targets(cs.Chain.X, cs.State(4, 0))
    assert [(t.x1, t.x2, r) for t, r in targets] == [(0, 0, 24.0), (5, 1, 1.0)]
    with pytest.raises(ValueError):
        cs.propensities(cs.Chain.Z, cs.State(2, 2))


def test_generator_with_python_callable():
    value = cs.apply_generator(cs.Chain.X, lambda x: float(x.x1 + x.x2), cs.State(4, 4))
    assert value == 386.0


def test_partition():
    p = default_params()
    assert cs.classify(cs.State(100, 1), p) == cs.Region.SideRight
    assert cs.classify(cs.State(10, 10), p) == cs.Region.ConeCenter
    assert cs.classify(cs.State(60, 20), p) == cs.Region.ConeRight
    a = cs.to_axial(cs.State(3, 2))
    assert (a.r, a.d) == (5, 1)
    back = cs.from_axial(a)
    assert back == cs.State(3, 2)
    with pytest.raises(ValueError):
        cs.from_axial(cs.AxialCoord(5, 2))
    assert cs.in_delta(cs.State(150, 5), p) == cs.DeltaSide.Right
    assert abs(cs.cone_exit_q(p) - 29.0 / 31.0) < 1e-15


def test_energy_and_drift():
    ep = default_energy()
    assert cs.energy(cs.State(2, 2), ep) == 16.0
    assert abs(cs.c_S(1.0 / 30.0) - 0.98398071079402827) < 1e-13
    assert cs.drift(cs.State(0, 0), ep) == cs.energy(cs.State(1, 1), ep)
    assert cs.drift(cs.State(200, 2), ep) < -1.0
    assert cs.energy_axial(100.0, 50.0, ep) == 400.0


def test_verify_drift():
    report = cs.verify_drift(cs.ScanRegion.OutsideInteriorCone, 30, 80, 1.0,
                             default_energy(), jobs=2)
    assert report.violation_count == 0
    assert report.certified_min_radius == 30
    interior = cs.verify_drift(cs.ScanRegion.InteriorCone, 30, 80, 1.0, default_energy())
    assert interior.violation_count > 0
    assert interior.certified_min_radius is None


def test_cond_const():
    report = cs.check_cond_const(0.01, 25.0, default_params())
    assert report.ok()


def test_ode():
    eqs = cs.equilibria()
    assert [round(e.value, 4) for e in eqs] == [0.7445, 3.9961]
    assert eqs[0].stable and not eqs[1].stable
    oracle = cs.blow_up_time(5.0)
    assert abs(oracle.value - 0.0012443565368880774) < 1e-9
    result = cs.integrate(cs.Vec2(5.0, 5.0), 1.0)
    assert result.verdict == cs.OdeVerdict.BlowUp
    assert abs(result.blow_up_time - oracle.value) <= 0.01 * oracle.value
    settled = cs.integrate(cs.Vec2(0.5, 0.5), 50.0)
    assert settled.verdict == cs.OdeVerdict.ConvergedToEquilibrium


def test_ssa_determinism():
    system = cs.ReactionSystem(cs.Chain.X)
    params = default_params()
    stops = [cs.StopRule(cs.StopKind.Events, 2000)]
    a = cs.ssa_run(system, cs.State(5, 5), stops, params, cs.RngStream(11, 3))
    b = cs.ssa_run(system, cs.State(5, 5), stops, params, cs.RngStream(11, 3))
    assert a.event_count == b.event_count == 2000
    assert a.stop_reason == "events"
    assert [e.t for e in a.events] == [e.t for e in b.events]
    assert all(e.state.x1 >= 0 and e.state.x2 >= 0 for e in a.events)


def test_ou_and_constants():
    assert abs(cs.k0() - 0.59470803871759037) < 1e-14
    assert 2.0 < cs.c_tau() < 4.0
    assert cs.hitting_tail_bound(1.0, 60.0) == 1.0
    rng = cs.RngStream(1, 0)
    samples = [cs.ou_transition_sample(1.0, 0.5, rng) for _ in range(20000)]
    mean = sum(samples) / len(samples)
    assert abs(mean - math.exp(1.25)) < 0.15


def test_monotone_chain():
    result = cs.monotone_chain_run(50, 6, 1.0, 2.0, 200000, cs.RngStream(5, 0))
    assert all(u >= l for u, l in zip(result.upper, result.lower))
    assert all((u - l) % 2 == 0 for u, l in zip(result.upper, result.lower))


def test_coupled_and_excursions():
    params = default_params()
    x0 = cs.from_axial(cs.AxialCoord(200, 0))
    result = cs.coupled_yz_run(x0, 0.3, 200, params, cs.RngStream(9, 0))
    assert result.sup_distance >= 0.0
    assert result.y.event_count > 0

    traj = cs.ssa_run(cs.ReactionSystem(cs.Chain.X), cs.State(5, 5),
                      [cs.StopRule(cs.StopKind.Events, 50000)], params, cs.RngStream(4, 0))
    excursions = cs.excursion_scan(traj, 12.0, 25.0)
    assert all(e.peak > 25.0 for e in excursions)

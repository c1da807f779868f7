import io

import numpy as np
import pytest

import geomotion as gm
from conftest import cfg, tangent


class TestGeodesicAcceleration:
    def test_constant_metric_zero(self, pendulum, gantry):
        q = cfg(0.3)
        assert np.array_equal(gm.geodesic_acceleration(pendulum, q, tangent(q, 2.0)), np.zeros(1))
        qg = cfg(0.1, -0.2)
        assert np.array_equal(
            gm.geodesic_acceleration(gantry, qg, tangent(qg, 1.0, -2.0)), np.zeros(2)
        )

    def test_frozen_value(self, planar2, q_ref):
        a = gm.geodesic_acceleration(planar2, q_ref, tangent(q_ref, 1.0, 0.0))
        assert np.allclose(a, [0.5, -1.5], atol=1e-8)

    def test_rest_gives_zero(self, planar2, q_ref):
        a = gm.geodesic_acceleration(planar2, q_ref, tangent(q_ref, 0.0, 0.0))
        assert np.array_equal(a, np.zeros(2))

    def test_matches_symbolic(self, planar2, p2_oracle, rng):
        for _ in range(5):
            q = rng.uniform(-np.pi, np.pi, 2)
            v = rng.uniform(-1, 1, 2)
            base = gm.Configuration(q)
            a = gm.geodesic_acceleration(planar2, base, gm.TangentVector(base, v))
            assert np.max(np.abs(a - p2_oracle.acceleration(q, v))) < 1e-8

    def test_base_mismatch(self, planar2, q_ref):
        with pytest.raises(gm.BaseMismatchError):
            gm.geodesic_acceleration(planar2, q_ref, tangent(cfg(0, 0), 1.0, 0.0))


class TestShoot:
    def test_pendulum_straight_line(self, pendulum):
        traj = gm.shoot(pendulum, tangent(cfg(0.0), 1.0), 1.0, step=1e-3)
        assert traj.n_samples == 1001
        assert abs(traj.q[-1, 0] - 1.0) < 1e-12
        assert abs(traj.qdot[-1, 0] - 1.0) < 1e-12
        assert traj.times[0] == 0.0 and traj.times[-1] == 1.0

    def test_first_sample_is_initial_state(self, planar2, q_ref):
        start = tangent(q_ref, 1.0, 0.0)
        traj = gm.shoot(planar2, start, 0.5)
        assert np.array_equal(traj.q[0], q_ref.q)
        assert np.array_equal(traj.qdot[0], start.v)
        assert np.allclose(traj.qddot[0], [0.5, -1.5], atol=1e-8)
        assert traj.energy == pytest.approx(1.5, abs=1e-12)

    def test_partial_final_step(self, pendulum):
        traj = gm.shoot(pendulum, tangent(cfg(0.0), 1.0), 0.0105, step=1e-3)
        assert traj.times[-1] == 0.0105
        assert traj.n_samples == 12
        assert abs(traj.q[-1, 0] - 0.0105) < 1e-14

    def test_energy_and_residual_invariants(self, planar2, rng):
        for _ in range(3):
            q = gm.Configuration(rng.uniform(-1, 1, 2))
            start = gm.TangentVector(q, rng.uniform(-1, 1, 2))
            traj = gm.shoot(planar2, start, 1.0, step=1e-3)
            drift, residual = gm.trajectory_diagnostics(planar2, traj)
            assert drift < 1e-6
            assert residual < 1e-8

    def test_matches_passive_oracle(self, planar2, rng):
        for _ in range(3):
            q = gm.Configuration(rng.uniform(-1, 1, 2))
            start = gm.TangentVector(q, rng.uniform(-1, 1, 2))
            a = gm.shoot(planar2, start, 1.0, step=1e-3)
            b = gm.passive_dynamics_oracle(planar2, start, 1.0, step=1e-3)
            assert np.max(np.abs(a.q - b.q)) < 1e-6

    def test_oracle_trivial_cases(self, gantry, planar2, q_ref):
        qg = cfg(0.0, 0.0)
        a = gm.shoot(gantry, tangent(qg, 0.7, -0.2), 1.0, step=1e-2)
        b = gm.passive_dynamics_oracle(gantry, tangent(qg, 0.7, -0.2), 1.0, step=1e-2)
        assert np.array_equal(a.q, b.q)
        rest = gm.passive_dynamics_oracle(planar2, tangent(q_ref, 0.0, 0.0), 0.2, step=1e-3)
        assert np.max(np.abs(rest.q - q_ref.q)) == 0.0

    def test_time_reversal(self, planar2, q_ref):
        start = tangent(q_ref, 1.0, -0.4)
        fwd = gm.shoot(planar2, start, 1.0, step=1e-3)
        end = fwd.terminal_state()
        back = gm.shoot(planar2, gm.TangentVector(end.base, -end.v), 1.0, step=1e-3)
        assert np.max(np.abs(back.q[-1] - q_ref.q)) < 1e-5

    def test_velocity_rescaling(self, planar2, q_ref):
        slow = gm.shoot(planar2, tangent(q_ref, 0.8, -0.3), 1.0, step=1e-3)
        fast = gm.shoot(planar2, tangent(q_ref, 1.6, -0.6), 0.5, step=1e-3)
        assert np.max(np.abs(fast.q[-1] - slow.q[-1])) < 1e-6

    def test_bad_arguments(self, planar2, q_ref):
        start = tangent(q_ref, 1.0, 0.0)
        with pytest.raises(gm.InputError):
            gm.shoot(planar2, start, -1.0)
        with pytest.raises(gm.InputError):
            gm.shoot(planar2, start, 1.0, step=2.0)
        with pytest.raises(gm.InputError):
            gm.shoot(planar2, start, 1.0, step=0.0)

    def test_divergence_guard(self, planar2, q_ref):
        with pytest.raises(gm.DivergenceError):
            gm.shoot(planar2, tangent(q_ref, 2.0e6, 0.0), 1.0, step=1e-3)

    def test_singular_model_reports(self):
        doc = """
name: massless
joints:
  - {kind: revolute, axis: [0, 0, 1], origin: {xyz: [0, 0, 0], rpy: [0, 0, 0]}}
  - {kind: revolute, axis: [0, 0, 1], origin: {xyz: [1, 0, 0], rpy: [0, 0, 0]}}
links:
  - {mass: 1.0, com: [1, 0, 0], inertia: [0, 0, 0, 0, 0, 0]}
  - {mass: 0.0, com: [1, 0, 0], inertia: [0, 0, 0, 0, 0, 0]}
"""
        model = gm.load_model(doc)
        with pytest.raises(gm.SingularMetricError):
            gm.shoot(model, tangent(cfg(0.0, 0.5), 1.0, 0.0), 1.0)


class TestConnect:
    def test_same_endpoint_zero_velocity(self, planar2, q_ref):
        v0 = gm.connect(planar2, q_ref, q_ref, 1.0)
        assert np.array_equal(v0.v, np.zeros(2))

    def test_constant_metric_euclidean_chart(self, gantry):
        qa, qb = cfg(0.1, -0.2), cfg(0.9, 0.4)
        v0 = gm.connect(gantry, qa, qb, 1.0)
        assert np.max(np.abs(v0.v - (qb.q - qa.q))) < 1e-12
        v0_half = gm.connect(gantry, qa, qb, 2.0)
        assert np.max(np.abs(v0_half.v - (qb.q - qa.q) / 2.0)) < 1e-12

    def test_round_trip(self, planar2, q_ref):
        target = cfg(1.0, 0.5)
        v0 = gm.connect(planar2, q_ref, target, 1.0)
        landed = gm.shoot(planar2, v0, 1.0, step=1e-3)
        assert np.max(np.abs(landed.q[-1] - target.q)) < 1e-6

    def test_non_convergence_reports_best_residual(self, planar2, q_ref):
        with pytest.raises(gm.ConvergenceError) as info:
            gm.connect(planar2, q_ref, cfg(1.0, 0.5), 1.0, max_iter=1)
        assert info.value.best_residual is not None
        assert info.value.best_residual > 0.0

    def test_dimension_and_duration_errors(self, planar2, q_ref):
        with pytest.raises(gm.InputError):
            gm.connect(planar2, q_ref, cfg(1.0), 1.0)
        with pytest.raises(gm.InputError):
            gm.connect(planar2, q_ref, q_ref, 0.0)


class TestRiemannianLength:
    def test_unit_speed_line(self, pendulum):
        traj = gm.shoot(pendulum, tangent(cfg(0.0), 1.0), 1.0, step=1e-3)
        assert gm.riemannian_length(pendulum, traj) == pytest.approx(1.0, abs=1e-12)

    def test_constant_speed_identity(self, planar2, rng):
        for _ in range(3):
            q = gm.Configuration(rng.uniform(-1, 1, 2))
            start = gm.TangentVector(q, rng.uniform(-1, 1, 2))
            traj = gm.shoot(planar2, start, 1.0, step=1e-3)
            expected = np.sqrt(2.0 * traj.energy) * traj.duration
            assert gm.riemannian_length(planar2, traj) == pytest.approx(expected, rel=1e-6)

    def test_geodesic_shorter_than_straight(self, planar2):
        qa, qb = cfg(-0.3, 2.2), cfg(0.8, 0.7)
        v0 = gm.connect(planar2, qa, qb, 1.0)
        geo = gm.shoot(planar2, v0, 1.0, step=1e-3)
        straight = gm.straight_line_path(planar2, qa, qb, 1.0, step=1e-3)
        len_geo = gm.riemannian_length(planar2, geo)
        len_straight = gm.riemannian_length(planar2, straight)
        assert len_geo < len_straight - 1e-4

    def test_straight_path_fields(self, planar2):
        qa, qb = cfg(0.0, 1.0), cfg(0.5, 0.5)
        straight = gm.straight_line_path(planar2, qa, qb, 1.0, step=1e-3)
        assert straight.n_samples == 1001
        assert np.array_equal(straight.q[0], qa.q)
        assert np.array_equal(straight.q[-1], qb.q)
        assert np.array_equal(straight.qddot, np.zeros_like(straight.q))


class TestTrajectoryCsv:
    def test_round_trip_exact(self, planar2, q_ref):
        traj = gm.shoot(planar2, tangent(q_ref, 1.0, -0.5), 0.25, step=1e-3)
        text = gm.trajectory_to_csv(traj)
        back = gm.read_trajectory_csv(text)
        assert np.array_equal(back.times, traj.times)
        assert np.array_equal(back.q, traj.q)
        assert np.array_equal(back.qdot, traj.qdot)
        assert np.array_equal(back.qddot, traj.qddot)
        assert np.array_equal(back.energies, traj.energies)
        checks = gm.check_trajectory(planar2, back)
        assert all(passed for _, passed, _, _ in checks)

    def test_header_format(self, planar2, q_ref):
        traj = gm.shoot(planar2, tangent(q_ref, 1.0, 0.0), 0.01, step=1e-3)
        text = gm.trajectory_to_csv(traj)
        assert text.splitlines()[0] == "t,q1,q2,qd1,qd2,qdd1,qdd2,energy"

    def test_malformed_rejected(self):
        with pytest.raises(gm.InputError):
            gm.read_trajectory_csv("bogus\n1,2,3\n")
        with pytest.raises(gm.InputError):
            gm.read_trajectory_csv("t,q1,qd1,qdd1,energy\n0,0,1,0\n")
        with pytest.raises(gm.InputError):
            gm.read_trajectory_csv("t,q1,qd1,qdd1,energy\n0,0,1,0,x\n")

    def test_write_to_file_handle(self, pendulum, tmp_path):
        traj = gm.shoot(pendulum, tangent(cfg(0.0), 1.0), 0.02, step=1e-2)
        path = tmp_path / "traj.csv"
        with open(path, "w") as fh:
            gm.write_trajectory_csv(traj, fh)
        back = gm.read_trajectory_csv(path.read_text())
        assert np.array_equal(back.q, traj.q)

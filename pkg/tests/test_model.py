import numpy as np
import pytest
from scipy.spatial.transform import Rotation

import geomotion as gm
from conftest import cfg

TWO_LINK_DOC = """
name: two-link
joints:
  - kind: revolute
    axis: [0.0, 0.0, 1.0]
    origin: {xyz: [0.0, 0.0, 0.0], rpy: [0.0, 0.0, 0.0]}
  - kind: revolute
    axis: [0.0, 0.0, 1.0]
    origin: {xyz: [1.0, 0.0, 0.0], rpy: [0.0, 0.0, 0.0]}
links:
  - {mass: 1.0, com: [1.0, 0.0, 0.0], inertia: [0.0, 0.0, 0.0, 0.0, 0.0, 0.0]}
  - {mass: 1.0, com: [1.0, 0.0, 0.0], inertia: [0.0, 0.0, 0.0, 0.0, 0.0, 0.0]}
"""


class TestLoadModel:
    def test_round_trip(self):
        model = gm.load_model(TWO_LINK_DOC)
        assert model.dof == 2
        assert model.name == "two-link"
        assert model.joints[1].origin_xyz[0] == 1.0
        assert model.links[0].mass == 1.0

    def test_zero_axis_rejected(self):
        doc = TWO_LINK_DOC.replace("axis: [0.0, 0.0, 1.0]", "axis: [0.0, 0.0, 0.0]", 1)
        with pytest.raises(gm.ModelError, match="axis not unit norm"):
            gm.load_model(doc)

    def test_asymmetric_inertia_names_link(self):
        doc = TWO_LINK_DOC.replace(
            "  - {mass: 1.0, com: [1.0, 0.0, 0.0], inertia: [0.0, 0.0, 0.0, 0.0, 0.0, 0.0]}",
            "  - {mass: 1.0, com: [1.0, 0.0, 0.0], inertia: [[1.0, 0.5, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]}",
            1,
        )
        with pytest.raises(gm.ModelError, match="link 1.*not symmetric"):
            gm.load_model(doc)

    def test_yaml_syntax_error_reports_line(self):
        with pytest.raises(gm.ModelError, match="line"):
            gm.load_model("name: x\njoints: [\n")

    def test_missing_field_locus(self):
        with pytest.raises(gm.ModelError, match=r"joints\[0\]"):
            gm.load_model("name: x\njoints:\n  - {kind: revolute}\nlinks:\n  - {mass: 1, com: [0,0,0], inertia: [0,0,0,0,0,0]}\n")

    def test_count_mismatch(self):
        doc = TWO_LINK_DOC.replace(
            "  - {mass: 1.0, com: [1.0, 0.0, 0.0], inertia: [0.0, 0.0, 0.0, 0.0, 0.0, 0.0]}\n"
            "  - {mass: 1.0, com: [1.0, 0.0, 0.0], inertia: [0.0, 0.0, 0.0, 0.0, 0.0, 0.0]}",
            "  - {mass: 1.0, com: [1.0, 0.0, 0.0], inertia: [0.0, 0.0, 0.0, 0.0, 0.0, 0.0]}",
        )
        with pytest.raises(gm.ModelError, match="joints"):
            gm.load_model(doc)

    def test_negative_mass_rejected(self):
        doc = TWO_LINK_DOC.replace("mass: 1.0", "mass: -1.0", 1)
        with pytest.raises(gm.ModelError, match="mass"):
            gm.load_model(doc)

    def test_triangle_inequality_rejected(self):
        doc = TWO_LINK_DOC.replace(
            "inertia: [0.0, 0.0, 0.0, 0.0, 0.0, 0.0]", "inertia: [1.0, 1.0, 3.0, 0.0, 0.0, 0.0]", 1
        )
        with pytest.raises(gm.ModelError, match="triangle"):
            gm.load_model(doc)

    def test_configuration_validation(self):
        with pytest.raises(gm.InputError, match="non-finite"):
            gm.Configuration([np.nan, 0.0])
        with pytest.raises(gm.InputError):
            gm.TangentVector(cfg(0.0, 0.0), [1.0])


class TestForwardKinematics:
    def test_straight_chain(self, planar2):
        poses = gm.forward_kinematics(planar2, cfg(0.0, 0.0))
        tip = poses[2] @ np.array([1.0, 0.0, 0.0, 1.0])
        assert np.allclose(tip[:3], [2.0, 0.0, 0.0], atol=1e-12)
        assert np.array_equal(poses[0], np.eye(4))

    def test_planar_rotation(self, planar2):
        poses = gm.forward_kinematics(planar2, cfg(np.pi / 2, 0.0))
        tip = poses[2] @ np.array([1.0, 0.0, 0.0, 1.0])
        assert np.allclose(tip[:3], [0.0, 2.0, 0.0], atol=1e-12)

    @pytest.mark.parametrize("name", ["planar2", "arm7"])
    def test_matches_transform_product_oracle(self, name, rng, request):
        model = request.getfixturevalue(name)
        for _ in range(10):
            q = rng.uniform(-2.0, 2.0, model.dof)
            poses = gm.forward_kinematics(model, gm.Configuration(q))
            # independent recomputation: homogeneous product with scipy rotations
            ref = np.eye(4)
            for i, joint in enumerate(model.joints):
                origin = np.eye(4)
                origin[:3, :3] = Rotation.from_euler("xyz", joint.origin_rpy).as_matrix()
                origin[:3, 3] = joint.origin_xyz
                motion = np.eye(4)
                if joint.kind == "revolute":
                    motion[:3, :3] = Rotation.from_rotvec(q[i] * joint.axis).as_matrix()
                else:
                    motion[:3, 3] = q[i] * joint.axis
                ref = ref @ origin @ motion
                assert np.allclose(poses[i + 1], ref, atol=1e-12)

    def test_dimension_mismatch(self, planar2):
        with pytest.raises(gm.InputError, match="dimension mismatch"):
            gm.forward_kinematics(planar2, cfg(0.0))


class TestMassMatrix:
    def test_pendulum_constant(self, pendulum):
        for q in (-2.0, 0.0, 0.7, 3.5):
            assert np.allclose(gm.mass_matrix(pendulum, cfg(q)), [[1.0]], atol=1e-14)

    def test_two_link_right_angle(self, planar2):
        g = gm.mass_matrix(planar2, cfg(0.0, np.pi / 2))
        assert np.allclose(g, [[3.0, 1.0], [1.0, 1.0]], atol=1e-12)

    def test_against_symbolic_oracle(self, planar2, p2_oracle, rng):
        for _ in range(10):
            q = rng.uniform(-np.pi, np.pi, 2)
            got = gm.mass_matrix(planar2, gm.Configuration(q))
            assert np.max(np.abs(got - p2_oracle.metric(q))) < 1e-10

    def test_exact_symmetry(self, arm7, rng):
        for _ in range(5):
            g = gm.mass_matrix(arm7, gm.Configuration(rng.uniform(-2, 2, 7)))
            assert np.array_equal(g, g.T)

    def test_massless_distal_link_singular(self):
        doc = TWO_LINK_DOC.replace(
            "  - {mass: 1.0, com: [1.0, 0.0, 0.0], inertia: [0.0, 0.0, 0.0, 0.0, 0.0, 0.0]}\n"
            "  - {mass: 1.0, com: [1.0, 0.0, 0.0], inertia: [0.0, 0.0, 0.0, 0.0, 0.0, 0.0]}",
            "  - {mass: 1.0, com: [1.0, 0.0, 0.0], inertia: [0.0, 0.0, 0.0, 0.0, 0.0, 0.0]}\n"
            "  - {mass: 0.0, com: [1.0, 0.0, 0.0], inertia: [0.0, 0.0, 0.0, 0.0, 0.0, 0.0]}",
        )
        model = gm.load_model(doc)
        with pytest.raises(gm.SingularMetricError):
            gm.mass_matrix(model, cfg(0.1, 0.2))

    def test_gantry_constant_diagonal(self, gantry):
        g = gm.mass_matrix(gantry, cfg(0.3, -0.8))
        assert np.array_equal(g, np.diag([3.0, 1.0]))


class TestAttachPayload:
    def test_zero_mass_is_identity(self, planar2, rng):
        loaded = gm.attach_payload(planar2, 2, 0.0, [0.3, 0.0, 0.0])
        for _ in range(5):
            q = gm.Configuration(rng.uniform(-np.pi, np.pi, 2))
            assert np.array_equal(gm.mass_matrix(planar2, q), gm.mass_matrix(loaded, q))

    def test_pendulum_tip_mass_doubles_metric(self, pendulum):
        loaded = gm.attach_payload(pendulum, 1, 1.0, [1.0, 0.0, 0.0])
        assert np.allclose(gm.mass_matrix(loaded, cfg(0.4)), [[2.0]], atol=1e-14)
        # original untouched
        assert np.allclose(gm.mass_matrix(pendulum, cfg(0.4)), [[1.0]], atol=1e-14)

    def test_proximal_payload_leaves_distal_entry(self, planar2, rng):
        from oracles import PlanarLagrangianOracle

        loaded = gm.attach_payload(planar2, 1, 0.7, [0.5, 0.0, 0.0])
        oracle = PlanarLagrangianOracle(
            [(0.0, [(1.0, 1.0), (0.7, 0.5)], 0.0), (1.0, [(1.0, 1.0)], 0.0)]
        )
        for _ in range(5):
            q = rng.uniform(-np.pi, np.pi, 2)
            got = gm.mass_matrix(loaded, gm.Configuration(q))
            want = oracle.metric(q)
            assert np.max(np.abs(got - want)) < 1e-10
            base = gm.mass_matrix(planar2, gm.Configuration(q))
            assert abs(got[1, 1] - base[1, 1]) < 1e-14
            np.linalg.cholesky(got)

    def test_errors(self, planar2):
        with pytest.raises(gm.InputError, match="link_index"):
            gm.attach_payload(planar2, 3, 1.0, [0, 0, 0])
        with pytest.raises(gm.InputError, match="link_index"):
            gm.attach_payload(planar2, 0, 1.0, [0, 0, 0])
        with pytest.raises(gm.InputError, match="non-negative"):
            gm.attach_payload(planar2, 1, -0.5, [0, 0, 0])


URDF_TWO_LINK = """
<robot name="two-link-urdf">
  <link name="base"/>
  <link name="upper">
    <inertial>
      <origin xyz="1 0 0" rpy="0 0 0"/>
      <mass value="1"/>
      <inertia ixx="0" iyy="0" izz="0" ixy="0" ixz="0" iyz="0"/>
    </inertial>
  </link>
  <link name="lower">
    <inertial>
      <origin xyz="1 0 0" rpy="0 0 0"/>
      <mass value="1"/>
      <inertia ixx="0" iyy="0" izz="0" ixy="0" ixz="0" iyz="0"/>
    </inertial>
  </link>
  <joint name="shoulder" type="revolute">
    <parent link="base"/>
    <child link="upper"/>
    <origin xyz="0 0 0" rpy="0 0 0"/>
    <axis xyz="0 0 1"/>
    <limit lower="-3.1" upper="3.1" effort="10" velocity="2"/>
  </joint>
  <joint name="elbow" type="continuous">
    <parent link="upper"/>
    <child link="lower"/>
    <origin xyz="1 0 0" rpy="0 0 0"/>
    <axis xyz="0 0 1"/>
  </joint>
</robot>
"""


class TestUrdfImport:
    def test_matches_native_document(self, planar2, rng):
        imported = gm.load_urdf(URDF_TWO_LINK)
        assert imported.dof == 2
        assert imported.limits == ((-3.1, 3.1), None)
        for _ in range(5):
            q = gm.Configuration(rng.uniform(-np.pi, np.pi, 2))
            assert np.allclose(
                gm.mass_matrix(imported, q), gm.mass_matrix(planar2, q), atol=1e-14
            )

    def test_rotated_inertial_frame(self):
        # 90 deg yaw of the inertial frame swaps ixx and iyy in link coords
        urdf = URDF_TWO_LINK.replace(
            '<origin xyz="1 0 0" rpy="0 0 0"/>\n      <mass value="1"/>\n      <inertia ixx="0" iyy="0" izz="0" ixy="0" ixz="0" iyz="0"/>',
            '<origin xyz="1 0 0" rpy="0 0 1.5707963267948966"/>\n      <mass value="1"/>\n      <inertia ixx="0.5" iyy="0.25" izz="0.6" ixy="0" ixz="0" iyz="0"/>',
            1,
        )
        imported = gm.load_urdf(urdf)
        assert np.allclose(imported.links[0].inertia, np.diag([0.25, 0.5, 0.6]), atol=1e-12)

    def test_unsupported_joint_type(self):
        with pytest.raises(gm.ModelError, match="unsupported type"):
            gm.load_urdf(URDF_TWO_LINK.replace('type="continuous"', 'type="fixed"'))

    def test_branching_rejected(self):
        urdf = URDF_TWO_LINK.replace(
            "</robot>",
            '<link name="extra"/>'
            '<joint name="branch" type="revolute">'
            '<parent link="base"/><child link="extra"/>'
            '<axis xyz="0 0 1"/></joint></robot>',
        )
        with pytest.raises(gm.ModelError, match="branching"):
            gm.load_urdf(urdf)

    def test_xml_error(self):
        with pytest.raises(gm.ModelError, match="parse error"):
            gm.load_urdf("<robot name='x'><joint></robot>")


class TestLimits:
    def test_violations_reported_not_enforced(self, arm7):
        wild = np.zeros((3, 7))
        wild[1, 0] = 3.2  # beyond the +-2.9 limit
        wild[2, 3] = -2.5
        hits = gm.limit_violations(arm7, wild)
        assert (1, 0, 3.2) in hits
        assert any(h[0] == 2 and h[1] == 3 for h in hits)
        # dynamics remain limit-blind
        traj = gm.shoot(arm7, gm.TangentVector(gm.Configuration([2.89, 0, 0, 0, 0, 0, 0]), np.array([1.0, 0, 0, 0, 0, 0, 0])), 0.2, step=1e-3)
        assert gm.limit_violations(arm7, traj.q)

    def test_no_limits_means_no_hits(self, planar2):
        assert gm.limit_violations(planar2, np.array([[10.0, -10.0]])) == []

"""Serial-chain robot models: types, file loading, kinematics, mass matrix.

A model is a fixed base plus N moving links, where joint i (revolute or
prismatic) connects link i-1 to link i. Inertial parameters are expressed
per link: mass, center of mass in the link frame, and the rotational
inertia tensor about the center of mass. The joint-space mass-inertia
matrix G(q) doubles as the Riemannian metric of the configuration space,
so this module is the source of everything the rest of the package
computes. Gravity appears nowhere.

Conventions: angles in radians, lengths in meters, masses in kilograms.
Joint axes are unit vectors expressed in the joint frame (the frame
reached by the origin transform), as in the common XML robot format.
"""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, replace

import numpy as np
import yaml

from . import _kernels
from .errors import InputError, ModelError, SingularMetricError

_AXIS_TOL = 1e-9


def _freeze(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


def _rpy_matrix(rpy):
    """Rotation from fixed-axis roll, pitch, yaw: Rz(yaw) @ Ry(pitch) @ Rx(roll)."""
    r, p, y = rpy
    cr, sr = math.cos(r), math.sin(r)
    cp, sp = math.cos(p), math.sin(p)
    cy, sy = math.cos(y), math.sin(y)
    return np.array(
        [
            [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
            [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
            [-sp, cp * sr, cp * cr],
        ]
    )


def _skew(v):
    return np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]])


@dataclass(frozen=True, eq=False)
class Configuration:
    """A point on the configuration manifold: one value per joint."""

    q: np.ndarray

    def __post_init__(self):
        arr = np.atleast_1d(np.asarray(self.q, dtype=float)).copy()
        if arr.ndim != 1:
            raise InputError("configuration must be a 1-D vector")
        if not np.all(np.isfinite(arr)):
            raise InputError("configuration has non-finite entries")
        object.__setattr__(self, "q", _freeze(arr))

    @property
    def dim(self) -> int:
        return self.q.shape[0]

    def __eq__(self, other):
        return isinstance(other, Configuration) and np.array_equal(self.q, other.q)

    def __repr__(self):
        return f"Configuration({self.q.tolist()})"


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A joint-velocity vector bound to the configuration it lives at."""

    base: Configuration
    v: np.ndarray

    def __post_init__(self):
        arr = np.atleast_1d(np.asarray(self.v, dtype=float)).copy()
        if arr.shape != (self.base.dim,):
            raise InputError(
                f"tangent vector has dimension {arr.shape[0]}, base has {self.base.dim}"
            )
        if not np.all(np.isfinite(arr)):
            raise InputError("tangent vector has non-finite entries")
        object.__setattr__(self, "v", _freeze(arr))

    @property
    def dim(self) -> int:
        return self.v.shape[0]

    def __repr__(self):
        return f"TangentVector(base={self.base.q.tolist()}, v={self.v.tolist()})"


@dataclass(frozen=True)
class Link:
    """Rigid-body inertial parameters in the link frame.

    mass in kg, com in m, inertia about the com in kg m^2. The tensor must
    be symmetric positive semi-definite and its principal moments must
    satisfy the triangle inequality.
    """

    mass: float
    com: np.ndarray
    inertia: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mass", float(self.mass))
        object.__setattr__(self, "com", _freeze(np.reshape(np.asarray(self.com, float), 3)))
        object.__setattr__(
            self, "inertia", _freeze(np.reshape(np.asarray(self.inertia, float), (3, 3)))
        )

    def validate(self, label="link"):
        if self.mass < 0.0:
            raise ModelError(f"{label}: mass must be non-negative, got {self.mass}")
        scale = max(1.0, float(np.max(np.abs(self.inertia))))
        if np.max(np.abs(self.inertia - self.inertia.T)) > 1e-9 * scale:
            raise ModelError(f"{label}: inertia tensor not symmetric")
        eig = np.linalg.eigvalsh(0.5 * (self.inertia + self.inertia.T))
        if eig[0] < -1e-9 * scale:
            raise ModelError(f"{label}: inertia tensor not positive semi-definite")
        a, b, c = np.clip(eig, 0.0, None)
        slack = 1e-9 * scale
        if a + b < c - slack or a + c < b - slack or b + c < a - slack:
            raise ModelError(f"{label}: principal moments violate the triangle inequality")

    def spatial_inertia(self) -> np.ndarray:
        """6x6 spatial inertia (angular rows first) in the link frame."""
        cx = _skew(self.com)
        out = np.zeros((6, 6))
        out[:3, :3] = self.inertia + self.mass * cx @ cx.T
        out[:3, 3:] = self.mass * cx
        out[3:, :3] = self.mass * cx.T
        out[3:, 3:] = self.mass * np.eye(3)
        return out


@dataclass(frozen=True)
class Joint:
    """One degree of freedom between consecutive links.

    origin_xyz / origin_rpy place the joint frame in the parent link frame;
    the unit axis is expressed in the joint frame.
    """

    kind: str
    axis: np.ndarray
    origin_xyz: np.ndarray
    origin_rpy: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "axis", _freeze(np.reshape(np.asarray(self.axis, float), 3)))
        object.__setattr__(
            self, "origin_xyz", _freeze(np.reshape(np.asarray(self.origin_xyz, float), 3))
        )
        object.__setattr__(
            self, "origin_rpy", _freeze(np.reshape(np.asarray(self.origin_rpy, float), 3))
        )

    def validate(self, label="joint"):
        if self.kind not in ("revolute", "prismatic"):
            raise ModelError(f"{label}: kind must be revolute or prismatic, got {self.kind!r}")
        if abs(np.linalg.norm(self.axis) - 1.0) > _AXIS_TOL:
            raise ModelError(f"{label}: axis not unit norm")

    def origin_rotation(self) -> np.ndarray:
        return _rpy_matrix(self.origin_rpy)


@dataclass(frozen=True, eq=False)
class RobotModel:
    """Immutable serial chain. All operations on it are pure functions."""

    name: str
    links: tuple
    joints: tuple
    limits: tuple | None = None

    def __post_init__(self):
        links = tuple(self.links)
        joints = tuple(self.joints)
        object.__setattr__(self, "links", links)
        object.__setattr__(self, "joints", joints)
        if len(joints) < 1:
            raise ModelError("model needs at least one joint")
        if len(links) != len(joints):
            raise ModelError(
                f"model has {len(links)} links but {len(joints)} joints; "
                "each joint must drive exactly one link"
            )
        for i, joint in enumerate(joints):
            joint.validate(f"joint {i + 1}")
        for i, link in enumerate(links):
            link.validate(f"link {i + 1}")
        if self.limits is not None:
            limits = tuple(None if lim is None else (float(lim[0]), float(lim[1])) for lim in self.limits)
            if len(limits) != len(joints):
                raise ModelError("limits list length must match the number of joints")
            for i, lim in enumerate(limits):
                if lim is not None and lim[0] > lim[1]:
                    raise ModelError(f"joint {i + 1}: lower limit exceeds upper limit")
            object.__setattr__(self, "limits", limits)
        object.__setattr__(self, "_flat", self._flatten())

    @property
    def dof(self) -> int:
        return len(self.joints)

    def _flatten(self):
        n = len(self.joints)
        kinds = np.empty(n, dtype=np.int64)
        axes = np.empty((n, 3))
        rot0 = np.empty((n, 3, 3))
        pos0 = np.empty((n, 3))
        inert = np.empty((n, 6, 6))
        for i, (joint, link) in enumerate(zip(self.joints, self.links)):
            kinds[i] = _kernels.REVOLUTE if joint.kind == "revolute" else _kernels.PRISMATIC
            axes[i] = joint.axis
            rot0[i] = joint.origin_rotation()
            pos0[i] = joint.origin_xyz
            inert[i] = link.spatial_inertia()
        for arr in (kinds, axes, rot0, pos0, inert):
            arr.setflags(write=False)
        return kinds, axes, rot0, pos0, inert

    def kernel_args(self):
        return self._flat

    def check_dim(self, q: Configuration):
        if q.dim != self.dof:
            raise InputError(
                f"dimension mismatch: model {self.name!r} has {self.dof} joints, "
                f"configuration has {q.dim}"
            )


# ---------------------------------------------------------------------------
# loading


def _want(node, key, path):
    if not isinstance(node, dict) or key not in node:
        raise ModelError(f"{path}: missing field {key!r}")
    return node[key]


def _want_floats(value, count, path):
    try:
        arr = [float(x) for x in value]
    except (TypeError, ValueError):
        raise ModelError(f"{path}: expected a list of {count} numbers") from None
    if len(arr) != count:
        raise ModelError(f"{path}: expected {count} numbers, got {len(arr)}")
    return arr


def _inertia_from_field(value, path):
    """Accept [ixx, iyy, izz, ixy, ixz, iyz] or a full 3x3 nested list."""
    if isinstance(value, (list, tuple)) and len(value) == 3 and isinstance(value[0], (list, tuple)):
        rows = [_want_floats(row, 3, f"{path}[{r}]") for r, row in enumerate(value)]
        return np.array(rows)
    ixx, iyy, izz, ixy, ixz, iyz = _want_floats(value, 6, path)
    return np.array([[ixx, ixy, ixz], [ixy, iyy, iyz], [ixz, iyz, izz]])


def load_model(text: str) -> RobotModel:
    """Parse a robot description document (YAML key-value tree).

    Expected fields: ``name``, ``joints`` (kind, axis, origin{xyz, rpy}),
    ``links`` (mass, com, inertia as 6 components ixx,iyy,izz,ixy,ixz,iyz or
    a 3x3 matrix) and optional per-joint ``limits`` (lower, upper).

    Raises ModelError with the offending line or field on bad input.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}: " if mark is not None else ""
        raise ModelError(f"parse error: {where}{getattr(exc, 'problem', exc)}") from None
    if not isinstance(doc, dict):
        raise ModelError("document root must be a mapping")

    name = str(doc.get("name", "robot"))
    joints_node = _want(doc, "joints", "document")
    links_node = _want(doc, "links", "document")
    if not isinstance(joints_node, list) or not joints_node:
        raise ModelError("joints: expected a non-empty list")
    if not isinstance(links_node, list) or not links_node:
        raise ModelError("links: expected a non-empty list")

    joints = []
    for i, node in enumerate(joints_node):
        path = f"joints[{i}]"
        kind = str(_want(node, "kind", path))
        axis = _want_floats(_want(node, "axis", path), 3, f"{path}.axis")
        origin = node.get("origin", {})
        xyz = _want_floats(origin.get("xyz", [0.0, 0.0, 0.0]), 3, f"{path}.origin.xyz")
        rpy = _want_floats(origin.get("rpy", [0.0, 0.0, 0.0]), 3, f"{path}.origin.rpy")
        joints.append(Joint(kind=kind, axis=axis, origin_xyz=xyz, origin_rpy=rpy))

    links = []
    for i, node in enumerate(links_node):
        path = f"links[{i}]"
        mass = float(_want(node, "mass", path))
        com = _want_floats(_want(node, "com", path), 3, f"{path}.com")
        inertia = _inertia_from_field(_want(node, "inertia", path), f"{path}.inertia")
        links.append(Link(mass=mass, com=com, inertia=inertia))

    limits = None
    if "limits" in doc and doc["limits"] is not None:
        limits_node = doc["limits"]
        if not isinstance(limits_node, list):
            raise ModelError("limits: expected a list")
        limits = []
        for i, node in enumerate(limits_node):
            if node is None:
                limits.append(None)
            else:
                limits.append(
                    (float(_want(node, "lower", f"limits[{i}]")), float(_want(node, "upper", f"limits[{i}]")))
                )
    return RobotModel(name=name, links=tuple(links), joints=tuple(joints),
                      limits=None if limits is None else tuple(limits))


def load_model_file(path) -> RobotModel:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if str(path).endswith((".urdf", ".xml")):
        return load_urdf(text)
    return load_model(text)


def load_urdf(text: str) -> RobotModel:
    """Import the serial-chain subset of the common XML robot format.

    Supports revolute, continuous (mapped to revolute) and prismatic joints
    on an unbranched chain; link inertials with an optionally rotated
    inertial frame; per-joint position limits.
    """
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ModelError(f"parse error: {exc}") from None
    if root.tag != "robot":
        raise ModelError(f"expected <robot> root element, got <{root.tag}>")
    name = root.get("name", "urdf-robot")

    link_elems = {e.get("name"): e for e in root.findall("link")}
    joint_elems = root.findall("joint")
    if not joint_elems:
        raise ModelError("document defines no joints")

    children = {}
    by_child = {}
    for j in joint_elems:
        parent = j.find("parent")
        child = j.find("child")
        if parent is None or child is None:
            raise ModelError(f"joint {j.get('name')!r}: missing parent or child")
        p, c = parent.get("link"), child.get("link")
        if p in children:
            raise ModelError(f"link {p!r} has more than one child joint; branching not supported")
        children[p] = (j, c)
        by_child[c] = p

    roots = [p for p in children if p not in by_child]
    if len(roots) != 1:
        raise ModelError(f"expected exactly one base link, found {sorted(roots)}")

    def _floats(attr, default):
        if attr is None:
            return list(default)
        return [float(x) for x in attr.split()]

    joints, links, limits = [], [], []
    any_limit = False
    link_name = roots[0]
    while link_name in children:
        joint_elem, child_name = children[link_name]
        jname = joint_elem.get("name", "?")
        jtype = joint_elem.get("type")
        if jtype not in ("revolute", "continuous", "prismatic"):
            raise ModelError(f"joint {jname!r}: unsupported type {jtype!r}")
        origin = joint_elem.find("origin")
        xyz = _floats(None if origin is None else origin.get("xyz"), (0.0, 0.0, 0.0))
        rpy = _floats(None if origin is None else origin.get("rpy"), (0.0, 0.0, 0.0))
        axis_elem = joint_elem.find("axis")
        axis = _floats(None if axis_elem is None else axis_elem.get("xyz"), (1.0, 0.0, 0.0))
        joints.append(
            Joint(kind="prismatic" if jtype == "prismatic" else "revolute",
                  axis=axis, origin_xyz=xyz, origin_rpy=rpy)
        )
        limit_elem = joint_elem.find("limit")
        if limit_elem is not None and limit_elem.get("lower") is not None:
            limits.append((float(limit_elem.get("lower")), float(limit_elem.get("upper"))))
            any_limit = True
        else:
            limits.append(None)

        child = link_elems.get(child_name)
        if child is None:
            raise ModelError(f"joint {jname!r}: child link {child_name!r} not defined")
        inertial = child.find("inertial")
        if inertial is None:
            links.append(Link(mass=0.0, com=(0.0, 0.0, 0.0), inertia=np.zeros((3, 3))))
        else:
            mass_elem = inertial.find("mass")
            mass = 0.0 if mass_elem is None else float(mass_elem.get("value"))
            iorigin = inertial.find("origin")
            com = _floats(None if iorigin is None else iorigin.get("xyz"), (0.0, 0.0, 0.0))
            irpy = _floats(None if iorigin is None else iorigin.get("rpy"), (0.0, 0.0, 0.0))
            inertia_elem = inertial.find("inertia")
            if inertia_elem is None:
                tensor = np.zeros((3, 3))
            else:
                vals = {k: float(inertia_elem.get(k, "0")) for k in ("ixx", "iyy", "izz", "ixy", "ixz", "iyz")}
                tensor = np.array(
                    [
                        [vals["ixx"], vals["ixy"], vals["ixz"]],
                        [vals["ixy"], vals["iyy"], vals["iyz"]],
                        [vals["ixz"], vals["iyz"], vals["izz"]],
                    ]
                )
            rot = _rpy_matrix(irpy)
            links.append(Link(mass=mass, com=com, inertia=rot @ tensor @ rot.T))
        link_name = child_name

    return RobotModel(
        name=name,
        links=tuple(links),
        joints=tuple(joints),
        limits=tuple(limits) if any_limit else None,
    )


# ---------------------------------------------------------------------------
# kinematics and dynamics entry points


def forward_kinematics(model: RobotModel, q: Configuration) -> np.ndarray:
    """World poses of every link frame as (N+1, 4, 4) homogeneous transforms.

    Entry 0 is the fixed base (identity); entry i is link i's frame.
    """
    model.check_dim(q)
    poses = np.empty((model.dof + 1, 4, 4))
    poses[0] = np.eye(4)
    current = np.eye(4)
    for i, joint in enumerate(model.joints):
        step = np.eye(4)
        step[:3, :3] = joint.origin_rotation()
        step[:3, 3] = joint.origin_xyz
        motion = np.eye(4)
        if joint.kind == "revolute":
            a = joint.axis
            angle = q.q[i]
            c, s = math.cos(angle), math.sin(angle)
            motion[:3, :3] = c * np.eye(3) + s * _skew(a) + (1.0 - c) * np.outer(a, a)
        else:
            motion[:3, 3] = joint.axis * q.q[i]
        current = current @ step @ motion
        poses[i + 1] = current
    return poses


def mass_matrix(model: RobotModel, q: Configuration) -> np.ndarray:
    """Symmetric positive-definite joint-space mass-inertia matrix G(q).

    Raises SingularMetricError when G has no Cholesky factor (for example a
    massless distal chain).
    """
    model.check_dim(q)
    g = _kernels._crba(*model.kernel_args(), q.q.copy())
    _, ok = _kernels._cholesky(g)
    if not ok:
        raise SingularMetricError(
            f"mass matrix of {model.name!r} is singular at q={q.q.tolist()}"
        )
    return g


def attach_payload(model: RobotModel, link_index: int, mass: float, offset) -> RobotModel:
    """New model with a point mass rigidly attached to one link.

    link_index is 1-based; offset is the attachment point in the link frame.
    The link's inertial parameters become the rigid composition of the
    original body and the payload; the input model is unchanged.
    """
    if not 1 <= int(link_index) <= model.dof:
        raise InputError(f"link_index must be in 1..{model.dof}, got {link_index}")
    mass = float(mass)
    if mass < 0.0:
        raise InputError(f"payload mass must be non-negative, got {mass}")
    offset = np.reshape(np.asarray(offset, dtype=float), 3)
    link = model.links[link_index - 1]

    total = link.mass + mass
    if mass == 0.0 or total == 0.0:
        new_link = link
    else:
        com = (link.mass * link.com + mass * offset) / total
        d_old = link.com - com
        d_pay = offset - com
        shift_old = link.mass * (np.dot(d_old, d_old) * np.eye(3) - np.outer(d_old, d_old))
        shift_pay = mass * (np.dot(d_pay, d_pay) * np.eye(3) - np.outer(d_pay, d_pay))
        new_link = Link(mass=total, com=com, inertia=link.inertia + shift_old + shift_pay)

    links = list(model.links)
    links[link_index - 1] = new_link
    return replace(model, links=tuple(links))


def limit_violations(model: RobotModel, q_samples) -> list:
    """Report joint-limit violations as (sample, joint, value) triples.

    Limits are never enforced by the dynamics; this is the separate check.
    Accepts a single configuration vector or an (M, N) array of samples.
    """
    if model.limits is None:
        return []
    arr = np.atleast_2d(np.asarray(q_samples if not isinstance(q_samples, Configuration) else q_samples.q, dtype=float))
    if arr.shape[1] != model.dof:
        raise InputError(f"expected {model.dof} joint values per sample, got {arr.shape[1]}")
    out = []
    for j, lim in enumerate(model.limits):
        if lim is None:
            continue
        lo, hi = lim
        for s in range(arr.shape[0]):
            value = arr[s, j]
            if value < lo or value > hi:
                out.append((s, j, float(value)))
    return out

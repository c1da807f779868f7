"""Closed-form metric for planar revolute chains.

For chains whose joints all rotate about +z (origin roll/pitch zero), the
metric has an exact trigonometric form: with cumulative angles
theta_k = sum_{j<=k} (q_j + yaw_j), the velocity of body k's mass center
with respect to joint a is the perpendicular of the lever arm, so

    G_ab = sum_{k >= max(a,b)} m_k <perp(p_k - P_a), perp(p_k - P_b)> + Izz_k

with P_a the position of joint a and p_k the mass center of link k. The
derivatives follow by differentiating the lever arms. This serves as the
"analytic" derivative scheme and as the built-in cross-check for the
finite-difference route; it is derived independently of the spatial-algebra
code in ``_kernels``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_TOL = 1e-12
_Z_AXIS = np.array([0.0, 0.0, 1.0])


def _perp(v):
    return np.array([-v[1], v[0]])


def _rot(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class PlanarChainForm:
    """Closed-form planar chain: masses, in-plane offsets and z inertias."""

    masses: np.ndarray
    com_xy: np.ndarray
    izz: np.ndarray
    origin_xy: np.ndarray
    yaw: np.ndarray

    @property
    def dof(self) -> int:
        return self.masses.shape[0]

    def _frames(self, q):
        n = self.dof
        theta = np.cumsum(q + self.yaw)
        joints = np.zeros((n, 2))
        joints[0] = self.origin_xy[0]
        for k in range(1, n):
            joints[k] = joints[k - 1] + _rot(theta[k - 1]) @ self.origin_xy[k]
        coms = np.zeros((n, 2))
        for k in range(n):
            coms[k] = joints[k] + _rot(theta[k]) @ self.com_xy[k]
        return joints, coms

    def metric(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        n = self.dof
        joints, coms = self._frames(q)
        g = np.zeros((n, n))
        for k in range(n):
            for a in range(k + 1):
                wa = _perp(coms[k] - joints[a])
                for b in range(a + 1):
                    wb = _perp(coms[k] - joints[b])
                    val = self.masses[k] * float(wa @ wb) + self.izz[k]
                    g[a, b] += val
                    if a != b:
                        g[b, a] += val
        return g

    def metric_derivatives(self, q) -> np.ndarray:
        """dg[a, b, c] = d g_ab / d q_c."""
        q = np.asarray(q, dtype=float)
        n = self.dof
        joints, coms = self._frames(q)
        dg = np.zeros((n, n, n))
        for k in range(n):
            for c in range(n):
                dcom = _perp(coms[k] - joints[c]) if c <= k else np.zeros(2)
                for a in range(k + 1):
                    dja = _perp(joints[a] - joints[c]) if c < a else np.zeros(2)
                    wa = _perp(coms[k] - joints[a])
                    dwa = _perp(dcom - dja)
                    for b in range(k + 1):
                        djb = _perp(joints[b] - joints[c]) if c < b else np.zeros(2)
                        wb = _perp(coms[k] - joints[b])
                        dwb = _perp(dcom - djb)
                        dg[a, b, c] += self.masses[k] * float(dwa @ wb + wa @ dwb)
        return dg

    def christoffel(self, q) -> np.ndarray:
        dg = self.metric_derivatives(q)
        n = self.dof
        gamma = np.empty((n, n, n))
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    gamma[i, j, k] = 0.5 * (dg[i, j, k] + dg[i, k, j] - dg[j, k, i])
        return gamma

    def coriolis(self, q, qd) -> np.ndarray:
        qd = np.asarray(qd, dtype=float)
        return np.einsum("ijk,j,k->i", self.christoffel(q), qd, qd)


def planar_form(model) -> PlanarChainForm | None:
    """Extract the closed form when the model is a planar revolute chain.

    Requires every joint to be revolute about +z with zero roll/pitch in its
    origin. Arbitrary in-plane offsets, yaw rotations, mass centers and
    inertia tensors are allowed (only Izz enters the planar dynamics).
    Returns None when the model does not qualify.
    """
    n = model.dof
    masses = np.empty(n)
    com_xy = np.empty((n, 2))
    izz = np.empty(n)
    origin_xy = np.empty((n, 2))
    yaw = np.empty(n)
    for i, (joint, link) in enumerate(zip(model.joints, model.links)):
        if joint.kind != "revolute":
            return None
        if np.max(np.abs(joint.axis - _Z_AXIS)) > _TOL:
            return None
        if abs(joint.origin_rpy[0]) > _TOL or abs(joint.origin_rpy[1]) > _TOL:
            return None
        masses[i] = link.mass
        com_xy[i] = link.com[:2]
        izz[i] = link.inertia[2, 2]
        origin_xy[i] = joint.origin_xyz[:2]
        yaw[i] = joint.origin_rpy[2]
    return PlanarChainForm(masses=masses, com_xy=com_xy, izz=izz, origin_xy=origin_xy, yaw=yaw)


def has_analytic_form(model) -> bool:
    return planar_form(model) is not None

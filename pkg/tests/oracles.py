"""Symbolic Lagrangian oracle for planar point-mass chains.

Everything here is derived with sympy from first principles: mass positions
by plane trigonometry, kinetic energy T = sum m |pdot|^2 / 2 (+ Izz
terms), the metric as the Hessian of T in the joint velocities, and its
derivatives / Christoffel symbols by symbolic differentiation. None of the
package's spatial-algebra or finite-difference code is involved, so these
values pin down the expected behavior independently.
"""

import numpy as np
import sympy as sp


class PlanarLagrangianOracle:
    """links: sequence of (joint_offset_x, [(mass, com_x), ...], izz).

    joint_offset_x is the x-translation of joint i's origin in the parent
    link frame (ignored for the first joint, which sits at the base).
    Several point masses per link allow payload compositions.
    """

    def __init__(self, links):
        n = len(links)
        self.dof = n
        q = sp.symbols(f"q1:{n + 1}", real=True)
        qd = sp.symbols(f"w1:{n + 1}", real=True)
        theta = [sum(q[: i + 1]) for i in range(n)]

        joint_pos = [sp.Matrix([0, 0])]
        for i in range(1, n):
            off = links[i][0]
            joint_pos.append(
                joint_pos[i - 1]
                + sp.Matrix([off * sp.cos(theta[i - 1]), off * sp.sin(theta[i - 1])])
            )

        energy = sp.Integer(0)
        for i, (_off, masses, izz) in enumerate(links):
            theta_dot = sum(qd[: i + 1])
            for mass, com_x in masses:
                pos = joint_pos[i] + sp.Matrix(
                    [com_x * sp.cos(theta[i]), com_x * sp.sin(theta[i])]
                )
                vel = sp.Matrix(
                    [sum(sp.diff(pos[r], q[j]) * qd[j] for j in range(n)) for r in range(2)]
                )
                energy += sp.Rational(1, 2) * mass * (vel.T * vel)[0, 0]
            energy += sp.Rational(1, 2) * izz * theta_dot**2

        g_sym = sp.Matrix(
            [[sp.simplify(sp.diff(energy, qd[i], qd[j])) for j in range(n)] for i in range(n)]
        )
        dg_sym = [[[sp.diff(g_sym[i, j], q[k]) for k in range(n)] for j in range(n)] for i in range(n)]
        gamma_sym = [
            [
                [
                    sp.simplify((dg_sym[i][j][k] + dg_sym[i][k][j] - dg_sym[j][k][i]) / 2)
                    for k in range(n)
                ]
                for j in range(n)
            ]
            for i in range(n)
        ]

        self._g = sp.lambdify(q, g_sym, modules="numpy")
        self._dg = sp.lambdify(q, sp.Array(dg_sym), modules="numpy")
        self._gamma = sp.lambdify(q, sp.Array(gamma_sym), modules="numpy")

    def metric(self, q):
        return np.asarray(self._g(*np.asarray(q, dtype=float)), dtype=float)

    def metric_derivatives(self, q):
        return np.asarray(self._dg(*np.asarray(q, dtype=float)), dtype=float)

    def christoffel(self, q):
        return np.asarray(self._gamma(*np.asarray(q, dtype=float)), dtype=float)

    def coriolis(self, q, qdot):
        qdot = np.asarray(qdot, dtype=float)
        return np.einsum("ijk,j,k->i", self.christoffel(q), qdot, qdot)

    def acceleration(self, q, qdot):
        return np.linalg.solve(self.metric(q), -self.coriolis(q, qdot))


def pendulum_oracle():
    """Unit point mass 1 m from a single revolute joint."""
    return PlanarLagrangianOracle([(0.0, [(1.0, 1.0)], 0.0)])


def planar2_oracle():
    """Two unit links with unit point masses at the tips."""
    return PlanarLagrangianOracle([(0.0, [(1.0, 1.0)], 0.0), (1.0, [(1.0, 1.0)], 0.0)])

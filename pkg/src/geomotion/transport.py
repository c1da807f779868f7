"""Parallel transport of tangent vectors along geodesics.

Transport integrates u' = -G^-1 gamma[qd, u] jointly with the carrying
geodesic (one combined RK4 system, same step), which keeps the transported
vector consistent with the curve to integrator accuracy instead of
interpolation accuracy. Transport is a linear isometry of the Riemannian
inner product; it is path dependent, and between distinct base points this
package always carries vectors along the connecting geodesic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import BaseMismatchError
from .geodesic import (
    DEFAULT_BVP_MAX_ITER,
    DEFAULT_BVP_TOL,
    DEFAULT_STEP,
    GeodesicTrajectory,
    _raise_integration_failure,
    connect,
)
from .model import Configuration, RobotModel, TangentVector


@dataclass(frozen=True, eq=False)
class TransportResult:
    """Transported vector at the curve's end plus the carrying curve."""

    vector: TangentVector
    path: GeodesicTrajectory


def transport_along(model: RobotModel, curve: GeodesicTrajectory, v: TangentVector) -> TransportResult:
    """Parallel-transport v along a geodesic to its final configuration.

    The vector must be based at the curve's first sample. The carrying curve
    must be a geodesic of this model (it is re-integrated from its initial
    state together with the transport equation).
    """
    start = Configuration(curve.q[0])
    if v.base != start:
        raise BaseMismatchError(
            f"vector is based at {v.base.q.tolist()}, curve starts at {start.q.tolist()}"
        )
    u0 = v.v[None, :].copy()
    times, qs, qds, qdds, es, us, filled, status, tfail = _kernels._shoot_transport(
        *model.kernel_args(),
        curve.q[0].copy(),
        curve.qdot[0].copy(),
        u0,
        curve.duration,
        curve.step if curve.step > 0.0 else curve.duration,
    )
    _raise_integration_failure(status, tfail, model)
    end = Configuration(qs[-1])
    return TransportResult(vector=TangentVector(end, us[-1, 0]), path=curve)


def transport_to(
    model: RobotModel,
    v: TangentVector,
    target: Configuration,
    duration: float,
    step: float = DEFAULT_STEP,
    tol: float = DEFAULT_BVP_TOL,
    max_iter: int = DEFAULT_BVP_MAX_ITER,
) -> TransportResult:
    """Transport v onto the tangent space at ``target``.

    Solves the boundary-value problem from v's base to the target and
    transports along that connecting geodesic. A target equal to the base
    yields the zero geodesic and the identity transport.
    """
    from .geodesic import shoot  # local import to keep module load light

    model.check_dim(target)
    v0 = connect(model, v.base, target, duration, step=step, tol=tol, max_iter=max_iter)
    carrying = shoot(model, v0, duration, step=step)
    result = transport_along(model, carrying, v)
    return result


def _transport_along_straight(
    model: RobotModel,
    q0: Configuration,
    q1: Configuration,
    duration: float,
    v: TangentVector,
    step: float = DEFAULT_STEP,
) -> TangentVector:
    """Transport along the straight joint-space segment (internal, test support).

    The straight segment is generally not a geodesic; this exists to
    exercise path dependence and the isometry property on non-geodesic
    curves.
    """
    if v.base != q0:
        raise BaseMismatchError("vector must be based at the segment start")
    u0 = v.v[None, :].copy()
    u_end, status = _kernels._transport_straight(
        *model.kernel_args(), q0.q.copy(), q1.q.copy(), float(duration), float(step), u0
    )
    _raise_integration_failure(status, float("nan"), model)
    return TangentVector(q1, u_end[0])


def transport_many(
    model: RobotModel, curve: GeodesicTrajectory, vectors
) -> list[TransportResult]:
    """Transport several vectors along one curve in a single integration."""
    vecs = list(vectors)
    start = Configuration(curve.q[0])
    for v in vecs:
        if v.base != start:
            raise BaseMismatchError("all vectors must be based at the curve start")
    if not vecs:
        return []
    u0 = np.stack([v.v for v in vecs]).copy()
    times, qs, qds, qdds, es, us, filled, status, tfail = _kernels._shoot_transport(
        *model.kernel_args(),
        curve.q[0].copy(),
        curve.qdot[0].copy(),
        u0,
        curve.duration,
        curve.step if curve.step > 0.0 else curve.duration,
    )
    _raise_integration_failure(status, tfail, model)
    end = Configuration(qs[-1])
    return [TransportResult(vector=TangentVector(end, us[-1, r]), path=curve) for r in range(len(vecs))]

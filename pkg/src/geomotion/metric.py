"""The kinetic-energy metric and its first-order differential structure.

The metric tensor at q is the mass-inertia matrix G(q). Its partial
derivatives feed the Christoffel symbols of the first kind,

    gamma_ijk = (dg_ij/dq_k + dg_ik/dq_j - dg_jk/dq_i) / 2,

whose double contraction with the joint velocity is the Coriolis vector.
Derivatives are computed by central differences with a per-coordinate step
h = 1e-6 * max(1, |q_k|); the analytic scheme is available for planar
point-mass chains only (see ``analytic``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels, analytic
from .errors import BaseMismatchError, InputError
from .model import Configuration, RobotModel, TangentVector, mass_matrix


@dataclass(frozen=True, eq=False)
class MetricTensor:
    base: Configuration
    g: np.ndarray


@dataclass(frozen=True, eq=False)
class MetricDerivatives:
    """dg[i, j, k] = d g_ij / d q_k at the base configuration."""

    base: Configuration
    dg: np.ndarray


@dataclass(frozen=True, eq=False)
class ChristoffelFirst:
    """gamma[i, j, k], symmetric in the last two indices."""

    base: Configuration
    gamma: np.ndarray


def _require_based(q: Configuration, vec: TangentVector, name: str):
    if vec.base != q:
        raise BaseMismatchError(f"{name} is based at {vec.base.q.tolist()}, not {q.q.tolist()}")


def metric_at(model: RobotModel, q: Configuration) -> MetricTensor:
    """Metric tensor (mass-inertia matrix) at q."""
    return MetricTensor(base=q, g=mass_matrix(model, q))


def metric_derivatives(
    model: RobotModel, q: Configuration, scheme: str = "finite-difference"
) -> MetricDerivatives:
    """Partial derivatives of the metric at q.

    scheme "finite-difference" works for every model; "analytic" requires a
    planar point-mass chain and raises InputError otherwise.
    """
    model.check_dim(q)
    if scheme in ("finite-difference", "fd"):
        _, dg = _kernels._metric_fd(*model.kernel_args(), q.q.copy())
    elif scheme == "analytic":
        form = analytic.planar_form(model)
        if form is None:
            raise InputError(
                f"analytic metric derivatives are not available for model {model.name!r}; "
                "only planar point-mass chains are supported"
            )
        dg = form.metric_derivatives(q.q)
    else:
        raise InputError(f"unknown derivative scheme {scheme!r}")
    return MetricDerivatives(base=q, dg=dg)


def christoffel_first(model: RobotModel, q: Configuration) -> ChristoffelFirst:
    """Christoffel symbols of the first kind at q (finite-difference route)."""
    derivs = metric_derivatives(model, q)
    return ChristoffelFirst(base=q, gamma=_kernels._christoffel_first(derivs.dg))


def coriolis_vector(model: RobotModel, q: Configuration, qdot: TangentVector) -> np.ndarray:
    """c_i(q, qd) = sum_jk gamma_ijk qd_j qd_k; quadratic in the velocity."""
    _require_based(q, qdot, "qdot")
    gamma = christoffel_first(model, q).gamma
    return _kernels._contract_gamma(gamma, qdot.v.copy(), qdot.v.copy())


def inner_product(model: RobotModel, q: Configuration, u: TangentVector, v: TangentVector) -> float:
    """Riemannian inner product <u, G(q) v> of two vectors tangent at q."""
    _require_based(q, u, "u")
    _require_based(q, v, "v")
    g = mass_matrix(model, q)
    return float(u.v @ g @ v.v)


def kinetic_energy(model: RobotModel, q: Configuration, qdot: TangentVector) -> float:
    """Kinetic energy k = <qd, G(q) qd> / 2; exactly half the self inner product."""
    return 0.5 * inner_product(model, q, qdot, qdot)

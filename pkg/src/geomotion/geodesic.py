"""Geodesic initial- and boundary-value problems on the configuration manifold.

Geodesics solve G(q) qdd + c(q, qd) = 0, which is the zero-torque,
zero-gravity equation of motion, so a geodesic is a passive trajectory of
the robot. ``shoot`` integrates the initial-value problem (the exponential
map) with fixed-step classical RK4; ``connect`` solves the boundary-value
problem (the logarithmic map) by single shooting with a damped Newton
iteration. ``passive_dynamics_oracle`` integrates the same ODE with the
Coriolis vector obtained from inverse dynamics instead of Christoffel
symbols, providing an independent cross-check of the whole pipeline.

The configuration space is treated as one global chart R^N: no angle
wrapping, so connecting to q1 + 2*pi differs from connecting to q1.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    BaseMismatchError,
    ConvergenceError,
    DivergenceError,
    InputError,
    SingularMetricError,
)
from .model import Configuration, RobotModel, TangentVector

DEFAULT_STEP = 1e-3
DEFAULT_BVP_TOL = 1e-8
DEFAULT_BVP_MAX_ITER = 50
DEFAULT_BVP_FD_EPS = 1e-6

ENERGY_DRIFT_TOL = 1e-6
RESIDUAL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class GeodesicTrajectory:
    """Time-sampled curve (t, q, qd, qdd) with per-sample kinetic energy.

    For geodesics the energy column is constant up to integration error and
    ``energy`` (its value at t=0) characterizes the whole curve.
    """

    times: np.ndarray
    q: np.ndarray
    qdot: np.ndarray
    qddot: np.ndarray
    energies: np.ndarray
    step: float

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        if times.ndim != 1 or times.shape[0] < 1:
            raise InputError("trajectory needs a 1-D, non-empty time grid")
        if np.any(np.diff(times) <= 0.0):
            raise InputError("trajectory times must be strictly increasing")
        object.__setattr__(self, "times", times)
        q = np.asarray(self.q, dtype=float)
        if q.ndim != 2 or q.shape[0] != times.shape[0]:
            raise InputError("trajectory q must be (samples, joints)")
        object.__setattr__(self, "q", q)
        for name in ("qdot", "qddot"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != q.shape:
                raise InputError(f"trajectory field {name} has inconsistent shape")
            object.__setattr__(self, name, arr)
        energies = np.asarray(self.energies, dtype=float)
        if energies.shape != times.shape:
            raise InputError("trajectory energies must match the time grid")
        object.__setattr__(self, "energies", energies)

    @property
    def duration(self) -> float:
        return float(self.times[-1])

    @property
    def energy(self) -> float:
        """Kinetic energy at t=0."""
        return float(self.energies[0])

    @property
    def n_samples(self) -> int:
        return self.times.shape[0]

    @property
    def dof(self) -> int:
        return self.q.shape[1]

    def initial_state(self) -> TangentVector:
        return TangentVector(Configuration(self.q[0]), self.qdot[0])

    def terminal_state(self) -> TangentVector:
        return TangentVector(Configuration(self.q[-1]), self.qdot[-1])


def _check_shoot_args(model: RobotModel, start: TangentVector, duration: float, step: float):
    model.check_dim(start.base)
    if duration <= 0.0:
        raise InputError(f"duration must be positive, got {duration}")
    if step <= 0.0 or step > duration:
        raise InputError(f"step must satisfy 0 < step <= duration, got {step}")


def _raise_integration_failure(status: int, t: float, model: RobotModel):
    if status == _kernels.SINGULAR:
        raise SingularMetricError(
            f"singular metric for {model.name!r} at t={t:.6g}", time=t
        )
    if status == _kernels.DIVERGED:
        raise DivergenceError(f"integration diverged at t={t:.6g}", time=t)


def geodesic_acceleration(model: RobotModel, q: Configuration, qdot: TangentVector) -> np.ndarray:
    """Acceleration qdd = -G(q)^-1 c(q, qd) satisfying G qdd + c = 0."""
    model.check_dim(q)
    if qdot.base != q:
        raise BaseMismatchError(
            f"qdot is based at {qdot.base.q.tolist()}, not {q.q.tolist()}"
        )
    qdd, _, status = _kernels._accel(*model.kernel_args(), q.q.copy(), qdot.v.copy(), False)
    if status != _kernels.OK:
        raise SingularMetricError(f"singular metric for {model.name!r} at q={q.q.tolist()}")
    return qdd


def shoot(
    model: RobotModel,
    start: TangentVector,
    duration: float,
    step: float = DEFAULT_STEP,
) -> GeodesicTrajectory:
    """Integrate the geodesic through ``start`` for ``duration`` seconds.

    Fixed-step classical RK4 on (q, qd); the first sample is the initial
    state with its geodesic acceleration, the last lands exactly on
    ``duration``. Raises SingularMetricError or DivergenceError with the
    failure time when integration cannot continue.
    """
    _check_shoot_args(model, start, duration, step)
    times, qs, qds, qdds, es, filled, status, tfail = _kernels._shoot(
        *model.kernel_args(), start.base.q.copy(), start.v.copy(), float(duration), float(step), False
    )
    _raise_integration_failure(status, tfail, model)
    return GeodesicTrajectory(
        times=times, q=qs, qdot=qds, qddot=qdds, energies=es, step=float(step)
    )


def passive_dynamics_oracle(
    model: RobotModel,
    start: TangentVector,
    duration: float,
    step: float = DEFAULT_STEP,
) -> GeodesicTrajectory:
    """Reference trajectory from passive rigid-body dynamics.

    Integrates qdd = -G(q)^-1 c(q, qd) with the Coriolis vector computed by
    recursive Newton-Euler inverse dynamics at zero gravity and zero joint
    acceleration, never through Christoffel symbols. Agreement with
    ``shoot`` validates both derivations.
    """
    _check_shoot_args(model, start, duration, step)
    times, qs, qds, qdds, es, filled, status, tfail = _kernels._shoot(
        *model.kernel_args(), start.base.q.copy(), start.v.copy(), float(duration), float(step), True
    )
    _raise_integration_failure(status, tfail, model)
    return GeodesicTrajectory(
        times=times, q=qs, qdot=qds, qddot=qdds, energies=es, step=float(step)
    )


def connect(
    model: RobotModel,
    q0: Configuration,
    q1: Configuration,
    duration: float,
    step: float = DEFAULT_STEP,
    tol: float = DEFAULT_BVP_TOL,
    max_iter: int = DEFAULT_BVP_MAX_ITER,
) -> TangentVector:
    """Initial velocity whose geodesic reaches q1 after ``duration`` seconds.

    Single shooting: damped Newton on the endpoint residual with a
    finite-difference Jacobian (perturbation 1e-6), initialized at the
    straight-chart guess (q1 - q0) / duration, at most ``max_iter``
    iterations, step halving whenever the residual would grow. Convergence
    means per-joint endpoint error below ``tol``.

    Conjugate-point caveat: when several geodesics join the endpoints the
    solver returns the one its initialization converges to.
    """
    model.check_dim(q0)
    model.check_dim(q1)
    if duration <= 0.0:
        raise InputError(f"duration must be positive, got {duration}")
    if step <= 0.0 or step > duration:
        raise InputError(f"step must satisfy 0 < step <= duration, got {step}")
    v0, residual, status, iterations = _kernels._connect(
        *model.kernel_args(),
        q0.q.copy(),
        q1.q.copy(),
        float(duration),
        float(step),
        float(tol),
        int(max_iter),
        DEFAULT_BVP_FD_EPS,
    )
    if status == _kernels.SINGULAR:
        raise SingularMetricError(
            f"singular metric along initial candidate for {model.name!r}"
        )
    if status == _kernels.DIVERGED:
        raise DivergenceError("initial candidate diverged")
    if status == _kernels.NO_CONVERGENCE:
        raise ConvergenceError(
            f"boundary-value solve did not converge after {iterations} iterations; "
            f"best residual {residual:.3e}",
            best_residual=float(residual),
            iterations=int(iterations),
        )
    return TangentVector(q0, v0)


def riemannian_length(model: RobotModel, traj: GeodesicTrajectory) -> float:
    """Curve length integral of sqrt(qd^T G qd) via trapezoidal quadrature.

    Uses the stored per-sample energies, so it applies to any sampled curve,
    geodesic or not. For a geodesic this equals sqrt(2 k) * duration up to
    quadrature error.
    """
    speeds = np.sqrt(np.maximum(2.0 * np.asarray(traj.energies, dtype=float), 0.0))
    return float(np.trapezoid(speeds, traj.times))


def straight_line_path(
    model: RobotModel,
    q0: Configuration,
    q1: Configuration,
    duration: float,
    step: float = DEFAULT_STEP,
) -> GeodesicTrajectory:
    """Euclidean joint-space interpolation sampled like a shot trajectory.

    Not a geodesic (unless the metric is flat); used as the comparison
    baseline for length and for the compare plot.
    """
    model.check_dim(q0)
    model.check_dim(q1)
    if duration <= 0.0:
        raise InputError(f"duration must be positive, got {duration}")
    if step <= 0.0 or step > duration:
        raise InputError(f"step must satisfy 0 < step <= duration, got {step}")
    nfull, rem = _kernels._grid(float(duration), float(step))
    m = nfull + 1 + (1 if rem > 0.0 else 0)
    times = np.empty(m)
    times[: nfull + 1] = np.arange(nfull + 1) * step
    times[-1] = duration
    frac = times / duration
    qs = q0.q[None, :] + frac[:, None] * (q1.q - q0.q)[None, :]
    qd = (q1.q - q0.q) / duration
    qds = np.tile(qd, (m, 1))
    qdds = np.zeros((m, model.dof))
    gs = _kernels._metric_batch(*model.kernel_args(), qs)
    es = 0.5 * np.einsum("i,mij,j->m", qd, gs, qd)
    return GeodesicTrajectory(times=times, q=qs, qdot=qds, qddot=qdds, energies=es, step=float(step))


def trajectory_diagnostics(model: RobotModel, traj: GeodesicTrajectory):
    """(max relative energy drift, max equation-of-motion residual).

    The drift is relative to the energy at t=0; the residual is
    |G qdd + c|_inf per sample with c from the Christoffel route.
    """
    res, es = _kernels._trajectory_checks(
        *model.kernel_args(), np.asarray(traj.q), np.asarray(traj.qdot), np.asarray(traj.qddot)
    )
    e0 = es[0]
    drift = float(np.max(np.abs(es - e0)) / max(abs(e0), 1e-300))
    return drift, float(np.max(res))


def check_trajectory(
    model: RobotModel,
    traj: GeodesicTrajectory,
    energy_tol: float = ENERGY_DRIFT_TOL,
    residual_tol: float = RESIDUAL_TOL,
):
    """Geodesic invariants as (name, passed, measured, tolerance) rows."""
    drift, residual = trajectory_diagnostics(model, traj)
    increasing = bool(np.all(np.diff(traj.times) > 0.0)) if traj.n_samples > 1 else True
    return [
        ("time-monotonic", increasing, 0.0 if increasing else np.nan, 0.0),
        ("energy-drift", drift < energy_tol, drift, energy_tol),
        ("ode-residual", residual < residual_tol, residual, residual_tol),
    ]


# ---------------------------------------------------------------------------
# CSV interchange


def write_trajectory_csv(traj: GeodesicTrajectory, fh) -> None:
    """Write the sampled trajectory with 17 significant digits per value."""
    n = traj.dof
    header = (
        ["t"]
        + [f"q{i + 1}" for i in range(n)]
        + [f"qd{i + 1}" for i in range(n)]
        + [f"qdd{i + 1}" for i in range(n)]
        + ["energy"]
    )
    fh.write(",".join(header) + "\n")
    for idx in range(traj.n_samples):
        row = [traj.times[idx], *traj.q[idx], *traj.qdot[idx], *traj.qddot[idx], traj.energies[idx]]
        # + 0.0 normalizes negative zeros
        fh.write(",".join(f"{value + 0.0:.17g}" for value in row) + "\n")


def trajectory_to_csv(traj: GeodesicTrajectory) -> str:
    buf = io.StringIO()
    write_trajectory_csv(traj, buf)
    return buf.getvalue()


def read_trajectory_csv(text: str) -> GeodesicTrajectory:
    """Parse a trajectory CSV produced by this package."""
    lines = [line for line in text.strip().splitlines() if line]
    if len(lines) < 2:
        raise InputError("trajectory CSV needs a header and at least one row")
    header = lines[0].split(",")
    if header[0] != "t" or header[-1] != "energy" or (len(header) - 2) % 3 != 0:
        raise InputError("malformed trajectory CSV header")
    n = (len(header) - 2) // 3
    rows = []
    for k, line in enumerate(lines[1:]):
        parts = line.split(",")
        if len(parts) != len(header):
            raise InputError(f"row {k + 1}: expected {len(header)} fields, got {len(parts)}")
        try:
            rows.append([float(x) for x in parts])
        except ValueError:
            raise InputError(f"row {k + 1}: non-numeric value") from None
    data = np.asarray(rows)
    times = data[:, 0]
    step = float(times[1] - times[0]) if len(times) > 1 else 0.0
    return GeodesicTrajectory(
        times=times,
        q=data[:, 1 : 1 + n],
        qdot=data[:, 1 + n : 1 + 2 * n],
        qddot=data[:, 1 + 2 * n : 1 + 3 * n],
        energies=data[:, -1],
        step=step,
    )

"""Geodesic synergies: definition, combination, and metric-orthonormal bases.

A geodesic synergy is a joint coordination fully determined by an initial
configuration and an initial velocity; executing it means shooting the
geodesic. Synergies sharing a base combine by weighted velocity sums;
synergies at different bases are first parallel-transported to the target
base. Because combinations are executed by shooting, they are geodesics by
construction.

N synergies with metric-orthonormal initial velocities span the whole
tangent space, so any initial velocity decomposes exactly over such a
basis; that is the operational form of completeness.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
import yaml

from .errors import BaseMismatchError, ConvergenceError, InputError, ModelError
from .geodesic import DEFAULT_STEP, GeodesicTrajectory, shoot
from .metric import mass_matrix
from .model import Configuration, RobotModel, TangentVector
from .transport import transport_to

ORTHONORMAL_TOL = 1e-10
RANK_PIVOT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class GeodesicSynergy:
    """(base configuration, initial velocity) pair, optionally labelled."""

    base: Configuration
    velocity: TangentVector
    label: str = ""

    def __post_init__(self):
        if self.velocity.base != self.base:
            raise BaseMismatchError(
                f"synergy {self.label!r}: velocity based at {self.velocity.base.q.tolist()}, "
                f"base is {self.base.q.tolist()}"
            )


@dataclass(frozen=True, eq=False)
class SynergyBasis:
    """N tangent vectors at one base whose Gram matrix under G is the identity."""

    base: Configuration
    vectors: tuple

    def __post_init__(self):
        vectors = tuple(self.vectors)
        object.__setattr__(self, "vectors", vectors)
        for vec in vectors:
            if vec.base != self.base:
                raise BaseMismatchError("basis vectors must share the basis base point")

    def matrix(self) -> np.ndarray:
        """Column-stacked basis vectors."""
        return np.stack([vec.v for vec in self.vectors], axis=1)


def combine_same_base(synergies, weights) -> GeodesicSynergy:
    """Weighted sum of synergy velocities at one shared base configuration."""
    synergies = list(synergies)
    weights = [float(w) for w in weights]
    if not synergies:
        raise InputError("need at least one synergy")
    if len(weights) != len(synergies):
        raise InputError(f"{len(synergies)} synergies but {len(weights)} weights")
    base = synergies[0].base
    for syn in synergies[1:]:
        if syn.base != base:
            raise BaseMismatchError(
                f"synergy {syn.label!r} has a different base; transport it first (combine_at)"
            )
    velocity = np.zeros(base.dim)
    for w, syn in zip(weights, synergies):
        velocity = velocity + w * syn.velocity.v
    label = "+".join(f"{w:g}*{syn.label or 's'}" for w, syn in zip(weights, synergies))
    return GeodesicSynergy(base=base, velocity=TangentVector(base, velocity), label=label)


def combine_at(
    model: RobotModel,
    synergies,
    weights,
    target_base: Configuration,
    duration: float = 1.0,
    step: float = DEFAULT_STEP,
    tol: float = 1e-8,
    max_iter: int = 50,
) -> GeodesicSynergy:
    """Combine synergies at a target base, transporting velocities first.

    Velocities whose base already equals the target are used as-is, so with
    all-equal bases this reduces exactly to combine_same_base. Each other
    velocity rides the connecting geodesic from its base to the target
    (``duration`` and ``step`` parameterize those carrying geodesics).
    Non-convergence of any transport names the offending synergy.
    """
    synergies = list(synergies)
    weights = [float(w) for w in weights]
    if not synergies:
        raise InputError("need at least one synergy")
    if len(weights) != len(synergies):
        raise InputError(f"{len(synergies)} synergies but {len(weights)} weights")
    model.check_dim(target_base)
    moved = []
    for idx, syn in enumerate(synergies):
        if syn.base == target_base:
            moved.append(syn.velocity.v)
            continue
        try:
            result = transport_to(
                model, syn.velocity, target_base, duration, step=step, tol=tol, max_iter=max_iter
            )
        except ConvergenceError as exc:
            raise ConvergenceError(
                f"transport of synergy {syn.label or idx + 1!r} to the target base "
                f"did not converge: {exc}",
                best_residual=exc.best_residual,
                iterations=exc.iterations,
            ) from exc
        moved.append(result.vector.v)
    velocity = np.zeros(target_base.dim)
    for w, vec in zip(weights, moved):
        velocity = velocity + w * vec
    label = "+".join(f"{w:g}*{syn.label or 's'}" for w, syn in zip(weights, synergies))
    return GeodesicSynergy(base=target_base, velocity=TangentVector(target_base, velocity), label=label)


def orthonormal_basis(model: RobotModel, base: Configuration, seed=None) -> SynergyBasis:
    """Metric-orthonormal basis of the tangent space at ``base``.

    Modified Gram-Schmidt under the G(base) inner product (two passes for
    numerical orthogonality), seeded with the canonical coordinate vectors
    unless ``seed`` provides N linearly independent vectors. Raises
    InputError when a pivot drops below 1e-12 (rank-deficient seed).
    """
    model.check_dim(base)
    n = model.dof
    g = mass_matrix(model, base)
    if seed is None:
        cols = np.eye(n)
    else:
        cols = np.stack([np.reshape(np.asarray(v, dtype=float), n) for v in seed], axis=1)
        if cols.shape != (n, n):
            raise InputError(f"seed must provide {n} vectors of dimension {n}")
    basis = []
    for j in range(n):
        w = cols[:, j].copy()
        for _pass in range(2):
            for b in basis:
                w = w - (b @ g @ w) * b
        norm2 = float(w @ g @ w)
        if norm2 <= RANK_PIVOT_TOL**2 or not np.isfinite(norm2):
            raise InputError(f"seed vectors are rank deficient (pivot {np.sqrt(max(norm2, 0.0)):.3e} below {RANK_PIVOT_TOL:g})")
        basis.append(w / np.sqrt(norm2))
    return SynergyBasis(base=base, vectors=tuple(TangentVector(base, b) for b in basis))


def decompose(model: RobotModel, basis: SynergyBasis, target: TangentVector) -> np.ndarray:
    """Weights of ``target`` over an orthonormal basis: w_i = <target, b_i>_G.

    The weighted sum of basis vectors reconstructs the target, and the
    squared Riemannian norm of the target equals the sum of squared weights.
    """
    if target.base != basis.base:
        raise BaseMismatchError("target vector must be based at the basis base point")
    g = mass_matrix(model, basis.base)
    return np.array([float(vec.v @ g @ target.v) for vec in basis.vectors])


def execute(
    model: RobotModel, synergy: GeodesicSynergy, duration: float, step: float = DEFAULT_STEP
) -> GeodesicTrajectory:
    """Run a synergy as a geodesic trajectory (delegates to shoot)."""
    return shoot(model, synergy.velocity, duration, step=step)


# ---------------------------------------------------------------------------
# synergy set files


def read_synergies(text: str) -> list[GeodesicSynergy]:
    """Parse a synergy set document: a list of {label, base, velocity}."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}: " if mark is not None else ""
        raise ModelError(f"synergy file parse error: {where}{getattr(exc, 'problem', exc)}") from None
    if not isinstance(doc, dict) or "synergies" not in doc:
        raise ModelError("synergy file must contain a top-level 'synergies' list")
    entries = doc["synergies"]
    if not isinstance(entries, list) or not entries:
        raise ModelError("synergies: expected a non-empty list")
    out = []
    for i, node in enumerate(entries):
        path = f"synergies[{i}]"
        if not isinstance(node, dict):
            raise ModelError(f"{path}: expected a mapping")
        for key in ("base", "velocity"):
            if key not in node:
                raise ModelError(f"{path}: missing field {key!r}")
        label = str(node.get("label", f"synergy-{i + 1}"))
        try:
            base = Configuration([float(x) for x in node["base"]])
            velocity = [float(x) for x in node["velocity"]]
        except (TypeError, ValueError):
            raise ModelError(f"{path}: base and velocity must be numeric lists") from None
        if len(velocity) != base.dim:
            raise ModelError(f"{path}: base and velocity lengths differ")
        out.append(GeodesicSynergy(base=base, velocity=TangentVector(base, velocity), label=label))
    return out


def write_synergies(synergies) -> str:
    doc = {
        "synergies": [
            {
                "label": syn.label,
                "base": [float(x) for x in syn.base.q],
                "velocity": [float(x) for x in syn.velocity.v],
            }
            for syn in synergies
        ]
    }
    buf = io.StringIO()
    yaml.safe_dump(doc, buf, sort_keys=False)
    return buf.getvalue()

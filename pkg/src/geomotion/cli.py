"""Command-line interface.

Subcommands: mass-matrix, shoot, connect, compare, combine, validate.
Vectors are comma-separated decimals (radians / meters). Exit codes:
0 success, 1 numerical failure or failed check, 2 usage or input error.
Output is deterministic: identical invocations (same seed) produce
byte-identical files and reports.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .bundled import BUNDLED_MODELS, load_bundled
from .errors import InputError, NumericalError
from .geodesic import (
    check_trajectory,
    connect,
    riemannian_length,
    shoot,
    straight_line_path,
    trajectory_to_csv,
)
from .metric import mass_matrix
from .model import Configuration, RobotModel, TangentVector, load_model_file
from .svgplot import compare_svg
from .synergy import combine_at, combine_same_base, execute, read_synergies
from .validate import render_report, run_validation


def _parse_vector(text: str, name: str) -> np.ndarray:
    try:
        return np.array([float(part) for part in text.split(",") if part.strip() != ""])
    except ValueError:
        raise InputError(f"{name}: expected comma-separated decimals, got {text!r}") from None


def _load_model_arg(spec: str) -> tuple[RobotModel, str]:
    if os.path.exists(spec):
        return load_model_file(spec), spec
    if spec in BUNDLED_MODELS:
        return load_bundled(spec), f"{spec} (bundled)"
    raise InputError(
        f"model {spec!r} is neither a file nor a bundled model "
        f"({', '.join(BUNDLED_MODELS)})"
    )


class Report:
    """Plain-text run report: echoed inputs, emitted files, checks."""

    def __init__(self, command: str, model_desc: str):
        self.command = command
        self.model_desc = model_desc
        self.inputs: list[tuple[str, str]] = []
        self.notes: list[str] = []
        self.outputs: list[str] = []
        self.diagnostics: list[tuple[str, bool, float, float]] = []

    def add_input(self, key, value):
        self.inputs.append((key, str(value)))

    def add_output(self, path):
        self.outputs.append(str(path))

    def add_check(self, name, passed, measured, tolerance):
        self.diagnostics.append((name, bool(passed), float(measured), float(tolerance)))

    def failed(self) -> bool:
        return any(not ok for _, ok, _, _ in self.diagnostics)

    def render(self) -> str:
        lines = [f"command: {self.command}", f"model: {self.model_desc}"]
        if self.inputs:
            lines.append("inputs:")
            lines.extend(f"  {key} = {value}" for key, value in self.inputs)
        if self.notes:
            lines.extend(self.notes)
        if self.outputs:
            lines.append("outputs:")
            lines.extend(f"  {path}" for path in self.outputs)
        if self.diagnostics:
            lines.append("diagnostics:")
            for name, passed, measured, tol in self.diagnostics:
                status = "PASS" if passed else "FAIL"
                lines.append(f"  {name:<24}{status:<6}measured={measured:.6e}  tol={tol:.6e}")
        lines.append(f"status: {'FAIL' if self.failed() else 'OK'}")
        return "\n".join(lines) + "\n"


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _matrix_lines(g: np.ndarray) -> list[str]:
    return ["  [" + ", ".join(f"{value:.17g}" for value in row) + "]" for row in g]


def _trajectory_checks_into(report: Report, model, traj):
    for name, passed, measured, tol in check_trajectory(model, traj):
        report.add_check(name, passed, measured, tol)


def _cmd_mass_matrix(args) -> int:
    model, desc = _load_model_arg(args.model)
    q = Configuration(_parse_vector(args.q, "--q"))
    g = mass_matrix(model, q)
    print(f"mass matrix of {desc} at q = [{', '.join(f'{x:.17g}' for x in q.q)}]:")
    for line in _matrix_lines(g):
        print(line)
    print(f"det(G) = {float(np.linalg.det(g)):.17g}")
    return 0


def _cmd_shoot(args) -> int:
    model, desc = _load_model_arg(args.model)
    start = TangentVector(
        Configuration(_parse_vector(args.q0, "--q0")), _parse_vector(args.v0, "--v0")
    )
    traj = shoot(model, start, args.duration, step=args.step)
    report = Report("shoot", desc)
    report.add_input("q0", args.q0)
    report.add_input("v0", args.v0)
    report.add_input("duration", args.duration)
    report.add_input("step", args.step)
    _write(args.out, trajectory_to_csv(traj))
    report.add_output(args.out)
    report.add_input("samples", traj.n_samples)
    report.add_input("energy", f"{traj.energy:.17g}")
    _trajectory_checks_into(report, model, traj)
    print(report.render(), end="")
    return 1 if report.failed() else 0


def _cmd_connect(args) -> int:
    model, desc = _load_model_arg(args.model)
    q0 = Configuration(_parse_vector(args.q0, "--q0"))
    q1 = Configuration(_parse_vector(args.q1, "--q1"))
    v0 = connect(model, q0, q1, args.duration, step=args.step, tol=args.tol_bvp)
    traj = shoot(model, v0, args.duration, step=args.step)
    report = Report("connect", desc)
    report.add_input("q0", args.q0)
    report.add_input("q1", args.q1)
    report.add_input("duration", args.duration)
    report.add_input("step", args.step)
    report.add_input("tol-bvp", args.tol_bvp)
    print(f"v0 = [{', '.join(f'{x:.17g}' for x in v0.v)}]")
    _write(args.out, trajectory_to_csv(traj))
    report.add_output(args.out)
    residual = float(np.max(np.abs(traj.q[-1] - q1.q)))
    report.add_check("terminal-residual", residual <= args.tol_bvp, residual, args.tol_bvp)
    _trajectory_checks_into(report, model, traj)
    print(report.render(), end="")
    return 1 if report.failed() else 0


def _cmd_compare(args) -> int:
    model, desc = _load_model_arg(args.model)
    q0 = Configuration(_parse_vector(args.q0, "--q0"))
    q1 = Configuration(_parse_vector(args.q1, "--q1"))
    v0 = connect(model, q0, q1, args.duration, step=args.step, tol=args.tol_bvp)
    geo = shoot(model, v0, args.duration, step=args.step)
    straight = straight_line_path(model, q0, q1, args.duration, step=args.step)
    os.makedirs(args.out, exist_ok=True)
    report = Report("compare", desc)
    report.add_input("q0", args.q0)
    report.add_input("q1", args.q1)
    report.add_input("duration", args.duration)
    report.add_input("step", args.step)
    geo_csv = os.path.join(args.out, "geodesic.csv")
    lin_csv = os.path.join(args.out, "straight.csv")
    _write(geo_csv, trajectory_to_csv(geo))
    _write(lin_csv, trajectory_to_csv(straight))
    report.add_output(geo_csv)
    report.add_output(lin_csv)
    if model.dof == 2:
        svg_path = os.path.join(args.out, "compare.svg")
        _write(svg_path, compare_svg(model, geo.q, straight.q, grid=args.grid))
        report.add_output(svg_path)
    else:
        report.notes.append("note: SVG plot requires a 2-DoF model; CSVs only")
    len_geo = riemannian_length(model, geo)
    len_lin = riemannian_length(model, straight)
    report.add_input("riemannian-length-geodesic", f"{len_geo:.17g}")
    report.add_input("riemannian-length-straight", f"{len_lin:.17g}")
    report.add_input("length-difference", f"{len_lin - len_geo:.17g}")
    report.add_check("geodesic-not-longer", len_geo <= len_lin + 1e-9, len_geo - len_lin, 1e-9)
    _trajectory_checks_into(report, model, geo)
    report_path = os.path.join(args.out, "report.txt")
    report.add_output(report_path)
    text = report.render()
    _write(report_path, text)
    print(text, end="")
    return 1 if report.failed() else 0


def _cmd_combine(args) -> int:
    model, desc = _load_model_arg(args.model)
    with open(args.synergies, "r", encoding="utf-8") as fh:
        synergies = read_synergies(fh.read())
    weights = _parse_vector(args.weights, "--weights")
    if len(weights) != len(synergies):
        raise InputError(
            f"synergy file defines {len(synergies)} synergies but --weights has {len(weights)}"
        )
    bases_equal = all(syn.base == synergies[0].base for syn in synergies)
    if args.target_base is not None:
        target = Configuration(_parse_vector(args.target_base, "--target-base"))
        combined = combine_at(model, synergies, weights, target, duration=args.duration, step=args.step)
    elif bases_equal:
        combined = combine_same_base(synergies, weights)
    else:
        raise InputError("synergies have differing bases: target base required (--target-base)")
    traj = execute(model, combined, args.duration, step=args.step)
    report = Report("combine", desc)
    report.add_input("synergies", args.synergies)
    report.add_input("weights", args.weights)
    if args.target_base is not None:
        report.add_input("target-base", args.target_base)
    report.add_input("duration", args.duration)
    report.add_input("step", args.step)
    report.add_input("combined-velocity", "[" + ", ".join(f"{x:.17g}" for x in combined.velocity.v) + "]")
    _write(args.out, trajectory_to_csv(traj))
    report.add_output(args.out)
    _trajectory_checks_into(report, model, traj)
    print(report.render(), end="")
    return 1 if report.failed() else 0


def _cmd_validate(args) -> int:
    model, _desc = _load_model_arg(args.model)
    results = run_validation(model, seed=args.seed)
    print(render_report(model, args.seed, results), end="")
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geomotion",
        description=(
            "Minimum-energy joint-space motion for serial-chain robots: geodesics of "
            "the kinetic-energy metric, parallel transport, synergy combination."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, duration=True, step=True, tol=False):
        p.add_argument("model", help=f"robot description file or bundled name ({', '.join(BUNDLED_MODELS)})")
        if duration:
            p.add_argument("--duration", type=float, default=1.0, help="trajectory duration in s")
        if step:
            p.add_argument("--step", type=float, default=1e-3, help="integrator step in s")
        if tol:
            p.add_argument("--tol-bvp", type=float, default=1e-8, help="per-joint endpoint tolerance")

    p = sub.add_parser("mass-matrix", help="print G(q) and det(G)")
    add_common(p, duration=False, step=False)
    p.add_argument("--q", required=True, help="configuration, comma-separated radians")
    p.set_defaults(func=_cmd_mass_matrix)

    p = sub.add_parser("shoot", help="integrate a geodesic initial-value problem")
    add_common(p)
    p.add_argument("--q0", required=True, help="initial configuration")
    p.add_argument("--v0", required=True, help="initial joint velocity")
    p.add_argument("--out", default="shoot.csv", help="trajectory CSV path")
    p.set_defaults(func=_cmd_shoot)

    p = sub.add_parser("connect", help="solve the two-point boundary-value problem")
    add_common(p, tol=True)
    p.add_argument("--q0", required=True)
    p.add_argument("--q1", required=True)
    p.add_argument("--out", default="connect.csv", help="trajectory CSV path")
    p.set_defaults(func=_cmd_connect)

    p = sub.add_parser("compare", help="geodesic vs straight joint path, with SVG for 2-DoF models")
    add_common(p, tol=True)
    p.add_argument("--q0", required=True)
    p.add_argument("--q1", required=True)
    p.add_argument("--grid", type=int, default=7, help="metric-ellipse grid resolution")
    p.add_argument("--out", default="compare-out", help="output directory")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("combine", help="combine synergies from a file and execute the result")
    add_common(p)
    p.add_argument("synergies", help="synergy set file (YAML)")
    p.add_argument("--weights", required=True, help="comma-separated weights")
    p.add_argument("--target-base", help="combination base configuration (required for differing bases)")
    p.add_argument("--out", default="combine.csv", help="trajectory CSV path")
    p.set_defaults(func=_cmd_combine)

    p = sub.add_parser("validate", help="run the randomized invariant suite on a model")
    add_common(p, duration=False, step=False)
    p.add_argument("--seed", type=int, default=0, help="PRNG seed for randomized checks")
    p.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()

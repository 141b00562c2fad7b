"""Command-line front end.

Structured JSON report on stdout (deterministic for identical inputs),
human-readable summary plus wall time on stderr.  Exit codes: 0 success,
2 input/validation failure, 3 solver failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

import numpy as np

from . import __version__
from . import capacity as cap
from . import kinematics as kin
from . import lp
from . import mesh as msh
from . import stress as st

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3


class InputError(ValueError):
    pass


def _sha256(path) -> str:
    try:
        with open(path, "rb") as fh:
            return hashlib.sha256(fh.read()).hexdigest()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_mesh(path) -> msh.Mesh:
    try:
        mesh = msh.read_mesh(path)
    except OSError as exc:
        raise InputError(f"cannot read mesh file {path}: {exc}") from exc
    except msh.MeshError as exc:
        raise InputError(str(exc)) from exc
    problems = msh.validate(mesh)
    if problems:
        raise InputError("invalid mesh: " + "; ".join(problems))
    return mesh


def _load_traction(path, ops: kin.DiscreteOperators) -> np.ndarray:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read traction file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"cannot parse traction file {path}: {exc}") from exc
    if "facets" not in doc:
        raise InputError("traction file missing required key 'facets'")
    try:
        return kin.check_traction(ops, np.array(doc["facets"], dtype=float))
    except (ValueError, kin.KinematicsError) as exc:
        raise InputError(str(exc)) from exc


def _sym_to_list(m):
    return [float(v) for v in m.comps]


def _emit(report: dict, summary_lines, t0: float):
    json.dump(report, sys.stdout, sort_keys=True, indent=1)
    sys.stdout.write("\n")
    elapsed = time.monotonic() - t0
    for line in summary_lines:
        print(line, file=sys.stderr)
    print(f"wall time: {elapsed:.3f} s", file=sys.stderr)


def _base_report(command: str, mesh_path, norm: str) -> dict:
    return {
        "tool": "loadcap",
        "version": __version__,
        "command": command,
        "mesh_sha256": _sha256(mesh_path),
        "norm": norm,
        # zero-traction gammaT facets participate in the traction sup norm
        "sup_norm_over_all_gammat_facets": True,
    }


def cmd_analyze(args) -> int:
    t0 = time.monotonic()
    mesh = _load_mesh(args.mesh)
    ops = kin.assemble(mesh)
    t = _load_traction(args.traction, ops)
    if args.mode == st.PLASTIC:
        st.require_plastic_viable(ops)
    result = st.optimal_stress(ops, t, args.mode)
    ok, residual = st.check_equilibrium(ops, result.sigma_hat, t)
    report = _base_report("analyze", args.mesh, args.norm)
    report.update({
        "traction_sha256": _sha256(args.traction),
        "mode": args.mode,
        "sigma_opt": result.sigma_opt,
        "dual_value": result.dual_value,
        "duality_gap": result.duality_gap,
        "equilibrium_residual": residual,
        "equilibrium_ok": ok,
        "sigma_hat": [_sym_to_list(m) for m in result.sigma_hat.elements],
        "sigma_hat_s33": (None if result.sigma_hat.s33 is None
                          else [float(v) for v in result.sigma_hat.s33]),
        "dual_witness": [float(v) for v in result.dual_witness],
    })
    _emit(report, [f"sigma_opt = {result.sigma_opt:.9g} "
                   f"(gap {result.duality_gap:.2e}, residual {residual:.2e})"], t0)
    return EXIT_OK


def cmd_capacity(args) -> int:
    t0 = time.monotonic()
    mesh = _load_mesh(args.mesh)
    ops = kin.assemble(mesh)
    m = len(ops.gammat_facets) * ops.dim
    method = args.method
    if method == "auto":
        method = cap.EXACT if m <= cap.SIGN_PATTERN_CAP else cap.HEURISTIC
    elif method == "exact":
        method = cap.EXACT
    else:
        method = cap.HEURISTIC
    result = cap.generalized_K(ops, args.mode, method)
    report = _base_report("capacity", args.mesh, args.norm)
    report.update({
        "mode": args.mode,
        "method": result.method,
        "K": result.K,
        "C": result.C,
        "lower_bound_only": result.lower_bound_only,
        "caps_hit": m > cap.SIGN_PATTERN_CAP,
        "worst_traction": [[float(v) for v in row] for row in result.worst_traction],
        "certificate": [float(v) for v in result.certificate],
        "interpretation": (
            "no collapse occurs under any traction field with sup norm "
            "below C times the yield stress"),
    })
    if result.method == cap.EXACT and m <= cap.SIGN_PATTERN_CAP:
        K_dual = cap.generalized_K_dual_check(ops, args.mode)
        report["K_traction_side"] = K_dual
        report["K_cross_check_gap"] = abs(result.K - K_dual)
    _emit(report, [f"K = {result.K:.9g}, C = {result.C:.9g} ({result.method})"], t0)
    return EXIT_OK


def cmd_limit(args) -> int:
    t0 = time.monotonic()
    mesh = _load_mesh(args.mesh)
    ops = kin.assemble(mesh)
    t = _load_traction(args.traction, ops)
    st.require_plastic_viable(ops)
    lam_static, lam_kin, gap = cap.kinematic_limit_check(ops, t, args.y0)
    result = cap.limit_analysis(ops, t, args.y0)
    report = _base_report("limit", args.mesh, args.norm)
    report.update({
        "traction_sha256": _sha256(args.traction),
        "mode": st.PLASTIC,
        "y0": args.y0,
        "sigma_opt": result.sigma_opt,
        "lambda_star": result.lambda_star,
        "lambda_kinematic": lam_kin,
        "static_kinematic_gap": gap,
        "t_collapse": [[float(v) for v in row] for row in result.t_collapse],
    })
    _emit(report, [f"lambda* = {result.lambda_star:.9g} "
                   f"(kinematic {lam_kin:.9g}, gap {gap:.2e})"], t0)
    return EXIT_OK


def cmd_verify(args) -> int:
    t0 = time.monotonic()
    mesh = _load_mesh(args.mesh)
    ops = kin.assemble(mesh)
    rng = np.random.default_rng(args.seed)
    checks = []

    def record(name, ok, detail=""):
        checks.append({"check": name, "ok": bool(ok), "detail": detail})

    unclamped = kin.assemble(mesh, clamp=False)
    expected = {1: 1, 2: 3, 3: 6}[mesh.dim]
    kd = kin.rigid_kernel_dim(unclamped)
    record("rigid_kernel_unclamped", kd == expected, f"dim {kd} vs {expected}")
    record("rigid_kernel_clamped", kin.rigid_kernel_dim(ops) == 0,
           f"dim {kin.rigid_kernel_dim(ops)}")

    modes = [st.ELASTIC] + ([st.PLASTIC] if mesh.dim > 1 else [])
    nfac = len(ops.gammat_facets)
    for trial in range(args.trials):
        t = rng.uniform(-1.0, 1.0, size=(nfac, mesh.dim))
        if kin.traction_sup_norm(ops, t) == 0.0:
            continue
        for mode in modes:
            try:
                res = st.optimal_stress(ops, t, mode)
            except st.SolverFailure as exc:
                record(f"duality_trial{trial}_{mode}", False, str(exc))
                continue
            ok_gap = res.duality_gap <= 1e-6 * (1.0 + res.sigma_opt)
            record(f"duality_trial{trial}_{mode}", ok_gap,
                   f"gap {res.duality_gap:.2e}")
            scaled = st.optimal_stress(ops, 3.0 * t, mode)
            ok_h = abs(scaled.sigma_opt - 3.0 * res.sigma_opt) \
                <= 1e-6 * (1.0 + res.sigma_opt)
            record(f"homogeneity_trial{trial}_{mode}", ok_h)

    for i in range(10):
        n, mrows = 6, 4
        A = rng.uniform(-1.0, 1.0, size=(mrows, n))
        x0 = rng.uniform(0.0, 1.0, size=n)
        prob = lp.LPStandardForm(c=rng.uniform(-1.0, 1.0, size=n),
                                 A=A, b=A @ x0)
        got, want = lp.solve(prob), lp.solve_brute(prob)
        ok = got.status == want.status and (
            got.status != lp.OPTIMAL
            or abs(got.objective - want.objective) <= 1e-7)
        record(f"lp_oracle_{i}", ok)

    all_ok = all(c["ok"] for c in checks)
    report = _base_report("verify", args.mesh, "l1linf")
    report.update({"seed": args.seed, "trials": args.trials,
                   "all_ok": all_ok, "checks": checks})
    n_ok = sum(c["ok"] for c in checks)
    _emit(report, [f"{n_ok}/{len(checks)} checks passed"], t0)
    return EXIT_OK if all_ok else EXIT_SOLVER


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="loadcap",
        description="Optimal stress, stress concentration factor and load "
                    "capacity of discretized supported bodies.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--mode", choices=list(st.MODES), default=st.ELASTIC)
        p.add_argument("--norm", choices=["l1linf"], default="l1linf")

    p = sub.add_parser("analyze", help="optimal stress for a traction field")
    p.add_argument("mesh")
    p.add_argument("traction")
    add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("capacity", help="stress concentration factor K and C")
    p.add_argument("mesh")
    add_common(p)
    p.add_argument("--method", choices=["auto", "exact", "heuristic"],
                   default="auto")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("limit", help="limit-analysis factor for a traction")
    p.add_argument("mesh")
    p.add_argument("traction")
    p.add_argument("--y0", type=float, default=1.0)
    p.add_argument("--norm", choices=["l1linf"], default="l1linf")
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("verify", help="run the invariant suite on a mesh")
    p.add_argument("mesh")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--trials", type=int, default=20)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, msh.MeshError, kin.KinematicsError, st.StressError,
            cap.CapacityError, lp.LPError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (st.SolverFailure, lp.LPIterationError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())

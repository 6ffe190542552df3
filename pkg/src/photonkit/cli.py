"""Command-line entry point: ``photonkit check|correlate|photon|gauge|gram``.

Exit codes: 0 when every check passes, 1 when a check fails or a computation
is rejected, 2 when the scene cannot be parsed or a name does not resolve.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__, gauge as gauge_mod, poincare, vacuum
from .checks import SUITES, CheckResult, Context, idempotence_residual, run_suite
from .errors import DegenerateStateError, InvalidGridError, PhotonkitError, SceneError
from .fields import PhaseModulated, euclid_norm, lorenz_residual, transverse_form
from .quadrature import MomentumGrid, build_grid
from .scene import Scene, empty_scene, load_scene

EXIT_OK, EXIT_FAIL, EXIT_SCENE = 0, 1, 2

CONVENTIONS = {
    "metric": "diag(+1,-1,-1,-1), lower-index components",
    "K0": "i d/dx0 of F along time shifts of the ket label",
    "K_alpha": "-i d/dx_alpha of F along spatial shifts of the ket label",
    "M_rotation": "+i d/dchi of F along rotations of the ket label",
    "M_boost": "-i d/dchi of F along boosts of the ket label",
}


def bundled_scene_path() -> Path:
    return Path(str(resources.files("photonkit") / "scenes" / "default.json"))


# --- JSON output -----------------------------------------------------------------

def _jsonable(value):
    """Plain JSON types; floats keep shortest round-trip repr, non-finite floats become strings."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [_jsonable(float(value.real)), _jsonable(float(value.imag))]
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else repr(v)
    return value


def dumps(report: dict) -> str:
    return json.dumps(_jsonable(report), indent=2, allow_nan=False) + "\n"


def _check_entry(result: CheckResult, timing: bool) -> dict:
    entry = {
        "name": result.name,
        "value": result.value,
        "residual": result.residual,
        "tolerance": result.tolerance,
        "pass": result.passed,
    }
    if result.detail:
        entry["detail"] = result.detail
    if timing:
        entry["wall_time"] = result.wall_time
    return entry


def _base_report(command: str, scene: Scene, grid: MomentumGrid, seed: int, kernel) -> dict:
    return {
        "tool": "photonkit",
        "version": __version__,
        "command": command,
        "scene_hash": scene.digest,
        "seed": seed,
        "eta": kernel.eta,
        "grid": grid.describe(),
    }


# --- argument handling ---------------------------------------------------------------

def _grid_arg(text: str):
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected NR,NT,NP") from None
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected NR,NT,NP")
    return parts


def _shift_arg(text: str):
    try:
        parts = tuple(float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected x0,x1,x2,x3") from None
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("expected x0,x1,x2,x3")
    return parts


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--scene", help="scene JSON file (default: empty scene)")
    common.add_argument("--kmin", type=float, help="inner radius of the momentum shell")
    common.add_argument("--kmax", type=float, help="outer radius of the momentum shell")
    common.add_argument("--grid", type=_grid_arg, help="quadrature resolution NR,NT,NP")
    common.add_argument("--seed", type=int, help="random seed (overrides the scene)")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--tol-scale", type=float, help="multiply every tolerance by this factor")
    common.add_argument("--timing", action="store_true", help="include wall times (not reproducible)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="photonkit", parents=[common],
                                     description="Numerical checks of the free photon vacuum state.")
    parser.add_argument("--version", action="version", version=f"photonkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="run an invariant suite")
    p.add_argument("suite", nargs="?", default="all", choices=SUITES + ("all",))

    p = sub.add_parser("correlate", parents=[common], help="evaluate F for two labels")
    p.add_argument("x")
    p.add_argument("y")

    p = sub.add_parser("photon", parents=[common], help="one-photon observables of a wave function")
    p.add_argument("name")
    p.add_argument("--boost", type=float, default=0.0, help="rapidity of a boost along e3")
    p.add_argument("--shift", type=_shift_arg, default=None, help="spacetime shift x0,x1,x2,x3")
    p.add_argument("--bound", type=float, default=0.25, help="helicity classification bound")

    p = sub.add_parser("gauge", parents=[common], help="radiation-gauge representative of a wave function")
    p.add_argument("name")

    p = sub.add_parser("gram", parents=[common], help="Gram matrix of named labels")
    p.add_argument("labels", nargs="+")
    return parser


def _setup(args):
    scene = load_scene(args.scene) if getattr(args, "scene", None) else empty_scene()
    cfg = dict(scene.grid_config)
    for attr, key in (("kmin", "k_min"), ("kmax", "k_max"), ("grid", "resolution")):
        if hasattr(args, attr):
            cfg[key] = getattr(args, attr)
    try:
        grid = build_grid(cfg["k_min"], cfg["k_max"], cfg["resolution"])
    except InvalidGridError as exc:
        raise SceneError(str(exc)) from None
    seed = getattr(args, "seed", None)
    if seed is None:
        seed = scene.seed if scene.seed is not None else 0
    tol_scale = getattr(args, "tol_scale", 1.0)
    if not tol_scale > 0:
        raise SceneError("--tol-scale must be positive")
    kernel = vacuum.CorrelationKernel(eta=scene.eta, grid=grid)
    _warn_cutoff(scene, grid)
    return scene, grid, seed, tol_scale, kernel


def outer_leakage(f, grid: MomentumGrid) -> float:
    """Largest |f| on the sphere |k| = k_max relative to its largest value on the grid."""
    shell = grid.resolution[1] * grid.resolution[2]  # radius is the slowest node index
    directions = grid.nodes[-shell:] / grid.norms[-shell:, None]
    edge = float(np.max(np.abs(f.evaluate(directions * grid.k_max)), initial=0.0))
    peak = float(np.max(np.abs(f.sample(grid)), initial=0.0))
    return edge / peak if peak > 0 else 0.0


def _warn_cutoff(scene: Scene, grid: MomentumGrid) -> None:
    for name, f in scene.fields.items():
        leak = outer_leakage(f, grid)
        if leak > 1e-12:
            print(f"photonkit: warning: field {name!r} is {leak:.1e} of its peak at k_max = {grid.k_max}",
                  file=sys.stderr)


# --- commands -------------------------------------------------------------------------

def cmd_check(args, scene, grid, seed, tol_scale, kernel):
    ctx = Context(scene, kernel, seed, tol_scale)
    results = run_suite(ctx, args.suite)
    report = _base_report("check", scene, grid, seed, kernel)
    report["suite"] = args.suite
    report["tol_scale"] = tol_scale
    report["conventions"] = CONVENTIONS
    report["checks"] = [_check_entry(r, args.timing) for r in results]
    report["pass"] = all(r.passed for r in results)
    return report, report["pass"]


def cmd_correlate(args, scene, grid, seed, tol_scale, kernel):
    x, y = scene.get_label(args.x), scene.get_label(args.y)
    value = vacuum.correlation(kernel, x, y)
    checks = [
        CheckResult("weyl_identity", None, vacuum.weyl_identity_residual(kernel, x, y), 1e-10 * tol_scale),
        CheckResult("hermiticity", None,
                    abs(value - np.conj(vacuum.correlation(kernel, y, x))), 1e-12 * tol_scale),
    ]
    report = _base_report("correlate", scene, grid, seed, kernel)
    report["labels"] = [args.x, args.y]
    report["value"] = value
    report["symplectic"] = vacuum.symplectic_form(kernel, x, y)
    report["checks"] = [_check_entry(c, args.timing) for c in checks]
    report["pass"] = all(c.passed for c in checks)
    return report, report["pass"]


def cmd_photon(args, scene, grid, seed, tol_scale, kernel):
    psi = scene.get_field(args.name)
    report = _base_report("photon", scene, grid, seed, kernel)
    report["wavefunction"] = args.name
    applied = {}
    if args.shift is not None:
        psi = PhaseModulated(args.shift, psi)
        applied["shift"] = list(args.shift)
    if args.boost:
        element = poincare.boost3(args.boost)
        psi = poincare.LorentzTransformed(element, psi)
        grid = poincare.boosted_grid(grid, element)
        kernel = kernel.with_grid(grid)
        applied["boost"] = args.boost
    report["applied"] = applied
    report["grid"] = grid.describe()

    scale = euclid_norm(psi, grid) ** 2
    norm_sq = vacuum.one_photon_norm_sq(kernel, psi)
    if not norm_sq > 1e-10 * scale:
        raise DegenerateStateError(f"degenerate one-photon state: norm^2 = {norm_sq!r}")
    report["norm_sq"] = norm_sq
    report["expectations"] = poincare.one_photon_expectations(kernel, psi)
    report["spin_parts"] = poincare.spin_part_norms(kernel, psi)
    report["spin_parts_gauge"] = "radiation"
    rep = gauge_mod.radiation_gauge_representative(psi)
    report["polarization"] = poincare.polarization_audit(rep, grid, bound=args.bound)
    report["pass"] = True
    return report, True


def cmd_gauge(args, scene, grid, seed, tol_scale, kernel):
    psi = scene.get_field(args.name)
    rep = gauge_mod.radiation_gauge_representative(psi)
    samples = rep.sample(grid)
    equivalence = gauge_mod.are_equivalent(psi, rep, grid, seed=seed)
    scale = max(euclid_norm(psi, grid), np.finfo(float).tiny)
    conditions = max(float(np.max(np.abs(samples[:, 0]), initial=0.0)),
                     float(np.max(np.abs(np.einsum("ij,ij->i", grid.nodes, samples[:, 1:])), initial=0.0)))
    checks = [
        CheckResult("equivalence", None, equivalence.max_ratio, 1e-10 * tol_scale),
        CheckResult("idempotence", None, idempotence_residual(psi, grid), 1e-14 * tol_scale),
        CheckResult("radiation_conditions", None,
                    conditions / max(float(np.max(np.abs(psi.sample(grid)), initial=0.0)), 1e-300),
                    1e-12 * tol_scale),
    ]
    report = _base_report("gauge", scene, grid, seed, kernel)
    report["wavefunction"] = args.name
    report["input_norm"] = euclid_norm(psi, grid)
    report["input_lorenz_residual"] = float(np.max(np.abs(lorenz_residual(psi, grid.nodes)), initial=0.0))
    report["representative"] = {
        "norm": euclid_norm(rep, grid),
        "relative_norm": euclid_norm(rep, grid) / scale,
        "transverse_form": transverse_form(rep, grid),
        "max_time_component": float(np.max(np.abs(samples[:, 0]), initial=0.0)),
    }
    report["checks"] = [_check_entry(c, args.timing) for c in checks]
    report["pass"] = all(c.passed for c in checks)
    return report, report["pass"]


def cmd_gram(args, scene, grid, seed, tol_scale, kernel):
    labels = [scene.get_label(n) for n in args.labels]
    report = _base_report("gram", scene, grid, seed, kernel)
    report["labels"] = list(args.labels)
    try:
        G = vacuum.gram_matrix(kernel, labels)
        message = "ok"
    except PhotonkitError as exc:
        G = getattr(exc, "gram", None)
        message = str(exc)
        if G is None:
            raise
    min_eig = vacuum.gram_min_eigenvalue(G)
    norm = float(np.linalg.norm(G, 2))
    check = CheckResult("positivity", min_eig, max(0.0, -min_eig) / norm, 1e-10 * tol_scale,
                        {"message": message})
    report["matrix"] = G
    report["checks"] = [_check_entry(check, args.timing)]
    report["pass"] = check.passed
    return report, check.passed


COMMANDS = {"check": cmd_check, "correlate": cmd_correlate, "photon": cmd_photon,
            "gauge": cmd_gauge, "gram": cmd_gram}


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.timing = getattr(args, "timing", False)
    out = getattr(args, "out", None)
    start = time.perf_counter()
    try:
        setup = _setup(args)
        report, ok = COMMANDS[args.command](args, *setup)
    except SceneError as exc:
        print(f"photonkit: scene error: {exc}", file=sys.stderr)
        return EXIT_SCENE
    except PhotonkitError as exc:
        print(f"photonkit: {exc}", file=sys.stderr)
        _emit(dumps({"tool": "photonkit", "version": __version__, "command": args.command,
                     "error": type(exc).__name__, "message": str(exc), "pass": False}), out)
        return EXIT_FAIL
    if args.timing:
        report["wall_time"] = time.perf_counter() - start
    _emit(dumps(report), out)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

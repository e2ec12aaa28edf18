"""Command-line entry point.

Every subcommand reads a scene JSON document (top-level keys ``materials``,
``layer``, ``cell``, ``wave``, ``inclusion``; optional ``"units":
"wavelength"``) and writes its artifacts plus a ``report.json`` into the
output directory.

Scene fields
------------
materials : mu_plus, eps_plus, mu_cl, eps_cl, mu_host, eps_host, mu_B, eps_B, mu_D, eps_D
layer     : mean, xi, cos (list), sin (list)
cell      : ell1, ell2, inclusion (shape)
wave      : omega, theta (unit 2-vector pointing downwards)
inclusion : shape; shapes are {"type": "ellipse", "center", "semi_axes", "angle"},
            {"type": "star", "center", "radius", "cos", "sin"},
            {"type": "polygon", "vertices"} (cell only) or
            {"type": "stripe", "low", "high"} (cell only)

Exit codes: 0 success, 2 validation failure, 3 numerical failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import json
import platform
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__, _accel
from .errors import NumericalError, ValidationError
from .layered import LayeredMedium, background_field, green
from .model import load_scene
from .pipeline import (DEFAULT_CELL_GRID, DEFAULT_NODES, DEFAULT_STRIP_GRID, DEFAULT_TOL, ObservationWindow,
                       effective_stage, layer_stage, run_pipeline)

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4
CSV_FORMAT = "%.17g"

FIELD_COLUMNS = "x1,x2,re_u,im_u,abs_u"
GREEN_COLUMNS = "x1,x2,re_G,im_G"

_HELP_COLUMNS = {
    "background": f"Writes background.json (R, T, vertical wavenumbers) and background.csv with columns "
                  f"{FIELD_COLUMNS} (u is the background field U).",
    "green": f"Writes green.csv with columns {GREEN_COLUMNS}; the source point itself is NaN.",
    "scatter": f"Writes field.csv with columns {FIELD_COLUMNS} (total field; NaN within two node spacings "
               f"of the object boundary).",
}


# --- parsing ---------------------------------------------------------------------------------

def _grid_pair(text):
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected N1xN2, got {text!r}") from exc


def _window(text):
    """``x1min:x1max:n1,x2min:x2max:n2``"""
    try:
        axes = []
        for part in text.split(","):
            lo, hi, n = part.split(":")
            axes.append(np.linspace(float(lo), float(hi), int(n)))
        x1, x2 = axes
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected x1min:x1max:n1,x2min:x2max:n2, got {text!r}") from exc
    return ObservationWindow(x1, x2)


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def _nodes(text):
    n = int(text)
    if n < 8 or n % 2 or n > 1024:
        raise argparse.ArgumentTypeError("--nodes must be even and in [8, 1024]")
    return n


def build_parser():
    parser = argparse.ArgumentParser(prog="camoscat", description=__doc__.split("\n\n")[0],
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scene=True):
        if scene:
            p.add_argument("--scene", required=True, help="scene JSON file")
        p.add_argument("--out", default="out", help="output directory (created if missing)")
        p.add_argument("--n-grid", type=_grid_pair, default=DEFAULT_CELL_GRID,
                       help="cell-problem grid N1xN2, powers of two >= 16 (default 256x256)")
        p.add_argument("--strip-L", type=_positive_float, default=None,
                       help="strip truncation half-height (default max f + 5)")
        return p

    p = common(sub.add_parser("homogenize", help="effective tensor and permittivity"))
    p = common(sub.add_parser("layer-coeffs", help="thin-layer transmission coefficients"))
    p = common(sub.add_parser("background", help="plane-wave background field",
                              description=_HELP_COLUMNS["background"]))
    p.add_argument("--grid", type=_window, default=None, help="window x1min:x1max:n1,x2min:x2max:n2")
    p = common(sub.add_parser("green", help="layered Green's function on a grid",
                              description=_HELP_COLUMNS["green"]))
    p.add_argument("--source", type=float, nargs=2, required=True, metavar=("Y1", "Y2"))
    p.add_argument("--grid", type=_window, required=True, help="window x1min:x1max:n1,x2min:x2max:n2")
    p.add_argument("--tol", type=_positive_float, default=1e-10, help="quadrature tolerance (default 1e-10)")
    p = common(sub.add_parser("scatter", help="total field of the buried object",
                              description=_HELP_COLUMNS["scatter"]))
    p.add_argument("--grid", type=_window, default=None,
                   help="window x1min:x1max:n1,x2min:x2max:n2 (default one wavelength above the layer)")
    p.add_argument("--nodes", type=_nodes, default=DEFAULT_NODES, help="boundary nodes (default 128)")
    p.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL,
                   help="layered-kernel quadrature tolerance (default 1e-9)")
    p = sub.add_parser("validate", help="run a named acceptance scenario")
    p.add_argument("--scenario", required=True, help="scenario name or criterion number")
    p.add_argument("--out", default="out", help="output directory (created if missing)")
    return parser


# --- outputs ---------------------------------------------------------------------------------

def _versions():
    return {"camoscat": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__, "backend": _accel.backend()}


def _write_json(path, doc):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def write_csv(path, columns, rows):
    np.savetxt(path, rows, fmt=CSV_FORMAT, delimiter=",", header=columns, comments="")


def _field_rows(x1, x2, u):
    X1, X2 = np.meshgrid(x1, x2, indexing="ij")
    return np.column_stack([X1.ravel(), X2.ravel(), u.real.ravel(), u.imag.ravel(), np.abs(u).ravel()])


# --- subcommands -----------------------------------------------------------------------------

def _scene(args):
    return load_scene(args.scene, n_grid=args.n_grid[0])


def _config(args):
    cfg = {k: v for k, v in vars(args).items() if k != "grid"}
    if getattr(args, "grid", None) is not None:
        cfg["grid"] = args.grid.to_dict()
    cfg["n_grid"] = list(args.n_grid) if "n_grid" in cfg else None
    return cfg


def cmd_homogenize(args, out):
    scene = _scene(args)
    eff = effective_stage(scene, args.n_grid)
    return {"effective": eff.to_dict(), "symmetry_defect": eff.symmetry_defect,
            "scene": scene.derived()}


def _medium(args, scene):
    eff = effective_stage(scene, args.n_grid)
    strip, coeffs = layer_stage(scene, eff, args.strip_L, DEFAULT_STRIP_GRID)
    return eff, strip, coeffs, LayeredMedium.build(scene.materials, eff, coeffs, scene.wave.omega)


def cmd_layer_coeffs(args, out):
    scene = _scene(args)
    eff, strip, coeffs, _ = _medium(args, scene)
    _write_json(out / "coefficients.json", coeffs.to_dict())
    return {"coefficients": coeffs.to_dict(), "effective": eff.to_dict(),
            "strip": {"residual": strip.residual, "truncation_L": strip.truncation_L,
                      "decay_bottom": strip.decay_bottom, "decay_top": strip.decay_top}}


def cmd_background(args, out):
    scene = _scene(args)
    _, _, coeffs, medium = _medium(args, scene)
    bg = background_field(scene.wave, medium)
    _write_json(out / "background.json", bg.to_dict())
    win = args.grid or ObservationWindow.above_layer(scene)
    X1, X2 = np.meshgrid(win.x1, win.x2, indexing="ij")
    write_csv(out / "background.csv", FIELD_COLUMNS, _field_rows(win.x1, win.x2, bg.value(X1, X2)))
    inc, ref, tr = bg.energy_fluxes()
    return {"background": bg.to_dict(), "coefficients": coeffs.to_dict(),
            "energy_defect": abs(inc + ref - tr) / abs(inc)}


def cmd_green(args, out):
    scene = _scene(args)
    _, _, _, medium = _medium(args, scene)
    y = np.asarray(args.source, dtype=float)
    win = args.grid
    X1, X2 = np.meshgrid(win.x1, win.x2, indexing="ij")
    values = np.full(X1.shape, np.nan + 0j)
    worst = 0.0
    for idx in np.ndindex(X1.shape):
        x = np.array([X1[idx], X2[idx]])
        if np.allclose(x, y):
            continue
        g = green(x, y, medium, tol=args.tol)
        values[idx] = g.value
        worst = max(worst, g.error)
    rows = np.column_stack([X1.ravel(), X2.ravel(), values.real.ravel(), values.imag.ravel()])
    write_csv(out / "green.csv", GREEN_COLUMNS, rows)
    return {"max_error_estimate": worst, "tol": args.tol}


def cmd_scatter(args, out):
    scene = _scene(args)
    res = run_pipeline(scene, args.grid, n_grid=args.n_grid, n_nodes=args.nodes, tol=args.tol,
                       strip_L=args.strip_L)
    f = res.field
    write_csv(out / "field.csv", FIELD_COLUMNS, _field_rows(f.x1, f.x2, f.total))
    scat = np.abs(f.scattered)
    report = res.report()
    report["max_scattered_over_background"] = float(np.nanmax(scat) / np.nanmax(np.abs(f.background)))
    report["window"] = ObservationWindow(f.x1, f.x2).to_dict()
    return report, res.timings


def cmd_validate(args, out):
    from .validation import run_scenario  # noqa: PLC0415  (heavy imports only when needed)
    verdict = run_scenario(args.scenario)
    doc = verdict.to_dict(timings=False)
    _write_json(out / "verdict.json", doc)
    print(verdict.summary())
    return doc, {"runtime_s": verdict.runtime_s}


COMMANDS = {"homogenize": cmd_homogenize, "layer-coeffs": cmd_layer_coeffs, "background": cmd_background,
            "green": cmd_green, "scatter": cmd_scatter, "validate": cmd_validate}


def run(args):
    """Execute a parsed command; returns the exit status."""
    _accel.configure_threads()
    out = Path(args.out)
    t0 = time.perf_counter()
    try:
        out.mkdir(parents=True, exist_ok=True)
        result = COMMANDS[args.command](args, out)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (OSError, json.JSONDecodeError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    timings = {}
    if isinstance(result, tuple):
        result, timings = result
    timings["total_s"] = time.perf_counter() - t0
    report = {"command": args.command, "config": _config(args), "versions": _versions(),
              "result": result, "timings": timings}
    try:
        _write_json(out / "report.json", report)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.command == "validate" and not result.get("pass", False):
        return EXIT_VALIDATION
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    return run(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

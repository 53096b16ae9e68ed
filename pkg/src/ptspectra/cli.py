"""Command-line front end.

Numbers are printed with 12 significant digits (scientific notation below
1e-4 and from 1e6 up); complex values become {"re": .., "im": ..} in JSON and
two adjacent columns in CSV and plot output.

Exit codes: 0 success, 1 usage error, 2 solver error.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import branches, eigensolve, hardbox, softbox
from .errors import SolverError

DEFAULT_TOL = 1e-10
TOL_ENV = "PT_SPECTRA_TOL"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# ------------------------------------------------------------ formatting

def fmt(v):
    v = float(v)
    if not np.isfinite(v):
        raise ValueError("non-finite number in output")
    if v == 0:
        return "0"
    a = abs(v)
    if a < 1e-4 or a >= 1e6:
        return f"{v:.11e}"
    return f"{v:.12g}"


def to_json(obj):
    """Serialise with fixed number formatting; keys keep insertion order."""
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return to_json({"re": obj.real, "im": obj.imag})
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _cell(v):
    if v is None:
        return [""]
    if isinstance(v, (complex, np.complexfloating)):
        return [fmt(v.real), fmt(v.imag)]
    if isinstance(v, (bool, np.bool_)):
        return ["true" if v else "false"]
    if isinstance(v, (float, np.floating)):
        return [fmt(v)]
    return [str(v)]


def to_table(columns, rows, kinds=None):
    """Expand complex columns into (re, im) pairs; returns header and string rows."""
    kinds = kinds or {}
    header = []
    for c in columns:
        header += [f"{c}_re", f"{c}_im"] if kinds.get(c) == "complex" else [c]
    out = []
    for r in rows:
        line = []
        for c, v in zip(columns, r):
            if kinds.get(c) == "complex" and v is None:
                line += ["", ""]
            elif kinds.get(c) == "complex":
                v = complex(v)
                line += [fmt(v.real), fmt(v.imag)]
            else:
                line += _cell(v)
        out.append(line)
    return header, out


def write_table(columns, rows, fmt_name, sink, kinds=None):
    header, body = to_table(columns, rows, kinds)
    if fmt_name == "csv":
        w = csv.writer(sink, lineterminator="\n")
        w.writerow(header)
        w.writerows(body)
    else:
        sink.write("# " + " ".join(header) + "\n")
        for line in body:
            sink.write(" ".join(x if x != "" else "nan" for x in line) + "\n")


# ------------------------------------------------------------ argument helpers

def parse_coupling(text):
    """Real literal or imaginary literal such as 5.0i."""
    t = text.strip().lower()
    try:
        if t.endswith("i") or t.endswith("j"):
            body = t[:-1]
            val = float(body) if body not in ("", "+", "-") else float(body + "1")
            return complex(0.0, val)
        return float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid coupling {text!r}") from None


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def default_tol():
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return DEFAULT_TOL
    try:
        v = float(raw)
    except ValueError:
        raise UsageError(f"{TOL_ENV} is not a number: {raw!r}") from None
    if not v > 0:
        raise UsageError(f"{TOL_ENV} must be positive")
    return v


def _eig_records(spec):
    return [{"value": e.value, "kind": e.kind, "residual": e.residual} for e in spec.eigenvalues]


def _real_or_complex(g):
    g = complex(g)
    return g.real if g.imag == 0 else g


# ------------------------------------------------------------ commands

def cmd_spectrum_hard(a, tol):
    g = complex(a.g)
    if a.branch == 0 or abs(g) < hardbox.G_ZERO:
        spec = hardbox.spectrum(hardbox.HardBoxProblem(g), a.count)
    else:
        spec = branches.spectrum_on_branch(g, a.branch, a.count)
    doc = {"command": "spectrum-hard", "g": _real_or_complex(g), "branch": a.branch,
           "method": spec.method, "pt_broken": spec.pt_broken, "eigenvalues": _eig_records(spec)}
    rows = [(i + 1, e.value, e.kind, e.residual) for i, e in enumerate(spec.eigenvalues)]
    return doc, (["n", "E", "kind", "residual"], rows, {"E": "complex"})


def cmd_matrix(a, tol):
    h = eigensolve.build_hardbox_matrix(a.g, a.N)
    ev = eigensolve.eigenvalues(h, tol=max(tol, 1e-12))[:a.count]
    doc = {"command": "matrix", "g": _real_or_complex(a.g), "N": a.N,
           "pseudo_hermiticity_residual": eigensolve.pseudo_hermiticity_residual(h)
           if complex(a.g).imag == 0 else None,
           "symmetry_residual": eigensolve.symmetry_residual(h),
           "eigenvalues": [{"value": e.value, "kind": e.kind, "residual": e.residual} for e in ev]}
    rows = [(i + 1, e.value, e.kind, e.residual) for i, e in enumerate(ev)]
    return doc, (["n", "E", "kind", "residual"], rows, {"E": "complex"})


def cmd_spectrum_soft(a, tol):
    g = _real(a.g)
    rep = softbox.bound_spectrum(softbox.SoftBoxProblem(g, a.exterior))
    doc = {"command": "spectrum-soft", "g": g, "exterior": a.exterior,
           "eigenvalues": rep.eigenvalues, "residuals": rep.residuals,
           "decaying": rep.decaying, "merged": rep.merged}
    rows = [(i + 1, E, r, d) for i, (E, r, d) in
            enumerate(zip(rep.eigenvalues, rep.residuals, rep.decaying))]
    return doc, (["n", "E", "residual", "decaying"], rows, {})


def _ep_record(ep):
    return {"g_c": ep.g_c, "E_c": ep.E_c, "pair_index": ep.pair_index,
            "ground_jump": ep.ground_jump, "ground_below": ep.ground_below,
            "ground_above": ep.ground_above, "residuals": list(ep.residuals)}


def cmd_critical(a, tol):
    if a.system == "hard":
        eps = hardbox.exceptional_points(a.g_min, a.g_max)
    else:
        eps = [softbox.soft_critical((a.g_min, a.g_max), exterior=a.exterior)]
    doc = {"command": "critical", "system": a.system, "g_min": a.g_min, "g_max": a.g_max,
           "points": [_ep_record(e) for e in eps]}
    rows = [(e.g_c, e.E_c, e.pair_index, e.ground_jump) for e in eps]
    return doc, (["g_c", "E_c", "pair_index", "ground_jump"], rows, {})


def cmd_bands(a, tol):
    prob = hardbox.HardBoxProblem(a.g, a.branch)
    bands = hardbox.detect_null_bands(prob, a.E_min, a.E_max, a.step, root_tol=tol,
                                      norm_threshold=a.norm_threshold)
    doc = {"command": "bands", "g": _real_or_complex(a.g), "branch": a.branch,
           "root_tol": tol, "norm_threshold": a.norm_threshold,
           "bands": [{"E_lo": b.E_lo, "E_hi": b.E_hi} for b in bands]}
    rows = [(b.E_lo, b.E_hi) for b in bands]
    return doc, (["E_lo", "E_hi"], rows, {})


def cmd_reflectionless(a, tol):
    g = _real(a.g)
    roots, min_res, arg = softbox.reflectionless_scan(g, a.E_min, a.E_max, a.step)
    doc = {"command": "reflectionless", "g": g, "E_min": a.E_min, "E_max": a.E_max,
           "roots": roots, "min_abs_residual": min_res, "argmin_E": arg}
    return doc, (["min_abs_residual", "argmin_E", "n_roots"], [(min_res, arg, len(roots))], {})


def cmd_branches(a, tol):
    g = complex(a.g)
    cmp_ = branches.compare_branches(g, a.count)
    bs = branches.branch_values(g)
    doc = {"command": "branches", "g": _real_or_complex(g),
           "q": [bs.q0, bs.q1, bs.q2],
           "spectra": {str(k): [e.value for e in s.eigenvalues] for k, s in cmp_.spectra.items()},
           "repeated": [{"E": E, "branches": ks} for E, ks in cmp_.repeated.items()],
           "bands": {str(k): [{"E_lo": b.E_lo, "E_hi": b.E_hi} for b in v]
                     for k, v in cmp_.bands.items()},
           "proportionality": [{"E": E, "branch": k, "deviation": d}
                               for (E, k), d in cmp_.proportionality.items()]}
    rows = []
    for k, s in cmp_.spectra.items():
        rows += [(k, i + 1, e.value) for i, e in enumerate(s.eigenvalues)]
    return doc, (["branch", "n", "E"], rows, {"E": "complex"})


def cmd_rectwell(a, tol):
    lv = softbox.rect_well_spectrum(a.v1, a.v2)
    doc = {"command": "rectwell", "v1": a.v1, "v2": a.v2, "eigenvalues": lv}
    return doc, (["n", "E"], [(i + 1, E) for i, E in enumerate(lv)], {})


def cmd_stepwell(a, tol):
    lv = softbox.step_well_spectrum(a.v0)
    doc = {"command": "stepwell", "v0": a.v0, "eigenvalues": lv}
    return doc, (["n", "E"], [(i + 1, E) for i, E in enumerate(lv)], {})


def _real(g):
    g = complex(g)
    if g.imag != 0:
        raise UsageError("this command needs a real coupling")
    return g.real


def _sweep_row(system, g, quantity, count, tol):
    if system == "hard":
        if quantity == "levels":
            r = hardbox.real_roots(hardbox.HardBoxProblem(g), *hardbox.DEFAULT_WINDOW) \
                if abs(g) >= hardbox.G_ZERO else list(hardbox.box_levels(count))
            return (r + [None] * count)[:count]
        if quantity == "real-count":
            r = hardbox.real_roots(hardbox.HardBoxProblem(g), *hardbox.DEFAULT_WINDOW)
            return [len(r)]
        b = hardbox.detect_null_bands(hardbox.HardBoxProblem(g), *hardbox.DEFAULT_WINDOW,
                                      root_tol=tol)
        return [b[0].E_lo, b[0].E_hi] if b else [None, None]
    rep = softbox.bound_spectrum(softbox.SoftBoxProblem(g))
    if quantity == "levels":
        return (rep.eigenvalues + [None] * count)[:count]
    if quantity == "real-count":
        return [len(rep.eigenvalues)]
    raise UsageError("band-edges is defined for the hard box only")


def emit_sweep(system, g_grid, quantity, sink, fmt_name="csv", count=5, tol=DEFAULT_TOL):
    """One row per g in grid order, trailing status column; exit 0 unless all rows fail."""
    if len(g_grid) == 0:
        raise UsageError("empty coupling grid")
    if quantity == "levels":
        n = count if system == "hard" else 2
        cols = [f"E{i + 1}" for i in range(n)]
    elif quantity == "real-count":
        n, cols = 1, ["real_count"]
    else:
        n, cols = 2, ["band_lo", "band_hi"]
    rows, failures = [], 0
    for g in g_grid:
        try:
            vals = _sweep_row(system, float(g), quantity, n, tol)
            status = "ok"
        except SolverError as exc:
            vals = [None] * n
            status = f"error: {type(exc).__name__}"
            failures += 1
        rows.append([float(g)] + vals + [status])
    if fmt_name == "json":
        doc = {"command": "sweep", "system": system, "quantity": quantity, "columns": cols,
               "rows": [{"g": r[0], "values": r[1:-1], "status": r[-1]} for r in rows]}
        sink.write(to_json(doc) + "\n")
    else:
        write_table(["g"] + cols + ["status"], rows, fmt_name, sink)
    return 2 if failures == len(g_grid) else 0


COMMANDS = {
    "spectrum-hard": cmd_spectrum_hard,
    "spectrum-soft": cmd_spectrum_soft,
    "matrix": cmd_matrix,
    "critical": cmd_critical,
    "bands": cmd_bands,
    "reflectionless": cmd_reflectionless,
    "branches": cmd_branches,
    "rectwell": cmd_rectwell,
    "stepwell": cmd_stepwell,
}


def build_parser():
    p = _Parser(prog="ptspectra", description="Spectra of V = igx in hard and soft boxes.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--format", choices=("json", "csv", "plot"), default="json")
        sp.add_argument("--tol", type=_positive_float, default=None,
                        help=f"tolerance (default ${TOL_ENV} or {DEFAULT_TOL})")
        return sp

    sp = common(sub.add_parser("spectrum-hard"))
    sp.add_argument("--g", type=parse_coupling, required=True)
    sp.add_argument("--count", type=int, default=5)
    sp.add_argument("--branch", type=int, choices=(0, 1, 2), default=0)

    sp = common(sub.add_parser("spectrum-soft"))
    sp.add_argument("--g", type=parse_coupling, required=True)
    sp.add_argument("--exterior", choices=softbox.EXTERIORS, default="growing")

    sp = common(sub.add_parser("matrix"))
    sp.add_argument("--g", type=parse_coupling, required=True)
    sp.add_argument("--N", type=int, default=eigensolve.DEFAULT_N)
    sp.add_argument("--count", type=int, default=5)

    sp = common(sub.add_parser("critical"))
    sp.add_argument("--system", choices=("hard", "soft"), default="hard")
    sp.add_argument("--g-min", type=_positive_float, required=True)
    sp.add_argument("--g-max", type=_positive_float, required=True)
    sp.add_argument("--exterior", choices=softbox.EXTERIORS, default="growing")

    sp = common(sub.add_parser("bands"))
    sp.add_argument("--g", type=parse_coupling, required=True)
    sp.add_argument("--branch", type=int, choices=(0, 1, 2), default=0)
    sp.add_argument("--E-min", type=float, default=hardbox.DEFAULT_WINDOW[0])
    sp.add_argument("--E-max", type=float, default=hardbox.DEFAULT_WINDOW[1])
    sp.add_argument("--step", type=_positive_float, default=hardbox.SCAN_STEP)
    sp.add_argument("--norm-threshold", type=_positive_float, default=hardbox.NULL_NORM)

    sp = common(sub.add_parser("reflectionless"))
    sp.add_argument("--g", type=parse_coupling, required=True)
    sp.add_argument("--E-min", type=_positive_float, default=1e-3)
    sp.add_argument("--E-max", type=_positive_float, default=50.0)
    sp.add_argument("--step", type=_positive_float, default=1e-3)

    sp = common(sub.add_parser("branches"))
    sp.add_argument("--g", type=parse_coupling, required=True)
    sp.add_argument("--count", type=int, default=5)

    sp = common(sub.add_parser("rectwell"))
    sp.add_argument("--v1", type=float, required=True)
    sp.add_argument("--v2", type=float, required=True)

    sp = common(sub.add_parser("stepwell"))
    sp.add_argument("--v0", type=float, required=True)

    sp = sub.add_parser("sweep")
    sp.add_argument("--format", choices=("json", "csv", "plot"), default="csv")
    sp.add_argument("--tol", type=_positive_float, default=None)
    sp.add_argument("--system", choices=("hard", "soft"), default="hard")
    sp.add_argument("--quantity", choices=("levels", "real-count", "band-edges"), default="levels")
    sp.add_argument("--g-values", type=float, nargs="+")
    sp.add_argument("--g-min", type=float)
    sp.add_argument("--g-max", type=float)
    sp.add_argument("--g-step", type=_positive_float)
    sp.add_argument("--count", type=int, default=5)
    return p


def _grid(a):
    if a.g_values:
        return list(a.g_values)
    if a.g_min is None or a.g_max is None or a.g_step is None:
        raise UsageError("give --g-values or all of --g-min, --g-max, --g-step")
    if a.g_max < a.g_min:
        raise UsageError("--g-max is below --g-min")
    n = int(np.floor((a.g_max - a.g_min) / a.g_step + 1e-9))
    return [round(a.g_min + i * a.g_step, 12) for i in range(n + 1)]


def run(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    a = parser.parse_args(argv)
    try:
        tol = a.tol if a.tol is not None else default_tol()
        if getattr(a, "count", 1) < 1:
            raise UsageError("--count must be at least 1")
        if getattr(a, "N", 1) < 1:
            raise UsageError("--N must be at least 1")
        if a.command == "sweep":
            return emit_sweep(a.system, _grid(a), a.quantity, out, a.format, a.count, tol)
        for lo, hi in (("g_min", "g_max"), ("E_min", "E_max")):
            if hasattr(a, lo) and getattr(a, lo) >= getattr(a, hi):
                raise UsageError(f"--{lo.replace('_', '-')} must be below --{hi.replace('_', '-')}")
        doc, table = COMMANDS[a.command](a, tol)
    except (UsageError, ValueError) as exc:
        err.write(f"ptspectra: error: {exc}\n")
        return 1
    except SolverError as exc:
        err.write(f"ptspectra: solver error ({type(exc).__name__}): {exc}\n")
        return 2
    if a.format == "json":
        out.write(to_json(doc) + "\n")
    else:
        cols, rows, kinds = table
        write_table(cols, rows, a.format, out, kinds)
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

"""Command-line front end: ``stringlab <subcommand> [flags]``.

Every subcommand merges three layers of settings: built-in defaults, an
optional ``--config`` JSON file, then explicit flags.  The merged settings
are validated against ``schemas/<subcommand>.json``.  Results go to
``--out`` (relative paths land under $STRINGLAB_OUT when it is set) or to
stdout.  Exit codes: 0 success, 1 a check failed, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from importlib import resources

import jsonschema
import numpy as np

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
OUT_ENV = "STRINGLAB_OUT"


class UsageError(Exception):
    pass


# -- serialization -----------------------------------------------------------

def _plain(obj):
    """Convert to JSON-ready Python values; floats stay floats for dumps()."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return [_plain(x) for x in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    if hasattr(obj, "as_dict"):
        return _plain(obj.as_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = "%.17g" % x
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float written with 17 significant digits."""
    def render(v, depth):
        pad = " " * (indent * (depth + 1))
        end = " " * (indent * depth)
        if isinstance(v, bool) or v is None:
            return json.dumps(v)
        if isinstance(v, float):
            return format_float(v)
        if isinstance(v, (int, str)):
            return json.dumps(v)
        if isinstance(v, dict):
            if not v:
                return "{}"
            items = [f"{pad}{json.dumps(k)}: {render(x, depth + 1)}" for k, x in v.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if not v:
            return "[]"
        if all(not isinstance(x, (dict, list)) for x in v):
            return "[" + ", ".join(render(x, depth + 1) for x in v) + "]"
        return "[\n" + ",\n".join(pad + render(x, depth + 1) for x in v) + "\n" + end + "]"
    return render(_plain(obj), 0) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_float(x) if isinstance(x, float) else
                    (f"{x.numerator}/{x.denominator}" if isinstance(x, Fraction) else x) for x in row])
    return buf.getvalue()


def resolve_out(path: str | None) -> str | None:
    if path is None:
        return None
    base = os.environ.get(OUT_ENV)
    if base and not os.path.isabs(path):
        path = os.path.join(base, path)
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    return path


def emit(text: str, path: str | None):
    path = resolve_out(path)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# -- config --------------------------------------------------------------------

def load_schema(name: str) -> dict:
    text = resources.files("stringlab").joinpath("schemas", f"{name}.json").read_text("utf-8")
    return json.loads(text)


def merged_config(sub: str, defaults: dict, args: argparse.Namespace, keys) -> dict:
    cfg = dict(defaults)
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        cfg.update(data)
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    try:
        jsonschema.validate(cfg, load_schema(sub))
    except jsonschema.ValidationError as exc:
        path = "/".join(str(x) for x in exc.absolute_path) or "<root>"
        raise UsageError(f"config error at {path}: {exc.message}") from exc
    return cfg


def parse_rational_list(text: str) -> list[Fraction]:
    try:
        return [Fraction(x.strip()) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad rational list {text!r}") from exc


def parse_float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad number list {text!r}") from exc


# -- spectrum / noghost --------------------------------------------------------

def _momentum_from(text, d):
    from .virasoro import Momentum
    comps = parse_rational_list(text)
    if len(comps) > d:
        raise UsageError(f"momentum has {len(comps)} components, d = {d}")
    return Momentum(comps + [Fraction(0)] * (d - len(comps)))


def cmd_spectrum(cfg) -> tuple[int, str]:
    from .spectrum import shell_r, spectrum_table
    d, top = cfg["d"], cfg["max_level"]
    momenta = {}
    if cfg.get("momentum"):
        p = _momentum_from(cfg["momentum"], d)
        lev = [L for L in range(top + 1) if p.minkowski_square() == -shell_r(L)]
        if not lev:
            raise UsageError(f"momentum with p^2 = {p.minkowski_square()} lies on no shell up to level {top}")
        momenta[lev[0]] = p
    table = spectrum_table(d, top, momenta, cfg["method"], cfg["jobs"])
    if cfg.get("csv"):
        rows = [(t.level, t.r, t.dim_total, t.dim_constrained, t.dim_null, t.dim_physical,
                 *t.inertia) for t in table]
        emit(csv_text(["level", "r", "dim_total", "dim_constrained", "dim_null", "dim_physical",
                       "n_plus", "n_zero", "n_minus"], rows), cfg["csv"])
    return EXIT_OK, dumps(table)


def _gram_task(args):
    from .spectrum import physical_gram
    d, level, p = args
    return physical_gram(d, level, p)


def cmd_noghost(cfg) -> tuple[int, str]:
    from .metric_linalg import Inertia
    from .spectrum import shell_r, transverse_count
    from .virasoro import rational_shell_point
    d, level = cfg["d"], cfg["level"]
    tasks = [(d, level, rational_shell_point(shell_r(level), d, scale=Fraction(s)))
             for s in cfg["scales"]]
    if cfg["jobs"] > 1:
        with ProcessPoolExecutor(max_workers=cfg["jobs"]) as pool:
            reports = list(pool.map(_gram_task, tasks))
    else:
        reports = [_gram_task(t) for t in tasks]
    if cfg.get("inject_fault"):
        # test hook: pretend one positive direction is a ghost
        i = reports[0].inertia
        reports[0].inertia = Inertia(i.n_plus - 1, i.n_zero, i.n_minus + 1)
    keyed = [(r.dim_total, r.dim_constrained, r.dim_null, r.dim_physical, tuple(r.inertia))
             for r in reports]
    independent = len(set(keyed)) == 1
    ghost_free = all(r.ghost_free for r in reports)
    out = {"d": d, "level": level, "points": reports, "ghost_free": ghost_free,
           "momentum_independent": independent}
    passed = ghost_free and independent
    if d >= 3:
        tc = transverse_count(d, level)
        out["transverse_count"] = tc
        if d == 26:
            out["matches_transverse_count"] = all(r.dim_physical == tc for r in reports)
            passed = passed and out["matches_transverse_count"]
    out["passed"] = passed
    return (EXIT_OK if passed else EXIT_FAIL), dumps(out)


# -- virasoro ----------------------------------------------------------------------

def _bracket_task(args):
    from .virasoro import virasoro_bracket
    m, n, p, level, reduced = args
    return virasoro_bracket(m, n, p, level, reduced)


def cmd_virasoro(cfg) -> tuple[int, str]:
    from .virasoro import expected_central, rational_shell_point
    d, mmax, level = cfg["d"], cfg["mmax"], cfg["level"]
    p = _momentum_from(cfg["momentum"], d) if cfg.get("momentum") else rational_shell_point(2, d)
    pairs = [(m, n) for m in range(-mmax, mmax + 1) for n in range(m + 1, mmax + 1)]
    tasks = [(m, n, p, level, cfg["reduced"]) for m, n in pairs]
    if cfg["jobs"] > 1:
        with ProcessPoolExecutor(max_workers=cfg["jobs"]) as pool:
            reports = list(pool.map(_bracket_task, tasks))
    else:
        reports = [_bracket_task(t) for t in tasks]
    rows, passed = [], True
    for rep in reports:
        row = rep.as_dict()
        if rep.m + rep.n == 0:
            exp = expected_central(d, rep.m)
            row["expected_central"] = exp
            row["central_matches"] = rep.central_coefficient == exp
            passed = passed and row["central_matches"]
        passed = passed and rep.matches_closure
        rows.append(row)
    out = {"d": d, "mmax": mmax, "level": level, "p": list(p.components), "brackets": rows,
           "passed": passed}
    return (EXIT_OK if passed else EXIT_FAIL), dumps(out)


# -- measure -------------------------------------------------------------------------

def _padded(vals, d):
    vals = list(vals)[:d]
    return vals + [0.0] * (d - len(vals))


def cmd_measure(cfg) -> tuple[int, str]:
    import warnings
    from . import mass_shell as ms
    from .lorentz import rational_boost
    from .virasoro import rational_shell_point
    r, d, check, nodes = cfg["r"], cfg["d"], cfg["check"], cfg["nodes"]
    out = {"check": check, "r": r, "d": d, "nodes": nodes}
    if check == "invariance":
        if r < 0:
            raise UsageError("the invariance check integrates over the r >= 0 forward sheet")
        f = ms.gaussian(_padded([1.0, 0.2, -0.1], d), 0.7)
        quad = ms.QuadratureSpec(((-8.0, 8.0),) * (d - 1), nodes)
        L = rational_boost(Fraction(5, 4), Fraction(3, 4), 1, d)
        base, moved, rel = ms.check_invariance(f, ms.ShellSpec(r, "plus_sheet", d), L, quad)
        out.update(integral=base, transformed=moved, rel_err=rel)
        tol = cfg.get("tol", 1e-8)
    elif check == "lightcone":
        c = [float(x) for x in rational_shell_point(Fraction(r).limit_denominator(10 ** 6), d,
                                                    sheet="any", scale=2).as_float()]
        R = 0.5
        f = ms.radial_bump(c, R)
        boxes = ms.bump_boxes(c, R)
        lc = ms.QuadratureSpec(boxes["lightcone"], nodes)
        with warnings.catch_warnings():
            warnings.simplefilter("error", ms.LightConeSingularityWarning)
            val = ms.integrate_lightcone_param(f, ms.ShellSpec(r, "lightcone_plus", d), lc)
            fine = ms.integrate_lightcone_param(f, ms.ShellSpec(r, "lightcone_plus", d), lc.refined())
        out.update(center=c, radius=R, lightcone=val, lightcone_refined=fine,
                   refinement_rel=ms._rel(val, fine))
        if r >= 0:
            en = ms.integrate_energy_param(f, ms.ShellSpec(r, "plus_sheet", d),
                                           ms.QuadratureSpec(boxes["energy"], nodes))
            out.update(energy=en, rel_err=ms._rel(en, val))
        else:
            out["rel_err"] = out["refinement_rel"]
        tol = cfg.get("tol", 1e-8)
    else:
        if d == 2:
            c, R, split = [2.0, 0.0], 0.8, 0.0
        elif d == 3:
            c, R, split = [1.2, 0.3, 0.9], 0.5, math.inf
        else:
            raise UsageError("the fiber check is set up for d = 2 and d = 3")
        f = ms.radial_bump(c, R)
        boxes = ms.bump_boxes(c, R)
        inner = max(nodes // 2, 20)
        lhs, rhs, rel = ms.fiber_decomposition_check(
            f, boxes["r_range"], ms.QuadratureSpec(boxes["lebesgue"], nodes),
            energy_quad=ms.QuadratureSpec(boxes["energy"], inner),
            lightcone_quad=ms.QuadratureSpec(boxes["lightcone"], inner),
            r_nodes=cfg["r_nodes"], split=split)
        out.update(center=c, radius=R, r_range=list(boxes["r_range"]), lebesgue=lhs,
                   iterated=rhs, rel_err=rel)
        tol = cfg.get("tol", 1e-6)
    out["tol"] = tol
    out["passed"] = out["rel_err"] <= tol
    return (EXIT_OK if out["passed"] else EXIT_FAIL), dumps(out)


# -- commutators -------------------------------------------------------------------

def _samplings(cfg):
    from .mass_shell import grid_sampling, rapidity_sampling
    r, d = cfg["r"], cfg["d"]
    if d == 2 and r > 0:
        return [grid_sampling(r, cfg["p_max"], cfg["grid"])]
    return [rapidity_sampling(r, d)]


def _scalar_pair(cfg, g_center):
    from .propagator import TestFunctionSpec
    d, r = cfg["d"], cfg["r"]
    w = _padded(cfg["widths"], d)
    F = TestFunctionSpec(d, cfg["profile"], center=_padded(cfg["f_center"], d), widths=w,
                         mass_squared=r)
    G = TestFunctionSpec(d, cfg["profile"], center=_padded(g_center, d), widths=w, mass_squared=r)
    return F, G


def _supports_spacelike(cfg, a) -> bool:
    """Box supports of two bumps separated by a are spacelike separated."""
    if cfg["profile"] != "bump":
        return False
    w = np.asarray(_padded(cfg["widths"], cfg["d"]), dtype=float)
    a = np.asarray(a, dtype=float)
    t_max = abs(a[0]) + 2 * w[0]
    # smallest spatial distance between the two boxes
    gaps = np.maximum(np.abs(a[1:]) - 2 * w[1:], 0.0)
    return float(np.linalg.norm(gaps)) > t_max


def cmd_commutator(cfg) -> tuple[int, str]:
    from .propagator import pauli_jordan_commutator, smeared_commutator
    samplings = _samplings(cfg)
    fc = np.asarray(_padded(cfg["f_center"], cfg["d"]))
    if cfg["scan"] == "none":
        F, G = _scalar_pair(cfg, cfg["g_center"])
        mom = smeared_commutator(F, G, samplings)
        out = {"momentum_route": mom,
               "spacelike_supports": _supports_spacelike(cfg, np.asarray(_padded(cfg["g_center"], cfg["d"])) - fc)}
        passed = True
        if cfg["d"] == 2 and cfg["profile"] == "bump":
            pos = pauli_jordan_commutator(F, G, cfg["r"], nodes=cfg["nodes"])
            rel = abs(mom - pos) / max(abs(pos), 1e-300)
            out.update(position_route=pos, rel_diff=rel, tol=cfg["tol"])
            passed = rel <= cfg["tol"] or abs(pos) < 1e-14
        out["passed"] = passed
        return (EXIT_OK if passed else EXIT_FAIL), dumps(out)
    direction = np.asarray(_padded(cfg["direction"], cfg["d"]), dtype=float)
    if np.linalg.norm(direction[1:]) <= abs(direction[0]):
        raise UsageError("scan direction must be spacelike")
    direction = direction / np.linalg.norm(direction)
    ref_shift = fc.copy()
    ref_shift[0] += cfg["radii"][0]
    F, Gref = _scalar_pair(cfg, ref_shift)
    ref = abs(smeared_commutator(F, Gref, samplings))
    rows, passed = [], True
    for R in cfg["radii"]:
        a = R * direction
        _, G = _scalar_pair(cfg, fc + a)
        val = smeared_commutator(F, G, samplings)
        sep = _supports_spacelike(cfg, a)
        ok = abs(val) <= cfg["zero_tol"] * ref if sep else True
        passed = passed and ok
        rows.append((float(R), float(val.real), float(val.imag), float(ref), sep))
    out_path = cfg.get("out")
    if out_path and out_path.endswith(".csv"):
        return (EXIT_OK if passed else EXIT_FAIL), csv_text(
            ["abs_a", "re", "im", "reference_scale"], [row[:4] for row in rows])
    out = {"rows": [{"abs_a": R, "re": re, "im": im, "reference_scale": rf, "spacelike_supports": s}
                    for R, re, im, rf, s in rows], "zero_tol": cfg["zero_tol"], "passed": passed}
    return (EXIT_OK if passed else EXIT_FAIL), dumps(out)


def cmd_decay(cfg) -> tuple[int, str]:
    from .mass_shell import grid_sampling, rapidity_sampling
    from .propagator import TestFunctionSpec, decay_scan, loglog_slope
    d, r = cfg["d"], cfg["r"]
    w = _padded(cfg["widths"], d)
    F = TestFunctionSpec(d, "gaussian", widths=w, mass_squared=r)
    G = TestFunctionSpec(d, "gaussian", widths=w, mass_squared=r)
    samp = [grid_sampling(r, cfg["p_max"], cfg["grid"])] if d == 2 and r > 0 else [rapidity_sampling(r, d)]
    try:
        table = decay_scan(F, G, _padded(cfg["direction"], d), cfg["radii"], samp, cfg["eps"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    slope = loglog_slope(table)
    passed = slope <= cfg["max_slope"]
    if cfg.get("csv"):
        emit(csv_text(["abs_a", "re", "im", "reference_scale"],
                      [(R, float(v.real), float(v.imag), float(ref)) for R, v, ref in table]), cfg["csv"])
    out = {"rows": [{"abs_a": R, "value": v, "abs_value": abs(v), "reference_scale": ref}
                    for R, v, ref in table], "slope": slope, "max_slope": cfg["max_slope"],
           "passed": passed}
    return (EXIT_OK if passed else EXIT_FAIL), dumps(out)


# -- string field ------------------------------------------------------------------

def _space(cfg):
    from .string_field import boost_orbit_space
    if cfg["d"] < 4:
        raise UsageError("the orbit discretization needs d >= 4")
    return boost_orbit_space(cfg["d"])


def cmd_field_ccr(cfg) -> tuple[int, str]:
    from .lorentz import rational_boost
    from .string_field import (covariance_residual, field_commutator_residual, preimage_mask,
                               probe_battery, standard_constrained_function)
    S = _space(cfg)
    d = cfg["d"]
    F = standard_constrained_function(S, 1)
    G = F.translated(_padded(cfg["g_shift"], d))
    f, g = S.project(F), S.project(G)
    probes = probe_battery(S, "any", cfg["probes"], seed=cfg["seed"])
    ccr = [field_commutator_residual(f, g, p) for p in probes]
    out = {"d": d, "entries": len(S), "pairing": S.pairing(f, g), "ccr_relative": ccr,
           "ccr_tol": cfg["tol"]}
    passed = max(ccr) <= cfg["tol"]
    if cfg["covariance"]:
        L = rational_boost(Fraction(5, 4), Fraction(3, 4), 1, d)
        a = _padded(cfg["translation"], d)
        cov_probes = probe_battery(S, "prime", cfg["probes"], seed=cfg["seed"] + 1,
                                   allowed=preimage_mask(S, L))
        cov = [covariance_residual(F, a, L, p) for p in cov_probes]
        out.update(covariance=cov, covariance_tol=cfg["covariance_tol"])
        passed = passed and max(cov) <= cfg["covariance_tol"]
    out["passed"] = passed
    return (EXIT_OK if passed else EXIT_FAIL), dumps(out)


def cmd_observable(cfg) -> tuple[int, str]:
    from .string_field import (observable_lift_check, probe_battery,
                               standard_constrained_function, unconstrained_control)
    S = _space(cfg)
    lev = cfg["level"]
    prime = probe_battery(S, "prime", cfg["prime_probes"], seed=cfg["seed"])
    rad = probe_battery(S, "radical", cfg["radical_probes"], seed=cfg["seed"] + 1)
    rep = observable_lift_check(standard_constrained_function(S, lev), S, prime, rad, tol=cfg["tol"])
    out = {"d": cfg["d"], "level": lev, "constrained": rep}
    passed = all(rep.passed.values())
    if cfg["control"]:
        ctrl = observable_lift_check(unconstrained_control(S, lev), S, prime, rad, tol=cfg["tol"])
        out["control"] = ctrl
        out["control_detected"] = not ctrl.passed["i"]
        passed = passed and out["control_detected"]
    out["passed"] = passed
    return (EXIT_OK if passed else EXIT_FAIL), dumps(out)


# -- parser -------------------------------------------------------------------------

DEFAULTS = {
    "spectrum": {"d": 26, "max_level": 2, "method": "sector", "jobs": 1},
    "noghost": {"d": 26, "level": 1, "scales": ["1", "2"], "jobs": 1, "inject_fault": False},
    "virasoro-check": {"d": 26, "mmax": 3, "level": 4, "reduced": True, "jobs": 1},
    "measure": {"r": 1.0, "d": 2, "check": "lightcone", "nodes": 200, "r_nodes": 100},
    "commutator": {"d": 2, "r": 1.0, "profile": "bump", "widths": [1.0, 1.0],
                   "f_center": [0.0, 0.0], "g_center": [5.0, 0.0], "scan": "none",
                   "direction": [0.0, 1.0], "radii": [5.0, 6.0, 8.0, 12.0],
                   "p_max": 200.0, "grid": 8001, "nodes": 96, "tol": 1e-4, "zero_tol": 1e-6},
    "decay-scan": {"d": 2, "r": 1.0, "widths": [1.0, 1.0], "direction": [0.3, 1.0],
                   "radii": [2.0, 4.0, 8.0, 16.0], "eps": 0.1, "p_max": 60.0, "grid": 6001,
                   "max_slope": -6.0},
    "field-ccr": {"d": 26, "probes": 10, "seed": 0, "tol": 1e-10, "covariance": True,
                  "covariance_tol": 1e-8, "g_shift": [0.4, 0.1, -0.3],
                  "translation": [0.3, 0.2, -0.7]},
    "observable-check": {"d": 26, "level": 1, "prime_probes": 6, "radical_probes": 4, "seed": 1,
                         "tol": 1e-8, "control": True},
}

HANDLERS = {
    "spectrum": cmd_spectrum, "noghost": cmd_noghost, "virasoro-check": cmd_virasoro,
    "measure": cmd_measure, "commutator": cmd_commutator, "decay-scan": cmd_decay,
    "field-ccr": cmd_field_ccr, "observable-check": cmd_observable,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text):
    try:
        return parse_float_list(text)
    except UsageError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stringlab", description="Free bosonic string checks at desk scale.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")

    def common(sp, jobs=False):
        sp.add_argument("--config", help="JSON file with settings; flags override it")
        sp.add_argument("--out", help="output file (default stdout)")
        if jobs:
            sp.add_argument("--jobs", type=int, help="worker processes for the sweep")

    sp = sub.add_parser("spectrum", help="physical state table per level")
    common(sp, jobs=True)
    sp.add_argument("--d", type=int)
    sp.add_argument("--max-level", dest="max_level", type=int)
    sp.add_argument("--momentum", help='rational components "num/den,..." (zero padded)')
    sp.add_argument("--method", choices=["sector", "dense"])
    sp.add_argument("--csv", help="also write the table as CSV")

    sp = sub.add_parser("noghost", help="no-ghost inertia at two shell points")
    common(sp, jobs=True)
    sp.add_argument("--d", type=int)
    sp.add_argument("--level", type=int)
    sp.add_argument("--scales", type=lambda t: [x.strip() for x in t.split(",")],
                    help="shell point scales, e.g. 1,2")
    sp.add_argument("--inject-fault", dest="inject_fault", action="store_true", default=None,
                    help=argparse.SUPPRESS)

    sp = sub.add_parser("virasoro-check", help="Virasoro closure and central term")
    common(sp, jobs=True)
    sp.add_argument("--d", type=int)
    sp.add_argument("--mmax", type=int)
    sp.add_argument("--level", type=int)
    sp.add_argument("--momentum")
    sp.add_argument("--full", dest="reduced", action="store_false", default=None,
                    help="sweep every probe monomial instead of one per flavor orbit")

    sp = sub.add_parser("measure", help="invariant shell measure checks")
    common(sp)
    sp.add_argument("--r", type=float)
    sp.add_argument("--d", type=int)
    sp.add_argument("--check", choices=["invariance", "lightcone", "fiber"])
    sp.add_argument("--nodes", type=int)
    sp.add_argument("--r-nodes", dest="r_nodes", type=int)
    sp.add_argument("--tol", type=float)

    sp = sub.add_parser("commutator", help="smeared field commutators")
    common(sp)
    sp.add_argument("--scan", choices=["none", "spacelike"])
    sp.add_argument("--r", type=float)
    sp.add_argument("--f-center", dest="f_center", type=_floats)
    sp.add_argument("--g-center", dest="g_center", type=_floats)
    sp.add_argument("--radii", type=_floats)
    sp.add_argument("--direction", type=_floats)

    sp = sub.add_parser("decay-scan", help="spacelike decay of gaussian commutators")
    common(sp)
    sp.add_argument("--direction", type=_floats)
    sp.add_argument("--radii", type=_floats)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--csv")

    sp = sub.add_parser("field-ccr", help="field commutator and covariance residuals")
    common(sp)
    sp.add_argument("--d", type=int)
    sp.add_argument("--probes", type=int)
    sp.add_argument("--seed", type=int)

    sp = sub.add_parser("observable-check", help="observable-field lift conditions")
    common(sp)
    sp.add_argument("--d", type=int)
    sp.add_argument("--level", type=int)
    sp.add_argument("--seed", type=int)
    return p


FLAG_KEYS = ("d", "max_level", "momentum", "method", "csv", "jobs", "level", "scales",
             "inject_fault", "mmax", "reduced", "r", "check", "nodes", "r_nodes", "tol", "scan",
             "f_center", "g_center", "radii", "direction", "eps", "probes", "seed", "out")


def run(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        cfg = merged_config(args.command, DEFAULTS[args.command], args, FLAG_KEYS)
        code, text = HANDLERS[args.command](cfg)
    except UsageError as exc:
        print(f"stringlab {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    emit(text, cfg.get("out"))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

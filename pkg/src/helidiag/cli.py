"""Command-line front end: ``helidiag <subcommand> [options]``.

Every option can also come from an INI file given with ``--config``.  The
``[global]`` section applies to all subcommands and a section named after
a subcommand (e.g. ``[defect-scan]``) to that one; keys are option names
with dashes or underscores.  Flags on the command line win.

Randomness: a single ``--seed`` feeds ``SeedSequence(seed,
spawn_key=(module_key, ...))`` with a fixed key per subcommand (see
``MODULE_KEYS``), unless a generator spec names its own ``seed=``.

Exit codes: 0 success, 2 invalid input or unwritable output, 3 numerical
abort (non-finite solver state).
"""
from __future__ import annotations

import argparse
import configparser
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import jsonschema
import numpy as np

from . import schemas
from .commutator import commutator_scaling_scan
from .conservation import (PressureLaw, compressible_defect_scan, energy, helicity,
                           helicity_flux_scan, pressure_commutator_scan, sqg_defect_scan,
                           sqg_helicity, vorticity_transport_scan)
from .core import Grid, ScalarField, VectorField, curl, divergence, gradient
from .criteria import QUANTITIES, criteria_evaluator, render_table
from .fieldio import FieldFileError, atomic_write_json, atomic_write_text, read_field, write_field
from .littlewood_paley import cN_profile, default_difference_scales, finite_difference_modulus
from .scaling import geometric_scales
from .solver import NumericalAbort, SolverConfig, export_trajectory, integrate
from .synth import (BesovFieldSpec, abc_flow, lacunary_field, lacunary_vector_field,
                    manufactured_compressible, random_band_limited, random_besov_field,
                    random_besov_vector_field, taylor_green)

log = logging.getLogger("helidiag")

ENV_WORKERS = "HELIDIAG_WORKERS"
ENV_OUTDIR = "HELIDIAG_OUTDIR"
MODULE_KEYS = {"synth": 1, "analyze-besov": 2, "commutator-scan": 3, "defect-scan": 4,
               "run-solver": 5}

EXIT_OK, EXIT_USAGE, EXIT_ABORT = 0, 2, 3


class UsageError(Exception):
    """Invalid input detected before or during computation (exit code 2)."""


def derive_seed(seed: int, module: str, *key: int) -> int:
    """Per-module seed split from the global seed."""
    ss = np.random.SeedSequence(seed, spawn_key=(MODULE_KEYS[module],) + tuple(key))
    return int(ss.generate_state(1)[0])


# --- parsing helpers ------------------------------------------------------------

def number(text) -> float:
    """Float parser accepting ``inf`` and fractions such as ``1/3``."""
    if isinstance(text, (int, float)):
        return float(text)
    t = str(text).strip()
    if t.lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(Fraction(t)) if "/" in t else float(t)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def parse_kv(tokens) -> dict:
    """``["alpha=0.333", "variant=cN"]`` (or one space-separated string) to a dict."""
    if tokens is None:
        return {}
    if isinstance(tokens, str):
        tokens = tokens.split()
    out = {}
    for tok in tokens:
        key, sep, val = tok.partition("=")
        if not sep or not key:
            raise UsageError(f"expected key=value, got {tok!r}")
        try:
            out[key] = number(val)
        except argparse.ArgumentTypeError:
            out[key] = val
    return out


def _int(x, what) -> int:
    if isinstance(x, float) and x.is_integer():
        return int(x)
    if isinstance(x, int):
        return x
    raise UsageError(f"{what} must be an integer, got {x!r}")


def besov_spec(kv: dict, default_seed: int) -> BesovFieldSpec:
    allowed = {"alpha", "p", "variant", "seed", "cN_power", "shells"}
    unknown = set(kv) - allowed
    if unknown:
        raise UsageError(f"unknown generator keys {sorted(unknown)}; allowed {sorted(allowed)}")
    if "alpha" not in kv:
        raise UsageError("generator spec needs alpha=<value in (0,1)>")
    shells = None
    if "shells" in kv:
        try:
            lo, hi = (int(s) for s in str(kv["shells"]).split(":"))
        except ValueError:
            raise UsageError("shells must look like lo:hi") from None
        shells = (lo, hi)
    try:
        return BesovFieldSpec(alpha=float(kv["alpha"]), p=float(kv.get("p", 3.0)),
                              variant=str(kv.get("variant", "inf")),
                              seed=_int(kv.get("seed", default_seed), "seed"),
                              shells=shells, cN_power=float(kv.get("cN_power", 1.0)))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def scale_grid(args, grid: Grid) -> np.ndarray:
    """Geometric eps grid from the flags, clipped at two grid spacings."""
    sc = geometric_scales(args.eps0, args.ratio, args.count)
    if sc[0] >= math.pi / 4:
        raise UsageError(f"--eps0 {args.eps0} must be below pi/4")
    sc = sc[sc >= 2 * grid.spacing * (1 - 1e-12)]
    if sc.size < 4:
        raise UsageError(f"fewer than 4 scales remain above 2h = {2 * grid.spacing:.4g}; "
                         "raise --eps0, lower --ratio or use a finer grid")
    return sc


def make_map(workers: int):
    """Order-preserving map; a thread pool when ``workers > 1``."""
    if workers <= 1:
        return map

    def pool_map(fn, items):
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, items))
    return pool_map


def load(path, kind=None):
    f = read_field(path)
    if kind == "scalar" and not isinstance(f, ScalarField):
        raise UsageError(f"{path}: expected a scalar field, found {len(f)} components")
    if kind == "vector" and not isinstance(f, VectorField):
        raise UsageError(f"{path}: expected a vector field, found a scalar")
    return f


def out_path(args, name: str) -> Path:
    return Path(args.out_dir) / name


def write_json(path: Path, obj: dict):
    schemas.validate(obj)
    atomic_write_json(path, obj)
    log.info("wrote %s", path)


def _json_num(x):
    x = float(x)
    return x if math.isfinite(x) else str(x)


# --- subcommands ----------------------------------------------------------------

def cmd_synth(args) -> int:
    grid = Grid(args.dim, args.n)
    seed = derive_seed(args.seed, "synth")
    kind = args.kind
    params = {}
    if kind in ("besov", "besov-vector"):
        spec = besov_spec(parse_kv(args.besov), seed)
        params = spec.to_dict()
        field = (random_besov_field(grid, spec) if kind == "besov"
                 else random_besov_vector_field(grid, spec))
    elif kind in ("lacunary", "lacunary-vector"):
        params = {"alpha": args.alpha, "seed": seed}
        field = (lacunary_field(grid, args.alpha, seed) if kind == "lacunary"
                 else lacunary_vector_field(grid, args.alpha, seed))
    elif kind == "abc":
        A, B, C = args.abc
        params = {"A": A, "B": B, "C": C}
        field = abc_flow(grid, A, B, C)
    elif kind == "taylor-green":
        field = taylor_green(grid)
    elif kind == "band-limited":
        params = {"kmax": args.kmax, "seed": seed}
        field = random_band_limited(grid, args.kmax, seed)
    elif kind == "compressible":
        params = {"amplitude": args.amplitude, "kmax": args.kmax, "seed": seed,
                  "velocity": args.velocity}
        state = manufactured_compressible(grid, args.amplitude, seed=seed, kmax=args.kmax,
                                          velocity=args.velocity)
        params["bounds"] = list(state.bounds)
        for part, f in (("rho", state.rho), ("v", state.v)):
            path = out_path(args, f"{args.name}_{part}.fld")
            write_field(path, f)
            write_json(path.with_suffix(".json"), _meta(f"compressible-{part}", grid, params, path, f))
            print(path)
        return EXIT_OK
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown kind {kind}")
    path = Path(args.output) if args.output else out_path(args, f"{args.name}.fld")
    write_field(path, field)
    write_json(path.with_suffix(".json"), _meta(kind, grid, params, path, field))
    print(path)
    return EXIT_OK


def _meta(kind, grid, params, path, field) -> dict:
    return {"schema": "field-meta/1", "kind": kind, "grid": {"dim": grid.dim, "n": grid.n},
            "params": params, "file": path.name,
            "components": 1 if isinstance(field, ScalarField) else len(field)}


DERIVED = {
    "none": lambda f: f,
    "curl": lambda f: curl(f),
    "curl2": lambda f: curl(curl(f)),
    "div": lambda f: divergence(f),
    "grad": lambda f: gradient(f),
}


def cmd_analyze_besov(args) -> int:
    f = load(args.field)
    try:
        f = DERIVED[args.derive](f)
    except (TypeError, AttributeError, ValueError) as exc:
        raise UsageError(f"cannot apply --derive {args.derive} to {args.field}: {exc}") from None
    comps = [(None, f)] if isinstance(f, ScalarField) else list(enumerate(f))
    grid = f.grid
    scales = default_difference_scales(grid, args.count)
    seed = derive_seed(args.seed, "analyze-besov")
    out = []
    for idx, c in comps:
        prof = cN_profile(c, args.alpha, args.p, oversample=args.oversample)
        diff = finite_difference_modulus(c, args.alpha, args.p, scales, seed=seed)
        out.append({"component": idx, "profile": prof.to_dict(), "difference": diff.to_dict()})
        print(f"component {idx if idx is not None else '-'}: profile verdict {prof.verdict}"
              f" (slope {prof.slope:.3g}), difference trend {diff.trend()[0]}")
        if args.format == "csv":
            tag = "" if idx is None else f"_{idx}"
            atomic_write_text(out_path(args, f"{args.name}{tag}.profile.csv"), prof.to_csv())
            atomic_write_text(out_path(args, f"{args.name}{tag}.difference.csv"),
                              diff.to_csv(column="scale"))
    quantity = args.quantity or Path(args.field).stem
    report = {"schema": "besov-analysis/1", "field": str(args.field), "quantity": quantity,
              "dim": grid.dim, "alpha": args.alpha, "p": _json_num(args.p),
              "time": _json_num(args.time), "derive": args.derive, "components": out}
    write_json(out_path(args, f"{args.name}.besov.json"), report)
    return EXIT_OK


def cmd_commutator_scan(args) -> int:
    if args.pair:
        kv = parse_kv(args.pair)
        beta = kv.pop("beta", None)
        dim = _int(kv.pop("dim", 2), "dim")
        n = _int(kv.pop("n", 256), "n")
        if beta is None:
            raise UsageError("--pair needs beta=<value>")
        base = derive_seed(args.seed, "commutator-scan")
        spec_f = besov_spec(kv, base)
        spec_g = besov_spec({**kv, "alpha": beta, "seed": spec_f.seed + 1}, base)
        grid = Grid(dim, n)
        f, g = random_besov_field(grid, spec_f), random_besov_field(grid, spec_g)
        exponent = args.exponent if args.exponent is not None else spec_f.alpha + spec_g.alpha
        source = {"pair": {"f": spec_f.to_dict(), "g": spec_g.to_dict(), "dim": dim, "n": n}}
    elif args.f and args.g:
        f, g = load(args.f), load(args.g)
        if type(f) is not type(g) or f.grid != g.grid:
            raise UsageError("--f and --g must be the same kind of field on the same grid")
        exponent = args.exponent if args.exponent is not None else 0.0
        source = {"f": str(args.f), "g": str(args.g)}
    else:
        raise UsageError("give --f and --g, or --pair alpha=.. beta=..")
    scales = scale_grid(args, f.grid)
    scan = commutator_scaling_scan(f, g, scales, q=args.q, exponent=exponent,
                                   map_fn=make_map(args.workers))
    fit = scan.fit
    verdict, tslope = scan.trend()
    print(f"slope {fit.slope:.4g} (r2 {fit.r_squared:.4g}), compensated trend {verdict}"
          f" ({tslope:.3g})")
    write_json(out_path(args, f"{args.name}.scan.json"),
               {"schema": "scale-scan/1", "source": source, "scan": scan.to_dict()})
    if args.format == "csv":
        atomic_write_text(out_path(args, f"{args.name}.scan.csv"), scan.to_csv())
    return EXIT_OK


def cmd_defect_scan(args) -> int:
    args.name = args.name or args.system
    mapper = make_map(args.workers)
    extra = {}
    if args.system == "euler":
        if not args.field:
            raise UsageError("--system euler needs --field <velocity.fld>")
        v = load(args.field, "vector")
        if v.grid.dim != 3:
            raise UsageError("--system euler needs a 3D velocity")
        scales = scale_grid(args, v.grid)
        reports = [helicity_flux_scan(v, scales, map_fn=mapper)]
        if not args.skip_transport:
            reports.append(vorticity_transport_scan(v, scales, map_fn=mapper))
        inputs = {"field": str(args.field)}
    elif args.system == "ceuler":
        if not (args.rho and args.field):
            raise UsageError("--system ceuler needs --rho and --field")
        rho, v = load(args.rho, "scalar"), load(args.field, "vector")
        if rho.grid != v.grid:
            raise UsageError("--rho and --field live on different grids")
        law = (PressureLaw(args.kappa, args.gamma) if args.kappa is not None
               else PressureLaw.isentropic(args.gamma))
        bounds = tuple(args.bounds) if args.bounds else None
        scales = scale_grid(args, v.grid)
        try:
            terms = compressible_defect_scan(rho, v, law, scales, bounds=bounds, map_fn=mapper)
            pc = pressure_commutator_scan(rho, law, scales, bounds=bounds, map_fn=mapper)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        reports = list(terms.values()) + [pc]
        extra["pressure_rhs"] = [float(x) for x in pc.scan.meta["rhs"]]
        extra["pressure_bound_holds"] = bool(np.all(pc.scan.values <= np.array(
            pc.scan.meta["rhs"]) * (1 + 1e-6)))
        inputs = {"rho": str(args.rho), "field": str(args.field),
                  "law": {"kappa": law.kappa, "gamma": law.gamma},
                  "bounds": list(bounds) if bounds else None}
    else:
        if not args.field:
            raise UsageError("--system sqg needs --field <theta.fld>")
        theta = load(args.field, "scalar")
        if theta.grid.dim != 2:
            raise UsageError("--system sqg needs a 2D scalar field")
        scales = scale_grid(args, theta.grid)
        reports = list(sqg_defect_scan(theta, scales, args.axis, map_fn=mapper).values())
        extra["sqg_helicity"] = [sqg_helicity(theta, i) for i in range(2)]
        extra["axis"] = args.axis
        inputs = {"field": str(args.field)}
    for r in reports:
        fit = r.scan.fit
        print(f"{r.term_id:<20} slope {fit.slope:>8.4g}  status {fit.status:<9} verdict {r.verdict}")
        if args.format == "csv":
            atomic_write_text(out_path(args, f"{args.name}.{r.term_id}.csv"), r.to_csv())
    write_json(out_path(args, f"{args.name}.defects.json"),
               {"schema": "defect-scan/1", "system": args.system, "inputs": inputs,
                "reports": [r.to_dict() for r in reports], "extra": extra})
    return EXIT_OK


def cmd_helicity(args) -> int:
    f = load(args.field)
    rep = {"schema": "helicity/1", "field": str(args.field), "dim": f.grid.dim}
    if isinstance(f, VectorField):
        if f.grid.dim != 3:
            raise UsageError("helicity needs a 3D velocity; use a 2D scalar for the SQG quantity")
        rep["helicity"] = helicity(f)
        rep["energy"] = energy(f)
        print(f"helicity {rep['helicity']:.16g}\nenergy   {rep['energy']:.16g}")
    else:
        if f.grid.dim != 2:
            raise UsageError("a scalar field must be 2D (SQG theta)")
        rep["sqg_helicity"] = [sqg_helicity(f, i) for i in range(2)]
        print("int theta d_i theta: " + ", ".join(f"{x:.3e}" for x in rep["sqg_helicity"]))
    write_json(out_path(args, f"{args.name}.helicity.json"), rep)
    return EXIT_OK


def cmd_run_solver(args) -> int:
    dim = 3 if args.system == "euler3d" else 2
    if args.field:
        f0 = load(args.field, "vector" if dim == 3 else "scalar")
        grid = f0.grid
        if grid.dim != dim:
            raise UsageError(f"{args.system} needs a {dim}D initial field")
    else:
        grid = Grid(dim, args.n)
        init = args.init or ("taylor-green" if dim == 3 else "band-limited")
        seed = derive_seed(args.seed, "run-solver")
        builders = {3: {"taylor-green": taylor_green, "abc": abc_flow},
                    2: {"cos": lambda g: ScalarField.from_function(g, lambda x, y: np.cos(x)),
                        "band-limited": lambda g: random_band_limited(g, args.kmax, seed)}}
        if init not in builders[dim]:
            raise UsageError(f"--init {init} is not available for {args.system}; "
                             f"choose from {sorted(builders[dim])}")
        f0 = builders[dim][init](grid)
    try:
        cfg = SolverConfig(grid, args.dt, args.t_end, args.record_every, args.system)
        cfg.steps  # validates t_end / dt
        traj = integrate(f0, cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    path = export_trajectory(traj, out_path(args, args.name))
    schemas.validate(json.loads(path.read_text()))
    last = traj.log[-1]
    print(f"{len(traj.log)} records to {path}; final " +
          ", ".join(f"{k}={v:.6g}" for k, v in last.items() if k not in ("step",)))
    for note in traj.notes:
        print(f"note: {note}")
    return EXIT_OK


# --- report ---------------------------------------------------------------------

def _merge_quantity(summary, name, besov=None, lebesgue=None):
    q = summary.setdefault(name, {})
    if besov is not None:
        cur = q.get("besov", [])
        cur = cur if isinstance(cur, list) else [cur]
        q["besov"] = cur + (besov if isinstance(besov, list) else [besov])
    if lebesgue:
        q["lebesgue"] = q.get("lebesgue", []) + list(lebesgue)


def _profile_class(components) -> str | None:
    verdicts = [c["profile"]["verdict"] for c in components]
    if any(v not in ("flat", "decaying") for v in verdicts):
        return None
    return "cN" if all(v == "decaying" for v in verdicts) else "inf"


def build_summary(docs) -> tuple[dict, list, list]:
    """Regularity summary plus defect rows from validated report documents."""
    summary, defects, notes = {}, [], []
    for name, doc in docs:
        kind = schemas.schema_name(doc)
        if kind == "regularity-summary":
            for key in ("dim", "density_bounds"):
                if key in doc:
                    summary[key] = doc[key]
            for q in QUANTITIES:
                if q in doc:
                    _merge_quantity(summary, q, doc[q].get("besov"), doc[q].get("lebesgue"))
        elif kind == "besov-analysis":
            summary.setdefault("dim", doc["dim"]) if "dim" in doc else None
            if doc["quantity"] not in QUANTITIES:
                notes.append(f"{name}: quantity {doc['quantity']!r} is not one of {QUANTITIES}")
                continue
            cls = _profile_class(doc["components"])
            if cls is None:
                notes.append(f"{name}: profile verdicts do not support a Besov class")
                continue
            _merge_quantity(summary, doc["quantity"], {"s": doc["alpha"], "p": doc["p"],
                                                       "time": doc.get("time", "inf"),
                                                       "class": cls})
        elif kind == "defect-scan":
            for r in doc["reports"]:
                defects.append({"file": name, "system": doc["system"], "term_id": r["term_id"],
                                "slope": r["fit"]["slope"], "status": r["fit"].get("status"),
                                "verdict": r["verdict"]})
    return summary, defects, notes


def cmd_report(args) -> int:
    indir = Path(args.input or args.out_dir)
    if not indir.is_dir():
        raise UsageError(f"input directory {indir} does not exist")
    docs, skipped = [], []
    for path in sorted(indir.glob("*.json")):
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            skipped.append(f"{path.name}: unreadable ({exc})")
            continue
        kind = schemas.schema_name(doc)
        if kind == "report":
            continue
        if kind not in ("regularity-summary", "besov-analysis", "defect-scan"):
            if kind is None:
                skipped.append(f"{path.name}: no recognised schema tag")
            continue
        try:
            schemas.validate(doc)
        except jsonschema.ValidationError as exc:
            skipped.append(f"{path.name}: fails {kind} schema ({exc.message})")
            continue
        docs.append((path.name, doc))
    summary, defects, notes = build_summary(docs)
    verdicts = criteria_evaluator(summary)
    text = render_table(verdicts)
    if defects:
        text += "\ndefect scans\n" + "".join(
            f"  {d['file']}: {d['term_id']:<20} slope {d['slope']}  verdict {d['verdict']}\n"
            for d in defects)
    for line in notes + skipped:
        text += f"note: {line}\n"
    out_dir = Path(args.output_dir) if args.output_dir else indir
    write_json(out_dir / "report.json",
               {"schema": "report/1", "inputs": [n for n, _ in docs], "summary": summary,
                "clauses": [v.to_dict() for v in verdicts], "defects": defects,
                "skipped": notes + skipped})
    atomic_write_text(out_dir / "report.txt", text)
    sys.stdout.write(text)
    return EXIT_OK


# --- parser ---------------------------------------------------------------------

def _env_int(name, default):
    val = os.environ.get(name)
    if val is None:
        return default
    try:
        return max(1, int(val))
    except ValueError:
        raise UsageError(f"{name}={val!r} is not an integer") from None


def _bounds(text):
    parts = [number(x) for x in str(text).split(",")]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("bounds must be c1,c2")
    return parts


def _triple(text):
    parts = [number(x) for x in str(text).split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected A,B,C")
    return parts


def _add_common(sp):
    g = sp.add_argument_group("global options")
    g.add_argument("--config", help="INI file; [global] and [<subcommand>] sections")
    g.add_argument("--seed", type=int, default=0, help="global seed (default 0)")
    g.add_argument("--format", choices=("json", "csv"), default="json",
                   help="csv also writes plottable CSV next to the JSON reports")
    g.add_argument("--out-dir", default=os.environ.get(ENV_OUTDIR, "."),
                   help=f"output directory (env {ENV_OUTDIR}, default .)")
    g.add_argument("--workers", type=int, default=None,
                   help=f"worker threads for scan points (env {ENV_WORKERS}, default 1)")
    g.add_argument("--name", help="stem for output files")
    g.add_argument("-v", "--verbose", action="count", default=0)


def _add_scales(sp):
    s = sp.add_argument_group("scale grid")
    s.add_argument("--eps0", type=number, default=0.75, help="largest eps (< pi/4)")
    s.add_argument("--ratio", type=number, default=10 ** 0.125, help="ratio between scales")
    s.add_argument("--count", type=int, default=13, help="number of scales before clipping at 2h")


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    # Options are added per subparser (not through argparse parents) so that
    # defaults from a config section stay local to their subcommand.
    p = argparse.ArgumentParser(prog="helidiag", description=__doc__.split("\n")[0],
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True, metavar="subcommand")
    parsers = {}

    def add(name, helptext, scales=False, name_default=None):
        sp = sub.add_parser(name, help=helptext, description=helptext)
        _add_common(sp)
        if scales:
            _add_scales(sp)
        sp.set_defaults(name=name.replace("-", "_") if name_default is None else name_default)
        parsers[name] = sp
        return sp

    sp = add("synth", "generate a field and save it as FLD1", name_default="field")
    sp.add_argument("--kind", default="besov",
                    choices=("besov", "besov-vector", "lacunary", "lacunary-vector", "abc",
                             "taylor-green", "band-limited", "compressible"))
    sp.add_argument("--besov", nargs="+", metavar="KEY=VALUE",
                    help="alpha=, p=, variant=inf|cN, seed=, cN_power=, shells=lo:hi")
    sp.add_argument("--dim", type=int, default=2, choices=(2, 3))
    sp.add_argument("--n", type=int, default=256)
    sp.add_argument("--alpha", type=number, default=2 / 3, help="lacunary fields")
    sp.add_argument("--kmax", type=number, default=2.0, help="band-limited and compressible")
    sp.add_argument("--amplitude", type=number, default=0.3, help="compressible density")
    sp.add_argument("--velocity", default="abc", choices=("abc", "random", "zero"))
    sp.add_argument("--abc", type=_triple, default=[1.0, 1.0, 1.0], metavar="A,B,C")
    sp.add_argument("--output", help="output path (default <out-dir>/<name>.fld)")
    sp.set_defaults(func=cmd_synth)

    sp = add("analyze-besov", "dyadic profile and finite-difference modulus of a field",
             name_default="field")
    sp.add_argument("--field", required=True)
    sp.add_argument("--alpha", type=number, required=True)
    sp.add_argument("--p", type=number, default=3.0)
    sp.add_argument("--time", type=number, default=math.inf,
                    help="time integrability recorded for the report (snapshot: inf)")
    sp.add_argument("--quantity", help=f"summary slot, one of {QUANTITIES} (default: file stem)")
    sp.add_argument("--derive", choices=sorted(DERIVED), default="none",
                    help="analyze curl, curl of curl, div or grad of the field")
    sp.add_argument("--oversample", type=int, default=1)
    sp.add_argument("--count", type=int, default=12, help="difference scales")
    sp.set_defaults(func=cmd_analyze_besov)

    sp = add("commutator-scan", "eps-scan of (fg)^eps - f^eps g^eps", scales=True)
    sp.add_argument("--f")
    sp.add_argument("--g")
    sp.add_argument("--pair", nargs="+", metavar="KEY=VALUE",
                    help="synthetic pair: alpha=, beta=, variant=, p=, seed=, dim=, n=")
    sp.add_argument("--q", type=number, default=1.5, help="L^q norm of the commutator")
    sp.add_argument("--exponent", type=number, help="reference exponent (default alpha+beta)")
    sp.set_defaults(func=cmd_commutator_scan)

    sp = add("defect-scan", "defect-term scans for euler, ceuler or sqg",
             scales=True, name_default="")
    sp.add_argument("--system", required=True, choices=("euler", "ceuler", "sqg"))
    sp.add_argument("--field", help="velocity (euler, ceuler) or theta (sqg)")
    sp.add_argument("--rho", help="density (ceuler)")
    sp.add_argument("--gamma", type=number, default=5 / 3)
    sp.add_argument("--kappa", type=number, help="default (gamma-1)^2/(4 gamma)")
    sp.add_argument("--bounds", type=_bounds, metavar="C1,C2", help="declared density bounds")
    sp.add_argument("--axis", type=int, choices=(0, 1), default=0, help="SQG derivative index")
    sp.add_argument("--skip-transport", action="store_true",
                    help="euler: skip the vorticity transport residual")
    sp.set_defaults(func=cmd_defect_scan)

    sp = add("helicity", "helicity and energy of a velocity, or the SQG quantity of theta",
             name_default="field")
    sp.add_argument("--field", required=True)
    sp.set_defaults(func=cmd_helicity)

    sp = add("run-solver", "integrate euler3d or sqg2d and export the trajectory",
             name_default="trajectory")
    sp.add_argument("--system", required=True, choices=("euler3d", "sqg2d"))
    sp.add_argument("--field", help="initial field (FLD1); otherwise --init")
    sp.add_argument("--init", help="euler3d: taylor-green|abc; sqg2d: cos|band-limited")
    sp.add_argument("--n", type=int, default=32)
    sp.add_argument("--kmax", type=number, default=4.0)
    sp.add_argument("--dt", type=number, default=1e-3)
    sp.add_argument("--t-end", type=number, default=0.5)
    sp.add_argument("--record-every", type=int, default=50)
    sp.set_defaults(func=cmd_run_solver)

    sp = add("report", "evaluate theorem clauses from the reports in a directory")
    sp.add_argument("--input", help="directory of JSON reports (default: --out-dir)")
    sp.add_argument("--output-dir", help="where report.json/.txt go (default: input dir)")
    sp.set_defaults(func=cmd_report)
    return p, parsers


def apply_config(parsers: dict, path: str):
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    except configparser.Error as exc:
        raise UsageError(f"malformed config {path}: {exc}") from None
    for section in cp.sections():
        targets = parsers.values() if section == "global" else [parsers.get(section)]
        if None in targets:
            raise UsageError(f"config section [{section}] is not a subcommand")
        for sp in targets:
            dests = {a.dest: a for a in sp._actions}
            values = {}
            for key, val in cp.items(section):
                dest = key.replace("-", "_")
                if dest not in dests or dest in ("config", "help", "func"):
                    if section == "global":
                        continue  # global keys need not exist on every subcommand
                    raise UsageError(f"config key {key!r} is not an option of {section}")
                act = dests[dest]
                if act.nargs in ("+", "*"):
                    values[dest] = val.split()
                elif isinstance(act, argparse._StoreTrueAction):
                    values[dest] = cp.getboolean(section, key)
                elif isinstance(act, argparse._CountAction):
                    values[dest] = int(val)
                else:
                    values[dest] = act.type(val) if act.type else val
            sp.set_defaults(**values)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, parsers = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    try:
        if known.config:
            apply_config(parsers, known.config)
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                            format="%(levelname)s %(name)s: %(message)s")
        if args.workers is None:
            args.workers = _env_int(ENV_WORKERS, 1)
        Path(args.out_dir).mkdir(parents=True, exist_ok=True)
        return args.func(args)
    except (UsageError, FieldFileError, argparse.ArgumentTypeError) as exc:
        print(f"helidiag: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalAbort as exc:
        print(f"helidiag: numerical abort: {exc}", file=sys.stderr)
        return EXIT_ABORT
    except OSError as exc:
        where = f" {exc.filename}" if exc.filename else ""
        print(f"helidiag: error: cannot write{where}: {exc.strerror}; check the path and "
              "permissions or set --out-dir", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, IndexError) as exc:
        print(f"helidiag: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Command-line front end.

Every subcommand reads a Hamiltonian (``--spec`` JSON or the ``--n/--m/--t1/--t2``
shorthand), runs one computation and writes JSON or CSV to ``--out`` (standard
output by default).  Energies are reported in units of the uniform bond ``t`` or
of ``t2`` for alternating chains unless ``--raw-units`` is given.

Exit status: 0 on success, 2 for invalid input, 3 for a numerical failure or a
failed verification check.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import SpecError
from .lattice import (HamiltonianSpec, build_dense, check_pt_symmetry, load_spec,
                      spec_from_dict, spec_to_dict)

__all__ = ["RunConfig", "Sweep", "parse_sweep", "energy_unit", "run", "main"]

COMMANDS = ("spectrum", "metric", "verify", "ep-contour", "ep-surface", "closed-form",
            "phase-diagram")

CSV_HEADERS = {
    "spectrum": ("re", "im", "algebraic_multiplicity", "geometric_multiplicity"),
    "closed-form": ("re", "im"),
    "ep-contour": ("theta", "delta", "gamma", "indicator", "order", "kind"),
    "ep-surface": ("t1_over_t2", "delta", "gamma", "order"),
    "phase-diagram": ("delta", "gamma", "phase", "real_count"),
    "metric": ("quantity", "value"),
    "verify": ("check", "passed", "value", "threshold"),
}


class InputError(ValueError):
    """Bad command-line input; maps to exit status 2."""


@dataclass(frozen=True)
class Sweep:
    """Inclusive grid ``a, ..., b`` with ``steps`` points."""

    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if self.steps < 1:
            raise InputError("sweep step count must be positive")
        if self.steps == 1 and self.start != self.stop:
            raise InputError("a one-point sweep needs start == stop")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


def parse_sweep(text: str) -> Sweep:
    """Parse ``a:b:steps``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise InputError(f"range {text!r} must look like a:b:steps")
    try:
        a, b = float(parts[0]), float(parts[1])
        steps = int(parts[2])
    except ValueError as exc:
        raise InputError(f"range {text!r}: {exc}") from exc
    return Sweep(a, b, steps)


@dataclass(frozen=True)
class RunConfig:
    """One fully parsed invocation."""

    command: str
    spec: HamiltonianSpec | None = None
    output: str | None = None
    format: str = "json"
    tol_real: float = 1e-8
    tol_root: float = 1e-14
    jobs: int = 1
    raw_units: bool = False
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.format not in ("json", "csv"):
            raise InputError("format must be json or csv")
        if self.jobs < 1:
            raise InputError("--jobs must be at least 1")


# -- formatting ---------------------------------------------------------------

def _g(x) -> str:
    """Locale-free 17-significant-digit text."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _g(v)
    return "" if v is None else str(v)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [_jsonable(obj.real), _jsonable(obj.imag)]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else _g(x)
    return obj


def _json_text(payload) -> str:
    return json.dumps(_jsonable(payload), indent=2, sort_keys=False) + "\n"


# -- units --------------------------------------------------------------------

def energy_unit(spec: HamiltonianSpec) -> tuple[float, str]:
    """``(scale, name)``: ``t`` for uniform chains, ``t2`` for alternating ones.

    Anything else falls back to raw units.
    """
    t = spec.t
    if not all(isinstance(v, float) for v in t) or any(v == 0 for v in t):
        return 1.0, "raw"
    if all(v == t[0] for v in t):
        return abs(t[0]), "t"
    if len(t) >= 2 and all(v == t[i % 2] for i, v in enumerate(t)):
        return abs(t[1]), "t2"
    return 1.0, "raw"


def _unit(cfg: RunConfig, spec: HamiltonianSpec):
    return (1.0, "raw") if cfg.raw_units else energy_unit(spec)


# -- spec assembly ------------------------------------------------------------

def _shorthand(opts) -> HamiltonianSpec | None:
    n = opts.get("n")
    if n is None:
        return None
    data = {"n": n, "t1": opts.get("t1", 1.0)}
    if opts.get("t2") is not None:
        data["t2"] = opts["t2"]
    if opts.get("m") is not None:
        data["defect"] = {"m": opts["m"], "delta": opts.get("delta", 0.0),
                          "gamma": opts.get("gamma", 0.0)}
    return spec_from_dict(data)


def _require_spec(cfg: RunConfig) -> HamiltonianSpec:
    if cfg.spec is not None:
        return cfg.spec
    spec = _shorthand(cfg.options)
    if spec is None:
        raise InputError(f"{cfg.command} needs --spec or --n")
    return spec


# -- commands -----------------------------------------------------------------

def _cmd_spectrum(cfg):
    from .spectra import spectrum

    spec = _require_spec(cfg)
    rep = spectrum(spec, tol_real=cfg.tol_real, tol_root=cfg.tol_root)
    s, name = _unit(cfg, spec)
    clusters = [(c.value / s, c.algebraic_multiplicity, c.geometric_multiplicity)
                for c in rep.clusters]
    rows = [(v.real, v.imag, a, g) for v, a, g in clusters]
    payload = {
        "unit": name,
        "unit_scale": s,
        "phase": rep.phase.value,
        "real_count": rep.real_count,
        "gcd_degree": rep.gcd_degree,
        "eigenvalues": [v / s for v in rep.eigenvalues],
        "clusters": [{"value": v, "algebraic_multiplicity": a, "geometric_multiplicity": g}
                     for v, a, g in clusters],
    }
    return payload, rows


def _cmd_closed_form(cfg):
    from .spectra import closed_form_spectrum

    o = cfg.options
    case = o.get("case")
    if case is None:
        raise InputError("closed-form needs --case (1..5 or ssh-exact)")
    if case == "ssh-exact":
        if o.get("n") is None:
            raise InputError("ssh-exact needs --n")
        t1 = o.get("t1", 1.0)
        t2 = o.get("t2", t1)
        z1 = complex(o.get("delta", 0.0), o.get("gamma", 0.0))
        # |z1| = t2 puts the chain on the solvable surface
        vals = closed_form_spectrum("ssh-exact", n=o["n"], t1=t1, t2=t2, z1=z1,
                                    zn=z1.conjugate())
        s, name = (1.0, "raw") if cfg.raw_units else (abs(t2), "t2")
    else:
        try:
            row = int(case)
        except ValueError as exc:
            raise InputError(f"unknown case {case!r}") from exc
        t = o.get("t1", 1.0)
        vals = closed_form_spectrum(row, m=o.get("m"), t=t)
        s, name = (1.0, "raw") if cfg.raw_units else (abs(t), "t")
    vals = [complex(v) / s for v in vals]
    return {"case": str(case), "unit": name, "eigenvalues": vals}, [(v.real, v.imag) for v in vals]


def _cmd_metric(cfg):
    from .metric import (c_operator, equivalent_hermitian, intertwiner_nn, omega_sqrt)
    from .spectra import multiset_distance

    spec = _require_spec(cfg)
    fam = intertwiner_nn(spec, cfg.options.get("re_z", 0.0))
    H = build_dense(spec)
    out = {"Z": fam.Z, "t_m": fam.t_m, "ratio": fam.ratio,
           "positive_definite": fam.positive_definite, "min_eigenvalue": fam.min_eigenvalue,
           "intertwining_residual": fam.residual}
    if fam.positive_definite:
        Om = omega_sqrt(fam)
        out["omega_residual"] = float(np.linalg.norm(Om @ Om - fam.matrix, 2))
        eq = equivalent_hermitian(spec, fam)
        out["similarity_residual"] = eq.similarity_residual
        out["spectrum_distance"] = multiset_distance(np.linalg.eigvalsh(eq.matrix),
                                                     np.linalg.eigvals(H))
        out["hermitian_bonds"] = eq.bonds
        out["hermitian_onsite"] = eq.onsite
        C = c_operator(spec)
        out["M"] = fam.matrix
        out["omega"] = Om
        out["h"] = eq.matrix
        out["C"] = C
        out["c_involution_error"] = float(np.linalg.norm(C @ C - np.eye(spec.n), 2))
        out["c_commutator"] = float(np.linalg.norm(C @ H - H @ C, 2))
    rows = [(k, v) for k, v in out.items() if isinstance(v, (float, bool, int, np.floating))]
    if not fam.positive_definite:
        out["M"] = fam.matrix
    return out, rows


def _check(name, passed, value, threshold):
    return {"check": name, "passed": bool(passed), "value": value, "threshold": threshold}


def _verify_ssh(spec, ev, tol_real, checks):
    from .inclusion import (bracket_real_eigenvalues, broken_phase_certificate,
                            cassini_union)

    try:
        certs = bracket_real_eigenvalues(spec, tol_real=tol_real)
    except SpecError:
        certs = None
    scale = max(1.0, float(np.max(np.abs(ev))))
    real = ev[np.abs(ev.imag) <= tol_real * scale].real
    out = []
    if certs is not None:
        for c in certs:
            inside = int(np.sum((real > c.lo) & (real < c.hi)))
            checks.append(_check(f"interval {','.join(c.labels)} ({c.lo:.6g}, {c.hi:.6g})",
                                 inside == c.count and inside % 2 == 1, inside, c.count))
            out.append({"lo": c.lo, "hi": c.hi, "count": c.count, "oracle_count": inside,
                        "labels": list(c.labels), "witness": list(c.witness),
                        "inequality": {k: list(v) for k, v in c.inequality.items()}})
    union = cassini_union(spec)
    outside = int(sum(1 for v in ev if not union.contains(v)))
    checks.append(_check("cassini_contains_spectrum", outside == 0, outside, 0))
    broken = broken_phase_certificate(spec)
    nonreal = int(len(ev) - len(real))
    checks.append(_check("broken_phase_certificate", (not broken) or nonreal >= 2,
                         nonreal, 2 if broken else 0))
    return out


def _verify_metric(spec, checks):
    from .metric import c_operator, equivalent_hermitian, intertwiner_nn, omega_sqrt

    try:
        fam = intertwiner_nn(spec)
    except SpecError:
        return
    checks.append(_check("intertwining_residual", fam.residual < 1e-12, fam.residual, 1e-12))
    if not fam.positive_definite:
        return
    H = build_dense(spec)
    Om = omega_sqrt(fam)
    err = float(np.linalg.norm(Om @ Om - fam.matrix, 2))
    checks.append(_check("omega_squared", err < 1e-12, err, 1e-12))
    eq = equivalent_hermitian(spec, fam)
    checks.append(_check("similarity_residual", eq.similarity_residual < 1e-10,
                         eq.similarity_residual, 1e-10))
    C = c_operator(spec)
    inv = float(np.linalg.norm(C @ C - np.eye(spec.n), 2))
    com = float(np.linalg.norm(C @ H - H @ C, 2))
    checks.append(_check("c_involution", inv < 1e-10, inv, 1e-10))
    checks.append(_check("c_commutes", com < 1e-10, com, 1e-10))


def _cmd_verify(cfg):
    from .inclusion import ssh_parameters
    from .spectra import multiset_distance, spectrum

    spec = _require_spec(cfg)
    rep = spectrum(spec, tol_real=cfg.tol_real, tol_root=cfg.tol_root)
    ev = np.asarray(rep.eigenvalues, dtype=complex)
    H = build_dense(spec)
    scale = max(float(np.linalg.norm(H, 2)), 1e-300)
    checks = []
    # defective clusters split like eps^(1/k) in the dense oracle
    k = max(c.algebraic_multiplicity for c in rep.clusters)
    thr = 10 * np.finfo(float).eps ** (1.0 / k) * scale if k > 1 else 1e-9 * scale
    d = multiset_distance(ev, np.linalg.eigvals(H))
    checks.append(_check("spectrum_vs_dense", d <= thr, d, thr))
    pt = check_pt_symmetry(spec)
    if pt:
        dc = multiset_distance(ev, ev.conj())
        checks.append(_check("conjugate_pairs", dc <= thr, dc, thr))
        checks.append(_check("real_count_parity", (spec.n - rep.real_count) % 2 == 0,
                             spec.n - rep.real_count, 0))
    certs = []
    try:
        ssh_parameters(spec)
        is_ssh = spec.n % 2 == 0 and spec.n >= 4
    except SpecError:
        is_ssh = False
    if is_ssh:
        certs = _verify_ssh(spec, ev, cfg.tol_real, checks)
    _verify_metric(spec, checks)
    payload = {"pt_symmetric": pt, "phase": rep.phase.value, "real_count": rep.real_count,
               "passed": all(c["passed"] for c in checks), "checks": checks,
               "certificates": certs}
    rows = [(c["check"], c["passed"], c["value"], c["threshold"]) for c in checks]
    return payload, rows


def _cmd_ep_contour(cfg):
    from .ep import ep_contour

    o = cfg.options
    n = o.get("n") or (cfg.spec.n if cfg.spec is not None else None)
    if n is None:
        raise InputError("ep-contour needs --n")
    if n < 3:
        raise InputError("ep-contour needs --n >= 3")
    steps = o.get("theta_steps") or 181
    if steps < 1:
        raise InputError("--theta-steps must be positive")
    grid = np.linspace(0.0, math.pi, steps + 2)[1:-1]
    con = ep_contour(n, grid, cusps=not o.get("no_cusps"), orders=not o.get("no_orders"))
    s = o.get("t1", 1.0) if cfg.raw_units else 1.0
    pts = sorted(list(con.points) + list(con.cusps), key=lambda p: (p.theta, p.kind != "cusp"))
    rows = [(p.theta, p.delta * s, p.gamma * s,
             p.indicator if p.indicator is not None else float("nan"), p.order, p.kind)
            for p in pts]
    payload = {"n": n, "unit": "raw" if cfg.raw_units else "t",
               "points": [dict(zip(CSV_HEADERS["ep-contour"], r)) for r in rows],
               "cusp_count": len(con.cusps), "diagnostics": list(con.diagnostics)}
    return payload, rows


def _cmd_ep_surface(cfg):
    from .ep import ep_surface_ssh

    o = cfg.options
    n = o.get("n")
    if n is None:
        raise InputError("ep-surface needs --n")
    if n < 4 or n % 2:
        raise InputError("ep-surface needs an even --n >= 4")
    ratios = o.get("ratio_range") or Sweep(0.5, 1.5, 11)
    deltas = o.get("delta_range") or Sweep(0.0, 1.0, 11)
    gmax = o.get("gamma_max", 10.0)
    res = ep_surface_ssh(n, ratios.values(), deltas.values(), gamma_max=gmax, jobs=cfg.jobs,
                         ridges=not o.get("no_orders"), ep4=not o.get("no_orders"))
    t2 = o.get("t2", 1.0) if cfg.raw_units else 1.0
    rows = [(r, d * t2, g * t2, k) for r, d, g, k in res.rows()]

    def _pt(p):
        return {"t1_over_t2": p.t1_over_t2, "delta": p.delta * t2, "gamma": p.gamma * t2,
                "eigenvalue": p.eigenvalue * t2, "order": p.order}

    payload = {"n": n, "unit": "raw" if cfg.raw_units else "t2",
               "nodes": [dict(zip(CSV_HEADERS["ep-surface"], r)) for r in rows],
               "ridges": [_pt(p) for p in res.ridges], "ep4": [_pt(p) for p in res.ep4]}
    return payload, rows


def _phase_node(args):
    from .spectra import spectrum

    spec, m, delta, gamma, tol_real, tol_root = args
    z = list(spec.z)
    z[m - 1] = complex(delta, gamma)
    z[spec.n - m] = complex(delta, -gamma)
    rep = spectrum(spec.replace(z=tuple(z)), tol_real=tol_real, tol_root=tol_root)
    return rep.phase.value, rep.real_count


def _cmd_phase_diagram(cfg):
    o = cfg.options
    spec = cfg.spec if cfg.spec is not None else _shorthand({**o, "m": None})
    if spec is None:
        raise InputError("phase-diagram needs --spec or --n")
    m = o.get("m") or 1
    if not 1 <= m <= spec.n // 2:
        raise InputError(f"--m must lie in 1..{spec.n // 2}")
    s, name = _unit(cfg, spec)
    deltas = (o.get("delta_range") or Sweep(0.0, 0.0, 1)).values()
    gammas = (o.get("gamma_range") or Sweep(0.0, 2.0, 21)).values()
    nodes = [(float(d), float(g)) for d in deltas for g in gammas]
    tasks = [(spec, m, d * s, g * s, cfg.tol_real, cfg.tol_root) for d, g in nodes]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_phase_node, tasks, chunksize=8))
    else:
        results = [_phase_node(t) for t in tasks]
    rows = [(d, g, ph, rc) for (d, g), (ph, rc) in zip(nodes, results)]
    payload = {"spec": spec_to_dict(spec), "m": m, "unit": name,
               "nodes": [dict(zip(CSV_HEADERS["phase-diagram"], r)) for r in rows]}
    return payload, rows


_DISPATCH = {
    "spectrum": _cmd_spectrum,
    "metric": _cmd_metric,
    "verify": _cmd_verify,
    "ep-contour": _cmd_ep_contour,
    "ep-surface": _cmd_ep_surface,
    "closed-form": _cmd_closed_form,
    "phase-diagram": _cmd_phase_diagram,
}


def render(cfg: RunConfig) -> tuple[str, bool]:
    """Run ``cfg`` and return ``(text, ok)``; ``ok`` is False only for failed checks."""
    payload, rows = _DISPATCH[cfg.command](cfg)
    if cfg.format == "csv":
        text = _csv_text(CSV_HEADERS[cfg.command], rows)
    else:
        text = _json_text(payload)
    ok = payload.get("passed", True) if isinstance(payload, dict) else True
    return text, ok


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    """Execute ``cfg``, write the result and return the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        text, ok = render(cfg)
    except (InputError, SpecError) as exc:
        print(f"ptchain: invalid input: {exc}", file=stderr)
        return 2
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"ptchain: {cfg.command} failed: {type(exc).__name__}: {exc}", file=stderr)
        return 3
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    if not ok:
        print(f"ptchain: {cfg.command}: one or more checks failed", file=stderr)
        return 3
    return 0


# -- argument parsing ---------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", metavar="FILE", help="Hamiltonian JSON file ('-' for stdin)")
    common.add_argument("--out", metavar="FILE", help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--tol-real", type=float, default=1e-8, metavar="X",
                        help="relative tolerance on |Im lambda| for calling lambda real")
    common.add_argument("--tol-root", type=float, default=1e-14, metavar="X",
                        help="root-finder stopping tolerance")
    common.add_argument("--jobs", type=int, default=1, metavar="N")
    common.add_argument("--raw-units", action="store_true",
                        help="report energies unscaled instead of in units of t or t2")
    common.add_argument("--n", type=int)
    common.add_argument("--m", type=int)
    common.add_argument("--t1", type=float)
    common.add_argument("--t2", type=float)
    common.add_argument("--delta", type=float, default=0.0)
    common.add_argument("--gamma", type=float, default=0.0)

    p = argparse.ArgumentParser(prog="ptchain", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="eigenvalues with multiplicities")
    met = sub.add_parser("metric", parents=[common], help="intertwiner, Omega and C diagnostics")
    met.add_argument("--re-z", type=float, default=0.0, help="real part of the family parameter")
    sub.add_parser("verify", parents=[common], help="cross-check spectra and certificates")
    con = sub.add_parser("ep-contour", parents=[common], help="critical-chain EP contour")
    con.add_argument("--theta-steps", type=int, default=181)
    con.add_argument("--no-cusps", action="store_true")
    con.add_argument("--no-orders", action="store_true")
    sur = sub.add_parser("ep-surface", parents=[common], help="SSH EP surface")
    sur.add_argument("--ratio-range", metavar="a:b:steps", help="t1/t2 grid")
    sur.add_argument("--delta-range", metavar="a:b:steps")
    sur.add_argument("--gamma-max", type=float, default=10.0)
    sur.add_argument("--no-orders", action="store_true", help="skip ridge and EP4 search")
    cf = sub.add_parser("closed-form", parents=[common], help="exactly solvable spectra")
    cf.add_argument("--case", help="solvable row 1..5 or ssh-exact")
    ph = sub.add_parser("phase-diagram", parents=[common], help="phase over a (delta, gamma) grid")
    ph.add_argument("--delta-range", metavar="a:b:steps")
    ph.add_argument("--gamma-range", metavar="a:b:steps")
    return p


def config_from_args(argv=None) -> RunConfig:
    """Parse ``argv`` into a :class:`RunConfig`."""
    ns = _build_parser().parse_args(argv)
    spec = None
    if ns.spec:
        spec = load_spec(sys.stdin) if ns.spec == "-" else load_spec_file(ns.spec)
    opts = {k: v for k, v in vars(ns).items()
            if k not in ("command", "spec", "out", "format", "tol_real", "tol_root", "jobs",
                         "raw_units") and v is not None}
    for key in ("delta_range", "gamma_range", "ratio_range"):
        if key in opts:
            opts[key] = parse_sweep(opts[key])
    fmt = ns.format
    if fmt is None:
        fmt = "csv" if ns.command in ("ep-contour", "ep-surface", "phase-diagram") else "json"
    return RunConfig(ns.command, spec, ns.out, fmt, ns.tol_real, ns.tol_root, ns.jobs,
                     ns.raw_units, opts)


def load_spec_file(path: str) -> HamiltonianSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON in {path}: {exc}") from exc
    return spec_from_dict(data)


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
    except (InputError, SpecError) as exc:
        print(f"ptchain: invalid input: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())

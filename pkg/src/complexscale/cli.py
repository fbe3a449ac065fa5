"""Batch front-end: run a JSON job, write CSV/JSON reports, exit with a status code.

Usage::

    complexscale spectrum --config job.json --out results/ [--seed 42]

Subcommands ``spectrum``, ``resonances``, ``numrange``, ``weyl``,
``resolvent`` and ``ichinose`` run one analysis; ``all`` runs every
analysis listed in the config.  Exit status: 0 when every check passes,
2 when a tolerance check fails, 1 on a configuration or runtime error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from typing import Optional

import numpy as np

from .config import ANALYSES, SCHEMA, JobConfig, load_config, parse_complex
from .errors import ConfigError
from .geometry import CrossSectionSpectrum, make_grid
from .linalg import eig_dense, numerical_range_boundary
from .operators import assemble_corner_mode, assemble_cyl_mode, radial_block
from .profile import as_theta, bump
from .resolvent import continuation_scan, make_analytic_vector, matrix_element
from .spectral import (classify_spectrum, contour_integral, ichinose_sumcheck, match_discrete,
                       polygon_max_angle, predict_essential, sector_search)
from .weyl import bws_decay, commutator_decay, loglog_slope

__all__ = ["run_job", "export_report", "dumps_json", "main", "EXIT_OK", "EXIT_FAIL",
           "EXIT_ERROR"]

log = logging.getLogger("complexscale")

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2

TABLE_COLUMNS = {
    "spectrum": ["theta_re", "theta_im", "mu", "re", "im", "class", "origin_re", "origin_im",
                 "t", "distance"],
    "numrange": ["theta_re", "theta_im", "mu", "re", "im"],
    "weyl_free": ["n_or_d", "value", "fitted_slope"],
    "weyl_corner": ["n_or_d", "value", "fitted_slope"],
    "weyl_channel": ["n_or_d", "value", "fitted_slope"],
    "commutator": ["n_or_d", "value", "fitted_slope"],
    "resolvent_trace": ["theta_re", "theta_im", "re_lambda", "im_lambda", "re_value",
                        "im_value", "flag"],
}
TABLE_FOR = {"spectrum": ["spectrum"], "numrange": ["numrange"],
             "weyl": ["weyl_free", "weyl_corner", "weyl_channel", "commutator"],
             "resolvent": ["resolvent_trace"]}
DOCUMENT_FOR = {"resonances": "resonances", "ichinose": "ichinose"}


# ----------------------------------------------------------------------------- output

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
        return format(x, ".17g")
    return str(x)


def _emit(obj, out: list, indent: int):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = sorted(obj.items())
        for i, (k, v) in enumerate(items):
            out.append(f"{pad}  {json.dumps(str(k))}: ")
            _emit(v, out, indent + 1)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            out.append("[" + ", ".join(_scalar(v) for v in obj) + "]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad + "  ")
            _emit(v, out, indent + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "]")
    else:
        out.append(_scalar(obj))


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (complex, np.complexfloating)):
        return f"[{_scalar(float(v.real))}, {_scalar(float(v.imag))}]"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g") if math.isfinite(v) else "null"
    return json.dumps(str(v))


def dumps_json(obj) -> str:
    """Deterministic JSON: sorted keys, 17 significant digits, LF, trailing newline."""
    out: list = []
    _emit(obj, out, 0)
    return "".join(out) + "\n"


def _write_csv(path, columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    _write_text(path, buf.getvalue())


def _write_text(path, text):
    try:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def export_report(report: dict, out_dir, fmt: str = "both") -> list:
    """Write the tables (CSV) and/or documents and summary (JSON) of a run report.

    Returns the written paths.  Re-exporting the same report produces
    byte-identical files.
    """
    if fmt not in ("csv", "json", "both"):
        raise ValueError(f"unknown export format {fmt!r}")
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if fmt in ("csv", "both"):
        for name, table in sorted(report.get("tables", {}).items()):
            path = os.path.join(out_dir, f"{name}.csv")
            _write_csv(path, table["columns"], table["rows"])
            written.append(path)
    if fmt in ("json", "both"):
        for name, doc in sorted(report.get("documents", {}).items()):
            path = os.path.join(out_dir, f"{name}.json")
            _write_text(path, dumps_json(doc))
            written.append(path)
        path = os.path.join(out_dir, "summary.json")
        _write_text(path, dumps_json(report.get("summary", {})))
        written.append(path)
    return written


# ----------------------------------------------------------------------------- helpers

def _cz(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _key(theta, mu) -> str:
    theta = complex(theta)
    sign = "-" if theta.imag < 0 else "+"
    return f"theta={_fmt(theta.real)}{sign}{_fmt(abs(theta.imag))}i mu={_fmt(mu)}"


def _check(value, limit, ok) -> dict:
    return {"value": value, "limit": limit, "pass": bool(ok)}


def _mode_groups(cs: CrossSectionSpectrum):
    """Distinct thresholds with their labels (degenerate modes share one block)."""
    groups = {}
    for mu, lab in zip(cs.mus, cs.labels):
        groups.setdefault(float(mu), []).append(lab)
    return sorted(groups.items())


def _block(cfg: JobConfig, theta, mu, model=None):
    model = model or cfg.model
    if cfg.model_kind == "cylinder":
        return assemble_cyl_mode(theta, mu, model.grid, model.potential, model.profile)
    return assemble_corner_mode(theta, mu, model)


def _end_eigenvalues(cfg: JobConfig, theta, tol):
    """Real discrete eigenvalues of each corner end factor (the gamma thresholds)."""
    m = cfg.model
    single = CrossSectionSpectrum((0.0,), ("end",), 1)
    out = []
    for grid, pot in zip((m.grid1, m.grid2), m.end_potentials):
        e = eig_dense(radial_block(theta, grid, pot, m.profile), vectors=False).eigenvalues
        d = classify_spectrum(e, predict_essential(theta, single), tol).discrete_values
        out.append(sorted(d[np.abs(d.imag) <= tol].real))
    return out


def _rays(cfg: JobConfig, theta, tol):
    cs = cfg.model.cross_section
    if cfg.model_kind == "corner":
        return predict_essential(theta, cs, _end_eigenvalues(cfg, theta, tol))
    return predict_essential(theta, cs)


def _complex_thetas(cfg: JobConfig):
    return [t for t in cfg.thetas if t.imag != 0]


# ----------------------------------------------------------------------------- analyses

def _run_spectrum(cfg, report):
    tol = cfg.tolerances["classification"]
    rows = []
    counts = {}
    for theta in cfg.thetas:
        rays = _rays(cfg, theta, tol)
        for mu, labels in _mode_groups(cfg.model.cross_section):
            ev = eig_dense(_block(cfg, theta, mu), vectors=False).eigenvalues
            cl = classify_spectrum(ev, rays, tol)
            for r in cl.records():
                rows.append([theta.real, theta.imag, mu, r["re"], r["im"], r["class"],
                             r["origin_re"], r["origin_im"], r["t"], r["distance"]])
            counts[_key(theta, mu)] = {
                "ray": len(cl.ray_bound), "discrete": len(cl.discrete)}
    report["tables"]["spectrum"] = {"columns": TABLE_COLUMNS["spectrum"], "rows": rows}
    return {"eigenvalues": _check(len(rows), None, len(rows) > 0)}, {"counts": counts}


def _resonance_thetas(cfg):
    given = cfg.section("resonances")["thetas"]
    if given:
        return given
    cz = _complex_thetas(cfg)
    if len(cz) < 2:
        raise ConfigError("resonances need two complex dilation parameters")
    return cz[:2]


def _discrete_in_window(cfg, theta, mu, model=None):
    tol = cfg.tolerances["classification"]
    opts = cfg.section("resonances")
    re_lo, re_hi, im_lo = opts["window"]
    ev = eig_dense(_block(cfg, theta, mu, model), vectors=False).eigenvalues
    d = classify_spectrum(ev, _rays(cfg, theta, tol), tol).discrete_values
    return d[(d.real >= re_lo) & (d.real <= re_hi) & (d.imag >= im_lo)]


def _doubled_model(cfg):
    from .geometry import CylinderModel, HalfLineGrid
    m = cfg.model
    g = m.grid
    return CylinderModel(m.cross_section, HalfLineGrid(2 * g.u_max, 2 * g.n + 1, g.bc0),
                         m.potential, m.profile)


def _run_resonances(cfg, report):
    ta, tb = _resonance_thetas(cfg)
    opts = cfg.section("resonances")
    limit = cfg.tolerances["match"]
    pairs = []
    worst, worst_drift = 0.0, 0.0
    drift_model = None
    if opts["drift_check"]:
        if cfg.model_kind != "cylinder":
            raise ConfigError("u_max drift check is only available for cylinder models")
        drift_model = _doubled_model(cfg)
    for mu, labels in _mode_groups(cfg.model.cross_section):
        da = _discrete_in_window(cfg, ta, mu)
        db = _discrete_in_window(cfg, tb, mu)
        matched = match_discrete(da, db, opts["match_tol"])
        dd = _discrete_in_window(cfg, ta, mu, drift_model) if drift_model else None
        for a, b, dist in matched:
            entry = {"mu": mu, "labels": labels, "theta_a_value": _cz(a),
                     "theta_b_value": _cz(b), "drift": dist,
                     "resonance": bool(abs(a.imag) > limit)}
            worst = max(worst, dist)
            if dd is not None:
                u_drift = float(np.min(np.abs(dd - a))) if dd.size else float("inf")
                entry["u_max_drift"] = u_drift
                worst_drift = max(worst_drift, u_drift)
            pairs.append(entry)
    doc = {"theta_a": _cz(ta), "theta_b": _cz(tb), "pairs": pairs,
           "n_matched": len(pairs), "n_resonances": sum(p["resonance"] for p in pairs)}
    report["documents"]["resonances"] = doc
    checks = {"theta_drift": _check(worst, limit, worst <= limit)}
    if drift_model is not None:
        checks["u_max_drift"] = _check(worst_drift, limit, worst_drift <= limit)
    return checks, {"n_matched": len(pairs), "n_resonances": doc["n_resonances"]}


def _run_numrange(cfg, report):
    opts = cfg.section("numrange")
    rng = np.random.default_rng(cfg.seed)
    k0, k1, nk = opts["k_grid"]
    k_grid = np.linspace(k0, k1, int(nk))
    rows = []
    checks = {}
    info = {}
    thetas = _complex_thetas(cfg) or cfg.thetas
    for theta in thetas:
        for mu, labels in _mode_groups(cfg.model.cross_section):
            op = _block(cfg, theta, mu)
            if op.shape[0] > opts["max_dim"]:
                info[f"skipped mu={_fmt(mu)}"] = f"dimension {op.shape[0]} > max_dim"
                continue
            A = op.dense()
            X = rng.standard_normal((A.shape[0], opts["samples"])) \
                + 1j * rng.standard_normal((A.shape[0], opts["samples"]))
            X /= np.linalg.norm(X, axis=0)
            q = np.einsum("ij,ij->j", X.conj(), A @ X)
            bnd = numerical_range_boundary(A, opts["directions"])
            found = sector_search(np.concatenate([q, bnd]), k_grid, opts["gamma_max"])
            key = _key(theta, mu)
            if found is None:
                checks[key + " k"] = _check(None, cfg.tolerances["sector_k_min"], False)
                continue
            gamma, k = found
            angle = polygon_max_angle(bnd + gamma)
            allowed = math.atan(1.0 / k) + cfg.tolerances["sector_angle"]
            checks[key + " k"] = _check(k, cfg.tolerances["sector_k_min"],
                                        k >= cfg.tolerances["sector_k_min"])
            checks[key + " angle"] = _check(angle, allowed, angle <= allowed)
            fine = numerical_range_boundary(A, 4 * opts["directions"])
            info[key] = {"gamma": gamma, "k": k,
                         "fine_polygon_angle": polygon_max_angle(fine + gamma)}
            for z in bnd:
                rows.append([theta.real, theta.imag, mu, z.real, z.imag])
    report["tables"]["numrange"] = {"columns": TABLE_COLUMNS["numrange"], "rows": rows}
    return checks, info


def _decay_rows(rows):
    slope = loglog_slope([r[0] for r in rows], [r[1] for r in rows])
    return [[x, v, slope] for x, v in rows], slope


def _run_weyl(cfg, report):
    opts = cfg.section("weyl")
    tol = cfg.tolerances["classification"]
    cz = _complex_thetas(cfg)
    if not cz:
        raise ConfigError("weyl analysis needs a complex dilation parameter")
    theta = cz[0]
    th = as_theta(theta)
    m = cfg.model
    mu0 = float(m.cross_section.mus[0])
    target = mu0 + th.theta_prime * opts["t"]
    rays = _rays(cfg, theta, tol)
    checks, info = {}, {}
    runs = {"free": dict()}
    if cfg.model_kind == "corner":
        runs["corner"] = dict(corner_potential=m.corner_potential)
        A1 = radial_block(theta, m.grid1, m.end_potentials[0], m.profile)
        single = CrossSectionSpectrum((0.0,), ("end",), 1)
        r = eig_dense(A1)
        cl = classify_spectrum(r.eigenvalues, predict_essential(theta, single), tol)
        real = [d for d in cl.discrete if abs(d.value.imag) <= tol]
        if real:
            j = int(np.argmin(np.abs(r.eigenvalues - real[0].value)))
            gam = complex(r.eigenvalues[j])
            runs["channel"] = dict(end_value=gam, end_vector=r.vectors[:, j], end_grid=m.grid1,
                                   end_potential=m.end_potentials[0])
        else:
            info["channel"] = "skipped: first end factor has no real discrete eigenvalue"
    for kind, extra in runs.items():
        tgt = target + (extra.get("end_value", 0.0) if kind == "channel" else 0.0)
        rows, slope = bws_decay(kind, opts["ns"], theta, tgt, mu=mu0, profile=m.profile,
                                h=opts["h"], **extra)
        table, _ = _decay_rows(rows)
        report["tables"][f"weyl_{kind}"] = {"columns": TABLE_COLUMNS[f"weyl_{kind}"],
                                             "rows": table}
        lim = cfg.tolerances["bws_slope"]
        checks[f"{kind} slope"] = _check(slope, lim, slope <= lim)
        dist = float(rays.distances(tgt).min())
        checks[f"{kind} target on rays"] = _check(dist, tol, dist <= tol)
    ch = opts["commutator_h"]

    def operator_for(d):
        u_max = 2.0 * d + 6.0
        g = make_grid(u_max, int(math.ceil(u_max / ch)))
        if cfg.model_kind == "cylinder":
            return assemble_cyl_mode(theta, mu0, g, m.potential, m.profile)
        from .geometry import CornerModel
        cm = CornerModel(m.cross_section, g, g, m.corner_potential, m.end_potentials, m.profile)
        return assemble_corner_mode(theta, mu0, cm, form_matrix=False)
    eps = commutator_decay(opts["ds"], operator_for)
    table, slope = _decay_rows(eps)
    report["tables"]["commutator"] = {"columns": TABLE_COLUMNS["commutator"], "rows": table}
    lim = cfg.tolerances["commutator_slope"]
    checks["commutator slope"] = _check(slope, lim, slope <= lim)
    return checks, info


def _default_vectors(model):
    """Two analytic vectors: interior bumps plus decaying tails on the first two modes."""
    g = model.grid
    u = g.nodes
    n_modes = len(model.cross_section)
    K = model.profile.K
    c, w = 0.5 * (K - 1.0), 0.45 * (K - 1.0)
    zero = np.zeros_like(u)
    interior_f = [bump((u - c) / w)] + [zero] * (n_modes - 1)
    interior_g = [bump((u - 0.8 * c) / (0.8 * w)) * np.exp(1j * u)] + [zero] * (n_modes - 1)
    tails_f = [[0, 0, 0, 1.0]] + [[0, 0, 1.0, 0.5]] * min(1, n_modes - 1) + [[]] * (n_modes - 2)
    tails_g = [[0, 0, 0, 0, 1j]] + [[0, 0, 0, 1.0]] * min(1, n_modes - 1) + [[]] * (n_modes - 2)
    f = make_analytic_vector(np.array(interior_f), tails_f[:n_modes], g, model.profile)
    h = make_analytic_vector(np.array(interior_g), tails_g[:n_modes], g, model.profile)
    return f, h


def _run_resolvent(cfg, report):
    if cfg.model_kind != "cylinder":
        raise ConfigError("resolvent analysis is implemented for cylinder models")
    opts = cfg.section("resolvent")
    m = cfg.model
    cs = m.cross_section
    f, g = _default_vectors(m)
    checks, info = {}, {}
    ops0 = [assemble_cyl_mode(0.0, mu, m.grid, m.potential, m.profile) for mu in cs.mus]
    lambdas = [parse_complex(lam) for lam in opts["lambdas"]]
    ref = {lam: matrix_element(lam, 0.0, f, g, ops0) for lam in lambdas}
    worst = 0.0
    for theta in cfg.thetas:
        if theta == 0:
            continue
        ops = [assemble_cyl_mode(theta, mu, m.grid, m.potential, m.profile) for mu in cs.mus]
        for lam in lambdas:
            v = matrix_element(lam, theta, f, g, ops)
            worst = max(worst, abs(v - ref[lam]) / abs(ref[lam]))
    lim = cfg.tolerances["resolvent_rel"]
    checks["theta independence"] = _check(worst, lim, worst <= lim)

    distinct = cs.distinct()
    path_re = opts["path"]["re"]
    if path_re is None:
        path_re = 0.5 * (distinct[0] + distinct[1]) if len(distinct) > 1 else distinct[0] + 0.5
    p = opts["path"]
    path = path_re + 1j * np.linspace(p["im_start"], p["im_stop"], int(p["points"]))
    rows = []
    cz = _complex_thetas(cfg)
    for theta in [0.0] + cz[:1]:
        ops = [assemble_cyl_mode(theta, mu, m.grid, m.potential, m.profile) for mu in cs.mus]
        eigs = [eig_dense(op, vectors=False).eigenvalues for op in ops]
        rays = predict_essential(theta, cs)
        tr = continuation_scan(path, theta, f, g, ops, eigs, rays=rays)
        for z, v, fl in zip(tr.path, tr.values, tr.flags):
            rows.append([complex(theta).real, complex(theta).imag, z.real, z.imag, v.real,
                         v.imag, fl])
        if theta == 0:
            n_ess = tr.flags.count("ess")
            checks["theta=0 undefined on axis"] = _check(n_ess, 1, n_ess >= 1)
            continue
        s = tr.smoothness()
        lim = cfg.tolerances["smoothness"]
        checks["rotated smoothness"] = _check(s, lim, bool(np.isfinite(s) and s <= lim
                                                            and tr.ok.all()))
        info["pole candidates"] = [_cz(z) for z in tr.pole_candidates()]
        c = opts["contour"]
        center = parse_complex(c["center"]) if c["center"] is not None else complex(path_re)
        allz = np.concatenate(eigs)
        gap = min(float(np.min(np.abs(allz - center))), float(rays.distances(center).min()))
        radius = c["radius"] or 0.5 * gap
        I, vmax = contour_integral(lambda z: matrix_element(z, theta, f, g, ops), center,
                                   radius, int(c["points"]))
        resid = float(abs(I) / (radius * max(vmax, np.finfo(float).tiny)))
        lim = cfg.tolerances["contour"]
        checks["lambda contour"] = _check(resid, lim, resid <= lim)
    report["tables"]["resolvent_trace"] = {"columns": TABLE_COLUMNS["resolvent_trace"],
                                           "rows": rows}
    return checks, info


def _run_ichinose(cfg, report):
    opts = cfg.section("ichinose")
    rng = np.random.default_rng(cfg.seed)
    dim = int(opts["dim"])
    rand = []
    worst = 0.0
    for i in range(int(opts["pairs"])):
        A = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        B = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        _, _, mis = ichinose_sumcheck(A, B)
        rand.append({"pair": i, "mismatch": mis})
        worst = max(worst, mis)
    cz = _complex_thetas(cfg)
    theta = cz[0] if cz else 0.4 + 0.2j
    prof = cfg.model.profile
    pot = cfg.model.potential if cfg.model_kind == "cylinder" else cfg.model.end_potentials[0]
    g = make_grid(max(2.5 * prof.R, prof.R + 1.0), int(opts["block_n"]))
    A = radial_block(theta, g, pot, prof)
    B = radial_block(theta, g, None, prof)
    _, _, block_mis = ichinose_sumcheck(A, B)
    report["documents"]["ichinose"] = {
        "seed": cfg.seed, "random_pairs": rand, "random_worst": worst,
        "blocks": {"theta": _cz(theta), "n": int(opts["block_n"]), "mismatch": block_mis}}
    return ({"random pairs": _check(worst, cfg.tolerances["ichinose_random"],
                                    worst < cfg.tolerances["ichinose_random"]),
             "dilated blocks": _check(block_mis, cfg.tolerances["ichinose_blocks"],
                                      block_mis < cfg.tolerances["ichinose_blocks"])},
            {})


RUNNERS = {"spectrum": _run_spectrum, "resonances": _run_resonances, "numrange": _run_numrange,
           "weyl": _run_weyl, "resolvent": _run_resolvent, "ichinose": _run_ichinose}


def run_job(cfg: JobConfig, analyses: Optional[list] = None) -> dict:
    """Run the selected analyses (default: those in the config) and build a report.

    Each analysis is isolated: an exception is recorded as status "error"
    for that analysis only.  Tables and documents of every analysis are
    present (possibly empty) so exports always have a fixed file set.
    """
    analyses = list(analyses or cfg.analyses)
    report = {"tables": {}, "documents": {}, "summary": {}}
    results = {}
    for name in ANALYSES:
        if name not in analyses:
            continue
        log.info("running %s", name)
        try:
            checks, info = RUNNERS[name](cfg, report)
            status = "pass" if all(c["pass"] for c in checks.values()) else "fail"
            results[name] = {"status": status, "checks": checks, "info": info}
        except Exception as exc:  # isolation: record and continue
            log.warning("%s failed: %s", name, exc)
            results[name] = {"status": "error", "checks": {},
                             "message": f"{type(exc).__name__}: {exc}"}
        for t in TABLE_FOR.get(name, []):
            report["tables"].setdefault(t, {"columns": TABLE_COLUMNS[t], "rows": []})
        if name in DOCUMENT_FOR:
            report["documents"].setdefault(DOCUMENT_FOR[name], {})
    statuses = [r["status"] for r in results.values()]
    overall = "error" if "error" in statuses else ("fail" if "fail" in statuses else "pass")
    report["summary"] = {"schema": SCHEMA, "seed": cfg.seed, "model": cfg.model_kind,
                         "thetas": [_cz(t) for t in cfg.thetas], "analyses": results,
                         "status": overall}
    return report


def exit_code(report) -> int:
    return {"pass": EXIT_OK, "fail": EXIT_FAIL}.get(report["summary"].get("status"), EXIT_ERROR)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="complexscale",
                                     description="Complex-scaling spectral laboratory")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ANALYSES + ("all",):
        p = sub.add_parser(name, help=f"run {'every configured analysis' if name == 'all' else name}")
        p.add_argument("--config", required=True, help="JSON job file")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        p.add_argument("--seed", type=int, default=None, help="seed for random batteries")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, seed=args.seed, output_dir=args.out)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_ERROR
    analyses = None if args.command == "all" else [args.command]
    report = run_job(cfg, analyses)
    try:
        export_report(report, cfg.output_dir)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for name, res in report["summary"]["analyses"].items():
        print(f"{name}: {res['status']}" + (f" ({res['message']})" if "message" in res else ""))
    return exit_code(report)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

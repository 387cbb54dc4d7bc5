"""Execute validated scenarios and write their reports.

Every task writes one CSV table and a ``summary.json`` into the output
directory.  Numbers in the CSV use 9 significant digits and the JSON is
key-sorted, so equal inputs produce byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import algebra as alg
from .bell import COMMUTE_TOL, OptimizerOptions, brute_force_beta, maximize_bell, structural_diagnostics
from .cluster import SamplerOptions, bound_table, clustering_coefficient, verify_cluster_bound
from .errors import FitError, InputError
from .invariant import InvariantOptions, beta_inf, beta_star
from .lattice import RegionSpec, build_chain, fit_decay, region_algebra, separation_curve
from .scenario import Scenario
from .serialize import decode_matrix
from .states import make_state

SQRT2 = math.sqrt(2.0)
BOUND_TOL = 1e-9

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_VIOLATION = 4


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def build_algebras(spec: dict):
    A, B = _build_pair(spec)
    c = alg.check_commuting(A, B)
    if c > COMMUTE_TOL:
        raise InputError(f"the two algebras do not commute (max commutator norm {c:.3g})")
    return A, B


def _build_pair(spec: dict):
    if "preset" in spec:
        name = spec["preset"]
        if name == "qubit_pair":
            return alg.qubit_pair()
        if name == "qutrit_pair":
            return alg.qutrit_pair()
        if name == "diagonal_pair":
            return alg.diagonal_pair()
        if name == "tfim":
            missing = [k for k in ("N", "J", "g", "left", "right") if k not in spec]
            if missing:
                raise InputError(f"tfim preset needs {', '.join(missing)}")
            chain = build_chain(spec["N"], spec["J"], spec["g"])
            L, R = RegionSpec(**spec["left"]), RegionSpec(**spec["right"])
            if set(L.sites()) & set(R.sites()):
                raise InputError("tfim regions overlap")
            return region_algebra(chain, L), region_algebra(chain, R)
        raise InputError(f"unknown preset {name!r}")
    if "direct_sum" in spec:
        return alg.direct_sum_pair([build_algebras(s) for s in spec["direct_sum"]])
    dim = spec["dim"]
    A = alg.generate_algebra([decode_matrix(m) for m in spec["A"]], dim)
    B = alg.generate_algebra([decode_matrix(m) for m in spec["B"]], dim)
    return A, B


def build_state(spec: dict):
    return make_state(spec)


def optimizer_options(s: Scenario) -> OptimizerOptions:
    o = dict(s.data.get("optimizer", {}))
    o.setdefault("seed", s.seed)
    return OptimizerOptions(**o)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.9g}"
    return str(x)


def csv_text(header, rows, comments=()) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    for c in comments:
        buf.write(f"# {c}\n")
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(f"{float(x):.12g}")
    return x


@dataclass
class ReportBundle:
    task: str
    exit_code: int
    summary: dict
    files: dict = field(default_factory=dict)  # name -> text

    def write(self, out_dir: str) -> list[str]:
        os.makedirs(out_dir, exist_ok=True)
        paths = []
        for name, text in sorted(self.files.items()):
            p = os.path.join(out_dir, name)
            with open(p, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            paths.append(p)
        p = os.path.join(out_dir, "summary.json")
        with open(p, "w", encoding="utf-8", newline="") as fh:
            fh.write(json.dumps(_jsonable(self.summary), sort_keys=True, indent=2) + "\n")
        paths.append(p)
        return paths


def _exit(violations, converged) -> int:
    if violations:
        return EXIT_VIOLATION
    if not converged:
        return EXIT_CONVERGENCE
    return EXIT_OK


def _beta_violation(beta) -> list[str]:
    out = []
    if beta > SQRT2 + BOUND_TOL:
        out.append(f"beta {beta:.12g} exceeds sqrt(2)")
    if beta < 1 - BOUND_TOL:
        out.append(f"beta {beta:.12g} is below 1")
    return out


# ---------------------------------------------------------------------------
# tasks
# ---------------------------------------------------------------------------

def _task_beta(s: Scenario) -> ReportBundle:
    A, B = build_algebras(s.data["algebras"])
    state = build_state(s.data["state"])
    rep = maximize_bell(state, A, B, optimizer_options(s))
    diag = structural_diagnostics(state, rep)
    violations = _beta_violation(rep.beta)
    summary = {
        "task": "beta", "seed": s.seed, "beta": rep.beta, "converged": rep.converged,
        "iterations": rep.iterations, "restarts_used": rep.restarts_used,
        "sq_residuals": list(diag.sq_residuals), "anticomm_residuals": list(diag.anticomm_residuals),
        "i2_residuals": [list(p) for p in diag.i2_residuals], "violations": violations,
    }
    row = [rep.beta, rep.iterations, rep.restarts_used, rep.converged, diag.max_residual()]
    header = ["beta", "iterations", "restarts_used", "converged", "max_structural_residual"]
    try:
        bf = brute_force_beta(state, A, B, 128)
    except InputError:
        pass
    else:
        summary["brute_force_beta"] = bf
        header.append("brute_force_beta")
        row.append(bf)
    files = {"beta.csv": csv_text(header, [row])}
    return ReportBundle("beta", _exit(violations, rep.converged), summary, files)


def _invariant_options(s: Scenario) -> InvariantOptions:
    return InvariantOptions(bell=optimizer_options(s), seed=s.seed, **s.data.get("invariant", {}))


def _task_invariant(s: Scenario) -> ReportBundle:
    pairs = s.data.get("pairs") or [{"id": "pair", "algebras": s.data["algebras"]}]
    opts = _invariant_options(s)
    rows, results, violations, all_conv = [], [], [], True
    for p in pairs:
        A, B = build_algebras(p["algebras"])
        star, inf = beta_star(A, B, opts), beta_inf(A, B, opts)
        gap = inf.value - star.value
        conv = star.converged and inf.converged
        all_conv &= conv
        if star.value > SQRT2 + BOUND_TOL or inf.value > SQRT2 + BOUND_TOL:
            violations.append(f"{p['id']}: invariant above sqrt(2)")
        if star.value < 1 - 1e-6:
            violations.append(f"{p['id']}: certified lower bound below 1")
        if gap < -BOUND_TOL:
            violations.append(f"{p['id']}: negative minimax gap {gap:.3g}")
        rows.append([p["id"], star.value, inf.value, gap, conv])
        results.append({"pair_id": p["id"], "beta_star": star.value, "beta_inf": inf.value,
                        "interval": [star.value, inf.value], "gap": gap, "converged": conv,
                        "iterations": [star.iterations, inf.iterations]})
    summary = {"task": "invariant", "seed": s.seed, "pairs": results, "violations": violations}
    if len(results) == 1:
        summary.update({k: results[0][k] for k in ("beta_star", "beta_inf", "gap")})
    files = {"invariant.csv": csv_text(["pair_id", "beta_star", "beta_inf", "gap", "converged"], rows)}
    return ReportBundle("invariant", _exit(violations, all_conv), summary, files)


def _task_cluster(s: Scenario) -> ReportBundle:
    d = s.data
    summary = {"task": "cluster", "seed": s.seed}
    files = {}
    violations, converged = [], True
    if "bounds" in d:
        rows = bound_table(d["bounds"]["m"], d["bounds"]["distances"])
        files["bounds.csv"] = csv_text(["d", "exponential_bound", "short_distance_bound"], rows)
        summary["bounds_m"] = d["bounds"]["m"]
    if "state" in d:
        A, B = build_algebras(d["algebras"])
        state = build_state(d["state"])
        sopts = SamplerOptions(seed=s.seed, **d.get("sampler", {}))
        est = clustering_coefficient(state, A, B, sopts)
        header = ["gamma_hat", "samples", "refinement_passes"]
        row = [est.gamma_hat, est.samples, est.refinement_passes]
        summary.update({"gamma_hat": est.gamma_hat, "samples": est.samples})
        if "gamma" in d:
            chk = verify_cluster_bound(state, A, B, d["gamma"], optimizer_options(s))
            header += ["gamma", "beta", "bound", "holds"]
            row += [d["gamma"], chk.beta, chk.bound, chk.holds]
            summary.update({"gamma": d["gamma"], "beta": chk.beta, "bound": chk.bound, "holds": chk.holds})
            violations += _beta_violation(chk.beta)
            if not chk.holds:
                violations.append("beta exceeds the clustering bound")
        files["cluster.csv"] = csv_text(header, [row])
    summary["violations"] = violations
    return ReportBundle("cluster", _exit(violations, converged), summary, files)


def _task_chain(s: Scenario) -> ReportBundle:
    d = s.data
    c = d["chain"]
    chain = build_chain(c["N"], c["J"], c["g"])
    curve = separation_curve(chain, d["width"], d["separations"], optimizer_options(s))
    violations = [f"a={p.a}: {v}" for p in curve for v in _beta_violation(p.beta)]
    converged = all(p.converged for p in curve)
    summary = {"task": "chain_curve", "seed": s.seed, "N": c["N"], "J": c["J"], "g": c["g"],
               "width": d["width"], "curve": [[p.a, p.beta, p.converged] for p in curve]}
    try:
        fit = fit_decay(curve)
    except (FitError, InputError) as exc:
        comment = f"fit failed: {exc}"
        summary["fit"] = None
        summary["fit_error"] = str(exc)
    else:
        comment = f"fit m_hat={fit.m_hat:.9g} amplitude={fit.amplitude:.9g} residual={fit.residual:.9g}"
        summary["fit"] = {"m_hat": fit.m_hat, "amplitude": fit.amplitude, "residual": fit.residual}
    summary["violations"] = violations
    files = {"curve.csv": csv_text(["a", "beta", "converged"], [[p.a, p.beta, p.converged] for p in curve],
                                   comments=[comment])}
    return ReportBundle("chain_curve", _exit(violations, converged), summary, files)


def _task_verify(s: Scenario) -> ReportBundle:
    from .suite import run_suite

    rows = run_suite(s.seed, optimizer_options(s))
    failed = [r.name for r in rows if not r.passed]
    summary = {"task": "verify_suite", "seed": s.seed, "checks": len(rows), "failed": failed,
               "violations": failed}
    files = {"verify.csv": csv_text(["check", "value", "expected", "tolerance", "passed"],
                                    [[r.name, r.value, r.expected, r.tolerance, r.passed] for r in rows])}
    return ReportBundle("verify_suite", EXIT_VIOLATION if failed else EXIT_OK, summary, files)


TASK_RUNNERS = {
    "beta": _task_beta,
    "invariant": _task_invariant,
    "cluster": _task_cluster,
    "chain_curve": _task_chain,
    "verify_suite": _task_verify,
}


def run_scenario(s: Scenario, out_dir: str | None = None) -> ReportBundle:
    """Run a validated scenario; write its files to ``out_dir`` (or the scenario's output) if given."""
    bundle = TASK_RUNNERS[s.task](s)
    out_dir = out_dir or s.output
    if out_dir:
        bundle.write(out_dir)
    return bundle

"""Corpus harness: generate domains, run every check, and serialise reports.

A corpus is described by a :class:`CorpusSpec` (usually read from JSON).
Each domain is evaluated independently by :func:`evaluate_domain`, so rows
can be computed in worker processes and collected in a fixed order; the
resulting report is a pure function of the spec.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import optimize

from . import __version__
from .curves import classify
from .domains import (
    ConvexPolyDomain,
    DomainError,
    GenerationError,
    balanced_chord,
    chord_gap,
    circumradius,
    generate_lambda_convex,
    inradius,
    is_lambda_convex,
    reflect_arc,
    rolling_check,
)
from .kernel import GeometryError, space
from .lune import branch, build_lune, lune_inradius_numeric, lune_length_for_area, phase_transition_check, rho, rho_domain

REPORT_SCHEMA_VERSION = 1
DEFAULT_CELLS = ((1.0, 1.0), (0.0, 1.0), (-1.0, 2.0), (-1.0, 1.0), (-1.0, 0.5))

DEFAULT_TOLERANCES = {
    "lune_equality": 1e-4,
    "chord_angle": 1e-6,
    "arc_balance": 1e-8,
    "antisymmetry": 1e-8,
    "gauss_bonnet_factor": 10.0,
    "rolling_factor": 10.0,
    "hausdorff_threshold": 0.05,
    "eps_safety": 10.0,
    "eps_floor": 1e-9,
    "theorem2": 1e-6,
    "remark1": 1e-6,
}


class SpecError(ValueError):
    pass


@dataclass
class CorpusSpec:
    cells: list[tuple[float, float]] = field(default_factory=lambda: [tuple(c) for c in DEFAULT_CELLS])
    n_domains: int = 200
    seed: int = 0
    h: float = 1e-3
    lune_fraction: float = 0.2
    n_supports_range: tuple[int, int] = (3, 8)
    rolling_domains: int = 20
    rolling_samples: int = 64
    antisymmetry_samples: int = 100
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    checks: tuple[str, ...] = ("theorem1", "theorem2", "remark1", "conjecture_area", "conjecture_circumradius")
    inputs: list = field(default_factory=list)
    theorem2_lengths: int = 10
    remark1: dict = field(default_factory=lambda: {"k": [1.0], "L": [1.0, 4.0, 10.0], "eps": [1e-1, 1e-2, 1e-3, 1e-4]})

    @classmethod
    def from_dict(cls, data: dict, base_dir: str | None = None) -> "CorpusSpec":
        data = dict(data)
        if "boundary" in data:
            # a bare domain file: verify just that domain
            return cls(cells=[], n_domains=0, inputs=[data], h=_domain_h(data), checks=("theorem1",))
        spec = cls()
        if "cells" in data:
            spec.cells = [(float(c["kappa"]), float(c["lambda"])) if isinstance(c, dict) else (float(c[0]), float(c[1])) for c in data.pop("cells")]
        elif "kappa_list" in data or "lambda_list" in data:
            kl = data.pop("kappa_list", None)
            ll = data.pop("lambda_list", None)
            if not kl or not ll:
                raise SpecError("kappa_list and lambda_list must both be non-empty")
            spec.cells = [(float(k), float(l)) for k in kl for l in ll]
        tol = data.pop("tolerances", {})
        unknown = set(tol) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise SpecError(f"unknown tolerances: {sorted(unknown)}")
        spec.tolerances.update({k: float(v) for k, v in tol.items()})
        inputs = data.pop("inputs", [])
        for item in inputs:
            if isinstance(item, str):
                path = item if base_dir is None or os.path.isabs(item) else os.path.join(base_dir, item)
                with open(path) as fh:
                    spec.inputs.append(json.load(fh))
            else:
                spec.inputs.append(item)
        for key in ("n_domains", "seed", "rolling_domains", "rolling_samples", "antisymmetry_samples", "theorem2_lengths"):
            if key in data:
                setattr(spec, key, int(data.pop(key)))
        for key in ("h", "lune_fraction"):
            if key in data:
                setattr(spec, key, float(data.pop(key)))
        if "n_supports_range" in data:
            lo, hi = data.pop("n_supports_range")
            spec.n_supports_range = (int(lo), int(hi))
        if "checks" in data:
            spec.checks = tuple(data.pop("checks"))
        if "remark1" in data:
            spec.remark1.update(data.pop("remark1"))
        data.pop("schema_version", None)
        if data:
            raise SpecError(f"unknown spec fields: {sorted(data)}")
        spec.validate()
        return spec

    def validate(self) -> None:
        if self.n_domains < 0:
            raise SpecError("n_domains must be non-negative")
        if not self.h > 0:
            raise SpecError("h must be positive")
        for k, l in self.cells:
            if not (math.isfinite(k) and l > 0):
                raise SpecError(f"invalid cell kappa={k}, lambda={l}")
        lo, hi = self.n_supports_range
        if not 3 <= lo <= hi:
            raise SpecError("n_supports_range must satisfy 3 <= lo <= hi")
        known = {"theorem1", "theorem2", "remark1", "conjecture_area", "conjecture_circumradius"}
        if set(self.checks) - known:
            raise SpecError(f"unknown checks: {sorted(set(self.checks) - known)}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["cells"] = [{"kappa": k, "lambda": l} for k, l in self.cells]
        d["checks"] = list(self.checks)
        d["n_supports_range"] = list(self.n_supports_range)
        d["inputs"] = [{"kappa": i.get("kappa"), "lambda": i.get("lambda"), "metadata": i.get("metadata", {})} for i in self.inputs]
        return d


def _domain_h(data: dict) -> float:
    h = (data.get("metadata") or {}).get("h")
    if h:
        return float(h)
    dom = ConvexPolyDomain.from_dict(data, validate=False)
    return float(dom.edge_lengths.max())


def load_spec(path: str) -> CorpusSpec:
    with open(path) as fh:
        data = json.load(fh)
    return CorpusSpec.from_dict(data, base_dir=os.path.dirname(os.path.abspath(path)))


# ---------------------------------------------------------------------------
# Discretisation allowance


def calibration_lengths(kappa: float, lam: float) -> list[float]:
    dom = rho_domain(kappa, lam)
    if dom.bounded:
        return [dom.upper * f for f in (0.25, 0.5, 0.75)]
    k = math.sqrt(-kappa)
    return [x / k for x in (2.0, 5.0, 10.0)]


def calibrate_eps(kappa: float, lam: float, h: float, tolerances: dict | None = None) -> dict:
    """Fit err <= C h on lunes sampled at h, 2h, 4h; eps_h = safety * C * h."""
    tol = dict(DEFAULT_TOLERANCES, **(tolerances or {}))
    samples = []
    C = 0.0
    for L in calibration_lengths(kappa, lam):
        lune = build_lune(kappa, lam, L)
        for step in (h, 2 * h, 4 * h):
            D = ConvexPolyDomain.from_points(kappa, lune.boundary_points(step), lam=lam)
            r, _ = inradius(D)
            err = abs(r - rho(kappa, lam, D.perimeter))
            samples.append({"L": L, "h": step, "error": err})
            C = max(C, err / step)
    eps = max(tol["eps_safety"] * C * h, tol["eps_floor"])
    return {"kappa": kappa, "lambda": lam, "C": C, "eps_h": eps, "samples": samples}


# ---------------------------------------------------------------------------
# Distance to the nearest lune


def _hausdorff(sp, A, B) -> float:
    d = sp.dist(A[:, None, :], B[None, :, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def hausdorff_to_lune(D: ConvexPolyDomain, lam: float, *, n: int = 200, refine_below: float = 0.3, center=None, incenter=None) -> float:
    """Hausdorff distance from D to the equal-perimeter lune, minimised over placements.

    The lune is placed two ways (centre on the circumcentre with a corner
    toward the farthest vertex; centre on the incentre with the arc midpoint
    toward the nearest vertex) and, if the better placement is within
    ``refine_below``, polished by Nelder-Mead over position and rotation.
    The value is an upper bound on the best-fit distance.
    """
    sp = D.space
    L = D.perimeter
    dom = rho_domain(D.kappa, lam)
    if dom.bounded and L >= dom.upper:
        return math.inf
    lune = build_lune(D.kappa, lam, L)
    base = lune.boundary_points(L / n)
    stride = max(1, D.n // n)
    A = D.boundary[::stride]
    o = sp.origin()
    e1 = np.array([1.0, 0.0, 0.0])
    if center is None:
        _, center = circumradius(D)
    if incenter is None:
        _, incenter = inradius(D)

    def placed(p, v):
        iso = sp.isometry(o, e1, p, v)
        return iso(base)

    cands = []
    c = center.coords
    far = D.boundary[int(np.argmax(sp.dist(c[None], D.boundary)))]
    cands.append((c, sp.log_dir(c, far)))
    q = incenter.coords
    near = D.boundary[int(np.argmin(sp.dist(q[None], D.boundary)))]
    cands.append((q, sp.rot90(q, sp.log_dir(q, near))))
    best, best_cand = math.inf, None
    for p, v in cands:
        val = _hausdorff(sp, A, placed(p, v))
        if val < best:
            best, best_cand = val, (p, v)
    if best > refine_below:
        return best
    p0, v0 = best_cand
    b1, b2 = sp.tangent_basis(p0)
    th0 = math.atan2(float(sp.inner(v0, b2)), float(sp.inner(v0, b1)))

    def objective(z):
        p = sp.from_chart(np.array(z[:2]), p0)
        f1, f2 = sp.tangent_basis(p)
        # transport the chart frame approximately: angle measured from tangent_basis(p)
        v = math.cos(th0 + z[2]) * f1 + math.sin(th0 + z[2]) * f2
        return _hausdorff(sp, A, placed(p, v))

    res = optimize.minimize(objective, np.zeros(3), method="Nelder-Mead", options={"xatol": 1e-4, "fatol": 1e-5, "maxiter": 200, "initial_simplex": np.array([[0, 0, 0], [0.02, 0, 0], [0, 0.02, 0], [0, 0, 0.05]])})
    return float(min(best, res.fun))


# ---------------------------------------------------------------------------
# Per-domain evaluation


def _f(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def evaluate_domain(
    D: ConvexPolyDomain,
    lam: float,
    *,
    h: float,
    eps_h: float,
    tolerances: dict | None = None,
    rolling: bool = False,
    rolling_samples: int = 64,
    antisymmetry_samples: int = 100,
    is_lune: bool = False,
    conjectures: tuple[str, ...] = ("conjecture_area", "conjecture_circumradius"),
) -> dict:
    """Run every per-domain check and return a flat record."""
    tol = dict(DEFAULT_TOLERANCES, **(tolerances or {}))
    kappa = D.kappa
    row: dict = {
        "kappa": kappa,
        "lambda": lam,
        "n_vertices": D.n,
        "h": h,
        "eps_h": eps_h,
        "is_lune": bool(is_lune),
        "failures": [],
    }
    fails = row["failures"]
    L = D.perimeter
    area = D.area()
    row["L"] = L
    row["area"] = area
    gb = abs(D.swerve() + kappa * area - 2 * math.pi)
    row["gauss_bonnet_residual"] = gb
    if not gb < tol["gauss_bonnet_factor"] * h:
        fails.append("gauss_bonnet")
    lc = is_lambda_convex(D, lam)
    row["lambda_convex"] = lc.ok
    row["lambda_convex_min_excess"] = lc.min_excess
    row["lambda_convex_window"] = list(lc.window)
    if not lc.ok:
        fails.append("is_lambda_convex")
    r, incenter = inradius(D)
    R, circumcenter = circumradius(D)
    row["r"] = r
    row["incenter"] = incenter.coords.tolist()
    row["R"] = R
    row["circumcenter"] = circumcenter.coords.tolist()
    try:
        bound = rho(kappa, lam, L)
    except GeometryError as exc:
        bound = None
        fails.append("rho_domain")
        row["rho_error"] = str(exc)
    row["rho"] = bound
    row["slack"] = None if bound is None else r - bound
    row["hausdorff_to_lune"] = None
    if bound is not None:
        slack = r - bound
        if slack < -eps_h:
            fails.append("theorem1_slack")
        if is_lune:
            if abs(slack) >= tol["lune_equality"]:
                fails.append("lune_equality")
        else:
            # polishing the placement only matters when it could flip the verdict
            refine = slack <= 0
            H = hausdorff_to_lune(D, lam, center=circumcenter, incenter=incenter, refine_below=0.3 if refine else -1.0)
            row["hausdorff_to_lune"] = _f(H)
            row["hausdorff_refined"] = bool(refine)
            if H > tol["hausdorff_threshold"] and not slack > 0:
                fails.append("strict_inequality")

    # symmetrisation machinery
    try:
        ch = balanced_chord(D)
        row["chord_g"] = ch.g_residual
        row["chord_arc_gap"] = abs(ch.arc_lengths[0] - ch.arc_lengths[1])
        row["chord_sigma"] = ch.sigma_p
        if not (ch.g_residual < tol["chord_angle"] and row["chord_arc_gap"] < tol["arc_balance"]):
            fails.append("balanced_chord")
        m_dist = float(D.space.dist(ch.m[None], D.boundary).min())
        row["chord_m_min_vertex_distance"] = m_dist
        if bound is not None and m_dist < bound - eps_h:
            fails.append("chord_midpoint_distance")
        try:
            G = reflect_arc(D, ch)
            rg = is_lambda_convex(G, lam)
            row["reflected_lambda_convex"] = rg.ok
            row["reflected_perimeter"] = G.perimeter
            if not rg.ok:
                fails.append("reflected_lambda_convex")
        except DomainError as exc:
            row["reflected_lambda_convex"] = False
            row["reflect_error"] = str(exc)
            fails.append("reflect_arc")
    except DomainError as exc:
        row["chord_error"] = str(exc)
        fails.append("balanced_chord")
    # offset keeps the samples off the vertices, where edge tangents jump
    sig = (np.arange(antisymmetry_samples) + 0.377) * (L / max(antisymmetry_samples, 1))
    anti = np.abs(chord_gap(D, sig + 0.5 * L) + chord_gap(D, sig))
    row["antisymmetry"] = float(anti.max()) if anti.size else 0.0
    if not row["antisymmetry"] < tol["antisymmetry"]:
        fails.append("antisymmetry")
    if rolling:
        rc = rolling_check(D, lam, rolling_samples, tol=tol["rolling_factor"] * h)
        row["rolling_max_violation"] = rc.max_violation
        if not rc.ok:
            fails.append("rolling")
    else:
        row["rolling_max_violation"] = None

    # exploratory
    row["conjecture_area"] = None
    row["conjecture_circumradius"] = None
    if "conjecture_area" in conjectures:
        La = lune_length_for_area(kappa, lam, area)
        if La is None or (bound is None):
            row["conjecture_area"] = {"status": "not_applicable"}
        else:
            ra = rho(kappa, lam, La)
            row["conjecture_area"] = {
                "status": "violation" if r < ra - eps_h else "ok",
                "lune_length": La,
                "lune_inradius": ra,
                "margin": r - ra,
            }
    if "conjecture_circumradius" in conjectures:
        dom = rho_domain(kappa, lam)
        if bound is None or (dom.bounded and L >= dom.upper):
            row["conjecture_circumradius"] = {"status": "not_applicable"}
        else:
            Rl = build_lune(kappa, lam, L).circumradius()
            row["conjecture_circumradius"] = {
                "status": "violation" if R > Rl + eps_h else "ok",
                "lune_circumradius": Rl,
                "margin": Rl - R,
            }
    row["passed"] = not fails
    return row


def _cell_task(args) -> dict:
    spec_d, cell_index, index, eps_h, conj = args
    kappa, lam = spec_d["cells"][cell_index]["kappa"], spec_d["cells"][cell_index]["lambda"]
    ss = np.random.SeedSequence([int(spec_d["seed"]), int(cell_index), int(index)])
    rng = np.random.default_rng(ss)
    lo, hi = spec_d["n_supports_range"]
    n_sup = 2 if rng.random() < spec_d["lune_fraction"] else int(rng.integers(lo, hi + 1))
    gen_seed = int(ss.generate_state(1, dtype=np.uint32)[0])
    base = {"cell": cell_index, "index": index, "seed": gen_seed, "master_seed": spec_d["seed"], "n_supports": n_sup}
    t0 = time.perf_counter()
    try:
        D = generate_lambda_convex(kappa, lam, gen_seed, n_sup, spec_d["h"])
    except (GenerationError, GeometryError) as exc:
        row = {"kappa": kappa, "lambda": lam, "error": str(exc), "failures": ["generation"], "passed": False}
        row.update(base)
        return row
    row = evaluate_domain(
        D,
        lam,
        h=spec_d["h"],
        eps_h=eps_h,
        tolerances=spec_d["tolerances"],
        rolling=index < spec_d["rolling_domains"],
        rolling_samples=spec_d["rolling_samples"],
        antisymmetry_samples=spec_d["antisymmetry_samples"],
        is_lune=n_sup == 2,
        conjectures=conj,
    )
    row.update(base)
    row["attempt"] = D.metadata.get("attempt")
    row["runtime"] = time.perf_counter() - t0
    return row


def _input_task(args) -> dict:
    data, index, spec_d, conj = args
    base = {"cell": None, "index": index, "source": "input", "metadata": data.get("metadata") or {}}
    try:
        D = ConvexPolyDomain.from_dict(data)
        lam = data.get("lambda")
        if lam is None:
            raise DomainError("input domain has no lambda")
        h = float(D.metadata.get("h") or D.edge_lengths.max())
        cal = calibrate_eps(D.kappa, float(lam), h, spec_d["tolerances"])
        is_lune = D.metadata.get("generator") == "lune" or D.metadata.get("n_supports") == 2
        t0 = time.perf_counter()
        row = evaluate_domain(
            D, float(lam), h=h, eps_h=cal["eps_h"], tolerances=spec_d["tolerances"], rolling=True,
            rolling_samples=spec_d["rolling_samples"], antisymmetry_samples=spec_d["antisymmetry_samples"],
            is_lune=is_lune, conjectures=conj,
        )
        row["runtime"] = time.perf_counter() - t0
    except (GeometryError, KeyError, TypeError) as exc:
        row = {"kappa": data.get("kappa"), "lambda": data.get("lambda"), "error": str(exc), "failures": ["invalid_input"], "passed": False}
    row.update(base)
    return row


def thread_cap(requested: int | None = None) -> int:
    cap = os.cpu_count() or 1
    env = os.environ.get("LUNEKIT_THREADS")
    if env:
        try:
            cap = max(1, min(cap, int(env)))
        except ValueError:
            pass
    if requested:
        cap = max(1, min(cap, int(requested)))
    return cap


def _map(fn, tasks, threads: int):
    if threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * threads))))


# ---------------------------------------------------------------------------
# Theorem-level runs


def run_theorem1(spec: CorpusSpec, *, threads: int | None = None, calibration: dict | None = None) -> dict:
    """Generated corpus plus any input domains; one row per domain."""
    threads = thread_cap(threads)
    spec_d = spec.to_dict()
    spec_d["cells"] = [{"kappa": k, "lambda": l} for k, l in spec.cells]
    spec_d["tolerances"] = spec.tolerances
    conj = tuple(c for c in spec.checks if c.startswith("conjecture"))
    if calibration is None:
        calibration = {i: calibrate_eps(k, l, spec.h, spec.tolerances) for i, (k, l) in enumerate(spec.cells)} if spec.n_domains else {}
    tasks = [(spec_d, c, i, calibration[c]["eps_h"], conj) for c in range(len(spec.cells)) for i in range(spec.n_domains)]
    rows = _map(_cell_task, tasks, threads)
    rows += [_input_task((data, i, spec_d, conj)) for i, data in enumerate(spec.inputs)]
    summary = []
    for c, (k, l) in enumerate(spec.cells):
        cell_rows = [r for r in rows if r.get("cell") == c]
        summary.append(_summarise(c, k, l, cell_rows, calibration.get(c)))
    failures = [
        {"cell": r.get("cell"), "index": r.get("index"), "seed": r.get("seed"), "n_supports": r.get("n_supports"), "checks": r["failures"]}
        for r in rows
        if not r["passed"]
    ]
    return {
        "calibration": [calibration[c] for c in sorted(calibration)],
        "rows": rows,
        "summary": summary,
        "failures": failures,
        "passed": not failures,
    }


def _summarise(c, k, l, rows, cal) -> dict:
    ok_rows = [r for r in rows if r.get("slack") is not None]
    lune_rows = [r for r in ok_rows if r.get("is_lune")]
    strict = [r for r in ok_rows if not r.get("is_lune") and (r.get("hausdorff_to_lune") or 0) > DEFAULT_TOLERANCES["hausdorff_threshold"]]
    conj = {}
    for name in ("conjecture_area", "conjecture_circumradius"):
        stats = [r[name]["status"] for r in rows if r.get(name)]
        conj[name] = {s: stats.count(s) for s in ("ok", "violation", "not_applicable")}
    return {
        "cell": c,
        "kappa": k,
        "lambda": l,
        "kind": classify(k, l).value,
        "n_domains": len(rows),
        "n_failed": sum(not r["passed"] for r in rows),
        "eps_h": None if cal is None else cal["eps_h"],
        "min_slack": min((r["slack"] for r in ok_rows), default=None),
        "max_abs_lune_slack": max((abs(r["slack"]) for r in lune_rows), default=None),
        "n_lunes": len(lune_rows),
        "n_strict": len(strict),
        "min_strict_slack": min((r["slack"] for r in strict), default=None),
        "max_gauss_bonnet_residual": max((r["gauss_bonnet_residual"] for r in ok_rows), default=None),
        "max_chord_g": max((r.get("chord_g", 0.0) for r in ok_rows), default=None),
        "max_antisymmetry": max((r.get("antisymmetry", 0.0) for r in ok_rows), default=None),
        "max_rolling_violation": max((r["rolling_max_violation"] for r in ok_rows if r.get("rolling_max_violation") is not None), default=None),
        "conjectures": conj,
    }


def theorem2_grid(cells=DEFAULT_CELLS, n_lengths: int = 10) -> list[tuple[float, float, float]]:
    out = []
    for k, l in cells:
        dom = rho_domain(k, l)
        top = dom.upper if dom.bounded else 12.0 / math.sqrt(-k)
        out += [(k, l, top * (j + 0.5) / n_lengths) for j in range(n_lengths)]
    return out


def run_theorem2_formulas(grid=None, *, tol: float = 1e-6) -> dict:
    """Closed form against the constructed lune on every (kappa, lambda, L)."""
    grid = theorem2_grid() if grid is None else grid
    rows = []
    for k, l, L in grid:
        closed = rho(k, l, L)
        oracle = lune_inradius_numeric(build_lune(k, l, L))
        rows.append({"kappa": k, "lambda": l, "L": L, "branch": branch(k, l).value, "rho": closed, "oracle": oracle, "abs_diff": abs(closed - oracle)})
    bad = sorted({r["branch"] for r in rows if not r["abs_diff"] < tol})
    return {
        "rows": rows,
        "max_abs_diff": max((r["abs_diff"] for r in rows), default=0.0),
        "tolerance": tol,
        "failed_branches": bad,
        "passed": not bad,
    }


def run_remark1(k_list=(1.0,), L_list=(1.0, 4.0, 10.0), eps=(1e-1, 1e-2, 1e-3, 1e-4), *, threshold: float = 1e-6) -> dict:
    reports = [phase_transition_check(k, L, eps, threshold=threshold).to_dict() for k in k_list for L in L_list]
    offending = [{"k": r["k"], "L": r["L"], "limits": r["offending"]} for r in reports if r["offending"]]
    return {
        "reports": reports,
        "continuous": all(r["continuous"] for r in reports),
        "all_below_threshold": all(r["final_below_threshold"] for r in reports),
        "offending": offending,
        "passed": all(r["continuous"] for r in reports),
    }


def _conjecture_summary(rows, name) -> dict:
    out = {"ok": 0, "violation": 0, "not_applicable": 0, "violations": []}
    for r in rows:
        rec = r.get(name)
        if not rec:
            continue
        out[rec["status"]] += 1
        if rec["status"] == "violation":
            out["violations"].append({"cell": r.get("cell"), "index": r.get("index"), "seed": r.get("seed"), "margin": rec.get("margin")})
    return out


def run_conjecture_area(rows) -> dict:
    return _conjecture_summary(rows, "conjecture_area")


def run_conjecture_circumradius(rows) -> dict:
    return _conjecture_summary(rows, "conjecture_circumradius")


def run_corpus(spec: CorpusSpec, *, threads: int | None = None, timing: bool = False) -> dict:
    """Full report. Theorem-level sections gate ``passed``; conjectures never do."""
    t_start = time.perf_counter()
    report: dict = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "tool": "lunekit",
        "version": __version__,
        "provenance": {"seed": spec.seed, "h": spec.h, "spec": spec.to_dict()},
    }
    timings = {}
    gating = []
    if "theorem1" in spec.checks:
        t0 = time.perf_counter()
        t1 = run_theorem1(spec, threads=threads)
        timings["theorem1"] = time.perf_counter() - t0
        if not timing:
            for r in t1["rows"]:
                r.pop("runtime", None)
        report["calibration"] = t1.pop("calibration")
        report["theorem1"] = t1
        gating.append(t1["passed"])
        rows = t1["rows"]
    else:
        rows = []
    if "theorem2" in spec.checks:
        t0 = time.perf_counter()
        cells = spec.cells or DEFAULT_CELLS
        report["theorem2"] = run_theorem2_formulas(theorem2_grid(cells, spec.theorem2_lengths), tol=spec.tolerances["theorem2"])
        timings["theorem2"] = time.perf_counter() - t0
        gating.append(report["theorem2"]["passed"])
    if "remark1" in spec.checks:
        t0 = time.perf_counter()
        rk = spec.remark1
        report["remark1"] = run_remark1(rk["k"], rk["L"], rk["eps"], threshold=spec.tolerances["remark1"])
        timings["remark1"] = time.perf_counter() - t0
        gating.append(report["remark1"]["passed"])
    report["conjectures"] = {}
    if "conjecture_area" in spec.checks:
        report["conjectures"]["area"] = run_conjecture_area(rows)
    if "conjecture_circumradius" in spec.checks:
        report["conjectures"]["circumradius"] = run_conjecture_circumradius(rows)
    report["passed"] = all(gating)
    if timing:
        timings["total"] = time.perf_counter() - t_start
        timings["threads"] = thread_cap(threads)
        report["runtimes"] = timings
    return report


# ---------------------------------------------------------------------------
# Serialisation

CSV_FIELDS = (
    "cell", "index", "seed", "n_supports", "kappa", "lambda", "n_vertices", "h", "eps_h", "is_lune",
    "L", "area", "r", "rho", "slack", "R", "hausdorff_to_lune", "gauss_bonnet_residual",
    "lambda_convex", "lambda_convex_min_excess", "chord_g", "chord_arc_gap", "antisymmetry",
    "chord_m_min_vertex_distance", "reflected_lambda_convex", "rolling_max_violation",
    "conjecture_area", "conjecture_circumradius", "passed", "failures",
)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def report_json(report: dict) -> str:
    return json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"


def report_csv(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in (report.get("theorem1") or {}).get("rows", []):
        flat = {}
        for k in CSV_FIELDS:
            v = row.get(k)
            if k.startswith("conjecture") and isinstance(v, dict):
                v = v["status"]
            elif k == "failures":
                v = ";".join(v or [])
            elif isinstance(v, float):
                v = repr(v)
            flat[k] = "" if v is None else v
        writer.writerow(flat)
    return buf.getvalue()

"""Command-line interface.

Exit codes: 0 success, 2 invalid input or out-of-domain parameters,
3 file I/O error, 4 domain generation failed, 5 a theorem-level check failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from .domains import ConvexPolyDomain, GenerationError, generate_lambda_convex
from .kernel import GeometryError
from .lune import branch, build_lune, rho, rho_domain
from .render import domain_scene, lune_scene

EXIT_DOMAIN = 2
EXIT_IO = 3
EXIT_GENERATION = 4
EXIT_THEOREM = 5

log = logging.getLogger("lunekit")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _write(path: str, text: str) -> None:
    try:
        parent = os.path.dirname(os.path.abspath(path))
        os.makedirs(parent, exist_ok=True)
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO) from exc


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"{path} is not valid JSON: {exc}", EXIT_DOMAIN) from exc


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------


def cmd_rho(args) -> int:
    dom = rho_domain(args.kappa, args.lam)
    if not dom.contains(args.length):
        raise CliError(f"L = {args.length} is outside {dom.describe()}", EXIT_DOMAIN)
    value = rho(args.kappa, args.lam, args.length)
    name = branch(args.kappa, args.lam).value
    if args.json:
        record = {
            "schema_version": 1,
            "kappa": args.kappa,
            "lambda": args.lam,
            "L": args.length,
            "rho": value,
            "branch": name,
            "interval": [0.0, dom.upper if dom.bounded else None],
        }
        sys.stdout.write(_dump(record))
    else:
        print(f"{value:.12g}  branch {name}")
    return 0


def cmd_lune(args) -> int:
    lune = build_lune(args.kappa, args.lam, args.length)
    pts = lune.boundary_points(args.h)
    meta = {"generator": "lune", "h": args.h, "L": args.length, "n_supports": 2}
    D = ConvexPolyDomain.from_points(args.kappa, pts, lam=args.lam, metadata=meta)
    _write(args.out, _dump(D.to_dict()))
    if args.svg:
        _write(args.svg, lune_scene(lune, h=min(args.h * 10, 1e-2)).to_svg())
    return 0


def cmd_gen(args) -> int:
    if args.count < 0:
        raise CliError("--count must be non-negative", EXIT_DOMAIN)
    if args.n_supports < 2:
        raise CliError("--n-supports must be at least 2", EXIT_DOMAIN)
    try:
        os.makedirs(args.out, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create {args.out}: {exc}", EXIT_IO) from exc
    for i in range(args.count):
        sub = int(np.random.SeedSequence([args.seed, i]).generate_state(1, dtype=np.uint32)[0])
        try:
            D = generate_lambda_convex(args.kappa, args.lam, sub, args.n_supports, args.h)
        except GenerationError as exc:
            raise CliError(str(exc), EXIT_GENERATION) from exc
        _write(os.path.join(args.out, f"domain_{i:04d}.json"), _dump(D.to_dict()))
    return 0


def cmd_verify(args) -> int:
    from .verify import CorpusSpec, SpecError, report_csv, report_json, run_corpus

    data = _read_json(args.spec)
    try:
        spec = CorpusSpec.from_dict(data, base_dir=os.path.dirname(os.path.abspath(args.spec)))
    except OSError as exc:
        raise CliError(f"cannot read spec input: {exc}", EXIT_IO) from exc
    except (SpecError, KeyError, TypeError, ValueError) as exc:
        raise CliError(f"invalid spec: {exc}", EXIT_DOMAIN) from exc
    report = run_corpus(spec, threads=args.threads, timing=args.timing)
    _write(args.report, report_json(report))
    if args.csv:
        _write(args.csv, report_csv(report))
    if args.figures:
        from .plotting import write_report_figures

        try:
            write_report_figures(report, args.figures)
        except OSError as exc:
            raise CliError(f"cannot write figures: {exc}", EXIT_IO) from exc
    for name in ("area", "circumradius"):
        c = report.get("conjectures", {}).get(name)
        if c and c["violation"]:
            log.warning("conjecture (%s): %d violation(s) recorded in the report", name, c["violation"])
    if not report["passed"]:
        failed = [r for r in (report.get("theorem1") or {}).get("failures", [])]
        log.error("theorem-level checks failed (%d domain rows)", len(failed))
        return EXIT_THEOREM
    return 0


def cmd_render(args) -> int:
    data = _read_json(args.input)
    D = ConvexPolyDomain.from_dict(data)
    scene = domain_scene(D, args.annotate, projection=args.projection)
    _write(args.svg, scene.to_svg())
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lunekit", description="Lunes, lambda-convex domains and inradius bounds in M^2(kappa).")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def geometry(sp, length=True):
        sp.add_argument("--kappa", type=float, required=True, help="curvature")
        sp.add_argument("--lambda", dest="lam", type=float, required=True, help="geodesic curvature bound lambda > 0")
        if length:
            sp.add_argument("--length", type=float, required=True, help="boundary length L")

    s = sub.add_parser("rho", help="evaluate the lune inradius rho_lambda(L)")
    geometry(s)
    s.add_argument("--json", action="store_true", help="print a JSON record")
    s.set_defaults(func=cmd_rho)

    s = sub.add_parser("lune", help="construct a lune and write it as a domain file")
    geometry(s)
    s.add_argument("--out", required=True, help="domain JSON path")
    s.add_argument("--svg", help="optional SVG picture")
    s.add_argument("--h", type=float, default=1e-3, help="boundary sampling step")
    s.set_defaults(func=cmd_lune)

    s = sub.add_parser("gen", help="generate random lambda-convex domains")
    geometry(s, length=False)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--n-supports", type=int, default=4)
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--h", type=float, default=1e-3)
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("verify", help="run a verification corpus")
    s.add_argument("--spec", required=True, help="corpus spec JSON, or a single domain JSON")
    s.add_argument("--report", required=True, help="JSON report path")
    s.add_argument("--csv", help="flat CSV, one row per domain")
    s.add_argument("--figures", help="directory for matplotlib summary figures")
    s.add_argument("--threads", type=int, help="worker processes (capped by LUNEKIT_THREADS)")
    s.add_argument("--timing", action="store_true", help="include wall-clock runtimes in the report")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("render", help="draw a domain as SVG")
    s.add_argument("--in", dest="input", required=True, help="domain JSON")
    s.add_argument("--svg", required=True)
    s.add_argument("--annotate", choices=("inradius", "circumradius", "chord"))
    s.add_argument("--projection", choices=("plane", "poincare", "orthographic"))
    s.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"lunekit: {exc}", file=sys.stderr)
        return exc.code
    except GeometryError as exc:
        print(f"lunekit: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"lunekit: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

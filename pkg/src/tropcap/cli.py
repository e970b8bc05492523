"""Command-line experiment driver.

Each subcommand runs one experiment, writes a canonical JSON (or CSV)
report plus a run manifest, and optionally renders figures next to the
report.  Identical config and seed produce byte-identical report
files; timing lives only in the manifest.  Exit codes: 0 success, 1
usage or contract error, 2 budget refusal, 3 property failure, 4
numeric failure.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import pathlib
import sys
import time

import numpy as np

from . import __version__, generators
from .arrangement import (
    Arrangement,
    N_MAX_DEFAULT,
    count_regions,
    is_general_position,
    sampling_region_census,
    zaslavsky_phi,
)
from .capacity import (
    CENSUS_SAMPLES_DEFAULT,
    ExpertSpec,
    MoESpec,
    anchored_top1_moe,
    bound_table,
    count_topk_regions,
    expert_zonotope,
    scaling_probe,
    zonotope_vertex_count,
)
from .errors import (
    BudgetExceeded,
    ContractViolation,
    NumericalError,
    PropertyFailure,
    TropcapError,
)
from .manifold import (
    EFFECTIVE_SAMPLES_DEFAULT,
    ManifoldSpec,
    effective_census,
    resilience_experiment,
    segment_walk_census,
)
from .routing import RouterSpec, enumerate_routing_cells, route_top_k, verify_redundancy
from .serialize import (
    canonical_json,
    config_hash,
    report_to_csv,
    spec_from_json,
    spec_to_json,
    to_jsonable,
)
from .tropical import COALITION_BUDGET

COMMANDS = (
    "count-regions",
    "enumerate-cells",
    "bounds",
    "verify-redundancy",
    "zonotope",
    "scaling",
    "effective-capacity",
    "resilience",
    "verify-all",
    "generate",
)

_FIXTURE_DIR = pathlib.Path(__file__).parent / "fixtures"


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as structured errors."""

    def error(self, message):
        _emit_error("UsageError", message)
        raise SystemExit(1)


def _emit_error(kind: str, message: str, **details) -> None:
    doc = {"error": kind, "message": message}
    if details:
        doc["details"] = to_jsonable(details)
    sys.stderr.write(canonical_json(doc))


def _threads_from_env() -> int:
    try:
        return max(1, int(os.environ.get("TROPCAP_THREADS", "1")))
    except ValueError:
        return 1


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="experiment config JSON file")
    p.add_argument("--spec", help="spec JSON file (router/expert/moe/arrangement)")
    p.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    p.add_argument("--out", help="report file path (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads to record; execution is serialized for determinism")
    p.add_argument("--budget-nmax", type=int, default=None,
                   help="largest hyperplane count enumerated exactly")
    p.add_argument("--budget-coalitions", type=int, default=None,
                   help="largest coalition count enumerated")
    p.add_argument("--samples", type=int, default=None, help="census sample budget")
    p.add_argument("--no-figures", action="store_true", help="skip figure rendering")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="tropcap", description=__doc__)
    ap.add_argument("--version", action="version", version=f"tropcap {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count-regions", parents=[], help="exact and census region counts")
    _add_common(p)
    p.add_argument("--manifold", help="manifold spec JSON file to restrict the census to")

    p = sub.add_parser("enumerate-cells", help="feasible Top-k routing cells")
    _add_common(p)

    p = sub.add_parser("bounds", help="closed-form capacity table")
    _add_common(p)
    p.add_argument("--N", type=int, default=8)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--H", type=int, default=8)
    p.add_argument("--d", type=int, default=2)

    p = sub.add_parser("verify-redundancy", help="certify swap inequalities imply the rest")
    _add_common(p)

    p = sub.add_parser("zonotope", help="zonotope vertex count, enumerated vs closed form")
    _add_common(p)

    p = sub.add_parser("scaling", help="count scaling along one architecture axis")
    _add_common(p)
    p.add_argument("--mode", choices=("dense-width", "top1-experts", "topk-coalitions"),
                   default="dense-width")
    p.add_argument("--values", type=int, nargs="+", default=[4, 8, 16, 32])
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--H", type=int, default=3)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--N", type=int, default=4)
    p.add_argument("--n-seeds", type=int, default=5)
    p.add_argument("--family", choices=("gaussian", "anchored"), default="gaussian")

    p = sub.add_parser("effective-capacity", help="pattern census on a manifold")
    _add_common(p)
    p.add_argument("--manifold", required=True, help="manifold spec JSON file")

    p = sub.add_parser("resilience", help="dense vs MoE effective capacity")
    _add_common(p)
    p.add_argument("--manifold", required=True, help="manifold spec JSON file")
    p.add_argument("--N", type=int, default=4)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--H", type=int, default=4)
    p.add_argument("--n-seeds", type=int, default=20)

    p = sub.add_parser("verify-all", help="run the bundled verification battery")
    _add_common(p)

    p = sub.add_parser("generate", help="write a reproducible spec file")
    _add_common(p)
    p.add_argument("kind", choices=("dense", "top1", "topk", "lower-bound-construction"))
    p.add_argument("--N", type=int, default=4)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--H", type=int, default=3)
    p.add_argument("--d", type=int, default=2)
    return ap


# ---------------------------------------------------------------------------
# Config handling


def _load_config(args) -> dict:
    cfg: dict = {}
    if args.config:
        path = pathlib.Path(args.config)
        if not path.exists():
            raise ContractViolation(f"config file not found: {path}")
        cfg = json.loads(path.read_text())
        if "command" in cfg and cfg["command"] != args.command:
            raise ContractViolation(
                f"config names command {cfg['command']!r} but {args.command!r} was invoked"
            )
    budgets = cfg.get("budgets", {})
    for name, value in budgets.items():
        if not (isinstance(value, int) and value > 0):
            raise ContractViolation(f"budget {name!r} must be a positive integer")
    merged = {
        "command": args.command,
        "seed": args.seed if args.seed is not None else cfg.get("seed", 0),
        "n_max": args.budget_nmax or budgets.get("n_max", N_MAX_DEFAULT),
        "coalitions": args.budget_coalitions or budgets.get("coalitions", COALITION_BUDGET),
        "samples": args.samples or budgets.get("samples", None),
        "out": args.out or cfg.get("output", {}).get("path"),
        "format": args.format or cfg.get("output", {}).get("format", "json"),
        "threads": args.threads or _threads_from_env(),
        "spec": cfg.get("spec"),
        "figures": not args.no_figures,
    }
    if args.spec:
        merged["spec"] = {"file": args.spec}
    return merged


def _resolve_spec(cfg: dict):
    doc = cfg.get("spec")
    if doc is None:
        return None
    if isinstance(doc, dict) and "file" in doc:
        path = pathlib.Path(doc["file"])
        if not path.exists():
            raise ContractViolation(f"spec file not found: {path}")
        doc = json.loads(path.read_text())
    return spec_from_json(doc)


def _load_manifold(path_str: str) -> ManifoldSpec:
    path = pathlib.Path(path_str)
    if not path.exists():
        raise ContractViolation(f"manifold file not found: {path}")
    m = spec_from_json(json.loads(path.read_text()))
    if not isinstance(m, ManifoldSpec):
        raise ContractViolation("manifold file does not contain a manifold spec")
    return m


# ---------------------------------------------------------------------------
# Command implementations: each returns (report dict, figure jobs)

_DEFAULT_FIXTURE = str(_FIXTURE_DIR / "five_lines_d2.json")


def _spec_or_fixture(cfg):
    spec = _resolve_spec(cfg)
    if spec is None:
        spec = spec_from_json(json.loads(pathlib.Path(_DEFAULT_FIXTURE).read_text()))
    return spec


def _cmd_count_regions(cfg, args):
    spec = _spec_or_fixture(cfg)
    samples = cfg["samples"] or CENSUS_SAMPLES_DEFAULT
    if isinstance(spec, MoESpec):
        if args and getattr(args, "manifold", None):
            raise ContractViolation(
                "count-regions --manifold applies to dense specs; "
                "use effective-capacity for a mixture on a manifold"
            )
        rep = count_topk_regions(
            spec,
            n_max=cfg["n_max"],
            census_samples=samples,
            seed=cfg["seed"],
            coalition_budget=cfg["coalitions"],
        )
        report = {"command": "count-regions", "seed": cfg["seed"]}
        report.update(to_jsonable(rep))
        figs = []
        if spec.dim == 2:
            figs.append(
                ("cells", lambda path: _plot().plot_routing_cells_2d(spec.router, path))
            )
        return report, figs
    if isinstance(spec, ExpertSpec):
        arr = Arrangement(spec.weights, spec.biases)
    elif isinstance(spec, Arrangement):
        arr = spec
    else:
        raise ContractViolation(
            "count-regions needs an arrangement, dense expert, or moe spec"
        )
    n, d = arr.normals.shape
    gp, reason = is_general_position(arr)
    report = {
        "command": "count-regions",
        "dimension": d,
        "n_hyperplanes": n,
        "phi_bound": zaslavsky_phi(n, d),
        "general_position": gp,
        "gp_reason": reason,
        "seed": cfg["seed"],
    }
    warnings = []
    if n <= cfg["n_max"]:
        report["exact_count"] = count_regions(arr, n_max=cfg["n_max"])
    else:
        report["exact_count"] = None
        warnings.append(f"BUDGET: n={n} exceeds n_max={cfg['n_max']}; census only")
    if args and getattr(args, "manifold", None):
        m = _load_manifold(args.manifold)
        from .manifold import sample_manifold

        pts = sample_manifold(m, samples, cfg["seed"])
        census = sampling_region_census(arr, points=pts, seed=cfg["seed"])
        report["manifold_kind"] = m.kind
    else:
        census = sampling_region_census(arr, n_samples=samples, seed=cfg["seed"])
    report["census_count"] = census.count
    report["census_samples"] = samples
    report["warnings"] = warnings
    figs = []
    if d == 2:
        figs.append(("arrangement", lambda path: _plot().plot_arrangement_2d(arr.normals, arr.offsets, path)))
    return report, figs


def _cmd_enumerate_cells(cfg, args):
    spec = _resolve_spec(cfg)
    if isinstance(spec, MoESpec):
        router = spec.router
    elif isinstance(spec, RouterSpec):
        router = spec
    else:
        raise ContractViolation("enumerate-cells needs a router or moe spec")
    cells = enumerate_routing_cells(router, budget=cfg["coalitions"])
    rows = [
        {
            "coalition": list(c.coalition),
            "n_constraints": int(c.normals.shape[0]),
            "witness": None if c.feasibility.witness is None else list(c.feasibility.witness),
            "slack": c.feasibility.slack,
        }
        for c in cells
    ]
    report = {
        "command": "enumerate-cells",
        "N": router.n_experts,
        "k": router.k,
        "dimension": router.dim,
        "n_possible": math.comb(router.n_experts, router.k),
        "n_feasible": len(cells),
        "cells": rows,
        "seed": cfg["seed"],
    }
    figs = []
    if router.dim == 2:
        figs.append(("cells", lambda path: _plot().plot_routing_cells_2d(router, path)))
    return report, figs


def _cmd_bounds(cfg, args):
    spec = _resolve_spec(cfg)
    if isinstance(spec, MoESpec):
        N, k, H, d = spec.n_experts, spec.k, spec.width, spec.dim
    else:
        N, k, H, d = args.N, args.k, args.H, args.d
    table = bound_table(H, d, N, k)
    report = {"command": "bounds", "N": N, "k": k, "H": H, "d": d, "rows": table}
    return report, []


def _cmd_verify_redundancy(cfg, args):
    spec = _resolve_spec(cfg)
    if isinstance(spec, MoESpec):
        router = spec.router
    elif isinstance(spec, RouterSpec):
        router = spec
    else:
        router = generators.gaussian_router(4, 2, 4, cfg["seed"])
    rep = verify_redundancy(router)
    report = {
        "command": "verify-redundancy",
        "N": rep.n_experts,
        "k": rep.k,
        "n_cells": rep.n_cells,
        "n_pairs": rep.n_pairs,
        "max_excess": rep.max_excess,
        "violations": rep.violations,
        "passed": rep.passed,
        "seed": cfg["seed"],
    }
    return report, []


def _cmd_zonotope(cfg, args):
    spec = _resolve_spec(cfg)
    if isinstance(spec, ExpertSpec):
        z = expert_zonotope(spec)
        G = z.generators
    elif spec is None:
        dense = generators.gaussian_dense(5, 2, cfg["seed"])
        z = expert_zonotope(dense)
        G = z.generators
    else:
        raise ContractViolation("zonotope needs a dense expert spec")
    rep = zonotope_vertex_count(z, n_max=cfg["n_max"])
    report = {
        "command": "zonotope",
        "n_generators": rep.n_generators,
        "dim": rep.dim,
        "enumerated_regions": rep.enumerated_regions,
        "enumerated_vertices": rep.enumerated_vertices,
        "formula": rep.formula,
        "formula_untruncated": rep.formula_untruncated,
        "matches_formula": rep.matches_formula,
        "note": rep.note,
        "seed": cfg["seed"],
    }
    figs = []
    if rep.dim == 2 and rep.n_generators <= 12:
        figs.append(("zonotope", lambda path: _plot().plot_zonotope_2d(G, path)))
    return report, figs


def _cmd_scaling(cfg, args):
    rep = scaling_probe(
        args.mode,
        list(args.values),
        d=args.d,
        H=args.H,
        k=args.k,
        N=args.N,
        n_seeds=args.n_seeds,
        seed=cfg["seed"],
        n_max=cfg["n_max"],
        census_samples=cfg["samples"] or CENSUS_SAMPLES_DEFAULT,
        family=args.family,
    )
    logx = np.log(np.array([m["x"] for m in rep.medians]))
    logy = np.log(np.array([m["median"] for m in rep.medians]))
    residuals = (logy - (rep.slope * logx + rep.intercept)).tolist()
    report = {
        "command": "scaling",
        "mode": rep.mode,
        "family": rep.family,
        "rows": rep.rows,
        "medians": rep.medians,
        "slope": rep.slope,
        "intercept": rep.intercept,
        "ratios": rep.ratios,
        "residuals": residuals,
        "seed": cfg["seed"],
    }
    return report, [("scaling", lambda path: _plot().plot_scaling(rep, path))]


def _cmd_effective_capacity(cfg, args):
    m = _load_manifold(args.manifold)
    spec = _resolve_spec(cfg)
    if spec is None:
        spec = generators.gaussian_moe(4, 2, 3, m.dim, cfg["seed"])
    spec_dim = spec.dim if hasattr(spec, "dim") else spec.weights.shape[1]
    if spec_dim != m.dim:
        raise ContractViolation(
            f"spec expects inputs in R^{spec_dim} but the manifold lives in R^{m.dim}"
        )
    n = cfg["samples"] or EFFECTIVE_SAMPLES_DEFAULT
    rep = effective_census(spec, m, n, cfg["seed"])
    report = {"command": "effective-capacity", "manifold_kind": m.kind}
    report.update(to_jsonable(rep))
    return report, [("effective", lambda path: _plot().plot_effective(rep, path))]


def _cmd_resilience(cfg, args):
    m = _load_manifold(args.manifold)
    n = cfg["samples"] or 100_000
    rep = resilience_experiment(
        args.N, args.k, args.H, m.dim, m, range(args.n_seeds), n_samples=n
    )
    report = {"command": "resilience"}
    report.update(to_jsonable(rep))
    report["seed"] = cfg["seed"]
    return report, [("resilience", lambda path: _plot().plot_resilience(rep, path))]


def _cmd_generate(cfg, args):
    seed = cfg["seed"]
    if args.kind == "dense":
        spec = generators.gaussian_dense(args.H, args.d, seed)
    elif args.kind == "top1":
        spec = generators.gaussian_moe(args.N, 1, args.H, args.d, seed)
    elif args.kind == "topk":
        spec = generators.gaussian_moe(args.N, args.k, args.H, args.d, seed)
    else:
        if args.d < args.N:
            raise BudgetExceeded(
                f"identity construction needs d_in >= N (got d_in={args.d}, N={args.N}); "
                "raise --d or lower --N",
                size=args.N,
                budget=args.d,
            )
        spec = generators.identity_lower_bound(args.N, args.k, args.H, args.d, seed)
        cells = enumerate_routing_cells(spec.router, budget=cfg["coalitions"])
        expected = math.comb(args.N, args.k)
        if len(cells) != expected:
            raise PropertyFailure(
                f"identity construction realized {len(cells)} of {expected} cells",
                details={"expected": expected, "found": len(cells)},
            )
    # The report doubles as the spec file: extra provenance keys ride
    # along and the loader dispatches on "type".
    report = {"command": "generate", "kind": args.kind, "seed": seed}
    report.update(spec_to_json(spec))
    return report, []


def _plot():
    from . import plotting

    return plotting


# ---------------------------------------------------------------------------
# verify-all battery


def _check(name, fn):
    t0 = time.perf_counter()
    try:
        detail = fn()
        passed = True
    except AssertionError as e:
        detail = str(e) or "assertion failed"
        passed = False
    except Exception as e:  # a crashed check fails the battery, not the run
        detail = f"{type(e).__name__}: {e}"
        passed = False
    return {
        "name": name,
        "passed": passed,
        "detail": detail if isinstance(detail, (str, int, float)) else to_jsonable(detail),
        "seconds": round(time.perf_counter() - t0, 3),
    }


def _cmd_verify_all(cfg, args):
    seed = cfg["seed"]
    checks = []

    def fixture_count():
        arr = spec_from_json(json.loads(pathlib.Path(_DEFAULT_FIXTURE).read_text()))
        n = count_regions(arr)
        assert n == zaslavsky_phi(5, 2) == 16, f"fixture count {n}"
        return {"count": n}

    checks.append(_check("fixture-five-lines", fixture_count))

    def degenerate():
        W = np.tile(np.array([[1.0, 0.0]]), (4, 1))
        b = np.array([0.0, -1.0, -2.0, -3.0])
        assert count_regions(Arrangement(W, b)) == 5
        Wc = np.array([[1.0, 1.0], [2.0, 2.0], [-1.0, -1.0]])
        bc = np.array([0.5, 1.0, -0.5])
        assert count_regions(Arrangement(Wc, bc)) == 2
        return "parallel 5, coincident 2"

    checks.append(_check("degenerate-counts", degenerate))

    def zaslavsky_random():
        rng = np.random.default_rng(np.random.SeedSequence((seed, 0x5A5)))
        for d in (2, 3):
            for n in (4, 7):
                W, b = rng.normal(size=(n, d)), rng.normal(size=n)
                assert count_regions(Arrangement(W, b)) == zaslavsky_phi(n, d)
        return "4 random generic arrangements match phi"

    checks.append(_check("zaslavsky-random", zaslavsky_random))

    def routing_equiv():
        rng = np.random.default_rng(np.random.SeedSequence((seed, 0x70F)))
        router = generators.gaussian_router(6, 2, 4, seed)
        for _ in range(200):
            x = rng.normal(size=4)
            z = router.logits(x)
            best = max(
                (sum(z[i] for i in c), c)
                for c in itertools.combinations(range(6), 2)
            )[1]
            assert route_top_k(router, x) == best
        return "200 points agree with brute force"

    checks.append(_check("routing-equivalence", routing_equiv))

    def redundancy():
        router = generators.gaussian_router(5, 2, 5, seed)
        rep = verify_redundancy(router)
        assert rep.passed, f"max excess {rep.max_excess}"
        return {"max_excess": rep.max_excess, "n_pairs": rep.n_pairs}

    checks.append(_check("swap-redundancy", redundancy))

    def reachability():
        moe = generators.identity_lower_bound(4, 2, 2, 4, seed)
        cells = enumerate_routing_cells(moe.router)
        assert len(cells) == 6, f"found {len(cells)}"
        return {"cells": len(cells)}

    checks.append(_check("identity-reachability", reachability))

    def slicing():
        moe = generators.gaussian_moe(4, 2, 2, 2, seed)
        rep = count_topk_regions(moe, census_samples=200_000, seed=seed)
        assert rep.exact_count is not None
        assert rep.exact_count <= rep.bound_upper
        assert rep.census_count == rep.exact_count, (
            f"census {rep.census_count} != exact {rep.exact_count}"
        )
        return {"exact": rep.exact_count, "bound": rep.bound_upper}

    checks.append(_check("combinatorial-slicing", slicing))

    def zonotope_check():
        dense = generators.gaussian_dense(5, 2, seed)
        rep = zonotope_vertex_count(expert_zonotope(dense))
        assert rep.matches_formula, rep.note
        return {"vertices": rep.enumerated_vertices, "formula": rep.formula}

    checks.append(_check("zonotope-duality", zonotope_check))

    def softmax_rank():
        rng = np.random.default_rng(np.random.SeedSequence((seed, 0x50F)))
        Z = rng.normal(size=(2000, 6)) * 3.0
        S = np.exp(Z - Z.max(axis=1, keepdims=True))
        S /= S.sum(axis=1, keepdims=True)
        for k in (1, 2, 3):
            a = np.argsort(-Z, axis=1, kind="stable")[:, :k]
            bsel = np.argsort(-S, axis=1, kind="stable")[:, :k]
            assert np.array_equal(np.sort(a, axis=1), np.sort(bsel, axis=1))
        return "2000 vectors, k in {1,2,3}"

    checks.append(_check("softmax-rank", softmax_rank))

    def segment_exact():
        dense = generators.gaussian_dense(5, 3, seed)
        m = ManifoldSpec.segment_between([0.3, -2.1, 0.4], [-0.2, 2.2, -0.5])
        walk = segment_walk_census(dense, m)
        rep = effective_census(dense, m, 20_000, seed)
        assert rep.distinct_patterns == walk.distinct_patterns == walk.crossings + 1
        return {"crossings": walk.crossings}

    checks.append(_check("segment-effective", segment_exact))

    def anchored_linear():
        moe = anchored_top1_moe(4, 3, 2, seed=seed)
        rep = count_topk_regions(moe, include_router_cuts=False, seed=seed)
        assert rep.exact_count == 4 * zaslavsky_phi(3, 2), rep.exact_count
        return {"count": rep.exact_count}

    checks.append(_check("anchored-top1", anchored_linear))

    passed = all(c["passed"] for c in checks)
    report = {
        "command": "verify-all",
        "checks": checks,
        "n_checks": len(checks),
        "n_passed": sum(c["passed"] for c in checks),
        "passed": passed,
        "seed": seed,
    }
    return report, []


# ---------------------------------------------------------------------------
# Driver

_HANDLERS = {
    "count-regions": _cmd_count_regions,
    "enumerate-cells": _cmd_enumerate_cells,
    "bounds": _cmd_bounds,
    "verify-redundancy": _cmd_verify_redundancy,
    "zonotope": _cmd_zonotope,
    "scaling": _cmd_scaling,
    "effective-capacity": _cmd_effective_capacity,
    "resilience": _cmd_resilience,
    "verify-all": _cmd_verify_all,
    "generate": _cmd_generate,
}


def _strip_timing(report):
    """Drop per-check timing so report bytes depend only on config+seed."""
    if isinstance(report, dict):
        return {k: _strip_timing(v) for k, v in report.items() if k != "seconds"}
    if isinstance(report, list):
        return [_strip_timing(v) for v in report]
    return report


def run(args) -> int:
    cfg = _load_config(args)
    stages: dict[str, float] = {}
    t0 = time.perf_counter()
    report, figs = _HANDLERS[args.command](cfg, args)
    stages["compute"] = round(time.perf_counter() - t0, 4)

    timings = {}
    if args.command == "verify-all":
        timings = {c["name"]: c["seconds"] for c in report["checks"]}
    report = _strip_timing(report)
    text = (
        canonical_json(report)
        if cfg["format"] == "json"
        else report_to_csv(to_jsonable(report))
    )

    figure_paths: list[str] = []
    t0 = time.perf_counter()
    if cfg["out"]:
        out = pathlib.Path(cfg["out"])
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        if cfg["figures"]:
            for name, render in figs:
                fig_path = out.with_name(f"{out.stem}_{name}.png")
                try:
                    figure_paths.append(render(str(fig_path)))
                except Exception as e:  # figures must never sink a report
                    _emit_error("FigureError", f"{name}: {e}")
        stages["figures"] = round(time.perf_counter() - t0, 4)
        manifest = {
            "config_hash": config_hash(
                {
                    **{k: cfg[k] for k in ("command", "seed", "n_max", "coalitions", "samples", "format")},
                    "spec": cfg.get("spec"),
                }
            ),
            "version": __version__,
            "threads": cfg["threads"],
            "stages": {**stages, **timings},
            "warnings": report.get("warnings", []),
            "figures": sorted(figure_paths),
            "report": out.name,
        }
        manifest_path = out.with_name(out.name + ".manifest.json")
        manifest_path.write_text(canonical_json(manifest))
    else:
        sys.stdout.write(text)

    if report.get("passed") is False:
        return 3
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except BudgetExceeded as e:
        _emit_error("BudgetExceeded", str(e), size=e.size, budget=e.budget)
        return e.exit_code
    except PropertyFailure as e:
        _emit_error("PropertyFailure", str(e), **(e.details or {}))
        return e.exit_code
    except NumericalError as e:
        _emit_error("NumericalError", str(e))
        return e.exit_code
    except ContractViolation as e:
        _emit_error("ContractViolation", str(e))
        return e.exit_code
    except TropcapError as e:
        _emit_error(type(e).__name__, str(e))
        return e.exit_code


if __name__ == "__main__":
    raise SystemExit(main())

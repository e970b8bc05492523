"""Exact linear-region counting and capacity bounds for expert layers.

A width-H ReLU layer is linear on each region of the arrangement of its
H neuron hyperplanes, so its capacity is bounded by the generic count
``phi(H, d)``.  A Top-k expert layer is different in kind: inside the
routing cell V(I) only coalition I's kH neurons matter, so the layer's
global piece count is the *sum over feasible cells* of per-cell region
counts.  Distinct cells contribute distinct pieces because the active
coalition is part of the activation pattern (an inactive expert has no
influence, so patterns are only comparable within a coalition).

The headline comparisons, per input dimension d and width H:

    dense               phi(H, d)
    top-1               N * phi(H, d)
    top-k               C(N, k) * phi(kH, d)
    top-k, normalized   C(N, k) * phi(H, d)

Restriction to a convex cell can only lose regions, so C(N,k)*phi(kH,d)
is a true upper bound on the exact sum; with the router's own cell
boundaries counted in, each cell obeys the refined bound
``phi(kH + facets(V(I)), d)`` as well.

Counting is always done twice, independently: exact enumeration with
certified linear programs, and a pure sampling census of activation
patterns that never touches the enumeration machinery.  The census can
only undercount, so census <= exact <= bound is an end-to-end check on
all three.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import lp
from .arrangement import (
    Arrangement,
    CensusResult,
    Polyhedron,
    N_MAX_DEFAULT,
    VERTEX_SCAN_BUDGET,
    _scan_vertex_radius,
    _stencil_directions,
    enumerate_regions_with_witnesses,
    halfspace_is_facet,
    sampling_region_census,
    zaslavsky_phi,
)
from .errors import BudgetExceeded, ContractViolation
from .lp import EPS_LP
from .routing import (
    Coalition,
    RouterSpec,
    enumerate_routing_cells,
    route_top_k_batch,
)
from .tropical import COALITION_BUDGET

CENSUS_SAMPLES_DEFAULT = 100_000


@dataclass
class ExpertSpec:
    """One ReLU expert: ``relu(weights @ x + biases)``."""

    weights: np.ndarray
    biases: np.ndarray

    def __post_init__(self):
        self.weights = np.atleast_2d(np.asarray(self.weights, dtype=np.float64))
        self.biases = np.asarray(self.biases, dtype=np.float64).reshape(-1)
        if self.weights.shape[0] != self.biases.shape[0]:
            raise ContractViolation("one bias per neuron required")
        if self.weights.shape[0] < 1:
            raise ContractViolation("expert needs at least one neuron")
        if np.any(np.linalg.norm(self.weights, axis=1) < 1e-300):
            raise ContractViolation("expert has a zero weight row")

    @property
    def width(self) -> int:
        return self.weights.shape[0]

    @property
    def dim(self) -> int:
        return self.weights.shape[1]


@dataclass
class MoESpec:
    """A router plus one equally sized expert per router row."""

    router: RouterSpec
    experts: list[ExpertSpec]

    def __post_init__(self):
        if len(self.experts) != self.router.n_experts:
            raise ContractViolation("one expert per router row required")
        widths = {e.width for e in self.experts}
        dims = {e.dim for e in self.experts}
        if len(widths) != 1 or len(dims) != 1:
            raise ContractViolation("experts must share width and input dimension")
        if self.experts[0].dim != self.router.dim:
            raise ContractViolation("expert and router input dimensions differ")

    @property
    def n_experts(self) -> int:
        return self.router.n_experts

    @property
    def k(self) -> int:
        return self.router.k

    @property
    def width(self) -> int:
        return self.experts[0].width

    @property
    def dim(self) -> int:
        return self.router.dim

    def coalition_arrangement(self, coalition: Coalition) -> Arrangement:
        """Stacked neuron hyperplanes of the coalition, expert-major order."""
        rows = np.vstack([self.experts[i].weights for i in coalition])
        offs = np.concatenate([self.experts[i].biases for i in coalition])
        return Arrangement(rows, offs)


@dataclass
class CapacityReport:
    """One counting experiment: exact, census, and closed-form views."""

    mode: str
    exact_count: int | None
    census_count: int | None
    bound_upper: int
    bound_terms: dict[str, int]
    per_cell: list[dict] | None
    params_active: int
    params_total: int
    warnings: list[str] = field(default_factory=list)


def count_dense_regions(
    expert: ExpertSpec,
    within: Polyhedron | None = None,
    *,
    n_max: int = N_MAX_DEFAULT,
    census_samples: int = CENSUS_SAMPLES_DEFAULT,
    seed: int = 0,
) -> CapacityReport:
    """Count the linear regions of a single ReLU layer.

    Exact enumeration runs when the width fits the budget; the census
    always runs.  ``within`` restricts both counts to a polyhedron.
    """
    arr = Arrangement(expert.weights, expert.biases)
    warnings: list[str] = []
    exact: int | None
    if expert.width <= n_max:
        exact = len(enumerate_regions_with_witnesses(arr, within))
    else:
        exact = None
        warnings.append(
            f"width {expert.width} exceeds the exact budget of {n_max}; "
            "exact count omitted"
        )
    census = sampling_region_census(arr, within, n_samples=census_samples, seed=seed)
    phi = zaslavsky_phi(expert.width, expert.dim)
    return CapacityReport(
        mode="dense",
        exact_count=exact,
        census_count=census.count,
        bound_upper=phi,
        bound_terms={"phi_width": phi},
        per_cell=None,
        params_active=expert.width * expert.dim,
        params_total=expert.width * expert.dim,
        warnings=warnings,
    )


def _swap_norm_table(router: RouterSpec) -> np.ndarray:
    """Pairwise ||w_u - w_v|| used to normalize routing margins."""
    W = router.weights
    diff = W[:, None, :] - W[None, :, :]
    return np.linalg.norm(diff, axis=2)


def _moe_census_points(moe: MoESpec, n_samples: int, rng) -> np.ndarray:
    """Point cloud for the activation census: geometry stencils + uniform.

    Builds stencils around the vertices of the combined arrangement of
    all neuron hyperplanes and all pairwise routing boundaries, then
    fills with uniform samples.  Purely forward evaluations; nothing
    here shares state with exact enumeration.
    """
    rows = [e.weights for e in moe.experts]
    offs = [e.biases for e in moe.experts]
    W = moe.router.weights
    b = moe.router.biases
    for u in range(moe.n_experts):
        for v in range(u + 1, moe.n_experts):
            d = W[u] - W[v]
            if np.linalg.norm(d) > 1e-300:
                rows.append(d[None, :])
                offs.append(np.array([b[u] - b[v]]))
    rows_m = np.vstack(rows)
    offs_m = np.concatenate(offs)
    rows_m, offs_m = lp.normalize_rows(rows_m, offs_m)
    dim = moe.dim
    pts = []
    radius = _scan_vertex_radius(rows_m, offs_m)
    scale = 1.0 + (radius if radius is not None else 0.0) + float(np.max(np.abs(offs_m)))
    dirs = _stencil_directions(dim)
    n_rows = rows_m.shape[0]
    if radius is not None and n_rows >= dim and math.comb(n_rows, dim) <= VERTEX_SCAN_BUDGET:
        idx = np.array(list(itertools.combinations(range(n_rows), dim)), dtype=np.intp)
        mats = rows_m[idx]
        dets = np.linalg.det(mats)
        ok = np.abs(dets) > 1e-9
        if np.any(ok):
            verts = np.linalg.solve(mats[ok], -offs_m[idx][ok][..., None])[..., 0]
            local = 1.0 + np.linalg.norm(verts, axis=1)
            for r in (1e-6, 1e-4, 1e-2, 0.35):
                block = verts[:, None, :] + (r * local)[:, None, None] * dirs[None, :, :]
                pts.append(block.reshape(-1, dim))
    feet = -offs_m[:, None] * rows_m
    for delta in (1e-4, 1e-2, 0.5):
        pts.append(feet + delta * scale * rows_m)
        pts.append(feet - delta * scale * rows_m)
    pts.append(rng.uniform(-2.0 * scale, 2.0 * scale, size=(n_samples, dim)))
    return np.vstack(pts)


def moe_activation_census(
    moe: MoESpec,
    *,
    n_samples: int = CENSUS_SAMPLES_DEFAULT,
    seed: int = 0,
    points: np.ndarray | None = None,
):
    """Distinct activation patterns (coalition, active-neuron signs) sampled.

    A sample only counts when it clears every decision surface that
    defines its pattern -- the active experts' neuron hyperplanes and
    the routing comparisons against every outside expert -- by more than
    ``EPS_LP`` in normal distance.  The census is therefore a certified
    lower bound on the exact piece count.

    Returns (count, patterns, per_coalition, n_points_used) with
    patterns sorted and per_coalition mapping coalitions to their
    pattern counts.
    """
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), 0xCE4545)))
    if points is None:
        X = _moe_census_points(moe, n_samples, rng)
    else:
        X = np.atleast_2d(np.asarray(points, dtype=np.float64))
    Z = moe.router.logits_batch(X)
    active = route_top_k_batch(moe.router, X)
    norm_table = _swap_norm_table(moe.router)

    patterns: set[tuple] = set()
    per_coalition: dict[Coalition, int] = {}
    n_used = 0
    uniq, inverse = np.unique(active, axis=0, return_inverse=True)
    for g, row in enumerate(uniq):
        I = tuple(int(t) for t in row)
        sel = inverse == g
        Xg = X[sel]
        Zg = Z[sel]
        outside = [v for v in range(moe.n_experts) if v not in I]
        ok = np.ones(Xg.shape[0], dtype=bool)
        if outside:
            gaps = np.full(Xg.shape[0], np.inf)
            for u in I:
                for v in outside:
                    nv = norm_table[u, v]
                    if nv < 1e-300:
                        continue  # bias-only comparison: no surface to clear
                    gaps = np.minimum(gaps, (Zg[:, u] - Zg[:, v]) / nv)
            ok &= gaps > EPS_LP
        rows = np.vstack([moe.experts[i].weights for i in I])
        offs = np.concatenate([moe.experts[i].biases for i in I])
        rows, offs = lp.normalize_rows(rows, offs)
        vals = Xg @ rows.T + offs
        ok &= np.min(np.abs(vals), axis=1) > EPS_LP
        vals = vals[ok]
        n_used += int(np.count_nonzero(ok))
        if vals.shape[0] == 0:
            continue
        bits = np.packbits(vals > 0.0, axis=1)
        u2 = np.unique(bits.view([("", bits.dtype)] * bits.shape[1]))
        u2 = u2.view(bits.dtype).reshape(-1, bits.shape[1])
        signs = np.unpackbits(u2, axis=1)[:, : rows.shape[0]].astype(np.int8)
        group_patterns = {(I, tuple(int(2 * t - 1) for t in srow)) for srow in signs}
        patterns.update(group_patterns)
        per_coalition[I] = len(group_patterns)
    return len(patterns), sorted(patterns), per_coalition, n_used


def count_topk_regions(
    moe: MoESpec,
    *,
    include_router_cuts: bool = True,
    n_max: int = N_MAX_DEFAULT,
    census_samples: int = CENSUS_SAMPLES_DEFAULT,
    seed: int = 0,
    coalition_budget: int = COALITION_BUDGET,
) -> CapacityReport:
    """Count the pieces of a Top-k layer cell by cell.

    For every feasible routing cell V(I), enumerate the regions of the
    coalition's kH neuron hyperplanes restricted to the open cell; the
    exact piece count is the sum.  ``include_router_cuts`` additionally
    reports the per-cell refined bound ``phi(kH + facets(V(I)), d)``.
    The census column comes from the independent activation-pattern
    sampler.
    """
    N, k, H, d = moe.n_experts, moe.k, moe.width, moe.dim
    warnings: list[str] = []
    cells = enumerate_routing_cells(moe.router, budget=coalition_budget)
    kH = k * H
    per_cell: list[dict] = []
    exact: int | None = 0
    for cell in cells:
        entry: dict = {"coalition": cell.coalition, "n_constraints": cell.n_constraints}
        if kH <= n_max:
            arr = moe.coalition_arrangement(cell.coalition)
            within = Polyhedron(cell.normals, cell.offsets, d)
            entry["count"] = len(enumerate_regions_with_witnesses(arr, within, n_max=n_max))
            if exact is not None:
                exact += entry["count"]
        else:
            entry["count"] = None
            exact = None
        if include_router_cuts:
            n_facets = 0
            if cell.n_constraints:
                for j in range(cell.n_constraints):
                    if halfspace_is_facet(cell.normals, cell.offsets, j).feasible:
                        n_facets += 1
            entry["n_facets"] = n_facets
            entry["bound_refined"] = zaslavsky_phi(kH + n_facets, d)
        per_cell.append(entry)
    if exact is None:
        warnings.append(
            f"coalition width {kH} exceeds the exact budget of {n_max}; "
            "per-cell exact counts omitted"
        )
    census_count, _, per_coalition, _ = moe_activation_census(
        moe, n_samples=census_samples, seed=seed
    )
    binom = math.comb(N, k)
    phi_active = zaslavsky_phi(kH, d)
    terms = {
        "binom": binom,
        "phi_active": phi_active,
        "bound": binom * phi_active,
        "phi_normalized": zaslavsky_phi(H, d),
        "bound_normalized": binom * zaslavsky_phi(H, d),
        "n_feasible_cells": len(cells),
    }
    if include_router_cuts:
        phi_refined = zaslavsky_phi(kH + k * (N - k), d)
        terms["phi_refined"] = phi_refined
        terms["bound_refined"] = binom * phi_refined
    mode = "top1" if k == 1 else "topk"
    if k == 1:
        terms["n_experts"] = N
    return CapacityReport(
        mode=mode,
        exact_count=exact,
        census_count=census_count,
        bound_upper=binom * phi_active,
        bound_terms=terms,
        per_cell=per_cell,
        params_active=kH * d + N * d,
        params_total=N * H * d + N * d,
        warnings=warnings,
    )


def count_top1_regions(moe: MoESpec, **kwargs) -> CapacityReport:
    """Top-1 specialization: N cells, bound N * phi(H, d)."""
    if moe.k != 1:
        raise ContractViolation("count_top1_regions requires k = 1")
    return count_topk_regions(moe, **kwargs)


def bound_table(H: int, d: int, N: int | None = None, k: int | None = None) -> list[dict]:
    """Closed-form capacity table across architectures at equal width.

    Always includes the dense row; with N and k given, adds the Top-1,
    Top-k, and width-normalized Top-k rows.  Counts are exact integers.
    """
    if H < 1 or d < 1:
        raise ContractViolation("bound_table requires H >= 1 and d >= 1")
    rows = [
        {
            "mode": "dense",
            "params_active": H * d,
            "params_total": H * d,
            "bound": zaslavsky_phi(H, d),
            "asymptotic": f"Theta(H^{d})",
        }
    ]
    if N is None and k is None:
        return rows
    if N is None or k is None or not 1 <= k <= N:
        raise ContractViolation("bound_table needs 1 <= k <= N when either is given")
    rows.append(
        {
            "mode": "top1",
            "params_active": H * d + N * d,
            "params_total": N * H * d + N * d,
            "bound": N * zaslavsky_phi(H, d),
            "asymptotic": f"Theta(N H^{d})",
        }
    )
    rows.append(
        {
            "mode": "topk",
            "params_active": k * H * d + N * d,
            "params_total": N * H * d + N * d,
            "bound": math.comb(N, k) * zaslavsky_phi(k * H, d),
            "asymptotic": f"Theta(C(N,k) (kH)^{d})",
        }
    )
    rows.append(
        {
            "mode": "topk-normalized",
            "params_active": H * d + N * d,
            "params_total": N * H * d + N * d,
            "bound": math.comb(N, k) * zaslavsky_phi(H, d),
            "asymptotic": f"Theta(C(N,k) H^{d})",
        }
    )
    return rows


def lower_bound_construction(N: int, k: int, H: int, d_in: int, *, seed: int = 0) -> MoESpec:
    """A router whose C(N, k) cells are all realized, with random experts.

    Routing weights are the first N coordinate axes (so logits are
    plain coordinates and every coalition of coordinates wins
    somewhere); requires d_in >= N.
    """
    if d_in < N:
        raise ContractViolation(
            f"the axis router needs d_in >= N (got d_in={d_in}, N={N})"
        )
    W_r = np.zeros((N, d_in))
    W_r[:, :N] = np.eye(N)
    router = RouterSpec(W_r, np.zeros(N), k)
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), 0xE49E47)))
    experts = [
        ExpertSpec(rng.normal(size=(H, d_in)), rng.normal(size=H)) for _ in range(N)
    ]
    return MoESpec(router, experts)


def anchored_top1_moe(N: int, H: int, d: int, *, seed: int = 0) -> MoESpec:
    """A Top-1 instance that realizes the linear-in-N capacity scaling.

    The upper bound N * phi(H, d) is met only when every routing cell
    realizes its expert's full region count, which random instances do
    not do (their hyperplanes are spread across all cells).  Here the
    router has unit-norm rows and zero biases, so cell i is a cone
    containing its own weight direction; each expert's arrangement is
    then rescaled so that all of its hyperplane crossings -- and hence
    interior points of every one of its regions -- sit deep inside cell
    i.  Per-cell counts are then phi(H, d) almost surely and the total
    is exactly N * phi(H, d).
    """
    if N < 2:
        raise ContractViolation("anchored construction needs N >= 2")
    if d == 2:
        angles = 2.0 * np.pi * np.arange(N) / N
        dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    else:
        r = np.random.default_rng(np.random.SeedSequence((int(seed), 0xD14)))
        dirs = r.normal(size=(N, d))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    router = RouterSpec(dirs, np.zeros(N), 1)
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), 0xA4C)))
    experts = []
    for i in range(N):
        # Distance from the cell's anchor point dirs[i] to its nearest wall.
        rho = np.inf
        for j in range(N):
            if j == i:
                continue
            wall = dirs[i] - dirs[j]
            rho = min(rho, float(wall @ dirs[i]) / float(np.linalg.norm(wall)))
        V = rng.normal(size=(H, d))
        b = rng.normal(size=H)
        Vn, bn = lp.normalize_rows(V, b)
        r_v = _scan_vertex_radius(Vn, bn)
        r_v = 1.0 if r_v is None else r_v
        delta = 0.4 * rho / (1.0 + r_v)
        experts.append(ExpertSpec(V / delta, b - (V @ dirs[i]) / delta))
    return MoESpec(router, experts)


@dataclass
class Zonotope:
    """Minkowski sum of segments [0, g_i]; rows of ``generators``."""

    generators: np.ndarray

    def __post_init__(self):
        self.generators = np.atleast_2d(np.asarray(self.generators, dtype=np.float64))
        if self.generators.shape[0] < 1:
            raise ContractViolation("zonotope needs at least one generator")
        if np.any(np.linalg.norm(self.generators, axis=1) < 1e-300):
            raise ContractViolation("zonotope has a zero generator")

    @property
    def n_generators(self) -> int:
        return self.generators.shape[0]

    @property
    def dim(self) -> int:
        return self.generators.shape[1]


def expert_zonotope(expert: ExpertSpec) -> Zonotope:
    """Lift neuron rows to generators [w_i, b_i] one dimension up."""
    return Zonotope(np.hstack([expert.weights, expert.biases[:, None]]))


@dataclass
class ZonotopeReport:
    """Vertex count of a zonotope, enumerated and in closed form."""

    n_generators: int
    dim: int
    enumerated_regions: int
    enumerated_vertices: int
    formula: int
    formula_untruncated: int
    matches_formula: bool
    note: str


def zonotope_vertex_count(z: Zonotope, *, n_max: int = N_MAX_DEFAULT) -> ZonotopeReport:
    """Count zonotope vertices two ways.

    Vertices of sum_i [0, g_i] biject with the regions of the central
    arrangement with normals g_i: the region where a functional c sorts
    every <c, g_i> by sign picks the vertex sum_{<c,g_i> > 0} g_i.  The
    generic closed form is

        2 * sum_{j=0}^{d-1} C(H-1, j),

    which is what ``formula`` reports; ``formula_untruncated`` keeps
    the j = d term as well, which overcounts whenever H - 1 >= d and is
    included for comparison only.
    """
    H, d = z.n_generators, z.dim
    arr = Arrangement(z.generators, np.zeros(H))
    regions = enumerate_regions_with_witnesses(arr, n_max=n_max)
    n_regions = len(regions)
    verts = []
    for signs in regions.keys():
        s = np.asarray(signs, dtype=np.float64)
        verts.append(((s > 0).astype(np.float64)) @ z.generators)
    verts = np.array(verts)
    scale = max(1.0, float(np.max(np.abs(verts))) if verts.size else 1.0)
    distinct = {tuple(np.round(v / scale, 9)) for v in verts}
    formula = 2 * sum(math.comb(H - 1, j) for j in range(d))
    untruncated = 2 * sum(math.comb(H - 1, j) for j in range(d + 1))
    note = (
        "formula_untruncated keeps the j = d term and overcounts whenever "
        "H - 1 >= d; the truncated form is the generic vertex count"
    )
    return ZonotopeReport(
        n_generators=H,
        dim=d,
        enumerated_regions=n_regions,
        enumerated_vertices=len(distinct),
        formula=formula,
        formula_untruncated=untruncated,
        matches_formula=len(distinct) == formula,
        note=note,
    )


@dataclass
class ScalingReport:
    """A sweep of counts with a log-log fit against the sweep variable."""

    mode: str
    rows: list[dict]
    medians: list[dict]
    slope: float
    intercept: float
    ratios: list[float]
    family: str = "gaussian"


def _median_int(values: list[int]) -> float:
    return float(np.median(np.array(values, dtype=np.float64)))


def scaling_probe(
    mode: str,
    values: list[int],
    *,
    d: int = 2,
    H: int = 3,
    k: int = 1,
    N: int = 4,
    n_seeds: int = 5,
    seed: int = 0,
    n_max: int = N_MAX_DEFAULT,
    census_samples: int = CENSUS_SAMPLES_DEFAULT,
    family: str = "gaussian",
) -> ScalingReport:
    """Measure how region counts scale along one architectural axis.

    Modes: "dense-width" sweeps H at fixed d (slope ~ d against log H);
    "top1-experts" sweeps N at fixed H, k=1 (slope ~ 1 against log N);
    "topk-coalitions" sweeps k at fixed N, H (slope ~ 1 against
    log C(N, k)).  Counts are exact when the width budget allows,
    otherwise census.  The fit is least squares on log medians; ratios
    are successive median quotients.

    family selects the instance distribution: "gaussian" draws i.i.d.
    normal weights everywhere; "anchored" (top1-experts mode only) uses
    the cell-anchored construction that saturates the linear-in-N upper
    bound -- random instances cannot, because their region budget is
    shared across all cells.
    """
    if family not in ("gaussian", "anchored"):
        raise ContractViolation(f"unknown instance family {family!r}")
    if family == "anchored" and mode != "top1-experts":
        raise ContractViolation("anchored family applies to top1-experts mode only")
    rows: list[dict] = []
    medians: list[dict] = []
    xs: list[float] = []
    for v in values:
        counts: list[int] = []
        for s in range(n_seeds):
            rng = np.random.default_rng(np.random.SeedSequence((int(seed), int(v), s)))
            if mode == "dense-width":
                expert = ExpertSpec(rng.normal(size=(v, d)), rng.normal(size=v))
                if v <= n_max:
                    rep = count_dense_regions(expert, n_max=n_max, census_samples=census_samples, seed=s)
                    count = rep.exact_count
                    source = "exact"
                else:
                    arr = Arrangement(expert.weights, expert.biases)
                    count = sampling_region_census(
                        arr, n_samples=census_samples, seed=s
                    ).count
                    source = "census"
                x = float(v)
            elif mode == "top1-experts":
                if family == "anchored":
                    child = int(rng.integers(0, 2**31 - 1))
                    moe = anchored_top1_moe(int(v), H, d, seed=child)
                else:
                    router = RouterSpec(rng.normal(size=(v, d)), rng.normal(size=v), 1)
                    experts = [
                        ExpertSpec(rng.normal(size=(H, d)), rng.normal(size=H))
                        for _ in range(v)
                    ]
                    moe = MoESpec(router, experts)
                rep = count_topk_regions(
                    moe,
                    include_router_cuts=False,
                    n_max=n_max,
                    census_samples=census_samples,
                    seed=s,
                )
                count = rep.exact_count if rep.exact_count is not None else rep.census_count
                source = "exact" if rep.exact_count is not None else "census"
                x = float(v)
            elif mode == "topk-coalitions":
                router = RouterSpec(rng.normal(size=(N, d)), rng.normal(size=N), int(v))
                experts = [
                    ExpertSpec(rng.normal(size=(H, d)), rng.normal(size=H))
                    for _ in range(N)
                ]
                rep = count_topk_regions(
                    MoESpec(router, experts),
                    include_router_cuts=False,
                    n_max=n_max,
                    census_samples=census_samples,
                    seed=s,
                )
                count = rep.exact_count if rep.exact_count is not None else rep.census_count
                source = "exact" if rep.exact_count is not None else "census"
                x = float(math.comb(N, int(v)))
            else:
                raise ContractViolation(f"unknown scaling mode {mode!r}")
            counts.append(int(count))
            rows.append({"value": int(v), "seed": s, "count": int(count), "source": source})
        med = _median_int(counts)
        medians.append({"value": int(v), "x": x, "median": med})
        xs.append(x)
    logs = np.log(np.array([m["median"] for m in medians]))
    logx = np.log(np.array(xs))
    slope, intercept = np.polyfit(logx, logs, 1)
    meds = [m["median"] for m in medians]
    ratios = [meds[i + 1] / meds[i] for i in range(len(meds) - 1)]
    return ScalingReport(mode, rows, medians, float(slope), float(intercept), ratios, family)

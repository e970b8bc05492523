"""Hyperplane arrangements: exact region enumeration and sampling censuses.

A finite set of affine hyperplanes ``w_i . x + b_i = 0`` cuts R^d into
open full-dimensional regions, each labeled by its sign vector
(which side of every hyperplane it lies on).  The number of regions of
a generic ("general position") arrangement depends only on (n, d) and
is the classical count ``phi(n, d) = sum_{j<=d} C(n, j)``; degenerate
arrangements have fewer regions.

Exact enumeration works by breadth-first search on the region adjacency
graph: starting from one certified region, each single-sign flip is
either validated geometrically (walk through the facet and check the
new point's margins) or decided by a slack-maximization linear program.
Regions are confined to a large box so unbounded regions have interior
witnesses too, and coincident hyperplanes are merged up front so the
flip graph stays connected.  Every region reported carries an interior
witness with normalized margins above ``EPS_LP``; a region whose best
interior slack is below that threshold is treated as empty, which is
the package-wide convention shared by the sampling census.

The census is the independent cross-check: it never runs an LP, just
evaluates sign patterns at a deterministic point cloud (arrangement
vertices with small stencils, hyperplane foot points, uniform box
samples) and counts distinct patterns, discarding points too close to
any hyperplane.  Census counts are therefore always a lower bound on
the exact count.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import lp
from .errors import BudgetExceeded, ContractViolation, EmptyDomainError
from .lp import EPS_LP, R_BOX

EPS_GP = 1e-8  # relative singular-value threshold for general position
N_MAX_DEFAULT = 24  # exact enumeration refuses more hyperplanes than this
GP_SUBSET_BUDGET = 200_000
VERTEX_SCAN_BUDGET = 100_000
CENSUS_SAMPLES_DEFAULT = 100_000


@dataclass
class Hyperplane:
    """The set ``{x : normal . x + offset = 0}`` with a nonzero normal."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        self.normal = np.asarray(self.normal, dtype=np.float64).reshape(-1)
        self.offset = float(self.offset)
        if np.linalg.norm(self.normal) < 1e-300:
            raise ContractViolation("hyperplane normal must be nonzero")


@dataclass
class Arrangement:
    """A finite list of hyperplanes in matrix form: rows of ``normals``."""

    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        self.normals = np.atleast_2d(np.asarray(self.normals, dtype=np.float64))
        self.offsets = np.asarray(self.offsets, dtype=np.float64).reshape(-1)
        if self.normals.shape[0] != self.offsets.shape[0]:
            raise ContractViolation("one offset per normal row required")
        if self.normals.shape[0] == 0:
            raise ContractViolation("an arrangement needs at least one hyperplane")
        norms = np.linalg.norm(self.normals, axis=1)
        if np.any(norms < 1e-300):
            raise ContractViolation("arrangement contains a zero normal")

    @classmethod
    def from_hyperplanes(cls, planes: list[Hyperplane]) -> "Arrangement":
        return cls(np.array([h.normal for h in planes]), np.array([h.offset for h in planes]))

    @property
    def n_hyperplanes(self) -> int:
        return self.normals.shape[0]

    @property
    def dim(self) -> int:
        return self.normals.shape[1]


@dataclass
class Polyhedron:
    """Intersection of open halfspaces ``normal . x + offset > 0``.

    An empty row set means all of R^d (``dim`` then supplies the
    ambient dimension, which the rows otherwise determine).
    """

    normals: np.ndarray
    offsets: np.ndarray
    dim: int = 0

    def __post_init__(self):
        self.normals = np.asarray(self.normals, dtype=np.float64)
        if self.normals.size == 0:
            if self.dim <= 0:
                raise ContractViolation("empty polyhedron needs an explicit dimension")
            self.normals = self.normals.reshape(0, self.dim)
        else:
            self.normals = np.atleast_2d(self.normals)
            self.dim = self.normals.shape[1]
        self.offsets = np.asarray(self.offsets, dtype=np.float64).reshape(-1)
        if self.normals.shape[0] != self.offsets.shape[0]:
            raise ContractViolation("one offset per polyhedron row required")
        if self.normals.shape[0]:
            norms = np.linalg.norm(self.normals, axis=1)
            if np.any(norms < 1e-300):
                raise ContractViolation("polyhedron contains a zero normal")

    @classmethod
    def full(cls, dim: int) -> "Polyhedron":
        return cls(np.zeros((0, dim)), np.zeros(0), dim)

    @property
    def n_rows(self) -> int:
        return self.normals.shape[0]


@dataclass
class FeasibilityResult:
    """Verdict of one interior test, with witness when feasible."""

    feasible: bool
    witness: np.ndarray | None
    slack: float
    box_radius: float = R_BOX


@dataclass
class CensusResult:
    """Distinct strict sign patterns seen at a point cloud."""

    count: int
    patterns: list[tuple[int, ...]]
    n_points: int
    strategy: str


def zaslavsky_phi(n: int, d: int) -> int:
    """Region count of a generic arrangement: sum_{j=0}^{d} C(n, j), exact."""
    if n < 0 or d < 0:
        raise ContractViolation("phi requires nonnegative arguments")
    return sum(math.comb(n, j) for j in range(min(n, d) + 1))


def strict_feasibility(
    normals: np.ndarray,
    offsets: np.ndarray,
    dim: int | None = None,
    *,
    box_radius: float = R_BOX,
) -> FeasibilityResult:
    """Does ``w_i . x + b_i > 0`` for all i have a solution with real margin?

    Margins are measured normal to each hyperplane; the verdict is
    positive exactly when some point clears every hyperplane by more
    than ``EPS_LP``.  The witness is (near) the point of largest
    clearance.
    """
    normals = np.asarray(normals, dtype=np.float64)
    if dim is None:
        dim = normals.shape[-1]
    if normals.size == 0:
        return FeasibilityResult(True, np.zeros(dim), np.inf, box_radius)
    slack, x, used = lp.max_slack_point(normals, offsets, dim, box_radius=box_radius)
    return FeasibilityResult(bool(slack > EPS_LP), x, float(slack), used)


def _canonical_rows(normals: np.ndarray, offsets: np.ndarray):
    """Unit-normalize rows and orient each so its first nonzero entry is > 0."""
    W, b = lp.normalize_rows(normals, offsets)
    W = W.copy()
    b = b.copy()
    for i in range(W.shape[0]):
        lead = 0.0
        for v in W[i]:
            if abs(v) > 1e-12:
                lead = v
                break
        if lead < 0.0:
            W[i] = -W[i]
            b[i] = -b[i]
    return W, b


def _dedupe_hyperplanes(normals: np.ndarray, offsets: np.ndarray):
    """Merge coincident hyperplanes.

    Returns (W, b, group, orient): distinct unit rows, the group index
    of each original hyperplane, and the sign relating its normal to
    the group representative.  Rows are grouped on values rounded to
    nine decimals, far coarser than duplicate noise and far finer than
    the separation of genuinely distinct hyperplanes.
    """
    Wc, bc = _canonical_rows(normals, offsets)
    Wn, bn = lp.normalize_rows(normals, offsets)
    n = Wc.shape[0]
    orient = np.where(np.sum(Wn * Wc, axis=1) >= 0.0, 1, -1).astype(np.int8)
    keys = np.round(np.hstack([Wc, bc[:, None]]), 9)
    keys[keys == 0.0] = 0.0  # collapse -0.0
    group = np.empty(n, dtype=np.intp)
    reps: dict[bytes, int] = {}
    rep_rows = []
    for i in range(n):
        key = keys[i].tobytes()
        g = reps.get(key)
        if g is None:
            g = len(rep_rows)
            reps[key] = g
            rep_rows.append(i)
        group[i] = g
    return Wc[rep_rows], bc[rep_rows], group, orient


def _scan_vertex_radius(W: np.ndarray, b: np.ndarray) -> float | None:
    """Largest coordinate of any vertex of the row system, or None if skipped.

    Vertices are intersections of d rows at a time; the scan is skipped
    when there are too many subsets to stay cheap, in which case box
    growth inside the solver is the safety net.
    """
    n, d = W.shape
    if n < d or d < 1:
        return 0.0
    count = math.comb(n, d)
    if count > VERTEX_SCAN_BUDGET:
        return None
    idx = np.array(list(itertools.combinations(range(n), d)), dtype=np.intp)
    mats = W[idx]  # (count, d, d)
    dets = np.linalg.det(mats)
    ok = np.abs(dets) > 1e-9
    if not np.any(ok):
        return 0.0
    sols = np.linalg.solve(mats[ok], -b[idx][ok][..., None])[..., 0]
    return float(np.max(np.abs(sols)))


def _initial_box(W, b, Pn, Po, box_radius):
    rows = np.vstack([W, Pn]) if Pn.shape[0] else W
    offs = np.concatenate([b, Po]) if Pn.shape[0] else b
    radius = _scan_vertex_radius(rows, offs)
    R = float(box_radius)
    if radius is not None:
        while R < 10.0 * radius and R < lp.R_BOX_MAX:
            R *= 10.0
    return R


def _find_seed(W, b, Pn, Po, dim, R):
    """Find one feasible region by fixing signs one hyperplane at a time.

    Always succeeds when the sandwiching polyhedron has interior: at
    each step at least one side of the next hyperplane keeps positive
    slack.  Costs at most 2m slack programs.
    """
    m = W.shape[0]
    signs = np.zeros(m, dtype=np.int8)
    rows = [Pn[i] for i in range(Pn.shape[0])]
    offs = [Po[i] for i in range(Pn.shape[0])]
    witness = None
    for i in range(m):
        best = None
        for s in (1, -1):
            cand_rows = np.array(rows + [s * W[i]])
            cand_offs = np.array(offs + [s * b[i]])
            slack, x, _ = lp.max_slack_point(
                cand_rows, cand_offs, dim, normalize=False, box_radius=R, auto_grow=False
            )
            if slack > EPS_LP:
                best = (s, x)
                break
        if best is None:
            return None, None
        signs[i] = best[0]
        witness = best[1]
        rows.append(best[0] * W[i])
        offs.append(best[0] * b[i])
    return signs, witness


def _region_search(W, b, Pn, Po, dim, box_radius):
    """Breadth-first search over sign regions of distinct unit rows.

    Returns a dict mapping sign tuples (over the deduplicated rows) to
    interior witnesses.  ``Pn/Po`` confine the search to an open
    polyhedron; all rows must be unit-normalized.
    """
    m = W.shape[0]
    mp = Pn.shape[0]
    R = _initial_box(W, b, Pn, Po, box_radius)
    if mp:
        slack, _, used = lp.max_slack_point(Pn, Po, dim, normalize=False, box_radius=R)
        if slack <= EPS_LP:
            return {}, used
        R = max(R, used)
    if m == 0:
        _, x, _ = lp.max_slack_point(Pn, Po, dim, normalize=False, box_radius=R)
        return {(): x}, R

    seed_signs, seed_witness = _find_seed(W, b, Pn, Po, dim, R)
    if seed_signs is None:
        return {}, R

    G = W @ W.T
    PG = Pn @ W.T if mp else np.zeros((0, m))
    tiny = 1e-13

    regions: dict[bytes, np.ndarray] = {}
    verdict: dict[bytes, bool] = {}
    queue: deque[bytes] = deque()
    key0 = seed_signs.tobytes()
    regions[key0] = seed_witness
    verdict[key0] = True
    queue.append(key0)

    while queue:
        key = queue.popleft()
        s = np.frombuffer(key, dtype=np.int8).astype(np.float64)
        x = regions[key]
        v = W @ x + b
        pmarg = Pn @ x + Po if mp else np.zeros(0)

        # Ray certificates for all m flips at once.  Along the inward
        # perpendicular u_i = -s_i w_i, hyperplane j is hit at parameter
        # -v_j / (w_j . u_i); the flip of i is certified by walking just
        # past hyperplane i whenever it is the strictly first crossing.
        U = -s[:, None] * W  # (m, d) ray directions
        den_h = -s[:, None] * G  # (m, m): w_j . u_i at [i, j]
        with np.errstate(divide="ignore", invalid="ignore"):
            Th = -v[None, :] / den_h
        Th[np.abs(den_h) < tiny] = np.inf
        Th[Th <= tiny] = np.inf
        t_self = np.abs(v)
        np.fill_diagonal(Th, np.inf)
        others = np.min(Th, axis=1)
        if mp:
            den_p = -s[:, None] * PG.T  # (m, mp)
            with np.errstate(divide="ignore", invalid="ignore"):
                Tp = -pmarg[None, :] / den_p
            Tp[np.abs(den_p) < tiny] = np.inf
            Tp[Tp <= tiny] = np.inf
            others = np.minimum(others, np.min(Tp, axis=1))
        with np.errstate(divide="ignore", invalid="ignore"):
            Tb = np.where(U > tiny, (R - x)[None, :] / U, np.inf)
            Tb = np.where(U < -tiny, (-R - x)[None, :] / U, Tb)
        Tb[Tb <= tiny] = np.inf
        others = np.minimum(others, np.min(Tb, axis=1))

        certifiable = (t_self < others * (1.0 - 1e-9)) & np.isfinite(t_self)
        step = np.where(
            np.isfinite(others), 0.5 * (t_self + others), t_self + np.maximum(1.0, t_self)
        )

        for i in range(m):
            s_new = s.astype(np.int8)
            s_new[i] = -s_new[i]
            cand = s_new.tobytes()
            if cand in verdict:
                continue
            settled = False
            if certifiable[i]:
                y = x + step[i] * U[i]
                vy = W @ y + b
                if np.all(s_new * vy > EPS_LP) and np.all(np.abs(y) < R):
                    if not mp or np.all(Pn @ y + Po > EPS_LP):
                        verdict[cand] = True
                        regions[cand] = y
                        queue.append(cand)
                        settled = True
            if not settled:
                rows = s_new[:, None] * W
                offs = s_new * b
                if mp:
                    rows = np.vstack([rows, Pn])
                    offs = np.concatenate([offs, Po])
                slack, wit, used = lp.max_slack_point(
                    rows, offs, dim, normalize=False, box_radius=R
                )
                R = max(R, used)
                if slack > EPS_LP:
                    verdict[cand] = True
                    regions[cand] = wit
                    queue.append(cand)
                else:
                    verdict[cand] = False

    out = {}
    for key, wit in regions.items():
        out[tuple(int(t) for t in np.frombuffer(key, dtype=np.int8))] = wit
    return out, R


def enumerate_regions_with_witnesses(
    arrangement: Arrangement,
    within: Polyhedron | None = None,
    *,
    n_max: int = N_MAX_DEFAULT,
    box_radius: float = R_BOX,
) -> dict[tuple[int, ...], np.ndarray]:
    """Map each region's sign vector to an interior witness point.

    Sign vectors are over the original hyperplane list (coincident
    hyperplanes get consistent, possibly opposite, signs).  Refuses
    arrangements with more than ``n_max`` hyperplanes.
    """
    n = arrangement.n_hyperplanes
    d = arrangement.dim
    if n > n_max:
        raise BudgetExceeded(
            f"{n} hyperplanes exceed the exact enumeration budget of {n_max}; "
            "use the sampling census instead",
            n,
            n_max,
        )
    if within is not None and within.dim != d:
        raise ContractViolation("restricting polyhedron has mismatched dimension")
    W, b, group, orient = _dedupe_hyperplanes(arrangement.normals, arrangement.offsets)
    if within is not None and within.n_rows:
        Pn, Po = lp.normalize_rows(within.normals, within.offsets)
    else:
        Pn, Po = np.zeros((0, d)), np.zeros(0)
    found, _ = _region_search(W, b, Pn, Po, d, box_radius)
    out = {}
    for signs, wit in found.items():
        s = np.asarray(signs, dtype=np.int8)
        full = (orient * s[group]).astype(int) if n else np.zeros(0, dtype=int)
        out[tuple(int(t) for t in full)] = wit
    return out


def enumerate_regions(
    arrangement: Arrangement,
    within: Polyhedron | None = None,
    *,
    n_max: int = N_MAX_DEFAULT,
    box_radius: float = R_BOX,
) -> list[tuple[int, ...]]:
    """All region sign vectors, sorted lexicographically."""
    found = enumerate_regions_with_witnesses(
        arrangement, within, n_max=n_max, box_radius=box_radius
    )
    return sorted(found.keys())


def count_regions(
    arrangement: Arrangement,
    within: Polyhedron | None = None,
    *,
    n_max: int = N_MAX_DEFAULT,
    box_radius: float = R_BOX,
) -> int:
    """Exact number of open regions (within the given polyhedron)."""
    return len(
        enumerate_regions_with_witnesses(arrangement, within, n_max=n_max, box_radius=box_radius)
    )


def is_general_position(
    arrangement: Arrangement, *, eps: float = EPS_GP
) -> tuple[bool, str | None]:
    """Check the three genericity clauses; returns (verdict, first reason).

    An arrangement is generic when (a) no two hyperplanes are parallel,
    (b) the normals of every subset of size j <= d are linearly
    independent, and (c) no d+1 hyperplanes pass through a common
    point.  Degeneracy is measured by relative singular values against
    ``eps``.
    """
    W, b = lp.normalize_rows(arrangement.normals, arrangement.offsets)
    n, d = W.shape
    work = sum(math.comb(n, j) for j in range(2, min(n, d + 1) + 1))
    if work > GP_SUBSET_BUDGET:
        raise BudgetExceeded(
            f"general-position check needs {work} subsets, budget is {GP_SUBSET_BUDGET}",
            work,
            GP_SUBSET_BUDGET,
        )
    dots = np.abs(W @ W.T)
    np.fill_diagonal(dots, 0.0)
    worst = np.unravel_index(np.argmax(dots), dots.shape)
    if dots[worst] >= 1.0 - eps:
        return False, f"hyperplanes {worst[0]} and {worst[1]} are parallel"
    for j in range(2, min(n, d) + 1):
        for subset in itertools.combinations(range(n), j):
            sv = np.linalg.svd(W[list(subset)], compute_uv=False)
            if sv[-1] <= eps * sv[0]:
                return False, f"normals of {subset} are linearly dependent"
    if n >= d + 1:
        for subset in itertools.combinations(range(n), d + 1):
            rows = list(subset)
            aug = np.hstack([W[rows], b[rows, None]])
            sv = np.linalg.svd(aug, compute_uv=False)
            if sv[-1] <= eps * sv[0]:
                return False, f"hyperplanes {subset} share a common point"
    return True, None


def restrict_to_hyperplane(normals: np.ndarray, offsets: np.ndarray, j: int):
    """Rewrite a row system inside hyperplane j's own coordinates.

    Returns (reduced_normals, reduced_offsets, base_point, basis) where
    row i of the reduced system is the restriction of row i != j to
    ``{x : w_j . x + b_j = 0}``, parametrized as x = base + basis @ y.
    """
    W, b = lp.normalize_rows(normals, offsets)
    d = W.shape[1]
    wj = W[j]
    x0 = -b[j] * wj
    _, _, vt = np.linalg.svd(wj[None, :], full_matrices=True)
    basis = vt[1:].T  # (d, d-1) orthonormal complement of w_j
    keep = [i for i in range(W.shape[0]) if i != j]
    reduced_n = W[keep] @ basis
    reduced_o = W[keep] @ x0 + b[keep]
    return reduced_n, reduced_o, x0, basis


def halfspace_is_facet(
    normals: np.ndarray, offsets: np.ndarray, j: int, *, box_radius: float = R_BOX
) -> FeasibilityResult:
    """Does row j support a facet of ``{x : all rows >= 0}``?

    Decided exactly by restricting the other rows to hyperplane j and
    testing strict feasibility there (no equality constraints needed).
    The witness is lifted back to ambient coordinates.
    """
    reduced_n, reduced_o, x0, basis = restrict_to_hyperplane(normals, offsets, j)
    d_red = basis.shape[1]
    if d_red == 0:
        ok = bool(np.all(reduced_o > EPS_LP)) if reduced_o.size else True
        return FeasibilityResult(ok, x0 if ok else None, float(np.min(reduced_o)) if reduced_o.size else np.inf)
    nonzero = np.linalg.norm(reduced_n, axis=1) > 1e-12
    fixed = reduced_o[~nonzero]
    if fixed.size and np.min(fixed) <= EPS_LP:
        return FeasibilityResult(False, None, float(np.min(fixed)))
    res = strict_feasibility(
        reduced_n[nonzero], reduced_o[nonzero], d_red, box_radius=box_radius
    )
    witness = x0 + basis @ res.witness if res.feasible else None
    return FeasibilityResult(res.feasible, witness, res.slack, res.box_radius)


def _stencil_directions(d: int) -> np.ndarray:
    """A small spread of unit directions: axes plus sign-pattern corners."""
    dirs = []
    eye = np.eye(d)
    for a in range(d):
        dirs.append(eye[a])
        dirs.append(-eye[a])
    if d <= 6:
        for signs in itertools.product((-1.0, 1.0), repeat=d):
            dirs.append(np.array(signs) / math.sqrt(d))
    return np.array(dirs)


def _census_points(W, b, Pn, Po, dim, n_samples, rng):
    """Deterministic point cloud: vertex stencils, foot points, uniform fill."""
    rows = np.vstack([W, Pn]) if Pn.shape[0] else W
    offs = np.concatenate([b, Po]) if Pn.shape[0] else b
    pts = []
    radius = _scan_vertex_radius(rows, offs)
    scale = 1.0 + (radius if radius is not None else 0.0) + float(np.max(np.abs(offs)))
    dirs = _stencil_directions(dim)
    if radius is not None and rows.shape[0] >= dim:
        count = math.comb(rows.shape[0], dim)
        if count <= VERTEX_SCAN_BUDGET:
            idx = np.array(list(itertools.combinations(range(rows.shape[0]), dim)), dtype=np.intp)
            mats = rows[idx]
            dets = np.linalg.det(mats)
            ok = np.abs(dets) > 1e-9
            if np.any(ok):
                verts = np.linalg.solve(mats[ok], -offs[idx][ok][..., None])[..., 0]
                local = 1.0 + np.linalg.norm(verts, axis=1)
                for r in (1e-6, 1e-4, 1e-2, 0.35):
                    block = verts[:, None, :] + (r * local)[:, None, None] * dirs[None, :, :]
                    pts.append(block.reshape(-1, dim))
    # Foot points on each hyperplane, pushed off both sides: catches
    # configurations without vertices, e.g. parallel pencils.
    feet = -offs[:, None] * rows
    for delta in (1e-4, 1e-2, 0.5):
        pts.append(feet + delta * scale * rows)
        pts.append(feet - delta * scale * rows)
    box = 2.0 * scale
    pts.append(rng.uniform(-box, box, size=(n_samples, dim)))
    return np.vstack(pts)


def _hit_and_run(Pn, Po, dim, witness, n_samples, rng, box):
    """Uniform-ish interior samples of an open polyhedron by hit-and-run."""
    x = witness.copy()
    out = np.empty((n_samples, dim))
    burn = 50
    for step in range(n_samples + burn):
        g = rng.normal(size=dim)
        g /= np.linalg.norm(g)
        t_lo, t_hi = -box, box
        if Pn.shape[0]:
            num = Pn @ x + Po
            den = Pn @ g
            for r in range(Pn.shape[0]):
                if den[r] > 1e-300:
                    t_lo = max(t_lo, -num[r] / den[r])
                elif den[r] < -1e-300:
                    t_hi = min(t_hi, -num[r] / den[r])
        for a in range(dim):
            if g[a] > 1e-300:
                t_lo = max(t_lo, (-box - x[a]) / g[a])
                t_hi = min(t_hi, (box - x[a]) / g[a])
            elif g[a] < -1e-300:
                t_lo = max(t_lo, (-box - x[a]) / g[a])
                t_hi = min(t_hi, (box - x[a]) / g[a])
        if t_hi <= t_lo:
            continue
        x = x + (t_lo + (t_hi - t_lo) * rng.random()) * g
        if step >= burn:
            out[step - burn] = x
    return out


def distinct_sign_patterns(
    normals: np.ndarray,
    offsets: np.ndarray,
    points: np.ndarray,
    *,
    min_margin: float = EPS_LP,
):
    """Distinct strict sign patterns of ``w . x + b`` over the points.

    Points within ``min_margin`` (normal distance) of any hyperplane
    are discarded, so every reported pattern is witnessed by a point
    that the exact enumerator would also accept.  Returns (patterns
    sorted lexicographically, number of points kept).
    """
    W, b = lp.normalize_rows(normals, offsets)
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    vals = points @ W.T + b
    keep = np.min(np.abs(vals), axis=1) > min_margin
    vals = vals[keep]
    if vals.shape[0] == 0:
        return [], 0
    bits = np.packbits(vals > 0.0, axis=1)
    uniq = np.unique(bits.view([("", bits.dtype)] * bits.shape[1]))
    uniq = uniq.view(bits.dtype).reshape(-1, bits.shape[1])
    n = W.shape[0]
    signs = np.unpackbits(uniq, axis=1)[:, :n].astype(np.int8)
    patterns = sorted(tuple(int(2 * t - 1) for t in row) for row in signs)
    return patterns, int(vals.shape[0])


def sampling_region_census(
    arrangement: Arrangement,
    within: Polyhedron | None = None,
    *,
    n_samples: int = CENSUS_SAMPLES_DEFAULT,
    seed: int = 0,
    points: np.ndarray | None = None,
) -> CensusResult:
    """Lower-bound the region count by sampling sign patterns.

    With no explicit points, a deterministic cloud is built from the
    arrangement's own geometry (vertex stencils and hyperplane foot
    points) plus seeded uniform samples, which in low dimension
    saturates all regions with overwhelming probability.  Every pattern
    counted is witnessed at clearance above ``EPS_LP``, so the census
    never exceeds the exact count.
    """
    d = arrangement.dim
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), 0x5EC7)))
    if within is not None and within.n_rows:
        Pn, Po = lp.normalize_rows(within.normals, within.offsets)
    else:
        Pn, Po = np.zeros((0, d)), np.zeros(0)
    W, b = lp.normalize_rows(arrangement.normals, arrangement.offsets)
    if points is None:
        pts = _census_points(W, b, Pn, Po, d, n_samples, rng)
        strategy = "stencil+uniform"
        if Pn.shape[0]:
            marg = pts @ Pn.T + Po
            inside = np.min(marg, axis=1) > EPS_LP
            kept = pts[inside]
            if kept.shape[0] < max(16, n_samples // 100):
                res = strict_feasibility(Pn, Po, d)
                if not res.feasible:
                    raise EmptyDomainError("census domain has empty interior")
                extra = _hit_and_run(
                    Pn, Po, d, res.witness, n_samples, rng, box=2.0 * (1.0 + np.abs(res.witness).max())
                )
                kept = np.vstack([kept, extra]) if kept.shape[0] else extra
                strategy = "stencil+hit-and-run"
            pts = kept
    else:
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        strategy = "user-points"
        if Pn.shape[0] and pts.shape[0]:
            marg = pts @ Pn.T + Po
            pts = pts[np.min(marg, axis=1) > EPS_LP]
    if pts.shape[0] == 0:
        raise EmptyDomainError("no census points remain inside the domain")
    patterns, used = distinct_sign_patterns(W, b, pts)
    return CensusResult(len(patterns), patterns, used, strategy)

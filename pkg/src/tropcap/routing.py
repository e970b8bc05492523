"""Geometry of Top-k expert routing.

A router scores an input with N affine logits and activates the k
largest.  The set of inputs activating a fixed coalition I is an open
polyhedron V(I) -- a cell of the fan obtained by lifting the normal fan
of the (k, N) hypersimplex through the router weights.  Although coalition
I competes against every other size-k coalition, its cell is already
carved out by the k(N-k) single-swap comparisons "keep u in I versus
bring in v":

    (w_u - w_v) . x + (b_u - b_v) >= 0   for u in I, v not in I,

because any multi-element exchange is a sum of such swaps.  That
minimal description is what makes exact per-cell region counting
tractable, and `verify_redundancy` certifies it numerically on any
concrete router.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import lp
from .arrangement import FeasibilityResult, restrict_to_hyperplane, strict_feasibility
from .errors import BudgetExceeded, ContractViolation
from .lp import EPS_LP, R_BOX
from .tropical import COALITION_BUDGET, TropicalPolynomial, build_sym_trop_k, coalitions

Coalition = tuple[int, ...]


@dataclass
class RouterSpec:
    """Affine router: logits ``z = weights @ x + biases``, keep the top k."""

    weights: np.ndarray
    biases: np.ndarray
    k: int

    def __post_init__(self):
        self.weights = np.atleast_2d(np.asarray(self.weights, dtype=np.float64))
        self.biases = np.asarray(self.biases, dtype=np.float64).reshape(-1)
        if self.weights.shape[0] != self.biases.shape[0]:
            raise ContractViolation("one bias per router row required")
        if self.weights.shape[0] < 1:
            raise ContractViolation("router needs at least one expert")
        if not 1 <= self.k <= self.weights.shape[0]:
            raise ContractViolation(
                f"k must be in 1..{self.weights.shape[0]}, got {self.k}"
            )

    @property
    def n_experts(self) -> int:
        return self.weights.shape[0]

    @property
    def dim(self) -> int:
        return self.weights.shape[1]

    def logits(self, x: np.ndarray) -> np.ndarray:
        return self.weights @ np.asarray(x, dtype=np.float64) + self.biases

    def logits_batch(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.weights.T + self.biases


@dataclass
class GateVector:
    """Softmax gates restricted to the active coalition.

    ``weights`` has one entry per expert; inactive experts are exactly
    zero and the active entries sum to one.
    """

    weights: np.ndarray
    active: Coalition


@dataclass
class RoutingCell:
    """The open cell of inputs routed to a fixed coalition."""

    coalition: Coalition
    normals: np.ndarray
    offsets: np.ndarray
    feasibility: FeasibilityResult
    warnings: list[str] = field(default_factory=list)

    @property
    def n_constraints(self) -> int:
        return self.normals.shape[0]


def route_top_k(router: RouterSpec, x: np.ndarray) -> Coalition:
    """Indices of the k largest logits, ascending; ties keep lowest index."""
    z = router.logits(x)
    order = np.argsort(-z, kind="stable")[: router.k]
    return tuple(sorted(int(i) for i in order))


def route_top_k_batch(router: RouterSpec, X: np.ndarray) -> np.ndarray:
    """Row-wise active coalitions for a batch, each row sorted ascending."""
    Z = router.logits_batch(X)
    top = np.argsort(-Z, axis=1, kind="stable")[:, : router.k]
    return np.sort(top, axis=1)


def gate_weights(router: RouterSpec, x: np.ndarray) -> GateVector:
    """Softmax over the active logits only; inactive gates are zero."""
    z = router.logits(x)
    active = route_top_k(router, x)
    sel = np.array(active, dtype=np.intp)
    shifted = z[sel] - np.max(z[sel])
    expd = np.exp(shifted)
    gates = np.zeros(router.n_experts)
    gates[sel] = expd / np.sum(expd)
    return GateVector(gates, active)


def swap_halfspaces(router: RouterSpec, coalition: Coalition):
    """The k(N-k) single-swap halfspaces describing cell V(I).

    Rows are ordered by (u in I ascending, v outside I ascending).
    Returns (normals, offsets, warnings, empty): rows whose normal is
    exactly zero degenerate to a bias comparison and are dropped -- with
    ``empty`` set when such a comparison already fails, meaning the
    open cell cannot contain any point.
    """
    I = tuple(sorted(coalition))
    if len(I) != router.k or len(set(I)) != len(I):
        raise ContractViolation(f"coalition {coalition} is not a size-{router.k} index set")
    if any(not 0 <= u < router.n_experts for u in I):
        raise ContractViolation(f"coalition {coalition} out of range")
    outside = [v for v in range(router.n_experts) if v not in I]
    normals, offsets, warnings = [], [], []
    empty = False
    for u in I:
        for v in outside:
            w = router.weights[u] - router.weights[v]
            b = router.biases[u] - router.biases[v]
            if np.linalg.norm(w) < 1e-300:
                if b <= 0.0:
                    warnings.append(
                        f"experts {u} and {v} have identical weights and expert {u} "
                        "never strictly wins: cell is empty"
                    )
                    empty = True
                else:
                    warnings.append(
                        f"experts {u} and {v} have identical weights; comparison "
                        "reduces to the bias gap and is dropped"
                    )
                continue
            normals.append(w)
            offsets.append(b)
    n = np.array(normals) if normals else np.zeros((0, router.dim))
    o = np.array(offsets) if offsets else np.zeros(0)
    return n, o, warnings, empty


def build_routing_cell(
    router: RouterSpec, coalition: Coalition, *, box_radius: float = R_BOX
) -> RoutingCell:
    """Build V(I) and certify whether it has interior."""
    normals, offsets, warnings, empty = swap_halfspaces(router, coalition)
    if empty:
        feas = FeasibilityResult(False, None, -np.inf, box_radius)
    else:
        feas = strict_feasibility(normals, offsets, router.dim, box_radius=box_radius)
    return RoutingCell(tuple(sorted(coalition)), normals, offsets, feas, warnings)


def enumerate_routing_cells(
    router: RouterSpec,
    *,
    budget: int = COALITION_BUDGET,
    box_radius: float = R_BOX,
) -> list[RoutingCell]:
    """All coalitions whose cell has nonempty interior, in lexicographic order."""
    size = math.comb(router.n_experts, router.k)
    if size > budget:
        raise BudgetExceeded(
            f"{size} coalitions exceed the enumeration budget of {budget}", size, budget
        )
    cells = []
    for I in coalitions(router.n_experts, router.k):
        cell = build_routing_cell(router, I, box_radius=box_radius)
        if cell.feasibility.feasible:
            cells.append(cell)
    return cells


def routing_polynomial(router: RouterSpec) -> TropicalPolynomial:
    """The router's score polynomial: best achievable sum of k logits.

    Term order matches ``coalitions(N, k)``, so the argmax term index
    identifies the active coalition away from ties.
    """
    return build_sym_trop_k(router.weights, router.biases, router.k)


@dataclass
class RedundancyReport:
    """Certificates that single swaps imply all coalition comparisons."""

    n_experts: int
    k: int
    n_cells: int
    n_pairs: int
    max_excess: float
    violations: list[dict]
    passed: bool


def verify_redundancy(
    router: RouterSpec,
    *,
    tol: float = 10 * EPS_LP,
    box_radius: float = R_BOX,
    budget: int = COALITION_BUDGET,
) -> RedundancyReport:
    """Certify that on every feasible cell V(I) the coalition I beats all rivals.

    For each feasible I and each rival J the program maximizes the
    score gap S_J - S_I over the single-swap description of V(I); the
    normalized optimum must be nonpositive (up to ``tol``).  Rivals
    differing by one swap hold by construction; rivals exchanging m > 1
    experts are the substantive check.
    """
    cells = enumerate_routing_cells(router, budget=budget, box_radius=box_radius)
    n_pairs = 0
    max_excess = -np.inf
    violations: list[dict] = []
    for cell in cells:
        wI = router.weights[list(cell.coalition)].sum(axis=0)
        bI = router.biases[list(cell.coalition)].sum()
        for J in coalitions(router.n_experts, router.k):
            if J == cell.coalition:
                continue
            n_pairs += 1
            c = router.weights[list(J)].sum(axis=0) - wI
            c0 = router.biases[list(J)].sum() - bI
            norm = float(np.linalg.norm(c))
            if norm < 1e-12:
                excess = c0
            else:
                out = lp.maximize_linear(
                    c / norm, cell.normals, cell.offsets, box_radius=box_radius
                )
                if out.status != "optimal":
                    raise ContractViolation(
                        f"gap program on feasible cell {cell.coalition} ended {out.status}"
                    )
                excess = float(out.value) + c0 / norm
            max_excess = max(max_excess, excess)
            if excess > tol:
                violations.append(
                    {
                        "coalition": cell.coalition,
                        "rival": J,
                        "excess": float(excess),
                    }
                )
    return RedundancyReport(
        router.n_experts,
        router.k,
        len(cells),
        n_pairs,
        float(max_excess),
        violations,
        not violations,
    )


def cells_share_facet(
    router: RouterSpec,
    I: Coalition,
    J: Coalition,
    *,
    box_radius: float = R_BOX,
) -> bool:
    """Do the closures of V(I) and V(J) meet in a (d-1)-dimensional face?

    Certified by restricting both cells' remaining swap constraints to
    one separating hyperplane and testing strict feasibility there.
    Cells whose coalitions exchange m >= 2 experts never share a facet;
    for a single exchange (u out, v in) the separating hyperplane is
    the u-versus-v comparison.
    """
    I = tuple(sorted(I))
    J = tuple(sorted(J))
    diff_out = sorted(set(I) - set(J))
    diff_in = sorted(set(J) - set(I))
    if len(diff_out) != 1:
        return False
    u, v = diff_out[0], diff_in[0]
    sep_n = router.weights[u] - router.weights[v]
    sep_o = router.biases[u] - router.biases[v]
    if np.linalg.norm(sep_n) < 1e-300:
        return False
    nI, oI, _, emptyI = swap_halfspaces(router, I)
    nJ, oJ, _, emptyJ = swap_halfspaces(router, J)
    if emptyI or emptyJ:
        return False
    rows = np.vstack([[sep_n], nI, nJ])
    offs = np.concatenate([[sep_o], oI, oJ])
    # Drop the two copies of the separating comparison itself (it appears
    # with opposite signs in the two cells), then restrict to it.
    keep = [0]
    sep_unit = sep_n / np.linalg.norm(sep_n)
    for idx in range(1, rows.shape[0]):
        r = rows[idx]
        r_unit = r / np.linalg.norm(r)
        if min(np.linalg.norm(r_unit - sep_unit), np.linalg.norm(r_unit + sep_unit)) < 1e-9:
            continue
        keep.append(idx)
    rows = rows[keep]
    offs = offs[keep]
    reduced_n, reduced_o, _, basis = restrict_to_hyperplane(rows, offs, 0)
    if basis.shape[1] == 0:
        return bool(np.all(reduced_o > EPS_LP)) if reduced_o.size else True
    nz = np.linalg.norm(reduced_n, axis=1) > 1e-12
    if reduced_o[~nz].size and np.min(reduced_o[~nz]) <= EPS_LP:
        return False
    res = strict_feasibility(reduced_n[nz], reduced_o[nz], basis.shape[1], box_radius=box_radius)
    return res.feasible


@dataclass
class HypersimplexReport:
    """Vertex and adjacency structure of the lifted coalition polytope."""

    coalitions: list[Coalition]
    vertices: np.ndarray
    extreme: list[bool]
    edges: list[tuple[Coalition, Coalition]]
    n_distinct_vertices: int


def hypersimplex_projection(
    router: RouterSpec,
    *,
    check_edges: bool = True,
    budget: int = COALITION_BUDGET,
) -> HypersimplexReport:
    """Vertices sum_{i in I} w_i of the coalition polytope, with extremality.

    A coalition vertex is extreme exactly when some linear functional
    strictly separates it from all other coalition vertices, i.e. when
    its routing cell has interior in the bias-free (conical) sense.
    Edges connect coalitions exchanging exactly one expert whose cells
    share a facet.
    """
    size = math.comb(router.n_experts, router.k)
    if size > budget:
        raise BudgetExceeded(
            f"{size} coalitions exceed the budget of {budget}", size, budget
        )
    sets = coalitions(router.n_experts, router.k)
    verts = np.array([router.weights[list(I)].sum(axis=0) for I in sets])
    distinct = len({tuple(np.round(v, 9)) for v in verts})
    extreme = []
    for i, I in enumerate(sets):
        rows = np.delete(verts, i, axis=0) * -1.0 + verts[i]  # v_I - v_J per row
        norms = np.linalg.norm(rows, axis=1)
        if np.any(norms < 1e-12):
            extreme.append(False)
            continue
        slack, _, _ = lp.max_slack_point(
            rows, np.zeros(rows.shape[0]), router.dim, normalize=True, box_radius=1.0, auto_grow=False
        )
        extreme.append(bool(slack > EPS_LP))
    edges = []
    if check_edges:
        # Vertex adjacency is a property of the conical fan, so the facet
        # test runs on a bias-free copy of the router.
        conical = RouterSpec(router.weights, np.zeros(router.n_experts), router.k)
        for a in range(size):
            for b in range(a + 1, size):
                I, J = sets[a], sets[b]
                if len(set(I) ^ set(J)) != 2:
                    continue
                if cells_share_facet(conical, I, J):
                    edges.append((I, J))
    return HypersimplexReport(list(sets), verts, extreme, edges, distinct)

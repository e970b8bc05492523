"""Effective capacity on low-dimensional manifolds.

A piecewise-linear layer restricted to a curve or surface inside its
input space realizes far fewer pieces than it does ambiently: only the
regions whose closures meet the manifold count.  This module measures
that effective capacity three ways and keeps the routes independent:

* a sampling census of distinct activation patterns along the manifold
  (a certified lower bound on the true intersection count),
* exact walk oracles for one-dimensional manifolds (segments and
  circles), which locate every decision-surface crossing analytically
  and read the pattern off each arc, and
* closed-form ceilings -- ``phi(H, d_eff)`` for dense layers and
  ``measure * C(N, k) * phi(kH, d_eff)`` for Top-k layers, where the
  measure is the fraction of the unit sphere covered by the manifold's
  radial projection.

The dense-versus-MoE comparison (``resilience_experiment``) runs both
architectures over the same manifold and seeds and reports the ratio
of their effective counts against the ``C(N, k) * k^d_eff`` ceiling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import lp
from .arrangement import distinct_sign_patterns, zaslavsky_phi
from .capacity import ExpertSpec, MoESpec, moe_activation_census
from .errors import ContractViolation
from .lp import EPS_LP
from .routing import RouterSpec, route_top_k_batch

THETA_TUBE = 0.05
FRAME_TOL = 1e-10
EFFECTIVE_SAMPLES_DEFAULT = 1_000_000

_KINDS = ("segment", "circle", "sphere2", "affine_patch")
_STREAM_SAMPLE = 0x5A11
_STREAM_SPHERE = 0x5B22
_STREAM_CELLS = 0x5C33


@dataclass
class ManifoldSpec:
    """A parametric manifold embedded in R^d_in.

    kind is one of "segment" (d_eff 1; center +- extent * frame[:, 0]),
    "circle" (d_eff 1; radius circle in the plane of two frame
    columns), "sphere2" (d_eff 2; a round 2-sphere in the span of three
    frame columns, optionally cut to the spherical cap of half-angle
    ``cap_half_angle`` about the third column), or "affine_patch"
    (d_eff = number of frame columns; a box of half-extents ``extent``).
    Frame columns must be orthonormal.
    """

    kind: str
    center: np.ndarray
    frame: np.ndarray
    radius: float = 1.0
    extent: np.ndarray | float = 1.0
    cap_half_angle: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ContractViolation(f"unknown manifold kind {self.kind!r}")
        self.center = np.asarray(self.center, dtype=np.float64).ravel()
        self.frame = np.asarray(self.frame, dtype=np.float64)
        if self.frame.ndim == 1:
            self.frame = self.frame.reshape(-1, 1)
        if self.frame.ndim != 2 or self.frame.shape[0] != self.center.shape[0]:
            raise ContractViolation("frame must have one column per intrinsic direction")
        needed = {"segment": 1, "circle": 2, "sphere2": 3}.get(self.kind)
        if needed is not None and self.frame.shape[1] != needed:
            raise ContractViolation(
                f"{self.kind} needs {needed} frame column(s), got {self.frame.shape[1]}"
            )
        gram = self.frame.T @ self.frame
        if not np.allclose(gram, np.eye(self.frame.shape[1]), atol=FRAME_TOL):
            raise ContractViolation("frame columns are not orthonormal")
        if self.kind in ("circle", "sphere2") and not self.radius > 0.0:
            raise ContractViolation("radius must be positive")
        ext = np.asarray(self.extent, dtype=np.float64).ravel()
        if ext.size == 1:
            ext = np.full(self.frame.shape[1], float(ext[0]))
        if ext.size != self.frame.shape[1]:
            raise ContractViolation("extent must match the number of frame columns")
        if not np.all(ext > 0.0):
            raise ContractViolation("extents must be positive")
        self.extent = ext
        if self.cap_half_angle is not None:
            if self.kind != "sphere2":
                raise ContractViolation("cap_half_angle applies to sphere2 only")
            if not 0.0 < self.cap_half_angle <= np.pi:
                raise ContractViolation("cap_half_angle must lie in (0, pi]")

    @property
    def dim(self) -> int:
        return int(self.center.shape[0])

    @property
    def d_eff(self) -> int:
        if self.kind == "segment" or self.kind == "circle":
            return 1
        if self.kind == "sphere2":
            return 2
        return int(self.frame.shape[1])

    @classmethod
    def segment_between(cls, p, q) -> "ManifoldSpec":
        p = np.asarray(p, dtype=np.float64).ravel()
        q = np.asarray(q, dtype=np.float64).ravel()
        diff = q - p
        length = float(np.linalg.norm(diff))
        if length <= 0.0:
            raise ContractViolation("segment endpoints coincide")
        return cls(
            "segment",
            (p + q) / 2.0,
            (diff / length).reshape(-1, 1),
            extent=length / 2.0,
        )

    def min_distance_to_origin(self) -> float:
        """Exact distance from the origin to the manifold.

        Positive distance is what the spherical projection actually
        needs; the origin-centred unit sphere, for instance, is a
        perfectly valid projection domain.
        """
        c, F = self.center, self.frame
        if self.kind == "segment":
            u = F[:, 0]
            t = float(np.clip(-(c @ u), -self.extent[0], self.extent[0]))
            return float(np.linalg.norm(c + t * u))
        if self.kind == "circle":
            rho = float(np.linalg.norm(F.T @ c))
            val = float(c @ c) + self.radius**2 - 2.0 * self.radius * rho
            return math.sqrt(max(val, 0.0))
        if self.kind == "sphere2":
            u = F.T @ c
            alpha = np.pi if self.cap_half_angle is None else float(self.cap_half_angle)
            nrm = float(np.linalg.norm(u))
            if nrm < 1e-300:
                # Centre orthogonal to the sphere's span: all points are
                # equidistant from the origin.
                return math.sqrt(float(c @ c) + self.radius**2)
            u_perp = float(np.hypot(u[0], u[1]))
            if -u[2] / nrm >= math.cos(alpha):
                inner = -nrm
            else:
                inner = u[2] * math.cos(alpha) - u_perp * math.sin(alpha)
            val = float(c @ c) + self.radius**2 + 2.0 * self.radius * inner
            return math.sqrt(max(val, 0.0))
        t = np.clip(-(F.T @ c), -self.extent, self.extent)
        return float(np.linalg.norm(c + F @ t))


def sample_manifold(m: ManifoldSpec, n: int, seed: int = 0) -> np.ndarray:
    """Uniform samples on the manifold, prefix-stable in ``n``.

    Uniform means arc length for segments and circles, surface area for
    spheres (Archimedes: the axial coordinate is uniform on a cap), and
    Lebesgue measure for affine patches.  A single row-major draw feeds
    every point, so the first ``n1`` samples agree between calls with
    n = n1 and n = n2 >= n1 at the same seed.
    """
    if n < 1:
        raise ContractViolation("need at least one sample")
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), _STREAM_SAMPLE)))
    c, F = m.center, m.frame
    if m.kind == "segment":
        u = rng.random((n, 1))
        t = (2.0 * u[:, 0] - 1.0) * m.extent[0]
        return c[None, :] + t[:, None] * F[:, 0][None, :]
    if m.kind == "circle":
        u = rng.random((n, 1))
        theta = 2.0 * np.pi * u[:, 0]
        return (
            c[None, :]
            + m.radius * np.cos(theta)[:, None] * F[:, 0][None, :]
            + m.radius * np.sin(theta)[:, None] * F[:, 1][None, :]
        )
    if m.kind == "sphere2":
        u = rng.random((n, 2))
        alpha = np.pi if m.cap_half_angle is None else float(m.cap_half_angle)
        z = 1.0 - u[:, 0] * (1.0 - math.cos(alpha))
        phi = 2.0 * np.pi * u[:, 1]
        s = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        omega = np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=1)
        return c[None, :] + m.radius * omega @ F.T
    u = rng.random((n, F.shape[1]))
    t = (2.0 * u - 1.0) * m.extent[None, :]
    return c[None, :] + t @ F.T


@dataclass
class WalkCensus:
    """Exact pattern census of a one-dimensional manifold.

    ``params`` are the crossing parameters (segment coordinate or
    circle angle) of every decision surface that meets the manifold;
    the pattern on each arc between consecutive crossings is evaluated
    at its midpoint.
    """

    crossings: int
    params: list[float]
    distinct_patterns: int
    distinct_coalitions: int


def _pattern_rows(spec) -> tuple[np.ndarray, np.ndarray]:
    """Every decision surface of the layer as normalized rows."""
    if isinstance(spec, ExpertSpec):
        return lp.normalize_rows(spec.weights, spec.biases)
    rows = [e.weights for e in spec.experts]
    offs = [e.biases for e in spec.experts]
    Wr, br = spec.router.weights, spec.router.biases
    N = spec.n_experts
    swap_n, swap_b = [], []
    for u in range(N):
        for v in range(u + 1, N):
            wn = Wr[u] - Wr[v]
            if np.linalg.norm(wn) > 1e-300:
                swap_n.append(wn)
                swap_b.append(br[u] - br[v])
    if swap_n:
        rows.append(np.vstack(swap_n))
        offs.append(np.asarray(swap_b))
    return lp.normalize_rows(np.vstack(rows), np.concatenate(offs))


def _eval_patterns(spec, X: np.ndarray) -> tuple[set, set]:
    """Activation patterns (and coalitions) at explicit points, no margin."""
    patterns: set = set()
    coalitions: set = set()
    if isinstance(spec, ExpertSpec):
        vals = X @ spec.weights.T + spec.biases
        for row in vals:
            patterns.add(((), tuple(1 if v > 0 else -1 for v in row)))
        coalitions.add(())
        return patterns, coalitions
    active = route_top_k_batch(spec.router, X)
    for x, arow in zip(X, active):
        I = tuple(int(t) for t in arow)
        sgn = []
        for i in I:
            v = spec.experts[i].weights @ x + spec.experts[i].biases
            sgn.extend(1 if t > 0 else -1 for t in v)
        patterns.add((I, tuple(sgn)))
        coalitions.add(I)
    return patterns, coalitions


def segment_walk_census(spec, m: ManifoldSpec) -> WalkCensus:
    """Exact effective census of a segment by crossing enumeration.

    Every neuron hyperplane and every router comparison surface is an
    affine function of the segment parameter, so its crossing is a
    single root; sorting the roots and sampling each open interval's
    midpoint reads off all patterns exactly.
    """
    if m.kind != "segment":
        raise ContractViolation("segment_walk_census needs a segment manifold")
    W, b = _pattern_rows(spec)
    u = m.frame[:, 0]
    e = float(m.extent[0])
    a = W @ u
    v0 = W @ m.center + b
    ts: list[float] = []
    for ai, vi in zip(a, v0):
        if abs(ai) < 1e-300:
            continue
        t = -vi / ai
        if -e < t < e:
            ts.append(float(t))
    ts.sort()
    edges = [-e] + ts + [e]
    mids = np.array([(edges[i] + edges[i + 1]) / 2.0 for i in range(len(edges) - 1)])
    X = m.center[None, :] + mids[:, None] * u[None, :]
    patterns, coalitions = _eval_patterns(spec, X)
    return WalkCensus(len(ts), ts, len(patterns), len(coalitions))


def circle_walk_census(spec, m: ManifoldSpec) -> WalkCensus:
    """Exact effective census of a circle.

    On the circle x(theta) = c + r (cos theta f1 + sin theta f2) each
    surface w.x + b = 0 reads A cos theta + B sin theta + C = 0, which
    has zero or two roots; arcs between sorted roots carry the
    patterns.
    """
    if m.kind != "circle":
        raise ContractViolation("circle_walk_census needs a circle manifold")
    W, b = _pattern_rows(spec)
    f1, f2 = m.frame[:, 0], m.frame[:, 1]
    A = m.radius * (W @ f1)
    B = m.radius * (W @ f2)
    C = W @ m.center + b
    thetas: list[float] = []
    for Ai, Bi, Ci in zip(A, B, C):
        amp = math.hypot(Ai, Bi)
        if amp < 1e-300 or amp < abs(Ci):
            continue
        phi = math.atan2(Bi, Ai)
        dlt = math.acos(max(-1.0, min(1.0, -Ci / amp)))
        for t in (phi + dlt, phi - dlt):
            thetas.append(t % (2.0 * np.pi))
    thetas = sorted(set(thetas))
    if not thetas:
        mids = np.array([0.0])
    else:
        closed = thetas + [thetas[0] + 2.0 * np.pi]
        mids = np.array(
            [(closed[i] + closed[i + 1]) / 2.0 for i in range(len(thetas))]
        )
    X = (
        m.center[None, :]
        + m.radius * np.cos(mids)[:, None] * f1[None, :]
        + m.radius * np.sin(mids)[:, None] * f2[None, :]
    )
    patterns, coalitions = _eval_patterns(spec, X)
    return WalkCensus(len(thetas), [float(t) for t in thetas], len(patterns), len(coalitions))


def tangency_probe(spec, m: ManifoldSpec, *, jitter: float = 1e-6, n_jitter: int = 3, seed: int = 0) -> bool:
    """True when the crossing count is stable under tiny manifold jitters.

    A decision surface tangent to the manifold makes the crossing count
    jump under perturbation; generic (transversal) intersections do
    not.  Only one-dimensional kinds have the exact oracle this needs.
    """
    if m.kind not in ("segment", "circle"):
        return True
    walk = segment_walk_census if m.kind == "segment" else circle_walk_census
    base = walk(spec, m).crossings
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), 0x7A9)))
    for _ in range(n_jitter):
        shift = rng.normal(size=m.dim)
        shift *= jitter / max(np.linalg.norm(shift), 1e-300)
        m2 = ManifoldSpec(
            m.kind,
            m.center + shift,
            m.frame,
            radius=m.radius,
            extent=m.extent.copy(),
            cap_half_angle=m.cap_half_angle,
        )
        if walk(spec, m2).crossings != base:
            return False
    return True


@dataclass
class EffectiveCapacityReport:
    """Effective capacity of a layer restricted to a manifold."""

    distinct_patterns: int
    distinct_coalitions: int
    spherical_measure_estimate: float | None
    bound_dense: int
    bound_moe: float | None
    bound_crossing: int | None
    samples: int
    seed: int
    new_patterns_last_fraction: int
    converged: bool
    d_eff: int
    warnings: list[str] = field(default_factory=list)


def effective_census(
    spec,
    m: ManifoldSpec,
    n: int = EFFECTIVE_SAMPLES_DEFAULT,
    seed: int = 0,
    *,
    measure_samples: int = 20_000,
) -> EffectiveCapacityReport:
    """Distinct activation patterns among ``n`` manifold samples.

    The census is a lower bound on the number of linear regions whose
    closure meets the manifold.  Convergence is diagnosed by how many
    patterns appeared only in the final 10% of the sample stream.  The
    report carries phi-based ceilings: ``phi(width, d_eff)`` for the
    active width, the measure-weighted coalition bound for MoE specs,
    and the crossing ceiling for closed one-dimensional manifolds
    (a hyperplane meets a circle twice, so 2H can exceed phi(H, 1)).
    """
    X = sample_manifold(m, n, seed)
    n_head = max(1, int(round(n * 0.9)))
    warnings: list[str] = []
    if isinstance(spec, ExpertSpec):
        pats, _ = distinct_sign_patterns(spec.weights, spec.biases, X, min_margin=EPS_LP)
        head, _ = distinct_sign_patterns(
            spec.weights, spec.biases, X[:n_head], min_margin=EPS_LP
        )
        n_pat, n_coal = len(pats), 1
        tail_new = n_pat - len(head)
        width_active = spec.width
        bound_moe = None
        measure = None
    elif isinstance(spec, MoESpec):
        n_pat, pats, per_coal, _ = moe_activation_census(spec, points=X)
        n_head_pat, _, _, _ = moe_activation_census(spec, points=X[:n_head])
        n_coal = len(per_coal)
        tail_new = n_pat - n_head_pat
        width_active = spec.k * spec.width
        if measure_samples <= 0:
            measure = None
        elif m.min_distance_to_origin() > 0.0:
            sm = spherical_measure(spec.router, m, measure_samples, seed)
            measure = sm.estimate
            if sm.tube_density is not None:
                # Projection has zero sphere volume at this codimension;
                # the volume-weighted coalition bound is uninformative.
                warnings.append("MEASURE_ZERO_CODIM: tube density reported instead")
                measure = None
        else:
            measure = None
            warnings.append("MEASURE_UNDEFINED: manifold meets the origin")
        n_coal_bound = math.comb(spec.n_experts, spec.k)
        phi = zaslavsky_phi(width_active, m.d_eff)
        bound_moe = None if measure is None else measure * n_coal_bound * phi
    else:
        raise ContractViolation("spec must be an ExpertSpec or MoESpec")
    if m.kind == "circle":
        bound_crossing = 2 * width_active
    elif m.kind == "segment":
        bound_crossing = width_active + 1
    else:
        bound_crossing = None
    if not tangency_probe(spec, m, seed=seed):
        warnings.append("NEAR_TANGENT: crossing count unstable under jitter")
    return EffectiveCapacityReport(
        distinct_patterns=n_pat,
        distinct_coalitions=n_coal,
        spherical_measure_estimate=measure,
        bound_dense=zaslavsky_phi(width_active, m.d_eff),
        bound_moe=bound_moe,
        bound_crossing=bound_crossing,
        samples=int(n),
        seed=int(seed),
        new_patterns_last_fraction=int(tail_new),
        converged=tail_new == 0,
        d_eff=m.d_eff,
        warnings=warnings,
    )


@dataclass
class SphericalMeasureReport:
    """Monte-Carlo estimate of the sphere fraction covered by pi(M)."""

    estimate: float
    stderr: float
    strategy: str
    theta_tube: float | None
    tube_density: float | None
    cell_estimate: float | None
    cell_stderr: float | None
    n_sphere: int


def _projection_membership(m: ManifoldSpec):
    """Exact membership test for pi(M) when one exists, else None."""
    if m.kind == "sphere2" and np.linalg.norm(m.center) <= 1e-12:
        F = m.frame
        alpha = np.pi if m.cap_half_angle is None else float(m.cap_half_angle)
        cos_a = math.cos(alpha)

        def member(U: np.ndarray) -> np.ndarray:
            local = U @ F
            inplane = np.linalg.norm(local, axis=1)
            ok = np.abs(inplane - 1.0) <= 1e-9
            return ok & (local[:, 2] >= cos_a - 1e-12)

        return member
    if m.kind == "circle" and m.dim == 2 and np.linalg.norm(m.center) <= 1e-12:
        return lambda U: np.ones(U.shape[0], dtype=bool)
    return None


def spherical_measure(
    router,
    m: ManifoldSpec,
    n: int = 20_000,
    seed: int = 0,
    *,
    theta_tube: float = THETA_TUBE,
    n_manifold: int | None = None,
) -> SphericalMeasureReport:
    """Measure of the radial projection pi(M) on the unit sphere.

    Primary estimator: uniform sphere samples are counted as hits when
    they land within angular distance ``theta_tube`` of the projected
    manifold (or inside it exactly, for origin-centred spheres where
    membership is analytic).  When the projection has codimension >= 1
    on the sphere its volume is zero; the tube count is then converted
    into a length density via the analytic tube volume ``2 sin(theta)``
    per unit length.  Secondary estimator, reported alongside: the mean
    fraction of an isotropic router's C(N, k) cells whose cones contain
    a projected sample.  ``router`` may be a RouterSpec, a membership
    predicate over sphere points, or None.
    """
    if m.min_distance_to_origin() <= 0.0:
        raise ContractViolation("spherical projection undefined: manifold meets the origin")
    d = m.dim
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), _STREAM_SPHERE)))
    U = rng.normal(size=(n, d))
    U /= np.linalg.norm(U, axis=1)[:, None]

    if callable(router) and not isinstance(router, RouterSpec):
        hits = np.asarray(router(U), dtype=bool)
        p = float(np.mean(hits))
        se = math.sqrt(max(p * (1.0 - p), 0.0) / n)
        return SphericalMeasureReport(p, se, "predicate", None, None, None, None, n)

    member = _projection_membership(m)
    n_cloud = n_manifold if n_manifold is not None else max(4096, 4 * n)
    P = sample_manifold(m, n_cloud, seed + 1)
    P /= np.linalg.norm(P, axis=1)[:, None]
    if member is not None:
        hits = member(U)
        strategy = "exact-membership"
    else:
        cos_tube = math.cos(theta_tube)
        # Angular nearest neighbour against the projected sample cloud,
        # blocked to bound memory.
        hits = np.zeros(n, dtype=bool)
        block = max(1, 2**22 // max(P.shape[0], 1))
        for lo in range(0, n, block):
            sub = U[lo : lo + block]
            best = np.max(sub @ P.T, axis=1)
            hits[lo : lo + sub.shape[0]] = best >= cos_tube
        strategy = "tube"
    p = float(np.mean(hits))
    se = math.sqrt(max(p * (1.0 - p), 0.0) / n)
    codim = (d - 1) - m.d_eff
    tube_density = None
    if strategy == "tube" and codim >= 1:
        # Sphere surface area of S^{d-1} divided by the cross-section of
        # a codimension-1 tube: volume estimate of pi(M) itself is 0.
        area = 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)
        tube_density = p * area / (2.0 * math.sin(theta_tube))
        estimate = 0.0
    else:
        estimate = p

    cell_est = cell_se = None
    if isinstance(router, RouterSpec):
        N, k = router.n_experts, router.k
        total = math.comb(N, k)
        crng = np.random.default_rng(np.random.SeedSequence((int(seed), _STREAM_CELLS)))
        fracs = []
        for _ in range(32):
            rr = RouterSpec(crng.normal(size=(N, d)), np.zeros(N), k)
            active = route_top_k_batch(rr, P)
            seen = {tuple(int(t) for t in row) for row in np.unique(active, axis=0)}
            fracs.append(len(seen) / total)
        cell_est = float(np.mean(fracs))
        cell_se = float(np.std(fracs, ddof=1) / math.sqrt(len(fracs)))
    return SphericalMeasureReport(
        estimate, se, strategy, theta_tube if strategy == "tube" else None,
        tube_density, cell_est, cell_se, n,
    )


@dataclass
class ResilienceReport:
    """Dense-versus-MoE effective capacity over matched manifolds."""

    N: int
    k: int
    H: int
    d_in: int
    d_eff: int
    rows: list[dict]
    median_dense: float
    median_moe: float
    median_ratio: float
    ceiling: float
    rank_deficient: bool
    warnings: list[str] = field(default_factory=list)


def resilience_experiment(
    N: int,
    k: int,
    H: int,
    d_in: int,
    manifold: ManifoldSpec,
    seeds,
    *,
    n_samples: int = 100_000,
) -> ResilienceReport:
    """Compare a width-H dense layer to an (N, k, H) MoE on one manifold.

    Both architectures draw Gaussian weights per seed, are censused on
    the same manifold samples, and contribute one ratio row.  The
    theoretical ceiling on the ratio is C(N, k) * k^d_eff.  When
    kH < d_eff the active arrangement cannot have full rank on the
    manifold; the experiment still runs but is flagged RANK_DEFICIENT.
    """
    if manifold.dim != d_in:
        raise ContractViolation("manifold dimension does not match d_in")
    d_eff = manifold.d_eff
    warnings: list[str] = []
    rank_deficient = k * H < d_eff
    if rank_deficient:
        warnings.append("RANK_DEFICIENT: kH < d_eff")
    rows: list[dict] = []
    for s in seeds:
        drng = np.random.default_rng(np.random.SeedSequence((int(s), 0xD37)))
        mrng = np.random.default_rng(np.random.SeedSequence((int(s), 0x3073)))
        dense = ExpertSpec(drng.normal(size=(H, d_in)), drng.normal(size=H))
        router = RouterSpec(mrng.normal(size=(N, d_in)), mrng.normal(size=N), k)
        experts = [
            ExpertSpec(mrng.normal(size=(H, d_in)), mrng.normal(size=H))
            for _ in range(N)
        ]
        moe = MoESpec(router, experts)
        drep = effective_census(dense, manifold, n_samples, s)
        mrep = effective_census(moe, manifold, n_samples, s, measure_samples=0)
        rows.append(
            {
                "seed": int(s),
                "dense": drep.distinct_patterns,
                "moe": mrep.distinct_patterns,
                "coalitions": mrep.distinct_coalitions,
                "ratio": mrep.distinct_patterns / max(drep.distinct_patterns, 1),
            }
        )
    def med(key: str) -> float:
        return float(np.median([r[key] for r in rows]))

    return ResilienceReport(
        N=int(N),
        k=int(k),
        H=int(H),
        d_in=int(d_in),
        d_eff=d_eff,
        rows=rows,
        median_dense=med("dense"),
        median_moe=med("moe"),
        median_ratio=med("ratio"),
        ceiling=float(math.comb(N, k) * k**d_eff),
        rank_deficient=rank_deficient,
        warnings=warnings,
    )

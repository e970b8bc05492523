"""Manifold sampling, walk oracles, spherical measure, resilience."""

import math

import numpy as np
import pytest

from tropcap.capacity import ExpertSpec, MoESpec
from tropcap.errors import ContractViolation
from tropcap.manifold import (
    ManifoldSpec,
    circle_walk_census,
    effective_census,
    resilience_experiment,
    sample_manifold,
    segment_walk_census,
    spherical_measure,
    tangency_probe,
)
from tropcap.routing import RouterSpec


def _dense(H, d, seed):
    rng = np.random.default_rng(seed)
    return ExpertSpec(rng.normal(size=(H, d)), 0.3 * rng.normal(size=H))


def _moe(N, k, H, d, seed):
    rng = np.random.default_rng(seed)
    router = RouterSpec(rng.normal(size=(N, d)), rng.normal(size=N), k)
    experts = [ExpertSpec(rng.normal(size=(H, d)), rng.normal(size=H)) for _ in range(N)]
    return MoESpec(router, experts)


def _eye_frame(d, cols):
    return np.eye(d)[:, :cols]


def test_spec_validation():
    with pytest.raises(ContractViolation):
        ManifoldSpec("moebius", np.zeros(2), _eye_frame(2, 1))
    with pytest.raises(ContractViolation):
        ManifoldSpec("circle", np.zeros(3), _eye_frame(3, 1))
    bad = np.array([[1.0, 1.0], [0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ContractViolation):
        ManifoldSpec("circle", np.zeros(3), bad)
    with pytest.raises(ContractViolation):
        ManifoldSpec("circle", np.zeros(3), _eye_frame(3, 2), radius=-1.0)
    with pytest.raises(ContractViolation):
        ManifoldSpec("segment", np.zeros(3), _eye_frame(3, 1), cap_half_angle=0.5)
    with pytest.raises(ContractViolation):
        ManifoldSpec("sphere2", np.zeros(3), _eye_frame(3, 3), cap_half_angle=4.0)
    with pytest.raises(ContractViolation):
        ManifoldSpec.segment_between([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ContractViolation):
        ManifoldSpec("affine_patch", np.zeros(3), _eye_frame(3, 2), extent=[1.0, 2.0, 3.0])


def test_sampling_lies_on_each_manifold():
    seg = ManifoldSpec.segment_between([0.0, 1.0, 0.0], [2.0, 1.0, 0.0])
    X = sample_manifold(seg, 400, seed=1)
    assert np.allclose(X[:, 1], 1.0) and np.allclose(X[:, 2], 0.0)
    assert X[:, 0].min() >= 0.0 and X[:, 0].max() <= 2.0

    circ = ManifoldSpec("circle", [0.5, 0.0, 2.0], _eye_frame(3, 2), radius=1.5)
    X = sample_manifold(circ, 400, seed=2)
    assert np.allclose(np.linalg.norm(X - circ.center, axis=1), 1.5)
    assert np.allclose(X[:, 2], 2.0)

    cap = ManifoldSpec("sphere2", np.zeros(3), np.eye(3), radius=2.0, cap_half_angle=np.pi / 3)
    X = sample_manifold(cap, 400, seed=3)
    assert np.allclose(np.linalg.norm(X, axis=1), 2.0)
    assert np.all(X[:, 2] / 2.0 >= math.cos(np.pi / 3) - 1e-12)

    patch = ManifoldSpec("affine_patch", [1.0, 0.0, 0.0], _eye_frame(3, 2), extent=[0.5, 2.0])
    X = sample_manifold(patch, 400, seed=4)
    assert np.all(np.abs(X[:, 0] - 1.0) <= 0.5)
    assert np.all(np.abs(X[:, 1]) <= 2.0)
    assert np.allclose(X[:, 2], 0.0)


def test_sampling_prefix_stable():
    m = ManifoldSpec("circle", [0.5, 0.2, 0.1], _eye_frame(3, 2), radius=2.0)
    short = sample_manifold(m, 500, seed=7)
    long = sample_manifold(m, 2000, seed=7)
    assert np.array_equal(long[:500], short)
    assert not np.array_equal(sample_manifold(m, 500, seed=8), short)


def test_min_distance_to_origin_closed_forms():
    assert ManifoldSpec.segment_between([1.0, 1.0], [1.0, -1.0]).min_distance_to_origin() == pytest.approx(1.0)
    assert ManifoldSpec.segment_between([-1.0, -1.0], [1.0, 1.0]).min_distance_to_origin() == 0.0
    assert ManifoldSpec.segment_between([2.0, 0.0], [3.0, 0.0]).min_distance_to_origin() == pytest.approx(2.0)

    circ = ManifoldSpec("circle", [3.0, 0.0, 4.0], _eye_frame(3, 2), radius=1.0)
    assert circ.min_distance_to_origin() == pytest.approx(math.sqrt(20.0))

    sph = ManifoldSpec("sphere2", np.zeros(3), np.eye(3), radius=1.5)
    assert sph.min_distance_to_origin() == pytest.approx(1.5)
    lifted = ManifoldSpec(
        "sphere2", [0.0, 0.0, 2.0], np.eye(3), radius=1.0, cap_half_angle=np.pi / 2
    )
    assert lifted.min_distance_to_origin() == pytest.approx(math.sqrt(5.0))

    patch = ManifoldSpec("affine_patch", [2.0, 0.0], _eye_frame(2, 1), extent=1.0)
    assert patch.min_distance_to_origin() == pytest.approx(1.0)

    # Sampled distances can only exceed the analytic minimum.
    for m in (circ, sph, lifted, patch):
        X = sample_manifold(m, 2000, seed=0)
        assert np.linalg.norm(X, axis=1).min() >= m.min_distance_to_origin() - 1e-9


def test_segment_walk_agrees_with_census():
    dense = _dense(6, 2, seed=40)
    seg = ManifoldSpec.segment_between([-2.0, -1.5], [2.0, 1.8])
    walk = segment_walk_census(dense, seg)
    assert walk.distinct_patterns == walk.crossings + 1
    rep = effective_census(dense, seg, n=50_000, seed=0)
    assert rep.distinct_patterns == walk.distinct_patterns
    assert rep.bound_crossing == 6 + 1
    assert rep.distinct_patterns <= rep.bound_crossing
    assert rep.bound_dense == 7  # phi(6, 1)
    assert rep.converged
    assert rep.d_eff == 1


def test_circle_walk_bounds_census():
    dense = _dense(8, 2, seed=41)
    circ = ManifoldSpec("circle", [0.3, -0.2], np.eye(2), radius=2.0)
    walk = circle_walk_census(dense, circ)
    assert walk.distinct_patterns <= max(walk.crossings, 1)
    rep = effective_census(dense, circ, n=40_000, seed=0)
    assert rep.distinct_patterns <= walk.distinct_patterns
    assert rep.bound_crossing == 16
    assert walk.crossings <= 16


def test_moe_walk_tracks_coalitions():
    moe = _moe(4, 2, 3, 3, seed=42)
    circ = ManifoldSpec("circle", [0.5, 0.2, 0.1], _eye_frame(3, 2), radius=2.0)
    walk = circle_walk_census(moe, circ)
    assert walk.distinct_coalitions <= min(6, walk.distinct_patterns)
    rep = effective_census(moe, circ, n=30_000, seed=0, measure_samples=0)
    assert rep.distinct_coalitions <= 6
    assert rep.distinct_patterns <= walk.distinct_patterns
    assert rep.spherical_measure_estimate is None and rep.bound_moe is None


def test_effective_census_prefix_monotone():
    dense = _dense(10, 3, seed=43)
    circ = ManifoldSpec("circle", [0.5, 0.2, 0.1], _eye_frame(3, 2), radius=2.0)
    small = effective_census(dense, circ, n=5_000, seed=5)
    large = effective_census(dense, circ, n=20_000, seed=5)
    assert large.distinct_patterns >= small.distinct_patterns


def test_spherical_measure_exact_cases():
    full = ManifoldSpec("sphere2", np.zeros(3), np.eye(3), radius=1.5)
    rep = spherical_measure(None, full, n=4_000, seed=0)
    assert rep.strategy == "exact-membership"
    assert rep.estimate == 1.0

    hemi = ManifoldSpec("sphere2", np.zeros(3), np.eye(3), radius=1.0, cap_half_angle=np.pi / 2)
    rep = spherical_measure(None, hemi, n=20_000, seed=0)
    assert rep.estimate == pytest.approx(0.5, abs=0.02)

    ring = ManifoldSpec("circle", np.zeros(2), np.eye(2), radius=3.0)
    rep = spherical_measure(None, ring, n=2_000, seed=0)
    assert rep.estimate == 1.0


def test_spherical_measure_predicate_and_tube():
    hemi = ManifoldSpec("sphere2", np.zeros(3), np.eye(3), radius=1.0)
    rep = spherical_measure(lambda U: U[:, 0] > 0.0, hemi, n=20_000, seed=0)
    assert rep.strategy == "predicate"
    assert rep.estimate == pytest.approx(0.5, abs=0.02)

    great = ManifoldSpec("circle", np.zeros(3), _eye_frame(3, 2), radius=2.0)
    rep = spherical_measure(None, great, n=20_000, seed=0)
    assert rep.strategy == "tube"
    assert rep.estimate == 0.0
    # The projected circle is a unit great circle of length 2*pi.
    assert rep.tube_density == pytest.approx(2.0 * math.pi, rel=0.1)


def test_spherical_measure_cell_estimator_reports():
    router = RouterSpec(np.random.default_rng(44).normal(size=(4, 3)), np.zeros(4), 2)
    full = ManifoldSpec("sphere2", np.zeros(3), np.eye(3), radius=1.0)
    rep = spherical_measure(router, full, n=4_000, seed=0)
    assert rep.cell_estimate is not None
    assert 0.0 < rep.cell_estimate <= 1.0


def test_spherical_measure_refuses_origin():
    through = ManifoldSpec.segment_between([-1.0, 0.0], [1.0, 0.0])
    with pytest.raises(ContractViolation, match="manifold meets the origin"):
        spherical_measure(None, through, n=100, seed=0)


def test_effective_census_codim_warning():
    moe = _moe(3, 1, 2, 3, seed=45)
    seg = ManifoldSpec.segment_between([0.5, -2.0, 0.3], [0.2, 2.5, -0.4])
    rep = effective_census(moe, seg, n=10_000, seed=0, measure_samples=4_000)
    assert any(w.startswith("MEASURE_ZERO_CODIM") for w in rep.warnings)
    assert rep.spherical_measure_estimate is None
    assert rep.bound_moe is None


def test_tangency_probe_generic_segment():
    dense = _dense(5, 2, seed=46)
    seg = ManifoldSpec.segment_between([-2.0, -1.0], [2.0, 1.3])
    assert tangency_probe(dense, seg)


def test_resilience_experiment_ratio_and_ceiling():
    seg = ManifoldSpec.segment_between([0.5, -2.0, 0.3], [0.2, 2.5, -0.4])
    rep = resilience_experiment(4, 2, 4, 3, seg, seeds=range(4), n_samples=20_000)
    assert rep.ceiling == math.comb(4, 2) * 2  # C(N,k) * k^d_eff
    assert not rep.rank_deficient
    assert rep.median_ratio <= rep.ceiling + 1e-9
    assert len(rep.rows) == 4
    assert rep.median_dense >= 1.0 and rep.median_moe >= 1.0


def test_resilience_rank_deficient_flag():
    sph = ManifoldSpec("sphere2", [0.0, 0.0, 3.0], np.eye(3), radius=1.0)
    rep = resilience_experiment(2, 1, 1, 3, sph, seeds=[0, 1], n_samples=2_000)
    assert rep.rank_deficient
    assert rep.median_ratio >= 0.0

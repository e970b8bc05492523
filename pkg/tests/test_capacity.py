"""Counting and bounds for dense and Top-k layers."""

import itertools
import math

import numpy as np
import pytest

from tropcap import lp
from tropcap.arrangement import zaslavsky_phi
from tropcap.capacity import (
    ExpertSpec,
    MoESpec,
    Zonotope,
    anchored_top1_moe,
    bound_table,
    count_dense_regions,
    count_top1_regions,
    count_topk_regions,
    expert_zonotope,
    lower_bound_construction,
    moe_activation_census,
    scaling_probe,
    zonotope_vertex_count,
)
from tropcap.errors import ContractViolation
from tropcap.routing import RouterSpec


def _moe(N, k, H, d, seed):
    rng = np.random.default_rng(seed)
    router = RouterSpec(rng.normal(size=(N, d)), rng.normal(size=N), k)
    experts = [ExpertSpec(rng.normal(size=(H, d)), rng.normal(size=H)) for _ in range(N)]
    return MoESpec(router, experts)


def test_dense_generic_is_tight():
    rng = np.random.default_rng(30)
    dense = ExpertSpec(rng.normal(size=(8, 2)), rng.normal(size=8))
    rep = count_dense_regions(dense, seed=0)
    assert rep.exact_count == rep.census_count == rep.bound_upper == 37
    assert rep.params_active == rep.params_total == 16


def test_dense_budget_census_only():
    rng = np.random.default_rng(31)
    dense = ExpertSpec(rng.normal(size=(26, 2)), rng.normal(size=26))
    rep = count_dense_regions(dense, census_samples=200_000, seed=0)
    assert rep.exact_count is None
    assert rep.warnings
    assert rep.census_count <= zaslavsky_phi(26, 2)
    assert rep.census_count >= 0.95 * zaslavsky_phi(26, 2)


def test_topk_exact_census_and_bounds_agree():
    moe = _moe(4, 2, 3, 2, seed=32)
    rep = count_topk_regions(moe, census_samples=300_000, seed=0)
    assert rep.exact_count is not None
    assert rep.exact_count == rep.census_count
    assert rep.exact_count <= rep.bound_upper
    per_cell_sum = sum(c["count"] for c in rep.per_cell)
    assert per_cell_sum == rep.exact_count
    for cell in rep.per_cell:
        assert cell["count"] <= cell["bound_refined"]
    assert rep.bound_upper == math.comb(4, 2) * zaslavsky_phi(6, 2)
    assert rep.params_active == 2 * 3 * 2 + 4 * 2


def test_top1_equals_per_expert_restriction():
    moe = _moe(5, 1, 3, 2, seed=33)
    rep = count_top1_regions(moe, census_samples=200_000, seed=0)
    assert rep.mode == "top1"
    assert rep.exact_count == rep.census_count
    assert rep.exact_count <= 5 * zaslavsky_phi(3, 2)


def test_census_is_lower_bound_many_seeds():
    for seed in range(6):
        moe = _moe(4, 2, 2, 2, seed=100 + seed)
        rep = count_topk_regions(moe, census_samples=50_000, seed=seed)
        assert rep.census_count <= rep.exact_count


def test_bound_table_reference_row():
    rows = {r["mode"]: r for r in bound_table(8, 2, 8, 2)}
    assert rows["dense"]["bound"] == 37
    assert rows["top1"]["bound"] == 296
    assert rows["topk"]["bound"] == 3836
    assert rows["topk-normalized"]["bound"] == 1036
    assert rows["dense"]["params_active"] == 16
    assert rows["top1"]["params_active"] == 32
    assert rows["topk"]["params_active"] == 48
    assert rows["topk-normalized"]["params_active"] == 32
    assert rows["dense"]["params_total"] == 16
    for mode in ("top1", "topk", "topk-normalized"):
        assert rows[mode]["params_total"] == 8 * 8 * 2 + 8 * 2
    assert rows["topk"]["asymptotic"] == "Theta(C(N,k) (kH)^2)"


def test_bound_table_dominance():
    # The sparse bound always dominates the normalized and dense ones.
    for H, d, N, k in ((4, 2, 6, 2), (3, 3, 5, 2), (6, 2, 8, 3)):
        rows = {r["mode"]: r for r in bound_table(H, d, N, k)}
        assert rows["topk"]["bound"] >= rows["topk-normalized"]["bound"]
        assert rows["topk-normalized"]["bound"] >= rows["dense"]["bound"]
        assert rows["top1"]["bound"] == N * zaslavsky_phi(H, d)


def test_lower_bound_construction_realizes_all_cells():
    from tropcap.routing import enumerate_routing_cells

    moe = lower_bound_construction(3, 2, 2, 3, seed=0)
    cells = enumerate_routing_cells(moe.router)
    assert len(cells) == 3
    with pytest.raises(ContractViolation):
        lower_bound_construction(5, 2, 2, 3, seed=0)


def test_anchored_construction_saturates_linear_bound():
    for N in (2, 4):
        for seed in (0, 1):
            moe = anchored_top1_moe(N, 3, 2, seed=seed)
            rep = count_topk_regions(moe, include_router_cuts=False, seed=seed)
            assert rep.exact_count == N * zaslavsky_phi(3, 2)


def test_zonotope_generic_formula():
    rng = np.random.default_rng(34)
    z = Zonotope(rng.normal(size=(3, 2)))
    rep = zonotope_vertex_count(z)
    assert rep.enumerated_vertices == 6 == rep.formula
    assert rep.formula_untruncated == 8
    assert rep.matches_formula
    z3 = Zonotope(rng.normal(size=(5, 3)))
    rep3 = zonotope_vertex_count(z3)
    assert rep3.enumerated_vertices == 22 == rep3.formula


def test_zonotope_vertices_against_hull_oracle():
    # Brute force: a subset sum is a vertex iff an LP strictly separates
    # it from every other subset sum.
    rng = np.random.default_rng(35)
    G = rng.normal(size=(4, 2))
    sums = np.array([
        np.asarray(mask) @ G for mask in itertools.product((0.0, 1.0), repeat=4)
    ])
    n_vertices = 0
    for i in range(len(sums)):
        rows = np.delete(sums, i, axis=0) - sums[i]
        # Want c with rows @ c < 0 strictly: feasibility of -rows c > 0.
        slack, _, _ = lp.max_slack_point(-rows, np.zeros(len(rows)), 2, box_radius=1.0, auto_grow=False)
        if slack > 1e-7:
            n_vertices += 1
    rep = zonotope_vertex_count(expert_zonotope(ExpertSpec(G, np.zeros(4))))
    # The lifted generators [W | b] with b = 0 degenerate to the plain one.
    assert rep.dim == 3  # lift adds the bias coordinate
    plain = zonotope_vertex_count(Zonotope(G))
    assert plain.enumerated_vertices == n_vertices


def test_scaling_probe_dense_slope():
    rep = scaling_probe("dense-width", [4, 8, 16], d=2, n_seeds=3, seed=0)
    assert 1.7 <= rep.slope <= 2.2
    assert rep.family == "gaussian"
    assert len(rep.rows) == 9


def test_scaling_probe_anchored_ratios():
    rep = scaling_probe(
        "top1-experts", [2, 4], d=2, H=3, n_seeds=2, seed=0, family="anchored"
    )
    assert rep.ratios == [2.0]
    with pytest.raises(ContractViolation):
        scaling_probe("dense-width", [4, 8], family="anchored")
    with pytest.raises(ContractViolation):
        scaling_probe("no-such-mode", [1, 2])


def test_moe_census_respects_margins():
    moe = _moe(3, 1, 2, 2, seed=36)
    count, patterns, per_coalition, n_used = moe_activation_census(
        moe, n_samples=20_000, seed=0
    )
    assert count == len(patterns)
    assert sum(per_coalition.values()) == count
    for coalition, _ in patterns:
        assert len(coalition) == 1

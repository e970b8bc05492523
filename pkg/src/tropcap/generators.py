"""Seeded spec generators.

Seeds are split into named streams -- router weights, expert weights,
and sample draws come from independent child sequences of the master
seed -- so regenerating with a different sample budget never changes
the weights, and vice versa.
"""

from __future__ import annotations

import numpy as np

from .capacity import ExpertSpec, MoESpec, lower_bound_construction
from .routing import RouterSpec

STREAM_ROUTER = 0x526F
STREAM_EXPERTS = 0x4578
STREAM_SAMPLES = 0x5361
STREAM_ARRANGEMENT = 0x4172


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((int(seed), int(stream))))


def gaussian_dense(H: int, d: int, seed: int = 0) -> ExpertSpec:
    """A dense ReLU layer with i.i.d. standard normal weights and biases."""
    rng = _rng(seed, STREAM_EXPERTS)
    return ExpertSpec(rng.normal(size=(H, d)), rng.normal(size=H))


def gaussian_router(N: int, k: int, d: int, seed: int = 0) -> RouterSpec:
    rng = _rng(seed, STREAM_ROUTER)
    return RouterSpec(rng.normal(size=(N, d)), rng.normal(size=N), k)


def gaussian_moe(N: int, k: int, H: int, d: int, seed: int = 0) -> MoESpec:
    router = gaussian_router(N, k, d, seed)
    rng = _rng(seed, STREAM_EXPERTS)
    experts = [ExpertSpec(rng.normal(size=(H, d)), rng.normal(size=H)) for _ in range(N)]
    return MoESpec(router, experts)


def gaussian_arrangement(n: int, d: int, seed: int = 0):
    """Random normals and offsets; almost surely in general position."""
    rng = _rng(seed, STREAM_ARRANGEMENT)
    return rng.normal(size=(n, d)), rng.normal(size=n)


def identity_lower_bound(N: int, k: int, H: int, d_in: int, seed: int = 0) -> MoESpec:
    """Identity-router construction; requires d_in >= N."""
    return lower_bound_construction(N, k, H, d_in, seed=seed)


def sample_stream(seed: int) -> np.random.Generator:
    return _rng(seed, STREAM_SAMPLES)

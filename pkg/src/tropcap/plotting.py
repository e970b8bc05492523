"""Figure rendering for report files.

Every CLI report path can drop a small set of matplotlib figures next
to the JSON/CSV output.  Figures are illustrations, not data: the
numbers of record live in the reports, and nothing here feeds back
into any computation.
"""

from __future__ import annotations

import itertools

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .routing import RouterSpec, route_top_k_batch

_RC = {
    "figure.figsize": (6.0, 4.5),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
}


def _style():
    return plt.rc_context(_RC)


def plot_arrangement_2d(normals, offsets, path, *, box: float = 4.0) -> str:
    """Draw the lines of a 2-D arrangement inside a square window."""
    normals = np.asarray(normals, dtype=np.float64)
    offsets = np.asarray(offsets, dtype=np.float64)
    with _style():
        fig, ax = plt.subplots()
        ts = np.linspace(-3.0 * box, 3.0 * box, 2)
        for (wx, wy), b in zip(normals, offsets):
            # Points with w . x + b = 0 along the line's direction.
            nrm = np.hypot(wx, wy)
            base = -b / nrm**2 * np.array([wx, wy])
            direction = np.array([-wy, wx]) / nrm
            pts = base[None, :] + ts[:, None] * direction[None, :]
            ax.plot(pts[:, 0], pts[:, 1], lw=1.2)
        ax.set_xlim(-box, box)
        ax.set_ylim(-box, box)
        ax.set_aspect("equal")
        ax.set_title(f"arrangement: {normals.shape[0]} lines")
        fig.savefig(path)
        plt.close(fig)
    return str(path)


def plot_routing_cells_2d(router: RouterSpec, path, *, box: float = 4.0, res: int = 300) -> str:
    """Color the plane by winning coalition."""
    xs = np.linspace(-box, box, res)
    X, Y = np.meshgrid(xs, xs)
    P = np.stack([X.ravel(), Y.ravel()], axis=1)
    active = route_top_k_batch(router, P)
    labels = {}
    img = np.zeros(P.shape[0], dtype=np.int32)
    for i, row in enumerate(active):
        key = tuple(int(t) for t in row)
        img[i] = labels.setdefault(key, len(labels))
    with _style():
        fig, ax = plt.subplots()
        ax.imshow(
            img.reshape(res, res),
            origin="lower",
            extent=(-box, box, -box, box),
            cmap="tab20",
            interpolation="nearest",
        )
        ax.set_aspect("equal")
        ax.set_title(f"routing cells: N={router.n_experts}, k={router.k} ({len(labels)} seen)")
        fig.savefig(path)
        plt.close(fig)
    return str(path)


def plot_scaling(report, path) -> str:
    """Log-log medians with the fitted power law."""
    xs = np.array([m["x"] for m in report.medians], dtype=np.float64)
    ys = np.array([m["median"] for m in report.medians], dtype=np.float64)
    with _style():
        fig, ax = plt.subplots()
        ax.loglog(xs, ys, "o-", label="median count")
        grid = np.linspace(xs.min(), xs.max(), 64)
        ax.loglog(
            grid,
            np.exp(report.intercept) * grid**report.slope,
            "--",
            label=f"fit: slope {report.slope:.3f}",
        )
        ax.set_xlabel(report.mode)
        ax.set_ylabel("linear regions")
        ax.legend()
        fig.savefig(path)
        plt.close(fig)
    return str(path)


def plot_effective(report, path) -> str:
    """Measured effective patterns against their ceilings."""
    names = ["distinct patterns", "phi(width, d_eff)"]
    vals = [report.distinct_patterns, report.bound_dense]
    if report.bound_crossing is not None:
        names.append("crossing ceiling")
        vals.append(report.bound_crossing)
    if report.bound_moe is not None:
        names.append("measure-weighted bound")
        vals.append(report.bound_moe)
    with _style():
        fig, ax = plt.subplots()
        ax.bar(range(len(vals)), vals, color="tab:blue")
        ax.set_xticks(range(len(vals)))
        ax.set_xticklabels(names, rotation=20, ha="right")
        ax.set_ylabel("count")
        ax.set_title(f"effective capacity, d_eff={report.d_eff}")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return str(path)


def plot_resilience(report, path) -> str:
    """Per-seed MoE/dense ratios with median and ceiling."""
    ratios = [r["ratio"] for r in report.rows]
    with _style():
        fig, ax = plt.subplots()
        ax.plot(range(len(ratios)), ratios, "o", alpha=0.7, label="seed ratio")
        ax.axhline(report.median_ratio, color="tab:orange", label=f"median {report.median_ratio:.2f}")
        ax.axhline(report.ceiling, color="tab:red", ls="--", label=f"ceiling {report.ceiling:.0f}")
        ax.set_xlabel("seed index")
        ax.set_ylabel("MoE / dense patterns")
        ax.set_title(f"resilience: N={report.N}, k={report.k}, H={report.H}")
        ax.legend()
        fig.savefig(path)
        plt.close(fig)
    return str(path)


def plot_zonotope_2d(generators, path) -> str:
    """The zonotope of 2-D generators as a filled polygon."""
    G = np.asarray(generators, dtype=np.float64)
    pts = []
    for signs in itertools.product((0.0, 1.0), repeat=G.shape[0]):
        pts.append(np.asarray(signs) @ G)
    pts = np.array(pts)
    with _style():
        fig, ax = plt.subplots()
        ax.plot(pts[:, 0], pts[:, 1], ".", ms=3, alpha=0.5)
        hull = _hull_2d(pts)
        ax.fill(hull[:, 0], hull[:, 1], alpha=0.15, color="tab:green")
        ax.plot(
            np.append(hull[:, 0], hull[0, 0]),
            np.append(hull[:, 1], hull[0, 1]),
            "-o",
            color="tab:green",
            ms=4,
        )
        ax.set_aspect("equal")
        ax.set_title(f"zonotope of {G.shape[0]} generators")
        fig.savefig(path)
        plt.close(fig)
    return str(path)


def _hull_2d(pts: np.ndarray) -> np.ndarray:
    """Andrew's monotone chain; returns hull vertices counterclockwise."""
    P = pts[np.lexsort((pts[:, 1], pts[:, 0]))]

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and np.cross(out[-1] - out[-2], p - out[-2]) <= 1e-12:
                out.pop()
            out.append(p)
        return out

    lower = half(P)
    upper = half(P[::-1])
    return np.array(lower[:-1] + upper[:-1])

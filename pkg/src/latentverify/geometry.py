"""Latent-space convex polytopes built from action-labeled samples.

Pipeline: filter labeled latent samples by action interval and a componentwise
sigma cap, take the convex hull (exact up to dimension HULL_DIM_LIMIT, support
halfspaces above), then enlarge every facet by an L2 inflation radius to cover
edge cases near the hull boundary.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from . import lpsolve

HULL_DIM_LIMIT = 6
FACET_LIMIT = 200_000
CONTAIN_TOL = 1e-9
HULL_TOL = 1e-7
CLEAN_TAG = "clean"


class DegenerateInputError(ValueError):
    """Input points span an affine subspace of deficient dimension."""


class UnsupportedDimensionError(ValueError):
    """Exact hulls are limited to HULL_DIM_LIMIT; use outer_approximate above it."""


class HullConsistencyError(RuntimeError):
    """Internal consistency failure while building a polytope."""


@dataclass
class LatentSample:
    z: np.ndarray
    action: float
    tag: str = CLEAN_TAG

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=np.float64)


@dataclass
class Halfspace:
    a: np.ndarray
    b: float

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=np.float64)
        if np.linalg.norm(self.a) <= 0.0:
            raise ValueError("halfspace normal must be nonzero")


@dataclass
class Polytope:
    dim: int
    halfspaces: list[Halfspace]
    vertices: np.ndarray | None = None  # (n, dim); None/empty for outer approximations
    action_interval: tuple[float, float] | None = None
    inflation_radius: float = 0.0
    source_tag: str = CLEAN_TAG
    parent_id: str | None = None
    poly_id: str | None = None
    _A: np.ndarray | None = field(default=None, repr=False, compare=False)
    _b: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def A(self) -> np.ndarray:
        if self._A is None:
            self._A = np.array([h.a for h in self.halfspaces], dtype=np.float64)
        return self._A

    @property
    def b(self) -> np.ndarray:
        if self._b is None:
            self._b = np.array([h.b for h in self.halfspaces], dtype=np.float64)
        return self._b

    def n_vertices(self) -> int:
        return 0 if self.vertices is None else len(self.vertices)


def filter_samples(
    samples: list[LatentSample],
    interval: tuple[float, float],
    sigma_cap: float = 2.0,
) -> list[LatentSample]:
    """Samples with action in the interval and z within sigma_cap componentwise
    standard deviations of the selected subset's componentwise mean."""
    lo, hi = interval
    if lo > hi:
        raise ValueError(f"empty action interval [{lo}, {hi}]")
    if sigma_cap <= 0:
        raise ValueError("sigma_cap must be positive")
    selected = [s for s in samples if lo <= s.action <= hi]
    if not selected:
        return []
    Z = np.array([s.z for s in selected])
    mean = Z.mean(axis=0)
    std = Z.std(axis=0)
    keep = np.all(np.abs(Z - mean) <= sigma_cap * std + 1e-12, axis=1)
    return [s for s, k in zip(selected, keep) if k]


def _affine_rank(points: np.ndarray) -> int:
    centered = points - points.mean(axis=0)
    return int(np.linalg.matrix_rank(centered, tol=1e-9))


def _dedupe_halfspaces(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    keyed = {}
    for i in range(A.shape[0]):
        key = tuple(np.round(A[i], 12)) + (round(float(b[i]), 12),)
        if key not in keyed:
            keyed[key] = i
    idx = sorted(keyed.values())
    return A[idx], b[idx]


def convex_hull(
    points,
    action_interval: tuple[float, float] | None = None,
    source_tag: str = CLEAN_TAG,
    poly_id: str | None = None,
) -> Polytope:
    """Exact convex hull: extreme-point V-rep plus outward facet H-rep."""
    pts = np.asarray(points, dtype=np.float64)
    n, d = pts.shape
    if d > HULL_DIM_LIMIT:
        raise UnsupportedDimensionError(
            f"exact hulls support dim <= {HULL_DIM_LIMIT}, got {d}; use outer_approximate"
        )
    if n < d + 1:
        raise DegenerateInputError(f"need at least {d + 1} points in dim {d}, got {n}")
    rank = _affine_rank(pts)
    if rank < d:
        raise DegenerateInputError(f"points span affine dimension {rank} < {d}")
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:  # rank check above should catch this first
        raise DegenerateInputError(f"degenerate input: {exc}") from exc
    if len(hull.equations) > FACET_LIMIT:
        raise UnsupportedDimensionError(
            f"hull has {len(hull.equations)} facets, above the {FACET_LIMIT} guard"
        )
    # qhull equations are a.x + offset <= 0 with outward unit normals
    A = hull.equations[:, :d].copy()
    b = -hull.equations[:, d].copy()
    A, b = _dedupe_halfspaces(A, b)
    resid = float(np.max(pts @ A.T - b))
    if resid > HULL_TOL:
        raise HullConsistencyError(f"hull facet residual {resid:.3e} exceeds {HULL_TOL}")
    verts = pts[np.sort(hull.vertices)]
    return Polytope(
        dim=d,
        halfspaces=[Halfspace(A[i], float(b[i])) for i in range(A.shape[0])],
        vertices=verts,
        action_interval=action_interval,
        source_tag=source_tag,
        poly_id=poly_id,
    )


def outer_approximate(
    points,
    k: int,
    seed: int = 0,
    action_interval: tuple[float, float] | None = None,
    source_tag: str = CLEAN_TAG,
    poly_id: str | None = None,
) -> Polytope:
    """Support-halfspace outer approximation along 2*dim axis directions plus
    k - 2*dim seeded-random unit directions; V-rep left empty."""
    pts = np.asarray(points, dtype=np.float64)
    n, d = pts.shape
    if k < 2 * d:
        raise ValueError(f"need k >= {2 * d} directions, got {k}")
    dirs = np.vstack([np.eye(d), -np.eye(d)])
    extra = k - 2 * d
    if extra > 0:
        rng = np.random.default_rng(seed)
        raw = rng.normal(size=(extra, d))
        raw /= np.linalg.norm(raw, axis=1, keepdims=True)
        dirs = np.vstack([dirs, raw])
    offsets = (pts @ dirs.T).max(axis=0)
    return Polytope(
        dim=d,
        halfspaces=[Halfspace(dirs[i], float(offsets[i])) for i in range(len(dirs))],
        vertices=None,
        action_interval=action_interval,
        source_tag=source_tag,
        poly_id=poly_id,
    )


def inflate(poly: Polytope, epsilon: float) -> Polytope:
    """Offset every facet outward by epsilon along its unit normal.

    This matches the Minkowski sum with an L2 epsilon-ball in every facet
    direction (the support function gains exactly epsilon*||a||); between
    facets the offset polytope keeps its corners and so over-covers the
    rounded sum there, which is the conservative side for verification.
    """
    if epsilon < 0:
        raise ValueError("inflation radius must be nonnegative")
    new_hs = [
        Halfspace(h.a.copy(), float(h.b + epsilon * np.linalg.norm(h.a)))
        for h in poly.halfspaces
    ]
    return Polytope(
        dim=poly.dim,
        halfspaces=new_hs,
        vertices=None if poly.vertices is None else poly.vertices.copy(),
        action_interval=poly.action_interval,
        inflation_radius=poly.inflation_radius + epsilon,
        source_tag=poly.source_tag,
        parent_id=poly.poly_id,
        poly_id=None if poly.poly_id is None else f"{poly.poly_id}+eps{epsilon:g}",
    )


def contains(poly: Polytope, z, tol: float = CONTAIN_TOL) -> bool:
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (poly.dim,):
        raise ValueError(f"point dim {z.shape} != polytope dim {poly.dim}")
    return bool(np.all(poly.A @ z <= poly.b + tol))


def contains_many(poly: Polytope, Z: np.ndarray, tol: float = CONTAIN_TOL) -> np.ndarray:
    Z = np.asarray(Z, dtype=np.float64)
    return np.all(Z @ poly.A.T <= poly.b + tol, axis=1)


def bounding_box(poly: Polytope) -> tuple[np.ndarray, np.ndarray]:
    """Per-dimension min/max over the H-rep, each side solved as an LP."""
    lower = np.empty(poly.dim)
    upper = np.empty(poly.dim)
    for i in range(poly.dim):
        e = np.zeros(poly.dim)
        e[i] = 1.0
        lower[i], _ = lpsolve.optimize_linear(e, poly, "min")
        upper[i], _ = lpsolve.optimize_linear(e, poly, "max")
    return lower, upper


def sample_points(poly: Polytope, n: int, seed: int, burn_in: int = 50) -> np.ndarray:
    """n hit-and-run points, each walked burn_in steps from the Chebyshev center.

    Walkers advance in blocks so that the (walkers x facets) slack matrices of
    facet-heavy polytopes stay within a bounded memory footprint.
    """
    center, _ = lpsolve.chebyshev_center(poly.A, poly.b)
    rng = np.random.default_rng(seed)
    A, b = poly.A, poly.b
    block = max(1, min(n, 20_000_000 // max(len(b), 1)))
    out = np.empty((n, poly.dim))
    for start in range(0, n, block):
        count = min(block, n - start)
        Z = np.tile(center, (count, 1))
        for _ in range(burn_in):
            D = rng.normal(size=(count, poly.dim))
            D /= np.linalg.norm(D, axis=1, keepdims=True)
            slack = np.maximum(b - Z @ A.T, 0.0)  # (count, m)
            P = D @ A.T
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = slack / P
            t_max = np.where(P > 1e-14, ratios, np.inf).min(axis=1)
            t_min = np.where(P < -1e-14, ratios, -np.inf).max(axis=1)
            t = t_min + (t_max - t_min) * rng.uniform(size=count)
            Z = Z + t[:, None] * D
        out[start : start + count] = Z
    return out


# ---------------------------------------------------------------------------
# file formats


def save_polytope(poly: Polytope, path):
    doc = {
        "dim": poly.dim,
        "vertices": [] if poly.vertices is None else [list(map(float, v)) for v in poly.vertices],
        "halfspaces": [{"a": list(map(float, h.a)), "b": float(h.b)} for h in poly.halfspaces],
        "action_lo": None if poly.action_interval is None else float(poly.action_interval[0]),
        "action_hi": None if poly.action_interval is None else float(poly.action_interval[1]),
        "epsilon": float(poly.inflation_radius),
        "source_tag": poly.source_tag,
        "parent_id": poly.parent_id,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_polytope(path) -> Polytope:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    verts = np.array(doc["vertices"], dtype=np.float64) if doc["vertices"] else None
    interval = None
    if doc.get("action_lo") is not None:
        interval = (float(doc["action_lo"]), float(doc["action_hi"]))
    return Polytope(
        dim=int(doc["dim"]),
        halfspaces=[Halfspace(np.array(h["a"], dtype=np.float64), float(h["b"])) for h in doc["halfspaces"]],
        vertices=verts,
        action_interval=interval,
        inflation_radius=float(doc.get("epsilon", 0.0)),
        source_tag=doc.get("source_tag", CLEAN_TAG),
        parent_id=doc.get("parent_id"),
        poly_id=os.path.splitext(os.path.basename(str(path)))[0],
    )


def save_samples_csv(samples: list[LatentSample], path):
    if not samples:
        raise ValueError("refusing to write an empty sample CSV")
    d = samples[0].z.shape[0]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"z_{i}" for i in range(d)] + ["action", "tag"])
        for s in samples:
            writer.writerow([repr(float(v)) for v in s.z] + [repr(float(s.action)), s.tag])


def load_samples_csv(path) -> list[LatentSample]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[-2:] != ["action", "tag"]:
            raise ValueError(f"{path}: expected header ending 'action,tag', got {header[-2:]}")
        d = len(header) - 2
        samples = []
        for row in reader:
            if not row:
                continue
            z = np.array([float(v) for v in row[:d]])
            samples.append(LatentSample(z, float(row[d]), row[d + 1]))
    return samples

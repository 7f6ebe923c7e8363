import os

import numpy as np
import pytest

from latentverify.geometry import Halfspace, Polytope, convex_hull
from latentverify.nnmodel import AffineLayer, Network

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


def build_absnet() -> Network:
    return Network(
        1,
        [
            AffineLayer(np.array([[1.0], [-1.0]]), np.zeros(2), "relu"),
            AffineLayer(np.array([[1.0, 1.0]]), np.zeros(1), "linear"),
        ],
        "absnet",
    )


def build_identity() -> Network:
    return Network(1, [AffineLayer(np.array([[1.0]]), np.zeros(1), "linear")], "identity")


def interval_polytope(lo: float, hi: float) -> Polytope:
    return Polytope(
        1,
        [Halfspace(np.array([1.0]), hi), Halfspace(np.array([-1.0]), -lo)],
        vertices=np.array([[lo], [hi]]),
    )


def box_polytope(lo, hi) -> Polytope:
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    d = lo.shape[0]
    hs = []
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        hs.append(Halfspace(e, float(hi[i])))
        hs.append(Halfspace(-e, float(-lo[i])))
    corners = np.array(np.meshgrid(*[(lo[i], hi[i]) for i in range(d)], indexing="ij"))
    verts = corners.reshape(d, -1).T
    return Polytope(d, hs, vertices=verts)


def unit_square() -> Polytope:
    return box_polytope([0.0, 0.0], [1.0, 1.0])


def random_net(rng, d_in: int, hidden: list[int], d_out: int = 1, scale: float = 1.0) -> Network:
    layers = []
    prev = d_in
    for w in hidden:
        weights = rng.normal(0.0, scale / np.sqrt(prev), size=(w, prev))
        bias = rng.normal(0.0, 0.2, size=w)
        layers.append(AffineLayer(weights, bias, "relu"))
        prev = w
    weights = rng.normal(0.0, scale / np.sqrt(prev), size=(d_out, prev))
    bias = rng.normal(0.0, 0.2, size=d_out)
    layers.append(AffineLayer(weights, bias, "linear"))
    return Network(d_in, layers, "random")


def random_polytope(rng, dim: int, n_points: int = 30, spread: float = 1.0) -> Polytope:
    pts = rng.normal(0.0, spread, size=(n_points, dim)) + rng.normal(0.0, 0.5, size=dim)
    return convex_hull(pts)

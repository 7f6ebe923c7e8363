#!/usr/bin/env python3
"""Generate the fixture networks, latent CSVs, and image vector used by the
test suite.  Everything is seeded; rerunning reproduces identical files."""

import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from latentverify.geometry import LatentSample, save_samples_csv  # noqa: E402
from latentverify.nnmodel import AffineLayer, Network, forward, save_network  # noqa: E402

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures")


def clamp_layers(d: int) -> list[AffineLayer]:
    """Hard clamp to [0, 1] as two layers: relu(x) - relu(x - 1)."""
    eye = np.eye(d)
    w1 = np.vstack([eye, eye])
    b1 = np.concatenate([np.zeros(d), -np.ones(d)])
    w2 = np.hstack([eye, -eye])
    return [AffineLayer(w1, b1, "relu"), AffineLayer(w2, np.zeros(d), "linear")]


def make_decoder(rng) -> Network:
    d_z, hidden, pixels = 4, 32, 192
    w1 = rng.normal(0.0, 0.5, size=(hidden, d_z))
    b1 = rng.normal(0.0, 0.1, size=hidden)
    w2 = rng.normal(0.0, 0.2, size=(pixels, hidden))
    b2 = np.full(pixels, 0.35) + rng.normal(0.0, 0.05, size=pixels)
    layers = [AffineLayer(w1, b1, "relu"), AffineLayer(w2, b2, "linear")] + clamp_layers(pixels)
    return Network(d_z, layers, "toy_decoder")


def make_controller(rng) -> Network:
    pixels, h1, h2 = 192, 32, 16
    w1 = rng.normal(0.0, 0.08, size=(h1, pixels))
    b1 = rng.normal(0.0, 0.05, size=h1)
    w2 = rng.normal(0.0, 0.3, size=(h2, h1))
    b2 = rng.normal(0.0, 0.05, size=h2)
    w3 = rng.normal(0.0, 0.4, size=(1, h2))
    b3 = np.zeros(1)
    return Network(
        pixels,
        [AffineLayer(w1, b1, "relu"), AffineLayer(w2, b2, "relu"), AffineLayer(w3, b3, "linear")],
        "toy_controller",
    )


def make_latents(rng, n: int, d: int) -> list[LatentSample]:
    actions = rng.uniform(-1.0, 1.0, size=n)
    basis = rng.normal(0.0, 1.0, size=(d, 2))
    samples = []
    for a in actions:
        feats = np.array([a, a * a])
        z = basis @ feats + rng.normal(0.0, 0.12, size=d) + rng.normal(0.0, 1e-9, size=d)
        samples.append(LatentSample(z, float(a), "clean"))
    return samples


def main():
    os.makedirs(FIXTURES, exist_ok=True)
    rng = np.random.default_rng(20240817)

    identity = Network(1, [AffineLayer(np.array([[1.0]]), np.zeros(1), "linear")], "identity")
    save_network(identity, os.path.join(FIXTURES, "identity.nnw"))

    absnet = Network(
        1,
        [
            AffineLayer(np.array([[1.0], [-1.0]]), np.zeros(2), "relu"),
            AffineLayer(np.array([[1.0, 1.0]]), np.zeros(1), "linear"),
        ],
        "absnet",
    )
    save_network(absnet, os.path.join(FIXTURES, "absnet.nnw"))

    decoder = make_decoder(rng)
    controller = make_controller(rng)
    save_network(decoder, os.path.join(FIXTURES, "decoder.nnw"))
    save_network(controller, os.path.join(FIXTURES, "controller.nnw"))

    save_samples_csv(make_latents(rng, 2000, 4), os.path.join(FIXTURES, "latents.csv"))
    save_samples_csv(make_latents(rng, 800, 8), os.path.join(FIXTURES, "latents8.csv"))

    z0 = rng.normal(0.0, 0.5, size=4)
    image = forward(decoder, z0)
    with open(os.path.join(FIXTURES, "image.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(repr(float(v)) for v in image) + "\n")

    print(f"fixtures written to {os.path.abspath(FIXTURES)}")


if __name__ == "__main__":
    main()

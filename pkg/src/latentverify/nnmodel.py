"""Piecewise-linear feedforward networks: parse, validate, evaluate, compose.

Networks are plain stacks of dense affine layers with relu or linear
activation, stored and exchanged in the NNW text format.  All evaluation is
double precision and layer-by-layer, so composing two networks and running
the composition gives bit-identical results to running them in sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

RELU = "relu"
LINEAR = "linear"
ACTIVATIONS = (RELU, LINEAR)


class NetworkFormatError(ValueError):
    """Malformed NNW input; the message names the offending line."""


@dataclass
class AffineLayer:
    weights: np.ndarray  # (d_out, d_in)
    bias: np.ndarray     # (d_out,)
    activation: str

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]


@dataclass
class Network:
    input_dim: int
    layers: list[AffineLayer]
    name: str = "net"

    @property
    def output_dim(self) -> int:
        return self.layers[-1].out_dim

    def relu_layer_sizes(self) -> list[int]:
        return [lay.out_dim for lay in self.layers if lay.activation == RELU]

    def relu_count(self) -> int:
        return sum(self.relu_layer_sizes())


def validate(net: Network) -> list[str]:
    """Return a list of invariant violations; empty iff the network is valid."""
    problems = []
    if not net.layers:
        return ["network has no layers"]
    prev = net.input_dim
    for i, lay in enumerate(net.layers):
        if lay.weights.ndim != 2:
            problems.append(f"layer {i}: weights are not a matrix")
            continue
        if lay.bias.ndim != 1 or lay.weights.shape[0] != lay.bias.shape[0]:
            problems.append(f"layer {i}: weight rows {lay.weights.shape[0]} != bias length {lay.bias.shape[0]}")
        if lay.weights.shape[1] != prev:
            problems.append(f"layer {i}: input dim {lay.weights.shape[1]} != previous output dim {prev}")
        if not np.all(np.isfinite(lay.weights)) or not np.all(np.isfinite(lay.bias)):
            problems.append(f"layer {i}: non-finite weight or bias entry")
        if lay.activation not in ACTIVATIONS:
            problems.append(f"layer {i}: unsupported activation {lay.activation!r}")
        prev = lay.weights.shape[0]
    if net.layers[-1].activation != LINEAR:
        problems.append("final layer activation must be linear")
    return problems


def forward(net: Network, x: np.ndarray) -> np.ndarray:
    """Evaluate the network at x (a vector, or a batch of row vectors)."""
    x = np.asarray(x, dtype=np.float64)
    batched = x.ndim == 2
    if x.shape[-1] != net.input_dim:
        raise ValueError(f"input has dim {x.shape[-1]}, network expects {net.input_dim}")
    h = x.T if batched else x
    for lay in net.layers:
        h = lay.weights @ h
        h = h + (lay.bias[:, None] if batched else lay.bias)
        if lay.activation == RELU:
            h = np.maximum(h, 0.0)
    return h.T if batched else h


def compose(decoder: Network, controller: Network) -> Network:
    """Stack controller after decoder: the result computes controller(decoder(z)).

    The combined layer list is the concatenation of both layer lists, so a
    forward pass of the composition performs the exact same float operations
    as the two passes run in sequence.
    """
    if decoder.output_dim != controller.input_dim:
        raise ValueError(
            f"decoder output dim {decoder.output_dim} != controller input dim {controller.input_dim}"
        )
    return Network(
        input_dim=decoder.input_dim,
        layers=list(decoder.layers) + list(controller.layers),
        name=f"{decoder.name}__{controller.name}",
    )


# ---------------------------------------------------------------------------
# NNW text format


def _tokens_with_lines(text: str) -> Iterator[tuple[str, int]]:
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("#"):
            continue
        for tok in stripped.split():
            yield tok, lineno


class _TokenStream:
    def __init__(self, text: str):
        self._toks = list(_tokens_with_lines(text))
        self._pos = 0
        self.line = 0

    def next(self, what: str) -> str:
        if self._pos >= len(self._toks):
            raise NetworkFormatError(f"line {self.line}: unexpected end of input, expected {what}")
        tok, self.line = self._toks[self._pos]
        self._pos += 1
        return tok

    def next_int(self, what: str) -> int:
        tok = self.next(what)
        try:
            return int(tok)
        except ValueError:
            raise NetworkFormatError(f"line {self.line}: expected integer {what}, got {tok!r}") from None

    def next_float(self, what: str) -> float:
        tok = self.next(what)
        try:
            v = float(tok)
        except ValueError:
            raise NetworkFormatError(f"line {self.line}: expected number {what}, got {tok!r}") from None
        if not math.isfinite(v):
            raise NetworkFormatError(f"line {self.line}: non-finite value {tok!r}")
        return v

    def expect(self, keyword: str):
        tok = self.next(f"keyword {keyword!r}")
        if tok != keyword:
            raise NetworkFormatError(f"line {self.line}: expected {keyword!r}, got {tok!r}")

    def exhausted(self) -> bool:
        return self._pos >= len(self._toks)


def parse_network(text: str | bytes) -> Network:
    """Parse NNW text into a validated Network."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    ts = _TokenStream(text)
    ts.expect("NNW")
    version = ts.next_int("format version")
    if version != 1:
        raise NetworkFormatError(f"line {ts.line}: unsupported NNW version {version}")
    ts.expect("name")
    name = ts.next("network name")
    ts.expect("input")
    input_dim = ts.next_int("input dimension")
    if input_dim <= 0:
        raise NetworkFormatError(f"line {ts.line}: input dimension must be positive")
    ts.expect("layers")
    n_layers = ts.next_int("layer count")
    if n_layers < 1:
        raise NetworkFormatError(f"line {ts.line}: need at least one layer")

    layers = []
    prev = input_dim
    for li in range(n_layers):
        ts.expect("layer")
        d_out = ts.next_int("layer output dimension")
        if d_out <= 0:
            raise NetworkFormatError(f"line {ts.line}: layer {li}: output dimension must be positive")
        act = ts.next("activation")
        if act not in ACTIVATIONS:
            raise NetworkFormatError(f"line {ts.line}: layer {li}: unknown activation {act!r}")
        w = np.empty((d_out, prev))
        b = np.empty(d_out)
        for r in range(d_out):
            for c in range(prev):
                w[r, c] = ts.next_float(f"layer {li} row {r} weight {c}")
            b[r] = ts.next_float(f"layer {li} row {r} bias")
        layers.append(AffineLayer(w, b, act))
        prev = d_out

    if not ts.exhausted():
        tok = ts.next("end of input")
        raise NetworkFormatError(f"line {ts.line}: trailing token {tok!r}")

    net = Network(input_dim=input_dim, layers=layers, name=name)
    problems = validate(net)
    if problems:
        raise NetworkFormatError(f"line {ts.line}: invalid network: " + "; ".join(problems))
    return net


def _fmt(v: float) -> str:
    # repr() of a double is the shortest decimal that reparses to the same bits
    return repr(float(v))


def serialize_network(net: Network) -> str:
    """Emit NNW text; parse_network(serialize_network(net)) is numerically identity."""
    out = [f"NNW 1", f"name {net.name}", f"input {net.input_dim}", f"layers {len(net.layers)}"]
    for lay in net.layers:
        out.append(f"layer {lay.out_dim} {lay.activation}")
        for r in range(lay.out_dim):
            row = [_fmt(x) for x in lay.weights[r]]
            row.append(_fmt(lay.bias[r]))
            out.append(" ".join(row))
    return "\n".join(out) + "\n"


def load_network(path) -> Network:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_network(fh.read())


def save_network(net: Network, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_network(net))

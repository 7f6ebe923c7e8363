"""Certified output bounds for ReLU networks over polytopes.

Three bound engines share one relaxation core:

  * ibp_bounds       sound interval propagation over an axis box
  * crown_bounds     backward linear relaxation, optimized exactly over the
                     polytope H-rep by LP (never looser than box IBP)
  * bab_verify       complete branch and bound over ReLU sign splits;
                     splits are taken in the earliest layer that still has an
                     unstable neuron, which keeps every split constraint an
                     exact halfspace in input space

plus exact_range_enumerate, an activation-pattern enumeration oracle for
small networks, used to cross-check the other engines.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field

import numpy as np

from . import geometry, lpsolve
from .geometry import Polytope
from .nnmodel import LINEAR, RELU, Network, forward
from .speclang import SENTINEL, Spec

HOLDS, VIOLATED, UNKNOWN = "HOLDS", "VIOLATED", "UNKNOWN"
STATUS_TOL = 1e-9
ENUM_RELU_CAP = 20


@dataclass
class Budget:
    max_subproblems: int = 10_000
    timeout_s: float = 60.0


@dataclass
class BoundsResult:
    lower: np.ndarray
    upper: np.ndarray
    method: str
    wall_time: float = 0.0
    subproblems: int = 0
    history: list = field(default_factory=list, repr=False)  # (processed, lo0, hi0) rows


@dataclass
class BoxPerturbation:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=np.float64)
        if self.radius < 0:
            raise ValueError("perturbation radius must be nonnegative")


@dataclass
class Counterexample:
    z: np.ndarray
    output: np.ndarray
    violated_constraint: str


@dataclass
class VerificationResult:
    spec_id: str
    status: str
    lower: np.ndarray
    upper: np.ndarray
    method: str
    wall_time_s: float
    subproblems: int
    counterexample: Counterexample | None = None

    @property
    def paper_status(self) -> str:
        return {HOLDS: "SAT", VIOLATED: "UNSAT", UNKNOWN: "-"}[self.status]

    def to_record(self) -> dict:
        rec = {
            "spec_id": self.spec_id,
            "status": self.status,
            "paper_status": self.paper_status,
            "lower": [float(v) for v in np.atleast_1d(self.lower)],
            "upper": [float(v) for v in np.atleast_1d(self.upper)],
            "method": self.method,
            "wall_time_s": float(self.wall_time_s),
            "subproblems": int(self.subproblems),
        }
        if self.counterexample is not None:
            rec["counterexample"] = {
                "z": [float(v) for v in self.counterexample.z],
                "output": [float(v) for v in np.atleast_1d(self.counterexample.output)],
                "violated_constraint": self.counterexample.violated_constraint,
            }
        return rec


def normalize_interval(out_interval, output_dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Accept (lo, hi) or a per-output list of pairs; return sentinel-filled arrays."""
    arr = np.asarray(out_interval, dtype=np.float64)
    if arr.ndim == 1:
        if arr.shape != (2,):
            raise ValueError("scalar interval must be (lo, hi)")
        los = np.full(output_dim, arr[0])
        his = np.full(output_dim, arr[1])
    else:
        if arr.shape != (output_dim, 2):
            raise ValueError(f"need one (lo, hi) pair per output, got shape {arr.shape}")
        los, his = arr[:, 0].copy(), arr[:, 1].copy()
    if np.any(los > his):
        raise ValueError("invalid interval (lo > hi)")
    return los, his


# ---------------------------------------------------------------------------
# interval propagation


def _ibp_layerwise(net: Network, lo, hi, pins=None, tight=None):
    """Per-layer pre-activation intervals plus the output interval.

    pins maps (layer, neuron) -> +1/-1 for branch-and-bound sign splits;
    tight maps (layer, neuron) -> (l, u) LP-tightened pre-activation bounds.
    """
    l = np.asarray(lo, dtype=np.float64).copy()
    u = np.asarray(hi, dtype=np.float64).copy()
    pre_l, pre_u = [], []
    for i, lay in enumerate(net.layers):
        mid = (l + u) / 2.0
        rad = (u - l) / 2.0
        mid2 = lay.weights @ mid + lay.bias
        rad2 = np.abs(lay.weights) @ rad
        l, u = mid2 - rad2, mid2 + rad2
        if tight:
            for (li, j), (tl, tu) in tight.items():
                if li == i:
                    l[j] = max(l[j], tl)
                    u[j] = min(u[j], tu)
        pre_l.append(l.copy())
        pre_u.append(u.copy())
        if lay.activation == RELU:
            l, u = np.maximum(l, 0.0), np.maximum(u, 0.0)
            if pins:
                for (li, j), s in pins.items():
                    if li == i and s < 0:
                        l[j] = 0.0
                        u[j] = 0.0
    return pre_l, pre_u, l, u


def ibp_bounds(net: Network, box: tuple[np.ndarray, np.ndarray]) -> BoundsResult:
    """Sound interval bounds over an axis box via midpoint/radius arithmetic."""
    lo, hi = (np.asarray(v, dtype=np.float64) for v in box)
    if lo.shape != (net.input_dim,) or hi.shape != (net.input_dim,):
        raise ValueError(f"box dimension does not match input dim {net.input_dim}")
    if np.any(lo > hi):
        raise ValueError("box lower exceeds upper")
    t0 = time.perf_counter()
    _, _, out_l, out_u = _ibp_layerwise(net, lo, hi)
    return BoundsResult(out_l, out_u, "ibp", time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# CROWN backward relaxation


def _relu_states(net: Network, pre_l, pre_u, pins=None):
    """Per layer: +1 identity, -1 zero, 0 unstable (None for linear layers)."""
    states = []
    for i, lay in enumerate(net.layers):
        if lay.activation != RELU:
            states.append(None)
            continue
        st = np.zeros(lay.out_dim, dtype=np.int8)
        st[pre_l[i] >= 0.0] = 1
        st[pre_u[i] <= 0.0] = -1
        if pins:
            for (li, j), s in pins.items():
                if li == i:
                    st[j] = s
        states.append(st)
    return states


def _relaxation_lines(lay_width, state, l, u):
    """Linear bounds sl*x+tl <= relu(x) <= su*x+tu per neuron of one layer."""
    su = np.ones(lay_width)
    tu = np.zeros(lay_width)
    sl = np.ones(lay_width)
    tl = np.zeros(lay_width)
    inactive = state == -1
    su[inactive] = 0.0
    sl[inactive] = 0.0
    unstable = state == 0
    if np.any(unstable):
        lu, uu = l[unstable], u[unstable]
        denom = uu - lu
        su[unstable] = uu / denom
        tu[unstable] = -uu * lu / denom
        sl[unstable] = (uu >= -lu).astype(np.float64)  # alpha = 1 iff u >= |l|
    return sl, tl, su, tu


def _backward_linear(net: Network, pre_l, pre_u, states):
    """Linear functions of the input bounding every output over the region."""
    d_out = net.output_dim
    Mu = np.eye(d_out)
    ku = np.zeros(d_out)
    Ml = np.eye(d_out)
    kl = np.zeros(d_out)
    for i in reversed(range(len(net.layers))):
        lay = net.layers[i]
        if lay.activation == RELU:
            sl, tl, su, tu = _relaxation_lines(lay.out_dim, states[i], pre_l[i], pre_u[i])
            Mu_p, Mu_n = np.maximum(Mu, 0.0), np.minimum(Mu, 0.0)
            ku = ku + Mu_p @ tu + Mu_n @ tl
            Mu = Mu_p * su + Mu_n * sl
            Ml_p, Ml_n = np.maximum(Ml, 0.0), np.minimum(Ml, 0.0)
            kl = kl + Ml_p @ tl + Ml_n @ tu
            Ml = Ml_p * sl + Ml_n * su
        ku = ku + Mu @ lay.bias
        Mu = Mu @ lay.weights
        kl = kl + Ml @ lay.bias
        Ml = Ml @ lay.weights
    return Ml, kl, Mu, ku


@dataclass
class _CoreBounds:
    lower: np.ndarray
    upper: np.ndarray
    argmin: list[np.ndarray]
    argmax: list[np.ndarray]
    states: list
    pre_l: list
    pre_u: list


def _region_box(A: np.ndarray, b: np.ndarray, dim: int) -> tuple[np.ndarray, np.ndarray]:
    nonzero_per_row = np.count_nonzero(A, axis=1)
    if np.all(nonzero_per_row == 1):
        # pure axis box: read the bounds straight off the rows
        lo = np.full(dim, -np.inf)
        hi = np.full(dim, np.inf)
        for i in range(A.shape[0]):
            j = int(np.flatnonzero(A[i])[0])
            bound = b[i] / A[i, j]
            if A[i, j] > 0:
                hi[j] = min(hi[j], bound)
            else:
                lo[j] = max(lo[j], bound)
        if np.all(np.isfinite(lo)) and np.all(np.isfinite(hi)):
            return lo, hi
    lo = np.empty(dim)
    hi = np.empty(dim)
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = 1.0
        lo[i], _ = lpsolve.optimize_linear(e, (A, b), "min")
        hi[i], _ = lpsolve.optimize_linear(e, (A, b), "max")
    return lo, hi


def _crown_core(net: Network, A: np.ndarray, b: np.ndarray, pins=None, tight=None) -> _CoreBounds:
    box_lo, box_hi = _region_box(A, b, net.input_dim)
    pre_l, pre_u, ibp_lo, ibp_hi = _ibp_layerwise(net, box_lo, box_hi, pins, tight)
    states = _relu_states(net, pre_l, pre_u, pins)
    Ml, kl, Mu, ku = _backward_linear(net, pre_l, pre_u, states)
    d_out = net.output_dim
    lower = np.empty(d_out)
    upper = np.empty(d_out)
    argmin, argmax = [], []
    for o in range(d_out):
        v, p = lpsolve.optimize_linear(Ml[o], (A, b), "min")
        lower[o] = v + kl[o]
        argmin.append(p)
        v, p = lpsolve.optimize_linear(Mu[o], (A, b), "max")
        upper[o] = v + ku[o]
        argmax.append(p)
    # box IBP is also sound; keep whichever side is tighter
    lower = np.maximum(lower, ibp_lo)
    upper = np.minimum(upper, ibp_hi)
    return _CoreBounds(lower, upper, argmin, argmax, states, pre_l, pre_u)


def crown_bounds(net: Network, poly: Polytope) -> BoundsResult:
    """Backward linear relaxation optimized exactly over the polytope H-rep."""
    if poly.dim != net.input_dim:
        raise ValueError(f"polytope dim {poly.dim} != network input dim {net.input_dim}")
    t0 = time.perf_counter()
    core = _crown_core(net, poly.A, poly.b)
    return BoundsResult(core.lower, core.upper, "crown", time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# exact enumeration oracle


def exact_range_enumerate(net: Network, poly: Polytope) -> BoundsResult:
    """Exact output range by enumerating feasible ReLU activation patterns.

    Depth-first over neurons with LP feasibility pruning; each fully pinned
    pattern induces an affine map minimized/maximized over its cell by LP.
    """
    n_relu = net.relu_count()
    if n_relu > ENUM_RELU_CAP:
        raise ValueError(f"network has {n_relu} ReLUs, enumeration cap is {ENUM_RELU_CAP}")
    if poly.dim != net.input_dim:
        raise ValueError(f"polytope dim {poly.dim} != network input dim {net.input_dim}")
    t0 = time.perf_counter()
    base_A, base_b = poly.A, poly.b
    ok, _ = lpsolve.feasible((base_A, base_b))
    if not ok:
        raise lpsolve.InfeasibleRegionError("polytope is empty")

    d_out = net.output_dim
    best_lo = np.full(d_out, np.inf)
    best_hi = np.full(d_out, -np.inf)
    n_cells = 0

    def leaf(M, c, rows_A, rows_b):
        nonlocal n_cells, best_lo, best_hi
        n_cells += 1
        region = (np.asarray(rows_A), np.asarray(rows_b))
        for o in range(d_out):
            v, _ = lpsolve.optimize_linear(M[o], region, "min")
            best_lo[o] = min(best_lo[o], v + c[o])
            v, _ = lpsolve.optimize_linear(M[o], region, "max")
            best_hi[o] = max(best_hi[o], v + c[o])

    def walk(layer_i, M, c, rows_A, rows_b):
        if layer_i == len(net.layers):
            leaf(M, c, rows_A, rows_b)
            return
        lay = net.layers[layer_i]
        P = lay.weights @ M
        q = lay.weights @ c + lay.bias
        if lay.activation == LINEAR:
            walk(layer_i + 1, P, q, rows_A, rows_b)
            return

        def pin(j, Mrow, qrow, rA, rb):
            if j == lay.out_dim:
                walk(layer_i + 1, np.asarray(Mrow), np.asarray(qrow), rA, rb)
                return
            g, g0 = P[j], q[j]
            # active: g.z + g0 >= 0
            rA_a, rb_a = rA + [-g], rb + [g0]
            if lpsolve.feasible((np.asarray(rA_a), np.asarray(rb_a)))[0]:
                pin(j + 1, Mrow + [g], qrow + [g0], rA_a, rb_a)
            # inactive: g.z + g0 <= 0
            rA_i, rb_i = rA + [g], rb + [-g0]
            if lpsolve.feasible((np.asarray(rA_i), np.asarray(rb_i)))[0]:
                pin(j + 1, Mrow + [np.zeros_like(g)], qrow + [0.0], rA_i, rb_i)

        pin(0, [], [], rows_A, rows_b)

    eye = np.eye(net.input_dim)
    walk(0, eye, np.zeros(net.input_dim), list(base_A), list(base_b))
    return BoundsResult(best_lo, best_hi, "enumerate", time.perf_counter() - t0, n_cells)


# ---------------------------------------------------------------------------
# falsification


def find_counterexample(
    net: Network,
    poly: Polytope,
    out_interval,
    n_samples: int = 1000,
    seed: int = 0,
) -> Counterexample | None:
    """Evaluate hull vertices then hit-and-run samples; first violation wins."""
    los, his = normalize_interval(out_interval, net.output_dim)
    candidates = []
    if poly.vertices is not None and len(poly.vertices):
        candidates.append(np.asarray(poly.vertices))
    if n_samples > 0:
        candidates.append(geometry.sample_points(poly, n_samples, seed))
    for block in candidates:
        outs = np.atleast_2d(forward(net, block))
        below = los - outs
        above = outs - his
        bad = np.maximum(below, above).max(axis=1)
        idx = np.where(bad > STATUS_TOL)[0]
        if idx.size:
            i = int(idx[0])
            return _make_counterexample(block[i], outs[i], los, his)
    return None


def _make_counterexample(z, out, los, his) -> Counterexample:
    out = np.atleast_1d(out)
    parts = []
    for o in range(out.shape[0]):
        if out[o] < los[o] - STATUS_TOL:
            parts.append(f"output[{o}]={out[o]!r} < lower bound {los[o]!r}")
        elif out[o] > his[o] + STATUS_TOL:
            parts.append(f"output[{o}]={out[o]!r} > upper bound {his[o]!r}")
    return Counterexample(np.asarray(z, dtype=np.float64), out, "; ".join(parts))


# ---------------------------------------------------------------------------
# branch and bound


@dataclass
class _Node:
    creation: int
    cut_A: list
    cut_b: list
    pins: dict
    tight: dict
    lower: np.ndarray = None
    upper: np.ndarray = None
    core: _CoreBounds = None

    def violation(self, los, his) -> float:
        return float(max(np.max(los - self.lower), np.max(self.upper - his), 0.0))


def _exact_preact(net: Network, states, pins, layer_i: int):
    """Affine map of layer_i pre-activations, valid when every earlier ReLU
    is pinned or interval-stable on the node region."""
    M = np.eye(net.input_dim)
    c = np.zeros(net.input_dim)
    for i in range(layer_i + 1):
        lay = net.layers[i]
        P = lay.weights @ M
        q = lay.weights @ c + lay.bias
        if i == layer_i:
            return P, q
        if lay.activation == RELU:
            decided = states[i].copy()
            for (li, j), s in pins.items():
                if li == i:
                    decided[j] = s
            if np.any(decided == 0):
                raise RuntimeError("earlier layer still has unstable neurons")
            mask = (decided == 1).astype(np.float64)
            P = P * mask[:, None]
            q = q * mask
        M, c = P, q
    raise AssertionError("unreachable")


def _pick_split(net: Network, core: _CoreBounds) -> tuple[int, int] | None:
    """Earliest layer with an unstable neuron; within it the neuron maximizing
    |l|*|u|/(u-l), ties broken by the lowest index."""
    for i, lay in enumerate(net.layers):
        st = core.states[i]
        if st is None:
            continue
        unstable = np.where(st == 0)[0]
        if unstable.size == 0:
            continue
        l = core.pre_l[i][unstable]
        u = core.pre_u[i][unstable]
        score = np.abs(l) * np.abs(u) / (u - l)
        best = unstable[int(np.argmax(score))]
        return i, int(best)
    return None


def bab_verify(
    net: Network,
    poly: Polytope,
    out_interval,
    budget: Budget | None = None,
) -> tuple[str, BoundsResult, Counterexample | None]:
    """Complete verification by ReLU sign splitting with LP-backed leaf bounds."""
    if poly.dim != net.input_dim:
        raise ValueError(f"polytope dim {poly.dim} != network input dim {net.input_dim}")
    budget = budget or Budget()
    los, his = normalize_interval(out_interval, net.output_dim)
    t0 = time.perf_counter()

    base_A, base_b = poly.A, poly.b
    ok, _ = lpsolve.feasible((base_A, base_b))
    if not ok:
        raise lpsolve.InfeasibleRegionError("polytope is empty")

    def region_of(node: _Node):
        if node.cut_A:
            return np.vstack([base_A] + [np.asarray(a)[None, :] for a in node.cut_A]), np.concatenate(
                [base_b, np.asarray(node.cut_b)]
            )
        return base_A, base_b

    def true_violation(z) -> Counterexample | None:
        out = np.atleast_1d(forward(net, np.asarray(z, dtype=np.float64)))
        if max(np.max(los - out), np.max(out - his)) > STATUS_TOL:
            return _make_counterexample(z, out, los, his)
        return None

    creation = 0
    root = _Node(creation, [], [], {}, {})
    A0, b0 = region_of(root)
    root.core = _crown_core(net, A0, b0)
    root.lower, root.upper = root.core.lower, root.core.upper

    # cheap falsification: hull vertices and root LP argpoints through the true network
    probes = [] if poly.vertices is None else list(np.asarray(poly.vertices))
    probes += root.core.argmin + root.core.argmax
    for p in probes:
        cex = true_violation(p)
        if cex is not None:
            bounds = BoundsResult(root.lower, root.upper, "bab", time.perf_counter() - t0, 1)
            return VIOLATED, bounds, cex

    heap: list[tuple[float, int, _Node]] = []
    certified: list[_Node] = []
    heapq.heappush(heap, (-root.violation(los, his), root.creation, root))
    processed = 0
    history = []

    def global_bounds():
        nodes = certified + [n for _, _, n in heap]
        if not nodes:
            return root.lower, root.upper
        lo = np.min([n.lower for n in nodes], axis=0)
        hi = np.max([n.upper for n in nodes], axis=0)
        return lo, hi

    status = None
    cex_out = None
    while heap:
        if processed >= budget.max_subproblems or time.perf_counter() - t0 > budget.timeout_s:
            status = UNKNOWN
            break
        neg_viol, _, node = heapq.heappop(heap)
        processed += 1
        if -neg_viol <= STATUS_TOL:
            certified.append(node)
            glo, ghi = global_bounds()
            history.append((processed, glo.copy(), ghi.copy()))
            continue
        split = _pick_split(net, node.core)
        if split is None:
            # exact leaf whose bounds still violate: a real counterexample exists
            side_points = node.core.argmin + node.core.argmax
            for p in side_points:
                cex = true_violation(p)
                if cex is not None:
                    cex_out = cex
                    break
            if cex_out is not None:
                status = VIOLATED
                break
            certified.append(node)  # violation within LP noise of the tolerance
            glo, ghi = global_bounds()
            history.append((processed, glo.copy(), ghi.copy()))
            continue
        li, j = split
        g, g0 = _exact_preact(net, node.core.states, node.pins, li)
        g, g0 = g[j], g0[j]
        for sign in (1, -1):
            if sign > 0:
                cut_a, cut_b = -g, g0  # keep g.z + g0 >= 0
            else:
                cut_a, cut_b = g, -g0
            child = _Node(
                creation + 1 if sign > 0 else creation + 2,
                node.cut_A + [cut_a],
                node.cut_b + [cut_b],
                {**node.pins, (li, j): sign},
                dict(node.tight),
            )
            cA, cb = region_of(child)
            feas, _ = lpsolve.feasible((cA, cb))
            if not feas:
                continue
            try:
                pre_lo, _ = lpsolve.optimize_linear(g, (cA, cb), "min")
                pre_hi, _ = lpsolve.optimize_linear(g, (cA, cb), "max")
            except lpsolve.InfeasibleRegionError:
                continue
            pre_lo, pre_hi = pre_lo + g0, pre_hi + g0
            if sign > 0:
                child.tight[(li, j)] = (max(pre_lo, 0.0), max(pre_hi, 0.0))
            else:
                child.tight[(li, j)] = (min(pre_lo, 0.0), min(pre_hi, 0.0))
            child.core = _crown_core(net, cA, cb, child.pins, child.tight)
            # nested regions can only tighten; inherit the parent bound floor
            child.lower = np.maximum(child.core.lower, node.lower)
            child.upper = np.minimum(child.core.upper, node.upper)
            for p in child.core.argmin + child.core.argmax:
                cex = true_violation(p)
                if cex is not None:
                    cex_out = cex
                    break
            if cex_out is not None:
                break
            heapq.heappush(heap, (-child.violation(los, his), child.creation, child))
        creation += 2
        if cex_out is not None:
            status = VIOLATED
            break
        glo, ghi = global_bounds()
        history.append((processed, glo.copy(), ghi.copy()))

    if status is None:
        status = HOLDS if not heap else UNKNOWN
    glo, ghi = global_bounds()
    if status == HOLDS:
        within = np.all(glo >= los - STATUS_TOL) and np.all(ghi <= his + STATUS_TOL)
        if not within:
            status = UNKNOWN
    bounds = BoundsResult(glo, ghi, "bab", time.perf_counter() - t0, processed, history)
    return status, bounds, cex_out


# ---------------------------------------------------------------------------
# orchestration


def verify_spec(
    net: Network,
    spec: Spec,
    poly: Polytope,
    method: str = "bab",
    budget: Budget | None = None,
    prepass_samples: int = 256,
    seed: int = 0,
) -> VerificationResult:
    """Falsify by sampling, then certify by the requested bound engine."""
    if method not in ("crown", "bab"):
        raise ValueError(f"method must be 'crown' or 'bab', got {method!r}")
    if poly.dim != net.input_dim:
        raise ValueError(f"polytope dim {poly.dim} != network input dim {net.input_dim}")
    los, his = normalize_interval(spec.output_interval, net.output_dim)
    t0 = time.perf_counter()
    cex = find_counterexample(net, poly, spec.output_interval, prepass_samples, seed=seed)
    if cex is not None:
        bounds = crown_bounds(net, poly)
        return VerificationResult(
            spec.id, VIOLATED, bounds.lower, bounds.upper, method,
            time.perf_counter() - t0, 0, cex,
        )
    if method == "crown":
        bounds = crown_bounds(net, poly)
        within = np.all(bounds.lower >= los - STATUS_TOL) and np.all(bounds.upper <= his + STATUS_TOL)
        status = HOLDS if within else UNKNOWN
        return VerificationResult(
            spec.id, status, bounds.lower, bounds.upper, "crown",
            time.perf_counter() - t0, 0, None,
        )
    status, bounds, cex = bab_verify(net, poly, spec.output_interval, budget)
    return VerificationResult(
        spec.id, status, bounds.lower, bounds.upper, "bab",
        time.perf_counter() - t0, bounds.subproblems, cex,
    )


def box_to_polytope(box: BoxPerturbation) -> Polytope:
    d = box.center.shape[0]
    hs = []
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        hs.append(geometry.Halfspace(e, float(box.center[i] + box.radius)))
        hs.append(geometry.Halfspace(-e, float(-(box.center[i] - box.radius))))
    return Polytope(dim=d, halfspaces=hs, vertices=None, source_tag="pixel-box")


def verify_box_baseline(
    controller: Network,
    box: BoxPerturbation,
    out_interval,
    spec_id: str = "baseline",
) -> VerificationResult:
    """CROWN robustness run directly in pixel space over an L-inf box."""
    if box.center.shape != (controller.input_dim,):
        raise ValueError(
            f"box dim {box.center.shape[0]} != controller input dim {controller.input_dim}"
        )
    los, his = normalize_interval(out_interval, controller.output_dim)
    t0 = time.perf_counter()
    out0 = np.atleast_1d(forward(controller, box.center))
    if max(np.max(los - out0), np.max(out0 - his)) > STATUS_TOL:
        cex = _make_counterexample(box.center, out0, los, his)
        bounds = ibp_bounds(controller, (box.center - box.radius, box.center + box.radius))
        return VerificationResult(
            spec_id, VIOLATED, bounds.lower, bounds.upper, "crown",
            time.perf_counter() - t0, 0, cex,
        )
    poly = box_to_polytope(box)
    bounds = crown_bounds(controller, poly)
    within = np.all(bounds.lower >= los - STATUS_TOL) and np.all(bounds.upper <= his + STATUS_TOL)
    status = HOLDS if within else UNKNOWN
    return VerificationResult(
        spec_id, status, bounds.lower, bounds.upper, "crown",
        time.perf_counter() - t0, 0, None,
    )

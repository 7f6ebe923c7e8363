"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings.
"""

import json
import time

import numpy as np

from latentverify.cli import main as cli_main
from latentverify.geometry import (
    contains,
    contains_many,
    convex_hull,
    filter_samples,
    inflate,
    load_samples_csv,
    sample_points,
)
from latentverify.nnmodel import compose, forward, load_network
from latentverify.speclang import SENTINEL, build_performance_spec, build_safety_spec, emit_vnnlib, parse_vnnlib
from latentverify.verifier import (
    HOLDS,
    VIOLATED,
    BoxPerturbation,
    Budget,
    bab_verify,
    crown_bounds,
    exact_range_enumerate,
    verify_box_baseline,
    verify_spec,
)

from conftest import random_net, random_polytope
from test_geometry import lp_extreme_points, polygon_distances


def report(name: str, ok: bool, detail: str):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_acceptance_soundness_suite():
    """100 random nets x random polytopes: crown and bab bounds contain the
    min/max of 10,000 hit-and-run samples, zero violations beyond 1e-9."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(1001)
    worst = 0.0
    for trial in range(100):
        d = int(rng.integers(2, 5))
        n_hidden = int(rng.integers(2, 4))
        widths = [int(rng.integers(4, 17)) for _ in range(n_hidden)]
        net = random_net(rng, d, widths, 1)
        poly = random_polytope(rng, d)

        cb = crown_bounds(net, poly)
        span = max(float(cb.upper[0] - cb.lower[0]), 1e-3)
        interval = (float(cb.lower[0]) + 0.4 * span, float(cb.upper[0]) - 0.4 * span)
        _, bb, _ = bab_verify(net, poly, interval, Budget(max_subproblems=24, timeout_s=2.0))

        pts = sample_points(poly, 10_000, seed=trial)
        outs = forward(net, pts)
        emin, emax = float(outs.min()), float(outs.max())
        for bounds in (cb, bb):
            worst = max(worst, bounds.lower[0] - emin, emax - bounds.upper[0])
        if worst > 1e-9:
            break
    elapsed = time.perf_counter() - t0
    report(
        "soundness-suite",
        worst <= 1e-9 and elapsed < 300.0,
        f"100 nets, worst bound violation {worst:.3e} (tol 1e-9), {elapsed:.1f}s (budget 300s)",
    )


def test_acceptance_completeness_suite():
    """50 nets with <= 12 ReLUs: bab bounds equal enumeration within 1e-6 on a
    marginal interval, and statuses agree with ground truth on all three
    intervals (holds / violated / marginal)."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(2002)
    arch_choices = ([4, 4], [6, 6], [8, 4], [6, 4], [12], [5, 5])
    max_bound_err = 0.0
    status_fail = 0
    for trial in range(50):
        d = int(rng.integers(2, 5))
        widths = list(arch_choices[trial % len(arch_choices)])
        net = random_net(rng, d, widths, 1)
        assert net.relu_count() <= 12
        poly = random_polytope(rng, d)
        exact = exact_range_enumerate(net, poly)
        lo_e, hi_e = float(exact.lower[0]), float(exact.upper[0])
        span = max(hi_e - lo_e, 1e-3)

        s, _, _ = bab_verify(net, poly, (lo_e - 0.1 * span - 1e-6, hi_e + 0.1 * span + 1e-6))
        if s != HOLDS:
            status_fail += 1
        s, _, cex = bab_verify(net, poly, (lo_e + 0.25 * span, hi_e - 0.25 * span))
        if s != VIOLATED or cex is None:
            status_fail += 1
        s, bounds, _ = bab_verify(net, poly, (lo_e - 1e-8, hi_e + 1e-8))
        if s != HOLDS:
            status_fail += 1
        max_bound_err = max(max_bound_err, abs(bounds.lower[0] - lo_e), abs(bounds.upper[0] - hi_e))
    elapsed = time.perf_counter() - t0
    report(
        "completeness-suite",
        status_fail == 0 and max_bound_err <= 1e-6 and elapsed < 600.0,
        f"50 nets x 3 intervals, status mismatches {status_fail}, max |bab-enum| {max_bound_err:.3e} "
        f"(tol 1e-6), {elapsed:.1f}s (budget 600s)",
    )


def test_acceptance_geometry_suite():
    """Hull vertices equal the LP extreme-point oracle on 50 point sets, and
    facet-normal inflation passes the distance membership test at 1e-6."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(3003)

    hull_fail = 0
    for trial in range(50):
        d = 2 if trial % 2 == 0 else 3
        n = int(rng.integers(12, 40)) if d == 3 else int(rng.integers(12, 60))
        pts = rng.normal(0.0, 1.0, size=(n, d)) * rng.uniform(0.5, 2.0, size=d)
        poly = convex_hull(pts)
        oracle = {tuple(np.round(pts[j], 10)) for j in lp_extreme_points(pts)}
        got = {tuple(np.round(v, 10)) for v in poly.vertices}
        if got != oracle:
            hull_fail += 1

    # distance-based membership for the inflation, 10k samples per epsilon
    dist_fail = 0
    checked = 0
    hausdorff = {}
    for eps in (0.0, 0.05, 0.5):
        pts = rng.normal(0.0, 1.0, size=(40, 2))
        poly = convex_hull(pts)
        infl = inflate(poly, eps)
        norms = np.linalg.norm(poly.A, axis=1)
        n_total = 10_000
        # half along facet normals (distance exactly the offset), half ambient
        n_normal = n_total // 2
        facet_idx = rng.integers(0, len(poly.b), size=n_normal)
        base_pts = []
        for i in range(len(poly.b)):
            # a point on facet i: maximize the slack of the other facets
            from latentverify import lpsolve

            obj = np.zeros(3)
            obj[-1] = 1.0
            cons = [
                (np.concatenate([poly.A[j], [norms[j]]]), "<=", float(poly.b[j]))
                for j in range(len(poly.b))
                if j != i
            ]
            cons.append((np.concatenate([poly.A[i], [0.0]]), "=", float(poly.b[i])))
            cons.append((np.array([0.0, 0.0, -1.0]), "<=", 0.0))
            res = lpsolve.solve(lpsolve.LinearProgram(obj, "max", cons))
            base_pts.append(res.point[:2])
        base_pts = np.array(base_pts)
        offs = rng.uniform(0.0, 2.0 * eps + 0.2, size=n_normal)
        normals = poly.A[facet_idx] / norms[facet_idx][:, None]
        X_normal = base_pts[facet_idx] + offs[:, None] * normals
        X_ambient = rng.uniform(-4, 4, size=(n_total - n_normal, 2))

        d_normal = polygon_distances(poly.vertices, X_normal)
        d_ambient = polygon_distances(poly.vertices, X_ambient)
        in_normal = contains_many(infl, X_normal)
        in_ambient = contains_many(infl, X_ambient)

        # below eps - tol: must be contained (both families)
        take = d_normal <= eps - 1e-6
        dist_fail += int(np.sum(~in_normal[take]))
        take_a = d_ambient <= eps - 1e-6
        dist_fail += int(np.sum(~in_ambient[take_a]))
        # beyond eps + tol along facet normals: must be excluded
        take = d_normal >= eps + 1e-6
        dist_fail += int(np.sum(in_normal[take]))
        checked += int(np.sum(take)) + int(np.sum(take_a))
        if eps > 0:
            inside_d = d_normal[in_normal]
            hausdorff[eps] = float(inside_d.max()) if inside_d.size else 0.0

    elapsed = time.perf_counter() - t0
    detail = ", ".join(f"eps={e:g}: max contained normal-dist {hausdorff[e]:.6f}" for e in sorted(hausdorff))
    report(
        "geometry-suite",
        hull_fail == 0 and dist_fail == 0 and elapsed < 300.0,
        f"hull mismatches {hull_fail}/50, membership violations {dist_fail} "
        f"({checked} boundary checks; {detail}), {elapsed:.1f}s",
    )


def test_acceptance_composition_equivalence(fixtures_dir):
    """Bit-exact composition on 1,000 random z and sample-level min equality."""
    decoder = load_network(f"{fixtures_dir}/decoder.nnw")
    controller = load_network(f"{fixtures_dir}/controller.nnw")
    combined = compose(decoder, controller)
    rng = np.random.default_rng(4004)
    Z = rng.normal(0.0, 0.8, size=(1000, 4))
    seq = forward(controller, forward(decoder, Z))
    comp = forward(combined, Z)
    bit_exact = np.array_equal(seq, comp)
    min_equal = float(seq.min()) == float(comp.min())
    report(
        "composition-equivalence",
        bit_exact and min_equal,
        f"1000 z bit-exact={bit_exact}, sample-min equality={min_equal} (min {float(comp.min())!r})",
    )


def test_acceptance_spec_semantics():
    """phi1..phi5 round-trip VNN-LIB emission/parsing structurally; verify_spec
    statuses match the enumeration oracle on every small instance."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(5005)

    # round-trip of the five specification shapes
    poly = random_polytope(rng, 3)
    five = [
        build_safety_spec("-", "C_neg", spec_id="phi1"),
        build_safety_spec("+", "C_pos", spec_id="phi2"),
        build_performance_spec(-0.4, -0.1, "C_a", spec_id="phi3"),
        build_performance_spec(-0.1, 0.1, "C_b", spec_id="phi4"),
        build_performance_spec(0.1, 0.4, "C_c", spec_id="phi5"),
    ]
    rt_fail = 0
    for spec in five:
        prop = parse_vnnlib(emit_vnnlib(spec, poly))
        if prop.output_interval != spec.output_interval:
            rt_fail += 1
        if len(prop.input_halfspaces) != len(poly.halfspaces):
            rt_fail += 1
        for h_got, h_want in zip(prop.input_halfspaces, poly.halfspaces):
            if np.any(np.abs(h_got.a - h_want.a) > 1e-12) or abs(h_got.b - h_want.b) > 1e-12:
                rt_fail += 1

    # status agreement with the enumeration oracle, 100% required
    n_instances = 0
    status_fail = 0
    for trial in range(20):
        d = int(rng.integers(2, 4))
        net = random_net(rng, d, [5, 5], 1)  # 10 ReLUs
        poly = random_polytope(rng, d)
        exact = exact_range_enumerate(net, poly)
        lo_e, hi_e = float(exact.lower[0]), float(exact.upper[0])
        span = max(hi_e - lo_e, 1e-3)
        cases = [
            build_performance_spec(lo_e - 0.2 * span, hi_e + 0.2 * span, "p", spec_id="holds"),
            build_performance_spec(lo_e + 0.3 * span, hi_e + 0.2 * span, "p", spec_id="viol-lo"),
            build_safety_spec("-" if hi_e <= 0 else "+", "p", spec_id="one-sided"),
        ]
        for spec in cases:
            lo_s, hi_s = spec.output_interval[0]
            truth = HOLDS if (lo_e >= lo_s - 1e-12 and hi_e <= hi_s + 1e-12) else VIOLATED
            res = verify_spec(net, spec, poly, method="bab")
            n_instances += 1
            if res.status != truth:
                status_fail += 1
    elapsed = time.perf_counter() - t0
    report(
        "spec-semantics",
        rt_fail == 0 and status_fail == 0,
        f"round-trip failures {rt_fail}, status mismatches {status_fail}/{n_instances}, {elapsed:.1f}s",
    )


def test_acceptance_baseline_comparison(fixtures_dir, tmp_path):
    """Latent-space run vs pixel-space box run: correct 192/4 = 48.0 dimension
    ratio, both runs complete with sound bounds, wall times reported."""
    decoder = load_network(f"{fixtures_dir}/decoder.nnw")
    controller = load_network(f"{fixtures_dir}/controller.nnw")
    combined = compose(decoder, controller)

    samples = load_samples_csv(f"{fixtures_dir}/latents.csv")
    kept = filter_samples(samples, (-1.0, 0.0))
    poly = inflate(convex_hull(np.array([s.z for s in kept]), action_interval=(-1.0, 0.0)), 0.05)
    spec = build_safety_spec("-", "neg", spec_id="phi1")
    latent_res = verify_spec(combined, spec, poly, method="crown")

    with open(f"{fixtures_dir}/image.txt") as fh:
        x0 = np.array([float(t) for t in fh.read().split()])
    pixel_res = verify_box_baseline(controller, BoxPerturbation(x0, 0.05), (-SENTINEL, 0.0))

    ratio = combined.input_dim and controller.input_dim / combined.input_dim
    rng = np.random.default_rng(6006)
    zpts = sample_points(poly, 5000, seed=3)
    louts = forward(combined, zpts)
    latent_sound = louts.min() >= latent_res.lower[0] - 1e-9 and louts.max() <= latent_res.upper[0] + 1e-9
    xpts = x0 + rng.uniform(-0.05, 0.05, size=(5000, 192))
    pouts = forward(controller, xpts)
    pixel_sound = pouts.min() >= pixel_res.lower[0] - 1e-9 and pouts.max() <= pixel_res.upper[0] + 1e-9

    report(
        "baseline-comparison",
        ratio == 48.0 and latent_sound and pixel_sound,
        f"dim ratio 192/4 = {ratio}, latent wall {latent_res.wall_time_s:.3f}s "
        f"(status {latent_res.status}), pixel wall {pixel_res.wall_time_s:.3f}s "
        f"(status {pixel_res.status}), bounds sound: latent={latent_sound} pixel={pixel_sound}",
    )

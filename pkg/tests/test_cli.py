import json
import os

import numpy as np
import pytest

from latentverify.cli import main
from latentverify.geometry import load_polytope
from latentverify.nnmodel import AffineLayer, Network, forward, load_network, save_network


def affine_network(w, b, name="affine"):
    w = np.atleast_2d(np.asarray(w, dtype=float))
    return Network(w.shape[1], [AffineLayer(w, np.atleast_1d(np.asarray(b, dtype=float)), "linear")], name)


def write_square_polytope(path):
    doc = {
        "dim": 2,
        "vertices": [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        "halfspaces": [
            {"a": [1.0, 0.0], "b": 1.0},
            {"a": [-1.0, 0.0], "b": 0.0},
            {"a": [0.0, 1.0], "b": 1.0},
            {"a": [0.0, -1.0], "b": 0.0},
        ],
        "action_lo": None,
        "action_hi": None,
        "epsilon": 0.0,
        "source_tag": "clean",
        "parent_id": None,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


# ---------------------------------------------------------------------------
# build-polytope


def test_build_polytope_example_params(fixtures_dir, tmp_path, capsys):
    out = tmp_path / "c1.json"
    rc = main(
        [
            "build-polytope",
            "--csv", f"{fixtures_dir}/latents.csv",
            "--action-range=0.02:0.2",
            "--epsilon", "0.05",
            "--mode", "hull",
            "--out", str(out),
        ]
    )
    assert rc == 0
    poly = load_polytope(out)
    assert poly.dim == 4
    assert poly.action_interval == (0.02, 0.2)
    assert poly.inflation_radius == 0.05
    assert poly.n_vertices() > 0
    log = capsys.readouterr().out
    assert "halfspaces=" in log and "vertices=" in log


def test_build_polytope_epsilon_zero_identical(fixtures_dir, tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    base = ["build-polytope", "--csv", f"{fixtures_dir}/latents.csv", "--action-range=-0.4:-0.1", "--mode", "hull"]
    assert main(base + ["--epsilon", "0", "--out", str(a)]) == 0
    assert main(base + ["--epsilon", "0", "--out", str(b)]) == 0
    pa, pb = load_polytope(a), load_polytope(b)
    assert np.array_equal(pa.A, pb.A) and np.array_equal(pa.b, pb.b)


def test_build_polytope_hull_dim_limit_suggests_outer(fixtures_dir, tmp_path, capsys):
    rc = main(
        [
            "build-polytope",
            "--csv", f"{fixtures_dir}/latents8.csv",
            "--action-range=-1:1",
            "--mode", "hull",
            "--out", str(tmp_path / "x.json"),
        ]
    )
    assert rc == 1
    assert "outer_approximate" in capsys.readouterr().err


def test_build_polytope_outer_mode_for_8d(fixtures_dir, tmp_path):
    out = tmp_path / "c8.json"
    rc = main(
        [
            "build-polytope",
            "--csv", f"{fixtures_dir}/latents8.csv",
            "--action-range=-1:1",
            "--mode", "outer:24",
            "--out", str(out),
        ]
    )
    assert rc == 0
    poly = load_polytope(out)
    assert poly.dim == 8 and len(poly.halfspaces) == 24 and poly.n_vertices() == 0


def test_build_polytope_empty_selection(fixtures_dir, tmp_path, capsys):
    rc = main(
        [
            "build-polytope",
            "--csv", f"{fixtures_dir}/latents.csv",
            "--action-range=5:6",
            "--out", str(tmp_path / "x.json"),
        ]
    )
    assert rc == 1
    assert "no samples" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# compose


def test_compose_cli(fixtures_dir, tmp_path):
    out = tmp_path / "combined.nnw"
    rc = main(
        [
            "compose",
            "--decoder", f"{fixtures_dir}/decoder.nnw",
            "--controller", f"{fixtures_dir}/controller.nnw",
            "--out", str(out),
        ]
    )
    assert rc == 0
    combined = load_network(out)
    decoder = load_network(f"{fixtures_dir}/decoder.nnw")
    controller = load_network(f"{fixtures_dir}/controller.nnw")
    rng = np.random.default_rng(1)
    for _ in range(5):
        z = rng.normal(size=4)
        assert np.array_equal(forward(combined, z), forward(controller, forward(decoder, z)))


def test_compose_dim_mismatch_exit_code(fixtures_dir, tmp_path):
    rc = main(
        [
            "compose",
            "--decoder", f"{fixtures_dir}/controller.nnw",
            "--controller", f"{fixtures_dir}/decoder.nnw",
            "--out", str(tmp_path / "x.nnw"),
        ]
    )
    assert rc == 1


# ---------------------------------------------------------------------------
# verify


def _write_manifest(tmp_path, entries):
    man = tmp_path / "manifest.json"
    man.write_text(json.dumps(entries))
    return man


def test_verify_empty_manifest(tmp_path, fixtures_dir, capsys):
    man = _write_manifest(tmp_path, [])
    rc = main(["verify", "--network", f"{fixtures_dir}/absnet.nnw", "--specs", str(man)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "status" in out  # header row still printed


def test_verify_holds_and_violated_exit_codes(tmp_path, capsys):
    # f(z) = 0.35*z0 - 0.4 has range [-0.4, -0.05] on the unit square
    good = affine_network([[0.35, 0.0]], [-0.4], "good")
    save_network(good, tmp_path / "good.nnw")
    flipped = affine_network([[-0.35, 0.0]], [0.4], "flipped")
    save_network(flipped, tmp_path / "flipped.nnw")
    write_square_polytope(tmp_path / "sq.json")
    (tmp_path / "phi1.spec").write_text("ALWAYS (z IN sq) IMPLIES (output IN [-1e30, 0])\n")
    man = _write_manifest(tmp_path, [{"id": "phi1", "kind": "SAFETY", "spec": "phi1.spec", "polytope": "sq.json"}])

    rc = main(["verify", "--network", str(tmp_path / "good.nnw"), "--specs", str(man), "--out", str(tmp_path / "rep")])
    assert rc == 0
    report = json.loads((tmp_path / "rep" / "report.json").read_text())
    assert report["results"][0]["status"] == "HOLDS"
    assert report["results"][0]["paper_status"] == "SAT"

    rc = main(["verify", "--network", str(tmp_path / "flipped.nnw"), "--specs", str(man), "--out", str(tmp_path / "rep2")])
    assert rc == 2
    report = json.loads((tmp_path / "rep2" / "report.json").read_text())
    assert report["results"][0]["status"] == "VIOLATED"
    assert report["results"][0]["paper_status"] == "UNSAT"
    assert "counterexample" in report["results"][0]
    capsys.readouterr()


def test_verify_five_spec_suite_with_fixture_nets(tmp_path, fixtures_dir, capsys):
    for rng_spec, lo, hi in (("neg", -1.0, -0.0001), ("pos", 0.0001, 1.0), ("p3", -0.4, -0.1), ("p4", -0.1, 0.1), ("p5", 0.1, 0.4)):
        rc = main(
            [
                "build-polytope",
                "--csv", f"{fixtures_dir}/latents.csv",
                f"--action-range={lo}:{hi}",
                "--epsilon", "0.05",
                "--out", str(tmp_path / f"{rng_spec}.json"),
            ]
        )
        assert rc == 0
    specs = [
        ("phi1", "SAFETY", "ALWAYS (z IN neg) IMPLIES (output IN [-1e30, 0])", "neg.json"),
        ("phi2", "SAFETY", "ALWAYS (z IN pos) IMPLIES (output IN [0, 1e30])", "pos.json"),
        ("phi3", "PERFORMANCE", "ALWAYS (z IN p3) IMPLIES (output IN [-0.4, -0.1])", "p3.json"),
        ("phi4", "PERFORMANCE", "ALWAYS (z IN p4) IMPLIES (output IN [-0.1, 0.1])", "p4.json"),
        ("phi5", "PERFORMANCE", "ALWAYS (z IN p5) IMPLIES (output IN [0.1, 0.4])", "p5.json"),
    ]
    entries = []
    for sid, kind, text, poly in specs:
        (tmp_path / f"{sid}.spec").write_text(text + "\n")
        entries.append({"id": sid, "kind": kind, "spec": f"{sid}.spec", "polytope": poly})
    man = _write_manifest(tmp_path, entries)
    rc = main(
        [
            "verify",
            "--decoder", f"{fixtures_dir}/decoder.nnw",
            "--controller", f"{fixtures_dir}/controller.nnw",
            "--specs", str(man),
            "--method", "crown",
            "--out", str(tmp_path / "rep"),
        ]
    )
    report = json.loads((tmp_path / "rep" / "report.json").read_text())
    assert len(report["results"]) == 5
    assert [r["spec_id"] for r in report["results"]] == ["phi1", "phi2", "phi3", "phi4", "phi5"]
    statuses = {r["status"] for r in report["results"]}
    assert statuses <= {"HOLDS", "VIOLATED", "UNKNOWN"}
    if "VIOLATED" in statuses:
        assert rc == 2
    elif "UNKNOWN" in statuses:
        assert rc == 3
    else:
        assert rc == 0
    table = capsys.readouterr().out
    for sid in ("phi1", "phi2", "phi3", "phi4", "phi5"):
        assert sid in table


def test_verify_report_determinism(tmp_path, fixtures_dir, capsys):
    good = affine_network([[0.35, 0.0]], [-0.4], "good")
    save_network(good, tmp_path / "good.nnw")
    write_square_polytope(tmp_path / "sq.json")
    (tmp_path / "phi.spec").write_text("ALWAYS (z IN sq) IMPLIES (output IN [-1e30, 0])\n")
    man = _write_manifest(tmp_path, [{"id": "phi", "kind": "SAFETY", "spec": "phi.spec", "polytope": "sq.json"}])
    args = ["verify", "--network", str(tmp_path / "good.nnw"), "--specs", str(man), "--seed", "7"]
    main(args + ["--out", str(tmp_path / "r1")])
    main(args + ["--out", str(tmp_path / "r2")])
    capsys.readouterr()

    def scrub(doc):
        for r in doc["results"]:
            r.pop("wall_time_s", None)
        return doc

    r1 = scrub(json.loads((tmp_path / "r1" / "report.json").read_text()))
    r2 = scrub(json.loads((tmp_path / "r2" / "report.json").read_text()))
    assert r1 == r2


# ---------------------------------------------------------------------------
# oracle


def test_oracle_abs_net(tmp_path, fixtures_dir, capsys):
    doc = {
        "dim": 1,
        "vertices": [[-2.0], [1.0]],
        "halfspaces": [{"a": [1.0], "b": 1.0}, {"a": [-1.0], "b": 2.0}],
        "action_lo": None,
        "action_hi": None,
        "epsilon": 0.0,
        "source_tag": "clean",
        "parent_id": None,
    }
    (tmp_path / "seg.json").write_text(json.dumps(doc))
    rc = main(
        ["oracle", "--network", f"{fixtures_dir}/absnet.nnw", "--polytope", str(tmp_path / "seg.json"), "--n", "500"]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "sampled" in out and "exact" in out
    # sampled max can never exceed the exact max of 2
    sampled_max = float(out.split("max=[")[1].split("]")[0])
    assert sampled_max <= 2.0 + 1e-9


# ---------------------------------------------------------------------------
# baseline


def test_baseline_point_box_and_ratio(tmp_path, fixtures_dir, capsys):
    # paired latent report for the dimension ratio
    write_square_polytope(tmp_path / "sq.json")
    good = affine_network([[0.35, 0.0]], [-0.4], "good")
    save_network(good, tmp_path / "good.nnw")
    (tmp_path / "phi.spec").write_text("ALWAYS (z IN sq) IMPLIES (output IN [-1e30, 0])\n")
    man = _write_manifest(tmp_path, [{"id": "phi", "kind": "SAFETY", "spec": "phi.spec", "polytope": "sq.json"}])
    # build a 4-d latent report from the fixture nets for the true 192/4 ratio
    for rng_spec, lo, hi in (("neg", -1.0, 0.0),):
        main(
            [
                "build-polytope",
                "--csv", f"{fixtures_dir}/latents.csv",
                f"--action-range={lo}:{hi}",
                "--out", str(tmp_path / f"{rng_spec}.json"),
            ]
        )
    (tmp_path / "phi1.spec").write_text("ALWAYS (z IN neg) IMPLIES (output IN [-1e30, 0])\n")
    man4 = _write_manifest(tmp_path, [{"id": "phi1", "kind": "SAFETY", "spec": "phi1.spec", "polytope": "neg.json"}])
    main(
        [
            "verify",
            "--decoder", f"{fixtures_dir}/decoder.nnw",
            "--controller", f"{fixtures_dir}/controller.nnw",
            "--specs", str(man4),
            "--method", "crown",
            "--out", str(tmp_path / "latentrep"),
        ]
    )
    capsys.readouterr()
    rc = main(
        [
            "baseline",
            "--controller", f"{fixtures_dir}/controller.nnw",
            "--image", f"{fixtures_dir}/image.txt",
            "--delta", "0.0",
            "--interval=-1e30:1e30",
            "--paired-report", str(tmp_path / "latentrep" / "report.json"),
            "--out", str(tmp_path / "base"),
        ]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "ratio=48" in out
    rec = json.loads((tmp_path / "base" / "baseline.json").read_text())
    assert rec["pixel_dim"] == 192 and rec["latent_dim"] == 4
    assert rec["dim_ratio"] == 48.0
    # delta=0: bounds equal the point evaluation
    controller = load_network(f"{fixtures_dir}/controller.nnw")
    with open(f"{fixtures_dir}/image.txt") as fh:
        x0 = np.array([float(t) for t in fh.read().split()])
    want = float(forward(controller, x0)[0])
    assert abs(rec["lower"][0] - want) <= 1e-9
    assert abs(rec["upper"][0] - want) <= 1e-9


def test_baseline_wrong_image_length(tmp_path, fixtures_dir, capsys):
    (tmp_path / "img.txt").write_text("0.5 0.5\n")
    rc = main(
        [
            "baseline",
            "--controller", f"{fixtures_dir}/controller.nnw",
            "--image", str(tmp_path / "img.txt"),
            "--delta", "0.1",
            "--interval=-1:1",
        ]
    )
    assert rc == 1
    assert "expects" in capsys.readouterr().err

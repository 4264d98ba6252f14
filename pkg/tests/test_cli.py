"""CLI behavior: determinism, manifests, exit codes, bundled examples."""

import json
from importlib import resources
from pathlib import Path

import numpy as np
import pytest

from eigenknot.cli import (
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_TOLERANCE,
    load_config,
    main,
)


def data_path(name: str) -> str:
    return str(resources.files("eigenknot").joinpath("data", name))


def test_config_parsing(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(
        "# comment\n"
        "k = 40\n"
        "delta = 1e-3\n"
        "k_sweep = 40, 80, 160\n"
        "density = constant\n"
        "flag = true\n"
    )
    cfg = load_config(str(cfg_file), ["delta=5e-4"])
    assert cfg["k"] == 40
    assert cfg["delta"] == 5e-4  # override wins
    assert cfg["k_sweep"] == [40.0, 80.0, 160.0]
    assert cfg["density"] == "constant"
    assert cfg["flag"] is True


def test_bad_config_exit_code(tmp_path):
    assert main(["verify", "--config", str(tmp_path / "missing.cfg")]) == EXIT_CONFIG
    cfg = tmp_path / "broken.cfg"
    cfg.write_text("no equals sign here\n")
    assert main(["verify", "--config", str(cfg)]) == EXIT_CONFIG
    # missing required keys
    assert main(["verify", "--set", "out=" + str(tmp_path / "x.csv")]) == EXIT_CONFIG


def test_unreachable_tolerance_exit_code(tmp_path):
    out = tmp_path / "approx.json"
    code = main(
        [
            "approximate",
            "--out",
            str(out),
            "--set",
            "delta=1e-30",
            "--set",
            "max_terms=10",
        ]
    )
    assert code == EXIT_TOLERANCE


def test_approximate_and_verify_roundtrip(tmp_path):
    approx = tmp_path / "field.json"
    assert (
        main(["approximate", "--out", str(approx), "--set", "density=linear_z", "--set", "delta=1e-3"])
        == EXIT_OK
    )
    doc = json.loads(approx.read_text())
    assert doc["achieved_error"] <= 1e-3
    assert "manifest" in doc

    csv1 = tmp_path / "verify1.csv"
    csv2 = tmp_path / "verify2.csv"
    for csv in (csv1, csv2):
        code = main(
            [
                "verify",
                "--out",
                str(csv),
                "--set",
                f"input={approx}",
                "--set",
                "k_sweep=40,80",
                "--set",
                "m=1",
            ]
        )
        assert code == EXIT_OK
    assert csv1.read_bytes() == csv2.read_bytes()  # byte-identical determinism

    lines = csv1.read_text().splitlines()
    assert lines[0].startswith("# manifest ")
    assert lines[1] == "order,sup_error,h,k"
    rows = [ln.split(",") for ln in lines[2:]]
    order0 = {int(r[3]): float(r[1]) for r in rows if r[0] == "0"}
    assert order0[80] < order0[40]


def test_manifest_cross_reference(tmp_path):
    approx = tmp_path / "f.json"
    main(["approximate", "--out", str(approx), "--set", "delta=1e-3"])
    manifest_text = Path(f"{approx}.manifest.json").read_text().strip()
    import hashlib

    digest = hashlib.sha256(manifest_text.encode()).hexdigest()
    doc = json.loads(approx.read_text())
    assert doc["manifest"] == digest


def test_nodal_on_bundled_axis_field(tmp_path):
    out = tmp_path / "axis"
    code = main(
        [
            "nodal",
            "--out",
            str(out),
            "--set",
            "input=" + data_path("axis_field.json"),
            "--set",
            "h=0.08",
        ]
    )
    assert code == EXIT_OK
    topo = json.loads(Path(f"{out}.topology.json").read_text())
    entries = topo["curves"]
    assert len(entries) == 1
    assert entries[0]["min_margin"] >= 0.5
    ply = Path(f"{out}.ply").read_text()
    assert ply.startswith("ply")
    curves = json.loads(Path(f"{out}.json").read_text())["curves"]
    verts = np.array(curves[0]["vertices"])
    assert np.max(np.hypot(verts[:, 0], verts[:, 1])) <= 1e-6


def test_spinorize_pipeline(tmp_path):
    single = data_path("single_center.json")
    out = tmp_path / "spinor.json"
    code = main(
        [
            "spinorize",
            "--out",
            str(out),
            "--set",
            f"input1={single}",
            "--set",
            f"input2={single}",
            "--set",
            "k=12",
        ]
    )
    assert code == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["eigenvalue"] == 13.5
    assert doc["dirac_residual"] <= 1e-8
    assert doc["orientation"] in (-1, 1)
    for name in doc["components"]:
        assert (tmp_path / name).is_file()


def test_torus_command(tmp_path):
    out = tmp_path / "torus.csv"
    code = main(
        ["torus", "--out", str(out), "--set", "k_sweep=1,3", "--set", "trials=500"]
    )
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    rows = {int(r.split(",")[0]): r.split(",") for r in lines[2:]}
    assert int(rows[1][1]) == 6
    assert int(rows[3][1]) == 30


def test_full_spinor_nodal_pipeline(tmp_path):
    # hopf-design components through the CLI: spinorize then nodal, with the
    # frame-adapted chart (the spinorize default) and per-component boxes
    import eigenknot as ek

    design = ek.hopf_link_design()
    comp_paths = []
    for a in (0, 1):
        p = tmp_path / f"hopf{a}.json"
        p.write_text(design.components[a].to_json())
        comp_paths.append(p)
    spinor = tmp_path / "spinor.json"
    assert (
        main(
            [
                "spinorize",
                "--out",
                str(spinor),
                "--set",
                f"input1={comp_paths[0]}",
                "--set",
                f"input2={comp_paths[1]}",
                "--set",
                "k=60",
            ]
        )
        == EXIT_OK
    )
    doc = json.loads(spinor.read_text())
    assert doc["dirac_residual"] <= 1e-9

    out = tmp_path / "curves"
    code = main(
        [
            "nodal",
            "--out",
            str(out),
            "--set",
            f"input={spinor}",
            "--set",
            "h=0.26",
            "--set",
            "component1_box_lo=-3.8,-3.8,-1.9",
            "--set",
            "component1_box_hi=3.8,3.8,1.9",
            "--set",
            "component2_box_lo=-4.8,-1.9,-3.9",
            "--set",
            "component2_box_hi=1.6,1.9,3.9",
        ]
    )
    assert code == EXIT_OK
    topo = json.loads(Path(f"{out}.topology.json").read_text())
    cross = [e for e in topo["linking"] if e["field"] == "cross"]
    assert cross and abs(cross[0]["link"]) == 1
    closed = [e for e in topo["curves"] if e["closed"]]
    assert all(e["min_margin"] > 0 for e in closed)

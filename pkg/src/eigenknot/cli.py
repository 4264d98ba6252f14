"""Command-line pipeline: approximate, synthesize, spinorize, verify, nodal, torus.

Configuration lives in a flat key = value text file (ints, floats, booleans,
comma-separated number lists, strings); --set key=value flags override file
entries.  Every run writes a manifest (sha256 of the canonical config plus
input-file hashes, seed, package version) and each output cross-references
the manifest hash, so identical config + seed reproduces outputs
byte-for-byte.

Exit codes: 0 success, 2 config error, 3 tolerance not met, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, harmonics, nodal, sphere, spinor3, torus
from .helmholtz import (
    BesselSum,
    HerglotzDensity,
    ToleranceError,
    DesignError,
    eval_bessel_sum,
    herglotz_discretize,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TOLERANCE = 3
EXIT_NUMERICAL = 4


class ConfigError(ValueError):
    pass


def _parse_value(raw: str):
    raw = raw.strip()
    low = raw.lower()
    if low in ("true", "false"):
        return low == "true"
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            pass
    if "," in raw:
        try:
            return [float(tok) for tok in raw.split(",") if tok.strip()]
        except ValueError:
            pass
    return raw


def load_config(path: str | None, overrides) -> dict:
    cfg: dict = {}
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {path}")
        for lineno, line in enumerate(p.read_text().splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, _, raw = line.partition("=")
            cfg[key.strip()] = _parse_value(raw)
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, raw = item.partition("=")
        cfg[key.strip()] = _parse_value(raw)
    return cfg


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"missing required config key: {key}")
    return cfg[key]


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _hash_file(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out_prefix: Path, cfg: dict, inputs) -> str:
    # the output location is not an input to the computation; leaving it out
    # keeps manifests (and thus output bytes) identical across destinations
    manifest = {
        "config": {k: cfg[k] for k in sorted(cfg) if k != "out"},
        "inputs": {str(p): _hash_file(p) for p in inputs},
        "seed": cfg.get("seed", 0),
        "version": __version__,
    }
    text = _canonical(manifest)
    digest = hashlib.sha256(text.encode()).hexdigest()
    out_prefix.parent.mkdir(parents=True, exist_ok=True)
    Path(f"{out_prefix}.manifest.json").write_text(text + "\n")
    return digest


def _write_json(path: Path, doc: dict, manifest: str):
    doc = dict(doc)
    doc["manifest"] = manifest
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(_canonical(doc) + "\n")


def _density_from_config(cfg: dict) -> HerglotzDensity:
    n = int(cfg.get("n", 3))
    resolution = int(cfg.get("resolution", 24))
    kind = cfg.get("density", "constant")
    if kind == "constant":
        return HerglotzDensity.constant(n, 1.0, resolution)
    if kind == "linear_z":
        return HerglotzDensity.from_function(n, lambda xi: xi[:, -1].astype(complex), resolution)
    if kind == "random":
        rng = np.random.default_rng(int(cfg.get("density_seed", cfg.get("seed", 0))))
        a = rng.normal(size=n) + 1j * rng.normal(size=n)
        b = rng.normal(size=(n, n))

        def fn(xi):
            return xi @ a + np.einsum("mi,ij,mj->m", xi, b, xi) + 1.0

        return HerglotzDensity.from_function(n, fn, resolution)
    raise ConfigError(f"unknown density kind: {kind}")


def _load_bessel(path: str) -> BesselSum:
    return BesselSum.from_json(Path(path).read_text())


def _chart_from_config(cfg: dict, n: int, default_kind: str = "random") -> sphere.Chart:
    """chart = random | adapted.  Spinor work defaults to the adapted gauge
    (chart frame aligned with the left-invariant frame at the base point);
    scalar synthesis is chart-insensitive and defaults to a seeded frame."""
    kind = cfg.get("chart", default_kind)
    seed = int(cfg.get("chart_seed", cfg.get("seed", 0)))
    base = cfg.get("chart_base")
    if kind == "adapted":
        if n != 3:
            raise ConfigError("adapted charts are specific to S^3")
        p0 = np.asarray(base, dtype=float) if base is not None else np.array([1.0, 0, 0, 0])
        return spinor3.adapted_chart(p0)
    if kind != "random":
        raise ConfigError(f"unknown chart kind: {kind}")
    if base is not None:
        return sphere.random_chart(n, seed, p0=np.asarray(base, dtype=float))
    return sphere.random_chart(n, seed)


def cmd_approximate(cfg: dict) -> int:
    out = Path(str(_require(cfg, "out")))
    density = _density_from_config(cfg)
    delta = float(cfg.get("delta", 1e-3))
    manifest = write_manifest(out, cfg, [])
    bsum = herglotz_discretize(
        density,
        delta,
        radius=float(cfg.get("radius", 2.5)),
        seed=int(cfg.get("seed", 0)),
    )
    doc = bsum.to_dict()
    doc["achieved_error"] = bsum.report.achieved
    doc["error_constant"] = bsum.report.constant
    _write_json(out, doc, manifest)
    print(f"wrote {out} (N={len(bsum)}, achieved={bsum.report.achieved:.3e})", file=sys.stderr)
    return EXIT_OK


def cmd_synthesize(cfg: dict) -> int:
    out = Path(str(_require(cfg, "out")))
    src = str(_require(cfg, "input"))
    k = int(_require(cfg, "k"))
    bsum = _load_bessel(src)
    chart = _chart_from_config(cfg, bsum.n)
    manifest = write_manifest(out, cfg, [src])
    Y = harmonics.synthesize(bsum, k, chart)
    doc = Y.to_dict()
    doc["chart"] = chart.to_dict()
    _write_json(out, doc, manifest)
    print(f"wrote {out} (k={k}, N={len(Y)})", file=sys.stderr)
    return EXIT_OK


def _load_harmonic(path: str) -> tuple:
    doc = json.loads(Path(path).read_text())
    Y = harmonics.UltrasphericalSum.from_dict(doc)
    chart = sphere.Chart.from_dict(doc["chart"]) if "chart" in doc else None
    Y.chart = chart
    return Y, chart


def cmd_spinorize(cfg: dict) -> int:
    out = Path(str(_require(cfg, "out")))
    src1 = str(_require(cfg, "input1"))
    src2 = str(_require(cfg, "input2"))
    k = int(_require(cfg, "k"))
    b1, b2 = _load_bessel(src1), _load_bessel(src2)
    chart = _chart_from_config(cfg, 3, default_kind="adapted")
    manifest = write_manifest(out, cfg, [src1, src2])
    y1 = harmonics.synthesize(b1, k, chart)
    y2 = harmonics.synthesize(b2, k, chart)
    psi = spinor3.dirac_project(spinor3.SpinorField3((y1, y2), k=k), k)
    comp_paths = [Path(f"{out}.comp{a}.json") for a in (1, 2)]
    for path, y in zip(comp_paths, (y1, y2)):
        doc = y.to_dict()
        doc["chart"] = chart.to_dict()
        _write_json(path, doc, manifest)
    resid = spinor3.dirac_residual(psi, 1.5 + k, samples=32, seed=int(cfg.get("seed", 0)))
    _write_json(
        out,
        {
            "components": [p.name for p in comp_paths],
            "orientation": psi.orientation,
            "projected": True,
            "k": k,
            "eigenvalue": 1.5 + k,
            "dirac_residual": resid,
        },
        manifest,
    )
    print(f"wrote {out} (eigenvalue {1.5 + k}, residual {resid:.2e})", file=sys.stderr)
    return EXIT_OK


def load_spinor(path: str):
    doc = json.loads(Path(path).read_text())
    base = Path(path).parent
    y1, chart = _load_harmonic(str(base / doc["components"][0]))
    y2, _ = _load_harmonic(str(base / doc["components"][1]))
    k = int(doc["k"])
    psi = spinor3.SpinorField3((y1, y2), orientation=doc.get("orientation", 1), k=k)
    if doc.get("projected", False):
        psi = spinor3.dirac_project(psi, k)
    return psi, chart, k


def cmd_verify(cfg: dict) -> int:
    out = Path(str(_require(cfg, "out")))
    src = str(_require(cfg, "input"))
    sweep = cfg.get("k_sweep", [40, 80, 160])
    if isinstance(sweep, (int, float)):
        sweep = [sweep]
    sweep = [int(k) for k in sweep]
    if sweep != sorted(sweep) or len(set(sweep)) != len(sweep):
        raise ConfigError("k_sweep must be strictly increasing")
    m = int(cfg.get("m", 2))
    h = float(cfg.get("h", 0.125))
    bsum = _load_bessel(src)
    chart = _chart_from_config(cfg, bsum.n)
    manifest = write_manifest(out, cfg, [src])
    rows = []
    for k in sweep:
        Y = harmonics.synthesize(bsum, k, chart)
        report = harmonics.localization_error(bsum, Y, m=m, h=h)
        rows.extend(report.to_csv_rows())
        lap = harmonics.laplace_residual(Y, samples=16, h=1e-3, seed=int(cfg.get("seed", 0)))
        rows.append(("laplace", lap, 1e-3, k))
    lines = [f"# manifest {manifest}", "order,sup_error,h,k"]
    for order, err, step, k in rows:
        lines.append(f"{order},{err:.17g},{step:.17g},{k}")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out} ({len(rows)} rows)", file=sys.stderr)
    return EXIT_OK


def cmd_nodal(cfg: dict) -> int:
    out = Path(str(_require(cfg, "out")))
    src = str(_require(cfg, "input"))
    h = float(cfg.get("h", 0.05))
    lo = np.asarray(cfg.get("box_lo", [-0.8, -0.8, -0.8]), dtype=float)
    hi = np.asarray(cfg.get("box_hi", [0.8, 0.8, 0.8]), dtype=float)
    doc = json.loads(Path(src).read_text())
    manifest = write_manifest(out, cfg, [src])
    fields = []
    if "components" in doc:
        psi, chart, k = load_spinor(src)
        for a in (0, 1):
            fields.append((f"component{a + 1}", spinor3.component_pullback(psi, a, chart, k)))
    else:
        bsum = BesselSum.from_dict(doc)
        fields.append(("field", lambda x: eval_bessel_sum(bsum, x)))

    all_curves = []
    closed_by_field = []
    topo = {"curves": [], "linking": []}
    for name, fn in fields:
        box = (cfg.get(f"{name}_box_lo"), cfg.get(f"{name}_box_hi"))
        bounds = (
            (np.asarray(box[0], dtype=float), np.asarray(box[1], dtype=float))
            if box[0] is not None and box[1] is not None
            else (lo, hi)
        )
        nset = nodal.extract_nodal(fn, bounds, h)
        for idx, curve in enumerate(nset.curves):
            all_curves.append(curve)
            topo["curves"].append(
                {
                    "field": name,
                    "index": idx,
                    "closed": curve.closed,
                    "vertices": len(curve),
                    "min_margin": float(curve.margins.min()),
                    "stable": curve.stable,
                }
            )
        closed = nset.closed_curves()
        closed_by_field.append(closed)
        for i in range(len(closed)):
            for j in range(i + 1, len(closed)):
                try:
                    lk = nodal.linking_number(closed[i], closed[j])
                except ValueError:
                    lk = None
                topo["linking"].append({"field": name, "pair": [i, j], "link": lk})
    if len(fields) == 2 and closed_by_field[0] and closed_by_field[1]:
        # principal (largest) closed curve of each component
        try:
            lk = nodal.linking_number(closed_by_field[0][0], closed_by_field[1][0])
        except ValueError:
            lk = None
        topo["linking"].append({"field": "cross", "pair": [0, 0], "link": lk})
    Path(f"{out}.ply").write_text(nodal.curves_to_ply(all_curves, comment=f"manifest {manifest}"))
    _write_json(Path(f"{out}.json"), json.loads(nodal.curves_to_json(all_curves)), manifest)
    _write_json(Path(f"{out}.topology.json"), topo, manifest)
    print(f"wrote {out}.ply/.json/.topology.json ({len(all_curves)} curves)", file=sys.stderr)
    return EXIT_OK


def cmd_torus(cfg: dict) -> int:
    out = Path(str(_require(cfg, "out")))
    n = int(cfg.get("n", 3))
    ks = cfg.get("k_sweep", cfg.get("k", [3]))
    if isinstance(ks, (int, float)):
        ks = [ks]
    ks = [int(k) for k in ks]
    trials = int(cfg.get("trials", 4000))
    seed = int(cfg.get("seed", 0))
    manifest = write_manifest(out, cfg, [])
    lines = [f"# manifest {manifest}", "k,count,discrepancy,localization_sup_error"]
    for k in ks:
        dirs = torus.lattice_directions(n, k)
        disc = torus.cap_discrepancy(dirs, trials=trials, seed=seed)
        loc = ""
        if cfg.get("localize", False):
            density = _density_from_config(cfg)
            _, report = torus.torus_localize(density, k, trials=trials, seed=seed)
            loc = f"{report.sup_error:.17g}"
        lines.append(f"{k},{len(dirs)},{disc:.17g},{loc}")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out}", file=sys.stderr)
    return EXIT_OK


_COMMANDS = {
    "approximate": cmd_approximate,
    "synthesize": cmd_synthesize,
    "spinorize": cmd_spinorize,
    "verify": cmd_verify,
    "nodal": cmd_nodal,
    "torus": cmd_torus,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="eigenknot",
        description="Localized spherical harmonics, S^3 Dirac eigenfields, nodal topology.",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE", help="override a config entry"
    )
    parser.add_argument("--out", help="output path or prefix (overrides config)")
    parser.add_argument("--seed", type=int, help="seed (overrides config)")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config, args.set)
        if args.out is not None:
            cfg["out"] = args.out
        if args.seed is not None:
            cfg["seed"] = args.seed
        cfg.setdefault("seed", 0)
        return _COMMANDS[args.command](cfg)
    except (ConfigError, FileNotFoundError, KeyError) as exc:
        print(json.dumps({"error": "config", "detail": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    except (ToleranceError, DesignError) as exc:
        detail = {"error": "tolerance", "detail": str(exc)}
        if isinstance(exc, ToleranceError):
            detail["achieved"] = exc.achieved
        print(json.dumps(detail), file=sys.stderr)
        return EXIT_TOLERANCE
    except (np.linalg.LinAlgError, FloatingPointError, ValueError) as exc:
        print(json.dumps({"error": "numerical", "detail": str(exc)}), file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())

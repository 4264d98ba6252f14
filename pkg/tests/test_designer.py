"""Designers: plane-wave collocation and the closed-form Hopf pair."""

import math

import numpy as np
import pytest

import eigenknot as ek
from eigenknot import nodal
from eigenknot.helmholtz import (
    DesignError,
    design_bessel_sum,
    eval_bessel_sum,
    hopf_link_design,
    transported_frame,
)


def test_transported_frame_closes():
    t = np.linspace(0, 2 * math.pi, 48, endpoint=False)
    pts = np.stack([np.cos(t), np.sin(t), 0 * t], axis=-1)
    u, v = transported_frame(pts, closed=True)
    tangents = np.roll(pts, -1, axis=0) - np.roll(pts, 1, axis=0)
    tangents /= np.linalg.norm(tangents, axis=1, keepdims=True)
    assert np.max(np.abs(np.einsum("si,si->s", u, tangents))) <= 1e-12
    assert np.max(np.abs(np.einsum("si,si->s", u, v))) <= 1e-12
    # adjacent frames stay close (no seam jump)
    gaps = np.linalg.norm(u - np.roll(u, 1, axis=0), axis=1)
    assert gaps.max() <= 0.2


def test_axis_design():
    z = np.linspace(-0.9, 0.9, 25)
    axis = np.stack([0 * z, 0 * z, z], axis=-1)
    res = design_bessel_sum([(axis, 0)], budget=160)
    assert res.curve_residual[0] <= 1e-6
    assert res.conversion_error[0] <= 1e-6
    bsum = res.components[0]
    nset = nodal.extract_nodal(
        lambda x: eval_bessel_sum(bsum, x), ([-0.6] * 3, [0.6] * 3), 0.06
    )
    assert len(nset.curves) == 1
    curve = nset.curves[0]
    deviation = np.max(np.hypot(curve.vertices[:, 0], curve.vertices[:, 1]))
    assert deviation <= 1e-6
    assert curve.margins.min() >= 0.5


def test_unit_circle_design():
    t = np.linspace(0, 2 * math.pi, 49)
    target = np.stack([np.cos(t), np.sin(t), 0 * t], axis=-1)
    res = design_bessel_sum([(target, 0)], budget=240, verify_tol=0.02, grid_h=0.05)
    nset = nodal.extract_nodal(
        lambda x: eval_bessel_sum(res.components[0], x),
        ([-1.3, -1.3, -0.4], [1.3, 1.3, 0.4]),
        0.05,
    )
    closed = nset.closed_curves()
    best = min(nodal.hausdorff_dist(c, target) for c in closed)
    assert best <= 0.02
    assert res.planewave.dirac_residual(np.linspace(-0.4, 0.4, 30).reshape(10, 3)) <= 1e-10


def test_design_failure_reported():
    # a sub-wavelength three-circle chain is beyond the plane-wave class at
    # this budget; the designer must refuse rather than return junk
    t = np.linspace(0, 2 * math.pi, 33)
    tiny = 0.12 * np.stack([np.cos(t), np.sin(t), 0 * t], axis=-1)
    with pytest.raises(DesignError):
        design_bessel_sum(
            [(tiny, 0), (tiny + np.array([0.12, 0, 0.0]), 1)],
            budget=120,
            verify_tol=0.005,
            grid_h=0.04,
        )


@pytest.fixture(scope="module")
def hopf():
    return hopf_link_design()


def test_hopf_design_is_eigenfield(hopf):
    rng = np.random.default_rng(0)
    x = rng.uniform(-4, 4, (200, 3))
    pair = (
        lambda p: eval_bessel_sum(hopf.components[0], p),
        lambda p: eval_bessel_sum(hopf.components[1], p),
    )
    from eigenknot.spinor3 import euclidean_dirac_check

    resid, helm = euclidean_dirac_check(pair, ([-0.5] * 3, [0.5] * 3), 0.02)
    # kernel-dipole finite differences leave a small eigen defect
    assert resid <= 5e-3
    assert max(helm) <= 2e-3
    for a in (0, 1):
        gap = np.abs(eval_bessel_sum(hopf.components[a], x) - hopf.exact_component(a, x))
        assert gap.max() <= 2e-3


def test_hopf_targets_link_once(hopf):
    t0, t1 = hopf.targets[0], hopf.targets[1]
    assert t0.closed and t1.closed
    assert abs(nodal.linking_number(t0, t1)) == 1
    assert t0.margins.min() > 0.01 and t1.margins.min() > 0.01


def test_hopf_components_share_centers(hopf):
    assert np.array_equal(hopf.components[0].centers, hopf.components[1].centers)
    assert len(hopf.components[0]) == 7

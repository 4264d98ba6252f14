"""Flat-torus scalar variant: rational directions of height k and localized
trigonometric eigenfunctions.

Convention: T^n = R^n / Z^n with Fourier basis e^{2 pi i m.x}, m integer.
A direction set of height k consists of all unit vectors xi with k*xi in
Z^n; the localized eigenfunction u(x) = sum_j c_j e^{2 pi i k xi_j . x} has
Laplace eigenvalue (2 pi k)^2 exactly, and u(x0 + y/(2 pi k)) plays the role
of the rescaled spherical harmonic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .helmholtz import HerglotzDensity, eval_herglotz


@dataclass
class LatticeDirectionSet:
    """Integer solutions of |m|^2 = k^2 with unit directions m/k."""

    n: int
    k: int
    vectors: np.ndarray

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.int64)
        if self.vectors.ndim != 2 or (len(self.vectors) and self.vectors.shape[1] != self.n):
            raise ValueError("vectors must be an (N, n) integer array")
        if len(self.vectors):
            norms = np.sum(self.vectors.astype(object) ** 2, axis=1)
            if np.any(norms != self.k * self.k):
                raise ValueError("all vectors must have squared norm k^2")

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def directions(self) -> np.ndarray:
        return self.vectors.astype(float) / self.k

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "m": self.vectors.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "LatticeDirectionSet":
        return cls(d["n"], d["k"], np.array(d["m"], dtype=np.int64))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def lattice_directions(n: int, k: int) -> LatticeDirectionSet:
    """Enumerate all m in Z^n with |m|^2 = k^2 (exact integer arithmetic)."""
    if n not in (2, 3, 4):
        raise ValueError("supported dimensions are n in {2, 3, 4}")
    if k < 1:
        raise ValueError("height k must be a positive integer")
    k2 = k * k
    sols = []
    if n == 2:
        for m1 in range(-k, k + 1):
            rem = k2 - m1 * m1
            m2 = math.isqrt(rem)
            if m2 * m2 == rem:
                sols.append((m1, m2))
                if m2:
                    sols.append((m1, -m2))
    elif n == 3:
        for m1 in range(-k, k + 1):
            r1 = k2 - m1 * m1
            top = math.isqrt(r1)
            for m2 in range(-top, top + 1):
                rem = r1 - m2 * m2
                m3 = math.isqrt(rem)
                if m3 * m3 == rem:
                    sols.append((m1, m2, m3))
                    if m3:
                        sols.append((m1, m2, -m3))
    else:
        for m1 in range(-k, k + 1):
            r1 = k2 - m1 * m1
            t1 = math.isqrt(r1)
            for m2 in range(-t1, t1 + 1):
                r2 = r1 - m2 * m2
                t2 = math.isqrt(r2)
                for m3 in range(-t2, t2 + 1):
                    rem = r2 - m3 * m3
                    m4 = math.isqrt(rem)
                    if m4 * m4 == rem:
                        sols.append((m1, m2, m3, m4))
                        if m4:
                            sols.append((m1, m2, m3, -m4))
    vectors = np.array(sorted(set(sols)), dtype=np.int64)
    return LatticeDirectionSet(n, k, vectors)


def _cap_fraction(n: int, t: np.ndarray) -> np.ndarray:
    """Normalized area of the cap {x . z >= t} on S^{n-1}."""
    from scipy.special import betainc

    t = np.asarray(t, dtype=float)
    half = 0.5 * (n - 1)
    x = np.clip(1.0 - t * t, 0.0, 1.0)
    inc = 0.5 * betainc(half, 0.5, x)
    return np.where(t >= 0, inc, 1.0 - inc)


def cap_discrepancy(s: LatticeDirectionSet, trials: int = 4000, seed: int = 0) -> float:
    """max over sampled caps of |empirical fraction - normalized cap area|."""
    if len(s) < 1:
        raise ValueError("direction set is empty")
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(trials, s.n))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    t = rng.uniform(-1.0, 1.0, trials)
    dirs = s.directions
    emp = (dirs @ z.T >= t[None, :]).mean(axis=0)
    return float(np.max(np.abs(emp - _cap_fraction(s.n, t))))


@dataclass
class TorusEigenfunction:
    """u(x) = sum_j c_j e^{2 pi i m_j . x} with |m_j| = k: eigenvalue (2 pi k)^2."""

    n: int
    k: int
    freqs: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        self.freqs = np.asarray(self.freqs, dtype=np.int64)
        self.coeffs = np.asarray(self.coeffs, dtype=complex)

    def eval(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.exp(2j * math.pi * (x @ self.freqs.T.astype(float))) @ self.coeffs

    @property
    def eigenvalue(self) -> float:
        return (2.0 * math.pi * self.k) ** 2


@dataclass
class TorusLocalizationReport:
    k: int
    n_directions: int
    discrepancy: float
    sup_error: float
    grid: int = field(default=0)


def torus_localize(
    f: HerglotzDensity,
    k: int,
    discrepancy_threshold: float | None = None,
    trials: int = 4000,
    seed: int = 0,
    grid: int = 9,
):
    """Reweight a Herglotz density onto height-k rational directions.

    Each quadrature node sends its weight*value to the nearest available
    lattice direction; the C^0 report compares u(y / (2 pi k)) with the
    Herglotz field of f on a grid of the unit ball.
    """
    dirs = lattice_directions(f.n, k)
    disc = cap_discrepancy(dirs, trials=trials, seed=seed)
    if discrepancy_threshold is not None and disc > discrepancy_threshold:
        raise ValueError(
            f"direction set too sparse: cap discrepancy {disc:.4f} > {discrepancy_threshold}"
        )
    unit = dirs.directions
    owner = np.argmax(f.nodes @ unit.T, axis=1)
    coeffs = np.zeros(len(dirs), dtype=complex)
    np.add.at(coeffs, owner, f.weights * f.values)
    u = TorusEigenfunction(f.n, k, dirs.vectors, coeffs)

    ax = np.linspace(-1.0, 1.0, grid)
    mesh = np.stack(np.meshgrid(*([ax] * f.n), indexing="ij"), axis=-1).reshape(-1, f.n)
    mesh = mesh[np.linalg.norm(mesh, axis=1) <= 1.0]
    sup = float(
        np.max(
            np.abs(
                u.eval(mesh / (2.0 * math.pi * k)) - eval_herglotz(f, mesh)
            )
        )
    )
    return u, TorusLocalizationReport(k, len(dirs), disc, sup, grid)

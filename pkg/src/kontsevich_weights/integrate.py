"""Numerical evaluation of the three weight families.

Two independent numerical routes check the exact values:

* reduced mode collapses the wedge vertices analytically (each wedge becomes
  one power of :func:`~kontsevich_weights.geometry.wedge_factor_bulk` or
  :func:`~kontsevich_weights.geometry.wedge_factor_boundary`) and integrates
  the remaining low-dimensional form by Gauss-Legendre quadrature or Monte
  Carlo;
* full mode samples every free vertex and integrates the determinant of the
  edge-angle Jacobian.

Monte Carlo runs are split into chunks with sub-seeds spawned from one
:class:`numpy.random.SeedSequence`; chunks may run on a thread pool but are
reduced in chunk order, so results depend only on ``(seed, samples, chunks)``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSample, DimensionOverflow
from .exact import Family, WeightQuery, weight_gamma, weight_lambda, weight_upsilon
from .geometry import (
    TWO_PI,
    angle,
    angle_gradient,
    batch_edge_jacobian,
    wedge_factor_boundary,
)

__all__ = [
    "McEstimate",
    "HalfPlaneMap",
    "DiskMap",
    "SamplerSpec",
    "ORIENTATION",
    "reduced_upsilon_quad",
    "reduced_gamma_mc",
    "full_mc",
    "convergence_report",
    "exact_value",
]

# Sign linking the edge order to the orientation dRe z ^ dIm z of each free
# bulk point (and d theta on the one-boundary arc).  Calibrated against
# w_Gamma1 = 1/24, w_Upsilon2 = 1/12 and w_Lambda1 = 1/2; see test_integrate.
# Each wedge contributes one factor WEDGE_ORIENTATION; the remaining
# factor is per family.
WEDGE_ORIENTATION = 1
ORIENTATION = {Family.GAMMA: 1, Family.UPSILON: 1, Family.LAMBDA: 1}

_BATCHES_PER_CHUNK = 16
_BLOCK = 1 << 15
_EPS = 1e-12


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    samples: int
    seed: int
    family: WeightQuery
    rejected: int = 0
    chunks: int = 1


def exact_value(query: WeightQuery) -> float:
    return float({Family.GAMMA: weight_gamma, Family.UPSILON: weight_upsilon,
                  Family.LAMBDA: weight_lambda}[query.family](query.n))


# -- importance sampling maps -------------------------------------------------

@dataclass(frozen=True)
class HalfPlaneMap:
    """Polar map of the unit square onto the upper half-plane around a real center.

    ``(u, t) -> center + r exp(i pi u)`` with ``r = scale * t / (1 - t)``.  The
    density with respect to area is ``scale / (pi r (scale + r)^2)``: it
    diverges like ``1/r`` at the center and decays like ``r^-3`` at infinity,
    matching the worst behavior of the angle forms there.
    """

    center: float = 0.0
    scale: float = 1.0

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.random(size)
        t = rng.random(size)
        r = self.scale * t / (1.0 - t)
        return self.center + r * np.exp(1j * np.pi * u)

    def density(self, z: np.ndarray) -> np.ndarray:
        r = np.abs(z - self.center)
        with np.errstate(divide="ignore"):
            return self.scale / (np.pi * r * (self.scale + r) ** 2)


@dataclass(frozen=True)
class DiskMap:
    """Full polar map around a bulk center, folded into the upper half-plane.

    Same radial law as :class:`HalfPlaneMap` with angle ``2 pi u``; samples
    below the real axis are reflected, so the density is the sum over the
    center and its mirror image.  ``center`` and ``scale`` may be arrays
    (one per sample) to condition on previously drawn points.
    """

    center: complex | np.ndarray = 1j
    scale: float | np.ndarray = 1.0

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.random(size)
        t = rng.random(size)
        r = self.scale * t / (1.0 - t)
        w = self.center + r * np.exp(2j * np.pi * u)
        return np.where(w.imag < 0, np.conj(w), w)

    def density(self, z: np.ndarray) -> np.ndarray:
        def radial(r):
            with np.errstate(divide="ignore"):
                return self.scale / (TWO_PI * r * (self.scale + r) ** 2)

        return radial(np.abs(z - self.center)) + radial(np.abs(z - np.conj(self.center)))


@dataclass
class SamplerSpec:
    """Defensive mixture of polar maps; every component covers the whole half-plane."""

    components: list = field(default_factory=lambda: [HalfPlaneMap()])
    weights: tuple[float, ...] | None = None

    def _weights(self) -> np.ndarray:
        if self.weights is None:
            return np.full(len(self.components), 1.0 / len(self.components))
        w = np.asarray(self.weights, dtype=float)
        return w / w.sum()

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        which = rng.choice(len(self.components), size=size, p=self._weights())
        out = np.empty(size, dtype=complex)
        for i, comp in enumerate(self.components):
            draws = comp.sample(rng, size)
            out = np.where(which == i, draws, out)
        return out

    def density(self, z: np.ndarray) -> np.ndarray:
        w = self._weights()
        return sum(wi * comp.density(z) for wi, comp in zip(w, self.components))


# -- quadrature -----------------------------------------------------------------

def reduced_upsilon_quad(n: int, points: int) -> float:
    """One-boundary weight from its one-dimensional reduced integral.

    The bulk point runs over the unit half circle ``x = exp(i theta)`` with
    ``q = 0``; the domain is split at ``theta = pi/2`` where the boundary
    branch of ``phi(q, x)`` and the indicator ``(x;q)`` jump, and each half is
    integrated with ``points`` Gauss-Legendre nodes.
    """
    if points < 2:
        raise ValueError("points must be >= 2")
    if n < 0:
        raise ValueError("n must be >= 0")
    nodes, weights = np.polynomial.legendre.leggauss(points)
    total = 0.0
    for lo, hi in ((0.0, np.pi / 2), (np.pi / 2, np.pi)):
        theta = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
        x = np.exp(1j * theta)
        q = np.zeros_like(theta)
        grad = angle_gradient(x, q.astype(complex))
        # d phi(x,q) / d theta through dx/dtheta = i x
        dphi = grad[:, 0] * (-np.sin(theta)) + grad[:, 1] * np.cos(theta)
        integrand = wedge_factor_boundary(x, q) ** n * dphi / TWO_PI
        total += 0.5 * (hi - lo) * np.dot(weights, integrand)
    return float(ORIENTATION[Family.UPSILON] * total)


# -- Monte Carlo machinery -----------------------------------------------------

def _split(total: int, parts: int) -> list[int]:
    base, extra = divmod(total, parts)
    return [base + (1 if i < extra else 0) for i in range(parts)]


def _run_chunk(kernel, rng: np.random.Generator, count: int):
    """Evaluate ``count`` samples; returns (batch sums, batch sizes, rejected)."""
    sizes = _split(count, _BATCHES_PER_CHUNK) if count >= _BATCHES_PER_CHUNK else [count]
    sums = np.zeros(len(sizes))
    rejected = 0
    for b, size in enumerate(sizes):
        done = 0
        while done < size:
            block = min(_BLOCK, size - done)
            values, rej = kernel(rng, block)
            sums[b] += math.fsum(values)
            rejected += rej
            done += block
    return sums, np.asarray(sizes, dtype=float), rejected


def _run(kernel, query: WeightQuery, samples: int, seed: int, chunks: int,
         workers: int | None) -> McEstimate:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if chunks < 1:
        raise ValueError("chunks must be >= 1")
    chunks = min(chunks, samples)
    streams = np.random.SeedSequence(seed).spawn(chunks)
    counts = _split(samples, chunks)
    workers = workers or min(chunks, os.cpu_count() or 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda a: _run_chunk(kernel, np.random.default_rng(a[0]), a[1]),
                                    zip(streams, counts)))
    else:
        results = [_run_chunk(kernel, np.random.default_rng(s), c) for s, c in zip(streams, counts)]
    sums = np.concatenate([r[0] for r in results])
    sizes = np.concatenate([r[1] for r in results])
    rejected = sum(r[2] for r in results)
    mean = math.fsum(sums) / samples
    nb = len(sums)
    if nb > 1:
        batch_means = sums / sizes
        var = float(np.sum(sizes**2 * (batch_means - mean) ** 2)) / samples**2 * nb / (nb - 1)
        std_error = math.sqrt(var)
    else:
        std_error = float("inf") if samples > 1 else 0.0
    return McEstimate(mean, std_error, samples, seed, query, rejected, chunks)


def _bad_rows(*points: np.ndarray) -> np.ndarray:
    bad = np.zeros(points[0].shape, dtype=bool)
    for p in points:
        bad |= ~np.isfinite(p) | (p.imag <= _EPS)
    for i, a in enumerate(points):
        for b in points[i + 1:]:
            bad |= np.abs(a - b) < _EPS
    return bad


# -- reduced wheel ------------------------------------------------------------------

_X = 1j
_WHEEL_SAMPLER = SamplerSpec([HalfPlaneMap(0.0, 1.0), DiskMap(_X, 1.0)])


def _reduced_gamma_kernel(n: int):
    def kernel(rng, size):
        y = _WHEEL_SAMPLER.sample(rng, size)
        bad = _bad_rows(y, np.full(size, _X)) | (np.abs(y.real - _X.real) < _EPS)
        rej = 0
        while np.any(bad):
            idx = np.nonzero(bad)[0]
            rej += idx.size
            y[idx] = _WHEEL_SAMPLER.sample(rng, idx.size)
            bad = _bad_rows(y, np.full(size, _X)) | (np.abs(y.real - _X.real) < _EPS)
        x = np.full(size, _X)
        g_xy = angle_gradient(x, y, check=False)[..., 2:]
        g_yx = angle_gradient(y, x, check=False)[..., :2]
        det = g_xy[:, 0] * g_yx[:, 1] - g_xy[:, 1] * g_yx[:, 0]
        factor = (angle(x, y, check=False) - angle(y, x, check=False)) / TWO_PI \
            + 0.5 * np.where(x.real > y.real, 1.0, -1.0)
        values = ORIENTATION[Family.GAMMA] * factor**n * det / TWO_PI**2 / _WHEEL_SAMPLER.density(y)
        return values, rej

    return kernel


def reduced_gamma_mc(n: int, samples: int, seed: int, chunks: int = 8,
                     workers: int | None = None) -> McEstimate:
    """Wheel weight with the wedges integrated out: a 2D integral over ``y`` with ``x = i``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return _run(_reduced_gamma_kernel(n), WeightQuery(Family.GAMMA, n), samples, seed, chunks, workers)


# -- full integrands -------------------------------------------------------------------

def _full_kernel(query: WeightQuery):
    family, n = query.family, query.n
    D = query.dimension

    def draw_anchor(rng, size):
        # the non-wedge free coordinates and their density
        if family is Family.GAMMA:
            y = _WHEEL_SAMPLER.sample(rng, size)
            return [y.real, y.imag], _WHEEL_SAMPLER.density(y), [np.full(size, _X), y]
        if family is Family.UPSILON:
            theta = np.pi * rng.random(size)
            x = np.exp(1j * theta)
            return [theta], np.full(size, 1.0 / np.pi), [x, np.zeros(size, dtype=complex)]
        return [], np.ones(size), [np.zeros(size, dtype=complex), np.ones(size, dtype=complex)]

    def wedge_sampler(targets):
        a, b = targets
        comps = []
        for t in (a, b):
            if np.all(t.imag == 0):
                comps.append(HalfPlaneMap(float(t.real[0]), 1.0))
            else:
                comps.append(DiskMap(t, 1.0))
        if family is Family.GAMMA:
            comps.append(HalfPlaneMap(0.0, 1.0))
        return SamplerSpec(comps)

    def draw(rng, size):
        cols, dens, targets = draw_anchor(rng, size)
        sampler = wedge_sampler(targets)
        pts = list(targets)
        for _ in range(n):
            z = sampler.sample(rng, size)
            dens = dens * sampler.density(z)
            cols += [z.real, z.imag]
            pts.append(z)
        coords = np.stack(cols, axis=-1) if cols else np.zeros((size, 0))
        bulk = [p for p in pts if not np.all(p.imag == 0)]
        bad = _bad_rows(*bulk) if bulk else np.zeros(size, dtype=bool)
        for p in pts:
            for q in pts:
                if p is not q and np.all(q.imag == 0):
                    bad |= np.abs(p - q) < _EPS
        bad |= ~np.isfinite(dens) | (dens <= 0)
        return coords, dens, bad

    def kernel(rng, size):
        coords, dens, bad = draw(rng, size)
        rej = 0
        while np.any(bad):
            idx = np.nonzero(bad)[0]
            rej += idx.size
            c2, d2, b2 = draw(rng, idx.size)
            coords[idx], dens[idx] = c2, d2
            bad = np.zeros(size, dtype=bool)
            bad[idx] = b2
        if D == 0:
            return np.ones(size), rej
        jac = batch_edge_jacobian(family, n, coords)
        if jac.shape[-1] != D:
            raise DimensionOverflow(f"{query} edge/coordinate mismatch")
        det = np.linalg.det(jac)
        sign = ORIENTATION[family] * WEDGE_ORIENTATION**n
        values = sign * det / TWO_PI**D / dens
        if not np.all(np.isfinite(values)):
            raise DegenerateSample("non-finite integrand after rejection")
        return values, rej

    return kernel


def full_mc(query: WeightQuery, samples: int, seed: int, chunks: int = 8,
            workers: int | None = None) -> McEstimate:
    """Weight from the full configuration-space integral, every free vertex sampled."""
    query = WeightQuery(query.family, query.n)
    return _run(_full_kernel(query), query, samples, seed, chunks, workers)


def convergence_report(query: WeightQuery, sample_ladder, seed: int, chunks: int = 8,
                       mode: str = "full") -> list[dict]:
    """Rows ``(samples, estimate, std_error, abs_error, z)`` against the exact weight."""
    ladder = list(sample_ladder)
    if ladder != sorted(ladder):
        raise ValueError("sample ladder must be ascending")
    exact = exact_value(query)
    rows = []
    for samples in ladder:
        if mode == "full":
            est = full_mc(query, samples, seed, chunks)
        elif mode == "reduced" and query.family is Family.GAMMA:
            est = reduced_gamma_mc(query.n, samples, seed, chunks)
        else:
            raise ValueError(f"no {mode} Monte Carlo for {query.family.value}")
        err = abs(est.mean - exact)
        z = (est.mean - exact) / est.std_error if est.std_error > 0 else (0.0 if err == 0 else math.inf)
        rows.append({"samples": samples, "estimate": est.mean, "std_error": est.std_error,
                     "abs_error": err, "z": z})
    return rows

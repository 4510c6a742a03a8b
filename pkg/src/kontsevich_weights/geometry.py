"""Harmonic angle propagator, sign factors and gauge-fixed configuration spaces.

Points of the closed upper half-plane are plain Python/numpy complex numbers;
a point with zero imaginary part is a boundary (second-type) point.  All
functions broadcast over numpy arrays.

Branch convention
-----------------
For a bulk source ``u`` the angle ``phi(u, v) = arg((v - u) / (v - conj(u)))``
is taken in ``[0, 2 pi)``; the cut is the vertical ray above ``u``.  For a
boundary source ``q`` the angle is locally constant and equal to its limit
from the interior: ``0`` when ``Re v < q`` and ``2 pi`` when ``Re v > q``.
This reproduces ``phi(p, q) = 2 pi`` and ``phi(q, p) = 0`` for ``p < q``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CoincidentPoints, DimensionOverflow, EqualRealParts
from .exact import Family, WeightQuery

TWO_PI = 2.0 * np.pi

__all__ = [
    "angle",
    "angle_gradient",
    "sign_bulk",
    "indicator_boundary",
    "wedge_factor_bulk",
    "wedge_factor_boundary",
    "edge_list",
    "GaugeFixedConfig",
    "vertex_positions",
    "edge_jacobian",
    "batch_edge_jacobian",
]


def _scalar_out(value, *inputs):
    if all(np.ndim(a) == 0 for a in inputs):
        return value.item() if isinstance(value, np.ndarray) else value
    return value


def angle(u, v, *, check: bool = True):
    """Harmonic angle at ``u`` towards ``v``, in ``[0, 2 pi)`` (``2 pi`` allowed for boundary ``u``)."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if check and np.any(u == v):
        raise CoincidentPoints("angle(u, v) with u == v")
    boundary = u.imag == 0.0
    if check and np.any(boundary & (v.real == u.real)):
        raise EqualRealParts("boundary source and target share a real part")
    with np.errstate(divide="ignore", invalid="ignore"):
        bulk = np.mod(np.angle((v - u) / (v - np.conj(u))), TWO_PI)
    # mod of a tiny negative angle rounds up to exactly 2 pi
    bulk = np.where(bulk >= TWO_PI, 0.0, bulk)
    edge = np.where(v.real > u.real, TWO_PI, 0.0)
    return _scalar_out(np.where(boundary, edge, bulk), u, v)


def angle_gradient(u, v, *, check: bool = True):
    """Partials ``(d/dRe u, d/dIm u, d/dRe v, d/dIm v)`` of the angle, stacked on the last axis.

    Branch independent.  For a boundary source every partial is reported as
    zero: the angle is locally constant there and ``u`` only moves along the
    real line, where its derivative vanishes as well.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if check and np.any(u == v):
        raise CoincidentPoints("angle_gradient(u, v) with u == v")
    with np.errstate(divide="ignore", invalid="ignore"):
        a = 1.0 / (v - u)
        b = 1.0 / (v - np.conj(u))
    d_re_v = (a - b).imag
    d_im_v = (a - b).real
    d_re_u = (b - a).imag
    d_im_u = -(a + b).real
    grad = np.stack([d_re_u, d_im_u, d_re_v, d_im_v], axis=-1)
    boundary = (u.imag == 0.0)[..., None]
    return np.where(boundary, 0.0, grad)


def sign_bulk(x, y):
    """``[x;y]``: +1 if ``Re x > Re y``, -1 if ``Re x < Re y``."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if np.any(x.real == y.real):
        raise EqualRealParts("[x;y] undefined for equal real parts")
    return _scalar_out(np.where(x.real > y.real, 1, -1), x, y)


def indicator_boundary(x, q):
    """``(x;q)``: 1 if ``Re x > q``, 0 if ``Re x < q``."""
    x = np.asarray(x, dtype=complex)
    q = np.asarray(q, dtype=float)
    if np.any(x.real == q):
        raise EqualRealParts("(x;q) undefined for Re x == q")
    return _scalar_out(np.where(x.real > q, 1, 0), x, q)


def wedge_factor_bulk(x, y):
    """Integral over one wedge vertex ``z`` of ``dphi(z,x) dphi(z,y) / (2 pi)^2``.

    Equal to ``(phi(x,y) - phi(y,x)) / (2 pi) + [x;y] / 2``; continuous in
    ``(x, y)`` although each summand jumps across a branch cut.
    """
    diff = angle(x, y) - angle(y, x)
    return diff / TWO_PI + 0.5 * sign_bulk(x, y)


def wedge_factor_boundary(x, q):
    """Wedge integral attached to a bulk point ``x`` and a boundary point ``q``.

    Limit of :func:`wedge_factor_bulk` as its second argument tends to ``q``;
    with the boundary branch convention it equals ``(phi(x,q) - pi) / (2 pi)``.
    """
    q = np.asarray(q, dtype=float)
    diff = angle(x, q.astype(complex)) - angle(q.astype(complex), x)
    return diff / TWO_PI + 0.5 * sign_bulk(x, q.astype(complex))


# -- gauge-fixed configuration spaces ---------------------------------------

def edge_list(family: Family | str, n: int) -> list[tuple[str, str]]:
    """Directed edges of a family graph in the integrand order fixing the sign.

    Vertex names: ``x``, ``y`` (wheel), ``q``, ``p`` (boundary), ``z1..zn`` (wedges).
    """
    family = Family(family)
    wedges_to = {Family.GAMMA: ("x", "y"), Family.UPSILON: ("x", "q"), Family.LAMBDA: ("p", "q")}
    head = {Family.GAMMA: [("x", "y"), ("y", "x")], Family.UPSILON: [("x", "q")], Family.LAMBDA: []}
    edges = list(head[family])
    a, b = wedges_to[family]
    for k in range(1, n + 1):
        edges += [(f"z{k}", a), (f"z{k}", b)]
    return edges


@dataclass(frozen=True)
class GaugeFixedConfig:
    """A point of the open configuration space with the affine group fixed.

    Coordinates by family:

    * gamma: ``(Re y, Im y, Re z1, Im z1, ...)`` with ``x = i``;
    * upsilon: ``(theta, Re z1, Im z1, ...)`` with ``x = exp(i theta)``, ``q = 0``;
    * lambda: ``(Re z1, Im z1, ...)`` with ``p = 0``, ``q = 1``.
    """

    family: Family
    n: int
    coords: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "coords", tuple(float(c) for c in self.coords))
        query = WeightQuery(self.family, self.n)
        if len(self.coords) != query.dimension or len(edge_list(self.family, self.n)) != query.dimension:
            raise DimensionOverflow(
                f"{self.family.value}_{self.n}: {len(self.coords)} coordinates for "
                f"{query.dimension} edges"
            )
        points = list(self.points().values())
        if self.family is Family.UPSILON and not 0.0 < self.coords[0] < np.pi:
            raise ValueError("theta must lie in (0, pi)")
        for name, z in self.points().items():
            if name.startswith(("y", "z")) and z.imag <= 0:
                raise ValueError(f"bulk point {name} must lie in the open upper half-plane")
        for i, a in enumerate(points):
            for b in points[i + 1:]:
                if a == b:
                    raise CoincidentPoints("configuration has coincident points")

    def points(self) -> dict[str, complex]:
        return {k: complex(v) for k, v in vertex_positions(self.family, self.n,
                                                           np.asarray(self.coords)).items()}


def vertex_positions(family: Family | str, n: int, coords: np.ndarray) -> dict[str, np.ndarray]:
    """Vertex positions from gauge-fixed coordinates; ``coords`` has shape ``(..., D)``."""
    family = Family(family)
    coords = np.asarray(coords, dtype=float)
    pos: dict[str, np.ndarray] = {}
    shape = coords.shape[:-1]
    if family is Family.GAMMA:
        pos["x"] = np.full(shape, 1j)
        pos["y"] = coords[..., 0] + 1j * coords[..., 1]
        offset = 2
    elif family is Family.UPSILON:
        pos["x"] = np.exp(1j * coords[..., 0])
        pos["q"] = np.zeros(shape, dtype=complex)
        offset = 1
    else:
        pos["p"] = np.zeros(shape, dtype=complex)
        pos["q"] = np.ones(shape, dtype=complex)
        offset = 0
    for k in range(n):
        pos[f"z{k + 1}"] = coords[..., offset + 2 * k] + 1j * coords[..., offset + 2 * k + 1]
    return pos


def _vertex_tangents(family: Family, n: int, coords: np.ndarray) -> dict[str, tuple[int, np.ndarray]]:
    # name -> (first coordinate index, d(position)/d(coords) as complex derivatives)
    tangents: dict[str, tuple[int, np.ndarray]] = {}
    shape = coords.shape[:-1]
    one = np.ones(shape, dtype=complex)
    if family is Family.GAMMA:
        tangents["y"] = (0, np.stack([one, 1j * one], axis=-1))
        offset = 2
    elif family is Family.UPSILON:
        tangents["x"] = (0, (1j * np.exp(1j * coords[..., 0]))[..., None])
        offset = 1
    else:
        offset = 0
    for k in range(n):
        tangents[f"z{k + 1}"] = (offset + 2 * k, np.stack([one, 1j * one], axis=-1))
    return tangents


def batch_edge_jacobian(family: Family | str, n: int, coords: np.ndarray) -> np.ndarray:
    """Matrix of edge-angle partials, shape ``(..., D, D)``.

    Row ``e`` holds the derivatives of the ``e``-th edge angle (in
    :func:`edge_list` order) with respect to the gauge-fixed coordinates.
    """
    family = Family(family)
    coords = np.asarray(coords, dtype=float)
    edges = edge_list(family, n)
    D = len(edges)
    if coords.shape[-1] != D:
        raise DimensionOverflow(f"{D} edges but {coords.shape[-1]} coordinates")
    pos = vertex_positions(family, n, coords)
    tangents = _vertex_tangents(family, n, coords)
    jac = np.zeros(coords.shape[:-1] + (D, D))
    for e, (src, tgt) in enumerate(edges):
        grad = angle_gradient(pos[src], pos[tgt], check=False)
        for name, (re_i, im_i) in ((src, (0, 1)), (tgt, (2, 3))):
            if name not in tangents:
                continue
            start, dpos = tangents[name]
            # chain rule through the complex position: dphi = g_re dRe + g_im dIm
            contrib = grad[..., re_i, None] * dpos.real + grad[..., im_i, None] * dpos.imag
            jac[..., e, start:start + dpos.shape[-1]] += contrib
    return jac


def edge_jacobian(config: GaugeFixedConfig) -> np.ndarray:
    return batch_edge_jacobian(config.family, config.n, np.asarray(config.coords))

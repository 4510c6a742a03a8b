"""Formal-geometry operators on truncated jets.

Every operator works over one chart point ``x0``: a jet is a polynomial in the
base offsets ``dx`` and the fiber coordinates ``y`` (see :mod:`.jets`), and a
base derivative is polynomial differentiation in ``dx``.  Fiber indices in the
bidifferential sums are always derivatives in ``y``.

Weights come from :mod:`.exact`; nothing here re-derives them.  All
arithmetic is exact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial
from typing import Mapping, Sequence

from .errors import CapExceeded, FilterViolation, JetInvariantError, ValidationFailure
from .exact import weight_gamma, weight_upsilon
from .jets import (BasePolynomial, JetPolynomial, _min_cap, matmul, random_jet,
                   series_matrix_inverse)

__all__ = [
    "ExpMapJets",
    "RJets",
    "BivectorJets",
    "HbarForm",
    "CotangentSplit",
    "pullback_function",
    "compute_R",
    "pullback_bivector",
    "pair_sum",
    "star_product",
    "star_commutator",
    "connection_A",
    "apply_connection",
    "apply_classical_DG",
    "flatness_residual",
    "curvature_F",
    "gamma_equation_residual",
    "bullet_product",
    "enforce_cotangent_filter",
    "cotangent_curvature",
    "parity_report",
    "random_exp_map",
    "random_bivector",
]


# -- types ----------------------------------------------------------------------

class ExpMapJets:
    """Jets of a formal exponential map ``phi^i(dx, y)`` over ``x0``.

    Components are exact polynomials with no term beyond the caps ``(kx, ky)``;
    the caps also set the truncation of every derived series.
    """

    def __init__(self, components: Sequence[JetPolynomial], kx: int, ky: int, *, validate: bool = True):
        self.components = tuple(c.with_caps(None, None) for c in components)
        self.dim = len(self.components)
        self.kx = kx
        self.ky = ky
        if kx < 0 or ky < 1:
            raise CapExceeded("caps must satisfy kx >= 0 and ky >= 1")
        self.x0 = tuple(c.constant_term() for c in self.components)
        if validate:
            self.validate()

    def validate(self):
        d = self.dim
        for i, comp in enumerate(self.components):
            if comp.dim != d:
                raise JetInvariantError(f"component {i + 1} has dimension {comp.dim}, expected {d}")
            for alpha, beta, c in comp.terms():
                if sum(alpha) > self.kx or sum(beta) > self.ky:
                    raise JetInvariantError(f"phi^{i + 1} has a term beyond the caps")
                unit_i = tuple(int(j == i) for j in range(d))
                if sum(beta) == 0 and sum(alpha) > 0 and not (alpha == unit_i and c == 1):
                    raise JetInvariantError(f"base restriction phi^{i + 1}(dx, 0) is not x0 + dx")
                if sum(beta) == 1 and not (sum(alpha) == 0 and beta == unit_i and c == 1):
                    raise JetInvariantError(f"fiber-linear part of phi^{i + 1} is not y{i + 1}")
            unit = tuple(int(j == i) for j in range(d))
            zero = (0,) * d
            if comp.coeff(unit, zero) != 1 and self.kx >= 1:
                raise JetInvariantError(f"base restriction phi^{i + 1}(dx, 0) is not x0 + dx")
            if comp.coeff(zero, unit) != 1:
                raise JetInvariantError(f"fiber-linear part of phi^{i + 1} is not y{i + 1}")

    @classmethod
    def affine(cls, dim: int, kx: int = 3, ky: int = 6, x0: Sequence | None = None) -> ExpMapJets:
        x0 = [Fraction(0)] * dim if x0 is None else [Fraction(v) for v in x0]
        comps = [JetPolynomial.constant(dim, x0[i]) + JetPolynomial.dx(dim, i) + JetPolynomial.y(dim, i)
                 for i in range(dim)]
        return cls(comps, kx, ky)

    def __eq__(self, other):
        return (isinstance(other, ExpMapJets) and self.components == other.components
                and (self.kx, self.ky) == (other.kx, other.ky))


@dataclass(frozen=True)
class RJets:
    """Matrix ``R^j_l`` (fiber index ``j``, form index ``l``) of jets."""

    entries: tuple[tuple[JetPolynomial, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.entries)

    def __getitem__(self, jl):
        j, l = jl
        return self.entries[j][l]

    @classmethod
    def from_matrix(cls, m) -> RJets:
        return cls(tuple(tuple(row) for row in m))

    def map(self, fn) -> RJets:
        return RJets(tuple(tuple(fn(e) for e in row) for row in self.entries))


@dataclass(frozen=True)
class BivectorJets:
    """Antisymmetric matrix ``pi^{ij}`` of jets in the fiber coordinates."""

    entries: tuple[tuple[JetPolynomial, ...], ...]

    def __post_init__(self):
        d = len(self.entries)
        for i in range(d):
            if len(self.entries[i]) != d:
                raise JetInvariantError("bivector matrix is not square")
            for j in range(d):
                if not (self.entries[i][j] + self.entries[j][i]).is_zero():
                    raise JetInvariantError(f"bivector is not antisymmetric at ({i + 1},{j + 1})")

    @property
    def dim(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @classmethod
    def constant(cls, dim: int, upper: Mapping[tuple[int, int], object]) -> BivectorJets:
        """Constant bivector from its entries ``{(i, j): value}`` with ``i < j`` (zero-based)."""
        m = [[JetPolynomial.zero(dim) for _ in range(dim)] for _ in range(dim)]
        for (i, j), v in upper.items():
            if i >= j:
                raise ValueError("give entries with i < j")
            m[i][j] = JetPolynomial.constant(dim, v)
            m[j][i] = JetPolynomial.constant(dim, -Fraction(v))
        return cls(tuple(tuple(r) for r in m))

    @classmethod
    def darboux(cls, dim: int) -> BivectorJets:
        """``pi^{i, i+m} = 1`` for ``d = 2m``; for ``d = 2`` this is ``pi^{12} = 1``."""
        split = CotangentSplit(dim)
        return cls.constant(dim, {(i, i + split.m): 1 for i in range(split.m)})


@dataclass(frozen=True)
class CotangentSplit:
    """Fiber coordinates ``(qbar_1..qbar_m, pbar_1..pbar_m)`` with ``d = 2m``."""

    dim: int
    m: int = field(init=False)

    def __post_init__(self):
        if self.dim <= 0 or self.dim % 2:
            raise JetInvariantError("cotangent split needs an even positive dimension")
        object.__setattr__(self, "m", self.dim // 2)

    def is_momentum(self, index: int) -> bool:
        return index >= self.m

    def pbar_degree(self, beta: Sequence[int]) -> int:
        return sum(beta[self.m:])


class HbarForm:
    """Form of degree 0, 1 or 2 whose components are ℏ-series of jets.

    ``components`` maps ``()``, ``(i,)`` or ``(i, j)`` with ``i < j`` to a list
    whose ``n``-th entry is the ℏ^n coefficient.
    """

    def __init__(self, degree: int, dim: int, order: int, components: Mapping[tuple, Sequence[JetPolynomial]]):
        if degree not in (0, 1, 2):
            raise ValueError("form degree must be 0, 1 or 2")
        self.degree = degree
        self.dim = dim
        self.order = order
        keys = self.keys(degree, dim)
        comps = {}
        for key in keys:
            series = list(components.get(key, []))
            if len(series) > order + 1:
                series = series[:order + 1]
            series += [JetPolynomial.zero(dim)] * (order + 1 - len(series))
            comps[key] = series
        extra = set(components) - set(keys)
        if extra:
            raise JetInvariantError(f"unexpected form components {sorted(extra)}")
        self.components = comps

    @staticmethod
    def keys(degree: int, dim: int) -> list[tuple]:
        if degree == 0:
            return [()]
        if degree == 1:
            return [(i,) for i in range(dim)]
        return [(i, j) for i in range(dim) for j in range(i + 1, dim)]

    def __getitem__(self, key) -> list[JetPolynomial]:
        if isinstance(key, int):
            key = (key,)
        if self.degree == 2 and len(key) == 2 and key[0] > key[1]:
            return [-c for c in self.components[(key[1], key[0])]]
        return self.components[key]

    def coefficient(self, n: int) -> dict[tuple, JetPolynomial]:
        """All components at ℏ^n."""
        return {k: v[n] for k, v in self.components.items()}

    def order_is_zero(self, n: int) -> bool:
        return all(v[n].is_zero() for v in self.components.values())

    def vanishing_orders(self) -> list[int]:
        return [n for n in range(self.order + 1) if self.order_is_zero(n)]

    def is_zero(self) -> bool:
        return all(self.order_is_zero(n) for n in range(self.order + 1))

    def _combine(self, other: HbarForm, sign: int) -> HbarForm:
        if (self.degree, self.dim) != (other.degree, other.dim):
            raise ValueError("forms of different shape")
        order = min(self.order, other.order)
        comps = {k: [a + b.scale(sign) for a, b in zip(self.components[k], other.components[k])][:order + 1]
                 for k in self.components}
        return HbarForm(self.degree, self.dim, order, comps)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def map(self, fn) -> HbarForm:
        return HbarForm(self.degree, self.dim, self.order,
                        {k: [fn(c) for c in v] for k, v in self.components.items()})

    def agrees_with(self, other: HbarForm) -> bool:
        if (self.degree, self.dim) != (other.degree, other.dim):
            return False
        order = min(self.order, other.order)
        return all(a.agrees_with(b) for k in self.components
                   for a, b in zip(self.components[k][:order + 1], other.components[k][:order + 1]))

    def render(self) -> dict[str, str]:
        """Component label -> ``"y1*y2 + (1/4)ℏ"`` style series text."""
        out = {}
        for key, series in self.components.items():
            label = "" if not key else "dx^" + "∧dx^".join(str(i + 1) for i in key)
            out[label] = render_series(series)
        return out

    def __repr__(self):
        return f"HbarForm(degree={self.degree}, dim={self.dim}, order={self.order}, {self.render()})"


def render_series(series: Sequence[JetPolynomial]) -> str:
    parts = []
    for n, jet in enumerate(series):
        if jet.is_zero():
            continue
        text = str(jet)
        if n == 0:
            parts.append(text)
            continue
        h = "ℏ" if n == 1 else f"ℏ^{n}"
        parts.append(f"({text}){h}")
    if not parts:
        return "0"
    out = parts[0]
    for p in parts[1:]:
        if p.startswith("(-") and p.count("(") == 1 and " " not in p[: p.index(")")]:
            out += " - (" + p[2:]
        else:
            out += " + " + p
    return out


# -- pullbacks and R --------------------------------------------------------------

def _as_base(f, dim: int) -> BasePolynomial:
    if isinstance(f, BasePolynomial):
        if f.dim != dim:
            raise ValueError(f"base polynomial has dimension {f.dim}, expected {dim}")
        return f
    if isinstance(f, float):
        raise TypeError("float constants are not accepted")
    return BasePolynomial.constant(dim, f)


def pullback_function(phi: ExpMapJets, f) -> JetPolynomial:
    """Taylor expansion of ``f o phi`` in ``(dx, y)``, truncated at the caps of ``phi``."""
    f = _as_base(f, phi.dim)
    if f.degree() > phi.kx + phi.ky:
        raise CapExceeded(f"degree {f.degree()} exceeds kx + ky = {phi.kx + phi.ky}")
    kx, ky = phi.kx, phi.ky
    d = phi.dim
    comps = [c.truncate(kx, ky) for c in phi.components]
    powers: dict[tuple[int, int], JetPolynomial] = {}

    def power(i: int, e: int) -> JetPolynomial:
        if e == 0:
            return JetPolynomial.constant(d, 1, kx, ky)
        if (i, e) not in powers:
            powers[(i, e)] = power(i, e - 1).mul(comps[i])
        return powers[(i, e)]

    total = JetPolynomial.zero(d, kx, ky)
    for alpha, c in f.terms.items():
        term = JetPolynomial.constant(d, c, kx, ky)
        for i, e in enumerate(alpha):
            if e:
                term = term.mul(power(i, e))
        total = total + term
    return total


def _fiber_jacobian(phi: ExpMapJets):
    return [[c.diff_y(j) for j in range(phi.dim)] for c in phi.components]


def compute_R(phi: ExpMapJets) -> RJets:
    """``R^j_l = -((d phi/d y)^-1)^j_k d phi^k / d x^l``, truncated at the caps of ``phi``."""
    kx, ky = phi.kx, phi.ky
    inv = series_matrix_inverse(_fiber_jacobian(phi), kx, ky)
    jx = [[c.diff_x(l).with_caps(kx, ky) for l in range(phi.dim)] for c in phi.components]
    prod = matmul(inv, jx, kx, ky)
    return RJets(tuple(tuple(-e for e in row) for row in prod))


def pullback_bivector(phi: ExpMapJets, pi) -> BivectorJets:
    """``(T phi^* pi)^{ab} = (J^-1)^a_i (J^-1)^b_j (pi^{ij} o phi)`` with ``J = d phi / d y``.

    ``pi`` is a ``d x d`` antisymmetric matrix of base polynomials or constants.
    """
    d = phi.dim
    base = [[_as_base(pi[i][j], d) for j in range(d)] for i in range(d)]
    for i in range(d):
        for j in range(d):
            neg = -base[j][i]
            if base[i][j] != neg:
                raise JetInvariantError(f"base bivector is not antisymmetric at ({i + 1},{j + 1})")
    kx, ky = phi.kx, phi.ky
    inv = series_matrix_inverse(_fiber_jacobian(phi), kx, ky)
    composed = [[pullback_function(phi, base[i][j]) for j in range(d)] for i in range(d)]
    inv_t = [[inv[b][a] for b in range(d)] for a in range(d)]
    out = matmul(matmul(inv, composed, kx, ky), inv_t, kx, ky)
    # antisymmetrize explicitly; the truncated product is already antisymmetric
    for a in range(d):
        for b in range(a + 1, d):
            if not (out[a][b] + out[b][a]).is_zero():
                raise JetInvariantError("pulled-back bivector lost antisymmetry")
    return BivectorJets(tuple(tuple(r) for r in out))


# -- bidifferential sums ------------------------------------------------------------

class _DerivCache:
    """Memoized fiber derivatives of one jet, keyed by sorted index tuples."""

    def __init__(self, jet: JetPolynomial):
        self._cache = {(): jet}

    def get(self, idx: tuple[int, ...]) -> JetPolynomial:
        hit = self._cache.get(idx)
        if hit is None:
            hit = self.get(idx[:-1]).diff_y(idx[-1])
            self._cache[idx] = hit
        return hit


def pair_sum(f: JetPolynomial, g: JetPolynomial, pi_hat: BivectorJets, n: int, *,
             _fcache: _DerivCache | None = None, _gcache: _DerivCache | None = None) -> JetPolynomial:
    """``sum pi^{i1 j1} ... pi^{in jn} f_{,i1..in} g_{,j1..jn}`` over all fiber indices.

    Summed over multisets of index pairs, each weighted by its multinomial count.
    """
    d = f.dim
    if n == 0:
        return f.mul(g)
    pairs = [(i, j, pi_hat[i, j]) for i in range(d) for j in range(d) if not pi_hat[i, j].is_zero()]
    fc = _fcache or _DerivCache(f)
    gc = _gcache or _DerivCache(g)
    total = None
    prod_cache: dict[tuple[int, ...], JetPolynomial] = {}
    for combo in combinations_with_replacement(range(len(pairs)), n):
        if combo[:-1] in prod_cache:
            pprod = prod_cache[combo[:-1]].mul(pairs[combo[-1]][2])
        else:
            pprod = pairs[combo[0]][2]
            for p in combo[1:]:
                pprod = pprod.mul(pairs[p][2])
        prod_cache[combo] = pprod
        counts: dict[int, int] = {}
        for p in combo:
            counts[p] = counts.get(p, 0) + 1
        mult = factorial(n)
        for c in counts.values():
            mult //= factorial(c)
        left = tuple(sorted(pairs[p][0] for p in combo))
        right = tuple(sorted(pairs[p][1] for p in combo))
        df = fc.get(left)
        if df.is_zero():
            continue
        dg = gc.get(right)
        if dg.is_zero():
            continue
        term = pprod.mul(df).mul(dg).scale(mult)
        total = term if total is None else total + term
    if total is None:
        return JetPolynomial.zero(d, _min_cap(f.kx, g.kx), _min_cap(_lower(f.ky, n), _lower(g.ky, n)))
    return total


def _lower(cap, by):
    return None if cap is None else cap - by


def star_product(pi_hat: BivectorJets, sigma: JetPolynomial, tau: JetPolynomial, order: int = 4) -> HbarForm:
    """ℏ^n coefficient ``pair_sum(sigma, tau, n) / (2^(2n) n!)`` for ``n <= order``."""
    fc, gc = _DerivCache(sigma), _DerivCache(tau)
    series = [pair_sum(sigma, tau, pi_hat, n, _fcache=fc, _gcache=gc).scale(Fraction(1, 4 ** n * factorial(n)))
              for n in range(order + 1)]
    return HbarForm(0, sigma.dim, order, {(): series})


def _convolve(a: Sequence[JetPolynomial], b: Sequence[JetPolynomial], pi_hat, order: int) -> list[JetPolynomial]:
    # star product of two ℏ-series of jets
    d = pi_hat.dim
    out = [JetPolynomial.zero(d) for _ in range(order + 1)]
    for p, ap in enumerate(a[:order + 1]):
        if ap.is_zero():
            continue
        for q, bq in enumerate(b[:order + 1 - p]):
            if bq.is_zero():
                continue
            prod = star_product(pi_hat, ap, bq, order - p - q)[()]
            for n, c in enumerate(prod):
                out[p + q + n] = out[p + q + n] + c
    return out


def star_series(pi_hat: BivectorJets, a: Sequence[JetPolynomial], b: Sequence[JetPolynomial], order: int) -> list[JetPolynomial]:
    """Star product of two ℏ-series, truncated at ``order``."""
    return _convolve(a, b, pi_hat, order)


def star_commutator(pi_hat: BivectorJets, a: JetPolynomial, b: JetPolynomial, order: int = 4) -> HbarForm:
    return star_product(pi_hat, a, b, order) - star_product(pi_hat, b, a, order)


# -- connection and curvature -------------------------------------------------------------

def _upsilon_prefactor(n: int) -> Fraction:
    return weight_upsilon(n) / (2 ** n * factorial(n))


def _gamma_prefactor(n: int) -> Fraction:
    return weight_gamma(n) / (2 ** n * factorial(n))


def _zero_like(*jets: JetPolynomial) -> JetPolynomial:
    kx = ky = None
    for j in jets:
        kx, ky = _min_cap(kx, j.kx), _min_cap(ky, j.ky)
    return JetPolynomial.zero(jets[0].dim, kx, ky)


def _connection_raw(R: RJets, pi_hat: BivectorJets, sigma: JetPolynomial, i: int, n: int) -> JetPolynomial:
    d = R.dim
    total = None
    for k in range(d):
        term = pair_sum(R[k, i], sigma.diff_y(k), pi_hat, n)
        total = term if total is None else total + term
    return total


def connection_A(R: RJets, pi_hat: BivectorJets, sigma: JetPolynomial, order: int = 4) -> HbarForm:
    """Deformed Grothendieck connection applied to ``sigma``.

    Component ``i`` at ℏ^n is
    ``w_Upsilon(n) / (2^n n!) * sum_k pair_sum(R^k_i, d_k sigma, n)``.
    """
    d = R.dim
    comps = {}
    for i in range(d):
        series = []
        for n in range(order + 1):
            c = _upsilon_prefactor(n)
            if c == 0:
                series.append(_zero_like(R[0, i], sigma))
            else:
                series.append(_connection_raw(R, pi_hat, sigma, i, n).scale(c))
        comps[(i,)] = series
    return HbarForm(1, d, order, comps)


def apply_connection(R: RJets, pi_hat: BivectorJets, psi: Sequence[JetPolynomial], order: int) -> dict[int, list[JetPolynomial]]:
    """``A_i`` applied to an ℏ-series ``psi``: ``(A_i psi)_m = sum_{n+p=m} A_i^(n) psi_p``."""
    d = R.dim
    out = {i: [JetPolynomial.zero(d) for _ in range(order + 1)] for i in range(d)}
    for p, term in enumerate(psi[:order + 1]):
        if term.is_zero():
            continue
        a = connection_A(R, pi_hat, term, order - p)
        for i in range(d):
            for n, c in enumerate(a[(i,)]):
                out[i][p + n] = out[i][p + n] + c
    return out


def apply_classical_DG(phi: ExpMapJets, sigma: JetPolynomial, R: RJets | None = None) -> HbarForm:
    """``D_G sigma``: component ``l`` is ``d sigma / d dx^l + R^j_l d sigma / d y^j``."""
    R = compute_R(phi) if R is None else R
    d = phi.dim
    comps = {}
    for l in range(d):
        total = sigma.diff_x(l)
        for j in range(d):
            total = total + R[j, l].mul(sigma.diff_y(j))
        comps[(l,)] = [total]
    return HbarForm(1, d, 0, comps)


def flatness_residual(R: RJets) -> dict[tuple[int, int], tuple[JetPolynomial, ...]]:
    """Components ``(l < m)`` of ``d_x R + [R, R]/2``, each a vector of ``d`` jets."""
    d = R.dim
    out = {}
    for l in range(d):
        for m in range(l + 1, d):
            vec = []
            for j in range(d):
                acc = R[j, m].diff_x(l) - R[j, l].diff_x(m)
                for k in range(d):
                    acc = acc + R[k, l].mul(R[j, m].diff_y(k)) - R[k, m].mul(R[j, l].diff_y(k))
                vec.append(acc)
            out[(l, m)] = tuple(vec)
    return out


def _curvature_raw(R: RJets, pi_hat: BivectorJets, n: int, caches=None) -> dict[tuple[int, int], JetPolynomial]:
    d = R.dim
    if caches is None:
        caches = {}

    def dcache(k, i, l):
        key = (k, i, l)
        if key not in caches:
            caches[key] = _DerivCache(R[k, i].diff_y(l))
        return caches[key]

    x = {}
    for i in range(d):
        for j in range(d):
            if i == j:
                continue
            acc = None
            for k in range(d):
                for l in range(d):
                    f, g = dcache(k, i, l), dcache(l, j, k)
                    term = pair_sum(f.get(()), g.get(()), pi_hat, n, _fcache=f, _gcache=g)
                    acc = term if acc is None else acc + term
            x[(i, j)] = acc
    return {(i, j): x[(i, j)] - x[(j, i)] for i in range(d) for j in range(i + 1, d)}


def curvature_F(R: RJets, pi_hat: BivectorJets, order: int = 4) -> HbarForm:
    """Weyl curvature 2-form.

    With ``X_ij(n) = sum_{k,l} pair_sum(d_l R^k_i, d_k R^l_j, n)`` the
    ``dx^i ∧ dx^j`` (``i < j``) component at ℏ^n is
    ``w_Gamma(n) / (2^n n!) * (X_ij(n) - X_ji(n))``.
    """
    d = R.dim
    comps = {key: [] for key in HbarForm.keys(2, d)}
    caches: dict = {}
    for n in range(order + 1):
        c = _gamma_prefactor(n)
        if c == 0:
            for key in comps:
                comps[key].append(_zero_like(R[0, 0]))
            continue
        raw = _curvature_raw(R, pi_hat, n, caches)
        for key in comps:
            comps[key].append(raw[key].scale(c))
    return HbarForm(2, d, order, comps)


def gamma_equation_residual(phi: ExpMapJets, pi_hat: BivectorJets, gamma: HbarForm, order: int | None = None,
                            R: RJets | None = None) -> HbarForm:
    """``F + D gamma + gamma ⋆ gamma`` as a 2-form, truncated at ``order``.

    ``(D gamma)_ij = d_i gamma_j - d_j gamma_i + A_i gamma_j - A_j gamma_i`` and
    ``(gamma ⋆ gamma)_ij = gamma_i ⋆ gamma_j - gamma_j ⋆ gamma_i``.
    """
    if gamma.degree != 1:
        raise ValueError("gamma must be a 1-form")
    order = gamma.order if order is None else min(order, gamma.order)
    d = phi.dim
    R = compute_R(phi) if R is None else R
    F = curvature_F(R, pi_hat, order)
    acted = {j: apply_connection(R, pi_hat, gamma[(j,)], order) for j in range(d)}
    comps = {}
    for (i, j) in HbarForm.keys(2, d):
        gi, gj = gamma[(i,)], gamma[(j,)]
        dgam = [gj[n].diff_x(i) - gi[n].diff_x(j) + acted[j][i][n] - acted[i][j][n]
                for n in range(order + 1)]
        gg = [a - b for a, b in zip(star_series(pi_hat, gi, gj, order), star_series(pi_hat, gj, gi, order))]
        comps[(i, j)] = [F[(i, j)][n] + dgam[n] + gg[n] for n in range(order + 1)]
    return HbarForm(2, d, order, comps)


def bullet_product(phi: ExpMapJets, pi, f, g, order: int = 4) -> list[JetPolynomial]:
    """``(f • g)`` at ℏ^n: the star product of the Taylor pullbacks, evaluated at ``y = 0``.

    ``f`` and ``g`` are base polynomials or ℏ-series (lists) of them; the result
    is a list of jets in ``dx`` only.
    """
    pi_hat = pullback_bivector(phi, pi)
    fs = f if isinstance(f, (list, tuple)) else [f]
    gs = g if isinstance(g, (list, tuple)) else [g]
    a = [pullback_function(phi, t) for t in fs]
    b = [pullback_function(phi, t) for t in gs]
    return [c.at_y0() for c in star_series(pi_hat, a, b, order)]


# -- cotangent lift ---------------------------------------------------------------------

def enforce_cotangent_filter(R: RJets, split: CotangentSplit) -> RJets:
    """Drop every monomial with ``pbar``-degree two or more."""
    if split.dim != R.dim:
        raise ValueError("split dimension does not match R")
    return R.map(lambda e: e.filter_terms(lambda a, b: split.pbar_degree(b) <= 1))


def _check_filter(R: RJets, split: CotangentSplit):
    for j in range(R.dim):
        for l in range(R.dim):
            for _, beta, _ in R[j, l].terms():
                if split.pbar_degree(beta) >= 2:
                    raise FilterViolation(f"R^{j + 1}_{l + 1} has a monomial of pbar-degree {split.pbar_degree(beta)}")


def _check_darboux_shape(pi_hat: BivectorJets, split: CotangentSplit):
    for r in range(pi_hat.dim):
        for s in range(pi_hat.dim):
            if split.is_momentum(r) == split.is_momentum(s) and not pi_hat[r, s].is_zero():
                raise JetInvariantError("bivector couples two position or two momentum fiber directions")


def cotangent_simplified(R: RJets, pi_hat: BivectorJets) -> dict[tuple[int, int], JetPolynomial]:
    """``(1/48) pi^{rs} R^k_{i,lr} R^l_{j,ks}`` antisymmetrized, by a direct index loop."""
    d = R.dim
    x = {}
    for i in range(d):
        for j in range(d):
            acc = None
            for r in range(d):
                for s in range(d):
                    p = pi_hat[r, s]
                    if p.is_zero():
                        continue
                    for k in range(d):
                        for l in range(d):
                            term = p.mul(R[k, i].diff_y(l).diff_y(r)).mul(R[l, j].diff_y(k).diff_y(s))
                            acc = term if acc is None else acc + term
            x[(i, j)] = acc if acc is not None else _zero_like(R[0, 0])
    return {(i, j): (x[(i, j)] - x[(j, i)]).scale(Fraction(1, 48)) for i in range(d) for j in range(i + 1, d)}


def cotangent_curvature(R: RJets, pi_hat: BivectorJets, split: CotangentSplit, order: int = 4) -> HbarForm:
    """Curvature of a filtered cotangent lift as the single ℏ/48 term.

    Also evaluates the full series with :func:`curvature_F` and checks that it
    stops after the first wedge order and agrees with the short formula.
    """
    _check_filter(R, split)
    _check_darboux_shape(pi_hat, split)
    short = cotangent_simplified(R, pi_hat)
    full = curvature_F(R, pi_hat, order)
    comps = {key: [_zero_like(R[0, 0]), short[key]] for key in short}
    result = HbarForm(2, R.dim, max(order, 1), comps)
    for n in range(order + 1):
        if n == 1:
            if not all(full[key][1].agrees_with(short[key]) for key in short):
                raise ValidationFailure("full curvature series disagrees with the short formula at ℏ^1")
        elif not full.order_is_zero(n):
            raise ValidationFailure(f"full curvature series has a nonzero ℏ^{n} term")
    return result


# -- parity -----------------------------------------------------------------------------

def random_exp_map(rng: random.Random, dim: int, kx: int = 3, ky: int = 6, *, terms: int = 4,
                   x0: Sequence | None = None, max_num: int = 3, max_den: int = 3) -> ExpMapJets:
    """Random valid exponential-map jets with a few nonlinear fiber terms per component."""
    from .jets import _monomials
    if x0 is None:
        x0 = [Fraction(rng.randint(-2, 2), rng.randint(1, 3)) for _ in range(dim)]
    comps = []
    for i in range(dim):
        c = JetPolynomial.constant(dim, x0[i]) + JetPolynomial.dx(dim, i) + JetPolynomial.y(dim, i)
        extra = {}
        for _ in range(terms):
            alpha = rng.choice(_monomials(dim, rng.randint(0, kx)))
            beta = rng.choice(_monomials(dim, rng.randint(2, ky)))
            num = rng.randint(-max_num, max_num) or 1
            extra[(alpha, beta)] = Fraction(num, rng.randint(1, max_den))
        comps.append(c + JetPolynomial.from_terms(dim, extra))
    return ExpMapJets(comps, kx, ky)


def random_bivector(rng: random.Random, dim: int, max_num: int = 3, max_den: int = 3) -> list[list[Fraction]]:
    """Random constant antisymmetric matrix with nonzero rational entries."""
    m = [[Fraction(0)] * dim for _ in range(dim)]
    for i in range(dim):
        for j in range(i + 1, dim):
            v = Fraction(rng.randint(1, max_num) * rng.choice((-1, 1)), rng.randint(1, max_den))
            m[i][j], m[j][i] = v, -v
    return m


def parity_report(op: str, inputs: tuple | None = None, *, seed: int = 0, dim: int = 2, kx: int = 2,
                  ky: int = 6, order: int = 4) -> list[int]:
    """ℏ orders at which ``connection_A`` (``op="A"``) or ``curvature_F`` (``op="F"``) vanishes.

    ``inputs`` is ``(R, pi_hat)`` for ``F`` and ``(R, pi_hat, sigma)`` for ``A``;
    without it a random exact fixture is drawn from ``seed``.
    """
    key = op.lower().replace("connection", "").replace("curvature", "").strip("_")
    if key not in ("a", "f"):
        raise ValueError(f"unknown operator {op!r}; use 'A' or 'F'")
    if inputs is None:
        rng = random.Random(seed)
        phi = random_exp_map(rng, dim, kx, ky, terms=3)
        R = compute_R(phi)
        pi_hat = pullback_bivector(phi, random_bivector(rng, dim))
        sigma = random_jet(rng, dim, kx, ky, density=0.4)
        inputs = (R, pi_hat, sigma) if key == "a" else (R, pi_hat)
    if key == "a":
        R, pi_hat, sigma = inputs
        form = connection_A(R, pi_hat, sigma, order)
    else:
        R, pi_hat = inputs[:2]
        form = curvature_F(R, pi_hat, order)
    return form.vanishing_orders()

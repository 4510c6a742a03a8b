"""Exact truncated polynomials in base offsets ``dx`` and fiber variables ``y``.

A :class:`JetPolynomial` in dimension ``d`` lives over one chart point
``x0``; its variables are the base offsets ``dx1..dxd`` and the fiber
coordinates ``y1..yd``.  Coefficients are :class:`fractions.Fraction`.

Each jet carries the orders through which it is *known*: ``kx`` (total
degree in ``dx``) and ``ky`` (total degree in ``y``).  ``None`` means the
polynomial is exact.  Products are truncated at the smaller of the operand
caps, and differentiating in ``dx`` (``y``) lowers ``kx`` (``ky``) by one, so a
jet never claims more precision than its inputs support.  Comparisons with
:meth:`JetPolynomial.agrees_with` happen within the common caps.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import CapExceeded, SingularLeadingTerm

__all__ = [
    "JetPolynomial",
    "BasePolynomial",
    "series_matrix_inverse",
    "matmul",
    "identity_matrix",
    "parse_jet",
    "parse_base",
    "random_jet",
]

_BITS = 7
_MASK = (1 << _BITS) - 1
_MAX_EXP = _MASK // 2


def _min_cap(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _lower(cap: int | None, by: int = 1) -> int | None:
    return None if cap is None else cap - by


@lru_cache(maxsize=None)
def _unpack(key: int, nvars: int) -> tuple[int, ...]:
    return tuple((key >> (_BITS * i)) & _MASK for i in range(nvars))


def _pack(exps: Sequence[int]) -> int:
    key = 0
    for i, e in enumerate(exps):
        if e < 0 or e > _MAX_EXP:
            raise CapExceeded(f"exponent {e} outside the supported range 0..{_MAX_EXP}")
        key |= e << (_BITS * i)
    return key


@lru_cache(maxsize=None)
def _degrees(key: int, dim: int) -> tuple[int, int]:
    exps = _unpack(key, 2 * dim)
    return sum(exps[:dim]), sum(exps[dim:])


class JetPolynomial:
    """Truncated polynomial in ``(dx, y)`` with exact rational coefficients.

    Instances are immutable.  Build them with :meth:`from_terms`,
    :meth:`constant`, :meth:`dx`, :meth:`y` or :func:`parse_jet`.
    """

    __slots__ = ("dim", "kx", "ky", "_terms", "_groups")

    def __init__(self, dim: int, terms: Mapping[int, Fraction] | None = None,
                 kx: int | None = None, ky: int | None = None, *, _trusted: bool = False):
        self.dim = dim
        self.kx = kx
        self.ky = ky
        if terms is None:
            terms = {}
        if not _trusted:
            clean = {}
            for key, c in terms.items():
                c = Fraction(c)
                if c == 0:
                    continue
                dx, dy = _degrees(key, dim)
                if (kx is not None and dx > kx) or (ky is not None and dy > ky):
                    continue
                clean[key] = c
            terms = clean
        self._terms = terms
        self._groups = None

    # -- construction ---------------------------------------------------------
    @classmethod
    def from_terms(cls, dim: int, terms: Mapping[tuple[Sequence[int], Sequence[int]], object] |
                   Iterable[tuple[Sequence[int], Sequence[int], object]],
                   kx: int | None = None, ky: int | None = None) -> JetPolynomial:
        """Build from ``{(alpha, beta): coeff}`` or an iterable of ``(alpha, beta, coeff)``."""
        items = terms.items() if isinstance(terms, Mapping) else ((a, b, c) for a, b, c in terms)
        packed: dict[int, Fraction] = {}
        for entry in items:
            if isinstance(terms, Mapping):
                (alpha, beta), c = entry
            else:
                alpha, beta, c = entry
            if len(alpha) != dim or len(beta) != dim:
                raise ValueError(f"multi-index length must be {dim}")
            if isinstance(c, float):
                raise TypeError("float coefficients are not accepted; use Fraction or 'p/q'")
            key = _pack(tuple(alpha) + tuple(beta))
            packed[key] = packed.get(key, Fraction(0)) + Fraction(c)
        return cls(dim, packed, kx, ky)

    @classmethod
    def zero(cls, dim: int, kx: int | None = None, ky: int | None = None) -> JetPolynomial:
        return cls(dim, {}, kx, ky, _trusted=True)

    @classmethod
    def constant(cls, dim: int, value, kx: int | None = None, ky: int | None = None) -> JetPolynomial:
        return cls(dim, {0: Fraction(value)}, kx, ky)

    @classmethod
    def _variable(cls, dim: int, index: int, kx, ky) -> JetPolynomial:
        exps = [0] * (2 * dim)
        exps[index] = 1
        return cls(dim, {_pack(exps): Fraction(1)}, kx, ky)

    @classmethod
    def dx(cls, dim: int, i: int, kx: int | None = None, ky: int | None = None) -> JetPolynomial:
        """The base offset ``dx_{i+1}`` (``i`` is zero-based)."""
        return cls._variable(dim, i, kx, ky)

    @classmethod
    def y(cls, dim: int, i: int, kx: int | None = None, ky: int | None = None) -> JetPolynomial:
        """The fiber coordinate ``y_{i+1}`` (``i`` is zero-based)."""
        return cls._variable(dim, dim + i, kx, ky)

    # -- inspection ---------------------------------------------------------------
    @property
    def caps(self) -> tuple[int | None, int | None]:
        return self.kx, self.ky

    def terms(self) -> Iterator[tuple[tuple[int, ...], tuple[int, ...], Fraction]]:
        """``(alpha, beta, coeff)`` in canonical (graded, then lexicographic) order."""
        n = 2 * self.dim
        rows = []
        for key, c in self._terms.items():
            e = _unpack(key, n)
            rows.append((sum(e[:self.dim]) + sum(e[self.dim:]), e, c))
        rows.sort(key=lambda r: (r[0], tuple(-v for v in r[1])))
        for _, e, c in rows:
            yield e[:self.dim], e[self.dim:], c

    def coeff(self, alpha: Sequence[int], beta: Sequence[int]) -> Fraction:
        return self._terms.get(_pack(tuple(alpha) + tuple(beta)), Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(k == 0 for k in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get(0, Fraction(0))

    def degree(self) -> tuple[int, int]:
        """Largest ``dx`` and ``y`` degrees present (``-1`` for the zero polynomial)."""
        if not self._terms:
            return -1, -1
        degs = [_degrees(k, self.dim) for k in self._terms]
        return max(d[0] for d in degs), max(d[1] for d in degs)

    # -- arithmetic ---------------------------------------------------------------
    def _check(self, other: JetPolynomial):
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def _coerce(self, other) -> JetPolynomial:
        if isinstance(other, JetPolynomial):
            self._check(other)
            return other
        if isinstance(other, float):
            raise TypeError("float scalars are not accepted")
        return JetPolynomial.constant(self.dim, other)

    def __add__(self, other) -> JetPolynomial:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        kx, ky = _min_cap(self.kx, other.kx), _min_cap(self.ky, other.ky)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return JetPolynomial(self.dim, out, kx, ky)

    __radd__ = __add__

    def __neg__(self) -> JetPolynomial:
        return JetPolynomial(self.dim, {k: -c for k, c in self._terms.items()},
                             self.kx, self.ky, _trusted=True)

    def __sub__(self, other) -> JetPolynomial:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> JetPolynomial:
        return (-self) + other

    def scale(self, factor) -> JetPolynomial:
        factor = Fraction(factor)
        if factor == 0:
            return JetPolynomial.zero(self.dim, self.kx, self.ky)
        return JetPolynomial(self.dim, {k: c * factor for k, c in self._terms.items()},
                             self.kx, self.ky, _trusted=True)

    def _grouped(self):
        if self._groups is None:
            groups: dict[tuple[int, int], list] = {}
            for k, c in self._terms.items():
                groups.setdefault(_degrees(k, self.dim), []).append((k, c))
            self._groups = groups
        return self._groups

    def mul(self, other: JetPolynomial, kx: int | None = None, ky: int | None = None) -> JetPolynomial:
        """Product truncated at the operand caps and, optionally, at ``(kx, ky)``."""
        other = self._coerce(other)
        kx = _min_cap(_min_cap(self.kx, other.kx), kx)
        ky = _min_cap(_min_cap(self.ky, other.ky), ky)
        if not self._terms or not other._terms:
            return JetPolynomial.zero(self.dim, kx, ky)
        out: dict[int, Fraction] = {}
        get = out.get
        ga, gb = self._grouped(), other._grouped()
        for (dxa, dya), la in ga.items():
            for (dxb, dyb), lb in gb.items():
                if kx is not None and dxa + dxb > kx:
                    continue
                if ky is not None and dya + dyb > ky:
                    continue
                for ka, ca in la:
                    for kb, cb in lb:
                        k = ka + kb
                        out[k] = get(k, 0) + ca * cb
        if kx is None or ky is None:
            for k in out:
                if any(e > _MAX_EXP for e in _unpack(k, 2 * self.dim)):
                    raise CapExceeded("exact product exceeds the supported exponent range")
        return JetPolynomial(self.dim, {k: c for k, c in out.items() if c}, kx, ky, _trusted=True)

    def __mul__(self, other) -> JetPolynomial:
        if isinstance(other, JetPolynomial):
            return self.mul(other)
        if isinstance(other, float):
            return NotImplemented
        try:
            return self.scale(other)
        except (TypeError, ValueError):
            return NotImplemented

    __rmul__ = __mul__

    def _diff(self, var: int) -> dict[int, Fraction]:
        step = 1 << (_BITS * var)
        out = {}
        for k, c in self._terms.items():
            e = (k >> (_BITS * var)) & _MASK
            if e:
                out[k - step] = c * e
        return out

    def diff_x(self, i: int) -> JetPolynomial:
        """Derivative in ``dx_{i+1}``; lowers ``kx`` by one."""
        return JetPolynomial(self.dim, self._diff(i), _lower(self.kx), self.ky, _trusted=True)

    def diff_y(self, i: int) -> JetPolynomial:
        """Derivative in ``y_{i+1}``; lowers ``ky`` by one."""
        return JetPolynomial(self.dim, self._diff(self.dim + i), self.kx, _lower(self.ky),
                             _trusted=True)

    def diff_y_multi(self, indices: Iterable[int]) -> JetPolynomial:
        out = self
        for i in indices:
            out = out.diff_y(i)
        return out

    def truncate(self, kx: int | None = None, ky: int | None = None) -> JetPolynomial:
        """Drop terms above ``(kx, ky)`` and record the new caps."""
        return JetPolynomial(self.dim, self._terms, _min_cap(self.kx, kx), _min_cap(self.ky, ky))

    def with_caps(self, kx: int | None, ky: int | None) -> JetPolynomial:
        """Relabel the validity caps (terms above them are dropped)."""
        return JetPolynomial(self.dim, self._terms, kx, ky)

    def at_y0(self) -> JetPolynomial:
        """Restriction to ``y = 0`` (a polynomial in ``dx`` only)."""
        n = 2 * self.dim
        kept = {k: c for k, c in self._terms.items() if not any(_unpack(k, n)[self.dim:])}
        return JetPolynomial(self.dim, kept, self.kx, self.ky, _trusted=True)

    def filter_terms(self, keep) -> JetPolynomial:
        """Keep the monomials for which ``keep(alpha, beta)`` is true."""
        n = 2 * self.dim
        kept = {}
        for k, c in self._terms.items():
            e = _unpack(k, n)
            if keep(e[:self.dim], e[self.dim:]):
                kept[k] = c
        return JetPolynomial(self.dim, kept, self.kx, self.ky, _trusted=True)

    def substitute(self, values: Sequence[JetPolynomial], kx: int | None = None,
                   ky: int | None = None) -> JetPolynomial:
        """Compose: replace ``(dx1..dxd, y1..yd)`` by the given jets, truncating at ``(kx, ky)``."""
        if len(values) != 2 * self.dim:
            raise ValueError(f"need {2 * self.dim} substitution values")
        target_dim = values[0].dim
        powers: dict[tuple[int, int], JetPolynomial] = {}

        def power(v: int, e: int) -> JetPolynomial:
            if e == 0:
                return JetPolynomial.constant(target_dim, 1)
            if (v, e) not in powers:
                powers[(v, e)] = power(v, e - 1).mul(values[v], kx, ky)
            return powers[(v, e)]

        total = JetPolynomial.zero(target_dim, kx, ky)
        for key, c in self._terms.items():
            term = JetPolynomial.constant(target_dim, c, kx, ky)
            for v, e in enumerate(_unpack(key, 2 * self.dim)):
                if e:
                    term = term.mul(power(v, e), kx, ky)
            total = total + term
        return total

    # -- comparison ---------------------------------------------------------------
    def agrees_with(self, other: JetPolynomial) -> bool:
        """Equality of the two truncated series within their common caps."""
        self._check(other)
        kx, ky = _min_cap(self.kx, other.kx), _min_cap(self.ky, other.ky)
        return (self - other).truncate(kx, ky).is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, JetPolynomial):
            return self.dim == other.dim and self.caps == other.caps and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ({0: Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        return hash((self.dim, self.caps, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        return f"JetPolynomial(dim={self.dim}, caps={self.caps}, {render_jet(self)!r})"

    def __str__(self) -> str:
        return render_jet(self)


# -- rendering and parsing ---------------------------------------------------------

def _render_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _render_terms(rows: Iterable[tuple[Fraction, list[str]]]) -> str:
    parts = []
    for c, factors in rows:
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if factors:
            body = "*".join(factors) if mag == 1 else "*".join([_render_coeff(mag)] + factors)
        else:
            body = _render_coeff(mag)
        parts.append((sign, body))
    if not parts:
        return "0"
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _factors(names: Sequence[str], exps: Sequence[int]) -> list[str]:
    return [name if e == 1 else f"{name}^{e}" for name, e in zip(names, exps) if e]


def render_jet(jet: JetPolynomial) -> str:
    """Human form, e.g. ``y1*y2 - 1/2*dx1*y1^2``."""
    names = [f"dx{i + 1}" for i in range(jet.dim)] + [f"y{i + 1}" for i in range(jet.dim)]
    return _render_terms((c, _factors(names, a + b)) for a, b, c in jet.terms())


_TERM_SPLIT = re.compile(r"\s*([+-])\s*")
_NUMBER = re.compile(r"^\d+(/\d+)?$")


def _parse_poly(text: str, names: dict[str, int], nvars: int) -> dict[tuple[int, ...], Fraction]:
    text = text.strip()
    if not text:
        raise ValueError("empty polynomial")
    if "." in text:
        raise ValueError(f"float literals are not accepted: {text!r}")
    pieces = _TERM_SPLIT.split(text)
    if pieces[0] == "":
        pieces = pieces[1:]
    else:
        pieces = ["+"] + pieces
    out: dict[tuple[int, ...], Fraction] = {}
    for sign, body in zip(pieces[::2], pieces[1::2]):
        coeff = Fraction(-1 if sign == "-" else 1)
        exps = [0] * nvars
        for factor in body.split("*"):
            factor = factor.strip()
            if _NUMBER.match(factor):
                coeff *= Fraction(factor)
                continue
            name, _, power = factor.partition("^")
            if name not in names:
                raise ValueError(f"unknown variable {name!r} in {text!r}")
            exps[names[name]] += int(power) if power else 1
        key = tuple(exps)
        out[key] = out.get(key, Fraction(0)) + coeff
    return {k: v for k, v in out.items() if v}


def parse_jet(text: str, dim: int, kx: int | None = None, ky: int | None = None) -> JetPolynomial:
    """Parse ``"y1*y2 + 1/2*dx1*y1^2 - 3"`` into a jet of dimension ``dim``."""
    names = {f"dx{i + 1}": i for i in range(dim)}
    names.update({f"y{i + 1}": dim + i for i in range(dim)})
    terms = _parse_poly(text, names, 2 * dim)
    return JetPolynomial.from_terms(dim, {(e[:dim], e[dim:]): c for e, c in terms.items()}, kx, ky)


class BasePolynomial:
    """Polynomial in absolute base coordinates ``x1..xd`` with rational coefficients."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[Sequence[int], object]):
        self.dim = dim
        clean: dict[tuple[int, ...], Fraction] = {}
        for alpha, c in terms.items():
            if isinstance(c, float):
                raise TypeError("float coefficients are not accepted")
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != dim:
                raise ValueError(f"multi-index length must be {dim}")
            c = Fraction(c)
            if c:
                clean[alpha] = clean.get(alpha, Fraction(0)) + c
        self.terms = {a: c for a, c in clean.items() if c}

    @classmethod
    def constant(cls, dim: int, value) -> BasePolynomial:
        return cls(dim, {(0,) * dim: value})

    def degree(self) -> int:
        return max((sum(a) for a in self.terms), default=-1)

    def __eq__(self, other) -> bool:
        return isinstance(other, BasePolynomial) and self.dim == other.dim and self.terms == other.terms

    def __neg__(self) -> BasePolynomial:
        return BasePolynomial(self.dim, {a: -c for a, c in self.terms.items()})

    def __str__(self) -> str:
        names = [f"x{i + 1}" for i in range(self.dim)]
        rows = sorted(self.terms.items(), key=lambda t: (sum(t[0]), tuple(-v for v in t[0])))
        return _render_terms((c, _factors(names, a)) for a, c in rows)

    __repr__ = __str__

    @classmethod
    def from_offset_jet(cls, jet: JetPolynomial, x0: Sequence) -> BasePolynomial:
        """Re-express a ``y``-free jet in ``dx = x - x0`` as a polynomial in ``x``."""
        d = jet.dim
        x = [BasePolynomial(d, {tuple(int(j == i) for j in range(d)): 1}) for i in range(d)]
        total: dict[tuple[int, ...], Fraction] = {}
        for alpha, beta, c in jet.terms():
            if any(beta):
                raise ValueError("jet depends on the fiber variables")
            term = {(0,) * d: c}
            for i, e in enumerate(alpha):
                for _ in range(e):
                    shift = {(0,) * d: -Fraction(x0[i])}
                    shift.update(x[i].terms)
                    term = _base_mul(term, shift)
            for a, v in term.items():
                total[a] = total.get(a, Fraction(0)) + v
        return cls(d, total)


def _base_mul(a: Mapping, b: Mapping) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(i + j for i, j in zip(ea, eb))
            out[e] = out.get(e, Fraction(0)) + ca * cb
    return out


def parse_base(text: str, dim: int) -> BasePolynomial:
    """Parse ``"x1^2 - 1/3*x1*x2"`` into a :class:`BasePolynomial`."""
    names = {f"x{i + 1}": i for i in range(dim)}
    return BasePolynomial(dim, _parse_poly(text, names, dim))


# -- matrices of jets ------------------------------------------------------------------

def identity_matrix(dim: int, size: int, kx=None, ky=None) -> list[list[JetPolynomial]]:
    return [[JetPolynomial.constant(dim, int(i == j), kx, ky) for j in range(size)]
            for i in range(size)]


def matmul(a, b, kx: int | None = None, ky: int | None = None) -> list[list[JetPolynomial]]:
    rows, inner, cols = len(a), len(b), len(b[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = a[i][0].mul(b[0][j], kx, ky)
            for k in range(1, inner):
                acc = acc + a[i][k].mul(b[k][j], kx, ky)
            row.append(acc)
        out.append(row)
    return out


def _rational_inverse(m: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(m)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise SingularLeadingTerm("constant term of the matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def series_matrix_inverse(m, kx: int | None = None, ky: int | None = None):
    """Inverse of a square matrix of jets as a truncated power series.

    Writes ``M = M0 (I + N)`` with ``M0`` the constant part and sums the
    Neumann series ``sum_k (-N)^k M0^-1`` until the truncated powers vanish.
    The result is known through the caps of ``M`` (and the optional caps).
    """
    size = len(m)
    if any(len(row) != size for row in m):
        raise ValueError("matrix must be square")
    dim = m[0][0].dim
    for row in m:
        for entry in row:
            kx = _min_cap(kx, entry.kx)
            ky = _min_cap(ky, entry.ky)
    if kx is None or ky is None:
        raise CapExceeded("series inverse of an exact matrix needs explicit truncation caps")
    m0 = [[entry.constant_term() for entry in row] for row in m]
    m0_inv = _rational_inverse(m0)
    m0_inv_jets = [[JetPolynomial.constant(dim, v, kx, ky) for v in row] for row in m0_inv]
    # N = M0^-1 M - I has no constant term
    n_mat = matmul(m0_inv_jets, m, kx, ky)
    for i in range(size):
        n_mat[i][i] = n_mat[i][i] - 1
    neg_n = [[-e for e in row] for row in n_mat]
    total = identity_matrix(dim, size, kx, ky)
    power = identity_matrix(dim, size, kx, ky)
    for _ in range(kx + ky + 1):
        power = matmul(power, neg_n, kx, ky)
        if all(e.is_zero() for row in power for e in row):
            break
        total = [[t + p for t, p in zip(trow, prow)] for trow, prow in zip(total, power)]
    return matmul(total, m0_inv_jets, kx, ky)


# -- random fixtures ------------------------------------------------------------------

def random_jet(rng, dim: int, kx: int, ky: int, *, density: float = 0.3, max_num: int = 3,
               max_den: int = 3, min_y_degree: int = 0, keep=None) -> JetPolynomial:
    """Random sparse jet with small rational coefficients, for property tests.

    ``rng`` is a :class:`random.Random`; ``keep(alpha, beta)`` filters monomials.
    """
    terms = {}
    for ddx in range(kx + 1):
        for ddy in range(min_y_degree, ky + 1):
            for alpha in _monomials(dim, ddx):
                for beta in _monomials(dim, ddy):
                    if keep is not None and not keep(alpha, beta):
                        continue
                    if rng.random() < density:
                        num = rng.randint(-max_num, max_num)
                        if num:
                            terms[(alpha, beta)] = Fraction(num, rng.randint(1, max_den))
    return JetPolynomial.from_terms(dim, terms, kx, ky)


@lru_cache(maxsize=None)
def _monomials(dim: int, degree: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for combo in combinations_with_replacement(range(dim), degree):
        e = [0] * dim
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return tuple(out)

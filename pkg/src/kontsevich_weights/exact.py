"""Exact rational evaluation of the three weight families.

Every value here is a :class:`fractions.Fraction`; powers of pi are carried
symbolically by :class:`PiMonomial` so that their cancellation against the
``(2 pi)`` normalizations is checked structurally.

Two independent routes exist for the wheel family:

* :func:`weight_gamma` evaluates the double sum with the two terminating
  ``2F1`` terms (the compact closed form);
* :func:`weight_gamma_bruteforce` assembles the same double sum from
  :func:`eval_wheel_moment`, i.e. from the plain binomial sums of the Stokes
  computation, never touching the hypergeometric rewrite.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .errors import NonTerminating, PoleInC

__all__ = [
    "Family",
    "Method",
    "PiMonomial",
    "WeightQuery",
    "WeightResult",
    "pochhammer",
    "hyp2f1_terminating",
    "eval_wheel_moment",
    "eval_boundary_moment",
    "weight_gamma",
    "weight_gamma_bruteforce",
    "weight_upsilon",
    "weight_lambda",
    "binomial_sum",
    "binomial_sum_literal",
    "weight",
]


class Family(str, enum.Enum):
    GAMMA = "gamma"
    UPSILON = "upsilon"
    LAMBDA = "lambda"


class Method(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    BRUTE_FORCE = "brute_force"


@dataclass(frozen=True)
class PiMonomial:
    """Exact value ``coeff * pi**pi_power``."""

    coeff: Fraction
    pi_power: int

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        if self.pi_power < 0:
            raise ValueError("pi_power must be non-negative")

    def __add__(self, other: PiMonomial) -> PiMonomial:
        if not isinstance(other, PiMonomial):
            return NotImplemented
        if other.pi_power != self.pi_power and other.coeff and self.coeff:
            raise ValueError(
                f"cannot add pi^{self.pi_power} and pi^{other.pi_power} terms"
            )
        power = self.pi_power if self.coeff else other.pi_power
        return PiMonomial(self.coeff + other.coeff, power)

    def __neg__(self) -> PiMonomial:
        return PiMonomial(-self.coeff, self.pi_power)

    def __sub__(self, other: PiMonomial) -> PiMonomial:
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PiMonomial):
            return PiMonomial(self.coeff * other.coeff, self.pi_power + other.pi_power)
        return PiMonomial(self.coeff * Fraction(other), self.pi_power)

    __rmul__ = __mul__

    def divide_by_pi(self, power: int) -> PiMonomial:
        """Cancel ``pi**power``; raises if the remaining power would be negative."""
        if power > self.pi_power:
            raise ValueError(f"pi^{self.pi_power} cannot absorb pi^-{power}")
        return PiMonomial(self.coeff, self.pi_power - power)

    def __float__(self) -> float:
        import math

        return float(self.coeff) * math.pi**self.pi_power

    def __str__(self) -> str:
        if self.pi_power == 0:
            return str(self.coeff)
        return f"{self.coeff}*pi^{self.pi_power}"


@dataclass(frozen=True)
class WeightQuery:
    family: Family
    n: int

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.n < 0:
            raise ValueError(f"wedge count must be >= 0, got {self.n}")

    @property
    def dimension(self) -> int:
        """Number of edges, equal to the dimension of the gauge-fixed configuration space."""
        return {Family.GAMMA: 2 * self.n + 2,
                Family.UPSILON: 2 * self.n + 1,
                Family.LAMBDA: 2 * self.n}[self.family]


@dataclass(frozen=True)
class WeightResult:
    query: WeightQuery
    value: Fraction
    method: Method


def pochhammer(a, k: int) -> Fraction:
    """Rising factorial ``a (a+1) ... (a+k-1)``; equal to 1 for ``k == 0``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    a = Fraction(a)
    result = Fraction(1)
    for j in range(k):
        result *= a + j
    return result


def _termination_index(a: int, b: int) -> int:
    candidates = [-p for p in (a, b) if p <= 0]
    if not candidates:
        raise NonTerminating(f"2F1({a},{b};...) has no non-positive numerator parameter")
    return min(candidates)


@lru_cache(maxsize=4096)
def hyp2f1_terminating(a: int, b: int, c: int, z) -> Fraction:
    """Terminating Gauss hypergeometric series ``2F1(a, b; c; z)``.

    Parameters are integers in the standard ``(a, b; c; z)`` order.  The
    series is cut at ``K = min(-a, -b)`` over the non-positive numerator
    parameters, which is where every later term vanishes.
    """
    a, b, c = int(a), int(b), int(c)
    z = Fraction(z)
    K = _termination_index(a, b)
    for k in range(K):
        if c + k == 0:
            raise PoleInC(f"(c)_{k + 1} = 0 for c={c} with a surviving numerator")
    # Horner from the last term: 1 + r_0 (1 + r_1 (1 + ...)), integer num/den
    num, den = 1, 1
    for k in range(K - 1, -1, -1):
        rn = (a + k) * (b + k) * z.numerator
        rd = (c + k) * (k + 1) * z.denominator
        num, den = den * rd + rn * num, den * rd
    return Fraction(num, den)


def _wheel_binomial_sums(m: int, n: int) -> tuple[Fraction, Fraction]:
    first = sum((Fraction(comb(m, k) * n, m + n - k) for k in range(m + 1)), Fraction(0))
    second = sum((Fraction(comb(n - 1, l) * n, m + n - l) for l in range(n)), Fraction(0))
    return first, second


def _wheel_hypergeometric_sums(m: int, n: int) -> tuple[Fraction, Fraction]:
    scale = Fraction(n, m + n)
    first = scale * hyp2f1_terminating(-m, -m - n, 1 - m - n, -1)
    second = scale * hyp2f1_terminating(1 - n, -m - n, 1 - m - n, -1)
    return first, second


def eval_wheel_moment(m: int, n: int, signed: bool = False, *, via: str = "binomial") -> PiMonomial:
    """Integral of ``[x;y]^s d(phi(x,y)^m) d(phi(y,x)^n)`` over ``y`` with ``x`` fixed.

    ``via="binomial"`` sums the binomial expressions of the Stokes computation;
    ``via="hypergeometric"`` uses the ``2F1`` rewrite.  Both are exact and must
    agree.
    """
    if m < 1 or n < 1:
        raise ValueError(f"wheel moment needs m, n >= 1, got m={m}, n={n}")
    if via == "binomial":
        first, second = _wheel_binomial_sums(m, n)
    elif via == "hypergeometric":
        first, second = _wheel_hypergeometric_sums(m, n)
    else:
        raise ValueError(f"unknown route {via!r}")
    if signed:
        coeff = -(2**m) + first - second
    else:
        coeff = 2**m - first - second
    return PiMonomial(coeff, m + n)


def eval_boundary_moment(m: int, n: int, signed: bool = False) -> PiMonomial:
    """Integral over the one-bulk/one-boundary space of ``phi(q,x)^m d(phi(x,q)^n)``.

    With ``signed=True`` the integrand carries the indicator ``(x;q)``.
    """
    if m < 0 or n < 1:
        raise ValueError(f"boundary moment needs m >= 0, n >= 1, got m={m}, n={n}")
    if not signed and m == 0:
        return PiMonomial(2**n, n)
    return PiMonomial(2**m, m + n)


@lru_cache(maxsize=None)
def weight_gamma(n: int) -> Fraction:
    """Weight of the wheel with ``n`` wedges, from the hypergeometric closed form."""
    if n < 0:
        raise ValueError("n must be >= 0")
    total = Fraction(0)
    for k in range(n + 1):
        sign_k = -1 if k % 2 else 1
        for l in range(n - k + 1):
            bracket = sign_k * 2 ** (n - k - l + 1) - Fraction(l + 1, n - k + 2) * (
                hyp2f1_terminating(-l, -n + k - 2, -n + k - 1, -1)
                + sign_k * hyp2f1_terminating(-n + k + l - 1, -n + k - 2, -n + k - 1, -1)
            )
            total += (comb(n, k) * comb(n - k, l) * (-1) ** l
                      * Fraction(1, (n - k - l + 1) * (l + 1)) * bracket)
    return total / 2 ** (n + 2)


@lru_cache(maxsize=None)
def weight_gamma_bruteforce(n: int) -> Fraction:
    """Weight of the wheel with ``n`` wedges, assembled from wheel moments.

    Each summand keeps its explicit power of pi; the pi powers must cancel
    exactly, which is asserted rather than assumed.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    total = PiMonomial(0, 0)
    for k in range(n + 1):
        for l in range(n - k + 1):
            moment = eval_wheel_moment(n - k - l + 1, l + 1, signed=bool(k % 2))
            prefactor = Fraction(comb(n, k) * comb(n - k, l) * (-1) ** l,
                                 (n - k - l + 1) * (l + 1))
            total = total + (moment * prefactor).divide_by_pi(n - k + 2)
    assert total.pi_power == 0 or total.coeff == 0
    return total.coeff / 2 ** (n + 2)


def weight_upsilon(n: int) -> Fraction:
    if n < 0:
        raise ValueError("n must be >= 0")
    return Fraction(1 + (-1) ** n, 2 ** (n + 1) * (n + 1))


def weight_lambda(n: int) -> Fraction:
    if n < 0:
        raise ValueError("n must be >= 0")
    return Fraction(1, 2**n)


# -- binomial sums A, B, C -------------------------------------------------

@lru_cache(maxsize=None)
def _inner_s(m: int) -> Fraction:
    # sum over s of C(m,s) (-2)^s / (m - s + 1)
    return sum((Fraction(comb(m, s) * (-2) ** s, m - s + 1) for s in range(m + 1)), Fraction(0))


@lru_cache(maxsize=None)
def _middle_l(N: int) -> Fraction:
    # sum over l of C(N,l) (-1)^l * inner(N - l)
    return sum((comb(N, l) * (-1) ** l * _inner_s(N - l) for l in range(N + 1)), Fraction(0))


def _brute_a(n: int) -> Fraction:
    # The summand depends on (l, s) only through n-k and n-k-l, so the inner
    # sums are shared between outer indices; every defining term is still summed.
    return sum((comb(n, k) * _middle_l(n - k) / 2 ** (n - k + 1) for k in range(n + 1)),
               Fraction(0))


def _brute_b(n: int) -> Fraction:
    return sum((Fraction(comb(n, l) * (-1) ** l, 2 ** (n + 1) * (n - l + 1))
                for l in range(n + 1)), Fraction(0))


def _brute_c(n: int) -> Fraction:
    return sum((Fraction(comb(n, l) * (-1) ** l, 2**l * (n - l + 1))
                for l in range(n + 1)), Fraction(0))


def binomial_sum_literal(which: str, n: int) -> Fraction:
    """Plain nested loops over the defining sums, without sharing partial sums.

    Cubic cost for ``A``; meant as a reference for small ``n``.
    """
    which = which.upper()
    if which == "A":
        total = Fraction(0)
        for k in range(n + 1):
            for l in range(n - k + 1):
                for s in range(n - k - l + 1):
                    total += Fraction(
                        comb(n, k) * comb(n - k, l) * comb(n - k - l, s) * (-1) ** (l + s),
                        2 ** (n - k - s + 1) * (n - k - l - s + 1),
                    )
        return total
    if which == "B":
        return _brute_b(n)
    if which == "C":
        return _brute_c(n)
    raise ValueError(f"unknown binomial sum {which!r}")


def binomial_sum(which: str, n: int, method: Method | str = Method.CLOSED_FORM) -> Fraction:
    """Binomial sums ``A(n)``, ``B(n)``, ``C(n)`` feeding the one-boundary weights."""
    which = which.upper()
    method = Method(method)
    if n < 0:
        raise ValueError("n must be >= 0")
    if which not in ("A", "B", "C"):
        raise ValueError(f"unknown binomial sum {which!r}")
    if method is Method.CLOSED_FORM:
        if which == "C":
            return Fraction(1 + (-1) ** n, 2 ** (n + 1) * (n + 1))
        return Fraction((-1) ** n, 2 ** (n + 1) * (n + 1))
    return {"A": _brute_a, "B": _brute_b, "C": _brute_c}[which](n)


_CLOSED = {Family.GAMMA: weight_gamma, Family.UPSILON: weight_upsilon, Family.LAMBDA: weight_lambda}


def weight(query: WeightQuery, method: Method | str = Method.CLOSED_FORM) -> WeightResult:
    """Dispatch a :class:`WeightQuery` to one of the exact evaluation routes.

    The brute-force route exists for the wheel family (wheel moments) and the
    one-boundary family (``A - B + C``); the two-boundary family has only its
    closed form.
    """
    method = Method(method)
    family, n = query.family, query.n
    if method is Method.CLOSED_FORM:
        value = _CLOSED[family](n)
    elif family is Family.GAMMA:
        value = weight_gamma_bruteforce(n)
    elif family is Family.UPSILON:
        value = (binomial_sum("A", n, Method.BRUTE_FORCE) - binomial_sum("B", n, Method.BRUTE_FORCE)
                 + binomial_sum("C", n, Method.BRUTE_FORCE))
    else:
        raise ValueError("no brute-force route for the two-boundary family")
    return WeightResult(query, value, method)

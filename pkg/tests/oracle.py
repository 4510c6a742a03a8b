"""Tiny dict-of-exponents polynomial arithmetic used as an independent oracle.

Polynomials are ``{exponent tuple: Fraction}`` over ``(dx1..dxd, y1..yd)``.
"""

from fractions import Fraction
from itertools import product


def padd(*polys):
    out = {}
    for p in polys:
        for e, c in p.items():
            out[e] = out.get(e, Fraction(0)) + c
    return {e: c for e, c in out.items() if c}


def pscale(p, s):
    return {e: c * s for e, c in p.items() if c * s}


def pmul(a, b, caps=None, dim=None):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(i + j for i, j in zip(ea, eb))
            if caps is not None:
                if sum(e[:dim]) > caps[0] or sum(e[dim:]) > caps[1]:
                    continue
            out[e] = out.get(e, Fraction(0)) + ca * cb
    return {e: c for e, c in out.items() if c}


def pdiff(p, var):
    out = {}
    for e, c in p.items():
        if e[var]:
            f = list(e)
            f[var] -= 1
            out[tuple(f)] = out.get(tuple(f), Fraction(0)) + c * e[var]
    return out


def ptrunc(p, caps, dim):
    return {e: c for e, c in p.items() if sum(e[:dim]) <= caps[0] and sum(e[dim:]) <= caps[1]}


def from_jet(jet):
    return {tuple(a) + tuple(b): c for a, b, c in jet.terms()}


def index_tuples(d, n):
    return product(range(d), repeat=n)

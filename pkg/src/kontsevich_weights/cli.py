"""Command-line interface: ``kontsevich-weights {weight,table,mc,quad,series}``.

Exit codes: 0 success, 1 a validation check failed, 2 bad input.  Errors are
reported on one line of stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction

from .errors import FilterViolation, KontsevichError, ValidationFailure
from .exact import Family, Method, WeightQuery, weight
from .integrate import exact_value, full_mc, reduced_gamma_mc, reduced_upsilon_quad
from .jetfile import load as load_jets
from .jets import BasePolynomial, parse_base, parse_jet
from .series import (HbarForm, RJets, compute_R, connection_A, cotangent_curvature, curvature_F,
                     enforce_cotangent_filter, flatness_residual, gamma_equation_residual,
                     pullback_bivector, render_series, star_product, bullet_product)

# largest n per family for Monte Carlo in full mode (integrand dimension <= 9)
MC_FULL_LIMIT = {Family.GAMMA: 3, Family.UPSILON: 3, Family.LAMBDA: 4}
MC_REDUCED_LIMIT = 12
MC_MAX_SAMPLES = 10**8
SERIES_COMMANDS = ("star", "connection", "curvature", "bullet", "flatness", "residual", "cotangent")


class InputError(Exception):
    """Bad command-line input; exit code 2."""


def fmt_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def fmt_decimal(x) -> str:
    """12 significant digits, round-half-even."""
    if isinstance(x, Fraction):
        with localcontext() as ctx:
            ctx.prec = 60
            d = Decimal(x.numerator) / Decimal(x.denominator)
    else:
        x = float(x)
        if not math.isfinite(x):
            return str(x)
        d = Decimal(x)
    if d == 0:
        return "0"
    with localcontext() as ctx:
        ctx.rounding = ROUND_HALF_EVEN
        return format(d, ".12g")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _common(parser: argparse.ArgumentParser, *, top: bool):
    default = None if top else argparse.SUPPRESS
    parser.add_argument("--format", choices=("human", "json"), default="human" if top else default)
    parser.add_argument("--seed", type=int, default=default)
    parser.add_argument("--samples", type=int, default=default)
    parser.add_argument("--chunks", type=int, default=default)
    parser.add_argument("--points", type=int, default=default)
    parser.add_argument("--order", type=int, default=default)
    parser.add_argument("--jets", default=default)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kontsevich-weights", description="Kontsevich graph weights and formal-geometry series.")
    _common(parser, top=True)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("weight", help="exact weight of one graph")
    p.add_argument("family", choices=[f.value for f in Family])
    p.add_argument("n", type=int)
    p.add_argument("--method", choices=[m.value for m in Method], default="closed_form")
    _common(p, top=False)

    p = sub.add_parser("table", help="weights for n = 0..max_n")
    p.add_argument("family", choices=[f.value for f in Family])
    p.add_argument("max_n", type=int)
    _common(p, top=False)

    p = sub.add_parser("mc", help="Monte Carlo estimate of one weight")
    p.add_argument("family", choices=[f.value for f in Family])
    p.add_argument("n", type=int)
    p.add_argument("--mode", choices=("full", "reduced"), default="full")
    _common(p, top=False)

    p = sub.add_parser("quad", help="Gauss-Legendre value of an upsilon weight")
    p.add_argument("family", choices=[f.value for f in Family])
    p.add_argument("n", type=int)
    _common(p, top=False)

    p = sub.add_parser("series", help="evaluate a series operator on a jet file")
    p.add_argument("operator", choices=SERIES_COMMANDS)
    p.add_argument("--sigma")
    p.add_argument("--tau")
    p.add_argument("--f", dest="f")
    p.add_argument("--g", dest="g")
    p.add_argument("--gamma", help="comma-separated components of the 1-form (order ℏ^0)")
    p.add_argument("--enforce-filter", action="store_true",
                   help="drop pbar-degree >= 2 monomials instead of rejecting them")
    _common(p, top=False)
    return parser


# -- commands ----------------------------------------------------------------------

def _require(args, name: str, *, minimum: int = 0):
    value = getattr(args, name, None)
    if value is None:
        raise InputError(f"--{name} is required for {args.command}")
    if value < minimum:
        raise InputError(f"--{name} must be >= {minimum}")
    return value


def cmd_weight(args):
    if args.n < 0:
        raise InputError("n must be >= 0")
    try:
        res = weight(WeightQuery(args.family, args.n), args.method)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    payload = {"family": args.family, "n": args.n, "method": args.method,
               "value": fmt_rational(res.value), "decimal": fmt_decimal(res.value)}
    human = f"w_{args.family}({args.n}) = {payload['value']}  ({payload['decimal']})"
    return 0, payload, human


def cmd_table(args):
    if args.max_n < 0:
        raise InputError("max_n must be >= 0")
    values = [weight(WeightQuery(args.family, n)).value for n in range(args.max_n + 1)]
    payload = {"family": args.family, "n": list(range(args.max_n + 1)),
               "values": [fmt_rational(v) for v in values]}
    lines = [f"{args.family} weights, n = 0..{args.max_n}"]
    lines += [f"{n:>3}  {fmt_rational(v)}" for n, v in enumerate(values)]
    return 0, payload, "\n".join(lines)


def cmd_mc(args):
    family = Family(args.family)
    samples = _require(args, "samples", minimum=1)
    seed = _require(args, "seed")
    chunks = _require(args, "chunks", minimum=1)
    if samples > MC_MAX_SAMPLES:
        raise InputError(f"--samples must be <= {MC_MAX_SAMPLES}")
    if args.n < 0:
        raise InputError("n must be >= 0")
    query = WeightQuery(family, args.n)
    if args.mode == "reduced":
        if family is not Family.GAMMA or args.n > MC_REDUCED_LIMIT:
            raise InputError(f"reduced Monte Carlo supports gamma with n <= {MC_REDUCED_LIMIT}")
        est = reduced_gamma_mc(args.n, samples, seed, chunks)
    else:
        if args.n > MC_FULL_LIMIT[family]:
            raise InputError(f"full Monte Carlo supports {family.value} with n <= {MC_FULL_LIMIT[family]}")
        est = full_mc(query, samples, seed, chunks)
    exact = exact_value(query)
    diff = est.mean - exact
    if est.std_error > 0:
        z = diff / est.std_error
    else:
        z = 0.0 if diff == 0 else math.copysign(math.inf, diff)
    payload = {"family": family.value, "n": args.n, "mode": args.mode, "samples": samples, "seed": seed,
               "chunks": chunks, "estimate": est.mean, "std_error": est.std_error,
               "exact": fmt_rational(weight(query).value), "z": z}
    human = (f"{family.value}_{args.n} ({args.mode}): {fmt_decimal(est.mean)} ± {fmt_decimal(est.std_error)}"
             f"  exact {payload['exact']}  z = {z:+.2f}")
    return (1 if abs(z) > 5 else 0), payload, human


def cmd_quad(args):
    if Family(args.family) is not Family.UPSILON:
        raise InputError("quadrature is available for the upsilon family only")
    points = _require(args, "points", minimum=2)
    if args.n < 0:
        raise InputError("n must be >= 0")
    value = reduced_upsilon_quad(args.n, points)
    exact = weight(WeightQuery(Family.UPSILON, args.n)).value
    err = abs(value - float(exact))
    payload = {"family": "upsilon", "n": args.n, "points": points, "value": value,
               "exact": fmt_rational(exact), "abs_error": err}
    human = f"upsilon_{args.n} ({points} points): {fmt_decimal(value)}  exact {payload['exact']}  |error| = {err:.3e}"
    return 0, payload, human


def _operand(args, jf, name: str, *, required: bool = True):
    value = getattr(args, name, None)
    if value is None:
        value = jf.operands.get(name)
    if value is None and required:
        raise InputError(f"operand {name} is missing (pass --{name} or put it in the jet file)")
    return value


def _form_payload(form: HbarForm):
    out = {}
    for key, series in form.components.items():
        label = "scalar" if not key else "".join(str(i + 1) for i in key)
        out[label] = [str(c) for c in series]
    return out


def _form_human(title: str, form: HbarForm, prefix: str) -> str:
    lines = [title]
    for key, series in form.components.items():
        label = prefix if not key else f"{prefix}_{''.join(str(i + 1) for i in key)}"
        lines.append(f"{label} = {render_series(series)}")
    return "\n".join(lines)


def _pi_hat(jf):
    if jf.pi is None:
        raise InputError("jet file has no pi field")
    return pullback_bivector(jf.phi, jf.pi)


def cmd_series(args):
    if not args.jets:
        raise InputError("--jets is required for series")
    jf = load_jets(args.jets)
    order = 4 if args.order is None else args.order
    if order < 0:
        raise InputError("--order must be >= 0")
    d = jf.dimension
    kx, ky = jf.caps
    op = args.operator
    status = 0
    if op == "star":
        sigma = parse_jet(_operand(args, jf, "sigma"), d)
        tau = parse_jet(_operand(args, jf, "tau"), d)
        form = star_product(_pi_hat(jf), sigma.with_caps(kx, ky), tau.with_caps(kx, ky), order)
        payload, human = _form_payload(form), _form_human("star product", form, "sigma⋆tau")
    elif op == "connection":
        sigma = parse_jet(_operand(args, jf, "sigma"), d).with_caps(kx, ky)
        form = connection_A(compute_R(jf.phi), _pi_hat(jf), sigma, order)
        payload, human = _form_payload(form), _form_human("deformed connection on sigma", form, "A")
    elif op == "curvature":
        form = curvature_F(compute_R(jf.phi), _pi_hat(jf), order)
        payload, human = _form_payload(form), _form_human("curvature", form, "F")
    elif op == "bullet":
        f = parse_base(_operand(args, jf, "f"), d)
        g = parse_base(_operand(args, jf, "g"), d)
        if jf.pi is None:
            raise InputError("jet file has no pi field")
        series = bullet_product(jf.phi, jf.pi, f, g, order)
        base = [BasePolynomial.from_offset_jet(c, jf.phi.x0) for c in series]
        payload = {"scalar": [str(b) for b in base]}
        human = "bullet product (in x, valid near x0)\nf•g = " + _render_base_series(base)
    elif op == "flatness":
        res = flatness_residual(compute_R(jf.phi))
        nonzero = [f"{l + 1}{m + 1}" for (l, m), vec in res.items() if not all(v.is_zero() for v in vec)]
        status = 1 if nonzero else 0
        payload = {"zero": not nonzero, "nonzero_components": nonzero, "caps": [kx - 1, ky - 1]}
        human = ("flatness residual: 0 through caps " f"({kx - 1}, {ky - 1})" if not nonzero
                 else "flatness residual nonzero in components " + ", ".join(nonzero))
    elif op == "residual":
        gamma_text = _operand(args, jf, "gamma")
        comps = gamma_text.split(",") if isinstance(gamma_text, str) else list(gamma_text)
        if len(comps) != d:
            raise InputError(f"gamma needs {d} components")
        gamma = HbarForm(1, d, order, {(i,): [parse_jet(c, d).with_caps(kx, ky)] for i, c in enumerate(comps)})
        form = gamma_equation_residual(jf.phi, _pi_hat(jf), gamma, order)
        payload, human = _form_payload(form), _form_human("F + D gamma + gamma⋆gamma", form, "res")
    else:
        if jf.split is None:
            raise InputError("cotangent needs a split field in the jet file")
        rbar = jf.operands.get("rbar")
        if rbar is None:
            R = compute_R(jf.phi)
        else:
            if not (isinstance(rbar, list) and len(rbar) == d and all(isinstance(r, list) and len(r) == d for r in rbar)):
                raise InputError(f"operand rbar must be a {d}x{d} list of jet strings")
            R = RJets.from_matrix([[parse_jet(e, d, kx, ky) for e in row] for row in rbar])
        if args.enforce_filter:
            R = enforce_cotangent_filter(R, jf.split)
        form = cotangent_curvature(R, _pi_hat(jf), jf.split, max(order, 3))
        comps = {k: v[1] for k, v in form.components.items()}
        payload = {"hbar_order": 1, "prefactor": "1/48",
                   "components": {"".join(str(i + 1) for i in k): str(v) for k, v in comps.items()}}
        lines = ["cotangent curvature: single ℏ term, (ℏ/48) pi^{rs} R^k_{i,lr} R^l_{j,ks}"]
        lines += [f"F_{''.join(str(i + 1) for i in k)} = {render_series(v)}" for k, v in form.components.items()]
        human = "\n".join(lines)
    payload = {"operator": op, "order": order, "result": payload}
    return status, payload, human


def _render_base_series(series) -> str:
    parts = []
    for n, b in enumerate(series):
        if not b.terms:
            continue
        text = str(b)
        parts.append(text if n == 0 else f"({text}){'ℏ' if n == 1 else f'ℏ^{n}'}")
    return " + ".join(parts) if parts else "0"


COMMANDS = {"weight": cmd_weight, "table": cmd_table, "mc": cmd_mc, "quad": cmd_quad, "series": cmd_series}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise InputError("a command is required: " + ", ".join(COMMANDS))
        status, payload, human = COMMANDS[args.command](args)
    except ValidationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FilterViolation as exc:
        print(f"error: cotangent filter violated: {exc}", file=sys.stderr)
        return 2
    except (InputError, KontsevichError, ValueError) as exc:
        msg = " ".join(str(exc).split())
        print(f"error: {type(exc).__name__ if isinstance(exc, KontsevichError) else 'input'}: {msg}",
              file=sys.stderr)
        return 2
    if args.format == "json":
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        print(human)
    return status


if __name__ == "__main__":
    sys.exit(main())

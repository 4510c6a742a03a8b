"""Reading and writing jet files.

A jet file is a JSON document::

    {
      "dimension": 2,
      "caps": {"x": 3, "y": 6},
      "phi": [[{"alpha": [0, 0], "beta": [0, 0], "coeff": "1/2"}, ...], ...],
      "pi": [{"i": 1, "j": 2, "terms": [{"alpha": [0, 0], "coeff": "1"}]}],
      "split": {"m": 1},
      "operands": {"sigma": "y1", "tau": "y2"}
    }

``pi`` lists the entries ``i < j`` (one-based) of a base bivector as
polynomials in ``x``; ``split`` and ``operands`` are optional.  Coefficients
are integers or ``"p/q"`` strings; float literals are rejected so every value
is exact.  :func:`dumps` writes the canonical form, which :func:`loads` reads
back unchanged.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import JetFileError
from .jets import BasePolynomial, JetPolynomial
from .series import CotangentSplit, ExpMapJets

__all__ = ["JetFile", "loads", "dumps", "load", "dump"]


@dataclass
class JetFile:
    phi: ExpMapJets
    pi: list[list[BasePolynomial]] | None = None
    split: CotangentSplit | None = None
    operands: dict[str, object] = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return self.phi.dim

    @property
    def caps(self) -> tuple[int, int]:
        return self.phi.kx, self.phi.ky


def _reject_float(text):
    raise JetFileError(f"float literal {text} is not allowed; write coefficients as \"p/q\"")


def _coeff(value) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise JetFileError(f"coefficient {value!r} must be an integer or a \"p/q\" string")
    if isinstance(value, str) and any(ch in value for ch in ".eE"):
        raise JetFileError(f"coefficient {value!r} is not an exact rational")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise JetFileError(f"bad coefficient {value!r}: {exc}") from None


def _index(value, dim: int, what: str) -> tuple[int, ...]:
    if not isinstance(value, list) or len(value) != dim or not all(
            isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in value):
        raise JetFileError(f"{what} must be a list of {dim} non-negative integers, got {value!r}")
    return tuple(value)


def _render_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def loads(text: str) -> JetFile:
    try:
        doc = json.loads(text, parse_float=_reject_float)
    except json.JSONDecodeError as exc:
        raise JetFileError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise JetFileError("top level must be an object")
    unknown = set(doc) - {"dimension", "caps", "phi", "pi", "split", "operands"}
    if unknown:
        raise JetFileError(f"unknown fields {sorted(unknown)}")
    for key in ("dimension", "caps", "phi"):
        if key not in doc:
            raise JetFileError(f"missing field {key!r}")
    dim = doc["dimension"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise JetFileError("dimension must be a positive integer")
    caps = doc["caps"]
    if not isinstance(caps, dict) or set(caps) != {"x", "y"} or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in caps.values()):
        raise JetFileError("caps must be {\"x\": int, \"y\": int}")
    phi_doc = doc["phi"]
    if not isinstance(phi_doc, list) or len(phi_doc) != dim:
        raise JetFileError(f"phi must list {dim} components")
    comps = []
    for i, terms in enumerate(phi_doc):
        if not isinstance(terms, list):
            raise JetFileError(f"phi component {i + 1} must be a list of terms")
        entries = {}
        for t in terms:
            if not isinstance(t, dict) or set(t) != {"alpha", "beta", "coeff"}:
                raise JetFileError(f"phi term must have exactly alpha, beta, coeff: {t!r}")
            key = (_index(t["alpha"], dim, "alpha"), _index(t["beta"], dim, "beta"))
            if key in entries:
                raise JetFileError(f"duplicate term {key} in phi component {i + 1}")
            entries[key] = _coeff(t["coeff"])
        comps.append(JetPolynomial.from_terms(dim, entries))
    phi = ExpMapJets(comps, caps["x"], caps["y"])

    pi = None
    if "pi" in doc:
        pi = [[BasePolynomial(dim, {}) for _ in range(dim)] for _ in range(dim)]
        if not isinstance(doc["pi"], list):
            raise JetFileError("pi must be a list of entries")
        for entry in doc["pi"]:
            if not isinstance(entry, dict) or set(entry) != {"i", "j", "terms"}:
                raise JetFileError(f"pi entry must have exactly i, j, terms: {entry!r}")
            i, j = entry["i"], entry["j"]
            if not (isinstance(i, int) and isinstance(j, int) and 1 <= i < j <= dim):
                raise JetFileError(f"pi entry needs 1 <= i < j <= {dim}, got ({i}, {j})")
            terms = {}
            for t in entry["terms"]:
                if not isinstance(t, dict) or set(t) != {"alpha", "coeff"}:
                    raise JetFileError(f"pi term must have exactly alpha, coeff: {t!r}")
                terms[_index(t["alpha"], dim, "alpha")] = _coeff(t["coeff"])
            poly = BasePolynomial(dim, terms)
            pi[i - 1][j - 1] = poly
            pi[j - 1][i - 1] = BasePolynomial(dim, {a: -c for a, c in poly.terms.items()})

    split = None
    if "split" in doc:
        s = doc["split"]
        if not isinstance(s, dict) or set(s) != {"m"} or not isinstance(s["m"], int) or 2 * s["m"] != dim:
            raise JetFileError(f"split must be {{\"m\": {dim // 2}}} with 2m equal to the dimension")
        split = CotangentSplit(dim)

    operands = doc.get("operands", {})
    if not isinstance(operands, dict):
        raise JetFileError("operands must be an object")
    for k, v in operands.items():
        ok = isinstance(v, str) or (isinstance(v, list) and all(
            isinstance(c, str) or (isinstance(c, list) and all(isinstance(e, str) for e in c)) for c in v))
        if not ok:
            raise JetFileError(f"operand {k!r} must be a polynomial string or a list of them")
    return JetFile(phi, pi, split, dict(operands))


def _to_doc(jf: JetFile) -> dict:
    dim = jf.dimension
    doc: dict = {"dimension": dim, "caps": {"x": jf.phi.kx, "y": jf.phi.ky}}
    doc["phi"] = [[{"alpha": list(a), "beta": list(b), "coeff": _render_coeff(c)} for a, b, c in comp.terms()]
                  for comp in jf.phi.components]
    if jf.pi is not None:
        entries = []
        for i in range(dim):
            for j in range(i + 1, dim):
                poly = jf.pi[i][j]
                rows = sorted(poly.terms.items(), key=lambda t: (sum(t[0]), tuple(-v for v in t[0])))
                if rows:
                    entries.append({"i": i + 1, "j": j + 1,
                                    "terms": [{"alpha": list(a), "coeff": _render_coeff(c)} for a, c in rows]})
        doc["pi"] = entries
    if jf.split is not None:
        doc["split"] = {"m": jf.split.m}
    if jf.operands:
        doc["operands"] = jf.operands
    return doc


def _compact_lists(text: str) -> str:
    # keep multi-indices on one line
    return re.sub(r"\[\s*((?:-?\d+,\s*)*-?\d+)\s*\]",
                  lambda m: "[" + ", ".join(p.strip() for p in m.group(1).split(",")) + "]", text)


def dumps(jf: JetFile) -> str:
    """Canonical text: fixed key order, graded term order, two-space indent."""
    return _compact_lists(json.dumps(_to_doc(jf), indent=2, ensure_ascii=False)) + "\n"


def load(path: str | Path) -> JetFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise JetFileError(f"cannot read jet file {path}: {exc.strerror}") from None
    return loads(text)


def dump(jf: JetFile, path: str | Path) -> None:
    Path(path).write_text(dumps(jf), encoding="utf-8")

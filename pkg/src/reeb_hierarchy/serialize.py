"""JSON forms of polynomials, Weyl elements and D elements.

Polynomial::

    {"terms": [{"mono": [-1, 1], "num": "1", "den": "1"}, ...]}

Weyl and D elements add ``"hbar"`` to every term and an ``"alphabet"`` tag
(``"+"``, ``"-"``, ``""`` for a Weyl element, ``"D"`` for a D element; in a
D element positive entries are ``q^-_n`` and negative entries ``p^+_n``).
Terms are written in a fixed order, so equal objects serialize to identical
bytes.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .algebra import Polynomial
from .weyl import DElement, WeylElement


class FormatError(ValueError):
    pass


def _coeff(term) -> Fraction:
    try:
        return Fraction(int(term["num"]), int(term.get("den", "1")))
    except (KeyError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad coefficient in {term!r}") from exc


def _term(mono, c: Fraction, **extra) -> dict:
    out = {"mono": list(mono), "num": str(c.numerator), "den": str(c.denominator)}
    out.update(extra)
    return out


def poly_to_json(f: Polynomial) -> dict:
    return {"terms": [_term(m, f.coefficient(m)) for m in f.monomials()]}


def poly_from_json(data: dict, model) -> Polynomial:
    try:
        terms = data["terms"]
    except (KeyError, TypeError) as exc:
        raise FormatError("polynomial JSON needs a 'terms' list") from exc
    acc = Polynomial.zero(model)
    for t in terms:
        acc = acc + Polynomial({tuple(int(k) for k in t["mono"]): _coeff(t)}, model)
    return acc


def _ordered(items):
    return sorted(items, key=lambda kv: (kv[0][1], len(kv[0][0]), kv[0][0]))


def weyl_to_json(e: WeylElement, alphabet: str = "") -> dict:
    return {"alphabet": alphabet,
            "terms": [_term(w, c, hbar=h) for (w, h), c in _ordered(e.items())]}


def weyl_from_json(data: dict, model) -> WeylElement:
    try:
        terms = {}
        for t in data["terms"]:
            key = (tuple(int(k) for k in t["mono"]), int(t.get("hbar", 0)))
            terms[key] = terms.get(key, 0) + _coeff(t)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed Weyl element: {exc}") from exc
    out = WeylElement.hbar_power(0, model, 0)
    for key, c in terms.items():
        out = out + WeylElement({key: c}, model)
    return out


def d_to_json(x: DElement) -> dict:
    return {"alphabet": "D", "terms": [_term(w, c, hbar=h) for (w, h), c in _ordered(x.items())]}


def d_from_json(data: dict, minus, plus=None) -> DElement:
    try:
        out = DElement({}, minus, plus)
        for t in data["terms"]:
            key = (tuple(int(k) for k in t["mono"]), int(t.get("hbar", 0)))
            out = out + DElement({key: _coeff(t)}, minus, plus)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed D element: {exc}") from exc
    return out


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"

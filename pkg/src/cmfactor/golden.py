"""Reference tables shipped with the package."""

from __future__ import annotations

import re
from importlib import resources


def _lines(name: str):
    text = resources.files("cmfactor").joinpath("data").joinpath(name).read_text()
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def c_table() -> dict:
    return {int(a): int(b) for a, b in (ln.split() for ln in _lines("c_table.txt"))}


def b_table() -> dict:
    return {int(a): int(b) for a, b in (ln.split() for ln in _lines("b_table.txt"))}


def j23_coefficients() -> list:
    return [int(x) for x in _lines("j23.txt")[0].split()]


def final_exponents() -> tuple[dict, int]:
    ex = {}
    rho_abs = None
    for ln in _lines("final_exponents.txt"):
        k, v = ln.split()
        if k == "rho_abs":
            rho_abs = int(v)
        else:
            ex[k] = int(v)
    return ex, rho_abs


def _poly_coeffs(text: str) -> list:
    import sympy

    X = sympy.Symbol("X")
    expr = re.sub(r"(\d)X", r"\1*X", text.replace("^", "**"))
    expr = re.sub(r"\)\s*\(", ")*(", expr)
    expr = re.sub(r"X\s*\(", "X*(", expr)
    expr = re.sub(r"(\d)\s*\(", r"\1*(", expr)
    p = sympy.Poly(sympy.sympify(expr, locals={"X": X}), X)
    return [int(c) for c in reversed(p.all_coeffs())]


def _cm_value(text: str) -> tuple[dict, int]:
    ex, unit = {}, 0
    for tok in text.split():
        name, _, e = tok.partition("^")
        e = int(e) if e else 1
        if name == "rho":
            unit += e
        else:
            ex[name] = ex.get(name, 0) + e
    return ex, unit


def heegner_table() -> dict:
    """d -> (coefficients lowest degree first, basis exponents, unit exponent)."""
    out = {}
    for ln in _lines("heegner_table.txt"):
        d, poly, val = (s.strip() for s in ln.split("|"))
        ex, unit = _cm_value(val)
        out[int(d)] = (_poly_coeffs(poly), ex, unit)
    return out

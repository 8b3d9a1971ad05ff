"""Heegner points on X_0(23), the Hauptmodul j*_23, Heegner polynomials and
the Borcherds product evaluated at the CM point of discriminant -23."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath

from .classical import NamedSeries, SelfTestFailure
from .cubic import CubicInteger, Factorization, PiBasis, RHO, factor_in_pibasis, horner
from .quadclass import QuadForm, reduce_form, reduced_forms, xgcd
from .series import QExpansion, eta_product, series_invert


class NonSquareDiscriminant(ValueError):
    pass


class RoundingResidualTooLarge(ArithmeticError):
    pass


J23_SHOWN = [4, 7, 13, 19, 33, 47, 74]


def _require_23(D: int) -> None:
    if D != 23:
        raise NotImplementedError("only the level-23 Hauptmodul is available")


def hauptmodul_j23(P) -> NamedSeries:
    """j*_23 = theta(z) / (eta(z) eta(23 z)) - 3 with theta = sum q^(a^2 + ab + 6b^2)."""
    P = int(getattr(P, "terms", P))
    N = P + 2
    th = {}
    B = math.isqrt(4 * N) + 2
    for b in range(-B, B + 1):
        for a in range(-2 * B - 1, 2 * B + 2):
            n = a * a + a * b + 6 * b * b
            if n < N:
                th[n] = th.get(n, 0) + 1
    theta = QExpansion(th, 1, N)
    e1 = eta_product(N, 1)  # prod (1 - q^n)
    e23 = QExpansion({23 * n: c for n, c in e1.items() if 23 * n < N}, 1, N)
    denom = e1 * e23  # eta(z) eta(23z) = q * denom
    j = (theta * series_invert(denom, N)).shift(-1) - QExpansion({0: 3}, 1)
    j = j.truncate(P)
    got = [j.coefficient(n) for n in range(1, min(8, P))]
    if got != J23_SHOWN[: len(got)] or j.coefficient(-1) != 1 or j.coefficient(0) != 0:
        raise SelfTestFailure(f"j*_23 starts {got}")
    return NamedSeries("j23", 0, j, "Hauptmodul of Gamma_0(23)+")


# ---------------------------------------------------------------------------
# Heegner forms
# ---------------------------------------------------------------------------


@dataclass
class HeegnerOrbit:
    """Gamma_0(D)-classes of forms [A, B, C] with D | A and B^2 - 4AC = -d.

    ``beta`` restricts to B = beta mod 2D when given; None collects both
    beta and -beta (the Fricke-symmetrized divisor).
    """

    D: int
    d: int
    beta: int | None
    forms: list
    stabilizers: list

    def points(self):
        return [f.root() for f in self.forms]


def _complete(x: int, y: int):
    """gamma in SL2(Z) with first column (x, y)."""
    g, u, w = xgcd(x, y)  # u x + w y = 1
    return ((x, -w), (y, u))


def _stabilizer_order(Q: QuadForm, D: int) -> int:
    """Order of the stabilizer of Q in Gamma_0(D) / {+-1}.

    Automorphs of a form of discriminant -d are parametrised by solutions of
    t^2 + d u^2 = 4 (scaled by the content); only d/g^2 in {3, 4} gives more
    than +-1, and then the automorph has lower-left entry -a u / g, which must
    be divisible by D.
    """
    g = Q.content()
    dd = -Q.disc // (g * g)
    a, b, c = Q.a // g, Q.b // g, Q.c // g
    count = 0
    for u in range(-2, 3):
        t2 = 4 - dd * u * u
        if t2 < 0:
            continue
        t = math.isqrt(t2)
        if t * t != t2:
            continue
        for tt in {t, -t}:
            # automorph ((t - b u)/2, -c u), (a u, (t + b u)/2)
            if (tt - b * u) % 2:
                continue
            if (a * u) % D == 0:
                count += 1
    return max(count // 2, 1)


def enumerate_heegner(D: int, d: int, beta: int | None = None) -> HeegnerOrbit:
    if d <= 0 or (-d) % 4 not in (0, 1):
        raise NonSquareDiscriminant(f"-{d} is not a discriminant")
    if beta is not None and (beta * beta + d) % (4 * D):
        raise NonSquareDiscriminant(f"-{d} is not beta^2 mod {4 * D} for beta={beta}")
    if beta is None and not any((b * b + d) % (4 * D) == 0 for b in range(2 * D)):
        raise NonSquareDiscriminant(f"-{d} is not a square mod {4 * D}")
    forms = []
    g = 1
    while g * g <= d:
        if d % (g * g) == 0 and (-(d // (g * g))) % 4 in (0, 1):
            for q0 in reduced_forms(-(d // (g * g))):
                Q0 = QuadForm(g * q0.a, g * q0.b, g * q0.c)
                for x, y in _p1(D):
                    if Q0(x, y) % D:
                        continue
                    Q = Q0.act(_complete(x, y))
                    if beta is not None and (Q.b - beta) % (2 * D):
                        continue
                    forms.append(Q)
        g += 1
    # automorphisms +-1 act trivially on P^1, and for d/g^2 in {3, 4} the extra
    # automorphs would identify roots; keep the list canonical and dedupe
    forms = _dedupe(forms, D)
    stabs = [_stabilizer_order(Q, D) for Q in forms]
    return HeegnerOrbit(D, d, beta, forms, stabs)


def _p1(D: int):
    """Representatives (x, y) of P^1(Z/D) with gcd(x, y) = 1, D prime."""
    out = [(1, 0)]
    for r in range(D):
        out.append((r, 1))
    return out


def _canonical(Q: QuadForm, D: int):
    """A Gamma_0(D)-invariant: the SL2-reduced form and the root of Q^(reduced) mod D."""
    R, gamma = reduce_form(Q)
    # Q o gamma = R; the point (1:0) for Q maps to gamma^-1 (1, 0) for R
    (p, q), (r, s) = gamma
    x, y = s, -r  # gamma^-1 = ((s, -q), (-r, p))
    if y % D == 0:
        return R, None
    return R, (x * pow(y, -1, D)) % D


def _dedupe(forms, D):
    seen = {}
    for Q in forms:
        key = _canonical(Q, D)
        seen.setdefault(key, Q)
    return [seen[k] for k in sorted(seen, key=lambda k: (k[0], -1 if k[1] is None else k[1]))]


def count_by_scan(D: int, d: int, Abound: int = 200) -> int:
    """Independent count of Gamma_0(D)-classes by brute force over [A, B, C] with D | A."""
    keys = set()
    for A in range(D, Abound * D + 1, D):
        for B in range(-A, A + 1):
            num = B * B + d
            if num % (4 * A):
                continue
            C = num // (4 * A)
            keys.add(_canonical(QuadForm(A, B, C), D))
    return len(keys)


# ---------------------------------------------------------------------------
# evaluation and polynomials
# ---------------------------------------------------------------------------


def _height_reduce(z, D: int):
    """Image of z under Gamma_0(D)+ of maximal height.

    The images have height y / (w |C z + E|^2) over coprime (C, E), with w = 1
    when D | C (Gamma_0(D)) and w = D otherwise (Atkin-Lehner coset).
    """
    y = z.imag
    best = (mpmath.mpf(1), 0, 1)
    C = 1
    while C * C * y * y < best[0]:
        w = 1 if C % D == 0 else D
        if w * C * C * y * y < best[0]:
            centre = -C * z.real
            for E in range(int(mpmath.floor(centre)) - 2, int(mpmath.ceil(centre)) + 3):
                if math.gcd(C, E) != 1:
                    continue
                v = w * abs(C * z + E) ** 2
                if v < best[0] * (1 - mpmath.mpf(10) ** -30):
                    best = (v, C, E)
        C += 1
    _, C, E = best
    if C:
        if C % D == 0:
            g, a, b = xgcd(E, -C)  # a E - b C = 1
            z = (a * z + b) / (C * z + E)
        else:
            g, a, b = xgcd(D * E, -C)  # a D E - b C = 1
            z = (D * a * z + b) / (D * C * z + D * E)
    return z - mpmath.floor(z.real + mpmath.mpf(1) / 2)


@lru_cache(maxsize=4)
def _j_series_coeffs(P: int):
    j = hauptmodul_j23(P).series
    return [int(j.coefficient(n)) for n in range(-1, P)]


def j23_value(z, prec_bits: int = 192, terms: int | None = None):
    """j*_23(z) by summing the q-expansion after height reduction, with a tail estimate."""
    with mpmath.workprec(prec_bits + 20):
        z = _height_reduce(mpmath.mpc(z), 23)
        y = z.imag
        aq = mpmath.exp(-2 * mpmath.pi * y)
        if terms is None:
            # coefficients grow like exp(4 pi sqrt(n/23)); choose n so the terms fall below 2^-bits
            n = 50
            while True:
                bound = mpmath.exp(4 * mpmath.pi * mpmath.sqrt(mpmath.mpf(n) / 23)) * aq**n
                if bound < mpmath.mpf(2) ** (-prec_bits - 30):
                    break
                n += 50
            terms = n
        cs = _j_series_coeffs(terms)
        q = mpmath.expj(2 * mpmath.pi * z)
        acc = mpmath.mpc(0)
        for c in reversed(cs[1:]):
            acc = acc * q + c
        return acc + cs[0] / q


def j23_value_eta(z, prec_bits: int = 192):
    """Independent route: theta / (eta eta) - 3 with mpmath q-Pochhammer symbols."""
    with mpmath.workprec(prec_bits + 20):
        z = _height_reduce(mpmath.mpc(z), 23)
        q = mpmath.expj(2 * mpmath.pi * z)
        th = mpmath.mpc(0)
        B = 40
        for b in range(-B, B + 1):
            for a in range(-2 * B, 2 * B + 1):
                n = a * a + a * b + 6 * b * b
                if n < 400:
                    th += q**n
        e = q * mpmath.qp(q) * mpmath.qp(q**23)
        return th / e - 3


@dataclass
class HeegnerPolynomial:
    d: int
    coeffs: list  # integer coefficients, lowest degree first
    residual: float
    degree: int

    def __str__(self):
        return poly_str(self.coeffs)

    def factor_over_z(self):
        import sympy

        X = sympy.Symbol("X")
        expr = sum(c * X**i for i, c in enumerate(self.coeffs))
        return sympy.factor_list(expr)


def poly_str(coeffs) -> str:
    import sympy

    X = sympy.Symbol("X")
    return str(sympy.factor(sum(c * X**i for i, c in enumerate(coeffs))))


def heegner_polynomial(D: int, d: int, prec_bits: int = 192) -> HeegnerPolynomial:
    _require_23(D)
    orbit = enumerate_heegner(D, d)
    if any(s != 1 for s in orbit.stabilizers):
        raise NotImplementedError("nontrivial stabilizers do not occur at level 23")
    with mpmath.workprec(prec_bits):
        roots = []
        for Q in orbit.forms:
            x, y2 = Q.root()
            z = mpmath.mpc(mpmath.mpf(x.numerator) / x.denominator, mpmath.sqrt(mpmath.mpf(y2.numerator) / y2.denominator))
            roots.append(j23_value(z, prec_bits))
        poly = [mpmath.mpc(1)]
        for r in roots:
            new = [mpmath.mpc(0)] * (len(poly) + 1)
            for i, c in enumerate(poly):
                new[i + 1] += c
                new[i] -= c * r
            poly = new
        coeffs = [int(mpmath.nint(c.real)) for c in poly]
        residual = max(abs(c - k) for c, k in zip(poly, coeffs))
    if residual > mpmath.mpf(10) ** -6:
        raise RoundingResidualTooLarge(f"d={d}: residual {mpmath.nstr(residual, 5)}")
    return HeegnerPolynomial(d, coeffs, float(residual), len(roots))


def heegner_discriminants(D: int, dmax: int):
    return [d for d in range(1, dmax + 1) if (-d) % 4 in (0, 1) and any((b * b + d) % (4 * D) == 0 for b in range(2 * D))]


# ---------------------------------------------------------------------------
# CM value and the Borcherds product
# ---------------------------------------------------------------------------


J_AT_CM = CubicInteger(-2, -1, 0)  # j*_23((23 + sqrt(-23)) / 46) = -2 - rho


def check_j_at_cm(prec_bits: int = 192) -> float:
    """|j*_23(z_m) - (-2 - rho)| at the real embedding."""
    with mpmath.workprec(prec_bits):
        z = mpmath.mpc(mpmath.mpf(1) / 2, mpmath.sqrt(mpmath.mpf(23)) / 46)
        v = j23_value(z, prec_bits)
        return float(abs(v - J_AT_CM.real(prec_bits)))


def evaluate_at_cm(H, point: CubicInteger = J_AT_CM) -> CubicInteger:
    coeffs = H.coeffs if isinstance(H, HeegnerPolynomial) else list(H)
    return horner(coeffs, point)


@dataclass
class BorcherdsValue:
    """The Borcherds product at the CM point, prod H_d(j*)^(b(-d)), factored."""

    total: Factorization
    rows: dict = field(default_factory=dict)  # d -> (HeegnerPolynomial, Factorization)
    b_table: dict = field(default_factory=dict)


def borcherds_value(b_table: dict, D: int = 23, prec_bits: int = 192, basis: PiBasis | None = None,
                    polys: dict | None = None) -> BorcherdsValue:
    _require_23(D)
    basis = basis or PiBasis.default()
    total = Factorization({}, 0, 1)
    rows = {}
    for d, b in sorted(b_table.items()):
        if not b:
            continue
        H = polys[d] if polys and d in polys else heegner_polynomial(D, d, prec_bits)
        val = evaluate_at_cm(H)
        fac = factor_in_pibasis(val, basis)
        rows[d] = (H, fac)
        total = total.merge(fac, int(b))
    return BorcherdsValue(total, rows, dict(b_table))

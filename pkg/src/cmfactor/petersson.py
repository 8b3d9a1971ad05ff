"""Regularized Petersson product (f, Theta)^reg of two weight-one vector valued forms
over the fundamental domain of SL2(Z)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .vvforms import VectorForm


class NonZeroConstantTerm(ValueError):
    pass


class ToleranceNotMet(ArithmeticError):
    pass


class InsufficientSeriesPrecision(ValueError):
    pass


@dataclass(frozen=True)
class TruncatedDomain:
    """{|x| <= 1/2, |tau| >= 1, y <= T}; the strip y >= 1 is integrated in closed form."""

    T: float = 20.0
    nodes: int = 40  # starting node count of the "fourier" lobe rule

    def __post_init__(self):
        if self.T < 2:
            raise ValueError("T must be at least 2")


@dataclass
class PeterssonResult:
    value: object
    error_estimate: object
    strip: object
    lobe: object
    T: float

    def to_json(self) -> dict:
        return {
            "value": mpmath.nstr(self.value, 30),
            "error_estimate": mpmath.nstr(self.error_estimate, 5),
            "strip": mpmath.nstr(self.strip, 30),
            "lobe": mpmath.nstr(self.lobe, 30),
            "T": self.T,
        }


def _pairs(f: VectorForm, th: VectorForm):
    """Per component, the (exponent, coefficient) lists as floats; exponents of f and th agree mod 1."""
    out = []
    for key, fs in f.components.items():
        if key not in th.components:
            continue
        ts = th.components[key]
        a = [(e, c) for e, c in fs.items() if c]
        b = [(e, c) for e, c in ts.items() if c]
        if a and b:
            out.append((a, b))
    return out


def pairing_integrand(f: VectorForm, th: VectorForm, tau, prec_bits: int = 128):
    """<f(tau), conj th(tau)> / y, summed from the truncated expansions."""
    with mpmath.workprec(prec_bits):
        tau = mpmath.mpc(tau)
        y = tau.imag
        if y < mpmath.sqrt(3) / 2 - mpmath.mpf(10) ** -20:
            raise InsufficientSeriesPrecision("tau lies below the fundamental domain")
        total = mpmath.mpc(0)
        for key, fs in f.components.items():
            if key not in th.components:
                continue
            total += fs.evaluate(tau) * mpmath.conj(th.components[key].evaluate(tau))
        return total / y


def check_tails(f: VectorForm, th: VectorForm, y: float = math.sqrt(3) / 2, digits: int = 25) -> float:
    """Worst log10 size of the last retained term over both forms at height y."""
    worst = -math.inf
    for g in (f, th):
        for s in g.components.values():
            if s.terms:
                worst = max(worst, s.tail_bound(y))
    if worst > -digits:
        raise InsufficientSeriesPrecision(f"truncation tail 10^{worst:.1f} at y={y:.3f}")
    return worst


def _strip(pairs, T, prec_bits):
    """sum c a int_1^T e^(-4 pi n y) dy / y + the part above T, both exact in terms of E1."""
    lower = mpmath.mpf(0)
    upper = mpmath.mpf(0)
    four_pi = 4 * mpmath.pi
    for a, b in pairs:
        bd = dict(b)
        for e, c in a:
            if e <= 0:
                if e == 0 and c and bd.get(e):
                    raise NonZeroConstantTerm("the constant term of the pairing is nonzero")
                continue
            t = bd.get(e)
            if not t:
                continue
            n = mpmath.mpf(e.numerator) / e.denominator
            w = mpmath.mpf(c.numerator) / c.denominator * (mpmath.mpf(t.numerator) / t.denominator)
            eT = mpmath.e1(four_pi * n * T)
            lower += w * (mpmath.e1(four_pi * n) - eT)
            upper += w * eT
    return lower, upper


def _lobe_integrand(pairs, y, prec_bits):
    """int over x in [-1/2, -x0] + [x0, 1/2] of <f, conj th> / y, x0 = sqrt(1 - y^2)."""
    x0 = mpmath.sqrt(1 - y * y)
    two_pi = 2 * mpmath.pi
    cache = {}

    def weight(k):
        if k not in cache:
            cache[k] = 1 - 2 * x0 if k == 0 else -mpmath.sin(two_pi * k * x0) / (mpmath.pi * k)
        return cache[k]

    total = mpmath.mpf(0)
    for a, b in pairs:
        eb = [(mpmath.exp(-two_pi * (mpmath.mpf(e.numerator) / e.denominator) * y), e, mpmath.mpf(c.numerator) / c.denominator) for e, c in b]
        for e, c in a:
            ea = mpmath.exp(-two_pi * (mpmath.mpf(e.numerator) / e.denominator) * y) * (mpmath.mpf(c.numerator) / c.denominator)
            for g, e2, c2 in eb:
                k = e - e2
                if k.denominator != 1:
                    raise ValueError("exponents of paired components differ by a non-integer")
                total += ea * g * c2 * weight(int(k))
    return total / y


def _gauss_legendre(fn, a, b, n):
    xs, ws = _gl_nodes(n, mpmath.mp.prec)
    half = (b - a) / 2
    mid = (a + b) / 2
    return half * mpmath.fsum(w * fn(mid + half * x) for x, w in zip(xs, ws))


_GL_CACHE: dict = {}


def _gl_nodes(n, prec):
    key = (n, prec)
    if key not in _GL_CACHE:
        xs, ws = [], []
        for i in range(1, n + 1):
            x = mpmath.cos(mpmath.pi * (i - mpmath.mpf(1) / 4) / (n + mpmath.mpf(1) / 2))
            for _ in range(100):
                p0, p1 = mpmath.mpf(1), x
                for k in range(2, n + 1):
                    p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
                dp = n * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < mpmath.mpf(2) ** (-prec + 8):
                    break
            p0, p1 = mpmath.mpf(1), x
            for k in range(2, n + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = n * (x * p1 - p0) / (x * x - 1)
            xs.append(x)
            ws.append(2 / ((1 - x * x) * dp * dp))
        _GL_CACHE[key] = (xs, ws)
    return _GL_CACHE[key]


def _lobe_grid(f, th, n, prec_bits):
    """Tensor Gauss-Legendre rule for the lobe sqrt(3)/2 <= y <= 1, |x| >= sqrt(1 - y^2).

    y = cos(theta) on [0, pi/6] and x on [x0, 1/2]; the real part of the
    integrand is even in x, so the two halves are equal.
    """
    xs, ws = _gl_nodes(n, mpmath.mp.prec)
    a, b = mpmath.mpf(0), mpmath.pi / 6
    half = mpmath.mpf(1) / 2
    total = mpmath.mpf(0)
    for X, W in zip(xs, ws):
        t = (a + b) / 2 + (b - a) / 2 * X
        y = mpmath.cos(t)
        x0 = mpmath.sqrt(1 - y * y)
        inner = mpmath.fsum(V * pairing_integrand(f, th, mpmath.mpc((x0 + half) / 2 + (half - x0) / 2 * U, y), prec_bits).real
                            for U, V in zip(xs, ws))
        total += W * inner * (half - x0) / 2 * 2 * mpmath.sin(t)
    return total * (b - a) / 2


def _lobe_fourier(pairs, n, prec_bits):
    """The lobe with the x-integral done termwise in closed form, Gauss-Legendre in theta."""

    def g(th_):
        return _lobe_integrand(pairs, mpmath.cos(th_), prec_bits) * mpmath.sin(th_)

    return _gauss_legendre(g, mpmath.mpf(0), mpmath.pi / 6, n)


def regularized_petersson(f: VectorForm, th: VectorForm, tol: float = 1e-8,
                          domain: TruncatedDomain | None = None, prec_bits: int = 128,
                          method: str = "grid") -> PeterssonResult:
    """Strip y >= 1 in closed form plus the lobe by quadrature.

    ``method`` selects the lobe rule: "grid" integrates pairing_integrand on a
    two-dimensional Gauss-Legendre grid, "fourier" integrates x termwise.
    The node count doubles until two successive rules differ by less than tol / 10.
    """
    domain = domain or TruncatedDomain()
    if method not in ("grid", "fourier"):
        raise ValueError(f"unknown lobe method {method!r}")
    if f[0].coefficient(0) != 0:
        raise NonZeroConstantTerm("f has a nonzero constant term c_0(0)")
    check_tails(f, th, digits=max(20, int(-math.log10(tol)) + 8))
    pairs = _pairs(f, th)
    with mpmath.workprec(prec_bits):
        lower, upper = _strip(pairs, mpmath.mpf(domain.T), prec_bits)
        strip = lower + upper
        if method == "grid":
            rule = lambda n: _lobe_grid(f, th, n, prec_bits)  # noqa: E731
            n, cap = 12, 96
        else:
            rule = lambda n: _lobe_fourier(pairs, n, prec_bits)  # noqa: E731
            n, cap = domain.nodes, 640
        prev = rule(n)
        while True:
            cur = rule(2 * n)
            err = abs(cur - prev)
            if err < tol / 10 or 2 * n >= cap:
                break
            n, prev = 2 * n, cur
        if err > tol:
            raise ToleranceNotMet(f"quadrature error {mpmath.nstr(err, 5)} exceeds {tol}")
        return PeterssonResult(strip + cur, err, strip, cur, domain.T)

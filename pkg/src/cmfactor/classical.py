"""Classical q-expansions: Eisenstein series, Delta, j, Jacobi thetas, weak Jacobi
theta components, the weight-3 theta series and Rankin-Cohen brackets.

Every constructor takes an exponent bound P and returns series known below q^P.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, isqrt

from .quadclass import ClassGroup
from .series import PrecisionBudget, QExpansion, eta_product, series_derivative, series_invert
from .vvforms import VectorForm, norm_group, theta_series


class SelfTestFailure(AssertionError):
    pass


class WeightUnknown(ValueError):
    pass


class KNotSupported(ValueError):
    pass


@dataclass(frozen=True)
class NamedSeries:
    name: str
    weight: Fraction
    series: QExpansion
    note: str = ""

    def __mul__(self, other):
        if isinstance(other, NamedSeries):
            return NamedSeries(f"{self.name}*{other.name}", self.weight + other.weight, self.series * other.series)
        return NamedSeries(self.name, self.weight, self.series * other)


def _P(P) -> int:
    return P.terms if isinstance(P, PrecisionBudget) else int(P)


def _sigma_table(power: int, P: int) -> list[int]:
    s = [0] * P
    for d in range(1, P):
        dp = d**power
        for m in range(d, P, d):
            s[m] += dp
    return s


def eisenstein(k: int, P) -> NamedSeries:
    P = _P(P)
    consts = {4: 240, 6: -504}
    if k not in consts:
        raise ValueError("only E4 and E6 are provided")
    sig = _sigma_table(k - 1, P)
    coeffs = [1] + [consts[k] * sig[n] for n in range(1, P)]
    return NamedSeries(f"E{k}", Fraction(k), QExpansion.from_list(coeffs, 1, 0, P), "1 + c sum sigma_{k-1}(n) q^n")


def delta(P) -> NamedSeries:
    P = _P(P)
    return NamedSeries("Delta", Fraction(12), eta_product(P - 1, 24).shift(1), "q prod (1 - q^n)^24")


def delta_and_j(P):
    """(Delta, 1/Delta, j) all known below q^P."""
    P = _P(P)
    d = delta(P + 2).series
    dinv = series_invert(d).truncate(P)
    e4 = eisenstein(4, P + 1).series
    j = (e4 * e4 * e4 * dinv).truncate(P)
    return (
        NamedSeries("Delta", Fraction(12), d.truncate(P)),
        NamedSeries("Delta^-1", Fraction(-12), dinv),
        NamedSeries("j", Fraction(0), j, "E4^3 / Delta"),
    )


def jacobi_thetas(P):
    """theta_0 = sum q^(n^2) and theta_1 = sum_{n in 1/2 + Z} q^(n^2)."""
    P = _P(P)
    t0, t1 = {}, {}
    n = 0
    while n * n < P:
        t0[n * n] = t0.get(n * n, 0) + (1 if n == 0 else 2)
        n += 1
    m = 1
    while m * m < 4 * P:
        t1[m * m] = 2
        m += 2
    return (
        NamedSeries("theta0", Fraction(1, 2), QExpansion(t0, 1, P)),
        NamedSeries("theta1", Fraction(1, 2), QExpansion(t1, 4, 4 * P)),
    )


def _theta_square_slice(r: int, P: int, kind: str) -> QExpansion:
    """Coefficient of zeta^r in theta_i(tau, z)^2, with q = e(tau), zeta = e(z).

    kind 3: sum q^(n^2/2) zeta^n;  kind 4: sum (-1)^n q^(n^2/2) zeta^n;
    kind 2: sum q^((n+1/2)^2/2) zeta^(n+1/2);  kind 1: sum (-1)^n q^((n+1/2)^2/2) zeta^(n+1/2).
    Exponents are returned in units of 1/8.
    """
    out = {}
    half = kind in ("1", "2")
    bound = isqrt(16 * P) + 4
    for m in range(-bound, bound + 1):
        n = r - m - (1 if half else 0)
        if half:
            e8 = (2 * m + 1) ** 2 + (2 * n + 1) ** 2  # exponent * 8
        else:
            e8 = 4 * (m * m + n * n)
        if e8 >= 8 * P:
            continue
        sign = (1 - 2 * ((m + n) % 2)) if kind in ("1", "4") else 1
        out[e8] = out.get(e8, 0) + sign
    return QExpansion(out, 8, 8 * P)


def _phi_m2_slice(r: int, P: int) -> QExpansion:
    """zeta^r coefficient of the weight -2 index 1 weak Jacobi form theta_1(tau,z)^2 / eta^6."""
    num = _theta_square_slice(r, P + 1, "1")
    eta6 = eta_product(P + 1, 6).shift(Fraction(1, 4))
    return (num / eta6).truncate(P)


def _phi_0_slice(r: int, P: int) -> QExpansion:
    """zeta^r coefficient of 4 sum_{i=2,3,4} theta_i(tau,z)^2 / theta_i(tau,0)^2."""
    total = QExpansion({}, 8, 8 * P)
    for kind in ("2", "3", "4"):
        num = _theta_square_slice(r, P + 1, kind)
        z = _theta_value(kind, P + 1)
        total = total + (num / (z * z)).truncate(P)
    return total.scale(4)


def _theta_value(kind: str, P: int) -> QExpansion:
    """theta_i(tau, 0) in units of q^(1/8)."""
    out = {}
    bound = isqrt(16 * P) + 4
    for n in range(-bound, bound + 1):
        if kind == "2":
            e8 = (2 * n + 1) ** 2
            c = 1
        else:
            e8 = 4 * n * n
            c = (1 - 2 * (n % 2)) if kind == "4" else 1
        if e8 < 8 * P:
            out[e8] = out.get(e8, 0) + c
    return QExpansion(out, 8, 8 * P)


# reference expansions used as the acceptance gate for the derivation
_PSI0 = [-2, -12, -56, -208]
_PSI1 = [1, 8, 39, 152]
_PHI0 = [10, 108, 808, 4016]
_PHI1 = [1, -64, -513, -2752]


def weak_jacobi_components(P):
    """Theta-decomposition components (psi0, psi1, phi0, phi1) of the Eichler-Zagier
    generators of weight -2 and 0, index 1.

    psi_k collects the coefficients c(N), N = 4n - r^2 = -k^2 mod 4, as sum c(N) q^(N/4).
    Only the zeta^0 and zeta^1 slices are needed: N = 4n from r = 0 and N = 4n - 1 from r = 1.
    """
    P = _P(P)
    out = []
    for slicer, name, weight in ((_phi_m2_slice, "psi", Fraction(-5, 2)), (_phi_0_slice, "phi", Fraction(-1, 2))):
        s0 = slicer(0, P).reduced()
        s1 = slicer(1, P + 1).shift(Fraction(-1, 4)).truncate(P).reduced()
        out.append(NamedSeries(f"{name}0", weight, s0))
        out.append(NamedSeries(f"{name}1", weight, s1))
    psi0, psi1, phi0, phi1 = out
    for ns, shown, start in ((psi0, _PSI0, 0), (psi1, _PSI1, Fraction(-1, 4)),
                             (phi0, _PHI0, 0), (phi1, _PHI1, Fraction(-1, 4))):
        got = [ns.series.coefficient(start + i) for i in range(min(len(shown), P))]
        if got != shown[: len(got)]:
            raise SelfTestFailure(f"{ns.name} starts {got}, expected {shown}")
    return psi0, psi1, phi0, phi1


def theta_tilde(G: ClassGroup, P) -> VectorForm:
    """Weight-3 cusp form sum_nu e_nu sum_{a in nu/sqrt(-D) + o} (a^2 + conj(a)^2) q^(N(a)).

    a = (u + v sqrt(-D)) / (2 sqrt(-D)) with u = v mod 2 has norm (u^2 + D v^2) / 4D,
    lies in the coset nu = u / 2 mod D and has a^2 + conj(a)^2 = (D v^2 - u^2) / 2D.
    """
    P = _P(P)
    D = G.D
    if D < 7:
        raise ValueError("D >= 7 required")
    inv2 = pow(2, -1, D)
    bound = 4 * P * D  # need u^2 + D v^2 < 4 D P
    comps = {nu: {} for nu in range(D)}
    vmax = isqrt(bound // D) + 1
    for v in range(-vmax, vmax + 1):
        rest = bound - D * v * v
        if rest <= 0:
            continue
        umax = isqrt(rest) + 1
        for u in range(-umax, umax + 1):
            if (u - v) % 2:
                continue
            n4 = u * u + D * v * v
            if n4 >= bound:
                continue
            n = n4 // 4
            coeff = Fraction(D * v * v - u * u, 2 * D)
            if not coeff:
                continue
            nu = (u * inv2) % D
            comps[nu][n] = comps[nu].get(n, 0) + coeff
    return VectorForm(3, norm_group(D), {(nu,): QExpansion(c, D, P * D) for nu, c in comps.items()})


def _derivatives(s: QExpansion, n: int):
    out = [s]
    for _ in range(n):
        out.append(series_derivative(out[-1]))
    return out


def rankin_cohen(f, g, n: int, k=None, l=None):
    """n-th Rankin-Cohen bracket.

    [f, g]_n = sum_{r+s=n} (-1)^s C(n+k-1, s) C(n+l-1, r) f^(r) g^(s)
    with D = q d/dq.  This differs from the other common sign convention by
    (-1)^n; it is the one under which the weight-one example form has the
    tabulated principal part.  ``f`` may be a NamedSeries or VectorForm,
    ``g`` a NamedSeries or VectorForm; at most one of them vector-valued.
    """
    k = getattr(f, "weight", None) if k is None else Fraction(k)
    l = getattr(g, "weight", None) if l is None else Fraction(l)
    if k is None or l is None:
        raise WeightUnknown("both weights are needed for the bracket")

    def coef(r, s):
        return (-1) ** s * _binom(n + k - 1, s) * _binom(n + l - 1, r)

    def scalar_bracket(a: QExpansion, b: QExpansion):
        da = _derivatives(a, n)
        db = _derivatives(b, n)
        total = None
        for r in range(n + 1):
            s = n - r
            c = coef(r, s)
            if not c:
                continue
            term = (da[r] * db[s]).scale(c)
            total = term if total is None else total + term
        if total is None:
            total = (a * b).scale(0)
        return total

    weight = k + l + 2 * n
    if isinstance(f, VectorForm) and isinstance(g, VectorForm):
        raise ValueError("bracket of two vector-valued forms is not supported")
    if isinstance(g, VectorForm):
        a = f.series if isinstance(f, NamedSeries) else f
        return VectorForm(weight, g.group, {x: scalar_bracket(a, s) for x, s in g.components.items()}, g.dual)
    if isinstance(f, VectorForm):
        b = g.series if isinstance(g, NamedSeries) else g
        return VectorForm(weight, f.group, {x: scalar_bracket(s, b) for x, s in f.components.items()}, f.dual)
    a = f.series if isinstance(f, NamedSeries) else f
    b = g.series if isinstance(g, NamedSeries) else g
    return NamedSeries(f"[{getattr(f, 'name', 'f')},{getattr(g, 'name', 'g')}]_{n}", weight, scalar_bracket(a, b))


def _binom(x: Fraction, m: int) -> Fraction:
    """Generalized binomial coefficient for rational top argument."""
    x = Fraction(x)
    out = Fraction(1)
    for i in range(m):
        out *= (x - i) / (i + 1)
    return out


def weakly_holo_gk(k: int, P) -> NamedSeries:
    """The unique form in M^!_{2-2k} with expansion q^-1 + O(1), as E_{14-2k} / Delta."""
    P = _P(P)
    if k not in (2, 3, 4, 5, 7):
        raise KNotSupported(f"g_k needs S_2k = 0; k={k} is not supported")
    _, dinv, _ = delta_and_j(P)
    E4 = eisenstein(4, P + 1).series
    E6 = eisenstein(6, P + 1).series
    numer = {2: E4 * E6, 3: E4 * E4, 4: E6, 5: E4, 7: QExpansion({0: 1})}[k]
    g = (numer * dinv.series).truncate(P)
    return NamedSeries(f"g{k}", Fraction(2 - 2 * k), g, f"E_{14 - 2 * k} / Delta")


def example_form(G: ClassGroup, B, P) -> VectorForm:
    """D * [E4 E6 / Delta, Theta_B]_1, the weight-one form with integral principal part."""
    P = _P(P)
    g2 = weakly_holo_gk(2, P + 1)
    th = theta_series(G, B, P + 1)
    f = rankin_cohen(g2, th, 1).scale(G.D)
    return f.truncate(P)

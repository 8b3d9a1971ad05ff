"""The signature (2,1) lattice L of matrices [[A/D, B], [B, C]] with q = -D det,
its splitting L = N + 2mZ, the map T_{L,N} and the preimage construction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .classical import (
    NamedSeries,
    delta_and_j,
    jacobi_thetas,
    theta_tilde,
    weak_jacobi_components,
)
from .quadclass import ClassGroup, IdealClass, QuadForm, reduce_form, xgcd
from .series import QExpansion
from .vvforms import (
    DiscriminantGroup,
    Embedding,
    VectorForm,
    norm_group,
    outer_product,
    res_map,
    tensor_pair,
    tr_map,
)


class IsometryCheckFailure(AssertionError):
    pass


class CorrectionSolveFailure(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# the lattice L
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeL:
    """Coordinates (A, B, C) stand for the matrix [[A/D, B], [B, C]]."""

    D: int

    @property
    def gram(self):
        # (x, y) = x^T G y with (x, x) = 2 q(x) and q = D B^2 - A C
        return ((0, 0, -1), (0, 2 * self.D, 0), (-1, 0, 0))

    def bilinear(self, x, y) -> Fraction:
        G = self.gram
        return sum(Fraction(x[i]) * G[i][j] * Fraction(y[j]) for i in range(3) for j in range(3))

    def q(self, x) -> Fraction:
        return self.bilinear(x, x) / 2

    def matrix(self, x):
        A, B, C = x
        return ((Fraction(A) / self.D, Fraction(B)), (Fraction(B), Fraction(C)))

    def coords(self, mat):
        """Inverse of ``matrix``: [[p, r], [r, s]] -> (D p, r, s)."""
        (p, r), (r2, s) = mat
        if r != r2:
            raise ValueError("matrix is not symmetric")
        return (Fraction(p) * self.D, Fraction(r), Fraction(s))

    def in_lattice(self, x) -> bool:
        return all(Fraction(v).denominator == 1 for v in x)

    def in_dual(self, x) -> bool:
        A, B, C = (Fraction(v) for v in x)
        return A.denominator == 1 and C.denominator == 1 and (B * 2 * self.D).denominator == 1

    def dual_label(self, x) -> int:
        """lambda in Z/2D for an element of L' (the B coordinate times 2D)."""
        if not self.in_dual(x):
            raise ValueError(f"{x} is not in L'")
        return int(Fraction(x[1]) * 2 * self.D) % (2 * self.D)

    def discriminant_group(self) -> DiscriminantGroup:
        return DiscriminantGroup.cyclic(2 * self.D, Fraction(1, 4 * self.D), f"L{self.D}")


@dataclass(frozen=True)
class MVector:
    """m = (1/D) [[c, -b/2], [-b/2, a]] with b^2 - 4ac = -D and a, b in DZ."""

    D: int
    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.b * self.b - 4 * self.a * self.c != -self.D:
            raise ValueError("b^2 - 4ac must equal -D")
        if self.a % self.D or self.b % self.D or self.a <= 0:
            raise ValueError("need a, b divisible by D and a > 0")

    @property
    def coords(self):
        return (Fraction(self.c), Fraction(-self.b, 2 * self.D), Fraction(self.a, self.D))

    @property
    def form(self) -> QuadForm:
        return QuadForm(self.a, self.b, self.c)

    def cm_point(self):
        """z_m = (-b + sqrt(-D)) / 2a as (real part, imaginary part squared)."""
        return Fraction(-self.b, 2 * self.a), Fraction(self.D, 4 * self.a * self.a)

    def cm_point_complex(self):
        import mpmath

        x, y2 = self.cm_point()
        return mpmath.mpc(mpmath.mpf(x.numerator) / x.denominator, mpmath.sqrt(mpmath.mpf(y2.numerator) / y2.denominator))

    def ideal_class(self, G: ClassGroup) -> IdealClass:
        return IdealClass(reduce_form(self.form)[0])


def find_m_vector(G: ClassGroup, C: IdealClass, search: int = 30) -> MVector:
    """A vector m with q(m) = -1/4 whose CM point generates an ideal in C.

    Acting on the reduced form of C by SL2(Z), look for the smallest value
    a = Q(x, y) divisible by D over primitive (x, y); b is then automatically
    divisible by D, and a translation puts b into [-a, a).
    """
    D = G.D
    Q = C.form
    best = None
    for y in range(0, search + 1):
        for x in range(-search, search + 1):
            if math.gcd(x, y) != 1 or (y == 0 and x != 1):
                continue
            v = Q(x, y)
            if v % D == 0 and (best is None or v < best[0]):
                best = (v, x, y)
    if best is None:
        raise RuntimeError("no representative found in the search box")
    _, x, y = best
    g, u, w = xgcd(x, y)  # u x + w y = 1
    gamma = ((x, -w), (y, u))
    F = Q.act(gamma)
    a, b = F.a, F.b
    k = (-a - b) // (2 * a) + (1 if (-a - b) % (2 * a) else 0)  # smallest k with b + 2ak >= -a
    b += 2 * a * k
    c = (b * b + D) // (4 * a)
    return MVector(D, a, b, c)


# ---------------------------------------------------------------------------
# N = L cap m^perp and the isometry with an ideal
# ---------------------------------------------------------------------------


class QuadElt:
    """x + y sqrt(-D) with rational x, y."""

    __slots__ = ("x", "y", "D")

    def __init__(self, x, y, D):
        self.x, self.y, self.D = Fraction(x), Fraction(y), D

    def __add__(self, o):
        return QuadElt(self.x + o.x, self.y + o.y, self.D)

    def __mul__(self, o):
        if not isinstance(o, QuadElt):
            return QuadElt(self.x * o, self.y * o, self.D)
        return QuadElt(self.x * o.x - self.D * self.y * o.y, self.x * o.y + self.y * o.x, self.D)

    __rmul__ = __mul__

    def conj(self):
        return QuadElt(self.x, -self.y, self.D)

    def norm(self) -> Fraction:
        return self.x * self.x + self.D * self.y * self.y


def _integer_kernel(v):
    """Basis of {x in Z^3 : v . x = 0} for an integer vector v != 0."""
    cols = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    w = list(v)
    # column operations until only the first entry of w is nonzero
    for i in (1, 2):
        if w[i] == 0:
            continue
        g, s, t = xgcd(w[0], w[i])
        a0, ai = w[0] // g, w[i] // g
        c0, ci = cols[0], cols[i]
        cols[0] = [s * p + t * r for p, r in zip(c0, ci)]
        cols[i] = [-ai * p + a0 * r for p, r in zip(c0, ci)]
        w[0], w[i] = g, 0
    return [tuple(cols[1]), tuple(cols[2])]


def _gauss_reduce(basis, bil):
    """Lagrange-Gauss reduction of a rank-2 positive definite basis."""
    u, v = basis
    while True:
        if bil(v, v) < bil(u, u):
            u, v = v, u
        mu = bil(u, v) / bil(u, u)
        k = math.floor(mu + Fraction(1, 2))
        if k == 0:
            return u, v
        v = tuple(vi - k * ui for vi, ui in zip(v, u))


@dataclass
class OrthogonalData:
    m: MVector
    basis: list
    gram: tuple
    form: QuadForm
    images: dict = field(default_factory=dict)

    @property
    def det(self) -> Fraction:
        (p, r), (_, s) = self.gram
        return p * s - r * r


def orthogonal_lattice(m: MVector) -> OrthogonalData:
    L = LatticeL(m.D)
    D = m.D
    mc = m.coords
    # (x, m) = -A m_C - C m_A + 2D B m_B; scale to integers
    row = [-mc[2], 2 * D * mc[1], -mc[0]]
    den = math.lcm(*(Fraction(r).denominator for r in row))
    row = [int(r * den) for r in row]
    g = math.gcd(*row)
    row = [r // g for r in row]
    basis = _integer_kernel(row)
    u, v = _gauss_reduce(basis, L.bilinear)
    gram = ((L.bilinear(u, u), L.bilinear(u, v)), (L.bilinear(v, u), L.bilinear(v, v)))
    if gram[0][0] * gram[1][1] - gram[0][1] ** 2 != D:
        raise IsometryCheckFailure(f"Gram determinant of N is {gram}, expected {D}")
    form = QuadForm(int(gram[0][0] / 2), int(gram[0][1]), int(gram[1][1] / 2))
    data = OrthogonalData(m, [u, v], gram, reduce_form(form)[0])

    # the isometry s -> conj(s) Z + s conj(Z) with Z = (a/D) [[z^2, z], [z, 1]]
    z = QuadElt(Fraction(-m.b, 2 * m.a), Fraction(1, 2 * m.a), D)
    one = QuadElt(1, 0, D)
    Zent = [z * z, z, one]  # (1,1), (1,2), (2,2) entries before the a/D factor

    def iota(s: QuadElt):
        ents = []
        for e in Zent:
            w = s.conj() * e
            ents.append(2 * w.x * Fraction(m.a, D))  # s^- Z + s Z^- = 2 Re(s^- Z)
        (p, r, t) = ents
        return L.coords(((p, r), (r, t)))

    a, b, c = m.a, m.b, m.c
    expected = {
        "a": ((Fraction(b * b - D, 2 * D), Fraction(-a * b, D)), (Fraction(-a * b, D), Fraction(2 * a * a, D))),
        "a z": ((Fraction(-b * c, D), Fraction(b * b + D, 2 * D)), (Fraction(b * b + D, 2 * D), Fraction(-a * b, D))),
        "a z^2": ((Fraction(2 * c * c, D), Fraction(-b * c, D)), (Fraction(-b * c, D), Fraction(b * b - D, 2 * D))),
    }
    for name, s in (("a", one * a), ("a z", z * a), ("a z^2", z * z * a)):
        x = iota(s)
        mat = L.matrix(x)
        if mat != expected[name]:
            raise IsometryCheckFailure(f"iota({name}) = {mat}, expected {expected[name]}")
        if not L.in_lattice(x) or L.bilinear(x, mc) != 0:
            raise IsometryCheckFailure(f"iota({name}) is not in L cap m^perp")
        if L.q(x) != s.norm():
            raise IsometryCheckFailure(f"iota is not isometric on {name}")
        data.images[name] = x
    return data


# ---------------------------------------------------------------------------
# splitting L'/L = M'/M + N'/N
# ---------------------------------------------------------------------------


def s_group() -> DiscriminantGroup:
    """M'/M for M = 2mZ: Z/2 with q(k) = -k^2/4."""
    return DiscriminantGroup.cyclic(2, Fraction(-1, 4), "S")


@dataclass
class SplitData:
    D: int
    m: MVector
    orth: OrthogonalData
    to_lambda: dict  # (kappa, nu) -> lambda
    nu_generator: tuple

    @property
    def product_group(self) -> DiscriminantGroup:
        return s_group() * norm_group(self.D)

    @property
    def l_group(self) -> DiscriminantGroup:
        return LatticeL(self.D).discriminant_group()

    def from_lambda(self, lam: int):
        inv = {v: k for k, v in self.to_lambda.items()}
        return inv[lam % (2 * self.D)]

    def embedding(self) -> Embedding:
        """Index-one embedding M + N = L seen as a relabelling of L'/L."""
        return Embedding(self.product_group, self.l_group, {k: (v,) for k, v in self.to_lambda.items()})


def split_data(m: MVector) -> SplitData:
    D = m.D
    L = LatticeL(D)
    orth = orthogonal_lattice(m)
    u, v = orth.basis
    (p, r), (_, s) = orth.gram
    det = p * s - r * r
    # N' = Gram^-1 Z^2 in the basis (u, v)
    inv = ((s / det, -r / det), (-r / det, p / det))
    gens = [
        tuple(inv[0][0] * ui + inv[1][0] * vi for ui, vi in zip(u, v)),
        tuple(inv[0][1] * ui + inv[1][1] * vi for ui, vi in zip(u, v)),
    ]
    target = Fraction(1, D)
    gen = None
    for g0 in gens:
        k = L.q(g0) * D
        if k.denominator != 1 or int(k) % D == 0:
            continue
        k = int(k) % D
        for t in range(1, D):
            if t * t * k % D == 1:
                gen = tuple(t * x for x in g0)
                break
        if gen:
            break
    if gen is None:
        raise IsometryCheckFailure("no generator of N'/N with q = 1/D")
    mc = m.coords
    to_lambda = {}
    for kappa in range(2):
        for nu in range(D):
            x = tuple(kappa * a + nu * b for a, b in zip(mc, gen))
            lam = L.dual_label(x)
            qval = Fraction(lam * lam, 4 * D) % 1
            if qval != (Fraction(-kappa * kappa, 4) + Fraction(nu * nu, D)) % 1:
                raise IsometryCheckFailure("splitting does not respect q")
            to_lambda[(kappa, nu)] = lam
    if len(set(to_lambda.values())) != 2 * D:
        raise IsometryCheckFailure("splitting map is not bijective")
    return SplitData(D, m, orth, to_lambda, gen)


# ---------------------------------------------------------------------------
# T_{L,N} and the preimage h
# ---------------------------------------------------------------------------


def theta_m_minus(P) -> VectorForm:
    """Theta_{M(-1)} = (theta_0, theta_1), transforming with the dual of rho_M."""
    t0, t1 = jacobi_thetas(P)
    return VectorForm(Fraction(1, 2), s_group(), {0: t0.series, 1: t1.series}, dual=True)


def to_product(f: VectorForm, S: SplitData) -> VectorForm:
    if f.group == S.product_group:
        return f
    if f.group != S.l_group:
        raise ValueError("form is neither on L'/L nor on M'/M + N'/N")
    return res_map(f, S.embedding())


def to_l_group(f: VectorForm, S: SplitData) -> VectorForm:
    if f.group == S.l_group:
        return f
    return tr_map(f, S.embedding())


def tln_map(f_L: VectorForm, S: SplitData) -> VectorForm:
    """g_nu = sum_kappa f_(kappa, nu) theta_kappa."""
    f = to_product(f_L, S)
    prec = f.precision
    P = 1 if prec is None else math.ceil(prec) + 1
    return tensor_pair(f, theta_m_minus(P), norm_group(S.D))


@dataclass
class Preimage:
    h: VectorForm  # over M'/M + N'/N, with T_{L,N}(h) = f
    corrections: dict  # s -> coefficient x_s of psi Theta~ j^e
    exponents: dict  # s -> power of j
    split: SplitData

    def integral_scale(self) -> int:
        """Smallest positive integer making every principal-part coefficient integral."""
        den = 1
        for s in self.h.components.values():
            for e, c in s.items():
                if e > 0:
                    break
                den = math.lcm(den, c.denominator)
        return den

    def b_table(self, scale: int | None = None) -> dict:
        """d -> b(-d) for the nonzero principal coefficients of scale * h (d = -4D * exponent)."""
        scale = self.integral_scale() if scale is None else scale
        D = self.split.D
        out = {}
        for key, s in self.h.components.items():
            for e, c in s.items():
                if e > 0:
                    break
                d = int(-e * 4 * D)
                val = c * scale
                if d in out and out[d] != val:
                    raise AssertionError(f"components disagree on b({-d})")
                out[d] = val
        return {d: (int(v) if v.denominator == 1 else v) for d, v in sorted(out.items()) if v}

    def on_l_group(self) -> VectorForm:
        return to_l_group(self.h, self.split)


def build_preimage(f: VectorForm, S: SplitData, P) -> Preimage:
    """h = phi (x) f / 12 - sum_s x_s psi (x) Theta~ j^((s^2 - t)/4 + 1), t = s mod 2.

    The x_s are fixed from the largest s down so that the coefficient of
    q^(-s^2/4) in component (s mod 2, 0) vanishes; T_{L,N} kills every
    correction because psi_0 theta_0 + psi_1 theta_1 = 0.
    """
    from .quadclass import class_group

    P = int(P)
    D = S.D
    if f[0].coefficient(0) != 0:
        raise ValueError("f must have zero constant term")
    low = min((s.valuation for s in f.components.values() if s.terms), default=Fraction(0))
    # phi_1 starts at q^(-1/4)
    lowest = low - Fraction(1, 4)
    s_max = 0
    while Fraction((s_max + 1) ** 2, 4) <= -lowest:
        s_max += 1
    extra = 2 + (s_max * s_max) // 4 + 1
    Pw = P + extra
    psi0, psi1, phi0, phi1 = weak_jacobi_components(Pw)
    Sg = s_group()
    phi = VectorForm(Fraction(-1, 2), Sg, {0: phi0.series, 1: phi1.series})
    psi = VectorForm(Fraction(-5, 2), Sg, {0: psi0.series, 1: psi1.series})
    f_ext = f
    if f.precision is not None and f.precision < P:
        raise ValueError(f"f is known only below q^{f.precision}, need q^{P}")
    h = outer_product(phi, f_ext).scale(Fraction(1, 12))
    G = class_group(D)
    tt = theta_tilde(G, Pw)
    _, _, j = delta_and_j(Pw)
    base = outer_product(psi, tt)
    corrections, exponents = {}, {}
    for s in range(s_max, 0, -1):
        t = s % 2
        e = (s * s - t) // 4 + 1
        g = base.times(j.series**e, 0)
        key = (t, 0)
        ex = Fraction(-s * s, 4)
        lead = g[key].coefficient(ex)
        if not lead:
            raise CorrectionSolveFailure(f"correction form for s={s} has vanishing leading coefficient")
        x = h[key].coefficient(ex) / lead
        corrections[s] = x
        exponents[s] = e
        if x:
            h = h - g.scale(x)
    avail = h.precision
    h = h.truncate(P if avail is None else min(P, avail))
    for s in range(1, s_max + 2):
        if h[(s % 2, 0)].coefficient(Fraction(-s * s, 4)) != 0:
            raise CorrectionSolveFailure(f"b(-{D * s * s}) is not zero")
    if h[(0, 0)].coefficient(0) != 0:
        raise CorrectionSolveFailure("constant term b(0) is not zero")
    return Preimage(h, corrections, exponents, S)


# ---------------------------------------------------------------------------
# scalar see-saw identity, evaluated termwise
# ---------------------------------------------------------------------------


def _short_vectors(H, bound: float):
    """Integer x with x^T H x <= bound for positive definite H (Fincke-Pohst)."""
    n = len(H)
    # Q(x) = sum_i d_i (x_i + sum_{j>i} u_ij x_j)^2
    Hm = [[float(H[i][j]) for j in range(n)] for i in range(n)]
    d = [0.0] * n
    u = [[0.0] * n for _ in range(n)]
    for i in range(n):
        d[i] = Hm[i][i] - sum(u[k][i] ** 2 * d[k] for k in range(i))
        for j in range(i + 1, n):
            u[i][j] = (Hm[i][j] - sum(u[k][i] * u[k][j] * d[k] for k in range(i))) / d[i]
    x = [0] * n

    def rec(i, remaining):
        if i < 0:
            yield tuple(x)
            return
        c = -sum(u[i][j] * x[j] for j in range(i + 1, n))
        r = math.sqrt(max(remaining, 0.0) / d[i])
        for xi in range(math.ceil(c - r), math.floor(c + r) + 1):
            x[i] = xi
            left = remaining - d[i] * (xi - c) ** 2
            if left >= -1e-12:
                yield from rec(i - 1, left)
        x[i] = 0

    yield from rec(n - 1, bound)


def _dual_vectors(S: SplitData, cutoff: float):
    """Elements of L' with majorant q(lambda_+) - q(lambda_-) <= cutoff, as
    (label, q_plus, q_minus) with exact rationals."""
    import numpy as np

    D = S.D
    L = LatticeL(D)
    mc = S.m.coords
    qm = L.q(mc)  # -1/4

    def vec(x):
        return (Fraction(x[0]), Fraction(x[1], 2 * D), Fraction(x[2]))

    def parts(lam):
        t = L.bilinear(lam, mc)
        q_minus = t * t / (4 * qm)
        return L.q(lam) - q_minus, q_minus

    def maj(x):
        qp, qn = parts(vec(x))
        return float(qp - qn)

    E = np.eye(3, dtype=int)
    H = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            H[i, j] = (maj(E[i] + E[j]) - maj(E[i]) - maj(E[j])) / 2
    out = []
    for x in _short_vectors(H, cutoff * (1 + 1e-9) + 1e-9):
        lam = vec(x)
        qp, qn = parts(lam)
        if qp - qn <= cutoff:
            out.append((L.dual_label(lam), qp, qn))
    return out


def seesaw_scalar_sides(pre: Preimage, tau, digits: int = 30, g: VectorForm | None = None):
    """(<h_L, conj Theta_L(tau, v+)>, <T_{L,N}(h), conj Theta_N(tau)>) for v+ = m^perp.

    Theta_L(tau, v+) = sum_{lambda in L'} e(tau q(lambda_+) + conj(tau) q(lambda_-)) e_lambda
    and Theta_N is the holomorphic theta series of N' = L' cap m^perp.
    ``g`` replaces T_{L,N}(h) on the right-hand side when given.
    """
    import mpmath

    S = pre.split
    hL = pre.on_l_group()
    g = tln_map(pre.h, S) if g is None else g
    tau = mpmath.mpc(tau)
    y = float(tau.imag)
    low = min(float(e) for s in hL.components.values() for e, c in s.items() if c)
    cutoff = -low + (digits + 6) * math.log(10) / (2 * math.pi * y)
    two_pi_i = 2j * mpmath.pi
    thL, thN = {}, {}
    for lam, qp, qn in _dual_vectors(S, cutoff):
        qpf = mpmath.mpf(qp.numerator) / qp.denominator
        qnf = mpmath.mpf(qn.numerator) / qn.denominator
        # conj of e(tau q+ + conj(tau) q-)
        term = mpmath.exp(-two_pi_i * (mpmath.conj(tau) * qpf + tau * qnf))
        thL[lam] = thL.get(lam, 0) + term
        if qn == 0:
            thN[lam] = thN.get(lam, 0) + mpmath.conj(term)
    lhs = mpmath.mpc(0)
    for key, s in hL.components.items():
        lhs += s.evaluate(tau) * thL.get(key[0], 0)
    inv = {lam: k for k, lam in S.to_lambda.items()}
    rhs = mpmath.mpc(0)
    for lam, val in thN.items():
        kappa, nu = inv[lam]
        if kappa:
            raise AssertionError("an element of N' has nonzero M' part")
        if (nu,) in g.components:
            rhs += g[(nu,)].evaluate(tau) * mpmath.conj(val)
    return lhs, rhs

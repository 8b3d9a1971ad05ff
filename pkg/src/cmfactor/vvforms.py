"""Vector-valued modular forms for Weil representations of finite quadratic modules."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .quadclass import ClassGroup, IdealClass, rep_table
from .series import PrecisionBudget, QExpansion


class SignatureMismatch(ValueError):
    pass


class InsufficientPrecision(ValueError):
    pass


class IncompatibleLattices(ValueError):
    pass


class GroupMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# finite quadratic modules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiscriminantGroup:
    """Orthogonal sum of cyclic groups Z/n_i with q(x) = sum c_i x_i^2 mod 1.

    Elements are tuples of residues.  For a single cyclic factor an int is
    accepted wherever an element is expected.
    """

    orders: tuple
    coeffs: tuple
    name: str = ""

    def __post_init__(self):
        for n, c in zip(self.orders, self.coeffs):
            c = Fraction(c)
            # q must be well defined on Z/n: c (x + n)^2 - c x^2 in Z
            if (c * 2 * n).denominator != 1 or (c * n * n).denominator != 1:
                raise ValueError(f"q(x) = {c} x^2 is not well defined modulo {n}")

    @classmethod
    def cyclic(cls, n: int, c, name: str = "") -> "DiscriminantGroup":
        return cls((n,), (Fraction(c),), name)

    @property
    def order(self) -> int:
        return math.prod(self.orders)

    @property
    def rank(self) -> int:
        return len(self.orders)

    def normalize(self, x) -> tuple:
        if isinstance(x, int):
            x = (x,)
        if len(x) != len(self.orders):
            raise GroupMismatch(f"{x} is not an element of {self}")
        return tuple(int(v) % n for v, n in zip(x, self.orders))

    def elements(self):
        return [tuple(e) for e in itertools.product(*(range(n) for n in self.orders))]

    def q(self, x) -> Fraction:
        x = self.normalize(x)
        v = sum(Fraction(c) * xi * xi for c, xi in zip(self.coeffs, x))
        return v - math.floor(v)

    def bilinear(self, x, y) -> Fraction:
        """(x, y) = q(x + y) - q(x) - q(y) mod 1."""
        x, y = self.normalize(x), self.normalize(y)
        v = sum(2 * Fraction(c) * a * b for c, a, b in zip(self.coeffs, x, y))
        return v - math.floor(v)

    def neg(self, x) -> tuple:
        return self.normalize(tuple(-v for v in self.normalize(x)))

    def add(self, x, y) -> tuple:
        x, y = self.normalize(x), self.normalize(y)
        return self.normalize(tuple(a + b for a, b in zip(x, y)))

    def level(self) -> int:
        """Smallest N with N q(x) in Z for all x."""
        N = 1
        for c, n in zip(self.coeffs, self.orders):
            for x in range(n):
                v = Fraction(c) * x * x
                N = N * v.denominator // math.gcd(N, v.denominator)
        return N

    def dual(self) -> "DiscriminantGroup":
        return DiscriminantGroup(self.orders, tuple(-Fraction(c) for c in self.coeffs), self.name + "(-1)")

    def __mul__(self, other: "DiscriminantGroup") -> "DiscriminantGroup":
        name = f"{self.name}+{other.name}" if self.name or other.name else ""
        return DiscriminantGroup(self.orders + other.orders, self.coeffs + other.coeffs, name)

    def gauss_sum(self) -> complex:
        return sum(complex(mpmath.expjpi(2 * self.q(x))) for x in self.elements())


TRIVIAL_GROUP = DiscriminantGroup((), (), "0")


# ---------------------------------------------------------------------------
# vector-valued forms
# ---------------------------------------------------------------------------


@dataclass
class VectorForm:
    weight: Fraction
    group: DiscriminantGroup
    components: dict
    dual: bool = False

    def __post_init__(self):
        self.weight = Fraction(self.weight)
        comps = {}
        for k, v in self.components.items():
            comps[self.group.normalize(k)] = v
        self.components = comps

    def __getitem__(self, x) -> QExpansion:
        x = self.group.normalize(x)
        c = self.components.get(x)
        if c is None:
            return QExpansion({}, 1, self.precision_units(1))
        return c

    def precision_units(self, M):
        precs = [c.precision for c in self.components.values()]
        if not precs or any(p is None for p in precs):
            return None
        return int(min(precs) * M)

    @property
    def precision(self):
        """Smallest component precision as a rational exponent."""
        precs = [c.precision for c in self.components.values() if c.precision is not None]
        return min(precs) if precs else None

    def keys(self):
        return sorted(self.components)

    def map(self, fn) -> "VectorForm":
        return VectorForm(self.weight, self.group, {k: fn(v) for k, v in self.components.items()}, self.dual)

    def __add__(self, other: "VectorForm") -> "VectorForm":
        self._compatible(other)
        out = dict(self.components)
        for k, v in other.components.items():
            out[k] = out[k] + v if k in out else v
        return VectorForm(self.weight, self.group, out, self.dual)

    def __neg__(self):
        return self.map(lambda s: -s)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "VectorForm":
        return self.map(lambda s: s.scale(c))

    def times(self, s: QExpansion, weight) -> "VectorForm":
        """Multiply every component by the scalar series ``s`` of weight ``weight``."""
        return VectorForm(self.weight + Fraction(weight), self.group,
                          {k: v * s for k, v in self.components.items()}, self.dual)

    def truncate(self, prec) -> "VectorForm":
        return self.map(lambda s: s.truncate(prec))

    def _compatible(self, other):
        if self.group != other.group or self.dual != other.dual:
            raise GroupMismatch("forms live on different discriminant groups")
        if self.weight != other.weight:
            raise ValueError(f"weights differ: {self.weight} vs {other.weight}")

    def equal_to_precision(self, other, prec) -> bool:
        for k in set(self.components) | set(other.components):
            if self[k].truncate(prec) != other[k].truncate(prec):
                return False
        return True

    def check_support(self) -> None:
        """Component x is supported on exponents = +-q(x) mod 1 (sign from the dual flag)."""
        for k, s in self.components.items():
            target = self.group.q(k)
            if self.dual:
                target = (-target) % 1
            for e, _ in s.items():
                if (e - target) % 1:
                    raise AssertionError(f"component {k} has exponent {e}, expected {target} mod 1")

    def is_symmetric(self) -> bool:
        for k in self.components:
            nk = self.group.neg(k)
            if self[k] != self[nk]:
                return False
        return True

    def evaluate(self, tau) -> dict:
        return {k: v.evaluate(tau) for k, v in self.components.items()}

    def to_json(self) -> dict:
        return {
            "weight": str(self.weight),
            "group": {"orders": list(self.group.orders), "coeffs": [str(c) for c in self.group.coeffs],
                      "name": self.group.name},
            "dual": self.dual,
            "components": [[list(k), v.to_json()] for k, v in sorted(self.components.items())],
        }

    @classmethod
    def from_json(cls, obj) -> "VectorForm":
        g = obj["group"]
        G = DiscriminantGroup(tuple(g["orders"]), tuple(Fraction(c) for c in g["coeffs"]), g["name"])
        comps = {tuple(k): QExpansion.from_json(v) for k, v in obj["components"]}
        return cls(Fraction(obj["weight"]), G, comps, obj["dual"])


def outer_product(f: VectorForm, g: VectorForm) -> VectorForm:
    """Tensor product f (x) g on the orthogonal sum of the two groups."""
    G = f.group * g.group
    comps = {}
    for a, fa in f.components.items():
        for b, gb in g.components.items():
            comps[a + b] = fa * gb
    return VectorForm(f.weight + g.weight, G, comps, f.dual)


def scalar_form(s: QExpansion, weight) -> VectorForm:
    return VectorForm(weight, TRIVIAL_GROUP, {(): s})


# ---------------------------------------------------------------------------
# theta series of class-group lattices
# ---------------------------------------------------------------------------


def norm_group(D: int) -> DiscriminantGroup:
    """N'/N for the rank-2 class lattice: Z/D with q(nu) = nu^2 / D."""
    return DiscriminantGroup.cyclic(D, Fraction(1, D), f"N{D}")


def theta_series(G: ClassGroup, B: IdealClass, P: PrecisionBudget | int) -> VectorForm:
    """Weight-one theta series of the class B, known below q^P."""
    D = G.D
    if D < 7:
        raise ValueError("theta series need D >= 7")
    P = P.terms if isinstance(P, PrecisionBudget) else int(P)
    T = P * D - 1
    r = rep_table(G, B, T)
    comps = {nu: {} for nu in range(D)}
    for t in range(1, T + 1):
        if r[t]:
            nu2 = t % D
            for nu in range(D):
                if nu * nu % D == nu2:
                    comps[nu][t] = r[t] * (2 if nu == 0 else 1)
    comps[0][0] = 1
    Gq = norm_group(D)
    return VectorForm(1, Gq, {(nu,): QExpansion(c, D, P * D) for nu, c in comps.items()})


# ---------------------------------------------------------------------------
# Weil representation with exact cyclotomic entries
# ---------------------------------------------------------------------------


def cyclotomic_reduction_matrix(N: int) -> np.ndarray:
    """Matrix sending coefficient vectors in Z[x]/(x^N - 1) to Z[x]/(Phi_N)."""
    import sympy

    x = sympy.Symbol("x")
    phi = sympy.Poly(sympy.cyclotomic_poly(N, x), x)
    deg = phi.degree()
    coeffs = [int(c) for c in reversed(phi.all_coeffs())]  # low to high, monic
    rows = []
    cur = [0] * deg
    cur[0] = 1 if deg else 0
    for k in range(N):
        rows.append(list(cur))
        # multiply by x modulo phi
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * coeffs[i] for i, c in enumerate(cur)]
    return np.array(rows, dtype=object)


@dataclass
class WeilRep:
    """rho(T) and rho(S) for a discriminant group of signature b+ - b-.

    Exponents are stored as integers modulo N = lcm(8, level); an entry k
    stands for exp(2 pi i k / N).  rho(S) = i^((b- - b+)/2) |G|^(-1/2) F with
    F[mu][nu] = e(-(mu, nu)).
    """

    group: DiscriminantGroup
    signature: tuple
    N: int = 0
    elements: list = field(default_factory=list)
    t_exp: np.ndarray = None
    f_exp: np.ndarray = None
    dual: bool = False

    def __post_init__(self):
        self.N = math.lcm(8, self.group.level(), *[n for n in self.group.orders] or [1])
        # the bilinear form has denominators dividing the group exponent times 2
        self.N = math.lcm(self.N, 2 * max([1] + [n for n in self.group.orders]))
        self.elements = self.group.elements()
        n = len(self.elements)
        N = self.N
        self.t_exp = np.array([int(self.group.q(x) * N) % N for x in self.elements], dtype=np.int64)
        F = np.zeros((n, n), dtype=np.int64)
        for i, mu in enumerate(self.elements):
            for j, nu in enumerate(self.elements):
                b = self.group.bilinear(mu, nu) * N
                if b.denominator != 1:
                    raise ValueError("cyclotomic order too small for the bilinear form")
                F[i, j] = (-int(b)) % N
        self.f_exp = F
        self._check_signature()

    @property
    def sig(self) -> int:
        return (self.signature[0] - self.signature[1]) % 8

    def _check_signature(self):
        g = self.group.gauss_sum()
        expected = math.sqrt(self.group.order) * complex(mpmath.expjpi(Fraction(self.sig, 4)))
        if abs(g - expected) > 1e-9 * max(1.0, abs(expected)):
            raise SignatureMismatch(
                f"Gauss sum {g:.6f} does not match signature {self.signature} (expected {expected:.6f})")

    def conjugate(self) -> "WeilRep":
        W = WeilRep.__new__(WeilRep)
        W.group, W.signature, W.N, W.elements = self.group, self.signature, self.N, self.elements
        W.t_exp = (-self.t_exp) % self.N
        W.f_exp = (-self.f_exp) % self.N
        W.dual = not self.dual
        return W

    def _s_phase(self) -> Fraction:
        """Phase of the scalar i^((b- - b+)/2) as a fraction of a full turn (conjugated if dual)."""
        ph = Fraction(self.signature[1] - self.signature[0], 8)
        return -ph if self.dual else ph

    # -- exact group-ring arithmetic ----------------------------------
    def _monomial_matrix(self, exps: np.ndarray) -> np.ndarray:
        n = exps.shape[0]
        out = np.zeros((n, n, self.N), dtype=np.int64)
        idx = np.arange(n)
        for i in range(n):
            out[i, idx, exps[i]] = 1
        return out

    def _mul_monomial(self, A: np.ndarray, exps: np.ndarray) -> np.ndarray:
        """A @ B where B[k, j] = zeta^exps[k, j]."""
        n = A.shape[0]
        C = np.zeros_like(A)
        for k in range(n):
            col = A[:, k, :]
            for j in range(n):
                C[:, j, :] += np.roll(col, exps[k, j], axis=1)
        return C

    def _mul_diag(self, A: np.ndarray, exps: np.ndarray) -> np.ndarray:
        C = np.empty_like(A)
        for j in range(A.shape[1]):
            C[:, j, :] = np.roll(A[:, j, :], exps[j], axis=1)
        return C

    def _times_element(self, A: np.ndarray, elem: np.ndarray) -> np.ndarray:
        out = np.zeros_like(A)
        for k in np.nonzero(elem)[0]:
            out += elem[k] * np.roll(A, int(k), axis=2)
        return out

    def braid_relation(self) -> bool:
        """Exact check of rho(S)^2 = rho((ST)^3) in Z[zeta_N] / Phi_N.

        With rho(S) = s F we need s F T F T F T = F F, i.e.
        i^((b- - b+)/2) X = sqrt|G| Y and sqrt|G| = gauss * zeta_8^(-sig).
        """
        N = self.N
        n = len(self.elements)
        t = self.t_exp
        X = self._monomial_matrix(self.f_exp)
        X = self._mul_diag(X, t)
        X = self._mul_monomial(X, self.f_exp)
        X = self._mul_diag(X, t)
        X = self._mul_monomial(X, self.f_exp)
        X = self._mul_diag(X, t)
        Y = self._mul_monomial(self._monomial_matrix(self.f_exp), self.f_exp)
        # left: phase times X
        phase = self._s_phase() * N
        X = np.roll(X, int(phase) % N, axis=2)
        gauss = np.zeros(N, dtype=np.int64)
        sign = -1 if self.dual else 1
        for x in self.elements:
            gauss[(sign * int(self.group.q(x) * N)) % N] += 1
        Y = self._times_element(Y, gauss)
        shift = (-sign * self.sig * N // 8) % N
        Y = np.roll(Y, shift, axis=2)
        R = cyclotomic_reduction_matrix(N)
        diff = (X - Y).reshape(n * n, N).astype(object)
        return not np.any(diff.dot(R))

    def z_action(self) -> bool:
        """rho(S)^2 e_nu = i^(b- - b+) e_(-nu), checked exactly."""
        N = self.N
        Y = self._mul_monomial(self._monomial_matrix(self.f_exp), self.f_exp)
        R = cyclotomic_reduction_matrix(N)
        n = len(self.elements)
        order = self.group.order
        index = {x: i for i, x in enumerate(self.elements)}
        expected = np.zeros_like(Y)
        for i, mu in enumerate(self.elements):
            expected[i, index[self.group.neg(mu)], 0] = order
        # s^2 = i^(b- - b+) / |G|; compare |G| * rho(S)^2 = i^(..) F^2 against i^(..) |G| delta
        diff = (Y - expected).reshape(n * n, N).astype(object)
        return not np.any(diff.dot(R))

    # -- numerics -----------------------------------------------------
    def T_matrix(self):
        return [mpmath.expjpi(Fraction(2 * int(k), self.N)) for k in self.t_exp]

    def S_matrix(self):
        n = len(self.elements)
        scale = mpmath.expjpi(2 * self._s_phase()) / mpmath.sqrt(self.group.order)
        table = [mpmath.expjpi(Fraction(2 * k, self.N)) for k in range(self.N)]
        return mpmath.matrix([[scale * table[int(self.f_exp[i, j])] for j in range(n)] for i in range(n)])

    def unitarity_defect(self) -> float:
        S = self.S_matrix()
        n = S.rows
        I = S * S.H
        return max(abs(I[i, j] - (1 if i == j else 0)) for i in range(n) for j in range(n))


def weil_rep(G: DiscriminantGroup, sig: tuple, dual: bool = False) -> WeilRep:
    W = WeilRep(G, tuple(sig))
    return W.conjugate() if dual else W


def modularity_check(f: VectorForm, W: WeilRep, samples, min_tail_digits: int = 25) -> mpmath.mpf:
    """max |f(gamma tau) - j(gamma, tau) rho(gamma) f(tau)| over gamma in {T, S}."""
    if f.group != W.group:
        raise GroupMismatch("form and representation use different groups")
    elems = W.elements
    if not f.components:
        return mpmath.mpf(0)
    worst = mpmath.mpf(0)
    k = f.weight
    S = W.S_matrix()
    T = W.T_matrix()
    for tau in samples:
        tau = mpmath.mpc(tau)
        for point in (tau, -1 / tau, tau + 1):
            y = float(mpmath.im(point))
            for s in f.components.values():
                if s.tail_bound(y) > -min_tail_digits:
                    raise InsufficientPrecision(f"series too short for Im tau = {y:.3f}")
        v = [f[x].evaluate(tau) for x in elems]
        vS = [f[x].evaluate(-1 / tau) for x in elems]
        vT = [f[x].evaluate(tau + 1) for x in elems]
        factor = mpmath.sqrt(tau) ** int(2 * k)
        for i in range(len(elems)):
            worst = max(worst, abs(vT[i] - T[i] * v[i]))
            acc = mpmath.mpc(0)
            for j in range(len(elems)):
                if v[j]:
                    acc += S[i, j] * v[j]
            worst = max(worst, abs(vS[i] - factor * acc))
    return worst


# ---------------------------------------------------------------------------
# restriction, trace and tensor pairing
# ---------------------------------------------------------------------------


@dataclass
class Embedding:
    """Sublattice M of L seen through discriminant groups.

    ``big`` is M'/M, ``small`` is L'/L, and ``proj`` sends each element of
    L'/M (a subgroup of M'/M) to its image in L'/L.
    """

    big: DiscriminantGroup
    small: DiscriminantGroup
    proj: dict

    def __post_init__(self):
        self.proj = {self.big.normalize(k): self.small.normalize(v) for k, v in self.proj.items()}
        for mu, lam in self.proj.items():
            if self.big.q(mu) != self.small.q(lam):
                raise IncompatibleLattices(f"q({mu}) != q({lam})")
        if len(self.proj) * 1 != self.index * self.small.order:
            raise IncompatibleLattices("fibres of L'/M -> L'/L have unequal sizes")

    @property
    def index(self) -> int:
        """|L/M|, read off from |M'/M| = |L/M|^2 |L'/L|."""
        r = self.big.order // self.small.order
        s = math.isqrt(r)
        if s * s != r:
            raise IncompatibleLattices("|M'/M| / |L'/L| is not a square")
        return s

    @classmethod
    def identity(cls, G: DiscriminantGroup) -> "Embedding":
        return cls(G, G, {x: x for x in G.elements()})


def res_map(f: VectorForm, E: Embedding) -> VectorForm:
    if f.group != E.small:
        raise IncompatibleLattices("form is not on L'/L of this embedding")
    comps = {mu: f[lam] for mu, lam in E.proj.items() if lam in f.components}
    return VectorForm(f.weight, E.big, comps, f.dual)


def tr_map(g: VectorForm, E: Embedding) -> VectorForm:
    if g.group != E.big:
        raise IncompatibleLattices("form is not on M'/M of this embedding")
    comps = {}
    for mu, lam in E.proj.items():
        if mu in g.components:
            comps[lam] = comps[lam] + g[mu] if lam in comps else g[mu]
    return VectorForm(g.weight, E.small, comps, g.dual)


def tensor_pair(f: VectorForm, g: VectorForm, n_group: DiscriminantGroup) -> VectorForm:
    """h_nu = sum_mu f_(mu, nu) g_mu where f lives on (M'/M) + (N'/N) and g on M'/M."""
    Mg = g.group
    if f.group != Mg * n_group:
        raise GroupMismatch("f's group is not the orthogonal sum of g's group and N'/N")
    if Mg.rank and g.dual == f.dual:
        raise GroupMismatch("g must transform with the dual representation")
    r = Mg.rank
    comps = {}
    for key, fs in f.components.items():
        mu, nu = key[:r], key[r:]
        if mu not in g.components:
            continue
        term = fs * g.components[mu]
        comps[nu] = comps[nu] + term if nu in comps else term
    return VectorForm(f.weight + g.weight, n_group, comps, f.dual)

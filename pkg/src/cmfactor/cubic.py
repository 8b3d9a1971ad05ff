"""Exact arithmetic in Z[rho], rho^3 = rho + 1, and factorization over a fixed prime basis."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath


class UnfactoredResidue(ArithmeticError):
    pass


def _mat_mul(x):
    """Matrix of multiplication by x in the basis (1, rho, rho^2), acting on column vectors."""
    a, b, c = x
    # x * 1 = (a, b, c); x * rho = (c, a + c, b); x * rho^2 = (b, b + c, a + c)
    return ((a, c, b), (b, a + c, b + c), (c, b, a + c))


@dataclass(frozen=True)
class CubicInteger:
    """x + y rho + z rho^2 with rho^3 = rho + 1."""

    x: int
    y: int
    z: int

    @classmethod
    def of(cls, v) -> "CubicInteger":
        if isinstance(v, CubicInteger):
            return v
        return cls(int(v), 0, 0)

    @property
    def coords(self):
        return (self.x, self.y, self.z)

    def __add__(self, o):
        o = CubicInteger.of(o)
        return CubicInteger(self.x + o.x, self.y + o.y, self.z + o.z)

    __radd__ = __add__

    def __neg__(self):
        return CubicInteger(-self.x, -self.y, -self.z)

    def __sub__(self, o):
        return self + (-CubicInteger.of(o))

    def __rsub__(self, o):
        return CubicInteger.of(o) - self

    def __mul__(self, o):
        o = CubicInteger.of(o)
        M = _mat_mul(self.coords)
        v = o.coords
        return CubicInteger(*(sum(M[i][j] * v[j] for j in range(3)) for i in range(3)))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            inv = self.inverse_unit()
            return inv ** (-k)
        r, b = ONE, self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def norm(self) -> int:
        M = _mat_mul(self.coords)
        return (
            M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
            - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
            + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0])
        )

    def divide(self, o) -> "CubicInteger | None":
        """Exact quotient self / o in Z[rho], or None if it is not integral."""
        o = CubicInteger.of(o)
        q = _solve(_mat_mul(o.coords), self.coords)
        if q is None or any(v.denominator != 1 for v in q):
            return None
        return CubicInteger(*(int(v) for v in q))

    def divisible_by(self, o) -> bool:
        return self.divide(o) is not None

    def inverse_unit(self) -> "CubicInteger":
        q = ONE.divide(self)
        if q is None:
            raise ArithmeticError(f"{self} is not a unit")
        return q

    def real(self, prec_bits: int = 128):
        with mpmath.workprec(prec_bits):
            r = rho_real(prec_bits)
            return self.x + self.y * r + self.z * r * r

    def is_zero(self) -> bool:
        return self.coords == (0, 0, 0)

    def __str__(self):
        return f"{self.x}{self.y:+d}*rho{self.z:+d}*rho^2"


ONE = CubicInteger(1, 0, 0)
RHO = CubicInteger(0, 1, 0)


def _solve(M, v):
    """Solve M q = v over Q by Cramer's rule; None if singular."""
    def det(A):
        return (
            A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1])
            - A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0])
            + A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0])
        )

    d = det(M)
    if d == 0:
        return None
    out = []
    for k in range(3):
        A = [list(row) for row in M]
        for i in range(3):
            A[i][k] = v[i]
        out.append(Fraction(det(A), d))
    return out


def rho_real(prec_bits: int = 128):
    with mpmath.workprec(prec_bits + 10):
        return mpmath.findroot(lambda t: t**3 - t - 1, mpmath.mpf("1.3247179572447460"))


def horner(coeffs, x: CubicInteger) -> CubicInteger:
    """Evaluate sum coeffs[i] X^i (lowest degree first) at x."""
    acc = CubicInteger(0, 0, 0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


# ---------------------------------------------------------------------------
# prime ideals and valuations
# ---------------------------------------------------------------------------


def _poly_mod(a, p):
    a = [c % p for c in a]
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_divmod(a, b, p):
    a = _poly_mod(a, p)
    b = _poly_mod(b, p)
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        c = a[-1] * inv % p
        q[k] = c
        for i, bc in enumerate(b):
            a[i + k] = (a[i + k] - c * bc) % p
        a = _poly_mod(a, p)
    return _poly_mod(q, p), a


def _poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return _poly_mod(out, p)


MINPOLY = [-1, -1, 0, 1]  # X^3 - X - 1


def _factor_minpoly(p: int):
    """Monic irreducible factors of X^3 - X - 1 mod p with multiplicity (degree <= 3)."""
    f = _poly_mod(MINPOLY, p)
    roots = [r for r in range(p) if (r**3 - r - 1) % p == 0]
    out = []
    for r in roots:
        lin = [(-r) % p, 1]
        e = 0
        while True:
            q, rem = _poly_divmod(f, lin, p)
            if rem:
                break
            f, e = q, e + 1
        out.append((lin, e))
    if len(f) > 1:
        out.append((f, 1))
    return out


@dataclass(frozen=True)
class PrimeIdeal:
    """(p, g(rho)) for a monic irreducible factor g of X^3 - X - 1 mod p."""

    p: int
    g: tuple  # lowest degree first
    e: int  # ramification index
    tau: CubicInteger | None  # product of the other factors, for unramified p

    @property
    def f(self) -> int:
        return len(self.g) - 1

    @property
    def norm(self) -> int:
        return self.p**self.f

    def contains(self, x: CubicInteger) -> bool:
        """Membership for a degree-one prime: x(r) = 0 mod p where g = X - r."""
        if self.f != 1:
            raise NotImplementedError("membership test is only used for degree-one primes")
        r = -self.g[0] % self.p
        return (x.x + x.y * r + x.z * r * r) % self.p == 0


def prime_ideals(p: int) -> list[PrimeIdeal]:
    facs = _factor_minpoly(p)
    ramified = any(e > 1 for _, e in facs)
    out = []
    for g, e in facs:
        tau = None
        if not ramified:
            t = [1]
            for g2, _ in facs:
                if g2 != g:
                    t = _poly_mul(t, g2, p)
            tau = horner(t, RHO)
        out.append(PrimeIdeal(p, tuple(g), e, tau))
    return out


_RAMIFIED_GENERATORS: dict = {}


def _ramified_generator(P: PrimeIdeal) -> CubicInteger:
    key = (P.p, P.g)
    if key not in _RAMIFIED_GENERATORS:
        best = None
        B = 6
        for x in range(-B, B + 1):
            for y in range(-B, B + 1):
                for z in range(-B, B + 1):
                    c = CubicInteger(x, y, z)
                    if abs(c.norm()) == P.p and P.contains(c):
                        size = abs(x) + abs(y) + abs(z)
                        if best is None or size < best[0]:
                            best = (size, c)
        if best is None:
            raise UnfactoredResidue(f"no generator found for a ramified prime over {P.p}")
        _RAMIFIED_GENERATORS[key] = best[1]
    return _RAMIFIED_GENERATORS[key]


def valuation(x: CubicInteger, P: PrimeIdeal) -> int:
    """v_P(x) for x != 0."""
    if x.is_zero():
        raise ValueError("valuation of zero")
    v = 0
    if P.tau is None:
        gen = _ramified_generator(P)
        while True:
            y = x.divide(gen)
            if y is None:
                return v
            x, v = y, v + 1
    # x in P iff x tau in pO, since tau lies in every other prime over p but not in P
    while True:
        y = x * P.tau
        if all(c % P.p == 0 for c in y.coords):
            x = CubicInteger(*(c // P.p for c in y.coords))
            v += 1
        else:
            return v


def _int_factor(n: int) -> dict:
    n = abs(n)
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def find_generator(P: PrimeIdeal, bound: int = 8) -> CubicInteger:
    """Small element generating P (the ring has class number one)."""
    if P.tau is None:
        return _ramified_generator(P)
    target = P.norm
    best = None
    for x in range(-bound, bound + 1):
        for y in range(-bound, bound + 1):
            for z in range(-bound, bound + 1):
                c = CubicInteger(x, y, z)
                if abs(c.norm()) != target:
                    continue
                if valuation(c, P) == 1:
                    size = abs(x) + abs(y) + abs(z)
                    if best is None or size < best[0]:
                        best = (size, c)
    if best is None:
        raise UnfactoredResidue(f"no generator of norm {target} found for the prime over {P.p}")
    return best[1]


# ---------------------------------------------------------------------------
# the fixed basis
# ---------------------------------------------------------------------------


BASIS_ELEMENTS = {
    "pi5": CubicInteger(2, -1, 0),
    "pi7": CubicInteger(2, 1, 0),
    "pi11": CubicInteger(-1, 2, 0),
    "pi17": CubicInteger(2, 3, 0),
    "pi19": CubicInteger(1, 3, 0),
    "varpi23": CubicInteger(3, -1, 0),
    "pi25": CubicInteger(1, -1, 2),
    "pi49": CubicInteger(3, -2, 1),
}
BASIS_NORMS = {"pi5": 5, "pi7": 7, "pi11": 11, "pi17": 17, "pi19": 19, "varpi23": 23, "pi25": 25, "pi49": 49}


@dataclass
class PiBasis:
    elements: dict
    extra: dict  # names of primes found on demand -> generator

    @classmethod
    def default(cls) -> "PiBasis":
        for name, el in BASIS_ELEMENTS.items():
            if abs(el.norm()) != BASIS_NORMS[name]:
                raise AssertionError(f"norm of {name} is {el.norm()}, expected {BASIS_NORMS[name]}")
        check_fundamental_unit()
        return cls(dict(BASIS_ELEMENTS), {})

    def all(self) -> dict:
        d = dict(self.elements)
        d.update(self.extra)
        return d

    def lookup(self, P: PrimeIdeal) -> str | None:
        for name, el in self.all().items():
            if abs(el.norm()) == P.norm and valuation(el, P) == 1:
                return name
        return None

    def name_for(self, P: PrimeIdeal) -> str:
        name = self.lookup(P)
        if name is not None:
            return name
        gen = find_generator(P)
        name = f"P{P.p}" + (f"^{P.f}" if P.f > 1 else "") + ("" if P.e == 1 else "r")
        k = 2
        base = name
        while name in self.extra:
            name = f"{base}_{k}"
            k += 1
        self.extra[name] = gen
        return name


def check_fundamental_unit() -> None:
    """rho is a unit, and no unit lies strictly between 1 and rho.

    A unit u > 1 of Z[rho] with complex conjugate embeddings of modulus u^(-1/2)
    has |disc(1, u, u^2)| = 23 r^2 bounded in terms of u; for 1 < u < rho the
    coordinates are bounded by 3 and a finite scan excludes them.
    """
    if RHO.norm() != 1:
        raise AssertionError("rho is not a unit")
    r = rho_real(64)
    for x in range(-3, 4):
        for y in range(-3, 4):
            for z in range(-3, 4):
                c = CubicInteger(x, y, z)
                if abs(c.norm()) == 1:
                    v = abs(c.real(64))
                    if 1 + 1e-12 < v < r - 1e-12:
                        raise AssertionError(f"{c} is a smaller unit than rho")


@dataclass
class Factorization:
    exponents: dict  # basis name -> exponent
    unit_exponent: int
    sign: int

    def merge(self, other: "Factorization", k: int = 1) -> "Factorization":
        ex = dict(self.exponents)
        for n, e in other.exponents.items():
            ex[n] = ex.get(n, 0) + k * e
        ex = {n: e for n, e in ex.items() if e}
        return Factorization(ex, self.unit_exponent + k * other.unit_exponent, self.sign * other.sign ** abs(k))

    def value(self, basis: PiBasis) -> CubicInteger:
        """Reassemble the element (only for nonnegative basis exponents)."""
        v = ONE if self.sign > 0 else -ONE
        els = basis.all()
        for n, e in self.exponents.items():
            if e < 0:
                raise ValueError("negative exponent")
            v = v * els[n] ** e
        return v * RHO**self.unit_exponent

    def log_abs(self, basis: PiBasis, prec_bits: int = 128):
        with mpmath.workprec(prec_bits):
            s = self.unit_exponent * mpmath.log(rho_real(prec_bits))
            els = basis.all()
            for n, e in self.exponents.items():
                s += e * mpmath.log(abs(els[n].real(prec_bits)))
            return s


def factor_in_pibasis(v: CubicInteger, basis: PiBasis | None = None) -> Factorization:
    """v = sign * prod pi^e * rho^k exactly."""
    basis = basis or PiBasis.default()
    if v.is_zero():
        raise ValueError("cannot factor zero")
    N = v.norm()
    exps = {}
    x = v
    for p in sorted(_int_factor(N)):
        for P in prime_ideals(p):
            e = valuation(x, P)
            if not e:
                continue
            name = basis.name_for(P)
            gen = basis.all()[name]
            for _ in range(e):
                y = x.divide(gen)
                if y is None:
                    raise UnfactoredResidue(f"{name} does not divide the residue")
                x = y
            exps[name] = exps.get(name, 0) + e
    if abs(x.norm()) != 1:
        raise UnfactoredResidue(f"residue {x} has norm {x.norm()}")
    # unit: x = +- rho^k, with k from the real embedding, then checked exactly
    with mpmath.workprec(128):
        k = int(mpmath.nint(mpmath.log(abs(x.real(128))) / mpmath.log(rho_real(128))))
    u = RHO**k
    if x == u:
        sign = 1
    elif x == -u:
        sign = -1
    else:
        raise UnfactoredResidue(f"unit residue {x} is not +-rho^{k}")
    return Factorization(exps, k, sign)

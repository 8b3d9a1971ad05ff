"""Binary quadratic forms, class groups of Q(sqrt(-D)) and representation numbers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache


class InvalidDiscriminant(ValueError):
    pass


class ClassNotInGroup(KeyError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def xgcd(a: int, b: int):
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


@dataclass(frozen=True, order=True)
class QuadForm:
    """a x^2 + b x y + c y^2."""

    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def content(self) -> int:
        return math.gcd(math.gcd(self.a, self.b), self.c)

    def act(self, m) -> "QuadForm":
        """Right action Q o gamma for gamma = ((p, q), (r, s)): Q(p x + q y, r x + s y)."""
        (p, q), (r, s) = m
        a, b, c = self.a, self.b, self.c
        return QuadForm(
            a * p * p + b * p * r + c * r * r,
            2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
            a * q * q + b * q * s + c * s * s,
        )

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def reduce(self) -> "QuadForm":
        return reduce_form(self)[0]

    def label(self) -> str:
        return f"{self.a},{self.b},{self.c}"

    def root(self):
        """The root (-b + sqrt(disc)) / 2a in the upper half plane, as (re, im^2)."""
        from fractions import Fraction

        return Fraction(-self.b, 2 * self.a), Fraction(-self.disc, 4 * self.a * self.a)


def reduce_form(f: QuadForm):
    """Reduce a positive definite form; also return gamma in SL2(Z) with f o gamma = reduced."""
    if f.disc >= 0 or f.a <= 0:
        raise ValueError(f"{f} is not positive definite")
    a, b, c = f.a, f.b, f.c
    g = [[1, 0], [0, 1]]

    def mul(m, n):
        return [
            [m[0][0] * n[0][0] + m[0][1] * n[1][0], m[0][0] * n[0][1] + m[0][1] * n[1][1]],
            [m[1][0] * n[0][0] + m[1][1] * n[1][0], m[1][0] * n[0][1] + m[1][1] * n[1][1]],
        ]

    while True:
        # translate b into (-a, a]
        k = (a - b) // (2 * a)
        if k:
            c = a * k * k + b * k + c
            b = b + 2 * a * k
            g = mul(g, [[1, k], [0, 1]])
        if a > c:
            a, b, c = c, -b, a
            g = mul(g, [[0, -1], [1, 0]])
            continue
        break
    if a == c and b < 0:
        a, b, c = c, -b, a
        g = mul(g, [[0, -1], [1, 0]])
    return QuadForm(a, b, c), ((g[0][0], g[0][1]), (g[1][0], g[1][1]))


def reduced_forms(disc: int, primitive: bool = True) -> list[QuadForm]:
    """All reduced positive definite forms of discriminant ``disc`` < 0."""
    if disc >= 0 or disc % 4 not in (0, 1):
        raise InvalidDiscriminant(f"{disc} is not a negative discriminant")
    out = []
    a = 1
    while 3 * a * a <= -disc:
        for b in range(-a + 1, a + 1):
            if (b - disc) % 2:
                continue
            num = b * b - disc
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            f = QuadForm(a, b, c)
            if not f.is_reduced():
                continue
            if primitive and f.content() != 1:
                continue
            out.append(f)
        a += 1
    return out


def compose_forms(f1: QuadForm, f2: QuadForm) -> QuadForm:
    """Gaussian composition of two primitive forms of the same discriminant (reduced output)."""
    if f1.disc != f2.disc:
        raise ValueError("forms have different discriminants")
    if f1.a > f2.a:
        f1, f2 = f2, f1
    a1, b1, c1 = f1.a, f1.b, f1.c
    a2, b2, c2 = f2.a, f2.b, f2.c
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, x2, y2 = xgcd(s, d)
        y2 = -y2
    v1 = a1 // d1
    v2 = a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (c2 * d1 + r * (b2 + v2 * r)) // v1
    return reduce_form(QuadForm(a3, b3, c3))[0]


@dataclass(frozen=True)
class Discriminant:
    """A prime D = 3 mod 4; the field is Q(sqrt(-D))."""

    D: int

    def __post_init__(self):
        if self.D % 4 != 3 or not is_prime(self.D):
            raise InvalidDiscriminant(f"D={self.D} must be a prime congruent to 3 mod 4")

    @property
    def units(self) -> int:
        return 6 if self.D == 3 else 2


@dataclass(frozen=True)
class IdealClass:
    form: QuadForm

    @property
    def label(self) -> str:
        return self.form.label()

    def __str__(self):
        return self.label


def kronecker_symbol(p: int, D: int) -> int:
    """Legendre symbol (p / D) for an odd prime D."""
    r = p % D
    if r == 0:
        return 0
    return 1 if pow(r, (D - 1) // 2, D) == 1 else -1


@dataclass
class ClassGroup:
    disc: Discriminant
    classes: list
    table: dict = field(repr=False)
    inverses: dict = field(repr=False)

    @property
    def D(self) -> int:
        return self.disc.D

    @property
    def h(self) -> int:
        return len(self.classes)

    @property
    def identity(self) -> IdealClass:
        return IdealClass(QuadForm(1, 1, (self.D + 1) // 4))

    def compose(self, A: IdealClass, B: IdealClass) -> IdealClass:
        return class_compose(self, A, B)

    def inverse(self, A: IdealClass) -> IdealClass:
        self._check(A)
        return self.inverses[A]

    def power(self, A: IdealClass, k: int) -> IdealClass:
        R = self.identity
        base = A if k >= 0 else self.inverse(A)
        for _ in range(abs(k)):
            R = self.compose(R, base)
        return R

    def _check(self, A):
        if A not in self.inverses:
            raise ClassNotInGroup(f"{A} is not a class of discriminant -{self.D}")

    def get(self, label: str) -> IdealClass:
        """Look up a class by 'a,b,c', or by the aliases O / J / Jinv for D=23."""
        key = label.strip()
        if key in ("O", "1", "principal"):
            return self.identity
        if self.D == 23 and key in ("J", "Jinv", "J^-1"):
            return IdealClass(QuadForm(2, 1 if key == "J" else -1, 3))
        parts = [int(x) for x in key.replace("[", "").replace("]", "").split(",")]
        A = IdealClass(reduce_form(QuadForm(*parts))[0])
        self._check(A)
        return A

    def rep_count(self, B: IdealClass, t) -> int:
        return rep_count(self, B, t)


def class_group(D) -> ClassGroup:
    disc = D if isinstance(D, Discriminant) else Discriminant(int(D))
    forms = reduced_forms(-disc.D)
    classes = [IdealClass(f) for f in forms]
    table = {}
    inverses = {}
    for A in classes:
        for B in classes:
            table[A, B] = IdealClass(compose_forms(A.form, B.form))
    ident = IdealClass(QuadForm(1, 1, (disc.D + 1) // 4))
    for A in classes:
        inverses[A] = IdealClass(reduce_form(QuadForm(A.form.a, -A.form.b, A.form.c))[0])
        assert table[A, inverses[A]] == ident
    return ClassGroup(disc, classes, table, inverses)


def class_compose(G: ClassGroup, A: IdealClass, B: IdealClass) -> IdealClass:
    G._check(A)
    G._check(B)
    return G.table[A, B]


@lru_cache(maxsize=None)
def _rep_table(form: QuadForm, T: int) -> tuple:
    """Number of (x, y) in Z^2 with form(x, y) = t, for 0 <= t <= T."""
    a, b, c = form.a, form.b, form.c
    D = -form.disc
    counts = [0] * (T + 1)
    ymax = math.isqrt(4 * a * T // D) + 1
    for y in range(-ymax, ymax + 1):
        # a x^2 + b y x + (c y^2 - t) <= 0  <=>  |2 a x + b y| <= sqrt(b^2y^2 - 4a(cy^2 - T))
        disc = 4 * a * T - D * y * y
        if disc < 0:
            continue
        r = math.isqrt(disc)
        lo = (-b * y - r) // (2 * a) - 1
        hi = (-b * y + r) // (2 * a) + 1
        for x in range(lo, hi + 1):
            v = a * x * x + b * x * y + c * y * y
            if v <= T:
                counts[v] += 1
    return tuple(counts)


def rep_table(G: ClassGroup, B: IdealClass, T: int) -> list[int]:
    """r_B(t) for 0 <= t <= T, with the t = 0 entry set to 0."""
    G._check(B)
    raw = _rep_table(B.form, _round_up(T))
    w = G.disc.units
    out = [n // w for n in raw[: T + 1]]
    out[0] = 0
    return out


def _round_up(T: int) -> int:
    # share cached tables between nearby requests
    step = 512
    return ((T + step) // step) * step


def rep_count(G: ClassGroup, B: IdealClass, t) -> int:
    """Number of integral ideals of norm t in the class B (0 outside t in Z_{>0})."""
    if isinstance(t, int):
        n = t
    else:
        from fractions import Fraction

        t = Fraction(t)
        if t.denominator != 1:
            return 0
        n = int(t)
    if n <= 0:
        return 0
    return rep_table(G, B, n)[n]


def ideal_count(D: int, t: int) -> int:
    """Total number of ideals of norm t: sum over m | t of (m / D)."""
    return sum(kronecker_symbol(m, D) for m in range(1, t + 1) if t % m == 0)

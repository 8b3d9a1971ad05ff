"""Exact truncated Laurent series in fractional powers of q.

A :class:`QExpansion` stores ``sum c_n q^(n/M)`` as a sparse dict ``n -> c_n``
with rational coefficients.  ``prec`` is a hard bound: every coefficient with
``n < prec`` is known, nothing at or beyond ``prec`` is.  ``prec=None`` marks
an exact finite expansion (a Laurent polynomial).
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import mpmath


class ZeroLeadingCoefficient(ArithmeticError):
    pass


class PrecisionError(ValueError):
    pass


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact coefficient")


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _min_prec(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


@dataclass(frozen=True)
class PrecisionBudget:
    """Series length (in q^(1/M) steps) and float mantissa size."""

    terms: int = 300
    bits: int = 128

    def __post_init__(self):
        if self.terms < 1:
            raise ValueError("series precision must be at least 1")
        if self.bits < 53:
            raise ValueError("mantissa must have at least 53 bits")


class QExpansion:
    __slots__ = ("M", "terms", "prec")

    def __init__(self, terms=None, M: int = 1, prec: int | None = None):
        if M < 1:
            raise ValueError("exponent denominator must be positive")
        self.M = int(M)
        self.prec = None if prec is None else int(prec)
        clean = {}
        for n, c in (terms or {}).items():
            c = _frac(c)
            n = int(n)
            if c and (self.prec is None or n < self.prec):
                clean[n] = c
        self.terms = clean

    # -- constructors -------------------------------------------------
    @classmethod
    def monomial(cls, exponent, coeff=1, prec=None) -> "QExpansion":
        """c * q^exponent for a rational exponent; ``prec`` is a rational exponent too."""
        e = _frac(exponent)
        M = e.denominator
        if prec is not None:
            p = _frac(prec)
            M = _lcm(M, p.denominator)
            prec = int(p * M)
        return cls({int(e * M): coeff}, M, prec)

    @classmethod
    def from_list(cls, coeffs, M: int = 1, start: int = 0, prec: int | None = None) -> "QExpansion":
        """Dense list ``coeffs[i]`` is the coefficient of q^((start+i)/M).

        Without an explicit ``prec`` the list length sets it.
        """
        if prec is None:
            prec = start + len(coeffs)
        return cls({start + i: c for i, c in enumerate(coeffs) if c}, M, prec)

    @classmethod
    def zero(cls, M: int = 1, prec: int | None = None) -> "QExpansion":
        return cls({}, M, prec)

    # -- basic queries ------------------------------------------------
    def __repr__(self):
        shown = sorted(self.terms.items())[:6]
        body = " + ".join(f"({c})q^({Fraction(n, self.M)})" for n, c in shown) or "0"
        if len(self.terms) > 6:
            body += " + ..."
        tail = "" if self.prec is None else f" + O(q^{Fraction(self.prec, self.M)})"
        return f"QExpansion({body}{tail})"

    def is_exact(self) -> bool:
        return self.prec is None

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def floor(self) -> int | None:
        """Smallest stored index n, or the precision for a zero series."""
        if self.terms:
            return min(self.terms)
        return self.prec

    @property
    def valuation(self) -> Fraction | None:
        f = self.floor
        return None if f is None else Fraction(f, self.M)

    @property
    def precision(self) -> Fraction | None:
        """Precision as a rational exponent."""
        return None if self.prec is None else Fraction(self.prec, self.M)

    def coefficient(self, exponent) -> Fraction:
        e = _frac(exponent)
        n = e * self.M
        if n.denominator != 1:
            return Fraction(0)
        n = int(n)
        if self.prec is not None and n >= self.prec:
            raise PrecisionError(f"coefficient of q^{e} is beyond the precision {self.precision}")
        return self.terms.get(n, Fraction(0))

    __getitem__ = coefficient

    def items(self):
        """(rational exponent, coefficient) pairs in increasing order."""
        for n in sorted(self.terms):
            yield Fraction(n, self.M), self.terms[n]

    def principal_part(self) -> dict:
        return {e: c for e, c in self.items() if e < 0}

    # -- rescaling ----------------------------------------------------
    def rescale(self, M: int) -> "QExpansion":
        if M == self.M:
            return self
        if M % self.M:
            raise ValueError(f"cannot rescale denominator {self.M} to {M}")
        k = M // self.M
        prec = None if self.prec is None else self.prec * k
        return QExpansion({n * k: c for n, c in self.terms.items()}, M, prec)

    def reduced(self) -> "QExpansion":
        """Same series over the smallest exponent denominator."""
        g = self.M
        for n in self.terms:
            g = math.gcd(g, n)
            if g == 1:
                return self
        if self.prec is not None:
            g = math.gcd(g, self.prec)
        if g == 1:
            return self
        prec = None if self.prec is None else self.prec // g
        return QExpansion({n // g: c for n, c in self.terms.items()}, self.M // g, prec)

    def truncate(self, prec) -> "QExpansion":
        """Drop everything at exponent >= ``prec`` (a rational exponent)."""
        p = _frac(prec) * self.M
        if p.denominator != 1:
            M = _lcm(self.M, _frac(prec).denominator)
            return self.rescale(M).truncate(prec)
        p = int(p)
        if self.prec is not None and p > self.prec:
            raise PrecisionError(f"cannot truncate to {prec}: known only below {self.precision}")
        return QExpansion(self.terms, self.M, p)

    def _common(self, other: "QExpansion"):
        M = _lcm(self.M, other.M)
        return self.rescale(M), other.rescale(M), M

    # -- ring operations ----------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QExpansion({0: other}, self.M, self.prec)
        if not isinstance(other, QExpansion):
            return NotImplemented
        a, b, _ = self._common(other)
        return a.prec == b.prec and a.terms == b.terms

    def __hash__(self):
        r = self.reduced()
        return hash((r.M, r.prec, tuple(sorted(r.terms.items()))))

    def __neg__(self):
        return QExpansion({n: -c for n, c in self.terms.items()}, self.M, self.prec)

    def __add__(self, other):
        if not isinstance(other, QExpansion):
            other = QExpansion({0: _frac(other)}, self.M, None)
        a, b, M = self._common(other)
        prec = _min_prec(a.prec, b.prec)
        out = dict(a.terms)
        for n, c in b.terms.items():
            out[n] = out.get(n, 0) + c
        return QExpansion(out, M, prec)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other if isinstance(other, QExpansion) else -_frac(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "QExpansion":
        c = _frac(c)
        if not c:
            return QExpansion({}, self.M, self.prec)
        return QExpansion({n: v * c for n, v in self.terms.items()}, self.M, self.prec)

    def __mul__(self, other):
        if isinstance(other, QExpansion):
            return series_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, QExpansion):
            return series_mul(self, series_invert(other))
        return self.scale(1 / _frac(other))

    def __pow__(self, k: int):
        if k < 0:
            return series_invert(self) ** (-k)
        result = QExpansion({0: 1}, self.M, None)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift(self, exponent) -> "QExpansion":
        """Multiply by q^exponent."""
        e = _frac(exponent)
        M = _lcm(self.M, e.denominator)
        a = self.rescale(M)
        s = int(e * M)
        prec = None if a.prec is None else a.prec + s
        return QExpansion({n + s: c for n, c in a.terms.items()}, M, prec)

    def substitute(self, k: int) -> "QExpansion":
        """Replace q by q^k (k a positive integer)."""
        prec = None if self.prec is None else self.prec * k
        return QExpansion({n * k: c for n, c in self.terms.items()}, self.M, prec)

    def derivative(self) -> "QExpansion":
        return series_derivative(self)

    # -- numerics -----------------------------------------------------
    def evaluate(self, tau):
        """Sum the stored terms at ``tau`` (an mpmath complex) at the current mp precision."""
        if not self.terms:
            return mpmath.mpc(0)
        base = mpmath.exp(2j * mpmath.pi * mpmath.mpc(tau) / self.M)
        total = mpmath.mpc(0)
        ns = sorted(self.terms)
        power = base ** ns[0]
        prev = ns[0]
        step_cache = {}
        for n in ns:
            gap = n - prev
            if gap:
                step = step_cache.get(gap)
                if step is None:
                    step = step_cache[gap] = base**gap
                power *= step
            prev = n
            c = self.terms[n]
            total += power * c.numerator / c.denominator
        return total

    def tail_bound(self, y) -> float:
        """Crude bound on the magnitude of the last stored term at height y (log10)."""
        if not self.terms or self.prec is None:
            return -math.inf
        n = max(self.terms)
        c = abs(self.terms[n])
        return math.log10(float(c)) - 2 * math.pi * y * n / self.M / math.log(10)

    # -- serialization ------------------------------------------------
    def to_json(self) -> dict:
        return {
            "M": self.M,
            "floor": self.floor,
            "coeffs": [[n, f"{c.numerator}/{c.denominator}"] for n, c in sorted(self.terms.items())],
            "precision": self.prec,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "QExpansion":
        return cls({int(n): Fraction(c) for n, c in obj["coeffs"]}, obj["M"], obj["precision"])


def series_add(a: QExpansion, b: QExpansion) -> QExpansion:
    return a + b


def _int_form(terms: dict):
    """Write a dict of fractions as (integer dict, common denominator)."""
    den = 1
    for c in terms.values():
        if c.denominator != 1:
            den = _lcm(den, c.denominator)
    if den == 1:
        return {n: c.numerator for n, c in terms.items()}, 1
    return {n: c.numerator * (den // c.denominator) for n, c in terms.items()}, den


def series_mul(a: QExpansion, b: QExpansion) -> QExpansion:
    a, b, M = a._common(b)
    fa, fb = a.floor, b.floor
    if fa is None or fb is None:
        # one side is the exact zero series
        return QExpansion({}, M, None)
    prec = None
    if a.prec is not None:
        prec = a.prec + fb
    if b.prec is not None:
        prec = _min_prec(prec, b.prec + fa)
    if not a.terms or not b.terms:
        return QExpansion({}, M, prec)
    ia, da = _int_form(a.terms)
    ib, db = _int_form(b.terms)
    if len(ia) > len(ib):
        ia, ib = ib, ia
    kb = sorted(ib)
    vb = [ib[k] for k in kb]
    out = {}
    get = out.get
    for n, c in ia.items():
        stop = len(kb) if prec is None else bisect_left(kb, prec - n)
        for j in range(stop):
            m = n + kb[j]
            out[m] = get(m, 0) + c * vb[j]
    den = da * db
    if den == 1:
        return QExpansion(out, M, prec)
    return QExpansion({n: Fraction(c, den) for n, c in out.items() if c}, M, prec)


def series_invert(a: QExpansion, prec: int | None = None) -> QExpansion:
    """Multiplicative inverse.

    For an exact input with more than one term the caller must pass ``prec``
    (in units of q^(1/M)) to say where to stop.
    """
    if not a.terms:
        raise ZeroLeadingCoefficient("cannot invert a series with no known nonzero term")
    v = a.floor
    lead = a.terms[v]
    if a.prec is None:
        if len(a.terms) == 1:
            return QExpansion({-v: 1 / lead}, a.M, None)
        if prec is None:
            raise PrecisionError("inverting an exact multi-term series needs an explicit precision")
        out_prec = prec
    else:
        out_prec = a.prec - 2 * v
        if prec is not None:
            out_prec = min(out_prec, prec)
    length = out_prec + v  # number of q^(1/M) steps of the normalized inverse
    if length <= 0:
        return QExpansion({}, a.M, out_prec)
    ia, den = _int_form(a.terms)
    unit = ia[v]
    # a = (1/den) q^v (unit + sum_{i>=1} ia[v+i] q^i); invert the bracket
    rest = [(n - v, c) for n, c in sorted(ia.items()) if n != v and n - v < length]
    inv = [Fraction(0)] * length
    if abs(unit) == 1:
        ib = [0] * length
        ib[0] = unit
        for k in range(1, length):
            s = 0
            for i, c in rest:
                if i > k:
                    break
                s += c * ib[k - i]
            ib[k] = -unit * s
        inv = [Fraction(x * den) for x in ib]
    else:
        inv[0] = Fraction(1, unit)
        for k in range(1, length):
            s = Fraction(0)
            for i, c in rest:
                if i > k:
                    break
                s += c * inv[k - i]
            inv[k] = -s / unit
        inv = [x * den for x in inv]
    return QExpansion({k - v: c for k, c in enumerate(inv) if c}, a.M, out_prec)


def series_derivative(a: QExpansion) -> QExpansion:
    """q d/dq, i.e. (2 pi i)^(-1) d/dtau."""
    return QExpansion({n: c * Fraction(n, a.M) for n, c in a.terms.items()}, a.M, a.prec)


def eta_product(P: int, power: int = 1) -> QExpansion:
    """prod_{n>=1} (1 - q^n)^power to precision q^P (no q^(1/24) prefactor)."""
    # Euler's pentagonal theorem for the single power, then repeated products
    base = [0] * P
    k = 0
    while True:
        for m in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            if m < P:
                base[m] = -1 if k % 2 else 1
        if k * (3 * k - 1) // 2 >= P:
            break
        k += 1
    series = QExpansion.from_list(base, 1, 0, P)
    if power == 1:
        return series
    if power < 0:
        return series_invert(series) ** (-power)
    return series**power

"""Exact arithmetic in cyclotomic fields Q(zeta_f).

Values are stored in the power basis 1, zeta, ..., zeta^{phi(f)-1} reduced
modulo the f-th cyclotomic polynomial, with gmpy2 rationals as coordinates.
Arithmetic between different conductors embeds both operands into the lcm
conductor first.  This module is the coefficient domain for every q-series
in the package: all root-of-unity constants (e^{pi i/4}, translation
factors, sigma_d images of zeta_N, ...) live here exactly.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from gmpy2 import mpq

from .errors import ConductorMismatch

QQ = mpq


def as_mpq(x) -> mpq:
    """Coerce ints, Fractions, mpqs and 'p/q' strings to mpq."""
    if isinstance(x, mpq):
        return x
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return mpq(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError("phi is defined for positive integers")
    result = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            result -= result // p
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _poly_divide_exact(num: list[int], den: list[int]) -> list[int]:
    # exact division of integer polynomials, ascending coefficients
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + dn]
        if c % den[dn] != 0:
            raise ArithmeticError("non-exact polynomial division")
        q = c // den[dn]
        out[i] = q
        if q:
            for j, d in enumerate(den):
                num[i + j] -= q * d
    if any(num):
        raise ArithmeticError("non-exact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, ascending, as integers."""
    if n == 1:
        return (-1, 1)
    poly = [0] * (n + 1)
    poly[0] = -1
    poly[n] = 1
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divide_exact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


@lru_cache(maxsize=None)
def _reduction_table(f: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """x^e mod Phi_f for e in [phi(f), f), as sparse (index, coeff) rows."""
    phi = euler_phi(f)
    top = cyclotomic_polynomial(f)
    # x^phi = -(c_0 + c_1 x + ... + c_{phi-1} x^{phi-1})
    cur = [-top[i] for i in range(phi)]
    rows = []
    for _ in range(phi, f):
        rows.append(tuple((i, c) for i, c in enumerate(cur) if c))
        nxt = [0] * phi
        for i in range(phi - 1):
            nxt[i + 1] = cur[i]
        overflow = cur[phi - 1]
        if overflow:
            for i in range(phi):
                nxt[i] -= overflow * top[i]
        cur = nxt
    return tuple(rows)


def _reduce_exponents(raw: dict[int, mpq], f: int) -> dict[int, mpq]:
    """Reduce a zeta_f-exponent dict (any exponents) into the power basis."""
    phi = euler_phi(f)
    table = None
    out: dict[int, mpq] = {}
    for e, c in raw.items():
        if not c:
            continue
        e %= f
        if e < phi:
            v = out.get(e)
            v = c if v is None else v + c
            if v:
                out[e] = v
            elif e in out:
                del out[e]
        else:
            if table is None:
                table = _reduction_table(f)
            for i, k in table[e - phi]:
                v = out.get(i)
                v = k * c if v is None else v + k * c
                if v:
                    out[i] = v
                elif i in out:
                    del out[i]
    return out


class CyclotomicNumber:
    """An element of Q(zeta_f) in reduced power-basis form.

    Immutable by convention: no method mutates self, and instances may be
    shared freely across concurrent work.
    """

    __slots__ = ("conductor", "coeffs")

    def __init__(self, conductor: int, coeffs: dict[int, mpq], *, _reduced: bool = False):
        if conductor < 1:
            raise ValueError("conductor must be positive")
        self.conductor = conductor
        if _reduced:
            self.coeffs = coeffs
        else:
            self.coeffs = _reduce_exponents(
                {int(e): as_mpq(c) for e, c in coeffs.items()}, conductor
            )

    # -- constructors ---------------------------------------------------

    @staticmethod
    def rational(r, conductor: int = 1) -> "CyclotomicNumber":
        r = as_mpq(r)
        return CyclotomicNumber(conductor, {0: r} if r else {}, _reduced=True)

    @staticmethod
    def zero(conductor: int = 1) -> "CyclotomicNumber":
        return CyclotomicNumber(conductor, {}, _reduced=True)

    @staticmethod
    def one(conductor: int = 1) -> "CyclotomicNumber":
        return CyclotomicNumber.rational(1, conductor)

    @staticmethod
    def zeta(conductor: int, power: int = 1) -> "CyclotomicNumber":
        """zeta_conductor ** power."""
        return CyclotomicNumber(conductor, {power % conductor: QQ(1)})

    @staticmethod
    def exp_pi_i(r) -> "CyclotomicNumber":
        """e^{i pi r} for rational r, as an exact root of unity."""
        r = as_mpq(r)
        num = int(r.numerator)
        den = int(r.denominator)
        if den == 1:
            return CyclotomicNumber.rational(1 if num % 2 == 0 else -1)
        return CyclotomicNumber.zeta(2 * den, num)

    # -- structure ------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def is_rational(self) -> bool:
        return all(i == 0 for i in self.coeffs)

    def rational_value(self) -> mpq:
        if not self.is_rational():
            raise ValueError("value is not rational")
        return self.coeffs.get(0, QQ(0))

    def embedded(self, conductor: int) -> "CyclotomicNumber":
        """The same number viewed in Q(zeta_conductor); requires f | conductor."""
        if conductor % self.conductor != 0:
            raise ConductorMismatch(
                f"conductor {self.conductor} does not divide {conductor}"
            )
        if conductor == self.conductor:
            return self
        step = conductor // self.conductor
        return CyclotomicNumber(
            conductor, {i * step: c for i, c in self.coeffs.items()}
        )

    def _common(self, other: "CyclotomicNumber"):
        f = self.conductor
        g = other.conductor
        if f == g:
            return self, other
        m = f * g // math.gcd(f, g)
        return self.embedded(m), other.embedded(m)

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        a, b = self._common(other)
        out = dict(a.coeffs)
        for i, c in b.coeffs.items():
            v = out.get(i)
            v = c if v is None else v + c
            if v:
                out[i] = v
            elif i in out:
                del out[i]
        return CyclotomicNumber(a.conductor, out, _reduced=True)

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber(
            self.conductor, {i: -c for i, c in self.coeffs.items()}, _reduced=True
        )

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        a, b = self._common(other)
        ca, cb = a.coeffs, b.coeffs
        if not ca or not cb:
            return CyclotomicNumber.zero(a.conductor)
        # scalar fast path
        if len(ca) == 1 and 0 in ca:
            r = ca[0]
            return CyclotomicNumber(
                a.conductor, {i: r * c for i, c in cb.items()}, _reduced=True
            )
        if len(cb) == 1 and 0 in cb:
            r = cb[0]
            return CyclotomicNumber(
                a.conductor, {i: r * c for i, c in ca.items()}, _reduced=True
            )
        if len(ca) > len(cb):
            ca, cb = cb, ca
        raw: dict[int, mpq] = {}
        for i, c in ca.items():
            for j, d in cb.items():
                e = i + j
                v = raw.get(e)
                v = c * d if v is None else v + c * d
                raw[e] = v
        return CyclotomicNumber(a.conductor, _reduce_exponents(raw, a.conductor), _reduced=True)

    __rmul__ = __mul__

    def inverse(self) -> "CyclotomicNumber":
        """Multiplicative inverse via extended gcd against Phi_f."""
        if not self.coeffs:
            raise ZeroDivisionError("inverse of zero cyclotomic number")
        if self.is_rational():
            return CyclotomicNumber.rational(1 / self.coeffs[0], self.conductor)
        f = self.conductor
        phi = euler_phi(f)
        a = [QQ(0)] * phi
        for i, c in self.coeffs.items():
            a[i] = c
        m = [QQ(c) for c in cyclotomic_polynomial(f)]
        inv = _poly_modinv(a, m)
        return CyclotomicNumber(
            f, {i: c for i, c in enumerate(inv) if c}, _reduced=True
        )

    def __truediv__(self, other):
        return self * _coerce(other).inverse()

    def __rtruediv__(self, other):
        return _coerce(other) * self.inverse()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, mpq)):
            other = CyclotomicNumber.rational(as_mpq(other))
        if not isinstance(other, CyclotomicNumber):
            return NotImplemented
        a, b = self._common(other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        # canonical hash: hash of the sorted reduced coordinates at own conductor
        # is not embedding-stable, so hash via rational fast path only
        if self.is_rational():
            return hash(self.coeffs.get(0, QQ(0)))
        return hash((self.conductor, tuple(sorted(self.coeffs.items()))))

    def conjugate(self) -> "CyclotomicNumber":
        """Complex conjugation, zeta -> zeta^{-1}."""
        f = self.conductor
        return CyclotomicNumber(f, {(-i) % f: c for i, c in self.coeffs.items()})

    # -- numeric --------------------------------------------------------

    def to_complex(self) -> complex:
        """Double-precision complex value (testing / diagnostics)."""
        z = 0j
        f = self.conductor
        for i, c in self.coeffs.items():
            ang = 2.0 * math.pi * i / f
            z += float(Fraction(c.numerator, c.denominator)) * complex(
                math.cos(ang), math.sin(ang)
            )
        return z

    def to_mpc(self, ctx):
        """Arbitrary-precision complex value in the given mpmath context."""
        z = ctx.mpc(0)
        f = self.conductor
        for i, c in self.coeffs.items():
            w = ctx.expjpi(ctx.mpf(2 * i) / f)
            z += ctx.mpf(c.numerator) / ctx.mpf(c.denominator) * w
        return z

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i in sorted(self.coeffs):
            c = self.coeffs[i]
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append(f"{c}*z{self.conductor}")
            else:
                parts.append(f"{c}*z{self.conductor}^{i}")
        return " + ".join(parts)


def _coerce(x) -> CyclotomicNumber:
    if isinstance(x, CyclotomicNumber):
        return x
    return CyclotomicNumber.rational(as_mpq(x))


def _poly_modinv(a: list[mpq], m: list[mpq]) -> list[mpq]:
    # extended Euclid in Q[x]: returns a^{-1} mod m, deg a < deg m, m irreducible
    def deg(p):
        for i in range(len(p) - 1, -1, -1):
            if p[i]:
                return i
        return -1

    def trim(p):
        d = deg(p)
        return p[: d + 1] if d >= 0 else []

    def sub_scaled(p, q, c, shift):
        out = list(p)
        need = len(q) + shift
        if len(out) < need:
            out.extend([QQ(0)] * (need - len(out)))
        for i, qc in enumerate(q):
            out[i + shift] -= c * qc
        return out

    r0, r1 = trim(m), trim(a)
    s0, s1 = [], [QQ(1)]
    while True:
        d1 = deg(r1)
        if d1 < 0:
            raise ZeroDivisionError("element not invertible")
        if d1 == 0:
            c = r1[0]
            return [x / c for x in s1] + [QQ(0)] * (len(m) - 1 - len(s1))
        # divide r0 by r1
        q_done_r, q_done_s = list(r0), list(s0)
        while True:
            d0 = deg(q_done_r)
            if d0 < d1:
                break
            c = q_done_r[d0] / r1[d1]
            q_done_r = sub_scaled(q_done_r, r1, c, d0 - d1)
            q_done_s = sub_scaled(q_done_s, s1, c, d0 - d1)
        r0, r1 = r1, trim(q_done_r)
        s0, s1 = s1, q_done_s

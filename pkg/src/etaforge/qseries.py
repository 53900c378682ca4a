"""Sparse truncated Puiseux series in q with exact cyclotomic coefficients.

A QSeries stores finitely many terms c_e * q^e with e on the (1/M)-grid,
all below a tracked truncation bound: coefficients at exponents >= trunc
are unknown, not zero.  A trunc of None means the series is exact (a
Laurent polynomial).  Binary operations propagate the tightest truncation
implied by the operands: min for addition, leading-exponent-shifted min
for multiplication.

Internally exponents are integer indices k standing for q^{k/M}; all
public accessors speak exact rationals.  Instances are immutable by
convention and safe to share.
"""

from __future__ import annotations

import math
from typing import Optional

from gmpy2 import mpq

from .cyclotomic import QQ, CyclotomicNumber, as_mpq
from .errors import ZeroLeadingCoefficient


def _coeff(x) -> CyclotomicNumber:
    if isinstance(x, CyclotomicNumber):
        return x
    return CyclotomicNumber.rational(as_mpq(x))


class QSeries:
    __slots__ = ("denom", "_c", "_t")

    def __init__(self, denom: int, coeffs: dict[int, CyclotomicNumber], trunc_idx: Optional[int]):
        # internal constructor: coeffs keyed by integer exponent index on the
        # (1/denom)-grid, zero values and indices >= trunc_idx already absent
        self.denom = denom
        self._c = coeffs
        self._t = trunc_idx

    # -- construction ---------------------------------------------------

    @staticmethod
    def from_terms(terms: dict, trunc=None) -> "QSeries":
        """Build from {rational exponent: coefficient}; trunc None = exact."""
        exps = {as_mpq(e): _coeff(c) for e, c in terms.items()}
        m = 1
        for e in exps:
            m = m * int(e.denominator) // math.gcd(m, int(e.denominator))
        t = None
        if trunc is not None:
            t = as_mpq(trunc)
            m = m * int(t.denominator) // math.gcd(m, int(t.denominator))
        coeffs = {}
        for e, c in exps.items():
            k = int(e * m)
            if c and (t is None or k < int(t * m)):
                coeffs[k] = c
        return QSeries(m, coeffs, None if t is None else int(t * m))

    @staticmethod
    def zero(trunc=None) -> "QSeries":
        return QSeries.from_terms({}, trunc)

    @staticmethod
    def one(trunc=None) -> "QSeries":
        return QSeries.from_terms({0: 1}, trunc)

    @staticmethod
    def monomial(exponent, coeff=1, trunc=None) -> "QSeries":
        return QSeries.from_terms({exponent: coeff}, trunc)

    # -- basic structure ------------------------------------------------

    @property
    def trunc(self) -> Optional[mpq]:
        return None if self._t is None else QQ(self._t, self.denom)

    def terms(self) -> list[tuple[mpq, CyclotomicNumber]]:
        """Sorted (exponent, coefficient) pairs."""
        return [(QQ(k, self.denom), self._c[k]) for k in sorted(self._c)]

    def coefficient(self, exponent) -> CyclotomicNumber:
        """Coefficient at an exact exponent; refuses to read past trunc."""
        e = as_mpq(exponent)
        if self._t is not None and e >= self.trunc:
            raise ValueError(f"coefficient at {e} is beyond truncation {self.trunc}")
        k = e * self.denom
        if k.denominator != 1:
            return CyclotomicNumber.zero()
        return self._c.get(int(k), CyclotomicNumber.zero())

    def is_zero(self) -> bool:
        return not self._c

    def leading_exponent(self) -> mpq:
        if not self._c:
            raise ZeroLeadingCoefficient("series has no known nonzero coefficient")
        return QQ(min(self._c), self.denom)

    def leading_coefficient(self) -> CyclotomicNumber:
        return self._c[min(self._c)]

    def support_is_integral(self) -> bool:
        return all(k % self.denom == 0 for k in self._c)

    # lead index used for truncation propagation: unknown-at-trunc for zero
    def _lead_or_trunc(self) -> Optional[int]:
        if self._c:
            return min(self._c)
        return self._t  # None means genuinely zero with infinite knowledge

    def rebased(self, denom: int) -> "QSeries":
        if denom == self.denom:
            return self
        if denom % self.denom != 0:
            raise ValueError("can only rebase to a multiple of the current grid")
        s = denom // self.denom
        return QSeries(
            denom,
            {k * s: c for k, c in self._c.items()},
            None if self._t is None else self._t * s,
        )

    def _common(self, other: "QSeries"):
        m = self.denom * other.denom // math.gcd(self.denom, other.denom)
        return self.rebased(m), other.rebased(m)

    # -- ring operations ------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries.from_terms({0: other})
        a, b = self._common(other)
        t = _tmin(a._t, b._t)
        out = {k: c for k, c in a._c.items() if t is None or k < t}
        for k, c in b._c.items():
            if t is not None and k >= t:
                continue
            v = out.get(k)
            v = c if v is None else v + c
            if v:
                out[k] = v
            elif k in out:
                del out[k]
        return QSeries(a.denom, out, t)

    __radd__ = __add__

    def __neg__(self):
        return QSeries(self.denom, {k: -c for k, c in self._c.items()}, self._t)

    def __sub__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries.from_terms({0: other})
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.scaled(other)
        a, b = self._common(other)
        la, lb = a._lead_or_trunc(), b._lead_or_trunc()
        t = _tmin(_tadd(la, b._t), _tadd(lb, a._t))
        if not a._c or not b._c:
            return QSeries(a.denom, {}, t)
        ia = sorted(a._c.items())
        ib = sorted(b._c.items())
        if len(ia) > len(ib):
            ia, ib = ib, ia
        out: dict[int, CyclotomicNumber] = {}
        for k1, c1 in ia:
            for k2, c2 in ib:
                k = k1 + k2
                if t is not None and k >= t:
                    break
                v = c1 * c2
                if not v:
                    continue
                w = out.get(k)
                w = v if w is None else w + v
                if w:
                    out[k] = w
                elif k in out:
                    del out[k]
        return QSeries(a.denom, out, t)

    __rmul__ = __mul__

    def scaled(self, c) -> "QSeries":
        """Multiply every coefficient by a scalar (rational or cyclotomic)."""
        c = _coeff(c)
        if not c:
            return QSeries(self.denom, {}, self._t)
        return QSeries(self.denom, {k: c * v for k, v in self._c.items()}, self._t)

    def times_one_plus_term(self, coeff, exponent) -> "QSeries":
        """self * (1 + coeff*q^exponent), cheaper than general mul."""
        e = as_mpq(exponent)
        c = _coeff(coeff)
        m = self.denom * int(e.denominator) // math.gcd(self.denom, int(e.denominator))
        s = self.rebased(m)
        ei = int(e * m)
        t = None if s._t is None else min(0, ei) + s._t
        out = {k: v for k, v in s._c.items() if t is None or k < t}
        if c:
            for k, v in s._c.items():
                kk = k + ei
                if t is not None and kk >= t:
                    continue
                w = out.get(kk)
                w = c * v if w is None else w + c * v
                if w:
                    out[kk] = w
                elif kk in out:
                    del out[kk]
        return QSeries(m, out, t)

    def inverse(self) -> "QSeries":
        """Multiplicative inverse r with self * r = 1 + O(q^t').

        Requires a nonzero coefficient at the minimal exponent.  The result
        is known up to t - 2*lead where t is the operand truncation.
        """
        if not self._c:
            raise ZeroLeadingCoefficient("cannot invert a series with no nonzero term")
        lead = min(self._c)
        c0 = self._c[lead]
        c0inv = c0.inverse()
        # relative series x: self = c0 q^lead (1 + x), invert 1 + x by long division
        rel = {k - lead: c * c0inv for k, c in self._c.items() if k != lead}
        if self._t is None:
            if rel:
                raise ValueError(
                    "inverse of a multi-term exact series is infinite; truncate first"
                )
            t_rel = 1
        else:
            t_rel = self._t - lead
        out: dict[int, CyclotomicNumber] = {0: CyclotomicNumber.one()}
        if rel:
            step = 0
            for k in rel:
                step = math.gcd(step, k)
            items = sorted(rel.items())
            for g in range(step, t_rel, step):
                acc = None
                for e, c in items:
                    if e > g:
                        break
                    r = out.get(g - e)
                    if r is None:
                        continue
                    v = c * r
                    acc = v if acc is None else acc + v
                if acc:
                    out[g] = -acc
        res = {}
        for g, c in out.items():
            v = c * c0inv
            if v:
                res[g - lead] = v
        t_out = None if self._t is None else self._t - 2 * lead
        if t_out is not None:
            res = {k: c for k, c in res.items() if k < t_out}
        return QSeries(self.denom, res, t_out)

    def __pow__(self, k: int) -> "QSeries":
        if not isinstance(k, int):
            raise TypeError("series powers must be integers")
        if k == 0:
            return QSeries.one(self.trunc)
        base = self if k > 0 else self.inverse()
        k = abs(k)
        result = None
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other):
        if not isinstance(other, QSeries):
            return self.scaled(QQ(1) / as_mpq(other))
        return self * other.inverse()

    def rescale(self, r) -> "QSeries":
        """Substitute q -> q^r: exponent e becomes r*e, trunc becomes r*trunc."""
        r = as_mpq(r)
        if r <= 0:
            raise ValueError("rescale factor must be a positive rational")
        if r == 1:
            return self
        p, q = int(r.numerator), int(r.denominator)
        mq = self.denom * q
        g = math.gcd(p, mq)
        m2, step = mq // g, p // g
        return QSeries(
            m2,
            {k * step: c for k, c in self._c.items()},
            None if self._t is None else self._t * step,
        )

    def truncated(self, trunc) -> "QSeries":
        """Forget coefficients at exponents >= trunc."""
        t = as_mpq(trunc)
        ti = t * self.denom
        if ti.denominator != 1:
            m = self.denom * int(ti.denominator)
            return self.rebased(m).truncated(t)
        ti = int(ti)
        if self._t is not None:
            ti = min(ti, self._t)
        return QSeries(self.denom, {k: c for k, c in self._c.items() if k < ti}, ti)

    # -- comparisons ----------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        a, b = self._common(other)
        return a._t == b._t and a._c == b._c

    def __hash__(self):
        return hash((self.denom, self._t, tuple(sorted(self._c))))

    def agrees_with(self, other: "QSeries") -> bool:
        """Coefficientwise equality on the common known range."""
        return (self - other).is_zero()

    def __repr__(self):
        ts = [] if self._c else ["0"]
        for e, c in self.terms()[:8]:
            ts.append(f"({c!r})*q^({e})")
        if len(self._c) > 8:
            ts.append("...")
        tail = "" if self._t is None else f" + O(q^({self.trunc}))"
        return " + ".join(ts) + tail

    # -- serialization ---------------------------------------------------

    def to_json_dict(self) -> dict:
        coeffs = []
        for e, c in self.terms():
            coeffs.append(
                {
                    "exp": str(e),
                    "val": {
                        "conductor": c.conductor,
                        "coeffs": {str(i): str(v) for i, v in sorted(c.coeffs.items())},
                    },
                }
            )
        return {
            "denom": self.denom,
            "trunc": None if self._t is None else str(self.trunc),
            "coeffs": coeffs,
        }

    @staticmethod
    def from_json_dict(d: dict) -> "QSeries":
        terms = {}
        for item in d["coeffs"]:
            val = item["val"]
            c = CyclotomicNumber(
                int(val["conductor"]),
                {int(i): as_mpq(v) for i, v in val["coeffs"].items()},
            )
            terms[as_mpq(item["exp"])] = c
        s = QSeries.from_terms(terms, d.get("trunc"))
        return s.rebased(s.denom * int(d["denom"]) // math.gcd(s.denom, int(d["denom"])))


def _tmin(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _tadd(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None or b is None:
        return None
    return a + b


def series_arith(op: str, a: QSeries, b: Optional[QSeries] = None) -> QSeries:
    """Named entry point mirroring the CLI verb set: add/sub/mul/neg."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    raise ValueError(f"unknown series operation {op!r}")

"""Arbitrary-precision complex values with tracked working precision.

A BigComplex pairs an mpmath real/imaginary part with the decimal-digit
precision it was computed at.  Arithmetic between two values runs at the
maximum of the operand precisions, so precision is never silently lost
to a lower-precision operand.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mp

MIN_DIGITS = 50
GUARD_DIGITS = 25


def working(digits: int):
    """Context manager running mpmath at digits plus a guard band."""
    return mp.workdps(digits + GUARD_DIGITS)


@dataclass(frozen=True)
class BigComplex:
    re: mpmath.mpf
    im: mpmath.mpf
    digits: int

    def __post_init__(self):
        if self.digits < MIN_DIGITS:
            raise ValueError(f"precision must be at least {MIN_DIGITS} digits")
        for name in ("re", "im"):
            v = getattr(self, name)
            if not isinstance(v, mpmath.mpf):
                with working(self.digits):
                    object.__setattr__(self, name, mp.mpf(v))

    @staticmethod
    def make(value, digits: int) -> "BigComplex":
        with working(digits):
            z = mp.mpc(value)
            return BigComplex(z.real, z.imag, digits)

    @staticmethod
    def from_strings(re: str, im: str, digits: int) -> "BigComplex":
        with working(digits):
            return BigComplex(mp.mpf(re), mp.mpf(im), digits)

    def to_mpc(self) -> mpmath.mpc:
        # build from raw component data: mpmath.mpc(re, im) would round the
        # parts to the *ambient* context precision
        return mpmath.make_mpc((self.re._mpf_, self.im._mpf_))

    def _binary(self, other, op):
        if not isinstance(other, BigComplex):
            other = BigComplex.make(other, self.digits)
        digits = max(self.digits, other.digits)
        with working(digits):
            return BigComplex.make(op(self.to_mpc(), other.to_mpc()), digits)

    def __add__(self, other):
        return self._binary(other, lambda x, y: x + y)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda x, y: x - y)

    def __rsub__(self, other):
        return self._binary(other, lambda x, y: y - x)

    def __mul__(self, other):
        return self._binary(other, lambda x, y: x * y)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, lambda x, y: x / y)

    def __rtruediv__(self, other):
        return self._binary(other, lambda x, y: y / x)

    def __neg__(self):
        return BigComplex(-self.re, -self.im, self.digits)

    def conjugate(self) -> "BigComplex":
        return BigComplex(self.re, -self.im, self.digits)

    def abs(self) -> mpmath.mpf:
        with working(self.digits):
            return abs(self.to_mpc())

    def to_json_dict(self) -> dict:
        with working(self.digits):
            return {
                "re": mpmath.nstr(self.re, self.digits),
                "im": mpmath.nstr(self.im, self.digits),
                "digits": self.digits,
            }

    @staticmethod
    def from_json_dict(d: dict) -> "BigComplex":
        return BigComplex.from_strings(d["re"], d["im"], int(d["digits"]))

    def __repr__(self):
        return f"BigComplex({mpmath.nstr(self.re, 20)} + {mpmath.nstr(self.im, 20)}j @ {self.digits}d)"


def as_mpc_and_digits(tau, default_digits: int | None = None):
    """Accept BigComplex or any mpmath-coercible value; return (mpc, digits)."""
    if isinstance(tau, BigComplex):
        return tau.to_mpc(), (default_digits or tau.digits)
    return mpmath.mpc(tau), (default_digits or mp.dps)

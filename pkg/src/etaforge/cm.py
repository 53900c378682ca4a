"""Arbitrary-precision evaluation of eta and eta-quotients at CM points.

Evaluation always reduces the argument to the standard fundamental domain
first, tracking the exact transformation multiplier as a 24th-root-of-unity
index together with the list of sqrt(-i*tau) factors picked up by
inversions; only at the end are the square roots applied numerically.
This keeps eta accurate even at Galois-conjugate points with tiny
imaginary part.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mp

from .bigcomplex import BigComplex, as_mpc_and_digits, working
from .cyclotomic import QQ
from .errors import (
    ConductorNotDivisibleBy4,
    NonPositiveImaginaryPart,
    NotFundamental,
    RoundingFailure,
)
from .etaq import EtaQuotient
from .matrices import Mat2
from .qseries import QSeries

DEFAULT_DIGITS = 300


def is_fundamental_discriminant(d: int) -> bool:
    if d >= 0:
        return False
    if d % 4 not in (0, 1):
        return False

    def squarefree(n):
        n = abs(n)
        p = 2
        while p * p <= n:
            if n % (p * p) == 0:
                return False
            while n % p == 0:
                n //= p
            p += 1
        return True

    if d % 4 == 1:
        return squarefree(d)
    m = d // 4
    return m % 4 in (2, 3) and squarefree(m)


@dataclass(frozen=True)
class ImagQuadOrder:
    """CM datum: fundamental discriminant, conductor, and min(tau_K, Q).

    tau_K = (-1 + sqrt(d_K))/2 for d_K odd, sqrt(d_K)/2 for d_K even, so
    the minimal polynomial X^2 + BX + C has (B, C) = (1, (1-d_K)/4) or
    (0, -d_K/4) respectively.
    """

    d_K: int
    conductor: int
    B: int
    C: int

    def __init__(self, d_K: int, conductor: int):
        if not is_fundamental_discriminant(d_K):
            raise NotFundamental(f"{d_K} is not a fundamental imaginary quadratic discriminant")
        if conductor < 1:
            raise ValueError("conductor must be a positive integer")
        object.__setattr__(self, "d_K", d_K)
        object.__setattr__(self, "conductor", conductor)
        if d_K % 4 == 1:
            object.__setattr__(self, "B", 1)
            object.__setattr__(self, "C", (1 - d_K) // 4)
        else:
            object.__setattr__(self, "B", 0)
            object.__setattr__(self, "C", -d_K // 4)
        assert self.B * self.B - 4 * self.C == d_K


def tau_point(order: ImagQuadOrder, digits: int = DEFAULT_DIGITS) -> BigComplex:
    """tau_K = (-B + sqrt(d_K))/2 in the upper half-plane."""
    with working(digits):
        root = mp.sqrt(mp.mpf(-order.d_K))
        return BigComplex(mp.mpf(-order.B) / 2, root / 2, digits)


def moebius_apply(m: Mat2, tau):
    """(a*tau + b)/(c*tau + d) for an integer matrix."""
    return (m.a * tau + m.b) / (m.c * tau + m.d)


def _eta_at_reduced(tau, cutoff_digits: int):
    """eta via the pentagonal sum; tau must have Im >= sqrt(3)/2-ish."""
    two_pi_i = 2j * mp.pi
    logq_scale = -2 * mp.pi * tau.imag  # log|q|
    cutoff = -(cutoff_digits + 10) * mp.log(10)
    acc = mp.mpc(1)
    k = 1
    while True:
        done = True
        for kk in (k, -k):
            e = QQ(kk * (3 * kk - 1), 2)
            if e * logq_scale > cutoff:
                done = False
                term = mp.exp(two_pi_i * tau * (int(e.numerator)) / int(e.denominator))
                acc += term if k % 2 == 0 else -term
        if done:
            break
        k += 1
    return mp.exp(two_pi_i * tau / 24) * acc


def _reduce_point(tau):
    """Move tau into the fundamental domain.

    Returns (tau_reduced, zeta24_exponent, inversion_points) with
    eta(tau) = zeta_24^e * prod_j (sqrt(-i*p_j))^{-1} * eta(tau_reduced).
    """
    e = 0
    inversions = []
    for _ in range(100000):
        t = int(mp.nint(tau.real))
        if t:
            # eta(tau) = eta((tau - t) + t) = zeta_24^t eta(tau - t)
            tau = tau - t
            e += t
        if tau.real * tau.real + tau.imag * tau.imag < 1 - mp.mpf(10) ** (-mp.dps + 5):
            inversions.append(tau)
            tau = -1 / tau
        else:
            return tau, e % 24, inversions
    raise RuntimeError("fundamental-domain reduction did not terminate")


def eval_eta(tau, digits: int = DEFAULT_DIGITS, reduce: bool = True) -> BigComplex:
    """eta(tau) to the requested precision."""
    z, digits = as_mpc_and_digits(tau, digits)
    with working(digits):
        if z.imag <= 0:
            raise NonPositiveImaginaryPart("eta requires Im(tau) > 0")
        if not reduce:
            if z.imag < mp.mpf("1e-3"):
                raise NonPositiveImaginaryPart(
                    "direct evaluation refused below Im(tau) = 1e-3; use reduction"
                )
            return BigComplex.make(_eta_at_reduced(z, digits), digits)
        zr, e, invs = _reduce_point(z)
        val = _eta_at_reduced(zr, digits)
        if e:
            val *= mp.expjpi(mp.mpf(2 * e) / 24)
        for p in invs:
            val /= mp.sqrt(-1j * p)
        return BigComplex.make(val, digits)


def eval_eta_quotient(quot: EtaQuotient, tau, digits: int = DEFAULT_DIGITS) -> BigComplex:
    """prod_d eta(d*tau)^{m_d} at a point."""
    z, digits = as_mpc_and_digits(tau, digits)
    with working(digits):
        acc = mp.mpc(1)
        for d, m in quot.exps:
            acc *= eval_eta(d * z, digits).to_mpc() ** m
        return BigComplex.make(acc, digits)


def eval_qseries(series: QSeries, tau, digits: int = DEFAULT_DIGITS) -> BigComplex:
    """Numeric value of a truncated q-series at q = e^{2 pi i tau}.

    The dropped tail is O(|q|^trunc); callers pick tau/trunc so that this
    is below their tolerance.
    """
    z, digits = as_mpc_and_digits(tau, digits)
    with working(digits):
        acc = mp.mpc(0)
        two_pi_i = 2j * mp.pi
        for e, c in series.terms():
            acc += c.to_mpc(mp) * mp.exp(two_pi_i * z * int(e.numerator) / int(e.denominator))
        return BigComplex.make(acc, digits)


def class_invariant_quotient(conductor: int) -> EtaQuotient:
    if conductor % 4 != 0:
        raise ConductorNotDivisibleBy4(f"conductor {conductor} is not divisible by 4")
    return EtaQuotient(conductor, {conductor: 8, conductor // 4: -8})


def class_invariant(order: ImagQuadOrder, digits: int = DEFAULT_DIGITS) -> BigComplex:
    """256 eta(N tau_K)^8 / eta((N/4) tau_K)^8 as a real number.

    The imaginary part is asserted to vanish to precision and dropped.
    """
    quot = class_invariant_quotient(order.conductor)
    tau = tau_point(order, digits)
    with working(digits):
        val = 256 * eval_eta_quotient(quot, tau, digits).to_mpc()
        if abs(val.imag) > mp.mpf(10) ** (-digits + 10) * max(abs(val.real), mp.mpf(1)):
            raise RoundingFailure(
                f"class invariant has unexpected imaginary part {mpmath.nstr(val.imag, 8)}"
            )
        return BigComplex(val.real, mp.mpf(0), digits)


@dataclass(frozen=True)
class IntegralityReport:
    M: int
    d_K: int
    level: int
    degree: int
    coefficients: tuple[int, ...]  # descending, monic
    monic_integral: bool
    constant_divides_power: bool
    max_rounding_residual: str
    digits: int

    def to_json_dict(self) -> dict:
        return {
            "M": self.M,
            "d_K": self.d_K,
            "level": self.level,
            "degree": self.degree,
            "poly": [str(c) for c in self.coefficients],
            "monic_integral": self.monic_integral,
            "constant_divides_power": self.constant_divides_power,
            "max_rounding_residual": self.max_rounding_residual,
            "digits": self.digits,
        }


def integrality_check(M: int, order: ImagQuadOrder, digits: int = DEFAULT_DIGITS) -> IntegralityReport:
    """Reconstruct the minimal polynomial of M*eta(M*tau_K)^2/eta(tau_K)^2.

    The conjugate set is assembled through the reciprocity machinery at
    level 24*M (large enough for the fractional exponents and the eta
    multiplier), deduplicated to distinct values.  Rounding to integers
    self-certifies the orbit: an incomplete or unstable orbit fails loudly.
    """
    if M < 2:
        raise ValueError("M must be at least 2")
    from . import reciprocity  # deferred: reciprocity imports this module

    quot = EtaQuotient(M, {M: 2, 1: -2})
    level = 24 * M
    values = reciprocity.ray_class_orbit_values(order, quot, level, digits, scalar=M)
    with working(digits):
        tol = mp.mpf(10) ** (-mp.mpf(digits) / 2)
        distinct = []
        for v in values:
            if all(abs(v - w) > tol for w in distinct):
                distinct.append(v)
        coeffs, max_resid, _ = reciprocity.round_product_polynomial(distinct, digits)
        degree = len(distinct)
        constant = coeffs[-1]
        divides = constant != 0 and (M ** degree) % abs(constant) == 0
        return IntegralityReport(
            M=M,
            d_K=order.d_K,
            level=level,
            degree=degree,
            coefficients=tuple(coeffs),
            monic_integral=coeffs[0] == 1,
            constant_divides_power=divides,
            max_rounding_residual=mpmath.nstr(max_resid, 8),
            digits=digits,
        )

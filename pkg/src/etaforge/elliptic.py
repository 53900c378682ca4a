"""Siegel functions, Weierstrass values and expansions, and the h_n tower.

Exact q-expansions live on the cyclotomic-rational series ring; the
analytic Weierstrass function doubles as an independent numeric oracle.
The series expansion wp_series is normalized with the (2 pi i)^2 factor
divided out so its coefficients are rational; the analytic lattice sum
returns the raw value, (2 pi i)^2 times the series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from gmpy2 import mpq
from mpmath import mp

from .bigcomplex import BigComplex, as_mpc_and_digits, working
from .cyclotomic import QQ, CyclotomicNumber, as_mpq
from .errors import CongruentVectors, IntegerVector, NotInGamma0, PoleAtLatticePoint
from .etaq import eta_series, eta_quotient_series, h_eta_quotient
from .matrices import Mat2
from .qseries import QSeries


@dataclass(frozen=True)
class FracVector:
    """A rational vector (v1, v2), the index of a point v1*tau + v2."""

    v1: mpq
    v2: mpq

    @staticmethod
    def make(v1, v2) -> "FracVector":
        return FracVector(as_mpq(v1), as_mpq(v2))

    def is_integral(self) -> bool:
        return self.v1.denominator == 1 and self.v2.denominator == 1

    def shifted(self, s1: int, s2: int) -> "FracVector":
        return FracVector(self.v1 + s1, self.v2 + s2)

    def neg(self) -> "FracVector":
        return FracVector(-self.v1, -self.v2)

    def denominator(self) -> int:
        d1, d2 = int(self.v1.denominator), int(self.v2.denominator)
        return d1 * d2 // math.gcd(d1, d2)

    def congruent_mod1(self, other: "FracVector") -> bool:
        return (self.v1 - other.v1).denominator == 1 and (self.v2 - other.v2).denominator == 1


def as_vector(v) -> FracVector:
    if isinstance(v, FracVector):
        return v
    v1, v2 = v
    return FracVector.make(v1, v2)


def _mod1(x: mpq) -> mpq:
    return x - (x.numerator // x.denominator)


def siegel_series(v, trunc) -> QSeries:
    """The Siegel-function q-product for a nonintegral rational vector.

    -q^{(1/2)(v1^2 - v1 + 1/6)} e^{pi i v2 (v1-1)} (1 - q^{v1} e^{2 pi i v2})
    * prod_{n>=1} (1 - q^{n+v1} e^{2 pi i v2})(1 - q^{n-v1} e^{-2 pi i v2}),
    interpreted literally for any v (negative v1 gives a finite Laurent
    tail).  Coefficients live in Q(zeta) for zeta of conductor dividing
    lcm(2 den(v2), den of the leading exponent).
    """
    v = as_vector(v)
    if v.is_integral():
        raise IntegerVector("the Siegel product needs v outside Z^2")
    t = as_mpq(trunc)
    e0 = (v.v1 * v.v1 - v.v1 + QQ(1, 6)) / 2
    phase = CyclotomicNumber.exp_pi_i(v.v2 * (v.v1 - 1))
    zeta = CyclotomicNumber.exp_pi_i(2 * v.v2)
    zeta_inv = CyclotomicNumber.exp_pi_i(-2 * v.v2)

    t_body = t - e0
    # collect binomial factor exponents: v1, n+v1, n-v1
    factors: list[tuple[mpq, CyclotomicNumber]] = [(v.v1, zeta)]
    neg_sum = QQ(0)
    n = 1
    while True:
        added = False
        for e, z in ((n + v.v1, zeta), (n - v.v1, zeta_inv)):
            # a factor can contribute below trunc only if e < t_body - (sum
            # of all negative factor exponents); collect negatives first
            if e < 0:
                factors.append((e, z))
                added = True
        if not added and n > abs(v.v1):
            break
        n += 1
    neg_sum = sum((e for e, _ in factors if e < 0), QQ(0))
    cutoff = t_body - neg_sum
    n = 1
    while True:
        added = False
        for e, z in ((n + v.v1, zeta), (n - v.v1, zeta_inv)):
            if 0 <= e < cutoff:
                factors.append((e, z))
                added = True
        if not added and n >= cutoff + abs(v.v1) + 1:
            break
        n += 1

    neg_part = QSeries.one()
    pos_part = QSeries.one(cutoff)
    for e, z in sorted(factors, key=lambda p: p[0]):
        if e < 0:
            neg_part = neg_part.times_one_plus_term(-z, e)
        elif e < cutoff:
            pos_part = pos_part.times_one_plus_term(-z, e)
    body = neg_part * pos_part
    out = body * QSeries.monomial(e0, -phase)
    return out.truncated(t)


def translate_factor(v, s) -> CyclotomicNumber:
    """Root of unity eps with g_{v+s} = eps * g_v for integer shifts s."""
    v = as_vector(v)
    s1, s2 = int(s[0]), int(s[1])
    sign = -1 if (s1 * s2 + s1 + s2) % 2 else 1
    return sign * CyclotomicNumber.exp_pi_i(-(s1 * v.v2 - s2 * v.v1))


def _canonical_pm(v: FracVector) -> FracVector:
    a = FracVector(_mod1(v.v1), _mod1(v.v2))
    b = FracVector(_mod1(-v.v1), _mod1(-v.v2))
    return a if (a.v1, a.v2) <= (b.v1, b.v2) else b


def wp_series(v, trunc) -> QSeries:
    """Fourier development of the Weierstrass value at v1*tau + v2 on
    [tau, 1], normalized by (2 pi i)^{-2} so coefficients are rational
    multiples of roots of unity.

    With u = q^{v1} e^{2 pi i v2}: 1/12 + u/(1-u)^2
    + sum_{m,k >= 1} k q^{km} (u^k + u^{-k} - 2).  Depends only on
    +-v mod Z^2, which is normalized away up front.
    """
    v = as_vector(v)
    if v.is_integral():
        raise IntegerVector("wp_series needs v outside Z^2")
    v = _canonical_pm(v)
    t = as_mpq(trunc)
    zden = int(v.v2.denominator)
    znum = int(v.v2.numerator)
    zeta_pow = [CyclotomicNumber.exp_pi_i(QQ(2 * znum * j, zden)) for j in range(zden)]

    terms: dict[mpq, CyclotomicNumber] = {}

    def add(e: mpq, c):
        if e >= t:
            return
        cur = terms.get(e)
        cur = c if cur is None else cur + c
        terms[e] = cur

    add(QQ(0), CyclotomicNumber.rational(QQ(1, 12)))
    if v.v1 == 0:
        z = zeta_pow[1 % zden]
        one_minus = CyclotomicNumber.one() - z
        add(QQ(0), z * (one_minus * one_minus).inverse())
    else:
        k = 1
        while k * v.v1 < t:
            add(k * v.v1, k * zeta_pow[k % zden])
            k += 1
    m = 1
    while m - v.v1 < t:
        k = 1
        while True:
            hit = False
            for e, c in (
                (k * (m + v.v1), k * zeta_pow[k % zden]),
                (k * (m - v.v1), k * zeta_pow[(-k) % zden]),
                (QQ(k * m), CyclotomicNumber.rational(-2 * k)),
            ):
                if e < t:
                    add(e, c)
                    hit = True
            if not hit:
                break
            k += 1
        m += 1
    return QSeries.from_terms({e: c for e, c in terms.items() if c}, t)


def wp_lattice_sum(v, tau, radius: int = 200, digits: int | None = None) -> BigComplex:
    """Analytic Weierstrass value at z = v1*tau + v2 on [tau, 1].

    Eisenstein summation: each lattice row is completed in closed form,
    pi^2/sin^2, so only the row index is truncated at the radius:

      -pi^2/3 + pi^2/sin^2(pi z)
      + sum_{m=1}^{radius} [pi^2/sin^2(pi(z - m tau)) +
                            pi^2/sin^2(pi(z + m tau)) - 2 pi^2/sin^2(pi m tau)]

    The dropped tail is O(e^{-2 pi (radius Im tau - |Im z|)}), geometric in
    the radius; the row count is raised above the requested radius when
    that estimate cannot reach the working precision (small Im tau), so
    the returned value is always converged to ~digits digits.
    """
    v = as_vector(v)
    z0, digits = as_mpc_and_digits(tau, digits)
    if v.is_integral():
        raise PoleAtLatticePoint("v1*tau + v2 lies in the period lattice")
    with working(digits):
        if z0.imag <= 0:
            raise PoleAtLatticePoint("tau must lie in the upper half-plane")
        z = (
            mp.mpf(int(v.v1.numerator)) / int(v.v1.denominator) * z0
            + mp.mpf(int(v.v2.numerator)) / int(v.v2.denominator)
        )
        needed = int(
            (digits + 15) * mp.log(10) / (2 * mp.pi * z0.imag) + abs(v.v1) + 2
        )
        rows = max(radius, needed)
        pi2 = mp.pi * mp.pi

        def row(w):
            s = mp.sinpi(w)
            return pi2 / (s * s)

        acc = -pi2 / 3 + row(z)
        for m in range(1, rows + 1):
            acc += row(z - m * z0) + row(z + m * z0) - 2 * row(m * z0)
        return BigComplex.make(acc, digits)


def wp_difference_via_siegel(u, v, trunc) -> QSeries:
    """The exact series -g_{u+v} g_{u-v} eta^4 / (g_u^2 g_v^2).

    Equals the normalized Weierstrass difference wp_series(u) - wp_series(v)
    (same (2 pi i)^{-2} normalization; the proportionality constant is 1,
    pinned by the numeric tests).
    """
    u = as_vector(u)
    v = as_vector(v)
    if u.is_integral() or v.is_integral():
        raise IntegerVector("u and v must lie outside Z^2")
    if u.congruent_mod1(v) or u.congruent_mod1(v.neg()):
        raise CongruentVectors("u = +-v mod Z^2 makes the difference vanish")
    t = as_mpq(trunc)
    pad = QQ(2)
    num = (
        siegel_series(FracVector(u.v1 + v.v1, u.v2 + v.v2), t + pad)
        * siegel_series(FracVector(u.v1 - v.v1, u.v2 - v.v2), t + pad)
        * eta_series(1, t + pad) ** 4
    )
    den = siegel_series(u, t + pad) ** 2 * siegel_series(v, t + pad) ** 2
    out = -(num * den.inverse())
    return out.truncated(t)


H_NUM_VECTOR = FracVector(QQ(1, 2), QQ(1, 2))
H_DEN_VECTOR = FracVector(QQ(0), QQ(1, 2))


def h_n_series(n: int, trunc, route: str = "eta") -> QSeries:
    """The level-2^n tower unit h_n.

    route="eta": expand eta(2^{n-2} t)^12 / eta(2^{n-1} t)^4 eta(2^{n-3} t)^8.
    route="definition": the normalized Weierstrass difference at the
    half-period vectors, evaluated at 2^{n-1} tau over 2^{n-2} tau via
    exact rescaling of the Siegel-product form.
    """
    if n < 3:
        raise ValueError("h_n is defined for n >= 3")
    t = as_mpq(trunc)
    if route == "eta":
        return eta_quotient_series(h_eta_quotient(n), t)
    if route != "definition":
        raise ValueError("route must be 'eta' or 'definition'")
    base_t = t / (1 << (n - 2)) + 2
    base = wp_difference_via_siegel(H_NUM_VECTOR, H_DEN_VECTOR, base_t)
    num = base.rescale(1 << (n - 1))
    den = base.rescale(1 << (n - 2))
    out = num * den.inverse()
    return out.truncated(t)


def gamma0_transport_check(
    n: int, alpha: Mat2, v, tau, digits: int = 100, radius: int = 200, tol_exp: int = -18
) -> bool:
    """Numeric check of the weight-2 transport of wp under Gamma0(2^{n-1}).

    Verifies wp_v(2^{n-1} * (alpha tau)) = (c tau + d)^2 wp_{v'}(2^{n-1} tau)
    with v' = (v1 + (c/2^{n-1}) v2, v2), both sides via lattice sums.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    v = as_vector(v)
    half = 1 << (n - 1)
    if alpha.modulus != 0 or alpha.det() != 1:
        raise NotInGamma0("alpha must be an integer matrix of determinant 1")
    if alpha.c % half != 0:
        raise NotInGamma0(f"lower-left entry {alpha.c} is not divisible by {half}")
    z, digits = as_mpc_and_digits(tau, digits)
    with working(digits):
        az = (alpha.a * z + alpha.b) / (alpha.c * z + alpha.d)
        lhs = wp_lattice_sum(v, half * az, radius, digits).to_mpc()
        vprime = FracVector(v.v1 + QQ(alpha.c, half) * v.v2, v.v2)
        rhs = (alpha.c * z + alpha.d) ** 2 * wp_lattice_sum(
            vprime, half * z, radius, digits
        ).to_mpc()
        return bool(abs(lhs - rhs) <= mp.mpf(10) ** tol_exp * max(abs(lhs), abs(rhs)))

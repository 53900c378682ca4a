"""Explicit Shimura reciprocity: Galois orbits of modular-function values.

The group W of matrices [[t - B*s, -C*s], [s, t]] with unit determinant
mod N (the image of the units of O_K/N under multiplication on the basis
of tau_K) acts on special values h(tau_K).  For functions with rational
q-coefficients the diagonal part of each coset representative acts
trivially, so every conjugate is a plain composition h(lift * tau_K) with
an SL2(Z) lift of the representative's SL2 part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
from mpmath import mp

from .bigcomplex import BigComplex, working
from .cm import DEFAULT_DIGITS, ImagQuadOrder, eval_eta, moebius_apply, tau_point
from .cyclotomic import QQ
from .errors import LevelMismatch, NotFundamental, NotUnimodular, RoundingFailure
from .etaq import EtaQuotient
from .matrices import Mat2


def class_number(d_K: int) -> int:
    """Count reduced primitive binary quadratic forms of discriminant d_K."""
    from .cm import is_fundamental_discriminant

    if not is_fundamental_discriminant(d_K):
        raise NotFundamental(f"{d_K} is not fundamental")
    count = 0
    a = 1
    while 4 * a * a <= 3 * (-d_K):
        for b in range(-a + 1, a + 1):
            num = b * b - d_K
            if num % (4 * a) != 0:
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if a == c and b < 0:
                continue
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            count += 1
        a += 1
    return count


def kronecker_2(d: int) -> int:
    if d % 2 == 0:
        return 0
    r = d % 8
    return 1 if r in (1, 7) else -1


def legendre(d: int, p: int) -> int:
    d %= p
    if d == 0:
        return 0
    return 1 if pow(d, (p - 1) // 2, p) == 1 else -1


def chi_d(d: int, p: int) -> int:
    return kronecker_2(d) if p == 2 else legendre(d, p)


def unit_index(order: ImagQuadOrder) -> int:
    """[O_K^x : O^x]: 1 for the maximal order, else 2 resp. 3 for d = -4, -3."""
    if order.conductor == 1:
        return 1
    if order.d_K == -4:
        return 2
    if order.d_K == -3:
        return 3
    return 1


def degree_formula(order: ImagQuadOrder) -> int:
    """[H_{K,N} : K] = h(d_K) N / [O_K^x:O^x] * prod_{p|N} (1 - chi(p)/p)."""
    from .etaq import prime_factors

    deg = QQ(class_number(order.d_K) * order.conductor, unit_index(order))
    for p, _ in prime_factors(order.conductor):
        deg *= 1 - QQ(chi_d(order.d_K, p), p)
    assert deg.denominator == 1
    return int(deg)


def build_W(order: ImagQuadOrder) -> list[Mat2]:
    """All [[t-Bs, -Cs], [s, t]] with determinant a unit mod the conductor."""
    n = order.conductor
    if n < 2:
        raise ValueError("W is defined for conductor at least 2")
    out = []
    for t in range(n):
        for s in range(n):
            det = (t * t - order.B * s * t + order.C * s * s) % n
            if math.gcd(det, n) == 1:
                out.append(Mat2(t - order.B * s, -order.C * s, s, t, n))
    return out


def kernel_matrices(d_K: int) -> list[Mat2]:
    """Kernel of W -> Gal(K_{N O_K}/H_K): +-I, plus the extra units for
    Q(i) and Q(sqrt(-3))."""
    base = [Mat2.identity(), Mat2.identity().neg()]
    if d_K == -4:
        j = Mat2(0, -1, 1, 0)
        base += [j, j.neg()]
    elif d_K == -3:
        a = Mat2(-1, -1, 1, 0)
        b = Mat2(0, -1, 1, 1)
        base += [a, a.neg(), b, b.neg()]
    return base


def _stabilizer_subgroup(order: ImagQuadOrder) -> set[tuple[int, int, int, int]]:
    """The subgroup of W generated by the kernel and the scalars tI."""
    n = order.conductor
    kernel = [m.reduced(n) for m in kernel_matrices(order.d_K)]
    units = [t for t in range(1, n) if math.gcd(t, n) == 1]
    out = set()
    for t in units:
        for k in kernel:
            out.add(k.scaled(t).entries())
    return out


def coset_reps(order: ImagQuadOrder) -> list[tuple[int, Mat2]]:
    """One representative per coset of W modulo <kernel, tI>, decomposed.

    Each representative gamma is returned as (det gamma, alpha) with
    gamma = [[1,0],[0,det]] * alpha and det(alpha) = 1 mod N; the list has
    length [H_{K,N} : H_K].
    """
    n = order.conductor
    subgroup = _stabilizer_subgroup(order)
    sub_mats = [Mat2(*e, n) for e in subgroup]
    seen: set[tuple[int, int, int, int]] = set()
    reps = []
    # the identity's coset is represented by the identity itself; all other
    # cosets take their first member in the (t, s) scan order
    for gamma in [Mat2.identity(n)] + build_W(order):
        key = gamma.entries()
        if key in seen:
            continue
        for u in sub_mats:
            seen.add((u * gamma).entries())
        det = gamma.det()
        dinv = pow(det, -1, n)
        alpha = Mat2(gamma.a, gamma.b, dinv * gamma.c, dinv * gamma.d, n)
        assert alpha.det() == 1 % n
        reps.append((det, alpha))
    return reps


def sl2_lift(alpha: Mat2) -> Mat2:
    """An SL2(Z) matrix congruent to alpha mod its modulus.

    Lifts the bottom row to a coprime integer pair by a bounded search,
    then corrects the top row through an extended-gcd solve; ties are
    broken by minimizing the lifted top-row magnitude, so the result is
    deterministic.  Entry sizes are O(N^2).
    """
    n = alpha.modulus
    if not n:
        if alpha.det() != 1:
            raise NotUnimodular("integer matrix must already have determinant 1")
        return alpha
    if alpha.det() != 1 % n:
        raise NotUnimodular(f"determinant {alpha.det()} != 1 mod {n}")
    a, b, c, d = alpha.entries()
    c0 = d0 = None
    found = False
    for s_off in range(0, n + 1):
        for s in ({0} if s_off == 0 else (s_off, -s_off)):
            cc = c + s * n
            for t_off in range(0, n + 1):
                for t in ({0} if t_off == 0 else (t_off, -t_off)):
                    dd = d + t * n
                    if math.gcd(cc, dd) == 1:
                        c0, d0 = cc, dd
                        found = True
                        break
                if found:
                    break
            if found:
                break
        if found:
            break
    if not found:  # cannot happen when gcd(c, d, n) = 1
        raise NotUnimodular("no coprime lift of the bottom row found")
    e = a * d0 - b * c0
    f = (e - 1) // n
    assert e - 1 == f * n
    g, u, v = _xgcd(d0, c0)
    assert g == 1
    x0, y0 = -f * u, f * v
    # general solution: x = x0 + k c0, y = y0 + k d0; minimize the top row
    candidates = {0}
    if c0:
        candidates.add(-(a + n * x0) // (n * c0))
    if d0:
        candidates.add(-(b + n * y0) // (n * d0))
    ks = set()
    for k in candidates:
        ks.update(range(int(k) - 2, int(k) + 3))
    best = None
    for k in sorted(ks):
        x, y = x0 + k * c0, y0 + k * d0
        aa, bb = a + n * x, b + n * y
        score = (abs(aa) + abs(bb), aa, bb)
        if best is None or score < best[0]:
            best = (score, Mat2(aa, bb, c0, d0))
    lift = best[1]
    assert lift.det() == 1
    assert lift.reduced(n).entries() == alpha.entries()
    return lift


def _xgcd(x: int, y: int) -> tuple[int, int, int]:
    """(g, u, v) with u*x + v*y = g = gcd(x, y)."""
    old_r, r = x, y
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_u, u = u, old_u - q * u
        old_v, v = v, old_v - q * v
    if old_r < 0:
        old_r, old_u, old_v = -old_r, -old_u, -old_v
    return old_r, old_u, old_v


def _combination_terms(expr) -> list[tuple[QQ, EtaQuotient]]:
    """Accept an EtaQuotient, a (scalar, quotient) pair list, or an
    EtaCombination-like object with .terms."""
    if isinstance(expr, EtaQuotient):
        return [(QQ(1), expr)]
    terms = getattr(expr, "terms", expr)
    return [(QQ(c), q) for c, q in terms]


def _eval_terms_at(terms, z, digits):
    acc = mp.mpc(0)
    for c, quot in terms:
        prod = mp.mpc(1)
        for d, m in quot.exps:
            prod *= eval_eta(d * z, digits).to_mpc() ** m
        acc += mp.mpf(c.numerator) / mp.mpf(c.denominator) * prod
    return acc


@dataclass(frozen=True)
class GaloisOrbit:
    order: ImagQuadOrder
    reps: tuple[tuple[int, Mat2], ...]
    lifts: tuple[Mat2, ...]
    values: tuple[mpmath.mpc, ...]
    digits: int

    def to_json_dict(self) -> dict:
        return {
            "d_K": self.order.d_K,
            "N": self.order.conductor,
            "degree": len(self.values),
            "reps": [[d, m.to_list()] for d, m in self.reps],
            "lifts": [m.to_list() for m in self.lifts],
            "values": [
                BigComplex.make(v, self.digits).to_json_dict() for v in self.values
            ],
            "digits": self.digits,
        }


def conjugates_of_invariant(order: ImagQuadOrder, expr, digits: int = DEFAULT_DIGITS) -> GaloisOrbit:
    """Galois orbit over H_K of a weight-0 rational-coefficient invariant.

    expr is an eta-quotient or rational combination of eta-quotients whose
    q-expansion has rational coefficients; each quotient's level must
    divide the conductor.  The diagonal parts then act trivially and each
    conjugate is the numeric value at lift(alpha) applied to tau_K.
    """
    n = order.conductor
    terms = _combination_terms(expr)
    for _, quot in terms:
        if n % quot.level != 0:
            raise LevelMismatch(
                f"quotient level {quot.level} does not divide conductor {n}"
            )
    reps = coset_reps(order)
    lifts = [sl2_lift(alpha) for _, alpha in reps]
    tk = tau_point(order, digits).to_mpc()
    values = []
    with working(digits):
        for lift in lifts:
            values.append(_eval_terms_at(terms, moebius_apply(lift, tk), digits))
    return GaloisOrbit(order, tuple(reps), tuple(lifts), tuple(values), digits)


def ray_class_orbit_values(
    order: ImagQuadOrder, quot: EtaQuotient, level: int, digits: int, scalar=1
) -> list[mpmath.mpc]:
    """Values of scalar*quot at tau_K under the full W_{K,level}/kernel orbit.

    Used for invariants living in the ray class field rather than a ring
    class field (fractional q-exponents with rational coefficients).
    """
    big = ImagQuadOrder(order.d_K, level)
    kernel = {m.reduced(level).entries() for m in kernel_matrices(order.d_K)}
    seen: set[tuple[int, int, int, int]] = set()
    reps = []
    for gamma in build_W(big):
        key = gamma.entries()
        if key in seen:
            continue
        for k in kernel:
            seen.add((Mat2(*k, level) * gamma).entries())
        det = gamma.det()
        dinv = pow(det, -1, level)
        reps.append(Mat2(gamma.a, gamma.b, dinv * gamma.c, dinv * gamma.d, level))
    tk = tau_point(order, digits).to_mpc()
    terms = [(QQ(scalar), quot)]
    values = []
    with working(digits):
        for alpha in reps:
            lift = sl2_lift(alpha)
            values.append(_eval_terms_at(terms, moebius_apply(lift, tk), digits))
    return values


def round_product_polynomial(values, digits: int) -> tuple[list[int], mpmath.mpf]:
    """Expand prod (X - v) and round to integers; fail loudly if unsafe.

    Returns (descending coefficients, max rounding residual including the
    largest imaginary part encountered).
    """
    with working(digits):
        coeffs = [mp.mpc(1)]
        for v in values:
            nxt = [mp.mpc(0)] * (len(coeffs) + 1)
            for i, c in enumerate(coeffs):
                nxt[i] += c
                nxt[i + 1] -= c * v
            coeffs = nxt
        tol = mp.mpf(10) ** (-mp.mpf(digits) / 2)
        max_resid = mp.mpf(0)
        max_imag = mp.mpf(0)
        out = []
        for c in coeffs:
            r = mp.nint(c.real)
            max_imag = max(max_imag, abs(c.imag))
            max_resid = max(max_resid, abs(c.real - r), abs(c.imag))
            out.append(int(r))
        if max_resid > tol:
            raise RoundingFailure(
                f"coefficient rounding residual {mpmath.nstr(max_resid, 8)} exceeds "
                f"threshold 1e-{digits // 2}; escalate the working precision"
            )
        return out, max_resid, max_imag


@dataclass(frozen=True)
class MinPolyResult:
    coefficients: tuple[int, ...]  # descending, monic
    max_rounding_residual: str
    max_imag_part: str
    digits: int

    def to_json_dict(self) -> dict:
        return {
            "poly": [str(c) for c in self.coefficients],
            "max_rounding_residual": self.max_rounding_residual,
            "max_imag_part": self.max_imag_part,
            "digits": self.digits,
        }


def min_poly_from_orbit(orbit: GaloisOrbit, digits: int | None = None) -> MinPolyResult:
    """Monic integer polynomial with the orbit values as roots.

    The orbit of a real invariant is stable under complex conjugation, so
    the expanded coefficients are real before rounding; their residual
    imaginary parts are reported as a diagnostic.
    """
    digits = digits or orbit.digits
    with working(digits):
        coeffs, max_resid, max_imag = round_product_polynomial(orbit.values, digits)
    return MinPolyResult(
        coefficients=tuple(coeffs),
        max_rounding_residual=mpmath.nstr(max_resid, 8),
        max_imag_part=mpmath.nstr(max_imag, 8),
        digits=digits,
    )


def sign_flip_matrix(m: int, order: ImagQuadOrder) -> Mat2:
    """[[1 - B 2^{m-1}, -C 2^{m-1}], [2^{m-1}, 1]] mod 2^m: the nontrivial
    element of Gal(H_{K,2^m}/H_{K,2^{m-1}})."""
    h = 1 << (m - 1)
    return Mat2(1 - order.B * h, -order.C * h, h, 1, 2 * h)


def verify_sign_flip(m: int, order: ImagQuadOrder, digits: int = DEFAULT_DIGITS) -> bool:
    """Check h_m at the conjugated CM point equals minus its plain value."""
    from .etaq import h_eta_quotient

    if m < 3:
        raise ValueError("the tower step needs m >= 3")
    n = 1 << m
    if order.conductor != n:
        raise LevelMismatch(f"order conductor {order.conductor} != 2^{m}")
    gamma = sign_flip_matrix(m, order)
    det = gamma.det()
    dinv = pow(det, -1, n)
    alpha = Mat2(gamma.a, gamma.b, dinv * gamma.c, dinv * gamma.d, n)
    lift = sl2_lift(alpha)
    quot = h_eta_quotient(m)
    terms = [(QQ(1), quot)]
    tk = tau_point(order, digits).to_mpc()
    with working(digits):
        plain = _eval_terms_at(terms, tk, digits)
        conj = _eval_terms_at(terms, moebius_apply(lift, tk), digits)
        return bool(abs(conj + plain) < mp.mpf(10) ** (-mp.mpf(digits) / 2))

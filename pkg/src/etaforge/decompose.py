"""Constructive decomposition of modular forms into eta-quotient sums.

Weight-0 functions on Gamma0(2^n) with bounded poles are matched against
monomials in the generator family (the three level-4 quotients plus the
h_m tower) by exact rational linear algebra on q-expansions; weight-2k
forms are reduced to weight 0 with a fixed weight-(-2) eta-quotient.
Also: the j expansion and the rational-function relation expressing
j(4 tau) through the level-4 hauptmodul.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement

from gmpy2 import mpq

from .cyclotomic import QQ, as_mpq
from .errors import InsufficientBasis, InsufficientTruncation, NoRelation
from .etaq import EtaQuotient, eta_quotient_series, h_eta_quotient, index_gamma0
from .qseries import QSeries

G04 = EtaQuotient(4, {1: -8, 4: 8})
LEVEL4_UNIT = EtaQuotient(4, {1: -8, 2: 24, 4: -16})
LEVEL4_UNIT_INV = EtaQuotient(4, {1: 8, 2: -24, 4: 16})
WEIGHT_MINUS2 = EtaQuotient(4, {2: 4, 4: -8})


def generator_set(n: int) -> list[EtaQuotient]:
    """Generators of the weight-0 decomposition ring at level 2^n:
    the three level-4 quotients, then h_3 .. h_n lifted to level 2^n."""
    if n < 2:
        raise ValueError("the tower starts at level 4, n >= 2")
    level = 1 << n
    gens = [G04.at_level(level), LEVEL4_UNIT.at_level(level), LEVEL4_UNIT_INV.at_level(level)]
    for m in range(3, n + 1):
        gens.append(h_eta_quotient(m).at_level(level))
    return gens


def sturm_truncation(level: int, weight: int, degree_bound: int) -> int:
    """Comparison order for deciding q-expansion equality.

    max(ceil(weight*index/12), weight) + degree_bound*index + 1: a
    conservative valence-style bound covering both the holomorphic part
    and the cusp poles contributed by degree_bound generator monomials.
    """
    idx = index_gamma0(level)
    w = max(-(-weight * idx // 12), weight)
    return w + degree_bound * idx + 1


@dataclass(frozen=True)
class EtaCombination:
    """A rational linear combination of eta-quotients at one level."""

    level: int
    weight: int
    terms: tuple[tuple[mpq, EtaQuotient], ...]

    def __init__(self, level: int, weight: int, terms):
        items = [(as_mpq(c), q) for c, q in terms if as_mpq(c) != 0]
        seen = set()
        for _, q in items:
            if q.level != level:
                raise ValueError("all quotients must share the combination level")
            if q.exps in seen:
                raise ValueError("quotients must be pairwise distinct")
            seen.add(q.exps)
        items.sort(key=lambda t: t[1].exps)
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "weight", weight)
        object.__setattr__(self, "terms", tuple(items))

    def expand(self, trunc) -> QSeries:
        t = as_mpq(trunc)
        out = QSeries.zero(t)
        for c, q in self.terms:
            out = out + eta_quotient_series(q, t).scaled(c)
        return out

    def to_json_dict(self) -> dict:
        return {
            "level": self.level,
            "weight": self.weight,
            "terms": [
                {"coeff": str(c), "quotient": q.to_json_dict()} for c, q in self.terms
            ],
        }

    @staticmethod
    def from_json_dict(d: dict) -> "EtaCombination":
        return EtaCombination(
            int(d["level"]),
            int(d["weight"]),
            [(as_mpq(t["coeff"]), EtaQuotient.from_json_dict(t["quotient"])) for t in d["terms"]],
        )


@lru_cache(maxsize=None)
def _expanded_quotient(exps: tuple, level: int, trunc_num: int) -> QSeries:
    return eta_quotient_series(EtaQuotient(level, dict(exps)), trunc_num)


@lru_cache(maxsize=None)
def _basis_system(n: int, degree_bound: int):
    """Echelonized q-expansion matrix of generator monomials.

    Returns (monomials, row exponents, pivot data) where pivot data allows
    solving A x = b for each new target by re-playing the recorded row
    reduction.  Monomials are deduplicated by their merged eta-quotient and
    ordered lexicographically by exponent vector.
    """
    level = 1 << n
    gens = generator_set(n)
    order = sturm_truncation(level, 0, degree_bound)
    # monomials of total degree <= degree_bound; pivot preference runs by
    # (degree, lex) so relation columns (reducible monomials) end up free
    # and are zeroed, keeping solutions supported on low-degree monomials
    by_quot: dict[tuple, EtaQuotient] = {}
    vecs: list[tuple[int, ...]] = []
    for total in range(degree_bound + 1):
        for combo in combinations_with_replacement(range(len(gens)), total):
            vec = [0] * len(gens)
            for i in combo:
                vec[i] += 1
            vecs.append(tuple(vec))
    vecs.sort(key=lambda v: (sum(v), v))
    monomials: list[EtaQuotient] = []
    for vec in vecs:
        quot = EtaQuotient(level, {})
        for g, e in zip(gens, vec):
            if e:
                quot = quot.times(g.power(e)).at_level(level)
        if quot.exps in by_quot:
            continue
        by_quot[quot.exps] = quot
        monomials.append(quot)

    min_lead = min(int(q.leading_exponent()) for q in monomials)
    rows = list(range(min_lead, order))
    cols = []
    for quot in monomials:
        series = _expanded_quotient(quot.exps, level, order)
        cols.append([series.coefficient(e).rational_value() for e in rows])
    # exact Gaussian elimination, recording operations for later solves
    nrows, ncols = len(rows), len(monomials)
    mat = [[cols[j][i] for j in range(ncols)] for i in range(nrows)]
    ops: list[tuple] = []  # (pivot_row, col, [(row, factor), ...]) replay script
    pivots: list[tuple[int, int]] = []
    prow = 0
    for col in range(ncols):
        pr = None
        for r in range(prow, nrows):
            if mat[r][col]:
                pr = r
                break
        if pr is None:
            continue
        if pr != prow:
            mat[prow], mat[pr] = mat[pr], mat[prow]
            ops.append(("swap", prow, pr))
        piv = mat[prow][col]
        inv = 1 / piv
        mat[prow] = [x * inv for x in mat[prow]]
        ops.append(("scale", prow, inv))
        elim = []
        for r in range(nrows):
            if r != prow and mat[r][col]:
                f = mat[r][col]
                mat[r] = [x - f * y for x, y in zip(mat[r], mat[prow])]
                elim.append((r, f))
        ops.append(("elim", prow, tuple(elim)))
        pivots.append((prow, col))
        prow += 1
        if prow == nrows:
            break
    return monomials, rows, mat, ops, pivots, order, level


def _solve_cached(n: int, degree_bound: int, bvec: list[mpq]):
    monomials, rows, mat, ops, pivots, order, level = _basis_system(n, degree_bound)
    b = list(bvec)
    for op in ops:
        if op[0] == "swap":
            _, i, j = op
            b[i], b[j] = b[j], b[i]
        elif op[0] == "scale":
            _, i, f = op
            b[i] = b[i] * f
        else:
            _, i, elim = op
            bi = b[i]
            if bi:
                for r, f in elim:
                    b[r] = b[r] - f * bi
    pivot_rows = {r for r, _ in pivots}
    for i, val in enumerate(b):
        if i not in pivot_rows and val:
            raise InsufficientBasis(
                f"no combination matches the target at q^{rows[i]} within "
                f"degree bound {degree_bound}",
                residual_exponent=rows[i],
            )
    x = [QQ(0)] * len(monomials)
    for r, c in pivots:
        x[c] = b[r]
    return monomials, x, order, level


def decompose_weight0(target: QSeries, n: int, degree_bound: int = 6) -> EtaCombination:
    """Express a weight-0 series as a combination of generator monomials.

    The target must be supported on the integer grid with rational
    coefficients and known at least to the comparison order.  The solver
    is exact; the deterministic solution sets all free monomials to zero
    (lexicographically-first support) and drops zero coefficients.
    """
    if n < 2:
        raise ValueError("n >= 2")
    level = 1 << n
    order = sturm_truncation(level, 0, degree_bound)
    if target.trunc is not None and target.trunc < order:
        raise InsufficientTruncation(
            f"target known to O(q^{target.trunc}) but comparison order is {order}"
        )
    if not target.support_is_integral():
        raise ValueError("target exponents must lie on the integer grid")
    monomials, rows, *_ = _basis_system(n, degree_bound)
    if any(e < rows[0] for e, _ in target.terms()):
        raise InsufficientBasis(
            "target pole at infinity exceeds every basis monomial",
            residual_exponent=int(target.leading_exponent()),
        )
    bvec = []
    for e in rows:
        c = target.coefficient(e)
        if not c.is_rational():
            raise ValueError("target coefficients must be rational")
        bvec.append(c.rational_value())
    monomials, x, order, level = _solve_cached(n, degree_bound, bvec)
    combo = EtaCombination(level, 0, list(zip(x, monomials)))
    residual = target.truncated(order)
    for c, q in combo.terms:
        residual = residual - _expanded_quotient(q.exps, level, order).scaled(c)
    if not residual.is_zero():
        raise InsufficientBasis(
            "solver output fails re-expansion against the target",
            residual_exponent=int(residual.leading_exponent()),
        )
    return combo


def decompose_form(target: QSeries, n: int, weight: int, degree_bound: int = 6) -> EtaCombination:
    """Decompose a weight-2k holomorphic form into weight-2k eta-quotients.

    Multiplies by the weight-(-2) quotient eta(2t)^4/eta(4t)^8 to weight 0,
    solves there, and pushes the factor back into each returned quotient.
    """
    if weight < 0 or weight % 2:
        raise ValueError("weight must be an even nonnegative integer")
    k = weight // 2
    if k == 0:
        return decompose_weight0(target, n, degree_bound)
    level = 1 << n
    if target.trunc is None:
        raise InsufficientTruncation("target needs a tracked truncation")
    aux_series = eta_quotient_series(WEIGHT_MINUS2, as_mpq(target.trunc) + 2) ** k
    flat = target * aux_series
    combo0 = decompose_weight0(flat, n, degree_bound)
    back = WEIGHT_MINUS2.power(-k)
    terms = [(c, q.times(back).at_level(level)) for c, q in combo0.terms]
    return EtaCombination(level, weight, terms)


def j_series(trunc) -> QSeries:
    """The modular j-expansion 1/q + 744 + 196884 q + ... via E4^3/Delta."""
    t = as_mpq(trunc)
    tt = t + 3
    n_max = int(tt) + 1
    sigma3 = [0] * (n_max + 1)
    for d in range(1, n_max + 1):
        c = d * d * d
        for m in range(d, n_max + 1, d):
            sigma3[m] += c
    e4 = QSeries.from_terms(
        {0: 1, **{k: 240 * sigma3[k] for k in range(1, n_max + 1)}}, tt
    )
    from .etaq import eta_series

    delta = eta_series(1, tt + 2) ** 24
    return (e4 ** 3 * delta.inverse()).truncated(t)


@dataclass(frozen=True)
class RationalRelation:
    """A(X)/B(X) with exact rational coefficients, ascending order, coprime."""

    numer: tuple[mpq, ...]
    denom: tuple[mpq, ...]

    def evaluate_series(self, g: QSeries) -> tuple[QSeries, QSeries]:
        return _poly_at_series(self.numer, g), _poly_at_series(self.denom, g)

    def evaluate_mpc(self, x, ctx):
        num = ctx.mpc(0)
        for c in reversed(self.numer):
            num = num * x + ctx.mpf(c.numerator) / ctx.mpf(c.denominator)
        den = ctx.mpc(0)
        for c in reversed(self.denom):
            den = den * x + ctx.mpf(c.numerator) / ctx.mpf(c.denominator)
        return num / den

    def ord_at_zero(self, which: str) -> int:
        coeffs = self.numer if which == "numer" else self.denom
        for i, c in enumerate(coeffs):
            if c:
                return i
        return len(coeffs)

    def to_json_dict(self) -> dict:
        return {"A": [str(c) for c in self.numer], "B": [str(c) for c in self.denom]}


def _poly_at_series(coeffs, g: QSeries) -> QSeries:
    out = QSeries.zero(g.trunc)
    power = QSeries.one(g.trunc)
    for i, c in enumerate(coeffs):
        if i:
            power = power * g
        if c:
            out = out + power.scaled(c)
    return out


def _poly_deg(p) -> int:
    for i in range(len(p) - 1, -1, -1):
        if p[i]:
            return i
    return -1


def _poly_gcd(a: list[mpq], b: list[mpq]) -> list[mpq]:
    a, b = list(a), list(b)
    while _poly_deg(b) >= 0:
        db = _poly_deg(b)
        while _poly_deg(a) >= db:
            da = _poly_deg(a)
            f = a[da] / b[db]
            for i in range(db + 1):
                a[i + da - db] -= f * b[i]
        a, b = b, a
    d = _poly_deg(a)
    return [c / a[d] for c in a[: d + 1]] if d >= 0 else []


def _poly_divide(a: list[mpq], b: list[mpq]) -> list[mpq]:
    a = list(a)
    db = _poly_deg(b)
    out = [QQ(0)] * (max(_poly_deg(a) - db + 1, 0))
    while _poly_deg(a) >= db:
        da = _poly_deg(a)
        f = a[da] / b[db]
        out[da - db] = f
        for i in range(db + 1):
            a[i + da - db] -= f * b[i]
    return out


def j4_hauptmodul_relation(degree_bound: int = 6) -> RationalRelation:
    """Polynomials A, B with A(g) = j(4 tau) B(g) for g the level-4
    hauptmodul eta(4t)^8/eta(t)^8, found at the smallest degree admitting
    a relation and normalized to coprime integer-primitive form with the
    lowest nonzero B coefficient positive."""
    if degree_bound < 6:
        raise ValueError("degree_bound must be at least 6")
    for deg in range(4, degree_bound + 1):
        rel = _try_j4_relation(deg)
        if rel is not None:
            return rel
    raise NoRelation(f"no relation within degree bound {degree_bound}")


def _try_j4_relation(deg: int) -> RationalRelation | None:
    order = 2 * deg + 14
    g = eta_quotient_series(G04, order + 1)
    j4 = j_series(QQ(order + 9, 4)).rescale(4).truncated(order + 1)
    unknowns = 2 * (deg + 1)
    gpows = [QSeries.one(order + 1)]
    for _ in range(deg):
        gpows.append(gpows[-1] * g)
    columns = [p for p in gpows] + [-(p * j4) for p in gpows]
    usable = min(int(c.trunc) for c in columns)
    exps = [QQ(e) for e in range(-4, usable)]
    mat = []
    for e in exps:
        mat.append([c.coefficient(e).rational_value() for c in columns])
    kernel = _kernel_vector(mat, unknowns)
    if kernel is None:
        return None
    a = kernel[: deg + 1]
    b = kernel[deg + 1 :]
    if all(c == 0 for c in b) or all(c == 0 for c in a):
        return None
    gcd_poly = _poly_gcd(list(a), list(b))
    if len(gcd_poly) > 1:
        a = _poly_divide(list(a), gcd_poly)
        b = _poly_divide(list(b), gcd_poly)
    # integer-primitive normalization, lowest nonzero B coefficient positive
    denlcm = 1
    for c in list(a) + list(b):
        denlcm = denlcm * int(c.denominator) // math.gcd(denlcm, int(c.denominator))
    ai = [c * denlcm for c in a]
    bi = [c * denlcm for c in b]
    content = 0
    for c in ai + bi:
        content = math.gcd(content, int(c))
    ai = [QQ(int(c) // content) for c in ai]
    bi = [QQ(int(c) // content) for c in bi]
    lead = next(c for c in bi if c)
    if lead < 0:
        ai = [-c for c in ai]
        bi = [-c for c in bi]
    while ai and not ai[-1]:
        ai.pop()
    while bi and not bi[-1]:
        bi.pop()
    return RationalRelation(tuple(ai), tuple(bi))


def _kernel_vector(mat: list[list[mpq]], ncols: int) -> list[mpq] | None:
    rows = [list(r) for r in mat]
    nrows = len(rows)
    piv_of_col: dict[int, int] = {}
    prow = 0
    for col in range(ncols):
        pr = None
        for r in range(prow, nrows):
            if rows[r][col]:
                pr = r
                break
        if pr is None:
            continue
        rows[prow], rows[pr] = rows[pr], rows[prow]
        piv = rows[prow][col]
        rows[prow] = [x / piv for x in rows[prow]]
        for r in range(nrows):
            if r != prow and rows[r][col]:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[prow])]
        piv_of_col[col] = prow
        prow += 1
        if prow == nrows:
            break
    free = [c for c in range(ncols) if c not in piv_of_col]
    if not free:
        return None
    # choose the last free column = 1, others 0 (deterministic)
    fc = free[-1]
    x = [QQ(0)] * ncols
    x[fc] = QQ(1)
    for col, r in piv_of_col.items():
        x[col] = -rows[r][fc]
    return x

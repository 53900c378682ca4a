"""Dedekind eta expansions, eta-quotients, and the modularity criterion.

An eta-quotient at level N is a finite product over divisors d | N of
eta(d*tau)^{m_d}.  The boolean criterion (parity of sum m_d, the two
congruences mod 24, squareness of prod d^{m_d}) decides meromorphic
modularity on Gamma0(N); cusp orders decide holomorphy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from gmpy2 import mpq

from .cyclotomic import QQ, as_mpq
from .qseries import QSeries


def divisors(n: int) -> list[int]:
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


@lru_cache(maxsize=None)
def prime_factors(n: int) -> tuple[tuple[int, int], ...]:
    out = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += 1
    if m > 1:
        out.append((m, 1))
    return tuple(out)


def index_gamma0(n: int) -> int:
    """Index of Gamma0(n) in SL2(Z): n * prod_{p | n} (1 + 1/p)."""
    idx = QQ(n)
    for p, _ in prime_factors(n):
        idx *= 1 + QQ(1, p)
    return int(idx)


def eta_series(scale, trunc) -> QSeries:
    """Expansion of eta(r*tau) = q^{r/24} prod (1 - q^{rn}).

    Uses the pentagonal-number support: the coefficient at
    r*(k(3k-1)/2 + 1/24) is (-1)^k, all others vanish.
    """
    r = as_mpq(scale)
    t = as_mpq(trunc)
    if r <= 0:
        raise ValueError("scale must be positive")
    if t <= r / 24:
        raise ValueError("truncation must exceed the leading exponent scale/24")
    terms = {}
    k = 0
    while True:
        placed = False
        for kk in ((k, -k) if k else (0,)):
            e = r * (QQ(kk * (3 * kk - 1), 2) + QQ(1, 24))
            if e < t:
                terms[e] = 1 if kk % 2 == 0 else -1
                placed = True
        if not placed and k > 0:
            break
        k += 1
    return QSeries.from_terms(terms, t)


@dataclass(frozen=True)
class EtaQuotient:
    """Level N plus the exponent map {d | N: m_d}; zero exponents dropped."""

    level: int
    exps: tuple[tuple[int, int], ...]

    def __init__(self, level: int, exps):
        if level < 1:
            raise ValueError("level must be a positive integer")
        items = sorted((int(d), int(m)) for d, m in dict(exps).items() if int(m) != 0)
        for d, _ in items:
            if d < 1 or level % d != 0:
                raise ValueError(f"divisor {d} does not divide level {level}")
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "exps", tuple(items))

    def exponent_map(self) -> dict[int, int]:
        return dict(self.exps)

    def exponent(self, d: int) -> int:
        return self.exponent_map().get(d, 0)

    def weight(self) -> mpq:
        return QQ(sum(m for _, m in self.exps), 2)

    def leading_exponent(self) -> mpq:
        return QQ(sum(d * m for d, m in self.exps), 24)

    def times(self, other: "EtaQuotient") -> "EtaQuotient":
        level = self.level * other.level // math.gcd(self.level, other.level)
        exps = self.exponent_map()
        for d, m in other.exps:
            exps[d] = exps.get(d, 0) + m
        return EtaQuotient(level, exps)

    def power(self, k: int) -> "EtaQuotient":
        return EtaQuotient(self.level, {d: m * k for d, m in self.exps})

    def at_level(self, level: int) -> "EtaQuotient":
        return EtaQuotient(level, dict(self.exps))

    def rescaled(self, factor: int) -> "EtaQuotient":
        """The quotient with tau -> factor*tau, i.e. every divisor scaled."""
        return EtaQuotient(self.level * factor, {d * factor: m for d, m in self.exps})

    def to_json_dict(self) -> dict:
        return {"level": self.level, "exps": {str(d): m for d, m in self.exps}}

    @staticmethod
    def from_json_dict(d: dict) -> "EtaQuotient":
        return EtaQuotient(int(d["level"]), {int(k): int(v) for k, v in d["exps"].items()})

    def __repr__(self):
        body = " ".join(f"eta({d}t)^{m}" for d, m in self.exps) or "1"
        return f"EtaQuotient(level {self.level}: {body})"


def eta_quotient_series(quot: EtaQuotient, trunc) -> QSeries:
    """q-expansion of the eta-quotient to the requested truncation."""
    t = as_mpq(trunc)
    lead = quot.leading_exponent()
    if t <= lead:
        raise ValueError("truncation must exceed the leading exponent")
    pad = sum((abs(m) + 2) * QQ(d, 24) for d, m in quot.exps) + 1
    res = QSeries.one()
    for d, m in quot.exps:
        res = res * eta_series(d, t + pad) ** m
    res = res.truncated(t)
    assert res.trunc == t
    return res


@dataclass(frozen=True)
class ModularityReport:
    weight: mpq
    cond_parity: bool
    cond_24a: bool
    cond_24b: bool
    cond_square: bool

    @property
    def passes(self) -> bool:
        return self.cond_parity and self.cond_24a and self.cond_24b and self.cond_square

    def to_json_dict(self) -> dict:
        return {
            "weight": str(self.weight),
            "cond_parity": self.cond_parity,
            "cond_24a": self.cond_24a,
            "cond_24b": self.cond_24b,
            "cond_square": self.cond_square,
            "passes": self.passes,
        }


def ligozat_check(quot: EtaQuotient) -> ModularityReport:
    """The three-part modularity criterion on Gamma0(level).

    Checks: sum m_d even; sum d*m_d and sum (N/d)*m_d divisible by 24;
    prod d^{m_d} a rational square (d > 0, so sign never interferes).
    """
    n = quot.level
    s = sum(m for _, m in quot.exps)
    sa = sum(d * m for d, m in quot.exps)
    sb = sum((n // d) * m for d, m in quot.exps)
    prime_parity: dict[int, int] = {}
    for d, m in quot.exps:
        for p, e in prime_factors(d):
            prime_parity[p] = (prime_parity.get(p, 0) + e * m) % 2
    return ModularityReport(
        weight=QQ(s, 2),
        cond_parity=s % 2 == 0,
        cond_24a=sa % 24 == 0,
        cond_24b=sb % 24 == 0,
        cond_square=all(v == 0 for v in prime_parity.values()),
    )


def cusp_representatives(level: int) -> list[tuple[int, int]]:
    """Canonical coprime pairs (a, c), one per Gamma0(level) cusp class."""
    reps = []
    for c in divisors(level):
        g = math.gcd(c, level // c)
        residues = [r for r in range(g) if math.gcd(r, g) == 1] or [0]
        for r in residues:
            a = r
            while math.gcd(a, c) != 1:
                a += g
            reps.append((a, c))
    return reps


def cusp_orders(quot: EtaQuotient) -> dict[tuple[int, int], mpq]:
    """Vanishing order at each cusp a/c.

    Order at denominator c is (N/24) * sum_{delta | N}
    gcd(c, delta)^2 m_delta / (gcd(c, N/c) * c * delta); the total over the
    cusp set equals weight * index(N) / 12.
    """
    n = quot.level
    out = {}
    for a, c in cusp_representatives(n):
        acc = QQ(0)
        for d, m in quot.exps:
            acc += QQ(math.gcd(c, d) ** 2 * m, math.gcd(c, n // c) * c * d)
        out[(a, c)] = QQ(n, 24) * acc
    return out


def order_at_infinity(quot: EtaQuotient) -> mpq:
    return cusp_orders(quot)[(1, quot.level)] if quot.level > 1 else cusp_orders(quot)[(0, 1)]


def h_eta_quotient(n: int) -> EtaQuotient:
    """The weight-0 tower quotient at level 2^n (n >= 3):
    eta(2^{n-2} tau)^12 / (eta(2^{n-1} tau)^4 eta(2^{n-3} tau)^8)."""
    if n < 3:
        raise ValueError("the tower quotient needs n >= 3")
    return EtaQuotient(
        1 << n, {1 << (n - 3): -8, 1 << (n - 2): 12, 1 << (n - 1): -4}
    )


def enumerate_holomorphic(level: int, weight: int, bound: int) -> list[EtaQuotient]:
    """All holomorphic eta-quotients of the given even weight at the level.

    Searches the exponent box |m_d| <= bound, keeps those passing the
    modularity criterion with every cusp order >= 0, and returns them in
    lexicographic (d, m_d) order.  The weight equation and the first
    congruence pin the last two exponents to an arithmetic progression,
    so only the remaining divisors are scanned.
    """
    if weight < 0 or weight % 2 != 0:
        raise ValueError("weight must be an even nonnegative integer")
    divs = divisors(level)
    target = 2 * weight
    found = []

    def accept(exps: dict[int, int]):
        quot = EtaQuotient(level, exps)
        rep = ligozat_check(quot)
        if rep.passes and all(v >= 0 for v in cusp_orders(quot).values()):
            found.append(quot)

    if len(divs) == 1:
        if abs(target) <= bound:
            accept({1: target} if target else {})
        found.sort(key=lambda e: e.exps)
        return found

    free, u, w = divs[:-2], divs[-2], divs[-1]
    g = math.gcd(u - w, 24)
    step = 24 // g
    uw_inv = pow((u - w) // g % step, -1, step) if step > 1 else 0
    # every cusp order is a positive-coefficient linear form in the
    # exponents, so a branch whose best completion at some cusp stays
    # negative is dead; rows are integerized per distinct denominator c
    cusp_rows = []
    for c in sorted({c for _, c in cusp_representatives(level)}):
        gc = math.gcd(c, level // c)
        row = [math.gcd(c, d) ** 2 * (gc * c * level) // (gc * c * d) for d in divs]
        cusp_rows.append(row)
    nrows = len(cusp_rows)
    suffix = [[0] * nrows for _ in range(len(free) + 1)]
    for j, row in enumerate(cusp_rows):
        suffix[len(free)][j] = row[-2] + row[-1]
    for i in range(len(free) - 1, -1, -1):
        for j, row in enumerate(cusp_rows):
            suffix[i][j] = suffix[i + 1][j] + row[i]

    def leaf(partial: dict[int, int], total: int, sa: int, sb: int):
        # m_u + m_w = S0; u m_u + w m_w = -sa mod 24 pins m_u mod step
        s0 = target - total
        rhs = (-sa - w * s0) % 24
        if rhs % g:
            return
        r0 = (rhs // g * uw_inv) % step if step > 1 else 0
        start = -bound + ((r0 + bound) % step)
        for mu in range(start, bound + 1, step):
            mw = s0 - mu
            if abs(mw) > bound:
                continue
            if ((level // u) * mu + (level // w) * mw + sb) % 24:
                continue
            exps = dict(partial)
            if mu:
                exps[u] = mu
            if mw:
                exps[w] = mw
            accept(exps)

    def rec(i: int, partial: dict[int, int], total: int, sa: int, sb: int, orders):
        suf = suffix[i]
        for j in range(nrows):
            if orders[j] + bound * suf[j] < 0:
                return
        if i == len(free):
            leaf(partial, total, sa, sb)
            return
        d = free[i]
        for m in range(-bound, bound + 1):
            if m:
                partial[d] = m
            rec(
                i + 1,
                partial,
                total + m,
                sa + d * m,
                sb + (level // d) * m,
                [o + row[i] * m for o, row in zip(orders, cusp_rows)],
            )
            partial.pop(d, None)

    rec(0, {}, 0, 0, 0, [0] * nrows)
    found.sort(key=lambda e: e.exps)
    return found

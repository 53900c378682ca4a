"""Shared brute-force oracles, independent of the library's series engine.

The dense helpers operate on plain coefficient lists over exact rationals
and are deliberately naive: convolution products, long-division inverses,
term-by-term geometric expansion.  Expected values frozen into tests were
produced by these or by closed forms, never by the code under test.
"""

import sys
from pathlib import Path

from gmpy2 import mpq

SRC = Path(__file__).resolve().parent.parent / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))


def dense_mul(a, b, order):
    """Convolution of dense coefficient lists, truncated at the order."""
    out = [mpq(0)] * order
    for i, x in enumerate(a):
        if not x or i >= order:
            continue
        for j, y in enumerate(b):
            if i + j >= order:
                break
            if y:
                out[i + j] += x * y
    return out


def dense_inv(a, order):
    """Long-division inverse of a dense list with a[0] != 0."""
    out = [mpq(0)] * order
    out[0] = 1 / mpq(a[0])
    for n in range(1, order):
        acc = mpq(0)
        for k in range(1, min(n, len(a) - 1) + 1):
            if a[k]:
                acc += mpq(a[k]) * out[n - k]
        out[n] = -acc / mpq(a[0])
    return out


def dense_pow(a, k, order):
    out = [mpq(1)] + [mpq(0)] * (order - 1)
    for _ in range(k):
        out = dense_mul(out, a, order)
    return out


def brute_euler_product(order, step=1):
    """prod_{n>=1} (1 - x^{step*n}) as a dense list to the order."""
    out = [mpq(1)] + [mpq(0)] * (order - 1)
    n = step
    while n < order:
        nxt = list(out)
        for i, c in enumerate(out):
            if c and i + n < order:
                nxt[i + n] -= c
        out = nxt
        n += step
    return out

"""2x2 integer matrices, over Z (modulus 0) or reduced mod N."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NotUnimodular


@dataclass(frozen=True)
class Mat2:
    a: int
    b: int
    c: int
    d: int
    modulus: int = 0

    def __post_init__(self):
        n = self.modulus
        if n < 0:
            raise ValueError("modulus must be nonnegative")
        if n:
            for name in ("a", "b", "c", "d"):
                object.__setattr__(self, name, getattr(self, name) % n)

    @staticmethod
    def identity(modulus: int = 0) -> "Mat2":
        return Mat2(1, 0, 0, 1, modulus)

    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def det(self) -> int:
        det = self.a * self.d - self.b * self.c
        return det % self.modulus if self.modulus else det

    def __mul__(self, other: "Mat2") -> "Mat2":
        if self.modulus != other.modulus:
            raise ValueError("matrix product requires a common modulus")
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            self.modulus,
        )

    def reduced(self, n: int) -> "Mat2":
        return Mat2(self.a, self.b, self.c, self.d, n)

    def transpose(self) -> "Mat2":
        return Mat2(self.a, self.c, self.b, self.d, self.modulus)

    def neg(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d, self.modulus)

    def scaled(self, t: int) -> "Mat2":
        return Mat2(t * self.a, t * self.b, t * self.c, t * self.d, self.modulus)

    def inverse_mod(self) -> "Mat2":
        """Inverse in GL2(Z/N); requires modulus > 0 and unit determinant."""
        n = self.modulus
        if not n:
            raise ValueError("inverse_mod needs a positive modulus")
        det = self.det()
        if math.gcd(det, n) != 1:
            raise NotUnimodular(f"determinant {det} is not a unit mod {n}")
        inv = pow(det, -1, n)
        return Mat2(inv * self.d, -inv * self.b, -inv * self.c, inv * self.a, n)

    def to_list(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]

    def __repr__(self):
        tail = f" mod {self.modulus}" if self.modulus else ""
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]{tail}"

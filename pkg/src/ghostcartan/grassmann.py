"""Numeric Grassmann numbers over G anticommuting seeds.

A number is a complex array of length ``2**G`` indexed by seed subsets
(bit k = seed theta_{k+1}); basis monomials are products in increasing seed
order.  Arrays may carry leading batch axes; products act on the last axis.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .algebra import _inversions

__all__ = ["GrassmannAlgebra", "GrassmannNumber"]


class GrassmannAlgebra:
    def __init__(self, G: int):
        if G < 0:
            raise ValueError("number of seeds must be non-negative")
        self.G = G
        self.size = 1 << G
        left, right, sign, starts = [], [], [], []
        # pairs (i, j) with i | j == t, grouped by target t so products reduce with reduceat
        for t in range(self.size):
            starts.append(len(left))
            i = t
            while True:
                left.append(i)
                right.append(t ^ i)
                sign.append(-1.0 if _inversions(i, t ^ i) & 1 else 1.0)
                if i == 0:
                    break
                i = (i - 1) & t
        self._left = np.array(left)
        self._right = np.array(right)
        self._sign = np.array(sign)
        self._starts = np.array(starts)
        self.odd_mask = np.array([bin(k).count("1") % 2 == 1 for k in range(self.size)])

    @staticmethod
    @lru_cache(maxsize=None)
    def of(G: int) -> "GrassmannAlgebra":
        return GrassmannAlgebra(G)

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Product along the last axis; leading axes broadcast."""
        vals = a[..., self._left] * b[..., self._right] * self._sign
        return np.add.reduceat(vals, self._starts, axis=-1)

    def one(self, dtype=complex) -> np.ndarray:
        out = np.zeros(self.size, dtype=dtype)
        out[0] = 1
        return out

    def seed(self, k: int, dtype=complex) -> np.ndarray:
        """theta_k with 1-based k."""
        if not 1 <= k <= self.G:
            raise IndexError(f"seed {k} out of range 1..{self.G}")
        out = np.zeros(self.size, dtype=dtype)
        out[1 << (k - 1)] = 1
        return out

    @staticmethod
    def mask(seeds) -> int:
        return sum(1 << (k - 1) for k in seeds)


class GrassmannNumber:
    """Convenience wrapper around one coefficient array."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, G: int, coeffs=None):
        self.algebra = GrassmannAlgebra.of(G)
        if coeffs is None:
            coeffs = np.zeros(self.algebra.size, dtype=complex)
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (self.algebra.size,):
            raise ValueError(f"expected {self.algebra.size} coefficients")
        self.coeffs = coeffs

    @classmethod
    def scalar(cls, G: int, value) -> "GrassmannNumber":
        return cls(G, value * GrassmannAlgebra.of(G).one())

    @classmethod
    def seed(cls, G: int, k: int) -> "GrassmannNumber":
        return cls(G, GrassmannAlgebra.of(G).seed(k))

    @property
    def G(self) -> int:
        return self.algebra.G

    @property
    def body(self) -> complex:
        return self.coeffs[0]

    def __getitem__(self, seeds) -> complex:
        """Coefficient of the product of the given seeds (increasing order)."""
        return self.coeffs[GrassmannAlgebra.mask(seeds)]

    def even(self) -> "GrassmannNumber":
        return GrassmannNumber(self.G, np.where(self.algebra.odd_mask, 0, self.coeffs))

    def odd(self) -> "GrassmannNumber":
        return GrassmannNumber(self.G, np.where(self.algebra.odd_mask, self.coeffs, 0))

    def _coerce(self, other) -> "GrassmannNumber":
        if isinstance(other, GrassmannNumber):
            if other.G != self.G:
                raise ValueError("mismatched number of seeds")
            return other
        return GrassmannNumber.scalar(self.G, other)

    def __add__(self, other):
        return GrassmannNumber(self.G, self.coeffs + self._coerce(other).coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        return GrassmannNumber(self.G, self.coeffs - self._coerce(other).coeffs)

    def __neg__(self):
        return GrassmannNumber(self.G, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, GrassmannNumber):
            return GrassmannNumber(self.G, self.algebra.mul(self.coeffs, self._coerce(other).coeffs))
        return GrassmannNumber(self.G, self.coeffs * other)

    def __rmul__(self, other):
        return GrassmannNumber(self.G, self.coeffs * other)

    def __repr__(self):
        parts = []
        for k, v in enumerate(self.coeffs):
            if v:
                seeds = "".join(f"t{b + 1}" for b in range(self.G) if k >> b & 1) or "1"
                parts.append(f"{v:.6g}*{seeds}")
        return "GrassmannNumber(" + (" + ".join(parts) or "0") + ")"

"""Truncated Taylor series ("jets") with the arithmetic needed for Gevrey steps.

A jet of order K stores ``c[k] = f^(k)(t0) / k!`` for ``k = 0..K``. Products,
quotients and the elementary functions below use the classical power-series
recurrences, so derivatives of any order come out exact up to roundoff.
"""
from __future__ import annotations

import math

import numpy as np


class Jet:
    __slots__ = ("c",)

    def __init__(self, coefficients):
        c = np.array(coefficients, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("jet coefficients must be a non-empty 1-D sequence")
        self.c = c

    @classmethod
    def variable(cls, t0: float, order: int) -> "Jet":
        c = np.zeros(order + 1)
        c[0] = t0
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, value: float, order: int) -> "Jet":
        c = np.zeros(order + 1)
        c[0] = value
        return cls(c)

    @property
    def order(self) -> int:
        return self.c.size - 1

    @property
    def value(self) -> float:
        return float(self.c[0])

    def derivatives(self) -> np.ndarray:
        """``[f, f', f'', ...]`` at the expansion point."""
        k = np.arange(self.c.size)
        return self.c * np.array([math.factorial(int(i)) for i in k], dtype=float)

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.order != self.order:
                raise ValueError("jet orders differ")
            return other
        return Jet.constant(float(other), self.order)

    def __repr__(self):
        return f"Jet({self.c.tolist()})"

    def __neg__(self):
        return Jet(-self.c)

    def __add__(self, other):
        return Jet(self.c + self._coerce(other).c)

    __radd__ = __add__

    def __sub__(self, other):
        return Jet(self.c - self._coerce(other).c)

    def __rsub__(self, other):
        return Jet(self._coerce(other).c - self.c)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * float(other))
        b = self._coerce(other).c
        a = self.c
        n = a.size
        out = np.empty(n)
        for k in range(n):
            out[k] = a[: k + 1] @ b[k::-1]
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c / float(other))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def reciprocal(self) -> "Jet":
        a = self.c
        if a[0] == 0:
            raise ZeroDivisionError("reciprocal of a jet with zero constant term")
        out = np.empty_like(a)
        out[0] = 1.0 / a[0]
        for k in range(1, a.size):
            out[k] = -(a[1 : k + 1] @ out[k - 1 :: -1]) / a[0]
        return Jet(out)

    def __pow__(self, alpha):
        """Real power via ``k a0 p_k = sum_j (alpha j - (k - j)) a_j p_{k-j}``."""
        alpha = float(alpha)
        a = self.c
        if a[0] <= 0:
            raise ValueError("real power needs a positive constant term")
        out = np.empty_like(a)
        out[0] = a[0] ** alpha
        for k in range(1, a.size):
            j = np.arange(1, k + 1)
            out[k] = np.sum((alpha * j - (k - j)) * a[1 : k + 1] * out[k - 1 :: -1]) / (k * a[0])
        return Jet(out)

    def exp(self) -> "Jet":
        a = self.c
        out = np.empty_like(a)
        out[0] = math.exp(a[0]) if a[0] > -745.2 else 0.0
        for k in range(1, a.size):
            j = np.arange(1, k + 1)
            out[k] = np.sum(j * a[1 : k + 1] * out[k - 1 :: -1]) / k
        return Jet(out)

    def log(self) -> "Jet":
        a = self.c
        if a[0] <= 0:
            raise ValueError("log needs a positive constant term")
        out = np.empty_like(a)
        out[0] = math.log(a[0])
        for k in range(1, a.size):
            j = np.arange(1, k)
            out[k] = (a[k] - np.sum(j * out[1:k] * a[k - 1 : 0 : -1]) / k) / a[0]
        return Jet(out)

    def integrate(self, constant: float = 0.0) -> "Jet":
        """Antiderivative truncated to the same order."""
        k = np.arange(1, self.c.size)
        out = np.empty_like(self.c)
        out[0] = constant
        out[1:] = self.c[:-1] / k
        return Jet(out)

    def rescale(self, factor: float) -> "Jet":
        """Jet of ``t -> f(factor * t)`` given the jet of ``f``."""
        return Jet(self.c * float(factor) ** np.arange(self.c.size))

"""Exact arithmetic on the lattice spanned by the N-th roots of unity.

A walk position ``sum_k m_k * zeta**k`` (``zeta = exp(2 pi i / N)``) is stored as
its remainder modulo the cyclotomic polynomial Phi_N.  The powers
``1, zeta, ..., zeta**(phi(N)-1)`` are a basis of Q(zeta), so two positions are
equal as complex numbers exactly when their remainders agree.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from functools import lru_cache

from .errors import InvalidOrderError, OrderMismatchError

MAX_DEGREE = 64


@dataclass(frozen=True)
class CyclotomicPolynomial:
    order: int
    coeffs: tuple[int, ...]  # ascending powers, monic

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


def _divide_exact(num: list[int], den: list[int]) -> list[int]:
    """Quotient of integer polynomials (ascending coefficients), den monic."""
    num = list(num)
    dq = len(den) - 1
    quot = [0] * (len(num) - dq)
    for i in range(len(num) - 1, dq - 1, -1):
        q = num[i]
        quot[i - dq] = q
        if q:
            for j, d in enumerate(den):
                num[i - dq + j] -= q * d
    if any(num[:dq]):
        raise ArithmeticError("inexact polynomial division")
    return quot


@lru_cache(maxsize=None)
def _phi(n: int) -> tuple[int, ...]:
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _divide_exact(poly, list(_phi(d)))
    return tuple(poly)


def cyclotomic_polynomial(order: int) -> CyclotomicPolynomial:
    """Phi_N from the divisor recurrence ``x**N - 1 = prod_{d | N} Phi_d``."""
    if not isinstance(order, int) or order < 2:
        raise InvalidOrderError(f"order must be an integer >= 2, got {order!r}")
    return CyclotomicPolynomial(order, _phi(order))


@lru_cache(maxsize=None)
def _monomial_table(order: int) -> tuple[tuple[int, ...], ...]:
    # row e = canonical coefficients of x**e, 0 <= e < N
    phi = cyclotomic_polynomial(order).coeffs
    deg = len(phi) - 1
    if deg > MAX_DEGREE:
        raise InvalidOrderError(
            f"phi({order}) = {deg} exceeds the lattice degree cap {MAX_DEGREE}"
        )
    rows = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(order):
        rows.append(tuple(cur))
        # multiply by x, then fold x**deg = -(phi_0 + ... + phi_{deg-1} x**(deg-1))
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * p for c, p in zip(cur, phi[:deg])]
    return tuple(rows)


def degree(order: int) -> int:
    return len(_monomial_table(order)[0])


def reduce_exponents(order: int, by_power) -> tuple[int, ...]:
    """Canonical coefficients of ``sum_e by_power[e] * x**e`` (any length)."""
    table = _monomial_table(order)
    out = [0] * len(table[0])
    for e, m in enumerate(by_power):
        if m:
            row = table[e % order]
            for i, r in enumerate(row):
                if r:
                    out[i] += m * r
    return tuple(out)


@dataclass(frozen=True)
class CyclotomicPoint:
    """An element of Z[zeta_N] in canonical form."""

    coeffs: tuple[int, ...]
    order: int

    def __post_init__(self):
        if len(self.coeffs) != degree(self.order):
            raise ValueError(
                f"expected {degree(self.order)} coefficients for order {self.order}, "
                f"got {len(self.coeffs)}"
            )

    @classmethod
    def zero(cls, order: int) -> CyclotomicPoint:
        return cls((0,) * degree(order), order)

    @classmethod
    def from_powers(cls, order: int, by_power) -> CyclotomicPoint:
        """Reduce an arbitrary integer combination of powers of zeta."""
        return cls(reduce_exponents(order, [int(m) for m in by_power]), order)

    @classmethod
    def from_counts(cls, order: int, counts) -> CyclotomicPoint:
        """Position after ``counts[k]`` steps in direction ``zeta**k``."""
        if len(counts) != order:
            raise ValueError("need one count per direction")
        return cls.from_powers(order, counts)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __add__(self, other: CyclotomicPoint) -> CyclotomicPoint:
        return add(self, other)

    def __neg__(self) -> CyclotomicPoint:
        return CyclotomicPoint(tuple(-c for c in self.coeffs), self.order)

    def __sub__(self, other: CyclotomicPoint) -> CyclotomicPoint:
        return add(self, -other)

    def permute_powers(self, mapping) -> CyclotomicPoint:
        """Image under ``zeta**e -> zeta**mapping(e)``.

        Only ring automorphisms composed with multiplication by a power of zeta
        (the dihedral maps of the roots of unity) are well defined here.
        """
        by_power = [0] * self.order
        for e, c in enumerate(self.coeffs):
            if c:
                by_power[mapping(e) % self.order] += c
        return CyclotomicPoint.from_powers(self.order, by_power)

    def to_complex(self, params=None, scale: float = 1.0) -> complex:
        return to_complex(self, params, scale)


def direction(order: int, k: int) -> CyclotomicPoint:
    """Canonical form of zeta_N**k."""
    if not 0 <= k < order:
        raise IndexError(f"direction index {k} outside [0, {order})")
    return CyclotomicPoint(_monomial_table(order)[k], order)


def add(a: CyclotomicPoint, b: CyclotomicPoint) -> CyclotomicPoint:
    if a.order != b.order:
        raise OrderMismatchError(f"cannot add points of order {a.order} and {b.order}")
    return CyclotomicPoint(tuple(x + y for x, y in zip(a.coeffs, b.coeffs)), a.order)


@lru_cache(maxsize=None)
def _basis(order: int) -> tuple[complex, ...]:
    return tuple(cmath.exp(2j * cmath.pi * j / order) for j in range(degree(order)))


def to_complex(p: CyclotomicPoint, params=None, scale: float = 1.0) -> complex:
    """``scale * alpha**(1/N) * sum_j coeffs_j zeta**j`` with the principal root.

    ``params=None`` means alpha = 1.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    if params is not None and params.order != p.order:
        raise OrderMismatchError("point and params have different orders")
    z = sum(c * b for c, b in zip(p.coeffs, _basis(p.order)) if c)
    root = 1.0 if params is None else params.root
    return complex(scale * root * z)

"""The step variable: uniform on alpha**(1/N) times the N-th roots of unity."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidOrderError


def principal_root(alpha: complex, order: int) -> complex:
    """``|alpha|**(1/N) * exp(i Arg(alpha) / N)`` with Arg in (-pi, pi]."""
    alpha = complex(alpha)
    # adding 0.0 clears a negative zero, which would flip Arg(-1) to -pi
    arg = cmath.phase(complex(alpha.real, alpha.imag + 0.0))
    return abs(alpha) ** (1.0 / order) * cmath.exp(1j * arg / order)


def parse_complex(text: str) -> complex:
    """Parse the ``re,im`` flag syntax (a bare real is accepted too)."""
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) != 2:
        raise ValueError(f"expected 're,im', got {text!r}")
    return complex(float(parts[0]), float(parts[1]))


@dataclass(frozen=True)
class ModelParams:
    """Order N and coefficient alpha of ``du/dt = alpha/N! d^N u/dx^N``.

    N = 2 is accepted for cross-checks against the classical heat equation;
    ``higher_order`` is false for it.
    """

    order: int
    alpha: complex = 1.0

    def __post_init__(self):
        if isinstance(self.order, bool) or not isinstance(self.order, (int, np.integer)):
            raise InvalidOrderError(f"order must be an integer, got {self.order!r}")
        if self.order < 2:
            raise InvalidOrderError(f"order N must satisfy N >= 2, got {self.order}")
        object.__setattr__(self, "order", int(self.order))
        object.__setattr__(self, "alpha", complex(self.alpha))
        if self.alpha == 0:
            raise ValueError("alpha must be nonzero")
        if not (math.isfinite(self.alpha.real) and math.isfinite(self.alpha.imag)):
            raise ValueError("alpha must be finite")

    @property
    def root(self) -> complex:
        return principal_root(self.alpha, self.order)

    @property
    def higher_order(self) -> bool:
        return self.order > 2

    @property
    def factorial(self) -> int:
        return math.factorial(self.order)

    def generator_symbol(self, y):
        """``i**N * alpha * y**N / N!``, the Fourier symbol of the operator."""
        return (1j) ** self.order * self.alpha * np.asarray(y) ** self.order / self.factorial

    def to_dict(self) -> dict:
        return {"order": self.order, "alpha": [self.alpha.real, self.alpha.imag]}


class StepDistribution:
    """Uniform law on ``{alpha**(1/N) exp(2 pi i k / N)}``."""

    def __init__(self, params: ModelParams, root: complex | None = None):
        self.params = params
        # any other N-th root of alpha permutes the atoms; used in branch tests
        self._root = params.root if root is None else complex(root)

    @property
    def order(self) -> int:
        return self.params.order

    @cached_property
    def atoms(self) -> np.ndarray:
        k = np.arange(self.order)
        return self._root * np.exp(2j * np.pi * k / self.order)

    @property
    def weight(self) -> float:
        return 1.0 / self.order

    def moment(self, m: int) -> complex:
        """E[xi**m]: alpha**(m/N) when N divides m, else 0."""
        if m < 0:
            raise ValueError("moment order must be nonnegative")
        if m % self.order:
            return 0j
        return self.params.alpha ** (m // self.order)

    def moment_direct(self, m: int) -> complex:
        return complex(np.mean(self.atoms**m))

    def abs_moment(self, m: float) -> float:
        if m < 0:
            raise ValueError("moment order must be nonnegative")
        return abs(self.params.alpha) ** (m / self.order)

    def char_fn(self, lam):
        """``(1/N) sum_k exp(i lam a_k)``; broadcasts over array ``lam``."""
        lam = np.asarray(lam, dtype=complex)
        vals = np.exp(1j * lam[..., None] * self.atoms).mean(axis=-1)
        return vals if vals.ndim else complex(vals)

    def char_fn_minus_one(self, lam):
        """``char_fn(lam) - 1`` without cancellation for small ``lam``.

        Uses ``sum_{j>=1} (i**N alpha lam**N)**j / (jN)!``, which follows from
        the vanishing of every moment of order not divisible by N.
        """
        lam = np.asarray(lam, dtype=complex)
        w = np.atleast_1d((1j) ** self.order * self.params.alpha * lam**self.order)
        out = np.empty_like(w)
        small = np.abs(w) <= 1.0
        if np.any(small):
            ws = w[small]
            term = np.ones_like(ws)
            total = np.zeros_like(ws)
            for j in range(1, 40):
                term = term * ws / _rising_block(j, self.order)
                total = total + term
                if np.all(np.abs(term) <= 1e-18 * np.abs(total)):
                    break
            out[small] = total
        if not np.all(small):
            out[~small] = np.atleast_1d(self.char_fn(lam))[~small] - 1.0
        return out.reshape(lam.shape) if lam.ndim else complex(out[0])

    def covariance(self) -> np.ndarray:
        """Covariance of the step seen as a vector in R^2."""
        xy = np.stack([self.atoms.real, self.atoms.imag])
        return xy @ xy.T / self.order - np.outer(xy.mean(axis=1), xy.mean(axis=1))

    def covariance_closed(self) -> np.ndarray:
        return 0.5 * abs(self.params.alpha) ** (2.0 / self.order) * np.eye(2)

    def sample(self, rng: np.random.Generator, size=None):
        """Draw steps; returns ``(values, direction_indices)``."""
        k = rng.integers(0, self.order, size=size)
        return self.atoms[k], k


def _rising_block(j: int, order: int) -> float:
    # (jN)! / ((j-1)N)!
    return float(math.prod(range((j - 1) * order + 1, j * order + 1)))

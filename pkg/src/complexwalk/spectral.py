"""Initial data ``f(x) = sum_j c_j exp(i x y_j)`` and the Fourier-multiplier
semigroup ``T(t)`` that solves ``du/dt = alpha/N! d^N u/dx^N`` exactly."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalRangeError
from .step import ModelParams

LOG_GROWTH_LIMIT = math.log(1e300)


class AtomicMeasure:
    """Finite complex measure ``sum_j c_j delta_{y_j}``.

    Atoms are kept sorted by frequency; equal frequencies are merged and
    exactly-zero weights dropped.
    """

    def __init__(self, y=(), c=()):
        y = np.asarray(y, dtype=float).ravel()
        c = np.asarray(c, dtype=complex).ravel()
        if y.shape != c.shape:
            raise ValueError("frequencies and weights must have the same length")
        if not np.all(np.isfinite(y)) or not np.all(np.isfinite(c)):
            raise ValueError("atoms must be finite")
        if y.size:
            uy, inv = np.unique(y, return_inverse=True)
            uc = np.zeros(uy.size, dtype=complex)
            np.add.at(uc, inv, c)
            keep = uc != 0
            y, c = uy[keep], uc[keep]
        self.y = y
        self.c = c
        self.y.setflags(write=False)
        self.c.setflags(write=False)

    @classmethod
    def from_pairs(cls, pairs) -> AtomicMeasure:
        pairs = list(pairs)
        if not pairs:
            return cls()
        y, c = zip(*pairs)
        return cls(y, c)

    def __len__(self):
        return self.y.size

    def __iter__(self):
        return iter(zip(self.y.tolist(), self.c.tolist()))

    def __eq__(self, other):
        if not isinstance(other, AtomicMeasure):
            return NotImplemented
        return np.array_equal(self.y, other.y) and np.array_equal(self.c, other.c)

    def __repr__(self):
        return f"AtomicMeasure({list(self)!r})"

    def with_weights(self, c) -> AtomicMeasure:
        return AtomicMeasure(self.y, c)

    def total_variation(self) -> float:
        return float(np.abs(self.c).sum())


@dataclass(frozen=True, eq=False)
class Datum:
    """The function ``f(z) = sum_j c_j exp(i z y_j)``, entire in z."""

    measure: AtomicMeasure

    def __call__(self, z):
        return eval_datum(self, z)

    def __eq__(self, other):
        if not isinstance(other, Datum):
            return NotImplemented
        return self.measure == other.measure

    def __add__(self, other: Datum) -> Datum:
        m1, m2 = self.measure, other.measure
        return Datum(AtomicMeasure(np.concatenate([m1.y, m2.y]), np.concatenate([m1.c, m2.c])))

    def __neg__(self) -> Datum:
        return Datum(self.measure.with_weights(-self.measure.c))

    def __sub__(self, other: Datum) -> Datum:
        return self + (-other)

    def __mul__(self, scalar) -> Datum:
        return Datum(self.measure.with_weights(self.measure.c * complex(scalar)))

    __rmul__ = __mul__

    @property
    def y(self):
        return self.measure.y

    @property
    def c(self):
        return self.measure.c

    @classmethod
    def from_pairs(cls, pairs) -> Datum:
        return cls(AtomicMeasure.from_pairs(pairs))


def cosine(freq: float = 1.0, amplitude: complex = 1.0) -> Datum:
    """``amplitude * cos(freq x)``."""
    return Datum(AtomicMeasure([freq, -freq], [amplitude / 2, amplitude / 2]))


def constant(value: complex) -> Datum:
    return Datum(AtomicMeasure([0.0], [value]))


def eval_datum(d: Datum, z):
    z = np.asarray(z, dtype=complex)
    out = np.exp(1j * z[..., None] * d.y) @ d.c if len(d.measure) else np.zeros(z.shape, complex)
    return out if np.ndim(out) else complex(out)


def seminorm(d: Datum, n: float) -> float:
    """``||f||_n = sum_j |c_j| exp(n |y_j|)``."""
    if n < 0:
        raise ValueError("seminorm index must be nonnegative")
    return float(np.sum(np.abs(d.c) * np.exp(n * np.abs(d.y))))


@dataclass(frozen=True)
class MetricValue:
    value: float
    tail_bound: float  # the omitted terms sum to at most this


def metric(d1: Datum, d2: Datum, n_terms: int = 50) -> MetricValue:
    """``sum_{n=0}^{n_terms} 2**-n ||f-g||_n / (1 + ||f-g||_n)``."""
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    diff = d1 - d2
    total = 0.0
    for n in range(n_terms + 1):
        s = seminorm(diff, n)
        term = 1.0 if math.isinf(s) else s / (1 + s)
        total += 2.0**-n * term
    return MetricValue(total, 2.0**-n_terms)


def contractivity_check(params: ModelParams) -> dict:
    """Whether ``|exp(i**N alpha x**N t / N!)| <= 1`` for all real x and t >= 0
    (``forward``) or for all real t (``bidirectional``).

    The modulus is ``exp(Re(i**N alpha) x**N t / N!)``.  For even N this needs
    ``Re((-1)**(N/2) alpha) <= 0``, with equality giving a unitary group.  For
    odd N, ``x**N`` takes both signs, so ``Re(i**N alpha) = +-Im(alpha)`` must
    vanish.
    """
    order = params.order
    if order % 2 == 0:
        re = ((-1) ** (order // 2) * params.alpha).real
        return {"contractive_forward": re <= 0, "contractive_bidirectional": re == 0}
    real_alpha = params.alpha.imag == 0
    return {"contractive_forward": real_alpha, "contractive_bidirectional": real_alpha}


def multiplier(params: ModelParams, y, t: float):
    """``exp(i**N alpha y**N t / N!)``, refusing magnitudes above 1e300."""
    expo = params.generator_symbol(np.asarray(y, dtype=float)) * t
    if np.any(expo.real > LOG_GROWTH_LIMIT):
        raise NumericalRangeError(
            f"multiplier exceeds 1e300 at t={t}; the solution leaves double range"
        )
    return np.exp(expo)


def apply_semigroup(params: ModelParams, d: Datum, t: float) -> Datum:
    if t == 0:
        return d
    return Datum(d.measure.with_weights(d.c * multiplier(params, d.y, t)))


def apply_generator(params: ModelParams, d: Datum) -> Datum:
    return Datum(d.measure.with_weights(d.c * params.generator_symbol(d.y)))


def spectral_derivative(d: Datum, k: int = 1) -> Datum:
    """k-th x-derivative: weights times ``(i y)**k``."""
    return Datum(d.measure.with_weights(d.c * (1j * d.y) ** k))


def exact_solution(params: ModelParams, d: Datum, t: float, x):
    """u(t, x) = sum_j c_j exp(i x y_j) exp(i**N alpha y_j**N t / N!)."""
    return eval_datum(apply_semigroup(params, d, t), np.asarray(x, dtype=float))

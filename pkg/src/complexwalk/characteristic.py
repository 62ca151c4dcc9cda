"""Characteristic functions of the rescaled walk and W_n(t), their limit, and
the finite-n error terms and moments.

``psi_xi(z) - 1`` is evaluated from its power series near zero, and the
``floor(n|t|)``-th power is taken as ``exp(m * log1p(psi_xi - 1))``.  For an
integer ``m`` this equals the repeated product for any branch of the log, and
it keeps full relative accuracy in the ``O(1/n)`` error that is being measured.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NumericalRangeError
from .step import ModelParams, StepDistribution
from .walk import steps_for, time_rotation

EXP_LIMIT = 690.0  # exp(690) ~ 1e300


def _log1p(z):
    """Complex log(1 + z), accurate for small |z|."""
    z = np.asarray(z, dtype=complex)
    re = 0.5 * np.log1p(2 * z.real + z.real**2 + z.imag**2)
    im = np.arctan2(z.imag, 1 + z.real)
    return re + 1j * im


def _guarded_exp(x):
    x = np.asarray(x, dtype=complex)
    if np.any(x.real > EXP_LIMIT):
        raise NumericalRangeError(
            f"characteristic function magnitude exceeds exp({EXP_LIMIT:.0f}); "
            "lambda is outside the representable range"
        )
    out = np.exp(x)
    return out if out.ndim else complex(out)


def symbol(params: ModelParams, lam):
    """``i**N alpha lam**N / N!``."""
    return params.generator_symbol(np.asarray(lam, dtype=complex))


def second_order_coefficient(order: int) -> float:
    """``1/(2N)! - 1/(2 (N!)**2)``."""
    return 1.0 / math.factorial(2 * order) - 1.0 / (2.0 * math.factorial(order) ** 2)


def log_char_W(params: ModelParams, n, t: float, lam):
    """``log E[exp(i lam W_n(t))]``; broadcasts over ``n`` and ``lam``."""
    n = np.asarray(n)
    if np.any(n < 1):
        raise ValueError("n must be >= 1")
    steps = np.vectorize(lambda k: steps_for(int(k), t), otypes=[float])(n)
    z = np.asarray(lam, dtype=complex) * time_rotation(params.order, t) * n ** (-1.0 / params.order)
    delta = StepDistribution(params).char_fn_minus_one(z)
    return steps * _log1p(delta)


def char_W(params: ModelParams, n, t: float, lam):
    """E[exp(i lam W_n(t))] = psi_xi(lam c / n**(1/N))**floor(n|t|), c = 1 or exp(i pi/N)."""
    return _guarded_exp(log_char_W(params, n, t, lam))


def char_W_power(params: ModelParams, n: int, t: float, lam: complex) -> complex:
    """Same quantity by binary exponentiation of the direct atom sum."""
    m = steps_for(n, t)
    z = complex(lam) * time_rotation(params.order, t) * n ** (-1.0 / params.order)
    base = complex(StepDistribution(params).char_fn(z))
    out = 1 + 0j
    while m:
        if m & 1:
            out *= base
        base *= base
        m >>= 1
    return out


def char_S_scaled(params: ModelParams, n, lam):
    """Characteristic function of n**(-1/N) S_n."""
    return char_W(params, n, 1.0, lam)


def limit_char(params: ModelParams, t: float, lam):
    """exp(i**N alpha lam**N t / N!)."""
    return _guarded_exp(symbol(params, lam) * t)


def clt_error_constant(params: ModelParams, lam):
    """Limit of ``n (psi_n(lam) - limit)``."""
    lam = np.asarray(lam, dtype=complex)
    out = (
        (-1) ** params.order
        * second_order_coefficient(params.order)
        * params.alpha**2
        * lam ** (2 * params.order)
        * np.asarray(limit_char(params, 1.0, lam))
    )
    return out if out.ndim else complex(out)


@dataclass
class ErrorDecomposition:
    f_n: complex
    g_n: complex
    g_bound: float
    error: complex  # the actual char_W - limit_char

    @property
    def remainder(self) -> complex:
        return self.error - self.f_n - self.g_n


def error_decomposition(params: ModelParams, n: int, t: float, lam: complex) -> ErrorDecomposition:
    """Split ``char_W - limit_char`` into its leading 1/n term and the
    floor-rounding term ``g_n`` (zero when ``n t`` is an integer)."""
    order = params.order
    a = complex(symbol(params, lam))
    e = complex(limit_char(params, t, lam))
    m = steps_for(n, t)
    signed = math.copysign(m, t) if t else 0.0
    b = second_order_coefficient(order) * (1j) ** (2 * order) * complex(lam) ** (2 * order) * params.alpha**2
    f_n = m / n**2 * b * e
    g_n = (signed / n - t) * a * e
    g_bound = abs(a) * abs(e) / n
    err = complex(char_W(params, n, t, lam)) - e
    return ErrorDecomposition(f_n, g_n, g_bound, err)


def error_bound_K(params: ModelParams, t: float, lam):
    """K(t, alpha, lam) so that ``|char_W - limit| < (1 + eps) K / n`` eventually."""
    order = params.order
    lam = np.asarray(lam, dtype=complex)
    lamN = np.abs(lam) ** order
    k = np.abs(np.asarray(limit_char(params, t, lam))) * (
        abs(params.alpha) * lamN / math.factorial(order)
        + abs(params.alpha) ** 2 * abs(t) * lamN**2 * -second_order_coefficient(order)
    )
    return k if k.ndim else float(k)


@dataclass
class ThresholdScan:
    """Smallest ``n_eps`` with ``|error| <= (1+eps) K / n`` for every scanned n >= n_eps."""

    n_eps: int
    n_max: int
    epsilon: float
    max_ratio_tail: float  # max of n |error| / K over n >= n_eps

    @property
    def found(self) -> bool:
        return self.n_eps <= self.n_max


def empirical_threshold(
    params: ModelParams, t: float, lam: complex, n_max: int = 20000, epsilon: float = 0.1
) -> ThresholdScan:
    n = np.arange(1, n_max + 1)
    err = np.abs(char_W(params, n, t, lam) - limit_char(params, t, lam))
    bound = (1 + epsilon) * error_bound_K(params, t, lam) / n
    bad = np.nonzero(err > bound)[0]
    n_eps = int(n[bad[-1]] + 1) if bad.size else 1
    k = error_bound_K(params, t, lam)
    tail = err[n_eps - 1 :] * n[n_eps - 1 :]
    ratio = float(tail.max() / k) if (k > 0 and tail.size) else 0.0
    return ThresholdScan(n_eps, n_max, epsilon, ratio)


def _partitions(k: int, max_part: int | None = None):
    """Integer partitions of k as non-increasing tuples."""
    if max_part is None:
        max_part = k
    if k == 0:
        yield ()
        return
    for p in range(min(k, max_part), 0, -1):
        for rest in _partitions(k - p, p):
            yield (p,) + rest


def _falling(n: int, r: int) -> int:
    return math.prod(range(n - r + 1, n + 1))


def faadibruno_terms(params: ModelParams, n: int, k: int):
    """Nonzero terms of the Faa di Bruno sum for ``d^k/dlam^k psi_n(0)``.

    Each term is keyed by its multiplicity tuple ``(m_1, ..., m_k)`` with
    ``sum_j j m_j = k``.  The value is split as ``(rational, power)`` meaning
    ``rational * (i**k) * alpha**power``: ``psi_xi^(j)(0) = i**j E[xi**j]`` and
    ``E[xi**j]`` vanishes unless N divides j.
    """
    order = params.order
    terms = {}
    for parts in _partitions(k):
        if any(p % order for p in parts):
            continue
        mult = [0] * k
        for p in parts:
            mult[p - 1] += 1
        total = sum(mult)
        coeff = Fraction(math.factorial(k), math.prod(math.factorial(m) for m in mult))
        coeff *= _falling(n, total)
        for j, mj in enumerate(mult, start=1):
            if mj:
                coeff /= Fraction(math.factorial(j)) ** mj
        # n**(-k/N) with N | k
        coeff /= Fraction(n) ** (k // order)
        terms[tuple(mult)] = (coeff, k // order)
    return terms


def moment_faadibruno_exact(params: ModelParams, n: int, k: int) -> Fraction:
    """Rational ``r`` with ``E[(n**(-1/N) S_n)**k] = r * alpha**(k/N)`` (0 if N does not divide k)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if k < 1:
        raise ValueError("k must be >= 1")
    return sum((c for c, _ in faadibruno_terms(params, n, k).values()), Fraction(0))


def moment_faadibruno(params: ModelParams, n: int, k: int) -> complex:
    """E[(n**(-1/N) S_n)**k] = (-i)**k d^k/dlam^k psi_n(0) via Faa di Bruno.

    The falling factorial ``n (n-1) ... (n - sum m_j + 1)`` vanishes for
    partitions with more parts than steps, so the sum is exact for every
    ``n >= 1``.
    """
    if k % params.order:
        moment_faadibruno_exact(params, n, k)  # argument checks
        return 0j
    r = moment_faadibruno_exact(params, n, k)
    # (-i)**k * i**k = 1
    return complex(r) * params.alpha ** (k // params.order)


def moment_limit(params: ModelParams, m: int) -> complex:
    """(alpha/N!)**(m/N) m!/(m/N)! when N divides m, else 0."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    order = params.order
    if m % order:
        return 0j
    big_m = m // order
    coeff = Fraction(math.factorial(m), math.factorial(big_m) * math.factorial(order) ** big_m)
    return complex(coeff) * params.alpha**big_m


def moment_residual_slope(params: ModelParams, m: int, n_grid) -> float:
    """Log-log slope of ``|E[S~_n**m] - limit|`` against n."""
    n_grid = np.asarray(n_grid)
    lim = moment_limit(params, m)
    res = [abs(moment_faadibruno(params, int(n), m) - lim) for n in n_grid]
    return float(np.polyfit(np.log(n_grid), np.log(res), 1)[0])


def clt_table(params: ModelParams, lam: complex, n_grid) -> list[dict]:
    """Rows of psi_n(lam), the limit, the error and ``n |error|``."""
    const = abs(clt_error_constant(params, lam))
    lim = complex(limit_char(params, 1.0, lam))
    rows = []
    for n in n_grid:
        psi = complex(char_S_scaled(params, int(n), lam))
        err = psi - lim
        rows.append(
            {
                "n": int(n),
                "lambda_re": complex(lam).real,
                "lambda_im": complex(lam).imag,
                "psi_re": psi.real,
                "psi_im": psi.imag,
                "limit_re": lim.real,
                "limit_im": lim.imag,
                "err_re": err.real,
                "err_im": err.imag,
                "n_times_err_abs": int(n) * abs(err),
                "predicted_constant_abs": const,
            }
        )
    return rows


CONVERGENCE_COLUMNS = ["n", "lambda_re", "lambda_im", "err_re", "err_im", "n_times_err_abs"]


def convergence_table_csv(rows: list[dict], columns=CONVERGENCE_COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: (repr(v) if isinstance(v, float) else v) for c, v in r.items() if c in columns})
    return buf.getvalue()

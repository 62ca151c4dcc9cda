"""Half-line and interval problems by symmetric extension.

Dirichlet data are extended to odd functions, Neumann data to even ones, and
L-periodic data are Fourier series on (2 pi / L) Z.  The whole-line
machinery then applies unchanged, provided the generator keeps the data in
the symmetric subspace: its symbol ``i**N alpha y**N / N!`` is even in y only
for even N, so odd-order Dirichlet/Neumann problems are refused.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidExtensionError, UnsupportedCombinationError
from .solver import solve_spectral, solve_walk_exact, solve_walk_mc
from .spectral import (
    AtomicMeasure,
    Datum,
    apply_generator,
    apply_semigroup,
    eval_datum,
    spectral_derivative,
)
from .step import ModelParams

KINDS = ("dirichlet-halfline", "neumann-halfline", "periodic", "dirichlet", "neumann")
FREQ_TOL = 1e-12
WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class BoundaryDatum:
    base: Datum
    kind: str
    L: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown boundary kind {self.kind!r}; expected one of {KINDS}")
        if self.kind in ("periodic", "dirichlet", "neumann"):
            if self.L is None or not self.L > 0:
                raise ValueError(f"{self.kind} needs a period/length L > 0")
        problems = invariant_violations(self)
        if problems:
            raise InvalidExtensionError("; ".join(problems))

    @property
    def parity(self) -> str | None:
        if self.kind.startswith("dirichlet"):
            return "odd"
        if self.kind.startswith("neumann"):
            return "even"
        return None

    @property
    def domain(self) -> tuple[float, float]:
        if self.kind.endswith("halfline"):
            return (0.0, np.inf)
        return (0.0, float(self.L))

    def with_base(self, base: Datum) -> BoundaryDatum:
        return BoundaryDatum(base, self.kind, self.L)


def parity_defect(d: Datum, parity: str) -> float:
    """Largest relative mismatch of ``c(-y)`` against ``-c(y)`` (odd) or ``c(y)`` (even)."""
    sign = -1.0 if parity == "odd" else 1.0
    weights = dict(zip(d.y.tolist(), d.c.tolist()))
    scale = max(np.abs(d.c).max(initial=0.0), 1e-300)
    worst = 0.0
    for y, c in weights.items():
        if parity == "odd" and y == 0:
            worst = max(worst, abs(c) / scale)
            continue
        partner = weights.get(-y, 0.0)
        worst = max(worst, abs(partner - sign * c) / scale)
    return worst


def lattice_defect(d: Datum, spacing: float) -> float:
    """Largest distance of a frequency from ``spacing * Z``."""
    if len(d.measure) == 0:
        return 0.0
    k = d.y / spacing
    return float(np.max(np.abs(k - np.round(k))) * spacing)


def invariant_violations(bd: BoundaryDatum) -> list[str]:
    out = []
    d = bd.base
    if bd.parity is not None and parity_defect(d, bd.parity) > WEIGHT_TOL:
        out.append(f"{bd.kind} datum must be {bd.parity} in the frequency variable")
    if bd.kind == "periodic" and lattice_defect(d, 2 * np.pi / bd.L) > FREQ_TOL:
        out.append(f"periodic datum needs frequencies in (2 pi / {bd.L}) Z")
    if bd.kind in ("dirichlet", "neumann") and lattice_defect(d, np.pi / bd.L) > FREQ_TOL:
        out.append(f"{bd.kind} datum on [0, {bd.L}] needs frequencies in (pi / {bd.L}) Z")
    return out


def sine_series(L: float, b) -> BoundaryDatum:
    """``f(x) = sum_{k>=1} b_k sin(k pi x / L)`` as a Dirichlet datum on [0, L]."""
    if not L > 0:
        raise ValueError("L must be positive")
    b = np.asarray(b, dtype=complex)
    k = np.arange(1, b.size + 1)
    y = np.concatenate([k * np.pi / L, -k * np.pi / L])
    c = np.concatenate([-0.5j * b, 0.5j * b])
    return BoundaryDatum(Datum(AtomicMeasure(y, c)), "dirichlet", float(L))


def cosine_series(L: float, a) -> BoundaryDatum:
    """``f(x) = a_0 + sum_{k>=1} a_k cos(k pi x / L)`` as a Neumann datum on [0, L]."""
    if not L > 0:
        raise ValueError("L must be positive")
    a = np.asarray(a, dtype=complex)
    k = np.arange(1, a.size)
    y = np.concatenate([[0.0], k * np.pi / L, -k * np.pi / L])
    c = np.concatenate([a[:1], a[1:] / 2, a[1:] / 2])
    return BoundaryDatum(Datum(AtomicMeasure(y, c)), "neumann", float(L))


def fourier_series(L: float, coeffs: dict) -> BoundaryDatum:
    """``f(x) = sum_k c_k exp(2 pi i k x / L)`` with ``coeffs = {k: c_k}``."""
    ks = np.array(sorted(coeffs), dtype=float)
    c = [coeffs[int(k)] for k in ks]
    return BoundaryDatum(Datum(AtomicMeasure(2 * np.pi * ks / L, c)), "periodic", float(L))


@dataclass(frozen=True)
class HalfLineSeries:
    """Data on [0, inf) given as ``sum b_k sin(w_k x)`` or ``sum a_k cos(w_k x)``."""

    kind: str  # "sine" or "cosine"
    freqs: tuple[float, ...]
    coeffs: tuple[complex, ...]

    def __post_init__(self):
        if self.kind not in ("sine", "cosine"):
            raise ValueError("kind must be 'sine' or 'cosine'")
        if len(self.freqs) != len(self.coeffs):
            raise ValueError("one coefficient per frequency")
        if any(w < 0 for w in self.freqs):
            raise ValueError("frequencies must be nonnegative")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        fn = np.sin if self.kind == "sine" else np.cos
        return sum(b * fn(w * x) for w, b in zip(self.freqs, self.coeffs))


def extend(data, parity: str) -> BoundaryDatum:
    """Odd (Dirichlet) or even (Neumann) extension to the whole line.

    ``data`` is a :class:`HalfLineSeries` or an already symmetric
    :class:`Datum`/:class:`BoundaryDatum`, which is returned unchanged.
    """
    if parity not in ("odd", "even"):
        raise ValueError("parity must be 'odd' or 'even'")
    kind = "dirichlet-halfline" if parity == "odd" else "neumann-halfline"
    if isinstance(data, BoundaryDatum):
        if data.parity != parity:
            raise InvalidExtensionError(f"{data.kind} datum cannot be given {parity} parity")
        return data
    if isinstance(data, Datum):
        if parity_defect(data, parity) > WEIGHT_TOL:
            raise InvalidExtensionError(
                f"datum is not {parity}; supply its half-line series instead"
            )
        return BoundaryDatum(data, kind)
    if not isinstance(data, HalfLineSeries):
        raise TypeError("extend() takes a HalfLineSeries, Datum or BoundaryDatum")
    if (data.kind == "sine") != (parity == "odd"):
        raise InvalidExtensionError(
            f"{data.kind} series has the wrong symmetry for an {parity} extension"
        )
    w = np.asarray(data.freqs, dtype=float)
    b = np.asarray(data.coeffs, dtype=complex)
    if parity == "odd":
        if np.any(w == 0):
            raise InvalidExtensionError("sin(0 x) vanishes; drop zero frequencies")
        y = np.concatenate([w, -w])
        c = np.concatenate([-0.5j * b, 0.5j * b])
    else:
        zero = w == 0
        y = np.concatenate([w[~zero], -w[~zero], [0.0]])
        c = np.concatenate([b[~zero] / 2, b[~zero] / 2, [b[zero].sum()]])
    return BoundaryDatum(Datum(AtomicMeasure(y, c)), kind)


def closure_check(params: ModelParams, bd: BoundaryDatum) -> bool:
    """Whether the generator maps the datum's symmetric subspace into itself."""
    if bd.kind == "periodic":
        return True
    return params.order % 2 == 0


def generator_preserves(params: ModelParams, bd: BoundaryDatum) -> bool:
    """Direct check on this datum: is ``A f`` still in the subspace?"""
    af = apply_generator(params, bd.base)
    if bd.parity is not None and parity_defect(af, bd.parity) > WEIGHT_TOL:
        return False
    return True


def boundary_solve(
    params: ModelParams,
    bd: BoundaryDatum,
    t: float,
    x,
    method: str = "spectral",
    n: int = 1000,
    replicas: int | None = None,
    seed: int | None = None,
    workers: int = 1,
):
    """Solve on the extended datum and return values on ``x`` inside the domain.

    Returns ``values`` (and ``(values, stderr)`` for ``walk-mc``).
    """
    if not closure_check(params, bd):
        raise UnsupportedCombinationError(
            f"{bd.kind} conditions are not preserved for odd order N={params.order}: "
            "the generator does not map odd/even data into themselves"
        )
    x = np.atleast_1d(np.asarray(x, dtype=float))
    lo, hi = bd.domain
    tol = 1e-12 * max(1.0, hi if np.isfinite(hi) else 1.0)
    if np.any(x < lo - tol) or np.any(x > hi + tol):
        raise ValueError(f"x grid leaves the domain [{lo}, {hi}]")
    if method == "spectral":
        return solve_spectral(params, bd.base, t, x)
    if method == "walk-exact":
        return solve_walk_exact(params, bd.base, t, x, n)
    if method == "walk-mc":
        return solve_walk_mc(params, bd.base, t, x, n, replicas, seed, workers)
    raise ValueError(f"unknown method {method!r}")


def boundary_residuals(params: ModelParams, bd: BoundaryDatum, t: float) -> dict:
    """How well the spectral solution at time t honours the boundary condition."""
    ut = apply_semigroup(params, bd.base, t)
    out = {}
    if bd.kind.startswith("dirichlet"):
        out["u_at_0"] = abs(eval_datum(ut, 0.0))
        if bd.L is not None:
            out["u_at_L"] = abs(eval_datum(ut, bd.L))
    elif bd.kind.startswith("neumann"):
        du = spectral_derivative(ut)
        out["du_at_0"] = abs(eval_datum(du, 0.0))
        if bd.L is not None:
            out["du_at_L"] = abs(eval_datum(du, bd.L))
    else:
        out["periodicity"] = abs(eval_datum(ut, 0.0) - eval_datum(ut, bd.L))
    return out

"""Probabilistic solution ``u_n(t, x) = E[f(x + W_n(t - t0))]``.

Three routes to the same quantity:

* ``spectral``: the limit ``n -> inf``, i.e. the exact semigroup solution;
* ``walk-exact``: the finite-n expectation with no sampling error, using
  ``E[f(x + W)] = sum_j c_j exp(i x y_j) E[exp(i y_j W)]`` (W takes finitely
  many values);
* ``walk-mc``: a sample mean over simulated W_n(t).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .characteristic import char_W, second_order_coefficient
from .montecarlo import pairwise_reduce, run_blocks
from .spectral import Datum, exact_solution, multiplier
from .step import ModelParams
from .walk import loglog_fit, sample_W_batch

METHODS = ("spectral", "walk-exact", "walk-mc")


def default_grid(num: int = 257) -> np.ndarray:
    return np.linspace(-np.pi, np.pi, num)


@dataclass
class SolveRequest:
    params: ModelParams
    datum: Datum
    t: float
    x: np.ndarray = field(default_factory=default_grid)
    n: int = 1000
    method: str = "walk-exact"
    replicas: int | None = None
    seed: int | None = None
    t0: float = 0.0
    workers: int = 1

    def __post_init__(self):
        self.x = np.atleast_1d(np.asarray(self.x, dtype=float))
        if self.x.size == 0:
            raise ValueError("x grid must be nonempty")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.method == "walk-mc":
            if not self.replicas or self.replicas < 1:
                raise ValueError("walk-mc needs replicas >= 1")
            if self.seed is None:
                raise ValueError("walk-mc needs a seed")

    @property
    def elapsed(self) -> float:
        return self.t - self.t0


@dataclass
class SolveResult:
    request: SolveRequest
    u: np.ndarray  # spectral solution
    un: np.ndarray  # the requested method's value
    stderr: np.ndarray | None = None

    @property
    def abs_err(self) -> np.ndarray:
        return np.abs(self.u - self.un)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = ["x", "u_re", "u_im", "un_re", "un_im", "abs_err"]
        if self.stderr is not None:
            cols.append("stderr")
        w.writerow(cols)
        for i, x in enumerate(self.request.x):
            row = [x, self.u[i].real, self.u[i].imag, self.un[i].real, self.un[i].imag, self.abs_err[i]]
            if self.stderr is not None:
                row.append(self.stderr[i])
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()


def solve_spectral(params: ModelParams, datum: Datum, t: float, x) -> np.ndarray:
    return np.atleast_1d(exact_solution(params, datum, t, x))


def solve_walk_exact(params: ModelParams, datum: Datum, t: float, x, n: int) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if len(datum.measure) == 0:
        return np.zeros(x.shape, complex)
    phi = np.atleast_1d(char_W(params, n, t, datum.y))
    return np.exp(1j * np.outer(x, datum.y)) @ (datum.c * phi)


def solve_walk_mc(
    params: ModelParams,
    datum: Datum,
    t: float,
    x,
    n: int,
    replicas: int,
    seed: int,
    workers: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Sample mean of ``f(x + W_n(t))`` and its standard error, per x.

    With ``E_jr = exp(i y_j W_r)`` the sample values are
    ``f(x + W_r) = sum_j a_j(x) E_jr`` where ``a_j(x) = c_j exp(i x y_j)``, so
    the sample mean and sample second moment follow from ``sum_r E_jr`` and the
    Gram matrix ``sum_r E_jr conj(E_lr)`` without forming every (x, r) pair.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = datum.y

    def block(rng, size):
        w = sample_W_batch(params, n, t, size, rng)
        e = np.exp(1j * np.outer(y, w))
        return e.sum(axis=1), e @ e.conj().T

    s, g = pairwise_reduce(
        run_blocks(block, replicas, seed, workers), op=lambda a, b: (a[0] + b[0], a[1] + b[1])
    )
    a = datum.c * np.exp(1j * np.outer(x, y))
    mean = a @ s / replicas
    second = np.einsum("xj,jl,xl->x", a, g, a.conj()).real / replicas
    var = np.maximum(second - np.abs(mean) ** 2, 0.0)
    if replicas > 1:
        var *= replicas / (replicas - 1)
    return mean, np.sqrt(var / replicas)


def solve(req: SolveRequest) -> SolveResult:
    u = solve_spectral(req.params, req.datum, req.elapsed, req.x)
    if req.method == "spectral":
        return SolveResult(req, u, u.copy())
    if req.method == "walk-exact":
        return SolveResult(req, u, solve_walk_exact(req.params, req.datum, req.elapsed, req.x, req.n))
    mean, se = solve_walk_mc(
        req.params, req.datum, req.elapsed, req.x, req.n, req.replicas, req.seed, req.workers
    )
    return SolveResult(req, u, mean, se)


def error_bound_C(params: ModelParams, datum: Datum, t: float, t0: float = 0.0) -> float:
    """Constant C(t) with ``sup_x |u - u_n| <= (1 + eps) C(t) / n`` for large n.

    For t < t0 the elapsed time enters through its absolute value, matching
    the negative-time error expansion.
    """
    order = params.order
    tau = t - t0
    w = np.abs(datum.c) * np.abs(multiplier(params, datum.y, tau))
    ay = np.abs(datum.y)
    first = abs(params.alpha) / math.factorial(order) * np.sum(w * ay**order)
    second = abs(params.alpha) ** 2 * abs(tau) * -second_order_coefficient(order) * np.sum(w * ay ** (2 * order))
    return float(first + second)


@dataclass
class ConvergenceReport:
    n_grid: list[int]
    errors: list[float]
    slope: float
    fit_residual: float
    C: float
    epsilon: float
    bound: list[float]
    bound_satisfied: list[bool]
    n_threshold: int | None  # first grid n from which every error is within the bound
    t: float
    t0: float
    x_grid: dict

    @property
    def all_bounded(self) -> bool:
        return all(self.bound_satisfied)

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["bound_satisfied"] = [bool(b) for b in self.bound_satisfied]
        return d


def convergence_study(
    params: ModelParams,
    datum: Datum,
    t: float,
    x=None,
    n_grid=(100, 1000, 10000, 100000),
    t0: float = 0.0,
    epsilon: float = 0.1,
) -> ConvergenceReport:
    """Sup-grid error of walk-exact against the spectral solution over ``n_grid``."""
    n_grid = [int(n) for n in n_grid]
    if len(n_grid) < 4 or any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("n_grid must be increasing with at least 4 entries")
    x = default_grid() if x is None else np.atleast_1d(np.asarray(x, float))
    tau = t - t0
    u = solve_spectral(params, datum, tau, x)
    errs = [float(np.max(np.abs(u - solve_walk_exact(params, datum, tau, x, n)))) for n in n_grid]
    positive = [(n, e) for n, e in zip(n_grid, errs) if e > 0]
    if len(positive) >= 2:
        slope, icpt = loglog_fit(*zip(*positive))
        pred = icpt + slope * np.log([n for n, _ in positive])
        resid = float(np.sqrt(np.mean((np.log([e for _, e in positive]) - pred) ** 2)))
    else:
        slope, resid = float("nan"), float("nan")
    c = error_bound_C(params, datum, t, t0)
    bound = [(1 + epsilon) * c / n for n in n_grid]
    ok = [e <= b for e, b in zip(errs, bound)]
    threshold = None
    for i in range(len(n_grid)):
        if all(ok[i:]):
            threshold = n_grid[i]
            break
    grid = {"start": float(x[0]), "stop": float(x[-1]), "num": int(x.size)}
    return ConvergenceReport(n_grid, errs, slope, resid, c, epsilon, bound, ok, threshold, t, t0, grid)

"""Random walks S_n, their rescalings and the jump processes W_n(t).

Exact laws are enumerated on the cyclotomic lattice with big-integer path
counts.  Sampling uses explicit ``numpy.random.Generator`` objects; batch
samplers draw direction counts from a multinomial, which has the same law as
summing individual steps.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import cyclolattice as cl
from .cyclolattice import CyclotomicPoint
from .errors import InvalidSymmetryError, ResourceCapError, UnsupportedError
from .montecarlo import pairwise_reduce, run_blocks
from .step import ModelParams, StepDistribution

STATE_CAP = 10**7


def _order_of(params) -> int:
    return params.order if isinstance(params, ModelParams) else int(params)


def steps_for(n: int, t: float) -> int:
    """Number of steps in W_n(t): floor(n|t|), i.e. truncation toward zero."""
    x = n * abs(t)
    # absorb round-off in products such as 10 * 0.7 = 6.999...
    return math.floor(x + 1e-9 * max(x, 1.0))


def time_rotation(order: int, t: float) -> complex:
    """Prefactor of W_n(t): 1 for t >= 0, exp(i pi / N) for t < 0."""
    return np.exp(1j * np.pi / order) if t < 0 else 1.0 + 0j


@dataclass
class ExactDistribution:
    """Law of S_n as path counts over lattice points; probabilities are count / N**n."""

    order: int
    n: int
    entries: dict[CyclotomicPoint, int]

    @property
    def total(self) -> int:
        return self.order**self.n

    def probability(self, point: CyclotomicPoint) -> Fraction:
        return Fraction(self.entries.get(point, 0), self.total)

    def __len__(self):
        return len(self.entries)

    def __eq__(self, other):
        if not isinstance(other, ExactDistribution):
            return NotImplemented
        return (self.order, self.n, self.entries) == (other.order, other.n, other.entries)

    def support(self, params: ModelParams | None = None, scale: float = 1.0):
        """Points as complex numbers and their float probabilities."""
        pts = list(self.entries)
        z = np.array([cl.to_complex(p, params, scale) for p in pts])
        prob = np.array([self.entries[p] / self.total for p in pts])
        return z, prob

    def moment(self, params: ModelParams, k: int, normalized: bool = True) -> complex:
        """E[S_n**k], or E[(n**(-1/N) S_n)**k] when ``normalized``."""
        scale = self.n ** (-1.0 / self.order) if (normalized and self.n) else 1.0
        z, prob = self.support(params, scale)
        return complex(np.sum(prob * z**k))

    def expectation(self, fn, params: ModelParams, scale: float = 1.0) -> complex:
        z, prob = self.support(params, scale)
        return complex(np.sum(prob * fn(z)))

    def rows(self):
        """``(coeffs, count)`` sorted by coefficients."""
        return sorted((p.coeffs, c) for p, c in self.entries.items())


def _run_dp(order: int, n: int, cap: int, on_step=None) -> tuple[dict[int, int], int, int]:
    table = cl._monomial_table(order)
    deg = len(table[0])
    bound = max(abs(v) for row in table for v in row) * max(n, 1)
    base = 2 * bound + 1
    offset = sum(bound * base**i for i in range(deg))
    deltas = [sum(v * base**i for i, v in enumerate(row)) for row in table]
    counts = {offset: 1}
    for s in range(1, n + 1):
        nxt: dict[int, int] = {}
        get = nxt.get
        for key, c in counts.items():
            for d in deltas:
                k2 = key + d
                nxt[k2] = get(k2, 0) + c
        if len(nxt) > cap:
            raise ResourceCapError(
                f"enumeration of order {order} reached {len(nxt)} states at step {s}, "
                f"above the state cap {cap}"
            )
        counts = nxt
        if on_step is not None:
            on_step(s, counts.get(offset, 0))
    return counts, base, bound


def _decode(key: int, deg: int, base: int, bound: int) -> tuple[int, ...]:
    out = []
    for _ in range(deg):
        key, r = divmod(key, base)
        out.append(r - bound)
    return tuple(out)


def enumerate_distribution(params, n: int, cap: int = STATE_CAP) -> ExactDistribution:
    """Exact law of S_n by dynamic programming over canonical lattice points."""
    order = _order_of(params)
    if n < 0:
        raise ValueError("n must be nonnegative")
    counts, base, bound = _run_dp(order, n, cap)
    deg = cl.degree(order)
    entries = {
        CyclotomicPoint(_decode(k, deg, base, bound), order): c for k, c in counts.items()
    }
    return ExactDistribution(order, n, entries)


def origin_probabilities(params, n_max: int, cap: int = STATE_CAP) -> list[Fraction]:
    """``[P(S_s = 0) for s in 0..n_max]`` from a single enumeration pass."""
    order = _order_of(params)
    out = [Fraction(1)]
    _run_dp(order, n_max, cap, lambda s, c: out.append(Fraction(c, order**s)))
    return out


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % p for p in range(2, math.isqrt(n) + 1))


def return_probability_closed(params, m: int) -> Fraction:
    """P(S_{Nm} = 0) = (Nm)! / ((m!)**N N**(Nm)) for prime N.

    For prime N, ``sum_k m_k zeta**k = 0`` forces all ``m_k`` equal; composite
    orders have further relations and need :func:`enumerate_distribution`.
    """
    order = _order_of(params)
    if not _is_prime(order):
        raise UnsupportedError(
            f"closed-form return probability needs prime N; N={order} is composite, "
            "use enumerate_distribution"
        )
    if m < 1:
        raise ValueError("m must be >= 1")
    return Fraction(math.factorial(order * m), math.factorial(m) ** order * order ** (order * m))


def return_asymptote(params, m: float) -> float:
    """Stirling form sqrt(2 pi N m) (2 pi m)**(-N/2) of the closed form."""
    order = _order_of(params)
    if not _is_prime(order):
        raise UnsupportedError(f"N={order} is composite; no closed form to approximate")
    return math.sqrt(2 * math.pi * order * m) * (2 * math.pi * m) ** (-order / 2)


@dataclass
class RecurrenceReport:
    order: int
    method: str
    m: list[int]
    probabilities: list[Fraction]
    partial_sums: list[float]
    slope: float
    fitted_constant: float
    asymptote: list[float] | None = None

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "method": self.method,
            "m": self.m,
            "probabilities": [str(p) for p in self.probabilities],
            "partial_sums": self.partial_sums,
            "slope": self.slope,
            "fitted_constant": self.fitted_constant,
            "asymptote": self.asymptote,
        }


def loglog_fit(x, y) -> tuple[float, float]:
    """Least-squares ``log y = slope log x + intercept``."""
    slope, intercept = np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)
    return float(slope), float(intercept)


def recurrence_diagnostic(params, m_max: int, max_steps: int = 160) -> RecurrenceReport:
    """Return probabilities P(S_{Nm}=0), their partial sums and log-log decay.

    Prime N uses the closed form up to ``m_max``.  Composite N is enumerated,
    limited to ``N m <= max_steps``; unreachable m (probability 0) are skipped.
    """
    order = _order_of(params)
    if m_max < 10:
        raise ValueError("m_max must be at least 10")
    if _is_prime(order):
        ms = list(range(1, m_max + 1))
        probs = [return_probability_closed(order, m) for m in ms]
        method = "closed"
        asym = [return_asymptote(order, m) for m in ms]
    else:
        top = min(m_max, max_steps // order)
        if top < 2:
            raise ValueError(f"max_steps={max_steps} leaves fewer than two values of m")
        origin = origin_probabilities(order, order * top)
        ms = [m for m in range(1, top + 1) if origin[order * m]]
        probs = [origin[order * m] for m in ms]
        method = "enumeration"
        asym = None
    partial = np.cumsum([float(p) for p in probs]).tolist()
    slope, intercept = loglog_fit(ms, [float(p) for p in probs])
    return RecurrenceReport(order, method, ms, probs, partial, slope, math.exp(intercept), asym)


@dataclass
class NeighborhoodReport:
    epsilon: float
    checkpoints: list[int]
    mean_visits: list[float]
    stderr: list[float]
    log_slope: float
    fit_range: tuple[int, int]
    proof_limit: list[float]
    replicas: int
    seed: int

    def to_dict(self) -> dict:
        return dict(self.__dict__, fit_range=list(self.fit_range))


def neighborhood_visit_stats(
    params: ModelParams,
    epsilon: float,
    n_max: int,
    replicas: int,
    seed: int,
    checkpoints=None,
    fit_from: int = 1000,
    workers: int = 1,
) -> NeighborhoodReport:
    """Monte Carlo estimate of ``sum_{k<=n} P(|S_k| <= eps)`` along ``n``.

    The visit count grows like ``c log n``; for a walk with covariance
    ``|alpha|**(2/N)/2 I`` the Gaussian heuristic gives ``c = eps**2 / |alpha|**(2/N)``.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if checkpoints is None:
        checkpoints = np.unique(np.round(np.logspace(0, math.log10(n_max), 41)).astype(int))
    checkpoints = np.asarray(checkpoints, dtype=int)
    if checkpoints.max() > n_max:
        raise ValueError("checkpoints exceed n_max")
    step = StepDistribution(params)

    def block(rng, size):
        out = np.empty((size, len(checkpoints)))
        for r in range(size):
            vals, _ = step.sample(rng, n_max)
            inside = np.abs(np.cumsum(vals)) <= epsilon
            out[r] = np.cumsum(inside)[checkpoints - 1]
        return np.stack([out.sum(axis=0), (out**2).sum(axis=0)])

    sums = pairwise_reduce(run_blocks(block, replicas, seed, workers, block_size=64))
    mean = sums[0] / replicas
    var = np.maximum(sums[1] / replicas - mean**2, 0.0)
    stderr = np.sqrt(var / max(replicas - 1, 1))
    sel = checkpoints >= min(fit_from, checkpoints.max() // 10)
    c = float(np.polyfit(np.log(checkpoints[sel]), mean[sel], 1)[0])
    s2 = abs(params.alpha) ** (2.0 / params.order)
    limit = [float(k * (1 - math.exp(-epsilon**2 / (s2 * k)))) for k in checkpoints]
    return NeighborhoodReport(
        float(epsilon),
        checkpoints.tolist(),
        mean.tolist(),
        stderr.tolist(),
        c,
        (int(checkpoints[sel][0]), int(checkpoints[-1])),
        limit,
        replicas,
        seed,
    )


@dataclass
class EscapeEstimate:
    n: int
    epsilon: float
    estimate: float
    stderr: float
    comparator: float


def escape_comparator(params: ModelParams, n: int, epsilon: float) -> float:
    """exp(-eps**2 |alpha|**(-2/N) n**(2/N - 1))."""
    order = params.order
    return math.exp(-(epsilon**2) * abs(params.alpha) ** (-2.0 / order) * n ** (2.0 / order - 1))


def escape_probability(
    params: ModelParams, n: int, epsilon: float, replicas: int, seed: int, workers: int = 1
) -> EscapeEstimate:
    """Monte Carlo estimate of P(|n**(-1/N) S_n| > eps)."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")

    def block(rng, size):
        w = sample_W_batch(params, n, 1.0, size, rng)
        return np.array([np.count_nonzero(np.abs(w) > epsilon)], dtype=np.int64)

    hits = int(pairwise_reduce(run_blocks(block, replicas, seed, workers))[0])
    p = hits / replicas
    return EscapeEstimate(
        n, float(epsilon), p, math.sqrt(p * (1 - p) / replicas), escape_comparator(params, n, epsilon)
    )


@dataclass(frozen=True)
class DihedralElement:
    """Direction map ``k -> (-k if reflect else k) + rotation (mod N)``."""

    rotation: int = 0
    reflect: bool = False

    def __post_init__(self):
        if isinstance(self.rotation, bool) or not isinstance(self.rotation, (int, np.integer)):
            raise InvalidSymmetryError(f"rotation must be an integer, got {self.rotation!r}")

    def __call__(self, k: int) -> int:
        return (-k if self.reflect else k) + self.rotation

    @classmethod
    def from_permutation(cls, perm) -> DihedralElement:
        """Identify a permutation of direction indices with a dihedral element."""
        perm = [int(p) for p in perm]
        order = len(perm)
        if sorted(perm) != list(range(order)):
            raise InvalidSymmetryError("not a permutation of the direction indices")
        for reflect in (False, True):
            cand = cls(perm[0], reflect)
            if all(cand(k) % order == perm[k] for k in range(order)):
                return cand
        raise InvalidSymmetryError(
            f"permutation {perm} is not induced by a linear map preserving the roots of unity"
        )


def dihedral_group(order: int) -> list[DihedralElement]:
    return [DihedralElement(j, r) for r in (False, True) for j in range(order)]


def apply_lattice_symmetry(dist: ExactDistribution, sym) -> ExactDistribution:
    """Push ``dist`` forward along a dihedral map of the directions."""
    if not isinstance(sym, DihedralElement):
        sym = DihedralElement.from_permutation(sym)
    out: dict[CyclotomicPoint, int] = {}
    for p, c in dist.entries.items():
        q = p.permute_powers(sym)
        out[q] = out.get(q, 0) + c
    return ExactDistribution(dist.order, dist.n, out)


def sample_W(params: ModelParams, n: int, t: float, rng: np.random.Generator) -> complex:
    """One draw of W_n(t), summing ``floor(n|t|)`` individual steps."""
    if n < 1:
        raise ValueError("n must be >= 1")
    m = steps_for(n, t)
    if m == 0:
        return 0j
    vals, _ = StepDistribution(params).sample(rng, m)
    return complex(time_rotation(params.order, t) * n ** (-1.0 / params.order) * vals.sum())


def sample_counts(order: int, m: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Direction counts of ``size`` independent m-step walks, shape (size, N)."""
    return rng.multinomial(m, np.full(order, 1.0 / order), size=size)


def sample_W_batch(
    params: ModelParams, n: int, t: float, size: int, rng: np.random.Generator
) -> np.ndarray:
    """``size`` independent draws of W_n(t)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    m = steps_for(n, t)
    if m == 0:
        return np.zeros(size, dtype=complex)
    counts = sample_counts(params.order, m, size, rng)
    atoms = StepDistribution(params).atoms
    return time_rotation(params.order, t) * n ** (-1.0 / params.order) * (counts @ atoms)


@dataclass
class PathSample:
    params: ModelParams
    n: int
    times: np.ndarray
    values: np.ndarray
    directions: np.ndarray  # direction index of the step ending at each time, -1 at t=0
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "t", "re", "im"])
        zero = int(np.argmin(np.abs(self.times)))
        for i, (t, z) in enumerate(zip(self.times, self.values)):
            w.writerow([i - zero, repr(float(t)), repr(float(z.real)), repr(float(z.imag))])
        return buf.getvalue()


def sample_path(
    params: ModelParams, n: int, t_end: float, rng: np.random.Generator, seed=None, scaled=True
) -> PathSample:
    """Trajectory of W_n on the grid k/n between 0 and ``t_end``.

    Negative ``t_end`` gives the negative-time branch, built from an
    independent copy rotated by exp(i pi / N).  With ``scaled=False`` the
    values are the raw partial sums S_k.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    m = steps_for(n, t_end)
    vals, k = StepDistribution(params).sample(rng, m)
    scale = n ** (-1.0 / params.order) if scaled else 1.0
    path = np.concatenate([[0j], np.cumsum(vals)]) * scale * time_rotation(params.order, t_end)
    times = np.arange(m + 1) / n
    dirs = np.concatenate([[-1], k])
    if t_end < 0:
        times, path, dirs = -times[::-1], path[::-1], dirs[::-1]
    return PathSample(params, n, times, path, dirs, seed)

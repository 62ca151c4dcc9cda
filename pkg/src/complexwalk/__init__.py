"""Random walks on the complex plane and N-th order heat-type equations.

The walk takes i.i.d. steps uniform on ``alpha**(1/N)`` times the N-th roots
of unity.  Rescaled by ``n**(-1/N)`` its characteristic function converges to
``exp(i**N * alpha * lam**N * t / N!)``, which gives a representation

    u(t, x) = lim_n E[f(x + W_n(t))]

of the solution of ``du/dt = alpha/N! * d^N u/dx^N`` for initial data that are
Fourier transforms of finite atomic measures.
"""

__version__ = "0.1.0"

from .step import ModelParams, StepDistribution
from .spectral import AtomicMeasure, Datum

__all__ = ["ModelParams", "StepDistribution", "AtomicMeasure", "Datum", "__version__"]

"""Numerical toolkit for Dirichlet L-functions on the critical line.

Submodules:
  arith      -- exact Dirichlet characters, prime sieving, Li and class counts
  gammaphase -- the Gamma-prefactor phase by product and asymptotic routes
  eulerphase -- windowed Euler-product phase estimators and oscillation masses
  lfunction  -- L, xi, eta evaluation, angular momentum, critical-line zeros
  verify     -- the quantitative acceptance suite behind ``lphase verify``
  cli        -- command-line interface writing deterministic CSV scans
"""

__version__ = "0.1.0"

from . import arith, eulerphase, gammaphase, lfunction  # noqa: F401
from .arith import (  # noqa: F401
    DirichletCharacter,
    PrimeTable,
    SPoint,
    enumerate_characters,
    gauss_sum,
    li,
    sieve_primes,
)

"""Phase of the completed-L prefactor (q/pi)^((s+alpha)/2) * Gamma((s+alpha)/2).

Two independent routes are implemented and cross-checked.

Product route ("gw"): the phase of the Gauss-Weierstrass product
    Gamma(z) = lim N! (N+1)^z / (z (z+1) ... (z+N)),   z = (s+alpha)/2,
regrouped with the Euler-Mascheroni constant so each partial sum is already
close to the limit:

    phase(z) = -gamma*v - arctan(v/a) + sum_{n>=1} [ v/n - arctan(v/(n+a)) ]

with a = Re z = (1/2+eps+alpha)/2 and v = Im z = t/2.  Terms fall off like
1/n^2, so the N-term truncation error is O(1/N); `gamma_phase` additionally
sums the tail in closed form (digamma plus Hurwitz-zeta series), giving the
limit to near machine precision at small cost.  This route is valid for all
t, including t = 0.

Asymptotic route ("stirling"): ln Gamma(z+1) with z = (2*eps+2*alpha-3)/4 +
i*t/2, expanded through the Bernoulli series with an explicit remainder
bound.  The imaginary part splits into a growing part (`stirling_phase_main`,
whose t-derivative is log sqrt(t*q/(2*pi))), a part vanishing as t -> oo
(`stirling_phase_correction`), and the Bernoulli tail
(`stirling_phase_bernoulli`).  Since Re z < 0 on the strip, the remainder
bound blows up as t -> 0; the route refuses t < 0.5 and the product route
covers the small-t neighborhood.

The three-case pattern for the mixed derivative d^2 phase / (d eps d t) at
eps = 0 -- 3/(4t^2), 1/(4t^2), -1/(4t^2) for alpha = 2, 1, 0 -- is exposed
through `mixed_second_derivative`, which differentiates either route in eps
by a Richardson-extrapolated central difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import digamma, gammaln, zeta as hurwitz_zeta_real

from .arith import SPoint
from .errors import DomainError, NumericalInstabilityError, SingularityError

__all__ = [
    "StirlingConfig",
    "PrefactorParams",
    "gw_log_gamma_phase",
    "gw_phase_tail_estimate",
    "gamma_phase",
    "gamma_log_abs",
    "gw_dphase_dt",
    "gamma_dphase_dt",
    "prefactor_dphase_dt",
    "stirling_phase_main",
    "stirling_phase_main_dt",
    "stirling_phase_correction",
    "stirling_phase_correction_quadratic",
    "stirling_phase_correction_dt",
    "stirling_phase_bernoulli",
    "stirling_phase_bernoulli_dt",
    "stirling_phase",
    "stirling_dphase_dt",
    "mixed_second_derivative",
    "find_t_cross",
]

EULER_GAMMA = float(np.euler_gamma)
GW_DEFAULT_TERMS = 10 ** 6
T_STIRLING_MIN = 0.5
_BLOCK = 1 << 20
_MACH = float(np.finfo(float).eps)

BERNOULLI = {
    2: Fraction(1, 6),
    4: Fraction(-1, 30),
    6: Fraction(1, 42),
    8: Fraction(-1, 30),
    10: Fraction(5, 66),
    12: Fraction(-691, 2730),
}


@dataclass(frozen=True)
class StirlingConfig:
    """Number of Bernoulli terms kept in the asymptotic route (k = 1..K-1)."""

    K: int = 3
    bernoulli: dict = field(default_factory=lambda: dict(BERNOULLI))

    def __post_init__(self):
        if self.K < 2:
            raise DomainError("StirlingConfig requires K >= 2")
        if 2 * self.K not in self.bernoulli:
            raise DomainError(f"no Bernoulli coefficient B_{2 * self.K} available")


DEFAULT_STIRLING = StirlingConfig()


@dataclass(frozen=True)
class PrefactorParams:
    """Modulus and Gamma-shift of the prefactor (pi/q)^(-(s+alpha1)/2) Gamma((s+alpha)/2).

    alpha = 0 (even character), 1 (odd character) or 2 (the zeta case, where
    the factor (s-1) is absorbed and q is forced to 1).
    """

    q: int
    alpha: int
    alpha1: int

    def __post_init__(self):
        if (self.alpha, self.alpha1) not in {(0, 0), (1, 1), (2, 0)}:
            raise DomainError(f"unsupported (alpha, alpha1) = {(self.alpha, self.alpha1)}")
        if self.alpha == 2 and self.q != 1:
            raise DomainError("alpha = 2 encodes the zeta case and requires q = 1")
        if self.q < 1:
            raise DomainError("modulus must be a positive integer")

    @classmethod
    def for_character(cls, chi) -> "PrefactorParams":
        a = chi.parity
        return cls(q=chi.q, alpha=a, alpha1=a)

    @classmethod
    def for_alpha(cls, alpha: int, q: int | None = None) -> "PrefactorParams":
        if alpha == 2:
            return cls(q=1, alpha=2, alpha1=0)
        return cls(q=(q if q is not None else 1), alpha=alpha, alpha1=alpha)


# --------------------------------------------------------------------------
# product (Gauss-Weierstrass) route
# --------------------------------------------------------------------------

def _ab(s: SPoint, alpha: int) -> tuple[float, float]:
    a = (0.5 + s.eps + alpha) / 2.0
    v = s.t / 2.0
    if a <= 0.0:
        raise DomainError(f"Re (s+alpha)/2 = {a} <= 0 is outside the product-route domain")
    if a < 1e-12 and abs(v) < 1e-12:
        raise SingularityError("(s+alpha)/2 is too close to the Gamma pole at 0", where=0)
    return a, v


def _x_minus_arctan(x: np.ndarray) -> np.ndarray:
    # x - arctan(x), stable for small x where direct subtraction cancels
    small = np.abs(x) < 0.1
    xs = np.where(small, x, 0.1)  # clip unused branch to avoid overflow
    x2 = xs * xs
    series = xs * x2 * (1.0 / 3.0 + x2 * (-1.0 / 5.0 + x2 * (1.0 / 7.0 + x2 * (-1.0 / 9.0 + x2 / 11.0))))
    return np.where(small, series, x - np.arctan(x))


def gw_log_gamma_phase(s: SPoint, alpha: int, n_terms: int = GW_DEFAULT_TERMS) -> float:
    """Phase of Gamma((s+alpha)/2) from the N-term regrouped product sum."""
    if n_terms < 1:
        raise DomainError("n_terms must be at least 1")
    a, v = _ab(s, alpha)
    total = -EULER_GAMMA * v - math.atan(v / a)
    lo = 1
    while lo <= n_terms:
        hi = min(lo + _BLOCK, n_terms + 1)
        n = np.arange(lo, hi, dtype=np.float64)
        x = v / (n + a)
        total += float(np.sum(v * a / (n * (n + a)) + _x_minus_arctan(x)))
        lo = hi
    return total


def gw_phase_tail_estimate(s: SPoint, alpha: int, n_terms: int) -> float:
    """Upper estimate of |limit - N-term sum| for `gw_log_gamma_phase`.

    The tail terms satisfy 0 < v/n - arctan(v/(n+a)) <= v*a/(n(n+a)) +
    v^3/(3(n+a)^3) termwise, so the bound below dominates the full tail.
    """
    a, v = _ab(s, alpha)
    v = abs(v)
    return v * a / n_terms + v ** 3 / (6.0 * n_terms ** 2)


def _tail_order(vmax: float, w: float) -> int:
    # number of Hurwitz-zeta tail terms for ratio vmax/w, targeting ~1e-18
    r = vmax / w
    if r <= 0:
        return 1
    j = int(math.ceil(-18.0 * math.log(10) / (2.0 * math.log(min(r, 0.5))))) + 1
    return max(2, min(j, 40))


def gamma_phase(t, eps: float, alpha: int) -> np.ndarray | float:
    """Limit of the product-route phase, vectorized over t.

    A short head sum is completed with the closed-form tail
    v*(psi(N+1+a) - psi(N+1)) + sum_j (-1)^(j+1) v^(2j+1)/(2j+1) zeta(2j+1, N+1+a),
    giving near machine precision for every t.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    a, _ = _ab(SPoint(eps, 0.0), alpha)
    v = t_arr / 2.0
    vmax = float(np.max(np.abs(v))) if v.size else 0.0
    n0 = int(max(64, math.ceil(4.0 * vmax) + 32))

    n = np.arange(1, n0 + 1, dtype=np.float64)[:, None]
    x = v[None, :] / (n + a)
    head = np.sum(v[None, :] * a / (n * (n + a)) + _x_minus_arctan(x), axis=0)

    w = n0 + 1.0 + a
    tail = v * float(digamma(w) - digamma(n0 + 1.0))
    v2 = v * v
    pw = v.copy()
    for j in range(1, _tail_order(vmax, w) + 1):
        pw = pw * v2
        term = ((-1) ** (j + 1)) / (2 * j + 1) * float(hurwitz_zeta_real(2 * j + 1, w)) * pw
        tail += term
        if np.max(np.abs(term)) < 1e-18 * (1.0 + np.max(np.abs(tail))):
            break
    out = -EULER_GAMMA * v - np.arctan(v / a) + head + tail
    return out if np.ndim(t) else float(out[0])


def gamma_log_abs(t, eps: float, alpha: int) -> np.ndarray | float:
    """log |Gamma((s+alpha)/2)| from the same product, vectorized over t.

    Taking moduli in the product gives
    log|Gamma(a+iv)| = lnGamma(1+a) - (1/2) log(a^2+v^2)
                       - sum_{n>=1} (1/2) log(1 + (v/(n+a))^2),
    and the tail of the sum is again a Hurwitz-zeta series.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    a, _ = _ab(SPoint(eps, 0.0), alpha)
    v = t_arr / 2.0
    vmax = float(np.max(np.abs(v))) if v.size else 0.0
    n0 = int(max(64, math.ceil(4.0 * vmax) + 32))

    n = np.arange(1, n0 + 1, dtype=np.float64)[:, None]
    x = v[None, :] / (n + a)
    head = 0.5 * np.sum(np.log1p(x * x), axis=0)

    w = n0 + 1.0 + a
    v2 = v * v
    tail = np.zeros_like(v)
    pw = np.ones_like(v)
    for j in range(1, _tail_order(vmax, w) + 1):
        pw = pw * v2
        term = ((-1) ** (j + 1)) / (2.0 * j) * float(hurwitz_zeta_real(2 * j, w)) * pw
        tail += term
        if np.max(np.abs(term)) < 1e-18 * (1.0 + np.max(np.abs(tail))):
            break
    out = float(gammaln(1.0 + a)) - 0.5 * np.log(a * a + v2) - head - tail
    return out if np.ndim(t) else float(out[0])


def gw_dphase_dt(s: SPoint, alpha: int, n_terms: int = GW_DEFAULT_TERMS,
                 return_last_term: bool = False):
    """t-derivative of the product-route phase at fixed N (termwise derivative).

    With `return_last_term` the magnitude of the final summand is returned
    alongside as a convergence diagnostic.
    """
    if n_terms < 1:
        raise DomainError("n_terms must be at least 1")
    a, v = _ab(s, alpha)
    total = -EULER_GAMMA / 2.0 - a / (2.0 * (a * a + v * v))
    last = 0.0
    lo = 1
    while lo <= n_terms:
        hi = min(lo + _BLOCK, n_terms + 1)
        n = np.arange(lo, hi, dtype=np.float64)
        na = n + a
        terms = 0.5 * (a * na + v * v) / (n * (na * na + v * v))
        total += float(np.sum(terms))
        last = float(terms[-1])
        lo = hi
    if return_last_term:
        return total, abs(last)
    return total


def gamma_dphase_dt(t, eps: float, alpha: int) -> np.ndarray | float:
    """Limit of `gw_dphase_dt`, vectorized over t (head sum plus closed tail)."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    a, _ = _ab(SPoint(eps, 0.0), alpha)
    v = t_arr / 2.0
    vmax = float(np.max(np.abs(v))) if v.size else 0.0
    n0 = int(max(64, math.ceil(4.0 * vmax) + 32))

    n = np.arange(1, n0 + 1, dtype=np.float64)[:, None]
    na = n + a
    v2 = v * v
    head = 0.5 * np.sum((a * na + v2[None, :]) / (n * (na * na + v2[None, :])), axis=0)

    w = n0 + 1.0 + a
    tail = 0.5 * float(digamma(w) - digamma(n0 + 1.0)) * np.ones_like(v)
    pw = np.ones_like(v)
    for j in range(_tail_order(vmax, w) + 1):
        pw = pw * v2
        term = 0.5 * ((-1) ** j) * float(hurwitz_zeta_real(2 * j + 3, w)) * pw
        tail += term
        if np.max(np.abs(term)) < 1e-18 * (1.0 + np.max(np.abs(tail))):
            break
    out = -EULER_GAMMA / 2.0 - a / (2.0 * (a * a + v2)) + head + tail
    return out if np.ndim(t) else float(out[0])


def prefactor_dphase_dt(s: SPoint, params: PrefactorParams,
                        n_terms: int = GW_DEFAULT_TERMS) -> float:
    """t-derivative of the full prefactor phase: log(q/pi)/2 plus the Gamma part."""
    return 0.5 * math.log(params.q / math.pi) + gw_dphase_dt(s, params.alpha, n_terms)


# --------------------------------------------------------------------------
# asymptotic (Stirling) route
# --------------------------------------------------------------------------

def _stirling_z(t: float, eps: float, alpha: int) -> complex:
    return complex((2.0 * eps + 2.0 * alpha - 3.0) / 4.0, t / 2.0)


def stirling_phase_main(t: float, eps: float, params: PrefactorParams) -> float:
    """Growing part of the prefactor phase: -t/2 + (t/2) log(tq/2pi) - pi/8 + (pi/4)(eps+alpha)."""
    if t <= 0.0:
        raise DomainError("the asymptotic branch requires t > 0")
    y = eps + params.alpha
    return (-t / 2.0 + (t / 2.0) * math.log(t * params.q / (2.0 * math.pi))
            - math.pi / 8.0 + (math.pi / 4.0) * y)


def stirling_phase_main_dt(t: float, params: PrefactorParams) -> float:
    """d/dt of the growing part: log sqrt(t*q/(2*pi))."""
    if t <= 0.0:
        raise DomainError("the asymptotic branch requires t > 0")
    return 0.5 * math.log(t * params.q / (2.0 * math.pi))


def stirling_phase_correction(t: float, eps: float, alpha: int) -> float:
    """Phase part that vanishes as t -> oo (exact closed form)."""
    if t == 0.0:
        raise DomainError("correction term is undefined at t = 0")
    y = eps + alpha
    u = (2.0 * y - 3.0) / (2.0 * t)
    return (t / 4.0) * math.log1p(u * u) - ((2.0 * y - 1.0) / 4.0) * math.atan(u)


def stirling_phase_correction_quadratic(t: float, eps: float, alpha: int) -> float:
    """Large-t quadratic approximation of the vanishing part."""
    if t == 0.0:
        raise DomainError("correction term is undefined at t = 0")
    y = eps + alpha
    u = (2.0 * y - 3.0) / (2.0 * t)
    return (t / 4.0) * u * u - ((2.0 * y - 1.0) / 4.0) * u


def stirling_phase_correction_dt(t: float, eps: float, alpha: int) -> float:
    """Analytic t-derivative of the vanishing part."""
    if t == 0.0:
        raise DomainError("correction term is undefined at t = 0")
    y = eps + alpha
    u = (2.0 * y - 3.0) / (2.0 * t)
    one = 1.0 + u * u
    return (0.25 * math.log1p(u * u) - u * u / (2.0 * one)
            + (2.0 * y - 1.0) * u / (4.0 * t * one))


def stirling_phase_bernoulli(t: float, eps: float, alpha: int,
                             cfg: StirlingConfig = DEFAULT_STIRLING) -> tuple[float, float]:
    """Bernoulli-series phase terms k = 1..K-1 and the rigorous remainder bound.

    Returns (value, error_bound).  A bound exceeding |value| flags the result
    as unusable at this t; the caller decides.
    """
    if t <= 0.0:
        raise DomainError("the asymptotic branch requires t > 0")
    z = _stirling_z(t, eps, alpha)
    val = 0.0
    for k in range(1, cfg.K):
        b = float(cfg.bernoulli[2 * k])
        val += (b / (2 * k * (2 * k - 1)) * z ** (1 - 2 * k)).imag
    b_next = abs(float(cfg.bernoulli[2 * cfg.K]))
    bound = (b_next / (2 * cfg.K * (2 * cfg.K - 1) * abs(z) ** (2 * cfg.K - 1))
             / math.cos(math.atan2(z.imag, z.real) / 2.0) ** (2 * cfg.K))
    return val, bound


def stirling_phase_bernoulli_dt(t: float, eps: float, alpha: int,
                                cfg: StirlingConfig = DEFAULT_STIRLING) -> float:
    """Analytic t-derivative of the Bernoulli phase terms."""
    if t <= 0.0:
        raise DomainError("the asymptotic branch requires t > 0")
    z = _stirling_z(t, eps, alpha)
    fprime = 0.0 + 0.0j
    for k in range(1, cfg.K):
        b = float(cfg.bernoulli[2 * k])
        fprime += -b / (2 * k) * z ** (-2 * k)
    return 0.5 * fprime.real


def stirling_phase(t: float, eps: float, params: PrefactorParams,
                   cfg: StirlingConfig = DEFAULT_STIRLING,
                   with_bound: bool = False):
    """Total prefactor phase by the asymptotic route (refuses t < 0.5)."""
    if t < T_STIRLING_MIN:
        raise DomainError(
            f"asymptotic route is unreliable below t = {T_STIRLING_MIN}; use the product route"
        )
    bern, bound = stirling_phase_bernoulli(t, eps, params.alpha, cfg)
    total = (stirling_phase_main(t, eps, params)
             + stirling_phase_correction(t, eps, params.alpha) + bern)
    if with_bound:
        return total, bound
    return total


def stirling_dphase_dt(t: float, eps: float, params: PrefactorParams,
                       cfg: StirlingConfig = DEFAULT_STIRLING) -> float:
    """t-derivative of the total prefactor phase by the asymptotic route."""
    if t < T_STIRLING_MIN:
        raise DomainError(
            f"asymptotic route is unreliable below t = {T_STIRLING_MIN}; use the product route"
        )
    return (stirling_phase_main_dt(t, params)
            + stirling_phase_correction_dt(t, eps, params.alpha)
            + stirling_phase_bernoulli_dt(t, eps, params.alpha, cfg))


# --------------------------------------------------------------------------
# mixed derivative and crossing points
# --------------------------------------------------------------------------

def mixed_second_derivative(t: float, alpha: int, route: str = "gw",
                            n_terms: int = GW_DEFAULT_TERMS) -> float:
    """d/d eps at eps=0 of the prefactor-phase t-derivative (independent of q).

    Central differences in eps with a three-level Richardson ladder; the step
    is h = max(1e-5, 1e-4 * t).  Raises NumericalInstabilityError when the
    ladder fails to settle.
    """
    if t <= 0.0:
        raise DomainError("mixed derivative requires t > 0")
    if route == "gw":
        if n_terms < 10 ** 5:
            raise DomainError("product route requires n_terms >= 1e5 here")
        f = lambda e: gw_dphase_dt(SPoint(e, t), alpha, n_terms)
    elif route == "stirling":
        params = PrefactorParams.for_alpha(alpha)
        f = lambda e: stirling_dphase_dt(t, e, params)
    else:
        raise DomainError(f"unknown route {route!r}")

    h = max(1e-5, 1e-4 * t)
    d = []
    scale = 1.0
    for step in (h, h / 2.0, h / 4.0):
        fp, fm = f(step), f(-step)
        scale = max(scale, abs(fp), abs(fm))
        d.append((fp - fm) / (2.0 * step))
    r1 = (4.0 * d[1] - d[0]) / 3.0
    r2 = (4.0 * d[2] - d[1]) / 3.0
    tol = max(1e-6 * max(abs(r1), abs(r2)), 1e4 * _MACH * scale / h)
    if abs(r2 - r1) > tol:
        raise NumericalInstabilityError(
            f"Richardson ladder disagreement {abs(r2 - r1):.3e} at t={t}"
        )
    return (16.0 * r2 - r1) / 15.0


def find_t_cross(params: PrefactorParams, n_terms: int = GW_DEFAULT_TERMS,
                 t_max: float = 100.0, tol: float = 1e-4) -> float | None:
    """Zero crossing of the prefactor-phase t-derivative on (0, t_max].

    Returns None when the curve is positive for all t (no crossing).  The
    curve is strictly increasing in t, so a single bisection suffices.
    """
    f = lambda tt: prefactor_dphase_dt(SPoint(0.0, tt), params, n_terms)
    t_lo = 1e-3
    if f(t_lo) > 0.0:
        return None
    grid = np.concatenate([np.geomspace(t_lo, 1.0, 12)[1:], np.linspace(1.25, t_max, 40)])
    hi = None
    for g in grid:
        if f(float(g)) > 0.0:
            hi = float(g)
            break
        t_lo = float(g)
    if hi is None:
        raise NumericalInstabilityError(f"no sign change found on (0, {t_max}]")
    while hi - t_lo > tol:
        mid = 0.5 * (t_lo + hi)
        if f(mid) > 0.0:
            hi = mid
        else:
            t_lo = mid
    return 0.5 * (t_lo + hi)

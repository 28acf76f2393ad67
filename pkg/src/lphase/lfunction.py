"""Dirichlet L-functions in the critical strip, their completions, and zeros.

L(s, chi) is evaluated through Hurwitz zeta values,
    L(s, chi) = q^(-s) * sum_{r mod q, gcd(r,q)=1} chi(r) zeta(s, r/q),
with each zeta(s, a) computed by Euler-Maclaurin continuation (head sum,
integral and half terms, Bernoulli corrections, explicit remainder
estimate).  This is accurate to ~1e-13 relative over the desk-scale window
|t| <= 100 and is valid throughout the strip for non-principal characters.

The completed function
    xi(s, chi) = (q/pi)^((s+alpha)/2) Gamma((s+alpha)/2) L(s, chi)
takes its Gamma modulus and phase from the product route in `gammaphase`
(single Gamma authority).  The rotation
    eta = exp(i/2 * angle(i^alpha sqrt(q) / tau(chi))) * xi
is real on the critical line for primitive characters; its sign changes
locate the zeros, and the quantity (eta')^2 - eta*eta'' equals the
eps-derivative of the angular momentum of xi at eps = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import (
    DirichletCharacter,
    SPoint,
    _factorize,
    enumerate_characters,
    gauss_sum,
    primitive_inducer,
)
from .errors import DomainError, NumericalInstabilityError
from .gammaphase import (
    PrefactorParams,
    gamma_log_abs,
    gamma_phase,
    mixed_second_derivative,
    prefactor_dphase_dt,
)

__all__ = [
    "LValue",
    "EtaSample",
    "ZeroRecord",
    "l_eval",
    "l_on_grid",
    "xi_eval",
    "xi_on_grid",
    "normalizer_phase",
    "eta_eval",
    "eta_on_grid",
    "angular_momentum",
    "angular_momentum_on_grid",
    "xi_phase_dt",
    "angular_momentum_eps_slope",
    "eps_slope_on_grid",
    "reduction_identities",
    "find_zeros_on_line",
    "sufficient_condition_check",
]


# --------------------------------------------------------------------------
# Euler-Maclaurin Hurwitz zeta
# --------------------------------------------------------------------------

_BERN = [
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
    Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510),
    Fraction(43867, 798), Fraction(-174611, 330), Fraction(854513, 138),
    Fraction(-236364091, 2730), Fraction(8553103, 6),
]
# B_{2k} / (2k)! for k = 1, 2, ...
_BERN_FACT = [float(b) / math.factorial(2 * (k + 1)) for k, b in enumerate(_BERN)]


def _hurwitz_zeta(svals: np.ndarray, a: float, n_head: int, n_bern: int,
                  subtract_pole: bool = False) -> tuple[np.ndarray, float]:
    """zeta(s, a) for an array of complex s (continuation via Euler-Maclaurin).

    With subtract_pole the simple pole 1/(s-1) is removed, which keeps the
    evaluation finite at s = 1; character sums over a full period restore
    the same L-value because the pole coefficients cancel exactly.

    Returns (values, remainder_estimate); the estimate is the magnitude of
    the first dropped Bernoulli term inflated by the standard |s+2K+1| /
    (sigma+2K+1) factor, maximized over the array.
    """
    s = np.asarray(svals, dtype=np.complex128)
    n = np.arange(n_head, dtype=np.float64)[:, None] + a
    head = np.sum(np.exp(-s[None, :] * np.log(n)), axis=0)

    w = n_head + a
    lw = math.log(w)
    if subtract_pole:
        # w^(1-s)/(s-1) - 1/(s-1) = -expm1((1-s) log w)/(1-s), stable at s = 1
        u = 1.0 - s
        tiny = np.abs(u) < 1e-6
        us = np.where(tiny, 0.0, u)
        direct = -np.expm1(np.where(tiny, 1.0, u) * lw) / np.where(tiny, 1.0, u)
        series = -lw * (1.0 + us * lw / 2.0 + us * us * lw * lw / 6.0)
        integral = np.where(tiny, series, direct)
    else:
        integral = np.exp((1.0 - s) * lw) / (s - 1.0)
    out = head + integral + 0.5 * np.exp(-s * lw)

    w_pow = np.exp((-s - 1.0) * lw)   # w^(-s-1)
    poch = s.copy()                   # (s)_{2k-1}, starting at k = 1
    w2 = w * w
    term = np.zeros_like(s)
    for k in range(1, n_bern + 1):
        term = _BERN_FACT[k - 1] * poch * w_pow
        out += term
        poch = poch * (s + (2 * k - 1)) * (s + 2 * k)
        w_pow = w_pow / w2
    next_term = np.abs(_BERN_FACT[n_bern] * poch * w_pow)
    sigma = float(np.min(s.real))
    inflate = (np.max(np.abs(s)) + 2 * n_bern + 1) / max(sigma + 2 * n_bern + 1, 1.0)
    est = float(np.max(next_term)) * inflate if s.size else 0.0
    return out, est


def _em_sizes(t_max: float) -> tuple[int, int]:
    return max(24, int(t_max) + 40), 11


def _l_values(chi: DirichletCharacter, svals: np.ndarray,
              n_head: int | None = None) -> tuple[np.ndarray, float, int]:
    s = np.atleast_1d(np.asarray(svals, dtype=np.complex128))
    t_max = float(np.max(np.abs(s.imag))) if s.size else 0.0
    nh, nb = _em_sizes(t_max)
    if n_head is not None:
        nh = n_head
    q = chi.q
    total = np.zeros_like(s)
    err = 0.0
    # removing the (a-independent) zeta pole per class keeps s = 1 finite;
    # for a non-principal character the removed parts sum to zero exactly
    drop_pole = not chi.is_principal
    for r in range(1, q + 1):
        turn = chi.phase_turns[r % q]
        if turn is None:
            continue
        z, e = _hurwitz_zeta(s, r / q, nh, nb,  # r = q occurs only for q = 1 (a = 1)
                             subtract_pole=drop_pole)
        total += chi.value(r) * z
        err += e
    scale = np.exp(-s * math.log(q)) if q > 1 else np.ones_like(s)
    qfac = float(q) ** (-float(np.min(s.real)))
    return scale * total, err * qfac, nh


@dataclass(frozen=True)
class LValue:
    s: SPoint
    chi: DirichletCharacter
    value: complex
    abs_err_estimate: float
    n_terms_used: int


def l_eval(s: SPoint, chi: DirichletCharacter, tol: float = 1e-10) -> LValue:
    """L(s, chi) with an a-posteriori remainder estimate <= tol.

    Non-principal characters are accepted for eps > -1/2; the principal
    character only for eps > 1/2 (use the reduction identity inside the
    strip, where its L-function inherits the zeta pole).
    """
    if chi.is_principal:
        if s.eps <= 0.5:
            raise DomainError(
                "principal character inside the strip: evaluate via the reduction identity"
            )
    elif s.eps <= -0.5:
        raise DomainError("L-series evaluation requires Re(s) > 0")

    nh, _ = _em_sizes(abs(s.t))
    for _ in range(6):
        vals, err, used = _l_values(chi, np.array([s.s]), n_head=nh)
        if err <= tol or nh > 4000:
            break
        nh = int(nh * 1.7) + 8
    return LValue(s=s, chi=chi, value=complex(vals[0]),
                  abs_err_estimate=float(err), n_terms_used=used * max(chi.q, 1))


def l_on_grid(chi: DirichletCharacter, eps: float, t_grid: np.ndarray) -> np.ndarray:
    """Vectorized L(1/2+eps+it, chi) over a t grid (non-principal only)."""
    if chi.is_principal and eps <= 0.5:
        raise DomainError("principal character inside the strip has a pole-bearing L")
    s = 0.5 + eps + 1j * np.asarray(t_grid, dtype=np.float64)
    vals, _, _ = _l_values(chi, s)
    return vals


# --------------------------------------------------------------------------
# completed function and its real rotation
# --------------------------------------------------------------------------

def _require_primitive(chi: DirichletCharacter) -> None:
    if chi.is_principal or not chi.is_primitive:
        raise DomainError("completed function requires a primitive non-principal character")


def xi_on_grid(chi: DirichletCharacter, eps: float, t_grid: np.ndarray) -> np.ndarray:
    """xi(1/2+eps+it, chi) over a t grid; entire in s."""
    _require_primitive(chi)
    t = np.asarray(t_grid, dtype=np.float64)
    alpha = chi.parity
    lvals = l_on_grid(chi, eps, t)
    lnqpi = math.log(chi.q / math.pi)
    log_mod = gamma_log_abs(t, eps, alpha) + (0.5 + eps + alpha) / 2.0 * lnqpi
    phase = gamma_phase(t, eps, alpha) + 0.5 * t * lnqpi
    return np.exp(log_mod + 1j * phase) * lvals


def xi_eval(s: SPoint, chi: DirichletCharacter) -> complex:
    return complex(xi_on_grid(chi, s.eps, np.array([s.t]))[0])


def normalizer_phase(chi: DirichletCharacter) -> float:
    """Half the principal-value angle of i^alpha sqrt(q) / tau(chi)."""
    _require_primitive(chi)
    w = (1j ** chi.parity) * math.sqrt(chi.q) / gauss_sum(chi)
    return 0.5 * math.atan2(w.imag, w.real)


@dataclass(frozen=True)
class EtaSample:
    t: float
    eps: float
    chi: DirichletCharacter
    eta: complex
    normalizer: float


def eta_on_grid(chi: DirichletCharacter, eps: float,
                t_grid: np.ndarray) -> tuple[np.ndarray, float]:
    """Rotated completion eta over a t grid; real up to noise when eps = 0."""
    half = normalizer_phase(chi)
    rot = complex(math.cos(half), math.sin(half))
    return rot * xi_on_grid(chi, eps, t_grid), half


def eta_eval(t: float, eps: float, chi: DirichletCharacter) -> EtaSample:
    vals, half = eta_on_grid(chi, eps, np.array([t]))
    return EtaSample(t=t, eps=eps, chi=chi, eta=complex(vals[0]), normalizer=half)


# --------------------------------------------------------------------------
# angular momentum and its eps-derivative
# --------------------------------------------------------------------------

def _ang_mom_from_samples(center: np.ndarray, lo: np.ndarray, hi: np.ndarray,
                          step: float) -> np.ndarray:
    d_re = (hi.real - lo.real) / (2.0 * step)
    d_im = (hi.imag - lo.imag) / (2.0 * step)
    return center.real * d_im - center.imag * d_re


def angular_momentum_on_grid(chi: DirichletCharacter, eps: float, t_grid: np.ndarray,
                             dt: float = 1e-3) -> np.ndarray:
    """Re xi * d_t Im xi - Im xi * d_t Re xi over a grid (Richardson in dt)."""
    t = np.asarray(t_grid, dtype=np.float64)
    xc = xi_on_grid(chi, eps, t)
    xm, xp = xi_on_grid(chi, eps, t - dt), xi_on_grid(chi, eps, t + dt)
    xm2, xp2 = xi_on_grid(chi, eps, t - dt / 2), xi_on_grid(chi, eps, t + dt / 2)
    l_h = _ang_mom_from_samples(xc, xm, xp, dt)
    l_h2 = _ang_mom_from_samples(xc, xm2, xp2, dt / 2)
    return (4.0 * l_h2 - l_h) / 3.0


def angular_momentum(s: SPoint, chi: DirichletCharacter, dt: float = 1e-3) -> float:
    """Angular momentum of xi at s; vanishes identically on the critical line."""
    if dt <= 0:
        raise DomainError("dt must be positive")
    t = np.array([s.t])
    xc = xi_on_grid(chi, s.eps, t)
    xm, xp = xi_on_grid(chi, s.eps, t - dt), xi_on_grid(chi, s.eps, t + dt)
    xm2, xp2 = xi_on_grid(chi, s.eps, t - dt / 2), xi_on_grid(chi, s.eps, t + dt / 2)
    l_h = float(_ang_mom_from_samples(xc, xm, xp, dt)[0])
    l_h2 = float(_ang_mom_from_samples(xc, xm2, xp2, dt / 2)[0])
    scale = float(np.abs(xc[0]) ** 2 + np.abs(xp[0]) ** 2)
    if abs(l_h2 - l_h) > max(0.05 * max(abs(l_h), abs(l_h2)), 1e-7 * scale):
        raise NumericalInstabilityError(
            f"angular-momentum Richardson steps disagree at t={s.t}: {l_h} vs {l_h2}"
        )
    return (4.0 * l_h2 - l_h) / 3.0


def xi_phase_dt(chi: DirichletCharacter, eps: float, t: float, dt: float = 1e-3) -> float:
    """Numerical d/dt of the phase of xi, via Im(xi'/xi) with Richardson."""
    tc = np.array([t - dt, t - dt / 2, t + dt / 2, t + dt])
    x = xi_on_grid(chi, eps, tc)
    xc = xi_on_grid(chi, eps, np.array([t]))[0]
    d_h = (x[3] - x[0]) / (2.0 * dt)
    d_h2 = (x[2] - x[1]) / dt
    deriv = (4.0 * d_h2 - d_h) / 3.0
    return float((deriv / xc).imag)


@dataclass(frozen=True)
class EpsSlopeResult:
    """Two routes to d/d eps of the angular momentum at eps = 0."""

    t: float
    value: float        # (eta')^2 - eta * eta'' by t-differences on the line
    cross_check: float  # (L(eps=delta) - L(eps=0)) / delta
    eta: float


def _eta_derivatives(chi: DirichletCharacter, t: float, h: float) -> tuple[float, float, float]:
    grid = np.array([t - h, t - h / 2, t, t + h / 2, t + h])
    y = eta_on_grid(chi, 0.0, grid)[0].real
    d_h = (y[4] - y[0]) / (2.0 * h)
    d_h2 = (y[3] - y[1]) / h
    dp = (4.0 * d_h2 - d_h) / 3.0
    c_h = (y[4] - 2.0 * y[2] + y[0]) / (h * h)
    c_h2 = (y[3] - 2.0 * y[2] + y[1]) / (h * h / 4.0)
    dpp = (4.0 * c_h2 - c_h) / 3.0
    return float(y[2]), dp, dpp


def angular_momentum_eps_slope(t: float, chi: DirichletCharacter, dt: float = 1e-3,
                               delta: float = 1e-4) -> EpsSlopeResult:
    """(eta')^2 - eta*eta'' at eps=0, with the finite-difference eps route alongside."""
    _require_primitive(chi)
    y, dp, dpp = _eta_derivatives(chi, t, dt)
    if abs(y) < 0.05 * max(abs(dp) * dt, abs(y), 1e-300):
        # close to a zero of eta: shrink the stencil
        y, dp, dpp = _eta_derivatives(chi, t, 1e-4)
    value = dp * dp - y * dpp
    lm_d = angular_momentum(SPoint(delta, t), chi, dt)
    lm_0 = angular_momentum(SPoint(0.0, t), chi, dt)
    return EpsSlopeResult(t=t, value=value, cross_check=(lm_d - lm_0) / delta, eta=y)


def eps_slope_on_grid(chi: DirichletCharacter, t_grid: np.ndarray,
                      dt: float = 1e-3) -> np.ndarray:
    """(eta')^2 - eta*eta'' on a grid (vectorized, fixed stencil)."""
    _require_primitive(chi)
    t = np.asarray(t_grid, dtype=np.float64)
    y = [eta_on_grid(chi, 0.0, t + u * dt)[0].real for u in (-1.0, -0.5, 0.0, 0.5, 1.0)]
    d_h = (y[4] - y[0]) / (2.0 * dt)
    d_h2 = (y[3] - y[1]) / dt
    dp = (4.0 * d_h2 - d_h) / 3.0
    c_h = (y[4] - 2.0 * y[2] + y[0]) / (dt * dt)
    c_h2 = (y[3] - 2.0 * y[2] + y[1]) / (dt * dt / 4.0)
    dpp = (4.0 * c_h2 - c_h) / 3.0
    return dp * dp - y[2] * dpp


# --------------------------------------------------------------------------
# reduction identities
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ReductionEntry:
    chi_index: int
    kind: str       # "principal" or "induced"
    residual: float


@dataclass(frozen=True)
class ReductionReport:
    s: SPoint
    q: int
    entries: tuple[ReductionEntry, ...]

    @property
    def max_residual(self) -> float:
        return max(e.residual for e in self.entries)


def reduction_identities(s: SPoint, q: int) -> ReductionReport:
    """Residuals of the principal-to-zeta and induced-character identities.

    Requires eps > 1/2 so every factor converges absolutely.
    """
    if s.eps <= 0.5:
        raise DomainError("reduction identities are checked in the absolute-convergence region")
    zeta_s, _ = _hurwitz_zeta(np.array([s.s]), 1.0, *_em_sizes(abs(s.t)))
    zeta_s = complex(zeta_s[0])
    q_primes = [p for p, _ in _factorize(q)] if q > 1 else []

    entries = []
    for chi in enumerate_characters(q):
        lhs = l_eval(s, chi).value
        if chi.is_principal:
            rhs = zeta_s
            for p in q_primes:
                rhs *= 1.0 - p ** (-s.s)
            entries.append(ReductionEntry(chi.index, "principal", abs(lhs - rhs)))
        else:
            psi = primitive_inducer(chi)
            rhs = l_eval(s, psi).value
            for p in q_primes:
                rhs *= 1.0 - psi.value(p) * p ** (-s.s)
            entries.append(ReductionEntry(chi.index, "induced", abs(lhs - rhs)))
    return ReductionReport(s=s, q=q, entries=tuple(entries))


# --------------------------------------------------------------------------
# zeros on the critical line
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ZeroRecord:
    t_zero: float | None
    bracket: tuple[float, float]
    tol: float
    sign_before: int
    sign_after: int
    suspected_multiple: bool = False


def find_zeros_on_line(chi: DirichletCharacter, t_lo: float, t_hi: float,
                       grid_step: float, tol: float = 1e-8) -> list[ZeroRecord]:
    """Sign-change zeros of eta on [t_lo, t_hi], bisected to width <= tol.

    Grid dips of |eta| below 1e-8 of the local scale without a sign change
    are recorded as suspected multiple zeros and left unrefined.  Negative t
    is allowed (used to confirm the +/-t pairing of real-character zeros).
    """
    if t_hi <= t_lo:
        raise DomainError("need t_lo < t_hi")
    if grid_step <= 0:
        raise DomainError("grid_step must be positive")
    grid = np.arange(t_lo, t_hi + grid_step / 2.0, grid_step)
    vals = eta_on_grid(chi, 0.0, grid)[0].real

    def f(t: float) -> float:
        return float(eta_on_grid(chi, 0.0, np.array([t]))[0][0].real)

    records: list[ZeroRecord] = []
    for i in range(len(grid) - 1):
        a, b = float(grid[i]), float(grid[i + 1])
        fa, fb = float(vals[i]), float(vals[i + 1])
        if fa == 0.0:  # exact grid hit
            records.append(ZeroRecord(a, (a, a), 0.0, 0, int(math.copysign(1, fb))))
            continue
        if fa * fb < 0.0:
            lo, hi, flo = a, b, fa
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                fm = f(mid)
                if fm == 0.0:
                    lo = hi = mid
                    break
                if flo * fm < 0.0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            records.append(ZeroRecord(0.5 * (lo + hi), (a, b), tol,
                                      int(math.copysign(1, fa)), int(math.copysign(1, fb))))

    absvals = np.abs(vals)
    for i in range(1, len(grid) - 1):
        window = absvals[max(0, i - 10): i + 11]
        scale = float(np.max(window)) if window.size else 0.0
        if (absvals[i] < 1e-8 * scale and absvals[i] <= absvals[i - 1]
                and absvals[i] <= absvals[i + 1] and vals[i - 1] * vals[i + 1] > 0):
            records.append(ZeroRecord(None, (float(grid[i - 1]), float(grid[i + 1])),
                                      grid_step, int(math.copysign(1, vals[i - 1])),
                                      int(math.copysign(1, vals[i + 1])),
                                      suspected_multiple=True))
    records.sort(key=lambda r: r.bracket[0])
    return records


def sufficient_condition_check(chi: DirichletCharacter, t: float,
                               n_terms: int = 2 * 10 ** 5) -> bool:
    """Both odd-character positivity conditions at (t, eps=0).

    True when the prefactor-phase t-derivative and its eps-derivative are
    simultaneously positive, so the positivity argument applies locally.
    """
    _require_primitive(chi)
    if chi.parity != 1:
        raise DomainError("the sufficient condition applies to odd characters")
    params = PrefactorParams.for_character(chi)
    if prefactor_dphase_dt(SPoint(0.0, t), params, n_terms) <= 0.0:
        return False
    return mixed_second_derivative(t, 1, route="gw", n_terms=max(n_terms, 10 ** 5)) > 0.0

"""Windowed Euler-product phase estimators and oscillation bookkeeping.

The phase of the Euler product over primes p <= p_max, gcd(p, q) = 1,

    phase(t) = - sum_p arctan( sin(log(p) t - angle(chi(p)))
                               / (p^(1/2+eps) - cos(log(p) t - angle(chi(p)))) ),

converges only conditionally for eps <= 1/2, so the summation order is part
of every contract here: terms are accumulated over ascending primes, and
any grouping (class tagging, oscillation braces, block pre-sums) must keep
that order.  numpy's pairwise reduction satisfies this -- it groups
contiguous blocks in order and never permutes terms -- and is bit-stable
across runs.

The incremental ratio over the window t +/- pi/log(p_star) is the working
phase-derivative estimator (`windowed_ratio_exact`); replacing each arctan
increment by its leading cosine term gives `windowed_ratio_approx`, and
`estimator_residual` exposes their difference split into the two
structurally bounded pieces (higher arctan orders, and the 1/p-coupled
term).  Oscillation masses collect |cosine summand| between consecutive
cosine zero-transitions in prime space, once by the ordered prime sum and
once by the Li integral of the same integrand; their ratios at two eps
values drive the level-monotonicity checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .arith import DirichletCharacter, PrimeTable, SPoint, euler_phi
from .errors import (
    DegenerateInputError,
    DomainError,
    SingularityError,
    TruncationError,
)

__all__ = [
    "WindowParams",
    "PhaseScan",
    "OscillationLedger",
    "LedgerEntry",
    "MassRatios",
    "LevelCheckResult",
    "euler_phase",
    "windowed_ratio_exact",
    "windowed_ratio_approx",
    "EstimatorResidual",
    "estimator_residual",
    "oscillation_boundaries",
    "max_k_for_bound",
    "build_oscillation_ledger",
    "ledger_signed_sum",
    "oscillation_mass_ratios",
    "level_check",
    "scan",
    "spike_strips",
    "class_li_combination",
]

MIN_EPS = -0.4  # arctan denominators can degenerate for p=2,3 below this


@dataclass(frozen=True)
class WindowParams:
    """Window scale p_star and summation cutoff p_max.

    The window half-width is pi/log(p_star).  p_star is real and may exceed
    p_max: a narrower window applied to the same finite prime sum is still a
    well-defined incremental ratio (used for derivative-consistency checks).
    """

    p_star: float
    p_max: int

    def __post_init__(self):
        if self.p_star <= 1.0:
            raise DomainError("p_star must exceed 1")
        if self.p_max < 2:
            raise DomainError("p_max must be at least 2")

    @property
    def half_width(self) -> float:
        return math.pi / math.log(self.p_star)

    @property
    def delta_t(self) -> float:
        return 2.0 * math.pi / math.log(self.p_star)


@dataclass
class PhaseScan:
    chi: DirichletCharacter
    eps: float
    t_grid: np.ndarray
    values: np.ndarray
    estimator: str  # "exact_arctan" | "cosine_approx"
    window: WindowParams

    def __post_init__(self):
        if len(self.values) != len(self.t_grid):
            raise DomainError("scan values and grid lengths differ")
        if np.any(np.diff(self.t_grid) <= 0):
            raise DomainError("t grid must be strictly increasing")


def _prime_data(chi: DirichletCharacter, primes: PrimeTable,
                p_max: float | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Primes coprime to q (ascending), their logs, and character angles."""
    angles = chi.angles_by_residue()
    res = primes.primes % chi.q
    theta = angles[res]
    keep = ~np.isnan(theta)
    p = primes.primes[keep].astype(np.float64)
    lp = primes.log_primes[keep]
    th = theta[keep]
    if p_max is not None:
        cut = np.searchsorted(p, p_max, side="left")
        p, lp, th = p[:cut], lp[:cut], th[:cut]
    if __debug__ and p.size > 1:
        assert np.all(np.diff(p) > 0), "prime order violated"
    return p, lp, th


def _check_eps(eps: float) -> None:
    if eps < MIN_EPS:
        raise DomainError(f"eps < {MIN_EPS} is outside the supported strip")


def euler_phase(s: SPoint, chi: DirichletCharacter, primes: PrimeTable) -> float:
    """Euler-product phase partial sum at s, accumulated over ascending primes."""
    _check_eps(s.eps)
    p, lp, th = _prime_data(chi, primes)
    denom = p ** (0.5 + s.eps) - np.cos(lp * s.t - th)
    bad = np.abs(denom) < 1e-14
    if np.any(bad):
        raise SingularityError("vanishing arctan denominator",
                               where=int(p[np.argmax(bad)]))
    return float(-np.sum(np.arctan(np.sin(lp * s.t - th) / denom)))


def _arctan_terms(p, lp, th, t, eps):
    denom = p ** (0.5 + eps) - np.cos(lp * t - th)
    bad = np.abs(denom) < 1e-14
    if np.any(bad):
        raise SingularityError("vanishing arctan denominator",
                               where=int(p[np.argmax(bad)]))
    return np.arctan(np.sin(lp * t - th) / denom)


def windowed_ratio_exact(t: float, eps: float, chi: DirichletCharacter,
                         primes: PrimeTable, window: WindowParams) -> float:
    """Incremental phase ratio over [t - w, t + w], w = pi/log(p_star)."""
    _check_eps(eps)
    p, lp, th = _prime_data(chi, primes, p_max=window.p_max)
    w = window.half_width
    diff = _arctan_terms(p, lp, th, t + w, eps) - _arctan_terms(p, lp, th, t - w, eps)
    return float(-math.log(window.p_star) / (2.0 * math.pi) * np.sum(diff))


def windowed_ratio_approx(t: float, eps: float, chi: DirichletCharacter,
                          primes: PrimeTable, window: WindowParams) -> float:
    """Leading cosine approximation of the windowed ratio (no denominators)."""
    _check_eps(eps)
    p, lp, th = _prime_data(chi, primes, p_max=window.p_max)
    lnps = math.log(window.p_star)
    terms = np.cos(lp * t - th) * np.sin(math.pi * lp / lnps) / p ** (0.5 + eps)
    return float(-lnps / math.pi * np.sum(terms))


@dataclass(frozen=True)
class EstimatorResidual:
    """Exact-minus-approx estimator difference and its two structured pieces."""

    total: float
    higher_order: float   # arctan orders three and up
    coupled: float        # sin*cos / ((p^sigma - cos) p^sigma) piece


def _x_minus_arctan_arr(x: np.ndarray) -> np.ndarray:
    small = np.abs(x) < 0.1
    xs = np.where(small, x, 0.1)
    x2 = xs * xs
    series = xs * x2 * (1.0 / 3.0 + x2 * (-1.0 / 5.0 + x2 * (1.0 / 7.0 + x2 * (-1.0 / 9.0 + x2 / 11.0))))
    return np.where(small, series, x - np.arctan(x))


def estimator_residual(t: float, eps: float, chi: DirichletCharacter,
                       primes: PrimeTable, window: WindowParams) -> EstimatorResidual:
    """windowed_ratio_exact - windowed_ratio_approx, split termwise.

    Each arctan increment decomposes exactly as
      arctan(x) = sin/p^sigma + sin*cos/((p^sigma - cos) p^sigma) + (arctan(x) - x),
    so the residual is the ordered sum of the last two pieces evaluated at
    the window endpoints; both remain bounded as p_max grows for eps > 0.
    """
    _check_eps(eps)
    p, lp, th = _prime_data(chi, primes, p_max=window.p_max)
    w = window.half_width
    sigma = 0.5 + eps
    pref = -math.log(window.p_star) / (2.0 * math.pi)

    higher = np.zeros_like(p)
    coupled = np.zeros_like(p)
    for tt, sign in ((t + w, 1.0), (t - w, -1.0)):
        ang = lp * tt - th
        sin_a, cos_a = np.sin(ang), np.cos(ang)
        denom = p ** sigma - cos_a
        bad = np.abs(denom) < 1e-14
        if np.any(bad):
            raise SingularityError("vanishing arctan denominator",
                                   where=int(p[np.argmax(bad)]))
        x = sin_a / denom
        higher += sign * (-_x_minus_arctan_arr(x))
        coupled += sign * (sin_a * cos_a / (denom * p ** sigma))
    higher_val = float(pref * np.sum(higher))
    coupled_val = float(pref * np.sum(coupled))
    return EstimatorResidual(total=higher_val + coupled_val,
                             higher_order=higher_val, coupled=coupled_val)


# --------------------------------------------------------------------------
# oscillation intervals and masses
# --------------------------------------------------------------------------

def oscillation_boundaries(k: int, h: int, t: float,
                           chi: DirichletCharacter) -> tuple[float, float]:
    """Zero-transition abscissae of cos(log(x) t - angle(chi(h))) for the k-th turn.

    The cosine increases through zero at the first value and decreases
    through zero at the second.
    """
    if t <= 0.0:
        raise DomainError("oscillation boundaries require t > 0")
    th = chi.angle(h)
    x_up = math.exp((2.0 * math.pi * k - math.pi / 2.0 + th) / t)
    x_down = math.exp((2.0 * math.pi * k + math.pi / 2.0 + th) / t)
    return x_up, x_down


def max_k_for_bound(t: float, chi: DirichletCharacter, bound: float) -> int:
    """Largest k such that the (k+1)-th rising boundary stays <= bound for all classes."""
    if t <= 0.0 or bound <= 2.0:
        raise DomainError("need t > 0 and bound > 2")
    ks = []
    for h in range(chi.q):
        if chi.phase_turns[h] is not None:
            th = chi.angle(h)
            ks.append(int(math.floor((t * math.log(bound) + math.pi / 2.0 - th)
                                     / (2.0 * math.pi))) - 1)
    return min(ks)


@dataclass(frozen=True)
class LedgerEntry:
    k: int
    h: int
    x_up: float        # rising cosine zero (interval with positive cosine follows)
    x_down: float      # falling cosine zero
    x_up_next: float   # next rising zero
    o_plus_sum: float
    o_minus_sum: float
    o_plus_li: float
    o_minus_li: float


@dataclass
class OscillationLedger:
    chi: DirichletCharacter
    t: float
    eps: float
    window: WindowParams
    k_max: int
    entries: tuple[LedgerEntry, ...] = field(default=())

    def keys(self) -> list[tuple[int, int]]:
        return [(e.k, e.h) for e in self.entries]


def _mass_sum(p_class, lp_class, th, t, eps, lnps, lo, hi):
    i0 = np.searchsorted(p_class, lo, side="right")
    i1 = np.searchsorted(p_class, hi, side="left")
    if i1 <= i0:
        return 0.0
    pp, ll = p_class[i0:i1], lp_class[i0:i1]
    vals = np.cos(ll * t - th) * np.sin(math.pi * ll / lnps) / pp ** (0.5 + eps)
    return abs(float(lnps / (2.0 * math.pi) * np.sum(vals)))


def _mass_li(th, t, eps, lnps, phi_q, lo, hi):
    lo = max(lo, 2.0)
    if hi <= lo:
        return 0.0
    f = lambda y: (math.cos(math.log(y) * t - th)
                   * math.sin(math.pi * math.log(y) / lnps)
                   / (y ** (0.5 + eps) * math.log(y)))
    val, _ = quad(f, lo, hi, limit=200, epsabs=1e-12, epsrel=1e-10)
    return abs(lnps / (2.0 * math.pi * phi_q) * val)


def build_oscillation_ledger(t: float, eps: float, chi: DirichletCharacter,
                             primes: PrimeTable, window: WindowParams,
                             k_max: int) -> OscillationLedger:
    """Per-(k, h) oscillation masses by ordered prime sum and by Li integral.

    Within (x_up, x_down) the cosine is positive: the prime-sum mass there is
    the plus mass and the Li mass the minus one; the next half-turn swaps the
    roles.  Intervals are clamped below at 2 (no primes, Li starts at 2).
    """
    _check_eps(eps)
    if t <= 0.0:
        raise DomainError("ledger construction requires t > 0")
    largest = max_k_for_bound(t, chi, float(min(window.p_max, window.p_star)))
    if k_max > largest:
        raise TruncationError(
            f"k_max={k_max} pushes boundaries past p_max; largest valid k is {largest}",
            largest_valid=largest,
        )
    lnps = math.log(window.p_star)
    phi_q = euler_phi(chi.q)
    entries = []
    classes = sorted(h for h in range(chi.q) if chi.phase_turns[h] is not None)
    for h in classes:
        th = chi.angle(h)
        pc = (primes.class_primes(h) if chi.q > 1 else primes.primes).astype(np.float64)
        lc = np.log(pc)
        # first k whose falling boundary exceeds 2 (intervals fully below 2 are empty)
        k = int(math.floor((t * math.log(2.0) - math.pi / 2.0 - th) / (2.0 * math.pi))) + 1
        for kk in range(k, k_max + 1):
            x_up = math.exp((2.0 * math.pi * kk - math.pi / 2.0 + th) / t)
            x_down = math.exp((2.0 * math.pi * kk + math.pi / 2.0 + th) / t)
            x_next = math.exp((2.0 * math.pi * (kk + 1) - math.pi / 2.0 + th) / t)
            entries.append(LedgerEntry(
                k=kk, h=h, x_up=x_up, x_down=x_down, x_up_next=x_next,
                o_plus_sum=_mass_sum(pc, lc, th, t, eps, lnps, x_up, x_down),
                o_minus_sum=_mass_sum(pc, lc, th, t, eps, lnps, x_down, x_next),
                o_minus_li=_mass_li(th, t, eps, lnps, phi_q, x_up, x_down),
                o_plus_li=_mass_li(th, t, eps, lnps, phi_q, x_down, x_next),
            ))
    entries.sort(key=lambda e: (e.k, e.h))
    return OscillationLedger(chi=chi, t=t, eps=eps, window=window,
                             k_max=k_max, entries=tuple(entries))


def ledger_signed_sum(ledger: OscillationLedger) -> float:
    """Reassemble the cosine estimator over the covered primes from the ledger.

    Pure regrouping identity: summing 2*(minus - plus) prime masses in (k, h)
    order reproduces `windowed_ratio_approx` restricted to the covered range.
    """
    total = 0.0
    for e in ledger.entries:
        total += 2.0 * (e.o_minus_sum - e.o_plus_sum)
    return total


@dataclass(frozen=True)
class MassRatios:
    mixed: float   # plus masses at eps'' over minus masses at eps'
    plus: float    # plus masses at eps'' over plus masses at eps'
    minus: float   # minus masses at eps'' over minus masses at eps'


def oscillation_mass_ratios(ledger_ref: OscillationLedger,
                            ledger_shifted: OscillationLedger) -> MassRatios:
    """Mass ratios between a reference ledger (eps') and a shifted one (eps'')."""
    if (ledger_ref.t != ledger_shifted.t or ledger_ref.chi != ledger_shifted.chi
            or ledger_ref.window != ledger_shifted.window
            or ledger_ref.keys() != ledger_shifted.keys()):
        raise DomainError("ledgers must share t, chi, window and k range")
    plus_s = sum(e.o_plus_li + e.o_plus_sum for e in ledger_shifted.entries)
    minus_s = sum(e.o_minus_sum + e.o_minus_li for e in ledger_shifted.entries)
    plus_r = sum(e.o_plus_li + e.o_plus_sum for e in ledger_ref.entries)
    minus_r = sum(e.o_minus_sum + e.o_minus_li for e in ledger_ref.entries)
    if minus_r == 0.0 or plus_r == 0.0:
        raise DegenerateInputError("reference ledger masses vanish")
    return MassRatios(mixed=plus_s / minus_r, plus=plus_s / plus_r, minus=minus_s / minus_r)


# --------------------------------------------------------------------------
# level check, scans, spikes
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LevelCheckResult:
    t: float
    eps: float
    windowed: float
    lhs: float      # log sqrt(tq/2pi) + windowed ratio
    xi_phase_dt: float
    defect: float   # lhs - xi phase derivative


def level_check(t: float, eps: float, chi: DirichletCharacter, primes: PrimeTable,
                window: WindowParams) -> LevelCheckResult:
    """Compare log sqrt(tq/2pi) + windowed ratio against the xi phase derivative."""
    from .lfunction import xi_phase_dt  # local import to keep module layering acyclic

    ratio = windowed_ratio_exact(t, eps, chi, primes, window)
    lhs = 0.5 * math.log(t * chi.q / (2.0 * math.pi)) + ratio
    dphi = xi_phase_dt(chi, eps, t)
    return LevelCheckResult(t=t, eps=eps, windowed=ratio, lhs=lhs,
                            xi_phase_dt=dphi, defect=lhs - dphi)


def scan(chi: DirichletCharacter, eps: float, t_grid: np.ndarray, primes: PrimeTable,
         window: WindowParams, estimator: str = "exact_arctan") -> PhaseScan:
    """Windowed estimator sampled over a t grid (one ordered sum per point)."""
    t_grid = np.asarray(t_grid, dtype=np.float64)
    if estimator == "exact_arctan":
        f = windowed_ratio_exact
    elif estimator == "cosine_approx":
        f = windowed_ratio_approx
    else:
        raise DomainError(f"unknown estimator {estimator!r}")
    values = np.array([f(float(t), eps, chi, primes, window) for t in t_grid])
    return PhaseScan(chi=chi, eps=eps, t_grid=t_grid, values=values,
                     estimator=estimator, window=window)


def spike_strips(scan_result: PhaseScan, n_mad: float = 6.0) -> list[tuple[float, float]]:
    """Excluded t strips around estimator excursions.

    A grid point is flagged when |value| exceeds median + n_mad * MAD of
    |values|; each flag contributes a strip of half-width 2*pi/log(p_star),
    and overlapping strips are merged.
    """
    absvals = np.abs(scan_result.values)
    med = float(np.median(absvals))
    mad = float(np.median(np.abs(absvals - med)))
    flagged = scan_result.t_grid[absvals > med + n_mad * mad]
    w = scan_result.window.delta_t
    strips: list[tuple[float, float]] = []
    for t in np.sort(flagged):
        lo, hi = float(t - w), float(t + w)
        if strips and lo <= strips[-1][1]:
            strips[-1] = (strips[-1][0], hi)
        else:
            strips.append((lo, hi))
    return strips


def class_li_combination(t: float, eps: float, chi: DirichletCharacter,
                         window: WindowParams) -> float:
    """Sum over reduced classes of the Li-weighted cosine integral on [2, p_max].

    The class phases sum to zero for non-principal characters, so the exact
    value is 0; the returned number measures how well the per-class
    quadratures cancel.
    """
    _check_eps(eps)
    if chi.is_principal:
        raise DomainError("class combination requires a non-principal character")
    lnps = math.log(window.p_star)
    phi_q = euler_phi(chi.q)
    total = 0.0
    for h in sorted(hh for hh in range(chi.q) if chi.phase_turns[hh] is not None):
        th = chi.angle(h)
        f = lambda u: (math.cos(u * t - th) * math.sin(math.pi * u / lnps)
                       * math.exp(u * (0.5 - eps)) / u)
        val, _ = quad(f, math.log(2.0), math.log(window.p_max),
                      limit=400, epsabs=1e-10, epsrel=1e-10)
        total += val
    return lnps / (math.pi * phi_q) * total

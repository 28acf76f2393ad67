"""Exact Dirichlet-character arithmetic and elementary prime-counting tools.

Characters mod q are stored with exact phases: on the unit group the value
is exp(2*pi*i*r) where r is a rational number of turns kept as a
`fractions.Fraction`.  Multiplicativity then holds exactly (addition of
fractions mod 1), so the million-term prime sums built downstream carry no
phase drift from the character table itself.

Construction decomposes (Z/qZ)* into cyclic factors by the CRT: one
primitive root per odd prime power, and the {-1, 5} generator pair for 2^k
with k >= 3.  Characters are indexed by exponent tuples over those factors,
enumerated lexicographically, which fixes a deterministic ordering (index 0
is always the principal character).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd, isqrt

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, ResourceLimitError

__all__ = [
    "SPoint",
    "DirichletCharacter",
    "PrimeTable",
    "enumerate_characters",
    "conductor_and_primitivity",
    "primitive_inducer",
    "gauss_sum",
    "phase_sum_reduced",
    "euler_phi",
    "sieve_primes",
    "li",
    "pnt_class_ratio",
]


# --------------------------------------------------------------------------
# points of the critical strip
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SPoint:
    """Point s = 1/2 + eps + i*t of the critical strip."""

    eps: float
    t: float

    @property
    def sigma(self) -> float:
        return 0.5 + self.eps

    @property
    def s(self) -> complex:
        return complex(0.5 + self.eps, self.t)


# --------------------------------------------------------------------------
# unit group structure of (Z/qZ)*
# --------------------------------------------------------------------------

def _factorize(q: int) -> list[tuple[int, int]]:
    out = []
    n = q
    for p in range(2, isqrt(q) + 1):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    if n > 1:
        out.append((n, 1))
    return out


def euler_phi(q: int) -> int:
    if q < 1:
        raise DomainError("euler_phi requires q >= 1")
    phi = 1
    for p, e in _factorize(q):
        phi *= (p - 1) * p ** (e - 1)
    return phi


def _primitive_root_mod_p(p: int) -> int:
    if p == 2:
        return 1
    fac = [f for f, _ in _factorize(p - 1)]
    for g in range(2, p):
        if all(pow(g, (p - 1) // f, p) != 1 for f in fac):
            return g
    raise RuntimeError(f"no primitive root found mod {p}")  # unreachable for prime p


def _primitive_root_prime_power(p: int, e: int) -> int:
    # a primitive root g mod p lifts to p^e once g^(p-1) != 1 mod p^2
    g = _primitive_root_mod_p(p)
    if e == 1:
        return g
    if pow(g, p - 1, p * p) == 1:
        g += p
    return g


@dataclass(frozen=True)
class _CyclicFactor:
    """One cyclic factor of (Z/qZ)*, with a discrete-log table mod p^e."""

    prime_power: int
    order: int
    dlog: dict[int, int]  # residue mod prime_power -> exponent


def _unit_group_factors(q: int) -> list[_CyclicFactor]:
    factors: list[_CyclicFactor] = []
    for p, e in _factorize(q):
        pe = p ** e
        if p == 2:
            if e == 1:
                continue  # trivial group
            if e == 2:
                factors.append(_CyclicFactor(4, 2, {1: 0, 3: 1}))
            else:
                # (Z/2^eZ)* = <-1> x <5>; split the discrete log jointly
                half = pe // 4
                log_minus: dict[int, int] = {}
                log_five: dict[int, int] = {}
                val = 1
                for j in range(half):
                    log_minus[val] = 0
                    log_five[val] = j
                    log_minus[pe - val] = 1
                    log_five[pe - val] = j
                    val = (val * 5) % pe
                factors.append(_CyclicFactor(pe, 2, log_minus))
                factors.append(_CyclicFactor(pe, half, log_five))
        else:
            g = _primitive_root_prime_power(p, e)
            order = (p - 1) * p ** (e - 1)
            table = {}
            val = 1
            for j in range(order):
                table[val] = j
                val = (val * g) % pe
            factors.append(_CyclicFactor(pe, order, table))
    return factors


# --------------------------------------------------------------------------
# Dirichlet characters
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DirichletCharacter:
    """Dirichlet character mod q with exact rational phases.

    ``phase_turns[n]`` is the phase of chi(n) as a fraction of a full turn
    for gcd(n, q) = 1, and None where chi vanishes.  ``parity`` is 0 for
    even characters (chi(-1) = 1) and 1 for odd ones.
    """

    q: int
    index: int
    exponents: tuple[int, ...]
    phase_turns: tuple[Fraction | None, ...]
    conductor: int
    parity: int
    is_principal: bool
    is_primitive: bool
    _angles: np.ndarray = field(repr=False, compare=False, hash=False, default=None)

    def turn(self, n: int) -> Fraction | None:
        return self.phase_turns[n % self.q]

    def value(self, n: int) -> complex:
        r = self.phase_turns[n % self.q]
        if r is None:
            return 0.0 + 0.0j
        a = 2.0 * math.pi * float(r)
        return complex(math.cos(a), math.sin(a))

    def angle(self, n: int) -> float:
        """Phase of chi(n) in radians, in [0, 2*pi).  Requires gcd(n, q)=1."""
        r = self.phase_turns[n % self.q]
        if r is None:
            raise DomainError(f"chi({n}) = 0 mod {self.q}; phase undefined")
        return 2.0 * math.pi * float(r)

    def angles_by_residue(self) -> np.ndarray:
        """Array of phases in radians indexed by residue, NaN off the units."""
        return self._angles

    def conjugate(self) -> "DirichletCharacter":
        for other in enumerate_characters(self.q):
            if all(
                (a is None and b is None) or (a is not None and b is not None and (a + b) % 1 == 0)
                for a, b in zip(self.phase_turns, other.phase_turns)
            ):
                return other
        raise RuntimeError("conjugate character not found")  # unreachable

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DirichletCharacter)
            and self.q == other.q
            and self.phase_turns == other.phase_turns
        )

    def __hash__(self) -> int:
        return hash((self.q, self.phase_turns))


def _build_character(q: int, index: int, exps: tuple[int, ...],
                     factors: list[_CyclicFactor]) -> DirichletCharacter:
    turns: list[Fraction | None] = []
    for n in range(q):
        if gcd(n, q) != 1:
            turns.append(None)
            continue
        r = Fraction(0)
        for a, fac in zip(exps, factors):
            r += Fraction(a * fac.dlog[n % fac.prime_power], fac.order)
        turns.append(r % 1)
    turns_t = tuple(turns)

    parity_turn = turns_t[(q - 1) % q]
    parity = 0 if parity_turn == 0 else 1
    is_principal = all(r == 0 for r in turns_t if r is not None)
    conductor = _conductor_from_turns(q, turns_t)

    angles = np.full(q, np.nan)
    for n, r in enumerate(turns_t):
        if r is not None:
            angles[n] = 2.0 * math.pi * float(r)
    angles.setflags(write=False)

    return DirichletCharacter(
        q=q,
        index=index,
        exponents=exps,
        phase_turns=turns_t,
        conductor=conductor,
        parity=parity,
        is_principal=is_principal,
        is_primitive=(conductor == q),
        _angles=angles,
    )


def _divisors(q: int) -> list[int]:
    divs = [1]
    for p, e in _factorize(q):
        divs = [d * p ** k for d in divs for k in range(e + 1)]
    return sorted(divs)


def _conductor_from_turns(q: int, turns: tuple[Fraction | None, ...]) -> int:
    # smallest induced modulus d | q: chi trivial on units congruent to 1 mod d
    for d in _divisors(q):
        ok = True
        for n in range(1, q + 1):
            if gcd(n, q) == 1 and n % d == 1 % d and turns[n % q] != 0:
                ok = False
                break
        if ok:
            return d
    return q


@lru_cache(maxsize=None)
def enumerate_characters(q: int) -> tuple[DirichletCharacter, ...]:
    """All phi(q) characters mod q, ordered by exponent tuple (principal first)."""
    if q < 1:
        raise DomainError("modulus must be a positive integer")
    if q == 1:
        angles = np.zeros(1)
        angles.setflags(write=False)
        trivial = DirichletCharacter(
            q=1, index=0, exponents=(), phase_turns=(Fraction(0),),
            conductor=1, parity=0, is_principal=True, is_primitive=True,
            _angles=angles,
        )
        return (trivial,)
    factors = _unit_group_factors(q)
    chars = []
    for idx, exps in enumerate(product(*(range(f.order) for f in factors))):
        chars.append(_build_character(q, idx, tuple(exps), factors))
    return tuple(chars)


def conductor_and_primitivity(chi: DirichletCharacter) -> tuple[int, bool]:
    return chi.conductor, chi.is_primitive


def primitive_inducer(chi: DirichletCharacter) -> DirichletCharacter:
    """The primitive character mod conductor(chi) that induces chi."""
    d = chi.conductor
    if d == chi.q:
        return chi
    wanted: dict[int, Fraction] = {}
    for m in range(d):
        if gcd(m, d) != 1:
            continue
        n = m
        while gcd(n, chi.q) != 1:  # lift m to a residue coprime to q
            n += d
        wanted[m] = chi.phase_turns[n % chi.q]
    for psi in enumerate_characters(d):
        if all(psi.phase_turns[m] == r for m, r in wanted.items()):
            return psi
    raise RuntimeError("inducing character not found")  # unreachable


def gauss_sum(chi: DirichletCharacter) -> complex:
    """tau(chi) = sum over m of chi(m) exp(2*pi*i*m/q), in double precision."""
    q = chi.q
    re_parts, im_parts = [], []
    for m in range(1, q + 1):
        r = chi.phase_turns[m % q]
        if r is None:
            continue
        a = 2.0 * math.pi * float((r + Fraction(m, q)) % 1)
        re_parts.append(math.cos(a))
        im_parts.append(math.sin(a))
    return complex(math.fsum(re_parts), math.fsum(im_parts))


def phase_sum_reduced(chi: DirichletCharacter) -> complex:
    """Sum of exp(i*angle(chi(h))) over reduced residues h (zero unless principal)."""
    re_parts, im_parts = [], []
    for r in chi.phase_turns:
        if r is None:
            continue
        a = 2.0 * math.pi * float(r)
        re_parts.append(math.cos(a))
        im_parts.append(math.sin(a))
    return complex(math.fsum(re_parts), math.fsum(im_parts))


# --------------------------------------------------------------------------
# primes
# --------------------------------------------------------------------------

_SEGMENT_SIZE = 1 << 20
_DEFAULT_P_BUDGET = 10 ** 8


@dataclass
class PrimeTable:
    """Sorted primes <= p_max with their residues mod a bound modulus q."""

    p_max: int
    q: int
    primes: np.ndarray            # int64, strictly increasing
    residues: np.ndarray          # primes % q
    classes: dict[int, np.ndarray]  # reduced residue h -> ordered primes = h (mod q)
    _log_primes: np.ndarray | None = field(default=None, repr=False)

    @property
    def log_primes(self) -> np.ndarray:
        if self._log_primes is None:
            self._log_primes = np.log(self.primes.astype(np.float64))
        return self._log_primes

    def class_primes(self, h: int) -> np.ndarray:
        if gcd(h % self.q, self.q) != 1:
            raise DomainError(f"h={h} is not a reduced residue mod {self.q}")
        return self.classes[h % self.q]

    def count(self) -> int:
        return int(self.primes.size)


def _simple_sieve(n: int) -> np.ndarray:
    mask = np.ones(n + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, isqrt(n) + 1):
        if mask[p]:
            mask[p * p:: p] = False
    return np.nonzero(mask)[0].astype(np.int64)


def sieve_primes(p_max: int, q: int = 1, *, segment_size: int = _SEGMENT_SIZE,
                 p_budget: int = _DEFAULT_P_BUDGET) -> PrimeTable:
    """Segmented Eratosthenes sieve up to p_max, class-partitioned mod q."""
    if p_max < 2:
        raise DomainError("p_max must be at least 2")
    if q < 1:
        raise DomainError("modulus must be a positive integer")
    if p_max > p_budget:
        raise ResourceLimitError(
            f"p_max={p_max} exceeds the configured budget {p_budget}"
        )

    base = _simple_sieve(isqrt(p_max))
    chunks = [base[base <= p_max]]
    lo = isqrt(p_max) + 1
    while lo <= p_max:
        hi = min(lo + segment_size, p_max + 1)
        seg = np.ones(hi - lo, dtype=bool)
        for p in base:
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start < hi:
                seg[start - lo:: p] = False
        chunks.append((np.nonzero(seg)[0] + lo).astype(np.int64))
        lo = hi
    primes = np.concatenate(chunks) if chunks else np.empty(0, np.int64)

    residues = primes % q
    classes = {
        h: primes[residues == h]
        for h in range(q)
        if gcd(h, q) == 1 or (q == 1 and h == 0)
    }
    return PrimeTable(p_max=p_max, q=q, primes=primes, residues=residues, classes=classes)


# --------------------------------------------------------------------------
# logarithmic integral and prime counting
# --------------------------------------------------------------------------

def li(x: float) -> float:
    """Logarithmic integral from 2: integral of dy/log(y) over [2, x]."""
    if x < 2.0:
        raise DomainError("li(x) requires x >= 2")
    if x == 2.0:
        return 0.0
    val, _err = quad(lambda y: 1.0 / math.log(y), 2.0, x,
                     epsabs=1e-11, epsrel=1e-12, limit=200)
    return val


def pnt_class_ratio(x: float, q: int, table: PrimeTable | None = None) -> dict[int, float]:
    """pi(x; q, h) * phi(q) / Li(x) for every reduced class h mod q."""
    if x < 10:
        raise DomainError("pnt_class_ratio requires x >= 10")
    if q < 1:
        raise DomainError("modulus must be a positive integer")
    if table is None or table.q != q or table.p_max < int(x):
        table = sieve_primes(int(x), q)
    phi = euler_phi(q)
    li_x = li(float(x))
    out = {}
    for h, plist in sorted(table.classes.items()):
        n = int(np.searchsorted(plist, x, side="right"))
        out[h] = n * phi / li_x
    return out

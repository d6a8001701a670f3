"""Modularity of the Fermat quartic and the CM parameter sieve.

The weight-3 newform eta(4 tau)^6 = q prod (1 - q^{4n})^6 = sum b_n q^n
predicts #X_p(F_p) = 1 + b_p + h p + p^2 for the Fermat quartic, with
h = 5 + 3 chi_{-1}(p) + 6 (chi_2(p) + chi_{-2}(p)) from the rational part
of the Neron-Severi action.  verify_modularity runs that prediction against
direct counting.

cm_sieve turns the prediction around: scanning a one-parameter family mod
several primes for members whose counts fit a target q-series with SOME
bounded h.  A single prime admits spurious matches (h is free per prime),
so only residues surviving every prime matter; lift_parameter CRT-combines
those and rationally reconstructs a small-height parameter.
"""

import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

import sympy

from .count import Quartic, count_quartic, fermat_quartic
from .errors import DomainError, UsageError
from .ff import FieldCtx

H_BOUND = 20  # |trace of Frob on NS| <= rank NS = 20 for a singular K3


@dataclass(frozen=True)
class QSeries:
    """Integer q-expansion b_1..b_N with weight and level tags."""
    coeffs: tuple
    weight: int
    level: int

    @property
    def n_max(self) -> int:
        return len(self.coeffs)

    def b(self, n: int) -> int:
        if not 1 <= n <= len(self.coeffs):
            raise UsageError(f"coefficient b_{n} outside the computed range "
                             f"1..{len(self.coeffs)}")
        return self.coeffs[n - 1]


@lru_cache(maxsize=None)
def eta4_pow6_expansion(n_max: int) -> QSeries:
    """eta(4 tau)^6 through q^n_max: b_{4m+1} = [x^m] prod_k (1 - x^k)^6,
    all other coefficients zero."""
    if n_max < 1:
        raise UsageError("need at least one coefficient")
    mmax = (n_max - 1) // 4
    euler = [0] * (mmax + 1)
    euler[0] = 1
    for k in range(1, mmax + 1):
        for _ in range(6):  # multiply by (1 - x^k), truncated
            for i in range(mmax, k - 1, -1):
                euler[i] -= euler[i - k]
    b = [0] * n_max
    for m in range(mmax + 1):
        b[4 * m] = euler[m]  # index 4m holds b_{4m+1}
    return QSeries(tuple(b), weight=3, level=16)


def _legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def _check_odd_prime(p: int) -> None:
    if p == 2:
        raise DomainError("bad reduction at 2")
    if p < 3 or not sympy.isprime(p):
        raise UsageError(f"{p} is not an odd prime")


def hecke_h(p: int) -> int:
    """h = 5 + 3 chi_{-1}(p) + 6 (chi_2(p) + chi_{-2}(p))."""
    _check_odd_prime(p)
    chi_m1 = _legendre(-1, p)
    chi_2 = _legendre(2, p)
    return 5 + 3 * chi_m1 + 6 * (chi_2 + chi_m1 * chi_2)


def fermat_count_prediction(p: int) -> int:
    """Predicted #X_p(F_p) = 1 + b_p + h p + p^2 for the Fermat quartic."""
    _check_odd_prime(p)
    b_p = eta4_pow6_expansion(p).b(p)
    return 1 + b_p + hecke_h(p) * p + p * p


@dataclass(frozen=True)
class ModularityEntry:
    p: int
    predicted: int
    counted: int

    @property
    def agree(self) -> bool:
        return self.predicted == self.counted


@dataclass(frozen=True)
class ModularityReport:
    entries: tuple

    @property
    def all_agree(self) -> bool:
        return all(e.agree for e in self.entries)

    @property
    def mismatches(self):
        return [e.p for e in self.entries if not e.agree]


def verify_modularity(p_range, cache=None, jobs: int = 1) -> ModularityReport:
    """Prediction vs direct count of the Fermat quartic at each prime."""
    primes = sorted(set(p_range))
    for p in primes:
        _check_odd_prime(p)  # whole range vetted before any counting
    fermat = fermat_quartic()
    h = fermat.surface_hash()
    entries = []
    for p in primes:
        predicted = fermat_count_prediction(p)
        counted = cache.lookup(h, p, 1) if cache is not None else None
        if counted is None:
            counted = count_quartic(fermat, FieldCtx(p), jobs=jobs)
            if cache is not None:
                cache.record(h, p, 1, counted)
        entries.append(ModularityEntry(p, predicted, counted))
    return ModularityReport(tuple(entries))


@dataclass(frozen=True)
class SieveCandidate:
    """A family member whose count over F_p fits the target series with
    Frobenius trace h on NS, |h| <= 20."""
    p: int
    lam: int
    h: int
    count: int


def _count_member_worker(payload):
    p, coeffs = payload
    return count_quartic(Quartic(coeffs), FieldCtx(p))


def cm_sieve(family, target: QSeries, primes, cache=None, jobs: int = 1):
    """Scan the family mod each prime for smooth members matching the
    target: accept (p, lam) iff p | (N - 1 - p^2 - b_p) with quotient h
    bounded by |h| <= 20.  Candidates come back sorted by (p, lam); only
    residues appearing at EVERY prime are meaningful (h is free per
    prime, so single-prime matches are often spurious)."""
    plist = sorted(set(primes))
    for p in plist:
        _check_odd_prime(p)
        if not family.good_reduction(p):
            raise DomainError(f"family has bad reduction at {p}")
        if p > target.n_max:
            raise UsageError(f"target series stops at b_{target.n_max}, "
                             f"below prime {p}")
    out = []
    for p in plist:
        b_p = target.b(p)
        lams = [lam for lam in range(p) if family.is_smooth_member(lam, p)]
        if not lams:
            warnings.warn(f"every residue mod {p} is singular; "
                          f"prime contributes nothing")
            continue
        counts = {}
        todo = []
        for lam in lams:
            member = family.member(lam)
            cached = (cache.lookup(member.surface_hash(), p, 1)
                      if cache is not None else None)
            if cached is not None:
                counts[lam] = cached
            else:
                todo.append((lam, member))
        if todo and jobs > 1:
            payloads = [(p, member.coeffs) for _, member in todo]
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_count_member_worker, payloads))
            for (lam, member), n in zip(todo, results):
                counts[lam] = n
                if cache is not None:
                    cache.record(member.surface_hash(), p, 1, n)
        else:
            for lam, member in todo:
                n = count_quartic(member, FieldCtx(p))
                counts[lam] = n
                if cache is not None:
                    cache.record(member.surface_hash(), p, 1, n)
        for lam in lams:
            t = counts[lam] - 1 - p * p - b_p
            if t % p == 0 and abs(t // p) <= H_BOUND:
                out.append(SieveCandidate(p, lam, t // p, counts[lam]))
    out.sort(key=lambda cand: (cand.p, cand.lam))
    return out


def lift_parameter(residues, height_bound: int):
    """CRT-combine (p, lam mod p) residues and rationally reconstruct a
    parameter u/v with |u|, |v| <= height_bound, or None when no such
    rational exists.

    The half-extended Euclid walk stops at the sqrt(M/2) line, inside
    which the reconstruction is unique; a height_bound beyond that line
    cannot produce extra answers, it only relaxes the final filter."""
    if not isinstance(height_bound, int) or height_bound < 1:
        raise UsageError("height bound must be a positive integer")
    pairs = list(residues)
    if not pairs:
        raise UsageError("no residues supplied")
    primes = [p for p, _ in pairs]
    if len(set(primes)) != len(primes):
        raise UsageError("residue primes must be distinct")
    for p in primes:
        if not sympy.isprime(p):
            raise UsageError(f"{p} is not prime")
    x, m = 0, 1
    for p, lam in pairs:
        # fold one congruence into x mod m
        inv = pow(m, -1, p)
        x = x + m * (((lam - x) * inv) % p)
        m *= p
    line = isqrt(m // 2)
    r0, r1 = m, x % m
    t0, t1 = 0, 1
    while r1 > line:
        quo = r0 // r1
        r0, r1 = r1, r0 - quo * r1
        t0, t1 = t1, t0 - quo * t1
    u, v = r1, t1
    if v < 0:
        u, v = -u, -v
    if v == 0 or gcd(abs(u), v) != 1 or (u - x * v) % m != 0:
        return None
    if abs(u) > height_bound or v > height_bound:
        return None
    return Fraction(u, v)

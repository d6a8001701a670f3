"""Zeta functions of K3 surfaces over F_q from point counts.

The interesting factor is P2(T) = det(1 - Frob T | H^2), an integer
polynomial of degree 22 with constant term 1 whose reciprocal roots have
absolute value q.  Counts give its power sums t_r = #X(F_{q^r}) - 1 -
q^{2r}; Newton's identities turn an initial segment of power sums into
leading coefficients, and the functional equation c_{D-m} = eps q^{D-2m}
c_m mirrors them onto the tail.  The sign eps is pinned by the root
magnitude test, and the completion refuses to guess when both signs
survive.

Everything arithmetic is exact (int / Fraction); floats appear only in the
|alpha| = q test.  Partial data is a first-class state: a FrobeniusPoly of
degree below 22 still yields a Picard bound, with the missing degrees
counted as slack.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from . import _intpoly
from .errors import (DataError, IncompletenessError, InconsistencyError,
                     MultiplicityError, UsageError)

H2_DIM = 22  # dim H^2 of a K3 surface
ROOT_TOL = 1e-6  # relative tolerance for the |alpha| = q test


@dataclass(frozen=True)
class TraceVector:
    """Power sums t_1..t_k of the Frobenius eigenvalues on H^2 over F_q."""
    q: int
    traces: tuple

    def __post_init__(self):
        for r, t in enumerate(self.traces, start=1):
            if abs(t) > H2_DIM * self.q ** r:
                raise InconsistencyError(
                    f"Weil bound violated at r = {r}: |{t}| > 22 * {self.q}^{r}")


@dataclass(frozen=True)
class FrobeniusPoly:
    """P2(T) or a partial factor of it: integer coefficients, low degree
    first, constant term 1, degree <= 22.  epsilon/known/completed record
    how a completion was assembled (None on directly constructed polys)."""
    q: int
    coeffs: tuple
    epsilon: int = 0
    known: tuple = ()
    completed: tuple = ()

    def __post_init__(self):
        if not self.coeffs or self.coeffs[0] != 1:
            raise UsageError("P2 factor must have constant coefficient 1")
        if len(self.coeffs) - 1 > H2_DIM:
            raise UsageError("P2 factor degree exceeds 22")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def complete(self) -> bool:
        return self.degree == H2_DIM

    def power_traces(self, r_max: int):
        """Power sums of the reciprocal roots, r = 1..r_max."""
        return [int(x) for x in power_sums(list(self.coeffs), r_max)]

    def counts(self, r_max: int):
        """Predicted #X(F_{q^r}); meaningful when complete."""
        return [1 + self.q ** (2 * r) + t
                for r, t in enumerate(self.power_traces(r_max), start=1)]


def traces_from_counts(records) -> TraceVector:
    """Traces from tower records: validates a single surface over a single
    prime with counts at r = 1..k (no gaps), then t_r = N_r - 1 - q^{2r}.
    The Weil bound check lives in the TraceVector constructor."""
    if not records:
        raise UsageError("no count records supplied")
    surfaces = {rec.surface for rec in records}
    if len(surfaces) != 1:
        raise UsageError(f"records mix {len(surfaces)} distinct surfaces")
    primes = {rec.p for rec in records}
    if len(primes) != 1:
        raise UsageError("records mix ground characteristics")
    p = primes.pop()
    by_r = {}
    for rec in records:
        if rec.r in by_r and by_r[rec.r] != rec.count:
            raise InconsistencyError(
                f"conflicting counts at r = {rec.r}: {by_r[rec.r]} vs {rec.count}")
        by_r[rec.r] = rec.count
    n = max(by_r)
    if sorted(by_r) != list(range(1, n + 1)):
        raise UsageError("counts must cover r = 1..n without gaps")
    traces = tuple(by_r[r] - 1 - p ** (2 * r) for r in range(1, n + 1))
    return TraceVector(q=p, traces=traces)


def power_sums(coeffs, n: int):
    """First n power sums of the reciprocal roots of sum_k c_k T^k
    (c_0 = 1), by Newton's identities, exactly."""
    if not coeffs or coeffs[0] != 1:
        raise UsageError("factor must have constant coefficient 1")
    deg = len(coeffs) - 1
    e = [Fraction((-1) ** k * coeffs[k]) if k <= deg else Fraction(0)
         for k in range(n + 1)]
    ps = [Fraction(0)] * (n + 1)
    for k in range(1, n + 1):
        acc = (-1) ** (k - 1) * k * e[k]
        for i in range(1, k):
            acc += (-1) ** (k - 1 - i) * e[k - i] * ps[i]
        ps[k] = acc
    return ps[1:]


def _elementary_from_power_sums(ps):
    """e_1..e_n from power sums: k e_k = sum_i (-1)^{i-1} e_{k-i} p_i."""
    n = len(ps)
    e = [Fraction(1)] + [Fraction(0)] * n
    for k in range(1, n + 1):
        acc = Fraction(0)
        for i in range(1, k + 1):
            acc += (-1) ** (i - 1) * e[k - i] * ps[i - 1]
        e[k] = acc / k
    return e[1:]


def _root_magnitude_ok(coeffs, q) -> bool:
    """All roots of sum c_k T^k within ROOT_TOL (relative) of |T| = 1/q.

    Multiple roots are numerically hostile (a multiplicity-m root moves
    like eps^(1/m) under coefficient noise, and products like (1-qT)^12
    overflow float precision), so the exact squarefree part is extracted
    first and rescaled by T -> x/q; that bounds the float coefficients by
    binomials and puts the target on the unit circle."""
    x = sympy.Symbol("x")
    poly = sympy.Poly([int(c) for c in reversed(list(coeffs))], x)
    for factor, _ in poly.sqf_list()[1]:
        fc = [int(c) for c in factor.all_coeffs()]  # highest degree first
        deg = len(fc) - 1
        if deg == 0:
            continue
        arr = np.array([c / float(q) ** (deg - i) for i, c in enumerate(fc)],
                       dtype=float)
        roots = np.roots(arr)
        if not bool(np.all(np.abs(np.abs(roots) - 1.0) <= ROOT_TOL)):
            return False
    return True


def p2_from_traces(tr: TraceVector, known_factor=None) -> FrobeniusPoly:
    """Complete P2 from traces and an optional known factor.

    known_factor: coefficients (low first, constant 1) of a divisor of P2
    established by other means, e.g. counted lines (1 - qT)^k or a modular
    factor.  The cofactor g has degree D = 22 - deg(known); traces pin its
    first half and the functional equation c_{D-m} = eps q^{D-2m} c_m the
    rest.  Raises IncompletenessError when more counts are needed
    (including the case where both signs survive the root test) and
    DataError flavors when the inputs are inconsistent."""
    q = tr.q
    traces = list(tr.traces)
    n = len(traces)
    known = tuple(known_factor) if known_factor is not None else (1,)
    if not known or known[0] != 1:
        raise UsageError("known factor must have constant coefficient 1")
    d = H2_DIM - (len(known) - 1)
    if d < 0:
        raise UsageError("known factor degree exceeds 22")

    known_ps = power_sums(list(known), n)
    u = [Fraction(t) - known_ps[i] for i, t in enumerate(traces)]

    n_min = d // 2
    if n < n_min:
        raise IncompletenessError(
            f"need counts through r = {n_min} to pin a degree-{d} cofactor "
            f"(have r = {n})", needed=n_min - n)

    e = _elementary_from_power_sums(u[:min(n, d)])
    c_known = []
    for k, ek in enumerate(e, start=1):
        ck = (-1) ** k * ek
        if ck.denominator != 1:
            raise InconsistencyError(
                f"coefficient c_{k} = {ck} is not an integer: counts and "
                f"known factor are incompatible")
        c_known.append(int(ck))

    candidates = []
    for eps in (1, -1):
        c = [None] * (d + 1)
        c[0] = 1
        for k, ck in enumerate(c_known, start=1):
            c[k] = ck
        ok = True
        for m in range(d // 2 + 1):
            val = eps * q ** (d - 2 * m) * c[m]
            j = d - m
            if c[j] is None:
                c[j] = val
            elif c[j] != val:
                ok = False  # functional equation fails on the overlap
                break
        if not ok or any(v is None for v in c):
            continue
        full = _intpoly.mul(list(known), c)
        if _root_magnitude_ok(full, q):
            candidates.append((eps, tuple(c), tuple(full)))

    if not candidates:
        raise DataError(
            "no sign of the functional equation puts all roots on "
            "|alpha| = q: counts or known factor are wrong")
    if len(candidates) == 2:
        raise IncompletenessError(
            "both signs of the functional equation survive the root test; "
            "one more count would decide", needed=1)
    eps, completed, full = candidates[0]

    # roundtrip: the completed polynomial must reproduce every input trace
    check = power_sums(list(full), n)
    for r in range(1, n + 1):
        if check[r - 1] != traces[r - 1]:
            raise InconsistencyError(
                f"completed P2 fails to reproduce t_{r}: "
                f"{check[r - 1]} vs {traces[r - 1]}")
    return FrobeniusPoly(q=q, coeffs=full, epsilon=eps, known=known,
                         completed=completed)


# --- Picard bounds and the Artin-Tate ledger ---------------------------------

def picard_upper_bound(poly: FrobeniusPoly):
    """(bound, cyclotomic factors) for the geometric Picard number.

    Algebraic classes force Frobenius eigenvalues of the shape (root of
    unity) * q, so rho is at most the number of such eigenvalues: detected
    by exact trial division of R(x) = sum c_j q^{deg-j} x^j by Phi_m for
    every m with phi(m) <= degree.  Missing degrees of a partial poly
    count fully toward the bound (slack), and the bound is rounded down to
    even: the geometric Picard number of a K3 over a finite field is even.
    Factors come back as (m, multiplicity) pairs."""
    coeffs = list(poly.coeffs)
    q = poly.q
    deg = len(coeffs) - 1
    r = [c * q ** (deg - j) for j, c in enumerate(coeffs)]
    count = 0
    factors = []
    for m in range(1, 2 * H2_DIM * H2_DIM + 1):  # phi(m) <= 22 forces m <= 968
        em = _intpoly.euler_phi(m)
        if em > deg:
            continue
        phi = list(_intpoly.cyclotomic(m))
        mult = 0
        while len(r) - 1 >= em and _intpoly.divides(phi, r):
            r = _intpoly.exact_div(r, phi)
            mult += 1
        if mult:
            factors.append((m, mult))
            count += em * mult
    slack = H2_DIM - deg
    bound = count + slack
    if bound % 2 == 1:
        bound -= 1
    return bound, factors


def artin_tate_value(coeffs, q: int, rho: int) -> Fraction:
    """q * P(T) / (1 - qT)^rho at T = 1/q, exactly.  (1 - qT)^rho must
    divide P; rho is the rank of Neron-Severi over F_q (eigenvalue
    exactly q), not the geometric rank, when the two differ."""
    coeffs = list(coeffs)
    if not coeffs:
        raise UsageError("empty polynomial")
    if rho < 1:
        raise UsageError("rho must be at least 1 (the hyperplane class)")
    lin = [1, -q]
    for _ in range(rho):
        if not _intpoly.divides(lin, coeffs):
            raise MultiplicityError(
                f"(1 - {q}T)^{rho} does not divide the supplied factor")
        coeffs = _intpoly.exact_div(coeffs, lin)
    t = Fraction(1, q)
    value = Fraction(0)
    for c in reversed(coeffs):
        value = value * t + c
    return q * value


def artin_tate_discriminant(poly: FrobeniusPoly, rho: int):
    """(value, square class) of the Artin-Tate special value
    q * P2(T)/(1 - qT)^rho at T = 1/q.  The value equals the order of the
    Brauer group times |disc NS(X)| up to squares, so its square class is
    the discriminant's."""
    value = artin_tate_value(poly.coeffs, poly.q, rho)
    if value == 0:
        raise MultiplicityError(
            "special value vanishes: rho understates the eigenvalue-q "
            "multiplicity")
    return value, square_class(value)


def square_class(x) -> int:
    """Squarefree representative of a nonzero rational in Q*/(Q*)^2."""
    frac = Fraction(x)
    if frac == 0:
        raise UsageError("square class of 0 is undefined")
    n = frac.numerator * frac.denominator
    out = -1 if n < 0 else 1
    for prime, mult in sympy.factorint(abs(n)).items():
        if mult % 2:
            out *= prime
    return out


def van_luijk_combine(b1: int, c1: int, b2: int, c2: int) -> int:
    """Combine two reductions: min of the bounds, dropped to 1 when both
    reductions pin the bound to 2 with distinct discriminant square classes
    (rank 2 would make both specializations finite-index, forcing all three
    discriminants to agree up to squares; the mismatch rules that out, and
    rank 1 is the floor from the hyperplane class).  Equal bounds above 2
    with mismatched classes keep the plain minimum: that case is documented
    as a conservative extension rather than pushed through the same
    finite-index argument."""
    for b in (b1, b2):
        if not 1 <= b <= H2_DIM:
            raise UsageError("bounds must lie in 1..22")
    if b1 == b2 == 2 and square_class(c1) != square_class(c2):
        return 1
    return min(b1, b2)

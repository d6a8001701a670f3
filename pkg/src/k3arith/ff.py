"""Prime fields, small extensions, multiplicative characters, Jacobi sums.

Conventions fixed here so that every count is reproducible across runs and
machines:

- F_{p^r} is built as F_p[x]/(f) where f is the lexicographically least
  monic irreducible of degree r, ordering candidates by the integer value
  sum c_i p^i of their non-leading coefficient vector (c_0, ..., c_{r-1}).
  For F_8 this picks x^3 + x + 1, for F_9 it picks x^2 + 1.
- Elements are coefficient vectors of length r, low degree first.  The
  packed integer sum c_i p^i doubles as a stable element index in [0, q).
- The fixed primitive root of F_q^* is the least element in packed order
  with full multiplicative order.
- chi(0) = 0 for every multiplicative character.
- Character values and Jacobi sums live exactly in Z[zeta_m]; no floats
  anywhere in this module.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, lcm

from sympy import isprime

from . import _intpoly
from .errors import DomainError, UnsupportedError, UsageError


# ---------------------------------------------------------------------------
# polynomial arithmetic over F_p (internal; vectors are tuples, low first)

def _pp_trim(v):
    v = list(v)
    while v and v[-1] == 0:
        v.pop()
    return tuple(v)


def _pp_mul(u, v, p):
    if not u or not v:
        return ()
    out = [0] * (len(u) + len(v) - 1)
    for i, a in enumerate(u):
        if a:
            for j, b in enumerate(v):
                out[i + j] = (out[i + j] + a * b) % p
    return _pp_trim(out)


def _pp_mod(u, f, p):
    # f monic; reduce u mod f
    d = len(f) - 1
    u = list(u)
    for k in range(len(u) - 1, d - 1, -1):
        c = u[k]
        if c:
            u[k] = 0
            for j in range(d):
                u[k - d + j] = (u[k - d + j] - c * f[j]) % p
    return _pp_trim(u[:d] if len(u) >= d else u)


def _pp_mulmod(u, v, f, p):
    return _pp_mod(_pp_mul(u, v, p), f, p)


def _pp_powmod(u, n, f, p):
    out = (1,)
    base = _pp_mod(u, f, p)
    while n:
        if n & 1:
            out = _pp_mulmod(out, base, f, p)
        base = _pp_mulmod(base, base, f, p)
        n >>= 1
    return out


def _pp_monic(v, p):
    inv = pow(v[-1], p - 2, p)
    return tuple(c * inv % p for c in v)


def _pp_gcd(u, v, p):
    while v:
        u, v = v, _pp_mod(u, _pp_monic(v, p), p)
    return _pp_monic(u, p) if u else ()


def _prime_factors(n):
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def _pp_sub_x(t, p):
    """t - x as a trimmed vector."""
    s = list(t) + [0] * max(0, 2 - len(t))
    s[1] = (s[1] - 1) % p
    return _pp_trim(s)


def _is_irreducible(f, p):
    """f monic of degree r over F_p, low-first tuple of length r+1.

    Tests x^(p^r) = x mod f together with gcd(x^(p^(r/l)) - x, f) = 1 for
    every prime l dividing r."""
    r = len(f) - 1
    if r == 1:
        return True
    powers = {}
    t = (0, 1)
    for k in range(1, r + 1):
        t = _pp_powmod(t, p, f, p)
        powers[k] = t
    if _pp_sub_x(powers[r], p):
        return False
    for ell in _prime_factors(r):
        g = _pp_gcd(f, _pp_sub_x(powers[r // ell], p), p)
        if len(g) != 1:
            return False
    return True


def _least_irreducible(p, r):
    """Deterministic modulus: least monic irreducible in the packed order."""
    for n in range(p ** r):
        coeffs = []
        m = n
        for _ in range(r):
            coeffs.append(m % p)
            m //= p
        f = tuple(coeffs) + (1,)
        if _is_irreducible(f, p):
            return f
    raise DomainError(f"no irreducible polynomial of degree {r} over F_{p}")


# ---------------------------------------------------------------------------
# field context and elements

class FieldCtx:
    """Immutable carrier for F_q = F_{p^r}; shareable across threads."""

    def __init__(self, p: int, r: int = 1, modulus=None):
        if not isprime(p):
            raise DomainError(f"{p} is not prime")
        if r < 1:
            raise UsageError("extension degree must be >= 1")
        if modulus is None:
            modulus = _least_irreducible(p, r)
        else:
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) != r + 1 or modulus[-1] != 1:
                raise UsageError("modulus must be monic of degree r")
            if not _is_irreducible(modulus, p):
                raise DomainError("modulus is reducible over F_p")
        self.p = p
        self.r = r
        self.modulus = modulus
        self.q = p ** r
        self._tables = None
        self._dlog = None
        self._g = None

    def __eq__(self, other):
        return (isinstance(other, FieldCtx)
                and (self.p, self.r, self.modulus) == (other.p, other.r, other.modulus))

    def __hash__(self):
        return hash((self.p, self.r, self.modulus))

    def __repr__(self):
        return f"FieldCtx(p={self.p}, r={self.r})"

    # -- element construction

    def element(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.ctx != self:
                raise UsageError("element belongs to a different field")
            return value
        if isinstance(value, int):
            vec = [value % self.p] + [0] * (self.r - 1)
        else:
            vec = [int(c) % self.p for c in value]
            if len(vec) > self.r:
                raise UsageError("coefficient vector longer than the degree")
            vec += [0] * (self.r - len(vec))
        return FieldElement(self, tuple(vec))

    @property
    def zero(self):
        return self.element(0)

    @property
    def one(self):
        return self.element(1)

    def gen(self) -> "FieldElement":
        """The residue class of x (only meaningful for r > 1)."""
        if self.r == 1:
            raise UsageError("prime field has no extension generator")
        return self.element((0, 1))

    def from_packed(self, n: int) -> "FieldElement":
        vec = []
        for _ in range(self.r):
            vec.append(n % self.p)
            n //= self.p
        return FieldElement(self, tuple(vec))

    def elements(self):
        for n in range(self.q):
            yield self.from_packed(n)

    def _pack(self, vec) -> int:
        n = 0
        for c in reversed(vec):
            n = n * self.p + c
        return n

    def _vmulmod(self, u, v):
        red = _pp_mod(_pp_mul(_pp_trim(u), _pp_trim(v), self.p), self.modulus, self.p)
        return tuple(red) + (0,) * (self.r - len(red))

    # -- packed operation tables for the counting kernels

    def packed_tables(self):
        """(add, mul) as q x q lists over packed indices; built once, cached."""
        if self._tables is None:
            p, q = self.p, self.q
            if self.r == 1:
                add = [[(a + b) % p for b in range(p)] for a in range(p)]
                mul = [[(a * b) % p for b in range(p)] for a in range(p)]
            else:
                vecs = [tuple(self.from_packed(n).vec) for n in range(q)]
                add = [[self._pack(tuple((x + y) % p for x, y in zip(vecs[a], vecs[b])))
                        for b in range(q)] for a in range(q)]
                mul = [[self._pack(self._vmulmod(vecs[a], vecs[b]))
                        for b in range(q)] for a in range(q)]
            self._tables = (add, mul)
        return self._tables

    # -- discrete logs over the fixed primitive root

    def primitive_root(self) -> int:
        """Packed index of the least primitive root of F_q^*."""
        if self._g is None:
            q = self.q
            _, mul = self.packed_tables()
            fac = _prime_factors(q - 1)

            def packed_pow(a, n):
                out = 1 if q > 1 else 0  # packed index of the unit 1
                base = a
                while n:
                    if n & 1:
                        out = mul[out][base]
                    base = mul[base][base]
                    n >>= 1
                return out

            for g in range(1, q):
                if all(packed_pow(g, (q - 1) // ell) != 1 for ell in fac):
                    self._g = g
                    break
            else:  # pragma: no cover - F_q^* is always cyclic
                raise DomainError("no primitive root found")
        return self._g

    def dlog_table(self):
        """dlog[a] = k with g^k = a for packed a != 0; dlog[0] = None."""
        if self._dlog is None:
            _, mul = self.packed_tables()
            g = self.primitive_root()
            table = [None] * self.q
            acc = 1
            for k in range(self.q - 1):
                table[acc] = k
                acc = mul[acc][g]
            self._dlog = table
        return self._dlog


@dataclass(frozen=True)
class FieldElement:
    """Plain value data: a coefficient vector relative to its ctx modulus."""
    ctx: FieldCtx
    vec: tuple

    def _check(self, other):
        if not isinstance(other, FieldElement) or other.ctx != self.ctx:
            raise UsageError("operands come from different field contexts")

    def __add__(self, other):
        self._check(other)
        p = self.ctx.p
        return FieldElement(self.ctx, tuple((a + b) % p for a, b in zip(self.vec, other.vec)))

    def __sub__(self, other):
        self._check(other)
        p = self.ctx.p
        return FieldElement(self.ctx, tuple((a - b) % p for a, b in zip(self.vec, other.vec)))

    def __neg__(self):
        p = self.ctx.p
        return FieldElement(self.ctx, tuple(-a % p for a in self.vec))

    def __mul__(self, other):
        self._check(other)
        return FieldElement(self.ctx, self.ctx._vmulmod(self.vec, other.vec))

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        out = self.ctx.one
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inv(self):
        if self.is_zero():
            raise DomainError("inversion of zero")
        return self ** (self.ctx.q - 2)

    def __truediv__(self, other):
        self._check(other)
        return self * other.inv()

    def frobenius(self):
        """a -> a^p, the arithmetic Frobenius."""
        return self ** self.ctx.p

    def is_zero(self):
        return all(c == 0 for c in self.vec)

    @property
    def packed(self) -> int:
        return self.ctx._pack(self.vec)

    def __repr__(self):
        return f"FieldElement({self.vec} over F_{self.ctx.q})"


# ---------------------------------------------------------------------------
# exact cyclotomic integers

@lru_cache(maxsize=None)
def _phi_poly(m):
    return _intpoly.cyclotomic(m)


@dataclass(frozen=True)
class CyclotomicInt:
    """Element of Z[zeta_m] in the power basis 1, zeta, ..., zeta^(phi(m)-1);
    coefficient tuples always have length deg Phi_m."""
    m: int
    coeffs: tuple

    @staticmethod
    def _reduce(m, raw):
        red = _intpoly.mod_monic(list(raw), list(_phi_poly(m)))
        d = len(_phi_poly(m)) - 1
        return tuple(red) + (0,) * (d - len(red))

    @classmethod
    def zero(cls, m):
        return cls(m, cls._reduce(m, []))

    @classmethod
    def integer(cls, m, n):
        return cls(m, cls._reduce(m, [n]))

    @classmethod
    def root_power(cls, m, e, mult=1):
        """mult * zeta_m^e."""
        e %= m
        return cls(m, cls._reduce(m, [0] * e + [mult]))

    def lift(self, big):
        """Embed into Z[zeta_big]; requires m | big."""
        if big % self.m:
            raise UsageError("target order must be a multiple of m")
        k = big // self.m
        raw = [0] * (max(1, len(self.coeffs)) * k + 1)
        for i, c in enumerate(self.coeffs):
            raw[i * k] += c
        return CyclotomicInt(big, self._reduce(big, raw))

    def _pair(self, other):
        if isinstance(other, int):
            other = CyclotomicInt.integer(self.m, other)
        if self.m == other.m:
            return self, other
        big = lcm(self.m, other.m)
        return self.lift(big), other.lift(big)

    def __add__(self, other):
        a, b = self._pair(other)
        return CyclotomicInt(a.m, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._pair(other)
        return CyclotomicInt(a.m, tuple(x - y for x, y in zip(a.coeffs, b.coeffs)))

    def __neg__(self):
        return CyclotomicInt(self.m, tuple(-x for x in self.coeffs))

    def __mul__(self, other):
        a, b = self._pair(other)
        raw = _intpoly.mul(list(a.coeffs), list(b.coeffs))
        return CyclotomicInt(a.m, self._reduce(a.m, raw))

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int):
            return self.is_rational() and self.rational_value() == other
        if not isinstance(other, CyclotomicInt):
            return NotImplemented
        a, b = self._pair(other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        return hash((self.m, self.coeffs))

    def conjugate(self):
        """Complex conjugation zeta -> zeta^(-1)."""
        raw = [0] * self.m
        for i, c in enumerate(self.coeffs):
            raw[(-i) % self.m] += c
        return CyclotomicInt(self.m, self._reduce(self.m, raw))

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def is_rational(self):
        return all(c == 0 for c in self.coeffs[1:])

    def rational_value(self) -> int:
        if not self.is_rational():
            raise DomainError("value is not a rational integer")
        return self.coeffs[0] if self.coeffs else 0

    def abs_squared(self) -> int:
        """|z|^2 = z * conj(z); exact, must land in Z."""
        return (self * self.conjugate()).rational_value()

    def to_complex(self) -> complex:
        import cmath
        return sum((c * cmath.exp(2j * cmath.pi * i / self.m)
                    for i, c in enumerate(self.coeffs)), complex(0))

    def __repr__(self):
        return f"CyclotomicInt(m={self.m}, {self.coeffs})"


# ---------------------------------------------------------------------------
# multiplicative characters

@dataclass(frozen=True)
class MultChar:
    """chi with chi(g) = zeta_m^k for the ctx's fixed primitive root g;
    chi(0) = 0 by convention.  Exact order is m / gcd(m, k)."""
    ctx: FieldCtx
    m: int
    k: int = 1

    def __post_init__(self):
        if self.m < 1 or (self.ctx.q - 1) % self.m:
            raise DomainError(f"order {self.m} does not divide q - 1 = {self.ctx.q - 1}")

    @property
    def exact_order(self) -> int:
        kk = self.k % self.m
        return self.m // gcd(self.m, kk) if kk else 1

    def is_trivial(self) -> bool:
        return self.k % self.m == 0

    def pow(self, j: int) -> "MultChar":
        return MultChar(self.ctx, self.m, (self.k * j) % self.m)

    def log(self, a):
        """Exponent e with chi(a) = zeta_m^e, or None when a = 0."""
        if isinstance(a, FieldElement):
            a = a.packed
        d = self.ctx.dlog_table()[a]
        if d is None:
            return None
        return (d * self.k) % self.m

    def __call__(self, a) -> CyclotomicInt:
        e = self.log(a)
        if e is None:
            return CyclotomicInt.zero(self.m)
        return CyclotomicInt.root_power(self.m, e)

    def __mul__(self, other: "MultChar") -> "MultChar":
        if self.ctx != other.ctx:
            raise UsageError("characters live on different fields")
        big = lcm(self.m, other.m)
        return MultChar(self.ctx, big,
                        (self.k * (big // self.m) + other.k * (big // other.m)) % big)


def quadratic_character(a: FieldElement) -> int:
    """Legendre-symbol analogue on F_q: 0 at zero, otherwise +-1 computed as
    a^((q-1)/2) identified with its sign."""
    ctx = a.ctx
    if ctx.q % 2 == 0:
        raise UnsupportedError("quadratic character needs odd q")
    if a.is_zero():
        return 0
    s = a ** ((ctx.q - 1) // 2)
    # Lagrange: s is a square root of 1, so it is 1 or -1
    return 1 if s == ctx.one else -1


def jacobi_sum(chi1: MultChar, chi2: MultChar) -> CyclotomicInt:
    """J(chi1, chi2) = sum over x != 0, 1 of chi1(x) chi2(1 - x), exact in
    Z[zeta_lcm(m1, m2)].  Requires chi1, chi2 and chi1*chi2 all nontrivial,
    which forces |J|^2 = q."""
    if chi1.ctx != chi2.ctx:
        raise UsageError("characters live on different fields")
    if chi1.is_trivial() or chi2.is_trivial() or (chi1 * chi2).is_trivial():
        raise DomainError("jacobi_sum needs chi1, chi2 and chi1*chi2 nontrivial")
    ctx = chi1.ctx
    big = lcm(chi1.m, chi2.m)
    f1, f2 = big // chi1.m, big // chi2.m
    l1 = [chi1.log(x) for x in range(ctx.q)]
    l2 = [chi2.log(x) for x in range(ctx.q)]
    one = ctx.one
    # packed index of 1 - x, built through element arithmetic
    minus = [(one - ctx.from_packed(x)).packed for x in range(ctx.q)]
    acc = [0] * big  # counts per exponent in Z[x]/(x^big - 1)
    for x in range(ctx.q):
        e1 = l1[x]
        e2 = l2[minus[x]]
        if e1 is None or e2 is None:
            continue
        acc[(e1 * f1 + e2 * f2) % big] += 1
    return CyclotomicInt(big, CyclotomicInt._reduce(big, acc))

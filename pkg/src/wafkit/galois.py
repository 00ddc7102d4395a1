"""Exact arithmetic in prime fields GF(q) and extension fields GF(q^m).

Everything here is plain-integer arithmetic: elements of GF(q^m) are
coefficient tuples over GF(q) reduced modulo a deterministically chosen
irreducible polynomial, so results are reproducible across platforms.
Field sizes are capped so that multiplicative-order computations stay
exact in native integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

# Order finding is done by trial-division factoring; keep instances small.
MAX_FIELD_ORDER = 2**32


class FieldError(ValueError):
    """Invalid field parameters or mismatched operands."""


def is_prime(n: int) -> bool:
    """Trial-division primality check."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factorize(n: int) -> list[int]:
    """Distinct prime factors of n, ascending, by trial division."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class PrimeField:
    """The field GF(q) for prime q."""

    q: int

    def __post_init__(self):
        if not is_prime(self.q):
            raise FieldError(f"modulus {self.q} is not prime")


@dataclass(frozen=True)
class ExtField:
    """Descriptor of GF(q^m): prime q, degree m, monic defining polynomial.

    ``poly`` holds the non-leading coefficients (c0, ..., c_{m-1}) of
    x^m + c_{m-1} x^{m-1} + ... + c0, each reduced mod q.
    """

    q: int
    m: int
    poly: tuple[int, ...]

    @property
    def order(self) -> int:
        return self.q**self.m

    def element(self, coeffs) -> "ExtFieldElement":
        c = tuple(int(v) % self.q for v in coeffs)
        if len(c) != self.m:
            raise FieldError(f"expected {self.m} coefficients, got {len(c)}")
        return ExtFieldElement(c, self)

    def zero(self) -> "ExtFieldElement":
        return ExtFieldElement((0,) * self.m, self)

    def one(self) -> "ExtFieldElement":
        return ExtFieldElement((1,) + (0,) * (self.m - 1), self)

    def from_index(self, k: int) -> "ExtFieldElement":
        """Element whose coefficient tuple is k written in base q, c0 first."""
        coeffs = []
        for _ in range(self.m):
            coeffs.append(k % self.q)
            k //= self.q
        return ExtFieldElement(tuple(coeffs), self)


@dataclass(frozen=True)
class ExtFieldElement:
    """Element of GF(q^m) as polynomial coordinates (c0, ..., c_{m-1})."""

    coeffs: tuple[int, ...]
    field: ExtField

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __add__(self, other: "ExtFieldElement") -> "ExtFieldElement":
        _check_same_field(self, other)
        q = self.field.q
        return ExtFieldElement(
            tuple((a + b) % q for a, b in zip(self.coeffs, other.coeffs)), self.field
        )

    def __sub__(self, other: "ExtFieldElement") -> "ExtFieldElement":
        _check_same_field(self, other)
        q = self.field.q
        return ExtFieldElement(
            tuple((a - b) % q for a, b in zip(self.coeffs, other.coeffs)), self.field
        )

    def scale(self, a: int) -> "ExtFieldElement":
        q = self.field.q
        return ExtFieldElement(tuple((a * c) % q for c in self.coeffs), self.field)


def _check_same_field(x: ExtFieldElement, y: ExtFieldElement) -> None:
    if x.field != y.field:
        raise FieldError("operands belong to different fields")


def _poly_mul_mod(a: tuple, b: tuple, field: ExtField) -> tuple:
    """Product of coefficient tuples reduced by the defining polynomial."""
    q, m = field.q, field.m
    prod = [0] * (2 * m - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            prod[i + j] = (prod[i + j] + ai * bj) % q
    # reduce: x^m == -(c_{m-1} x^{m-1} + ... + c0)
    for deg in range(2 * m - 2, m - 1, -1):
        coef = prod[deg]
        if coef == 0:
            continue
        prod[deg] = 0
        for i, ci in enumerate(field.poly):
            prod[deg - m + i] = (prod[deg - m + i] - coef * ci) % q
    return tuple(prod[:m])


def mul(x: ExtFieldElement, y: ExtFieldElement) -> ExtFieldElement:
    """Field multiplication in GF(q^m)."""
    _check_same_field(x, y)
    return ExtFieldElement(_poly_mul_mod(x.coeffs, y.coeffs, x.field), x.field)


def power(x: ExtFieldElement, e: int) -> ExtFieldElement:
    """x^e by square and multiply, e >= 0."""
    result = x.field.one()
    base = x
    while e > 0:
        if e & 1:
            result = mul(result, base)
        base = mul(base, base)
        e >>= 1
    return result


def inverse(x: ExtFieldElement) -> ExtFieldElement:
    """Multiplicative inverse via x^(q^m - 2)."""
    if x.is_zero():
        raise FieldError("zero has no multiplicative inverse")
    return power(x, x.field.order - 2)


def _is_irreducible(poly: tuple, q: int) -> bool:
    """Irreducibility of the monic polynomial x^m + poly over GF(q).

    Checks for roots, then trial-divides by all monic polynomials of
    degree 2..m//2. Field sizes are capped, so brute force is fine.
    """
    m = len(poly)
    full = list(poly) + [1]

    def eval_at(a: int) -> int:
        acc = 0
        for c in reversed(full):
            acc = (acc * a + c) % q
        return acc

    for a in range(q):
        if eval_at(a) == 0:
            return False
    if m < 4:
        return True

    def divides(divisor: list) -> bool:
        # long division of `full` by monic `divisor`
        rem = list(full)
        d = len(divisor) - 1
        for deg in range(m, d - 1, -1):
            coef = rem[deg]
            if coef == 0:
                continue
            for i in range(d + 1):
                rem[deg - d + i] = (rem[deg - d + i] - coef * divisor[i]) % q
        return all(c == 0 for c in rem[:d])

    for deg in range(2, m // 2 + 1):
        for k in range(q**deg):
            cand = []
            kk = k
            for _ in range(deg):
                cand.append(kk % q)
                kk //= q
            cand.append(1)
            if divides(cand):
                return False
    return True


@lru_cache(maxsize=None)
def ext_field_build(q: int, m: int) -> ExtField:
    """Build GF(q^m) with the lexicographically first irreducible polynomial.

    Candidates x^m + c_{m-1} x^{m-1} + ... + c0 are enumerated by the
    base-q integer with digits (c0, c1, ...), smallest first, so the
    defining polynomial is the same on every run and platform.
    """
    if not is_prime(q):
        raise FieldError(f"{q} is not prime")
    if m < 1:
        raise FieldError("extension degree must be >= 1")
    if q**m >= MAX_FIELD_ORDER:
        raise FieldError(f"field order {q}^{m} exceeds the supported cap")
    for k in range(q**m):
        coeffs = []
        kk = k
        for _ in range(m):
            coeffs.append(kk % q)
            kk //= q
        cand = tuple(coeffs)
        if _is_irreducible(cand, q):
            return ExtField(q=q, m=m, poly=cand)
    raise FieldError("no irreducible polynomial found")  # pragma: no cover


def find_primitive(field: ExtField) -> ExtFieldElement:
    """Smallest element (lexicographic coefficient order) of full order.

    Order q^m - 1 is certified by checking g^((q^m-1)/p) != 1 for every
    prime p dividing q^m - 1.
    """
    n = field.order - 1
    if n < 2:
        raise FieldError("field too small to have a primitive element")
    primes = factorize(n)
    one = field.one()
    for k in range(1, field.order):
        g = field.from_index(k)
        if all(power(g, n // p) != one for p in primes):
            return g
    raise FieldError("no primitive element found")  # pragma: no cover


def trace_to_base(x: ExtFieldElement) -> int:
    """Tr(x) = x + x^q + ... + x^(q^(m-1)), returned as an integer in [0, q)."""
    field = x.field
    acc = x
    term = x
    for _ in range(field.m - 1):
        term = power(term, field.q)
        acc = acc + term
    if any(c != 0 for c in acc.coeffs[1:]):  # pragma: no cover
        raise FieldError("trace landed outside the base field")
    return acc.coeffs[0]

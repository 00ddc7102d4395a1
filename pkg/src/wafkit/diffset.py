"""Cyclic difference sets: Singer construction, verification, Welch bound.

Verification is exact integer counting over all ordered pairs and serves
as the ground-truth oracle for everything built on top of it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .galois import FieldError, ext_field_build, find_primitive, is_prime, mul, trace_to_base

MAX_SINGER_ORDER = 2**32


class DiffSetError(ValueError):
    """Invalid difference-set parameters."""


@dataclass(frozen=True)
class DifferenceSet:
    """An (N, k, lam) cyclic difference set candidate.

    The counting identity k(k-1) = lam(N-1) is enforced at construction;
    whether the residues actually form a difference set is decided by
    :func:`verify`.
    """

    N: int
    k: int
    lam: int
    elements: tuple[int, ...]

    def __post_init__(self):
        if self.N < 2:
            raise DiffSetError("modulus must be >= 2")
        elems = tuple(sorted(self.elements))
        if elems != self.elements:
            object.__setattr__(self, "elements", elems)
        if len(set(self.elements)) != len(self.elements):
            raise DiffSetError("elements must be distinct")
        if len(self.elements) != self.k:
            raise DiffSetError(f"expected {self.k} elements, got {len(self.elements)}")
        if any(e < 0 or e >= self.N for e in self.elements):
            raise DiffSetError("elements must lie in [0, N)")
        if self.k * (self.k - 1) != self.lam * (self.N - 1):
            raise DiffSetError("counting identity k(k-1) = lam(N-1) violated")

    def shifted(self, s: int) -> "DifferenceSet":
        return DifferenceSet(
            self.N, self.k, self.lam, tuple(sorted((e + s) % self.N for e in self.elements))
        )

    def to_json(self) -> str:
        return json.dumps(
            {"N": self.N, "k": self.k, "lambda": self.lam, "elements": list(self.elements)},
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "DifferenceSet":
        data = json.loads(text)
        try:
            return DifferenceSet(
                N=int(data["N"]),
                k=int(data["k"]),
                lam=int(data["lambda"]),
                elements=tuple(int(e) for e in data["elements"]),
            )
        except KeyError as exc:
            raise DiffSetError(f"missing field {exc} in difference-set JSON") from exc


@dataclass(frozen=True)
class SingerParams:
    """Prime q and power constant d selecting a Singer difference set."""

    q: int
    d: int

    def __post_init__(self):
        if not is_prime(self.q):
            raise DiffSetError(f"{self.q} is not prime")
        if self.d < 1:
            raise DiffSetError("power constant d must be >= 1")
        if self.q ** (self.d + 1) - 1 >= MAX_SINGER_ORDER:
            raise DiffSetError("parameters exceed the supported size cap")

    @property
    def N(self) -> int:
        return (self.q ** (self.d + 1) - 1) // (self.q - 1)

    @property
    def C1(self) -> int:
        return (self.q**self.d - 1) // (self.q - 1)

    @property
    def C2(self) -> int:
        return (self.q ** (self.d - 1) - 1) // (self.q - 1)


def singer_construct(params: SingerParams) -> DifferenceSet:
    """Singer (N, C1, C2) difference set via the trace-kernel form.

    Returns {i in [0, N) : Tr(g^i) = 0} for the deterministic primitive
    element g of GF(q^(d+1)), so repeated runs give identical sets.
    """
    try:
        field = ext_field_build(params.q, params.d + 1)
    except FieldError as exc:
        raise DiffSetError(str(exc)) from exc
    g = find_primitive(field)
    elements = []
    y = field.one()
    for i in range(params.N):
        if trace_to_base(y) == 0:
            elements.append(i)
        y = mul(y, g)
    return DifferenceSet(N=params.N, k=params.C1, lam=params.C2, elements=tuple(elements))


def verify(ds: DifferenceSet) -> tuple[bool, dict[int, int]]:
    """Exact check that every nonzero residue occurs lam times as a difference.

    Returns (ok, histogram) where histogram maps each nonzero residue to
    its count over all ordered pairs (a - b) mod N, a != b.
    """
    hist = {r: 0 for r in range(1, ds.N)}
    for a in ds.elements:
        for b in ds.elements:
            if a != b:
                hist[(a - b) % ds.N] += 1
    ok = all(c == ds.lam for c in hist.values())
    return ok, hist


def welch_bound(params: SingerParams) -> float:
    """mu = sqrt((N - C1) / (C1 (N - 1)))."""
    n, c1 = params.N, params.C1
    return math.sqrt((n - c1) / (c1 * (n - 1)))

"""Arithmetic in the local rings Z/p^k."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Tuple

MAX_MODULUS = 2**62


class RingError(ValueError):
    pass


class IncompatibleRings(RingError):
    pass


class NotAUnit(RingError):
    pass


class ResidueFieldTooSmall(RingError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class RingSpec:
    p: int
    k: int = 1

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise RingError(f"p must be prime, got {self.p!r}")
        if not isinstance(self.k, int) or self.k < 1:
            raise RingError(f"k must be a positive integer, got {self.k!r}")
        if self.p**self.k > MAX_MODULUS:
            raise RingError(f"{self.p}^{self.k} exceeds the supported range 2^62")

    @property
    def modulus(self) -> int:
        return self.p**self.k

    @property
    def has_big_residue_field(self) -> bool:
        return self.p >= 3

    def __call__(self, value: int) -> "RingElem":
        return RingElem(self, value % self.modulus)

    def zero(self) -> "RingElem":
        return RingElem(self, 0)

    def one(self) -> "RingElem":
        return RingElem(self, 1 % self.modulus)

    def elements(self):
        for v in range(self.modulus):
            yield RingElem(self, v)

    def __str__(self) -> str:
        return f"Z/{self.p}^{self.k}" if self.k > 1 else f"Z/{self.p}"

    @classmethod
    def parse(cls, text: str) -> "RingSpec":
        m = re.fullmatch(r"\s*Z/(\d+)(?:\^(\d+))?\s*", text)
        if not m:
            raise RingError(f"bad ring designator {text!r}, expected Z/p^k")
        return cls(int(m.group(1)), int(m.group(2) or 1))


@dataclass(frozen=True)
class RingElem:
    spec: RingSpec
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.spec.modulus:
            object.__setattr__(self, "value", self.value % self.spec.modulus)

    def _coerce(self, other) -> "RingElem":
        if isinstance(other, RingElem):
            if other.spec != self.spec:
                raise IncompatibleRings(f"{self.spec} vs {other.spec}")
            return other
        if isinstance(other, int):
            return self.spec(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RingElem(self.spec, (self.value + o.value) % self.spec.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RingElem(self.spec, (self.value - o.value) % self.spec.modulus)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RingElem(self.spec, (self.value * o.value) % self.spec.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return RingElem(self.spec, (-self.value) % self.spec.modulus)

    def __pow__(self, e: int):
        if e < 0:
            return inverse(self) ** (-e)
        return RingElem(self.spec, pow(self.value, e, self.spec.modulus))

    def __eq__(self, other):
        if isinstance(other, RingElem):
            return self.spec == other.spec and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.spec.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.spec, self.value))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.spec.modulus})"

    @property
    def residue(self) -> int:
        return self.value % self.spec.p

    def is_unit(self) -> bool:
        return self.value % self.spec.p != 0

    def is_zero(self) -> bool:
        return self.value == 0


def _check(a: RingElem, b: RingElem) -> None:
    if a.spec != b.spec:
        raise IncompatibleRings(f"{a.spec} vs {b.spec}")


def add(a: RingElem, b: RingElem) -> RingElem:
    _check(a, b)
    return a + b


def mul(a: RingElem, b: RingElem) -> RingElem:
    _check(a, b)
    return a * b


def neg(a: RingElem) -> RingElem:
    return -a


def inverse(a: RingElem) -> RingElem:
    if not a.is_unit():
        raise NotAUnit(f"{a.value} is not a unit in {a.spec}")
    return RingElem(a.spec, pow(a.value, -1, a.spec.modulus))


def val_unit(a: RingElem) -> Tuple[int, Optional[RingElem]]:
    """Split a = u * p^v with u a unit; zero gives (k, None)."""
    if a.value == 0:
        return a.spec.k, None
    v, x = 0, a.value
    while x % a.spec.p == 0:
        x //= a.spec.p
        v += 1
    return v, RingElem(a.spec, x)


def find_unit_avoiding(spec: RingSpec, forbidden: int) -> RingElem:
    """Smallest unit whose residue is neither 0 nor `forbidden`."""
    if spec.p < 3:
        raise ResidueFieldTooSmall(f"{spec} has only residues 0 and 1")
    forbidden %= spec.p
    for v in range(1, spec.modulus):
        r = v % spec.p
        if r != 0 and r != forbidden:
            return RingElem(spec, v)
    raise AssertionError("unreachable for p >= 3")

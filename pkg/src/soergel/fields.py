"""Exact coefficient fields: the rationals and prime fields F_p.

A field is described by a small immutable descriptor object (``QQ`` or
``GF(p)``) which knows how to build elements.  Rational elements are plain
``fractions.Fraction`` instances; prime-field elements are ``FpElem``
wrappers around a residue in ``[0, p)``.  Both support ``+ - * /`` and test
falsy exactly when zero, so polynomial code never needs to branch on the
field.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class FieldError(ArithmeticError):
    pass


@dataclass(frozen=True, slots=True)
class FpElem:
    """An element of F_p, stored as the canonical residue in [0, p)."""

    p: int
    val: int

    def _coerce(self, other):
        if isinstance(other, FpElem):
            if other.p != self.p:
                raise FieldError(f"mixing F_{self.p} and F_{other.p}")
            return other
        if isinstance(other, int):
            return FpElem(self.p, other % self.p)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FpElem(self.p, (self.val + other.val) % self.p)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FpElem(self.p, (self.val - other.val) % self.p)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FpElem(self.p, (self.val * other.val) % self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.val == 0:
            raise ZeroDivisionError(f"division by zero in F_{self.p}")
        return FpElem(self.p, (self.val * pow(other.val, self.p - 2, self.p)) % self.p)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __neg__(self):
        return FpElem(self.p, (-self.val) % self.p)

    def __pow__(self, n: int):
        return FpElem(self.p, pow(self.val, n, self.p))

    def __bool__(self):
        return self.val != 0

    def __eq__(self, other):
        if isinstance(other, int):
            return self.val == other % self.p
        return (
            isinstance(other, FpElem) and other.p == self.p and other.val == self.val
        )

    def __hash__(self):
        return hash((self.p, self.val))

    def __repr__(self):
        return f"{self.val}"


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


class Rationals:
    """Descriptor for Q.  Elements are ``Fraction`` instances."""

    name = "Q"
    characteristic = 0

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def of_int(self, k: int):
        return Fraction(k)

    def of_str(self, s: str):
        return Fraction(s)

    def to_str(self, x) -> str:
        return str(x)

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "QQ"


class PrimeField:
    """Descriptor for F_p, p prime."""

    def __init__(self, p: int):
        if not _is_prime(p):
            raise FieldError(f"{p} is not prime")
        self.p = p
        self.name = f"F{p}"
        self.characteristic = p

    @property
    def zero(self):
        return FpElem(self.p, 0)

    @property
    def one(self):
        return FpElem(self.p, 1)

    def of_int(self, k: int):
        return FpElem(self.p, k % self.p)

    def of_str(self, s: str):
        # accepts "a" or "a/b"; the fraction is reduced in F_p
        q = Fraction(s)
        return self.of_int(q.numerator) / self.of_int(q.denominator)

    def to_str(self, x) -> str:
        return str(x.val)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return f"GF({self.p})"


QQ = Rationals()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


def field_from_name(spec) -> Rationals | PrimeField:
    """Parse a field description: "Q", "Fp:5", or {"p": 5}."""
    if isinstance(spec, dict):
        return GF(int(spec["p"]))
    if spec == "Q":
        return QQ
    if isinstance(spec, str) and spec.startswith("Fp:"):
        return GF(int(spec.split(":", 1)[1]))
    if isinstance(spec, str) and spec.startswith("F") and spec[1:].isdigit():
        return GF(int(spec[1:]))
    raise FieldError(f"unrecognized field spec {spec!r}")

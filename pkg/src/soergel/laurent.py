"""Integer Laurent polynomials in one variable v.

A Laurent polynomial is held as a dict {exponent: coefficient} with int
coefficients and no zero entries.  Instances are immutable by convention;
every operation returns a fresh object.
"""

from __future__ import annotations


class LaurentPoly:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        c = {}
        if coeffs:
            for e, a in coeffs.items():
                if a != 0:
                    c[int(e)] = a
        self.coeffs = c

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "LaurentPoly":
        return LaurentPoly()

    @staticmethod
    def one() -> "LaurentPoly":
        return LaurentPoly({0: 1})

    @staticmethod
    def monomial(exp: int, coeff: int = 1) -> "LaurentPoly":
        return LaurentPoly({exp: coeff})

    @staticmethod
    def v(exp: int = 1) -> "LaurentPoly":
        return LaurentPoly({exp: 1})

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __getitem__(self, exp: int) -> int:
        return self.coeffs.get(exp, 0)

    def nonnegative(self) -> bool:
        return all(a >= 0 for a in self.coeffs.values())

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        c = dict(self.coeffs)
        for e, a in other.coeffs.items():
            s = c.get(e, 0) + a
            if s:
                c[e] = s
            else:
                c.pop(e, None)
        return LaurentPoly(c)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -a for e, a in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return LaurentPoly({e: a * other for e, a in self.coeffs.items()})
        c: dict[int, int] = {}
        for e1, a1 in self.coeffs.items():
            for e2, a2 in other.coeffs.items():
                e = e1 + e2
                s = c.get(e, 0) + a1 * a2
                if s:
                    c[e] = s
                else:
                    c.pop(e, None)
        return LaurentPoly(c)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        out = LaurentPoly.one()
        for _ in range(n):
            out = out * self
        return out

    def bar(self) -> "LaurentPoly":
        """Substitute v -> v^{-1}."""
        return LaurentPoly({-e: a for e, a in self.coeffs.items()})

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by v^k."""
        return LaurentPoly({e + k: a for e, a in self.coeffs.items()})

    def eval_int(self, x: int):
        """Evaluate at an integer x != 0 (exact, returns a Fraction for x != 1, -1)."""
        from fractions import Fraction

        return sum((Fraction(x) ** e) * a for e, a in self.coeffs.items())

    def eval_one(self) -> int:
        return sum(self.coeffs.values())

    # -- comparison / display ----------------------------------------------

    def __eq__(self, other):
        return isinstance(other, LaurentPoly) and other.coeffs == self.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __repr__(self):
        return f"LaurentPoly({self})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for e in sorted(self.coeffs):
            a = self.coeffs[e]
            if e == 0:
                term = str(a)
            else:
                va = "v" if e == 1 else f"v^{e}"
                if a == 1:
                    term = va
                elif a == -1:
                    term = f"-{va}"
                else:
                    term = f"{a}*{va}"
            parts.append(term)
        out = parts[0]
        for t in parts[1:]:
            out += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
        return out


class GradedRank(LaurentPoly):
    """A Laurent polynomial with nonnegative coefficients (a graded rank)."""

    __slots__ = ()

    def __init__(self, coeffs=None):
        super().__init__(coeffs)
        if not self.nonnegative():
            raise ValueError(f"graded rank with negative coefficient: {self}")

    @staticmethod
    def of(p: LaurentPoly) -> "GradedRank":
        return GradedRank(p.coeffs)

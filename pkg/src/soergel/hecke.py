"""The Hecke algebra of a Coxeter system over Z[v, v^-1].

Elements are finite sums sum_w a_w(v) H_w held as {Element: LaurentPoly}
with canonical Elements as keys.  Multiplication uses

    H_x H_s = H_{xs}                      if xs > x,
    H_x H_s = H_{xs} + (v^-1 - v) H_x     if xs < x,

which is the quadratic relation (H_s - v^-1)(H_s + v) = 0 rewritten on the
standard basis.  H_s is invertible with H_s^-1 = H_s + (v - v^-1).
"""

from __future__ import annotations

from . import coxeter
from .coxeter import CoxeterMatrix, Element
from .laurent import GradedRank, LaurentPoly

_V = LaurentPoly.v(1)
_VINV = LaurentPoly.v(-1)


class HeckeElt:
    __slots__ = ("matrix", "terms")

    def __init__(self, matrix: CoxeterMatrix, terms=None):
        self.matrix = matrix
        t: dict[Element, LaurentPoly] = {}
        if terms:
            for w, p in terms.items():
                if p:
                    t[w] = p
        self.terms = t

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero(matrix) -> "HeckeElt":
        return HeckeElt(matrix)

    @staticmethod
    def unit(matrix) -> "HeckeElt":
        return HeckeElt.basis(Element(matrix, ()))

    @staticmethod
    def basis(w: Element) -> "HeckeElt":
        return HeckeElt(w.matrix, {w: LaurentPoly.one()})

    # -- linear structure ------------------------------------------------------

    def __add__(self, other: "HeckeElt") -> "HeckeElt":
        t = dict(self.terms)
        for w, p in other.terms.items():
            q = t.get(w)
            t[w] = p if q is None else q + p
        return HeckeElt(self.matrix, t)

    def __sub__(self, other: "HeckeElt") -> "HeckeElt":
        return self + other.scale(LaurentPoly({0: -1}))

    def scale(self, a: LaurentPoly) -> "HeckeElt":
        return HeckeElt(self.matrix, {w: p * a for w, p in self.terms.items()})

    def coefficient(self, w: Element) -> LaurentPoly:
        return self.terms.get(w, LaurentPoly.zero())

    def __eq__(self, other):
        return (
            isinstance(other, HeckeElt)
            and other.matrix == self.matrix
            and other.terms == self.terms
        )

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __mul__(self, other: "HeckeElt") -> "HeckeElt":
        return hecke_mul(self, other)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = [f"({p})*H[{w!r}]" for w, p in sorted(self.terms.items())]
        return " + ".join(parts)


def _mul_by_gen(h: HeckeElt, s: int) -> HeckeElt:
    out: dict[Element, LaurentPoly] = {}
    vdiff = _VINV - _V
    for x, p in h.terms.items():
        xs = coxeter.mult_gen(x, s)
        if xs.length > x.length:
            q = out.get(xs)
            out[xs] = p if q is None else q + p
        else:
            q = out.get(xs)
            out[xs] = p if q is None else q + p
            q = out.get(x)
            pv = p * vdiff
            out[x] = pv if q is None else q + pv
    return HeckeElt(h.matrix, out)


def hecke_mul(a: HeckeElt, b: HeckeElt) -> HeckeElt:
    if a.matrix != b.matrix:
        raise coxeter.CoxeterError("Hecke elements over different systems")
    out = HeckeElt.zero(a.matrix)
    for w2, p2 in b.terms.items():
        left = a
        for s in w2.word:
            left = _mul_by_gen(left, s)
        out = out + left.scale(p2)
    return out


def basis_inverse(w: Element) -> HeckeElt:
    """H_w^-1, computed by inverting each generator along a reduced word."""
    cache = w.matrix._cache.setdefault("hecke_inverse", {})
    if w in cache:
        return cache[w]
    out = HeckeElt.unit(w.matrix)
    vmv = _V - _VINV
    for s in reversed(w.word):
        gen_inv = HeckeElt(
            w.matrix,
            {
                coxeter.normalize(w.matrix, (s,)): LaurentPoly.one(),
                Element(w.matrix, ()): vmv,
            },
        )
        out = hecke_mul(out, gen_inv)
    cache[w] = out
    return out


# ---------------------------------------------------------------------------
# Bott-Samelson elements and their coefficients


def underline_gen(matrix: CoxeterMatrix, s: int) -> HeckeElt:
    """H_s + v."""
    return HeckeElt(
        matrix,
        {coxeter.normalize(matrix, (s,)): LaurentPoly.one(), Element(matrix, ()): _V},
    )


def bott_samelson_elt(matrix: CoxeterMatrix, word) -> HeckeElt:
    out = HeckeElt.unit(matrix)
    for s in word:
        out = hecke_mul(out, underline_gen(matrix, s))
    return out


def p_polynomials(matrix: CoxeterMatrix, word) -> dict[Element, LaurentPoly]:
    return dict(bott_samelson_elt(matrix, word).terms)


def p_polynomial(matrix: CoxeterMatrix, word, w: Element) -> LaurentPoly:
    return bott_samelson_elt(matrix, word).coefficient(w)


# ---------------------------------------------------------------------------
# identities


def defect_formula_check(matrix: CoxeterMatrix, word, w: Element) -> bool:
    """sum over subsequences with endpoint w of v^defect equals the
    H_w-coefficient of the Bott-Samelson element."""
    lhs = LaurentPoly.zero()
    for ls in coxeter.all_subsequences(matrix, word):
        if ls.endpoint == w:
            lhs = lhs + LaurentPoly.v(ls.defect)
    return lhs == p_polynomial(matrix, word, w)


def sum_formula_check(matrix: CoxeterMatrix, word) -> bool:
    """sum_w v^{l(w)} p^w(v^-1) = (v + v^-1)^{len(word)}."""
    word = tuple(word)
    total = LaurentPoly.zero()
    for w, p in p_polynomials(matrix, word).items():
        total = total + p.bar().shift(w.length)
    return total == (_V + _VINV) ** len(word)


def reversal_check(matrix: CoxeterMatrix, word) -> bool:
    """p over the reversed word at w^-1 equals p over the word at w."""
    word = tuple(word)
    p_fwd = p_polynomials(matrix, word)
    p_rev = p_polynomials(matrix, tuple(reversed(word)))
    keys = set(p_fwd) | {w.inverse() for w in p_rev}
    for w in keys:
        if p_rev.get(w.inverse(), LaurentPoly.zero()) != p_fwd.get(w, LaurentPoly.zero()):
            return False
    return True


# ---------------------------------------------------------------------------
# traces and (anti)involutions


def bar(h: HeckeElt) -> HeckeElt:
    """The bar involution: v -> v^-1, H_w -> (H_{w^-1})^-1."""
    out = HeckeElt.zero(h.matrix)
    for w, p in h.terms.items():
        out = out + basis_inverse(w.inverse()).scale(p.bar())
    return out


def omega(h: HeckeElt) -> HeckeElt:
    """The anti-involution: v -> v^-1, H_w -> H_w^-1."""
    out = HeckeElt.zero(h.matrix)
    for w, p in h.terms.items():
        out = out + basis_inverse(w).scale(p.bar())
    return out


def epsilon(h: HeckeElt) -> LaurentPoly:
    """The trace picking the H_e coefficient."""
    return h.coefficient(Element(h.matrix, ()))


def epsilon_bar(h: HeckeElt) -> LaurentPoly:
    return epsilon(bar(h)).bar()


# ---------------------------------------------------------------------------
# graded ranks


def hom_rank_formula(matrix: CoxeterMatrix, x_word, y_word) -> GradedRank:
    """sum_w p_x^w(v^-1) p_y^w(v^-1); the graded rank of the hom space."""
    px = p_polynomials(matrix, x_word)
    py = p_polynomials(matrix, y_word)
    total = LaurentPoly.zero()
    for w, p in px.items():
        q = py.get(w)
        if q is not None:
            total = total + p.bar() * q.bar()
    return GradedRank.of(total)


def hom_rank_via_traces(matrix: CoxeterMatrix, x_word, y_word) -> LaurentPoly:
    """The same rank computed as epsilon_bar(omega(ch x) * ch y)."""
    hx = bott_samelson_elt(matrix, x_word)
    hy = bott_samelson_elt(matrix, y_word)
    return epsilon_bar(hecke_mul(omega(hx), hy))


def character_of_ranks(matrix: CoxeterMatrix, ranks: dict[Element, LaurentPoly]) -> HeckeElt:
    """Assemble sum_w v^{-l(w)} grk_w H_w from per-stalk graded ranks."""
    terms = {w: p.shift(-w.length) for w, p in ranks.items()}
    return HeckeElt(matrix, terms)

"""Bott-Samelson bimodules through their coordinate embedding.

For a word (s_1, ..., s_l) the bimodule B = B_{s_1} x ... x B_{s_l} embeds
into a direct sum of 2^l copies of R indexed by bit vectors e; the copy at e
carries the right action twisted by the subword product s_1^{e_1}...s_l^{e_l}.
A pure tensor f_0 x f_1 x ... x f_l has e-coordinate

    f_0 * x_1(f_1) * x_2(f_2) * ... * x_l(f_l),    x_i = s_1^{e_1}...s_i^{e_i}.

Elements are stored as left coefficient vectors over the monomial basis
{1 x d_1 x ... x d_l : d_i in {1, delta_{s_i}}} indexed by bit vectors b
(d_i = delta_{s_i} iff b_i = 1); coordinates are derived.  Coefficients of a
pure tensor are found by splitting factors f = a + delta_s * b from the right
and moving the invariant parts left, so no linear solving is needed for
elements built from tensors.  Arbitrary coordinate vectors are certified to
lie in the lattice by an exact fraction-free solve against the monomial-basis
coordinate matrix.

Bit vectors are tuples ordered lexicographically (first letter = most
significant); all matrices over the monomial basis use this order.
"""

from __future__ import annotations

from . import coxeter, hecke
from .coxeter import Element
from .laurent import GradedRank, LaurentPoly
from .polyring import (
    MultiPoly,
    NoSolutionError,
    RatPoly,
    bareiss_det,
    solve_many,
)
from .realization import Realization


class BimoduleError(ValueError):
    pass


class NotInLattice(BimoduleError):
    pass


class BasisFailure(BimoduleError):
    pass


def bits_list(l: int) -> list[tuple[int, ...]]:
    out = []
    for mask in range(1 << l):
        out.append(tuple((mask >> (l - 1 - i)) & 1 for i in range(l)))
    return out


class BSElement:
    """An element of B_word as a left coefficient vector over the monomial basis."""

    __slots__ = ("cat", "word", "coeffs", "_coords")

    def __init__(self, cat: "BSCategory", word, coeffs):
        self.cat = cat
        self.word = tuple(word)
        self.coeffs = {tuple(b): c for b, c in coeffs.items() if c}
        self._coords = None

    # -- coordinates -------------------------------------------------------------

    def coords(self) -> dict:
        if self._coords is None:
            C = self.cat.coords_matrix(self.word)
            out: dict[tuple, MultiPoly] = {}
            for e in self.cat.bits(len(self.word)):
                total = self.cat.real.zero()
                for b, c in self.coeffs.items():
                    total = total + c * C[e][b]
                if total:
                    out[e] = total
            self._coords = out
        return self._coords

    def coord(self, e) -> MultiPoly:
        return self.coords().get(tuple(e), self.cat.real.zero())

    def support(self) -> set[Element]:
        return {self.cat.endpoint(self.word, e) for e in self.coords()}

    def section_member(self, I) -> bool:
        return self.support() <= set(I)

    def stalk_row(self, w: Element) -> tuple:
        """Coordinates on the block {e : endpoint(e) = w}, block bits sorted."""
        return tuple(self.coord(e) for e in self.cat.block_bits(self.word, w))

    def degree(self):
        """Homogeneous degree, or None for 0 / inhomogeneous elements."""
        degs = set()
        l = len(self.word)
        for b, c in self.coeffs.items():
            if not c.is_homogeneous():
                return None
            degs.add(c.homogeneous_graded_degree() + 2 * sum(b) - l)
        if len(degs) != 1:
            return None
        return degs.pop()

    # -- linear structure -----------------------------------------------------------

    def _check(self, other: "BSElement"):
        if other.cat is not self.cat or other.word != self.word:
            raise BimoduleError("elements of different bimodules")

    def __add__(self, other: "BSElement") -> "BSElement":
        self._check(other)
        out = dict(self.coeffs)
        for b, c in other.coeffs.items():
            s = out.get(b)
            s = c if s is None else s + c
            if s:
                out[b] = s
            else:
                del out[b]
        return BSElement(self.cat, self.word, out)

    def __sub__(self, other: "BSElement") -> "BSElement":
        return self + (-other)

    def __neg__(self) -> "BSElement":
        return BSElement(self.cat, self.word, {b: -c for b, c in self.coeffs.items()})

    def left_mul(self, f: MultiPoly) -> "BSElement":
        return BSElement(self.cat, self.word, {b: f * c for b, c in self.coeffs.items()})

    def right_mul(self, f: MultiPoly) -> "BSElement":
        return self.cat.right_mul(self, f)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return (
            isinstance(other, BSElement)
            and other.cat is self.cat
            and other.word == self.word
            and other.coeffs == self.coeffs
        )

    def __hash__(self):
        raise TypeError("BSElement is unhashable")

    def __repr__(self):
        names = ".".join(self.cat.real.matrix.word_names(self.word)) or "()"
        terms = ", ".join(f"{b}: {c}" for b, c in sorted(self.coeffs.items()))
        return f"BSElement[{names}]({terms})"


class BSCategory:
    """Shared per-realization caches for Bott-Samelson computations."""

    def __init__(self, real: Realization):
        self.real = real
        self._coords_matrices: dict = {}
        self._endpoints: dict = {}
        self._bits: dict = {}

    # -- combinatorial caches -----------------------------------------------------

    def bits(self, l: int) -> list[tuple[int, ...]]:
        got = self._bits.get(l)
        if got is None:
            got = bits_list(l)
            self._bits[l] = got
        return got

    def endpoint(self, word, e) -> Element:
        word, e = tuple(word), tuple(e)
        table = self._endpoints.get(word)
        if table is None:
            table = {}
            self._endpoints[word] = table
        got = table.get(e)
        if got is None:
            got = coxeter.subword_endpoint(self.real.matrix, word, e)
            table[e] = got
        return got

    def block_bits(self, word, w: Element) -> list[tuple[int, ...]]:
        """Bit vectors with endpoint w, sorted by the subsequence total order."""
        lss = coxeter.subsequences_with_endpoint(self.real.matrix, word, w)
        return [ls.bits for ls in lss]

    def basis_degree(self, word, b) -> int:
        return 2 * sum(b) - len(word)

    def basis_factors(self, word, b) -> list[MultiPoly]:
        """The l+1 tensor factors of the monomial basis element at b."""
        fs = [self.real.one()]
        for s, bit in zip(word, b):
            fs.append(self.real.deltas[s] if bit else self.real.one())
        return fs

    def coords_matrix(self, word) -> dict:
        """C[e][b] = coordinate at e of the monomial basis element at b."""
        word = tuple(word)
        got = self._coords_matrices.get(word)
        if got is not None:
            return got
        l = len(word)
        act = self.real.action
        C: dict = {}
        for e in self.bits(l):
            prefix = Element(self.real.matrix, ())
            twisted = []  # x_i(delta_{s_i}) for i = 1..l
            for i, s in enumerate(word):
                if e[i]:
                    prefix = coxeter.mult_gen(prefix, s)
                twisted.append(act.twisted(prefix, self.real.deltas[s]))
            row = {}
            for b in self.bits(l):
                prod = self.real.one()
                for i in range(l):
                    if b[i]:
                        prod = prod * twisted[i]
                row[b] = prod
            C[e] = row
        self._coords_matrices[word] = C
        return C

    # -- tensor expansion ---------------------------------------------------------

    def expand_left(self, word, factors) -> dict:
        """Left coefficients of the pure tensor f_0 x ... x f_l over the basis."""
        word = tuple(word)
        if len(factors) != len(word) + 1:
            raise BimoduleError("need len(word)+1 tensor factors")
        return self._expand_left(word, list(factors))

    def _expand_left(self, word, factors) -> dict:
        if not word:
            f = factors[0]
            return {(): f} if f else {}
        s = word[-1]
        a, b = self.real.delta_split(s, factors[-1])
        out = {}
        if a:
            sub = self._expand_left(word[:-1], factors[:-2] + [factors[-2] * a])
            for bits, c in sub.items():
                out[bits + (0,)] = c
        if b:
            sub = self._expand_left(word[:-1], factors[:-2] + [factors[-2] * b])
            for bits, c in sub.items():
                out[bits + (1,)] = c
        return out

    def expand_right(self, word, factors) -> dict:
        """Right coefficients over the basis {d_1 x ... x d_l x 1}."""
        word = tuple(word)
        if len(factors) != len(word) + 1:
            raise BimoduleError("need len(word)+1 tensor factors")
        return self._expand_right(word, list(factors))

    def _expand_right(self, word, factors) -> dict:
        if not word:
            f = factors[0]
            return {(): f} if f else {}
        s = word[0]
        a, b = self.real.delta_split(s, factors[0])
        out = {}
        if a:
            sub = self._expand_right(word[1:], [a * factors[1]] + factors[2:])
            for bits, c in sub.items():
                out[(0,) + bits] = c
        if b:
            sub = self._expand_right(word[1:], [b * factors[1]] + factors[2:])
            for bits, c in sub.items():
                out[(1,) + bits] = c
        return out

    # -- element constructors -----------------------------------------------------

    def element(self, word, coeffs) -> BSElement:
        return BSElement(self, word, coeffs)

    def zero_elt(self, word) -> BSElement:
        return BSElement(self, word, {})

    def basis_element(self, word, b) -> BSElement:
        return BSElement(self, word, {tuple(b): self.real.one()})

    def u_elt(self, word) -> BSElement:
        """The generator 1 x 1 x ... x 1."""
        return self.basis_element(word, (0,) * len(word))

    def b_elt(self, word, e) -> BSElement:
        """The U/D monomial: factor i is 1 x 1 on label U, delta x 1 on label D."""
        ls = coxeter.label_subsequence(self.real.matrix, word, e)
        factors = [
            self.real.deltas[s] if lab == "D" else self.real.one()
            for s, lab in zip(ls.base, ls.labels)
        ] + [self.real.one()]
        return BSElement(self, word, self.expand_left(word, factors))

    def from_tensor(self, word, factors) -> BSElement:
        """The pure tensor f_0 x f_1 x ... x f_l as an element."""
        return BSElement(self, word, self.expand_left(word, factors))

    def element_from_coords(self, word, coords) -> BSElement:
        """Invert the coordinate embedding; raises NotInLattice when the
        coordinates lie in B x Q but not in B."""
        word = tuple(word)
        l = len(word)
        allbits = self.bits(l)
        C = self.coords_matrix(word)
        A = [[C[e][b] for b in allbits] for e in allbits]
        if isinstance(coords, dict):
            rhs = [coords.get(e, self.real.zero()) for e in allbits]
        else:
            rhs = list(coords)
        try:
            sol = solve_many(A, [rhs])[0]
        except NoSolutionError as exc:  # cannot happen: C is invertible over Q
            raise NotInLattice(str(exc))
        if not sol.is_polynomial:
            raise NotInLattice("coordinates are not an R-combination of the basis")
        coeffs = {b: p for b, p in zip(allbits, sol.polynomial_solution)}
        return BSElement(self, word, coeffs)

    # -- module operations ----------------------------------------------------------

    def right_mul(self, m: BSElement, f: MultiPoly) -> BSElement:
        out: dict = {}
        word = m.word
        for b, c in m.coeffs.items():
            factors = self.basis_factors(word, b)
            factors[-1] = factors[-1] * f
            for bits, q in self._expand_left(word, factors).items():
                t = c * q
                s = out.get(bits)
                s = t if s is None else s + t
                if s:
                    out[bits] = s
                else:
                    del out[bits]
        return BSElement(self, word, out)

    def tensor(self, m: BSElement, n: BSElement) -> BSElement:
        word = m.word + n.word
        out: dict = {}
        for b2, c2 in n.coeffs.items():
            suffix = self.basis_factors(n.word, b2)[1:]
            for b, c in m.coeffs.items():
                factors = self.basis_factors(m.word, b)
                factors[-1] = factors[-1] * c2
                factors = factors + suffix
                for bits, q in self._expand_left(word, factors).items():
                    t = c * q
                    s = out.get(bits)
                    s = t if s is None else s + t
                    if s:
                        out[bits] = s
                    else:
                        del out[bits]
        return BSElement(self, word, out)

    # -- congruences ------------------------------------------------------------------

    def edge_congruence_check(self, m: BSElement) -> bool:
        """Coordinates across each one-bit edge differ by a multiple of the
        edge's reflection root."""
        word = m.word
        l = len(word)
        for e in self.bits(l):
            for i in range(l):
                e2 = e[:i] + (1 - e[i],) + e[i + 1 :]
                if e2 < e:
                    continue
                prefix = coxeter.normalize(
                    self.real.matrix,
                    tuple(s for s, bit in zip(word[:i], e[:i]) if bit),
                )
                root = self.real.act(prefix, self.real.alphas[word[i]])
                diff = m.coord(e) - m.coord(e2)
                if diff and not diff.divisible_by(root):
                    return False
        return True


# ---------------------------------------------------------------------------
# structural checks


def stalk_basis_check(cat: BSCategory, word, w: Element) -> GradedRank:
    """Certify that the U/D monomials with endpoint w form a left R-basis of
    the image of B_word in the w-stalk, and return its graded rank."""
    word = tuple(word)
    lss = coxeter.subsequences_with_endpoint(cat.real.matrix, word, w)
    if not lss:
        raise BimoduleError(f"{w!r} is not an endpoint of any subsequence")
    block = [ls.bits for ls in lss]
    belts = [cat.b_elt(word, ls.bits) for ls in lss]

    for ls, elt in zip(lss, belts):
        if elt.degree() != -ls.defect - w.length:
            raise BasisFailure("U/D monomial has unexpected degree")

    rows = [[elt.coord(e) for e in block] for elt in belts]
    if not bareiss_det(rows):
        raise BasisFailure(f"stalk rows at {w!r} are linearly dependent")

    # spanning with polynomial coefficients: each monomial basis element's
    # stalk row must be an R-combination of the U/D rows
    A = [[rows[j][i] for j in range(len(block))] for i in range(len(block))]
    C = cat.coords_matrix(word)
    allbits = cat.bits(len(word))
    rhs = [[C[e][b] for e in block] for b in allbits]
    for sol in solve_many(A, rhs):
        if not sol.is_polynomial:
            raise BasisFailure(f"stalk at {w!r} is not spanned over R")

    grk = LaurentPoly.zero()
    for ls in lss:
        grk = grk + LaurentPoly.v(ls.defect + w.length)
    expected = hecke.p_polynomial(cat.real.matrix, word, w).shift(w.length)
    if grk != expected:
        raise BasisFailure(f"graded rank {grk} differs from {expected}")
    return GradedRank.of(grk)


def section_basis_check(cat: BSCategory, word, I, w: Element, elements) -> GradedRank:
    """Certify the filtration layer at w inside the closed subset I.

    `elements` are the images of the dualized light leaves applied to the
    generator of B_{w-word}, aligned with the total order on subsequences
    with endpoint w (see morphism.filtration_elements).
    """
    word = tuple(word)
    S = set(I)
    if not coxeter.is_closed(S):
        raise coxeter.NotClosed("subset is not Bruhat-closed")
    if w not in S or any(u != w and coxeter.bruhat_leq(w, u) for u in S):
        raise coxeter.NotMaximal(f"{w!r} is not maximal in the subset")

    lss = coxeter.subsequences_with_endpoint(cat.real.matrix, word, w)
    if len(elements) != len(lss):
        raise BimoduleError("one element per subsequence with endpoint w required")
    below_w = coxeter.bruhat_below(w)
    grk = LaurentPoly.zero()
    for ls, elt in zip(lss, elements):
        if not elt.support() <= below_w:
            raise BasisFailure("filtration element not supported below w")
        if elt.degree() != ls.defect - w.length:
            raise BasisFailure("filtration element has unexpected degree")
        grk = grk + LaurentPoly.v(w.length - ls.defect)

    block = [ls.bits for ls in lss]
    rows = [[elt.coord(e) for e in block] for elt in elements]
    if not bareiss_det(rows):
        raise BasisFailure(f"filtration rows at {w!r} are linearly dependent")

    # the graded rank of the layer is v^{l(w)} p(1/v); elements supported
    # exactly on w have rank v^{-l(w)} p(1/v), the 2 l(w) shift being the
    # degree of the product of l(w) roots (see alpha_product_check)
    p = hecke.p_polynomial(cat.real.matrix, word, w)
    if grk != p.bar().shift(w.length):
        raise BasisFailure(f"graded rank {grk} differs from v^l p(1/v)")
    return GradedRank.of(grk)


def alpha_product_check(cat: BSCategory, word, w: Element, elements) -> bool:
    """Multiplying the filtration layer at w by the product of the roots of
    the left inversions of w lands in the lattice with support {w}, with the
    graded rank of the w-supported sections."""
    word = tuple(word)
    real = cat.real
    f = real.one()
    for _, prefix, s in coxeter.left_inversions(w):
        f = f * real.act(prefix, real.alphas[s])

    lss = coxeter.subsequences_with_endpoint(real.matrix, word, w)
    block = [ls.bits for ls in lss]
    grk = LaurentPoly.zero()
    for ls, elt in zip(lss, elements):
        scaled = elt.left_mul(f)
        truncated = {e: scaled.coord(e) for e in block}
        try:
            member = cat.element_from_coords(word, truncated)
        except NotInLattice:
            return False
        if not member.support() <= {w}:
            return False
        if member.degree() != (ls.defect - w.length) + 2 * w.length:
            return False
        grk = grk + LaurentPoly.v(-member.degree())
    p = hecke.p_polynomial(real.matrix, word, w)
    return grk == p.bar().shift(-w.length)


def character(cat: BSCategory, word) -> hecke.HeckeElt:
    """Assemble the character from certified stalk ranks and compare it with
    the Bott-Samelson Hecke element."""
    word = tuple(word)
    endpoints = {cat.endpoint(word, e) for e in cat.bits(len(word))}
    ranks = {w: stalk_basis_check(cat, word, w) for w in endpoints}
    ch = hecke.character_of_ranks(cat.real.matrix, ranks)
    expected = hecke.bott_samelson_elt(cat.real.matrix, word)
    if ch != expected:
        raise BasisFailure(f"character {ch!r} differs from {expected!r}")
    return ch

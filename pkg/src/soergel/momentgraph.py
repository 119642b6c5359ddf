"""The structure algebra of the moment graph on a Bruhat-closed subset.

An element is a tuple (z_w)_{w in I} of polynomials satisfying the edge
congruences z_{tw} = z_w mod alpha_t for every reflection t with w, tw in I.
The group may be infinite, so every instance carries the reflection-length
bound L up to which the congruences were enumerated and checked; congruences
beyond L are unchecked by construction.

Under the GKM condition (pairwise independent roots among the reflections
connecting I) every z splits as z = x + diag(delta_s) y with x, y invariant
under the right s-shift, by the constructive formulas

    y_w = (z_w - z_{ws}) / w(alpha_s),      x_w = z_w - w(delta_s) y_w.
"""

from __future__ import annotations

from . import coxeter
from .bimodule import BSCategory, BSElement, NotInLattice
from .coxeter import Element
from .polyring import DivisionFailure, MultiPoly
from .realization import Realization


class MomentGraphError(ValueError):
    pass


class GKMViolation(MomentGraphError):
    pass


class SupportOutsideI(MomentGraphError):
    pass


class ZElement:
    __slots__ = ("real", "I", "values", "bound")

    def __init__(self, real: Realization, I, values: dict, bound: int):
        self.real = real
        self.I = frozenset(I)
        self.values = {w: values.get(w, real.zero()) for w in self.I}
        self.bound = bound

    def __eq__(self, other):
        return (
            isinstance(other, ZElement)
            and other.I == self.I
            and other.values == self.values
        )

    def __add__(self, other: "ZElement") -> "ZElement":
        self._check(other)
        return ZElement(
            self.real,
            self.I,
            {w: self.values[w] + other.values[w] for w in self.I},
            min(self.bound, other.bound),
        )

    def __sub__(self, other: "ZElement") -> "ZElement":
        self._check(other)
        return ZElement(
            self.real,
            self.I,
            {w: self.values[w] - other.values[w] for w in self.I},
            min(self.bound, other.bound),
        )

    def __mul__(self, other: "ZElement") -> "ZElement":
        self._check(other)
        return ZElement(
            self.real,
            self.I,
            {w: self.values[w] * other.values[w] for w in self.I},
            min(self.bound, other.bound),
        )

    def left_mul(self, f: MultiPoly) -> "ZElement":
        return ZElement(self.real, self.I, {w: f * self.values[w] for w in self.I}, self.bound)

    def restrict(self, J) -> "ZElement":
        J = frozenset(J)
        if not J <= self.I:
            raise MomentGraphError("restriction to a non-subset")
        return ZElement(self.real, J, {w: self.values[w] for w in J}, self.bound)

    def is_zero(self) -> bool:
        return all(not v for v in self.values.values())

    def _check(self, other: "ZElement"):
        if other.real is not self.real or other.I != self.I:
            raise MomentGraphError("structure-algebra elements on different subsets")

    def __repr__(self):
        vals = ", ".join(f"{w!r}: {p}" for w, p in sorted(self.values.items()))
        return f"ZElement({{{vals}}}, L={self.bound})"


def connecting_reflections(real: Realization, I, bound: int):
    """Reflections t of length <= bound with the edges (w, tw), w < tw, in I."""
    out = []
    S = set(I)
    for t in coxeter.reflections_upto(real.matrix, bound):
        pairs = []
        for w in sorted(S):
            tw = t * w
            if tw in S and w < tw:
                pairs.append((w, tw))
        if pairs:
            out.append((t, pairs))
    return out


def is_in_Z(real: Realization, values: dict, I, bound: int):
    """Check the edge congruences; returns (ok, witness or None)."""
    S = set(I)
    vals = {w: values.get(w, real.zero()) for w in S}
    for t, pairs in connecting_reflections(real, S, bound):
        root = real.root_of_reflection(t)
        for w, tw in pairs:
            diff = vals[tw] - vals[w]
            if diff and not diff.divisible_by(root):
                return False, (t, w, tw)
    return True, None


def z_element(real: Realization, I, values: dict, bound: int) -> ZElement:
    """Construct and verify a structure-algebra element."""
    ok, witness = is_in_Z(real, values, I, bound)
    if not ok:
        t, w, tw = witness
        raise MomentGraphError(
            f"congruence fails along {t!r} between {w!r} and {tw!r}"
        )
    return ZElement(real, I, values, bound)


def diagonal_embed(real: Realization, f: MultiPoly, I, bound: int) -> ZElement:
    """The diagonal element (w(f))_{w in I}; always satisfies the congruences."""
    return ZElement(real, I, {w: real.act(w, f) for w in I}, bound)


def gkm_on_subset(real: Realization, I, bound: int):
    """GKM among the reflections connecting I: pairwise independent roots."""
    ts = [t for t, _ in connecting_reflections(real, I, bound)]
    roots = [real.root_of_reflection(t).linear_coords() for t in ts]
    n = len(roots)
    for i in range(n):
        for j in range(i + 1, n):
            v0, v1 = roots[i], roots[j]
            if not any(
                v0[a] * v1[b] - v0[b] * v1[a]
                for a in range(len(v0))
                for b in range(a + 1, len(v0))
            ):
                return False, (ts[i], ts[j])
    return True, None


def split_s(z: ZElement, s: int):
    """Split z = x + diag(delta_s) y with x, y invariant under the right
    s-shift, via the constructive division formulas; requires I right-s-stable
    and GKM on I."""
    real = z.real
    S = set(z.I)
    if any(coxeter.mult_gen(w, s) not in S for w in S):
        raise MomentGraphError("subset is not stable under right multiplication by s")
    ok, witness = gkm_on_subset(real, S, z.bound)
    if not ok:
        raise GKMViolation(f"roots of {witness[0]!r} and {witness[1]!r} are dependent")
    alpha_s = real.alphas[s]
    delta_s = real.deltas[s]
    xs, ys = {}, {}
    for w in S:
        ws = coxeter.mult_gen(w, s)
        w_alpha = real.act(w, alpha_s)
        try:
            y = (z.values[w] - z.values[ws]).exact_div(w_alpha)
        except DivisionFailure as exc:
            raise DivisionFailure(f"split at {w!r}: {exc}") from exc
        ys[w] = y
        xs[w] = z.values[w] - real.act(w, delta_s) * y
    x_elt = ZElement(real, S, xs, z.bound)
    y_elt = ZElement(real, S, ys, z.bound)
    for w in S:
        ws = coxeter.mult_gen(w, s)
        if xs[w] != xs[ws] or ys[w] != ys[ws]:
            raise MomentGraphError("split components are not right-s-invariant")
    for elt, name in ((x_elt, "x"), (y_elt, "y")):
        ok, witness = is_in_Z(real, elt.values, S, z.bound)
        if not ok:
            raise MomentGraphError(f"split component {name} violates a congruence")
    return x_elt, y_elt


def z_action(z: ZElement, m: BSElement) -> BSElement:
    """Act on a Bott-Samelson element: coordinate e is multiplied by the value
    of z at the subword product; the result is certified to stay in the
    lattice."""
    cat = m.cat
    word = m.word
    supp = m.support()
    if not supp <= z.I:
        raise SupportOutsideI(f"support {supp} escapes the subset")
    coords = {}
    for e in cat.bits(len(word)):
        w = cat.endpoint(word, e)
        c = m.coord(e)
        if c and w in z.I:
            coords[e] = z.values[w] * c
    return cat.element_from_coords(word, coords)


def induction_check(cat: BSCategory, z: ZElement, s: int, word) -> bool:
    """Acting with z on B_word x B_s agrees with acting through the splitting
    z = x + diag(delta_s) y on the left tensor factor."""
    real = cat.real
    word = tuple(word)
    sub_I = {cat.endpoint(word, e) for e in cat.bits(len(word))}
    prod_I = sub_I | {coxeter.mult_gen(w, s) for w in sub_I}
    if not prod_I <= z.I:
        raise SupportOutsideI("z must be defined on the support of the product word")
    x_elt, y_elt = split_s(z, s)
    xr = x_elt.restrict(sub_I)
    yr = y_elt.restrict(sub_I)
    bs_basis = [cat.u_elt((s,)), cat.basis_element((s,), (1,))]
    for b in cat.bits(len(word)):
        mb = cat.basis_element(word, b)
        for d in bs_basis:
            xi = cat.tensor(mb, d)
            direct = z_action(z, xi)
            xm = z_action(xr, mb)
            ym = z_action(yr, mb)
            via_split = cat.tensor(xm, d) + cat.tensor(ym, d).right_mul(real.deltas[s])
            if direct != via_split:
                return False
    return True

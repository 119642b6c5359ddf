"""Morphisms between Bott-Samelson bimodules.

A morphism phi: B_x -> B_y of degree d is stored as the 2^{l_y} x 2^{l_x}
matrix of its action on the left monomial bases: phi(m_b) = sum A[b'][b]
m'_{b'} with A[b'][b] in R homogeneous of degree d + deg(m_b) - deg(m'_{b'}).
Left R-linearity is built in; right linearity is a linear condition on the
entries checked on a basis of V, and stalk preservation is checked through
the coordinate matrices.

The braid-morphism solver finds a degree-zero morphism between the two
reduced words of the longest element of a finite dihedral pair sending the
all-ones generator to the all-ones generator.  Its unknowns are the
coefficients of the forced-degree homogeneous entries; the constraints
(right linearity, the generator condition and, when needed, stalk
preservation) are linear over the scalar field and solved by sparse exact
elimination, taking the first basic solution under a fixed unknown order.
A solution found without the stalk rows is verified and the solver re-runs
with them only when verification fails, which can happen for degenerate
realizations only.

Duality is computed through the pairing B_x x B_x -> R induced by the
self-duality of B_x.  On the right monomial bases the pairing is bilinear
for the right R-action, symmetric, and its Gram matrix is polynomial and
unimodular, built by the recursion

    G[(0,b'),(1,c')] = G'[b'][c'],   G[(0,b'),(0,c')] = 0,
    G[(1,b'),(1,c')] = <m'_{b'}, (delta_s + s(delta_s)) m'_{c'}>,

with s the first letter.  The dual of phi has right-basis matrix
G_x^{-1} A~^T G_y.
"""

from __future__ import annotations

from . import bimodule as bim
from . import coxeter, hecke
from .coxeter import Element, EndpointMismatch
from .laurent import GradedRank, LaurentPoly
from .polyring import (
    MultiPoly,
    NoSolutionError,
    bareiss_det,
    monomials_of_degree,
    nullspace_basis,
    solve_affine,
    solve_many,
)


class MorphismError(ValueError):
    pass


class ShapeMismatch(MorphismError):
    pass


class TriangularityFailure(MorphismError):
    pass


class BSMorphism:
    __slots__ = ("cat", "source", "target", "degree", "matrix")

    def __init__(self, cat, source, target, degree: int, matrix):
        self.cat = cat
        self.source = tuple(source)
        self.target = tuple(target)
        self.degree = degree
        self.matrix = [list(row) for row in matrix]

    def apply(self, m: bim.BSElement) -> bim.BSElement:
        if m.word != self.source:
            raise ShapeMismatch(f"element over {m.word}, morphism source {self.source}")
        src_bits = self.cat.bits(len(self.source))
        tgt_bits = self.cat.bits(len(self.target))
        vec = [m.coeffs.get(b) for b in src_bits]
        out = {}
        for i, bt in enumerate(tgt_bits):
            total = self.cat.real.zero()
            for j in range(len(src_bits)):
                c = vec[j]
                if c is not None and self.matrix[i][j]:
                    total = total + self.matrix[i][j] * c
            if total:
                out[bt] = total
        return bim.BSElement(self.cat, self.target, out)

    def is_identity(self) -> bool:
        if self.source != self.target or self.degree != 0:
            return False
        nb = 1 << len(self.source)
        one, zero = self.cat.real.one(), self.cat.real.zero()
        return all(
            self.matrix[i][j] == (one if i == j else zero)
            for i in range(nb)
            for j in range(nb)
        )

    def __eq__(self, other):
        return (
            isinstance(other, BSMorphism)
            and other.cat is self.cat
            and other.source == self.source
            and other.target == self.target
            and other.degree == self.degree
            and other.matrix == self.matrix
        )

    def __repr__(self):
        names = self.cat.real.matrix.word_names
        return (
            f"BSMorphism({'.'.join(names(self.source)) or '()'} -> "
            f"{'.'.join(names(self.target)) or '()'}, deg {self.degree})"
        )


class HomSpaceBasis:
    """Per-degree bases of the morphism space between two words."""

    def __init__(self, source, target, degrees: dict, rank: GradedRank, dmax: int):
        self.source = tuple(source)
        self.target = tuple(target)
        self.degrees = degrees
        self.rank = rank
        self.dmax = dmax

    def dimension(self, d: int) -> int:
        return len(self.degrees.get(d, ()))


class TriangularityReport:
    def __init__(self, word, w, bits_order, table, diag_ok, lower_ok):
        self.word = tuple(word)
        self.w = w
        self.bits_order = bits_order
        self.table = table
        self.diag_ok = diag_ok
        self.lower_ok = lower_ok

    @property
    def ok(self):
        return self.diag_ok and self.lower_ok


class _Unknowns:
    """Enumeration of the homogeneous unknown entries of a morphism matrix."""

    def __init__(self, cat, source, target, degree: int):
        self.cat = cat
        self.source = tuple(source)
        self.target = tuple(target)
        self.degree = degree
        self.src_bits = cat.bits(len(self.source))
        self.tgt_bits = cat.bits(len(self.target))
        nvars = cat.real.nvars
        self.terms: dict[tuple[int, int], list] = {}
        idx = 0
        for i, bt in enumerate(self.tgt_bits):
            for j, bs in enumerate(self.src_bits):
                gdeg = degree + cat.basis_degree(self.source, bs) - cat.basis_degree(self.target, bt)
                entry = []
                if gdeg >= 0 and gdeg % 2 == 0:
                    for mono in monomials_of_degree(nvars, gdeg // 2):
                        entry.append((mono, idx))
                        idx += 1
                self.terms[(i, j)] = entry
        self.count = idx

    def build(self, x) -> list[list[MultiPoly]]:
        field, nvars = self.cat.real.field, self.cat.real.nvars
        rows = []
        for i in range(len(self.tgt_bits)):
            row = []
            for j in range(len(self.src_bits)):
                t = {mono: x[idx] for mono, idx in self.terms[(i, j)] if x[idx]}
                row.append(MultiPoly(field, nvars, t))
            rows.append(row)
        return rows

    def flatten(self, phi: BSMorphism):
        """Coefficient vector of a morphism with entries of the forced degrees."""
        out = {}
        for (i, j), entry in self.terms.items():
            p = phi.matrix[i][j]
            seen = dict(p.terms)
            for mono, idx in entry:
                c = seen.pop(mono, None)
                if c:
                    out[idx] = c
            if seen:
                raise MorphismError("entry has a term outside the forced degree")
        return out


class Morphisms:
    """Morphisms over a fixed BSCategory, with braid/light-leaf caches."""

    def __init__(self, cat: bim.BSCategory):
        self.cat = cat
        self._braid: dict = {}
        self._gram: dict = {}
        self._gram_inv: dict = {}
        self._rmul_mats: dict = {}
        self._adjugate: dict = {}
        self._inverse_coords: dict = {}
        self._light_leaves: dict = {}
        self._dual_light_leaves: dict = {}

    # -- plumbing ---------------------------------------------------------------

    @property
    def real(self):
        return self.cat.real

    def identity(self, word) -> BSMorphism:
        word = tuple(word)
        nb = 1 << len(word)
        one, zero = self.real.one(), self.real.zero()
        mat = [[one if i == j else zero for j in range(nb)] for i in range(nb)]
        return BSMorphism(self.cat, word, word, 0, mat)

    def compose(self, psi: BSMorphism, phi: BSMorphism) -> BSMorphism:
        """psi after phi."""
        if psi.source != phi.target:
            raise ShapeMismatch(f"cannot compose {psi!r} after {phi!r}")
        if phi.is_identity():
            return BSMorphism(self.cat, phi.source, psi.target, psi.degree, psi.matrix)
        if psi.is_identity():
            return BSMorphism(self.cat, phi.source, psi.target, phi.degree, phi.matrix)
        n, k, m = len(psi.matrix), len(phi.matrix), len(phi.matrix[0])
        zero = self.real.zero()
        out = [[zero for _ in range(m)] for _ in range(n)]
        for i in range(n):
            for t in range(k):
                a = psi.matrix[i][t]
                if not a:
                    continue
                row = phi.matrix[t]
                for j in range(m):
                    if row[j]:
                        out[i][j] = out[i][j] + a * row[j]
        return BSMorphism(self.cat, phi.source, psi.target, psi.degree + phi.degree, out)

    def tensor_hom(self, phi: BSMorphism, psi: BSMorphism) -> BSMorphism:
        source = phi.source + psi.source
        target = phi.target + psi.target
        degree = phi.degree + psi.degree
        if psi.is_identity():
            # phi(m_b) x m_c = sum A[b'][b] m_{(b', c)}: a Kronecker product
            nb2 = 1 << len(psi.source)
            zero = self.real.zero()
            nt, ns = len(phi.matrix), len(phi.matrix[0])
            out = [[zero for _ in range(ns * nb2)] for _ in range(nt * nb2)]
            for i in range(nt):
                for j in range(ns):
                    a = phi.matrix[i][j]
                    if a:
                        for c in range(nb2):
                            out[i * nb2 + c][j * nb2 + c] = a
            return BSMorphism(self.cat, source, target, degree, out)
        src1 = self.cat.bits(len(phi.source))
        src2 = self.cat.bits(len(psi.source))
        tgt = self.cat.bits(len(target))
        img1 = [phi.apply(self.cat.basis_element(phi.source, b)) for b in src1]
        img2 = [psi.apply(self.cat.basis_element(psi.source, b)) for b in src2]
        zero = self.real.zero()
        cols = []
        for e1 in img1:
            for e2 in img2:
                t = self.cat.tensor(e1, e2)
                cols.append([t.coeffs.get(b, zero) for b in tgt])
        mat = [[cols[j][i] for j in range(len(cols))] for i in range(len(tgt))]
        return BSMorphism(self.cat, source, target, degree, mat)

    # -- generators ----------------------------------------------------------------

    def gen_m(self, s: int) -> BSMorphism:
        """B_s -> R of degree 1: f x g -> fg."""
        one = self.real.one()
        return BSMorphism(self.cat, (s,), (), 1, [[one, self.real.deltas[s]]])

    def gen_i0(self, s: int) -> BSMorphism:
        """B_s B_s -> B_s of degree -1: f1 x f2 x f3 -> f1 d(f2) x f3."""
        one, zero = self.real.one(), self.real.zero()
        mat = [[zero, zero, one, zero], [zero, zero, zero, one]]
        return BSMorphism(self.cat, (s, s), (s,), -1, mat)

    def gen_i1(self, s: int) -> BSMorphism:
        """B_s B_s -> R of degree 0: f1 x f2 x f3 -> f1 d(f2) f3."""
        one, zero = self.real.one(), self.real.zero()
        return BSMorphism(self.cat, (s, s), (), 0, [[zero, zero, one, self.real.deltas[s]]])

    # -- adjunction -------------------------------------------------------------------

    def adjoint(self, phi: BSMorphism) -> BSMorphism:
        """Turn phi: B_s x M -> N into psi: M -> B_s x N,
        psi(m) = 1 x phi(1 x delta m) - s(delta) x phi(1 x m)."""
        if not phi.source:
            raise ShapeMismatch("source must start with a generator factor")
        s = phi.source[0]
        m_word = phi.source[1:]
        delta = self.real.deltas[s]
        sdelta = self.real.act((s,), delta)
        u_s = self.cat.u_elt((s,))
        su_s = u_s.left_mul(sdelta)
        target = (s,) + phi.target
        cols = []
        tgt_bits = self.cat.bits(len(target))
        zero = self.real.zero()
        for b in self.cat.bits(len(m_word)):
            mb = self.cat.basis_element(m_word, b)
            x1 = phi.apply(self.cat.tensor(u_s, mb.left_mul(delta)))
            x2 = phi.apply(self.cat.tensor(u_s, mb))
            col = self.cat.tensor(u_s, x1) - self.cat.tensor(su_s, x2)
            cols.append([col.coeffs.get(t, zero) for t in tgt_bits])
        mat = [[cols[j][i] for j in range(len(cols))] for i in range(len(tgt_bits))]
        return BSMorphism(self.cat, m_word, target, phi.degree, mat)

    def adjoint_inverse(self, psi: BSMorphism) -> BSMorphism:
        """Turn psi: M -> B_s x N back into phi: B_s x M -> N."""
        if not psi.target:
            raise ShapeMismatch("target must start with a generator factor")
        s = psi.target[0]
        n_word = psi.target[1:]
        step = self.tensor_hom(self.identity((s,)), psi)
        return self.compose(self.tensor_hom(self.gen_i1(s), self.identity(n_word)), step)

    # -- consistency checks ---------------------------------------------------------

    def right_mul_matrix(self, word, var: int):
        """Matrix of right multiplication by variable `var` on the left basis."""
        key = (tuple(word), var)
        got = self._rmul_mats.get(key)
        if got is None:
            word = tuple(word)
            v = MultiPoly.variable(self.real.field, self.real.nvars, var)
            allbits = self.cat.bits(len(word))
            zero = self.real.zero()
            cols = []
            for b in allbits:
                img = self.cat.right_mul(self.cat.basis_element(word, b), v)
                cols.append([img.coeffs.get(c, zero) for c in allbits])
            got = [[cols[j][i] for j in range(len(allbits))] for i in range(len(allbits))]
            self._rmul_mats[key] = got
        return got

    def right_linearity_check(self, phi: BSMorphism) -> bool:
        for var in range(self.real.nvars):
            rx = self.right_mul_matrix(phi.source, var)
            ry = self.right_mul_matrix(phi.target, var)
            left = _mat_mul_poly(phi.matrix, rx, self.real)
            right = _mat_mul_poly(ry, phi.matrix, self.real)
            if left != right:
                return False
        return True

    def homogeneity_check(self, phi: BSMorphism) -> bool:
        src_bits = self.cat.bits(len(phi.source))
        tgt_bits = self.cat.bits(len(phi.target))
        for i, bt in enumerate(tgt_bits):
            for j, bs in enumerate(src_bits):
                p = phi.matrix[i][j]
                if p.is_zero():
                    continue
                want = (
                    phi.degree
                    + self.cat.basis_degree(phi.source, bs)
                    - self.cat.basis_degree(phi.target, bt)
                )
                if not p.is_homogeneous() or p.homogeneous_graded_degree() != want:
                    return False
        return True

    def inverse_coords_columns(self, word):
        """Columns of the inverse coordinate matrix, as rational coefficient
        vectors indexed by basis bits, via the recursive block factorization."""
        word = tuple(word)
        got = self._inverse_coords.get(word)
        if got is None:
            from .polyring import RatPoly

            allbits = self.cat.bits(len(word))
            got = {}
            for e in allbits:
                one = RatPoly(self.real.one())
                gamma = {e: one}
                coeffs = self._unfold(word, gamma)
                got[e] = [coeffs.get(b) for b in allbits]
            self._inverse_coords[word] = got
        return got

    def _unfold(self, word, gamma):
        """Solve C_word . x = gamma with the block structure of C; gamma and
        the result are sparse dicts of rational functions over bit vectors."""
        from .polyring import RatPoly

        if not word:
            return dict(gamma)
        s = word[-1]
        act = self.real.action
        delta = self.real.deltas[s]
        sdelta = act.act_word((s,), delta)
        alpha = self.real.alphas[s]
        slice0, slice1 = {}, {}
        for e1 in self.cat.bits(len(word) - 1):
            g0 = gamma.get(e1 + (0,))
            g1 = gamma.get(e1 + (1,))
            if g0 is None and g1 is None:
                continue
            prefix = self.cat.endpoint(word[:-1], e1)
            td = RatPoly(act.twisted(prefix, delta))
            tsd = RatPoly(act.twisted(prefix, sdelta))
            det = RatPoly(-act.twisted(prefix, alpha))
            zero = RatPoly(self.real.zero())
            if g0 is None:
                g0 = zero
            if g1 is None:
                g1 = zero
            a = (tsd * g0 - td * g1) / det
            b = (g1 - g0) / det
            if a:
                slice0[e1] = a
            if b:
                slice1[e1] = b
        out = {}
        for bits, c in self._unfold(word[:-1], slice0).items():
            if c:
                out[bits + (0,)] = c
        for bits, c in self._unfold(word[:-1], slice1).items():
            if c:
                out[bits + (1,)] = c
        return out

    def stalk_check(self, phi: BSMorphism) -> bool:
        """The induced coordinate map sends each source block into the target
        block of the same group element."""
        x, y = phi.source, phi.target
        src_bits = self.cat.bits(len(x))
        tgt_bits = self.cat.bits(len(y))
        Cy = self.cat.coords_matrix(y)
        # D[f][b] = coordinate f of phi(m_b)
        D = []
        for f in tgt_bits:
            row = []
            for j in range(len(src_bits)):
                total = self.real.zero()
                for i, bt in enumerate(tgt_bits):
                    a = phi.matrix[i][j]
                    if a:
                        total = total + Cy[f][bt] * a
                row.append(total)
            D.append(row)
        inv_cols = self.inverse_coords_columns(x)
        from .polyring import RatPoly

        for e in src_bits:
            we = self.cat.endpoint(x, e)
            col = inv_cols[e]
            for fi, f in enumerate(tgt_bits):
                if self.cat.endpoint(y, f) == we:
                    continue
                total = None
                for j in range(len(src_bits)):
                    c = col[j]
                    if c is not None and D[fi][j]:
                        t = c * D[fi][j]
                        total = t if total is None else total + t
                if total is not None and not total.is_zero():
                    return False
        return True

    def validate(self, phi: BSMorphism) -> None:
        """Raise unless phi is homogeneous, right-linear and stalk-preserving."""
        if not self.homogeneity_check(phi):
            raise MorphismError(f"{phi!r} has entries of the wrong degree")
        if not self.right_linearity_check(phi):
            raise MorphismError(f"{phi!r} is not right R-linear")
        if not self.stalk_check(phi):
            raise MorphismError(f"{phi!r} does not preserve the decomposition")

    # -- braid morphisms ---------------------------------------------------------------

    def braid_words(self, s: int, t: int):
        m = self.real.matrix.m(s, t)
        if m == 0:
            raise MorphismError("braid morphism needs a finite order")
        x = tuple(s if k % 2 == 0 else t for k in range(m))
        y = tuple(t if k % 2 == 0 else s for k in range(m))
        return x, y

    def braid_morphism(self, s: int, t: int) -> BSMorphism:
        """A degree-zero morphism between the two reduced words of the longest
        dihedral element sending the all-ones generator to the all-ones
        generator.  Deterministic: first basic solution of the constraint
        system under the fixed unknown order."""
        key = (s, t)
        got = self._braid.get(key)
        if got is not None:
            return got
        x, y = self.braid_words(s, t)
        unk = _Unknowns(self.cat, x, y, 0)
        rows, rhs = self._generator_condition_rows(unk)
        rl_rows = self._right_linearity_rows(unk)
        rows += rl_rows
        rhs += [self.real.field.zero] * len(rl_rows)
        sol = solve_affine(self.real.field, unk.count, rows, rhs)
        phi = None
        if sol is not None:
            phi = BSMorphism(self.cat, x, y, 0, unk.build(sol))
            if not self.stalk_check(phi):
                phi = None
        if phi is None:
            st_rows = self._stalk_rows(unk)
            rows += st_rows
            rhs += [self.real.field.zero] * len(st_rows)
            sol = solve_affine(self.real.field, unk.count, rows, rhs)
            if sol is None:
                raise NoSolutionError(
                    f"no braid morphism for ({self.real.matrix.names[s]},"
                    f"{self.real.matrix.names[t]}): the realization violates the assumption"
                )
            phi = BSMorphism(self.cat, x, y, 0, unk.build(sol))
            if not self.stalk_check(phi):
                raise NoSolutionError("braid solution fails stalk preservation")
        self._braid[key] = phi
        return phi

    def _generator_condition_rows(self, unk: _Unknowns):
        """u |-> u: the all-ones-generator column is the unit column."""
        rows, rhs = [], []
        field = self.real.field
        j0 = 0  # the zero bit vector is first in the lex order
        for i in range(len(unk.tgt_bits)):
            entry = unk.terms[(i, j0)]
            for mono, idx in entry:
                rows.append({idx: field.one})
                rhs.append(field.one if (i == 0 and not any(mono)) else field.zero)
        return rows, rhs

    def _right_linearity_rows(self, unk: _Unknowns):
        rows = []
        nsrc, ntgt = len(unk.src_bits), len(unk.tgt_bits)
        for var in range(self.real.nvars):
            rx = self.right_mul_matrix(unk.source, var)
            ry = self.right_mul_matrix(unk.target, var)
            for i in range(ntgt):
                for j in range(nsrc):
                    sym: dict = {}
                    for c in range(nsrc):
                        p = rx[c][j]
                        if p:
                            _accumulate(sym, p, unk.terms[(i, c)], 1)
                    for c in range(ntgt):
                        p = ry[i][c]
                        if p:
                            _accumulate(sym, p, unk.terms[(c, j)], -1)
                    rows.extend(lin for lin in sym.values() if lin)
        return rows

    def _stalk_rows(self, unk: _Unknowns):
        """Linear rows expressing that banned coordinate-block entries vanish:
        (C_y . A . adj(C_x))[f][e] = 0 whenever the endpoints differ."""
        x, y = unk.source, unk.target
        src_bits, tgt_bits = unk.src_bits, unk.tgt_bits
        Cy = self.cat.coords_matrix(y)
        adj = self.adjugate(x)
        rows = []
        for e_i, e in enumerate(src_bits):
            we = self.cat.endpoint(x, e)
            for f in tgt_bits:
                if self.cat.endpoint(y, f) == we:
                    continue
                sym: dict = {}
                for bt_i, bt in enumerate(tgt_bits):
                    for bs_i, bs in enumerate(src_bits):
                        entry = unk.terms[(bt_i, bs_i)]
                        if not entry:
                            continue
                        p = Cy[f][bt] * adj[bs_i][e_i]
                        if p:
                            _accumulate(sym, p, entry, 1)
                rows.extend(lin for lin in sym.values() if lin)
        return rows

    def adjugate(self, word):
        """adj(C) with C . adj(C) = det(C) I, cached per word."""
        word = tuple(word)
        got = self._adjugate.get(word)
        if got is None:
            allbits = self.cat.bits(len(word))
            C = self.cat.coords_matrix(word)
            A = [[C[e][b] for b in allbits] for e in allbits]
            det = bareiss_det(A)
            n = len(allbits)
            zero = self.real.zero()
            rhs = [[det if i == j else zero for i in range(n)] for j in range(n)]
            sols = solve_many(A, rhs)
            got = [[None] * n for _ in range(n)]
            for j, sol in enumerate(sols):
                col = sol.polynomial_solution
                if col is None:
                    raise MorphismError("adjugate entries must be polynomial")
                for i in range(n):
                    got[i][j] = col[i]
            self._adjugate[word] = got
        return got

    # -- rex composites -------------------------------------------------------------

    def rex_morphism(self, x, y) -> BSMorphism:
        """Composite of braid morphisms along the fixed rex-graph path."""
        x, y = tuple(x), tuple(y)
        phi = self.identity(x)
        cur = x
        for move in coxeter.rex_path(self.real.matrix, x, y):
            a, b = move.old[0], move.old[1]
            braid = self.braid_morphism(a, b)
            step = self.tensor_hom(
                self.identity(cur[: move.pos]),
                self.tensor_hom(braid, self.identity(cur[move.pos + len(move.old):])),
            )
            phi = self.compose(step, phi)
            cur = cur[: move.pos] + move.new + cur[move.pos + len(move.old):]
        return phi

    # -- light leaves ------------------------------------------------------------------

    def light_leaf(self, word, e) -> BSMorphism:
        """The light leaf B_word -> B_{w-word}, w the endpoint of e; degree is
        the defect of e."""
        word, e = tuple(word), tuple(e)
        key = (word, e)
        got = self._light_leaves.get(key)
        if got is not None:
            return got
        mat = self.real.matrix
        ll = self.identity(())
        w = Element(mat, ())
        for k, s in enumerate(word):
            ws = coxeter.mult_gen(w, s)
            up = ws.length > w.length
            ll = self.tensor_hom(ll, self.identity((s,)))
            if up and e[k] == 0:
                step = self.tensor_hom(self.identity(w.word), self.gen_m(s))
            elif up and e[k] == 1:
                step = self.rex_morphism(w.word + (s,), ws.word)
                w = ws
            else:
                # a reduced word of w ending with s, ShortLex-minimal such
                tword = ws.word + (s,)
                r1 = self.tensor_hom(self.rex_morphism(w.word, tword), self.identity((s,)))
                if e[k] == 0:
                    inner = self.tensor_hom(self.identity(ws.word), self.gen_i0(s))
                    step = self.compose(self.rex_morphism(tword, w.word), self.compose(inner, r1))
                else:
                    inner = self.tensor_hom(self.identity(ws.word), self.gen_i1(s))
                    step = self.compose(inner, r1)
                    w = ws
            ll = self.compose(step, ll)
        self._light_leaves[key] = ll
        return ll

    # -- duality ------------------------------------------------------------------------

    def gram(self, word):
        """Gram matrix of the duality pairing on the right monomial basis."""
        word = tuple(word)
        got = self._gram.get(word)
        if got is None:
            if not word:
                got = [[self.real.one()]]
            else:
                s = word[0]
                inner = word[1:]
                G1 = self.gram(inner)
                n1 = len(G1)
                h = self.real.deltas[s] + self.real.act((s,), self.real.deltas[s])
                # X[b'][c'] = <m'_{b'}, h m'_{c'}>: expand h m'_{c'} over the
                # right basis and contract with G1 by right bilinearity
                rho_cols = [
                    self._hmul_right_vec(inner, c, h) for c in self.cat.bits(len(inner))
                ]
                X = []
                for bi in range(n1):
                    row = []
                    for ci in range(n1):
                        total = self.real.zero()
                        for k in range(n1):
                            coeff = rho_cols[ci][k]
                            if coeff:
                                total = total + G1[bi][k] * coeff
                        row.append(total)
                    X.append(row)
                zero = self.real.zero()
                got = [[zero for _ in range(2 * n1)] for _ in range(2 * n1)]
                for i in range(n1):
                    for j in range(n1):
                        got[i][n1 + j] = G1[i][j]
                        got[n1 + i][j] = G1[i][j]
                        got[n1 + i][n1 + j] = X[i][j]
            self._gram[word] = got
        return got

    def _hmul_right_vec(self, word, c, h):
        """Right coefficient vector of h . (d_1 x ... x d_l x 1) over the
        right basis of the word."""
        if not word:
            return [h]
        factors = self.cat.basis_factors(word, c)[1:] + [self.real.one()]
        factors[0] = h * factors[0]
        exp = self.cat.expand_right(word, factors)
        return [exp.get(b, self.real.zero()) for b in self.cat.bits(len(word))]

    def gram_inv(self, word):
        word = tuple(word)
        got = self._gram_inv.get(word)
        if got is None:
            if not word:
                got = [[self.real.one()]]
            else:
                G = self.gram(word)
                n1 = len(G) // 2
                Binv = self.gram_inv(word[1:])
                X = [[G[n1 + i][n1 + j] for j in range(n1)] for i in range(n1)]
                BXB = _mat_mul_poly(Binv, _mat_mul_poly(X, Binv, self.real), self.real)
                zero = self.real.zero()
                got = [[zero for _ in range(2 * n1)] for _ in range(2 * n1)]
                for i in range(n1):
                    for j in range(n1):
                        got[i][j] = -BXB[i][j]
                        got[i][n1 + j] = Binv[i][j]
                        got[n1 + i][j] = Binv[i][j]
            self._gram_inv[word] = got
        return got

    def _left_to_right(self, word, coeffs: dict):
        """Convert a left coefficient dict to the right coefficient vector."""
        word = tuple(word)
        allbits = self.cat.bits(len(word))
        acc: dict = {}
        for b, c in coeffs.items():
            factors = [c] + self.cat.basis_factors(word, b)[1:]
            for bits, q in self.cat.expand_right(word, factors).items():
                s = acc.get(bits)
                s = q if s is None else s + q
                if s:
                    acc[bits] = s
                else:
                    del acc[bits]
        return [acc.get(b, self.real.zero()) for b in allbits]

    def _right_to_left(self, word, vec):
        """Convert a right coefficient vector to the left coefficient dict."""
        word = tuple(word)
        allbits = self.cat.bits(len(word))
        acc: dict = {}
        for b, r in zip(allbits, vec):
            if not r:
                continue
            factors = self.cat.basis_factors(word, b)[1:] + [r]
            for bits, q in self.cat.expand_left(word, factors).items():
                s = acc.get(bits)
                s = q if s is None else s + q
                if s:
                    acc[bits] = s
                else:
                    del acc[bits]
        return acc

    def dualize(self, phi: BSMorphism) -> BSMorphism:
        """The dual morphism B_y -> B_x of the same degree, computed through
        the right-basis Gram matrices."""
        x, y = phi.source, phi.target
        src_bits = self.cat.bits(len(x))
        # right-basis matrix of phi, column per right basis element of x
        At = []
        for c in src_bits:
            factors = self.cat.basis_factors(x, c)[1:] + [self.real.one()]
            left_vec = self.cat.expand_left(x, factors)
            img = phi.apply(bim.BSElement(self.cat, x, left_vec))
            At.append(self._left_to_right(y, img.coeffs))
        # At[c] is the column over the right basis of y: build A~ = cols
        n_y = 1 << len(y)
        n_x = 1 << len(x)
        Atil = [[At[j][i] for j in range(n_x)] for i in range(n_y)]
        Gx_inv = self.gram_inv(x)
        Gy = self.gram(y)
        AtilT = [[Atil[i][j] for i in range(n_y)] for j in range(n_x)]
        dual_right = _mat_mul_poly(Gx_inv, _mat_mul_poly(AtilT, Gy, self.real), self.real)
        # convert the right-basis matrix of the dual into the left-basis form
        tgt_bits = self.cat.bits(len(y))
        cols = []
        for b in tgt_bits:
            tvec = self._left_to_right(y, {b: self.real.one()})
            rvec = [
                sum(
                    (dual_right[i][k] * tvec[k] for k in range(n_y) if tvec[k]),
                    self.real.zero(),
                )
                for i in range(n_x)
            ]
            cols.append(self._right_to_left(x, rvec))
        allx = self.cat.bits(len(x))
        zero = self.real.zero()
        mat = [[cols[j].get(bx, zero) for j in range(len(tgt_bits))] for bx in allx]
        return BSMorphism(self.cat, y, x, phi.degree, mat)

    def dual_light_leaf(self, word, e) -> BSMorphism:
        key = (tuple(word), tuple(e))
        got = self._dual_light_leaves.get(key)
        if got is None:
            got = self.dualize(self.light_leaf(word, e))
            self._dual_light_leaves[key] = got
        return got

    def double_leaf(self, x, y, e, f) -> BSMorphism:
        """The composite dual-light-leaf after light-leaf through the common
        endpoint; degree is the sum of the defects."""
        x, y, e, f = tuple(x), tuple(y), tuple(e), tuple(f)
        mat = self.real.matrix
        we = coxeter.subword_endpoint(mat, x, e)
        wf = coxeter.subword_endpoint(mat, y, f)
        if we != wf:
            raise EndpointMismatch(f"{we!r} != {wf!r}")
        return self.compose(self.dual_light_leaf(y, f), self.light_leaf(x, e))

    # -- hom spaces ------------------------------------------------------------------

    def hom_space(self, x, y, dmax: int) -> HomSpaceBasis:
        """Per-degree bases of stalk-preserving right-linear morphism spaces
        up to degree dmax, checked against the graded-rank formula."""
        x, y = tuple(x), tuple(y)
        rank = hecke.hom_rank_formula(self.real.matrix, x, y)
        degrees = {}
        for d in range(-(len(x) + len(y)), dmax + 1):
            unk = _Unknowns(self.cat, x, y, d)
            expected = _expected_dim(self.real.nvars, rank, d)
            if unk.count == 0:
                if expected != 0:
                    raise MorphismError(f"degree {d}: expected dim {expected}, no unknowns")
                continue
            rows = self._right_linearity_rows(unk) + self._stalk_rows(unk)
            basis = nullspace_basis(self.real.field, unk.count, rows)
            if len(basis) != expected:
                raise MorphismError(
                    f"degree {d} between {x} and {y}: dimension {len(basis)}"
                    f" != expected {expected}"
                )
            degrees[d] = [BSMorphism(self.cat, x, y, d, unk.build(v)) for v in basis]
        return HomSpaceBasis(x, y, degrees, rank, dmax)

    def double_leaf_check(self, x, y, dmax: int) -> bool:
        """Double leaves are independent members spanning each degree <= dmax:
        counting monomial multiples of double leaves degree by degree matches
        the solved dimensions, and the flattened vectors are independent."""
        from .polyring import FieldRREF

        x, y = tuple(x), tuple(y)
        mat = self.real.matrix
        space = self.hom_space(x, y, dmax)
        leaves = []
        for e in self.cat.bits(len(x)):
            we = self.cat.endpoint(x, e)
            for f in self.cat.bits(len(y)):
                if self.cat.endpoint(y, f) != we:
                    continue
                dll = self.double_leaf(x, y, e, f)
                leaves.append(dll)
        for d in range(-(len(x) + len(y)), dmax + 1):
            unk = _Unknowns(self.cat, x, y, d)
            if unk.count == 0:
                continue
            rref = FieldRREF(self.real.field, unk.count)
            count = 0
            for dll in leaves:
                k = d - dll.degree
                if k < 0 or k % 2:
                    continue
                for mono in monomials_of_degree(self.real.nvars, k // 2):
                    mpoly = MultiPoly(self.real.field, self.real.nvars,
                                      {mono: self.real.field.one})
                    scaled = BSMorphism(
                        self.cat, x, y, d,
                        [[mpoly * p for p in row] for row in dll.matrix],
                    )
                    vec = unk.flatten(scaled)
                    if not rref.add_row(vec):
                        return False  # dependent multiples
                    count += 1
            if count != space.dimension(d):
                return False
        return True

    # -- triangularity and filtrations ---------------------------------------------------

    def triangularity_report(self, word, w: Element) -> TriangularityReport:
        """Evaluate light leaves on the U/D monomials with endpoint w: the
        diagonal must be the generator of B_{w-word} and the strict lower
        triangle zero; above-diagonal values are recorded unconstrained."""
        word = tuple(word)
        lss = coxeter.subsequences_with_endpoint(self.real.matrix, word, w)
        if not lss:
            raise MorphismError(f"{w!r} is not an endpoint over {word}")
        belts = [self.cat.b_elt(word, ls.bits) for ls in lss]
        leaves = [self.light_leaf(word, ls.bits) for ls in lss]
        u = self.cat.u_elt(w.word)
        table = [[leaves[i].apply(belts[j]) for j in range(len(lss))] for i in range(len(lss))]
        diag_ok = all(table[i][i] == u for i in range(len(lss)))
        lower_ok = all(
            table[i][j].is_zero() for i in range(len(lss)) for j in range(i)
        )
        report = TriangularityReport(
            word, w, [ls.bits for ls in lss], table, diag_ok, lower_ok
        )
        if not report.ok:
            raise TriangularityFailure(
                f"triangularity fails over {word} at {w!r}:"
                f" diag={diag_ok} lower={lower_ok}"
            )
        return report

    def projectivity_check(self, word, w: Element) -> bool:
        """The composites of the stalk character with the light leaves give a
        unitriangular, hence invertible, matrix against the U/D monomials;
        this exhibits preimages for a basis of the stalk hom space."""
        report = self.triangularity_report(word, w)
        n = len(report.bits_order)
        ones = (1,) * w.length
        T = [[report.table[i][j].coord(ones) for j in range(n)] for i in range(n)]
        one = self.real.one()
        for i in range(n):
            if T[i][i] != one:
                return False
            for j in range(i):
                if T[i][j]:
                    return False
        return True

    def filtration_elements(self, word, w: Element) -> list[bim.BSElement]:
        """Images of the generator of B_{w-word} under the dualized light
        leaves, one per subsequence with endpoint w (total-order sorted)."""
        word = tuple(word)
        lss = coxeter.subsequences_with_endpoint(self.real.matrix, word, w)
        u = self.cat.u_elt(w.word)
        return [self.dual_light_leaf(word, ls.bits).apply(u) for ls in lss]

    def section_basis_check(self, word, I, w: Element) -> GradedRank:
        return bim.section_basis_check(
            self.cat, word, I, w, self.filtration_elements(word, w)
        )

    def alpha_product_check(self, word, w: Element) -> bool:
        return bim.alpha_product_check(
            self.cat, word, w, self.filtration_elements(word, w)
        )


# ---------------------------------------------------------------------------
# helpers


def _mat_mul_poly(a, b, real):
    n, k, m = len(a), len(b), len(b[0])
    zero = real.zero()
    out = [[zero for _ in range(m)] for _ in range(n)]
    for i in range(n):
        for t in range(k):
            if a[i][t]:
                for j in range(m):
                    if b[t][j]:
                        out[i][j] = out[i][j] + a[i][t] * b[t][j]
    return out


def _accumulate(sym: dict, poly: MultiPoly, entry, sign: int):
    """Accumulate poly * (unknown entry) into sym: {monomial: {unknown: coeff}}."""
    for mono_u, idx in entry:
        for mono_p, c in poly.terms.items():
            key = tuple(a + b for a, b in zip(mono_p, mono_u))
            lin = sym.setdefault(key, {})
            s = lin.get(idx)
            s = (c if sign > 0 else -c) if s is None else (s + c if sign > 0 else s - c)
            if s:
                lin[idx] = s
            else:
                del lin[idx]


def _expected_dim(nvars: int, rank, d: int) -> int:
    """Scalar dimension of the degree-d part of a graded free module with the
    given graded rank: sum over basis degrees d_j of dim R_{d - d_j}."""
    total = 0
    for n, a in rank.coeffs.items():
        k = d + n  # basis morphism degree d_j = -n
        if k >= 0 and k % 2 == 0:
            total += a * len(monomials_of_degree(nvars, k // 2))
    return total

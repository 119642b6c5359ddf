"""Exact multivariate polynomials R = S(V) with a Coxeter group action.

A polynomial is a dict {exponent tuple: coefficient} over Q or F_p with no
zero terms; each variable has graded degree 2.  The term order is
lexicographic on exponent tuples.  The module also provides:

* the W-action by per-generator linear substitutions s(v) = v - <a^, v> a,
* Demazure operators d_s(f) = (f - s(f)) / a_s with certified exact division,
* the splitting f = a + delta_s * b with a, b s-invariant,
* fraction-free (Bareiss) Gaussian elimination over R with back substitution
  in the fraction field and a polynomiality certificate,
* sparse reduced row echelon over the scalar field, used by the morphism
  solvers.
"""

from __future__ import annotations


class PolyError(ArithmeticError):
    pass


class DivisionFailure(PolyError):
    pass


class NoSolutionError(PolyError):
    pass


class MultiPoly:
    __slots__ = ("field", "nvars", "terms")

    def __init__(self, field, nvars: int, terms=None):
        self.field = field
        self.nvars = nvars
        t = {}
        if terms:
            for e, c in terms.items():
                if c:
                    t[tuple(e)] = c
        self.terms = t

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero(field, nvars: int) -> "MultiPoly":
        return MultiPoly(field, nvars)

    @staticmethod
    def const(field, nvars: int, c) -> "MultiPoly":
        if isinstance(c, int):
            c = field.of_int(c)
        zero_exp = (0,) * nvars
        return MultiPoly(field, nvars, {zero_exp: c})

    @staticmethod
    def one(field, nvars: int) -> "MultiPoly":
        return MultiPoly.const(field, nvars, 1)

    @staticmethod
    def variable(field, nvars: int, i: int) -> "MultiPoly":
        e = tuple(1 if j == i else 0 for j in range(nvars))
        return MultiPoly(field, nvars, {e: field.one})

    @staticmethod
    def linear(field, coords) -> "MultiPoly":
        """The degree-one polynomial with the given coordinate vector."""
        n = len(coords)
        t = {}
        for i, c in enumerate(coords):
            if isinstance(c, int):
                c = field.of_int(c)
            if c:
                t[tuple(1 if j == i else 0 for j in range(n))] = c
        return MultiPoly(field, n, t)

    # -- queries -------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or set(self.terms) == {(0,) * self.nvars}

    def constant_coeff(self):
        return self.terms.get((0,) * self.nvars, self.field.zero)

    def poly_degree(self):
        """Total degree in the variables, or None for the zero polynomial."""
        if not self.terms:
            return None
        return max(sum(e) for e in self.terms)

    def homogeneous_graded_degree(self):
        """2 * total degree if homogeneous; None for zero; raises otherwise."""
        if not self.terms:
            return None
        degs = {sum(e) for e in self.terms}
        if len(degs) != 1:
            raise PolyError(f"not homogeneous: {self}")
        return 2 * degs.pop()

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def linear_coords(self):
        """Coordinate vector of a degree <= 1 polynomial with no constant term."""
        coords = [self.field.zero] * self.nvars
        for e, c in self.terms.items():
            if sum(e) != 1:
                raise PolyError(f"not a linear form: {self}")
            coords[e.index(1)] = c
        return coords

    # -- arithmetic ------------------------------------------------------------

    def _check(self, other: "MultiPoly"):
        if other.field != self.field or other.nvars != self.nvars:
            raise PolyError("polynomials over different rings")

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            s = t.get(e)
            s = c if s is None else s + c
            if s:
                t[e] = s
            else:
                t.pop(e, None)
        return MultiPoly(self.field, self.nvars, t)

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.field, self.nvars, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        self._check(other)
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = t.get(e)
                s = c1 * c2 if s is None else s + c1 * c2
                if s:
                    t[e] = s
                else:
                    del t[e]
        return MultiPoly(self.field, self.nvars, t)

    def scale(self, c) -> "MultiPoly":
        if isinstance(c, int):
            c = self.field.of_int(c)
        if not c:
            return MultiPoly.zero(self.field, self.nvars)
        return MultiPoly(self.field, self.nvars, {e: a * c for e, a in self.terms.items()})

    def __pow__(self, n: int) -> "MultiPoly":
        out = MultiPoly.one(self.field, self.nvars)
        for _ in range(n):
            out = out * self
        return out

    # -- division ----------------------------------------------------------------

    def leading(self):
        e = max(self.terms)
        return e, self.terms[e]

    def divmod(self, g: "MultiPoly"):
        """Division with remainder by a single divisor, lex leading terms."""
        self._check(g)
        if g.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        ge, gc = g.leading()
        q = MultiPoly.zero(self.field, self.nvars)
        r = MultiPoly.zero(self.field, self.nvars)
        f = self
        while f.terms:
            fe, fc = f.leading()
            diff = tuple(a - b for a, b in zip(fe, ge))
            if all(d >= 0 for d in diff):
                t = MultiPoly(self.field, self.nvars, {diff: fc / gc})
                q = q + t
                f = f - t * g
            else:
                t = MultiPoly(self.field, self.nvars, {fe: fc})
                r = r + t
                f = f - t
        return q, r

    def try_div(self, g: "MultiPoly"):
        """Exact quotient self/g, or None when g does not divide self."""
        q, r = self.divmod(g)
        return None if r else q

    def exact_div(self, g: "MultiPoly") -> "MultiPoly":
        q = self.try_div(g)
        if q is None:
            raise DivisionFailure(f"({self}) is not divisible by ({g})")
        return q

    def divisible_by(self, g: "MultiPoly") -> bool:
        return self.try_div(g) is not None

    # -- substitution ----------------------------------------------------------

    def substitute(self, images: list["MultiPoly"]) -> "MultiPoly":
        """Ring map sending variable i to images[i]."""
        out = MultiPoly.zero(self.field, self.nvars)
        powers: dict[tuple[int, int], MultiPoly] = {}

        def power(i, k):
            key = (i, k)
            got = powers.get(key)
            if got is None:
                got = images[i] ** k
                powers[key] = got
            return got

        for e, c in self.terms.items():
            term = MultiPoly.const(self.field, self.nvars, c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            out = out + term
        return out

    # -- comparison / display -----------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, MultiPoly)
            and other.field == self.field
            and other.nvars == self.nvars
            and other.terms == self.terms
        )

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        return str(self)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                f"x{i}" if k == 1 else f"x{i}^{k}" for i, k in enumerate(e) if k
            )
            cs = str(c)
            if mono:
                if cs == "1":
                    parts.append(mono)
                elif cs == "-1":
                    parts.append(f"-{mono}")
                else:
                    parts.append(f"{cs}*{mono}")
            else:
                parts.append(cs)
        out = parts[0]
        for t in parts[1:]:
            out += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
        return out


def monomials_of_degree(nvars: int, d: int) -> list[tuple[int, ...]]:
    """All exponent tuples of total degree d, in descending lex order."""
    if d < 0:
        return []
    if nvars == 0:
        return [()] if d == 0 else []
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for k in range(remaining, -1, -1):
            rec(prefix + (k,), remaining - k, slots - 1)

    rec((), d, nvars)
    return out


def random_poly(rng, field, nvars: int, max_poly_degree: int) -> MultiPoly:
    """A random polynomial with small integer coefficients (for property suites)."""
    t = {}
    for d in range(max_poly_degree + 1):
        for e in monomials_of_degree(nvars, d):
            if rng.random() < 0.4:
                c = field.of_int(rng.randint(-4, 4))
                if c:
                    t[e] = c
    return MultiPoly(field, nvars, t)


# ---------------------------------------------------------------------------
# the W-action


class WAction:
    """Per-generator reflection matrices acting on R by substitution."""

    def __init__(self, coxmatrix, field, nvars, alpha, coroot, delta=None):
        self.coxmatrix = coxmatrix
        self.field = field
        self.nvars = nvars
        self.alpha_coords = [
            [c if not isinstance(c, int) else field.of_int(c) for c in v] for v in alpha
        ]
        self.coroot_coords = [
            [c if not isinstance(c, int) else field.of_int(c) for c in v] for v in coroot
        ]
        if delta is None:
            if field.characteristic == 2:
                raise PolyError("delta_s must be supplied in characteristic 2")
            half = field.one / field.of_int(2)
            delta = [[c * half for c in v] for v in self.alpha_coords]
        self.delta_coords = [
            [c if not isinstance(c, int) else field.of_int(c) for c in v] for v in delta
        ]
        self.alphas = [MultiPoly.linear(field, v) for v in self.alpha_coords]
        self.deltas = [MultiPoly.linear(field, v) for v in self.delta_coords]
        # s(e_j) = e_j - <coroot_s, e_j> alpha_s; mats[s][i][j] is the i-th
        # coordinate of the image of basis vector j
        self.mats = []
        for s in range(coxmatrix.rank):
            a, av = self.alpha_coords[s], self.coroot_coords[s]
            m = [
                [
                    (field.one if i == j else field.zero) - av[j] * a[i]
                    for j in range(nvars)
                ]
                for i in range(nvars)
            ]
            self.mats.append(tuple(tuple(row) for row in m))
        self._gen_images = [
            [
                MultiPoly.linear(field, [self.mats[s][i][j] for i in range(nvars)])
                for j in range(nvars)
            ]
            for s in range(coxmatrix.rank)
        ]
        self._twist_cache: dict = {}

    # -- vector-level action ----------------------------------------------------

    def mat_of_word(self, word):
        """The matrix of s_1 ... s_l acting on V."""
        n = self.nvars
        m = [[self.field.one if i == j else self.field.zero for j in range(n)] for i in range(n)]
        for s in word:
            g = self.mats[s]
            m = [
                [
                    sum((m[i][k] * g[k][j] for k in range(n)), self.field.zero)
                    for j in range(n)
                ]
                for i in range(n)
            ]
        return m

    def act_vec(self, word, vec):
        """Apply s_1 ... s_l to a coordinate vector of V."""
        v = list(vec)
        for s in reversed(tuple(word)):
            g = self.mats[s]
            v = [
                sum((g[i][j] * v[j] for j in range(self.nvars)), self.field.zero)
                for i in range(self.nvars)
            ]
        return v

    def act_covec(self, word, covec):
        """Apply s_1 ... s_l to a functional: <w(phi), v> = <phi, w^{-1} v>."""
        phi = list(covec)
        for s in reversed(tuple(word)):
            g = self.mats[s]
            phi = [
                sum((phi[i] * g[i][j] for i in range(self.nvars)), self.field.zero)
                for j in range(self.nvars)
            ]
        return phi

    def pair(self, covec, vec):
        return sum((a * b for a, b in zip(covec, vec)), self.field.zero)

    # -- polynomial-level action -----------------------------------------------

    def act_gen(self, s: int, f: MultiPoly) -> MultiPoly:
        return f.substitute(self._gen_images[s])

    def act_word(self, word, f: MultiPoly) -> MultiPoly:
        for s in reversed(tuple(word)):
            f = self.act_gen(s, f)
        return f

    def act(self, w, f: MultiPoly) -> MultiPoly:
        """Apply an Element or a raw word to a polynomial."""
        word = w.word if hasattr(w, "word") else tuple(w)
        return self.act_word(word, f)

    def twisted(self, w, f: MultiPoly) -> MultiPoly:
        """act(w, f) cached by (canonical word, f); w must be an Element."""
        key = (w.word, f)
        got = self._twist_cache.get(key)
        if got is None:
            got = self.act_word(w.word, f)
            self._twist_cache[key] = got
        return got

    # -- Demazure operator and the delta splitting --------------------------------

    def demazure(self, s: int, f: MultiPoly) -> MultiPoly:
        """(f - s(f)) / alpha_s; division is exact for a valid realization."""
        return (f - self.act_gen(s, f)).exact_div(self.alphas[s])

    def delta_split(self, s: int, f: MultiPoly):
        """Write f = a + delta_s * b with s(a) = a and s(b) = b."""
        b = self.demazure(s, f)
        a = f - self.deltas[s] * b
        return a, b


# ---------------------------------------------------------------------------
# rational functions as num/den pairs (no gcd; opportunistic exact division)


class RatPoly:
    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None):
        if den is None:
            den = MultiPoly.one(num.field, num.nvars)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            den = MultiPoly.one(num.field, num.nvars)
        elif den.is_constant():
            num = num.scale(num.field.one / den.constant_coeff())
            den = MultiPoly.one(num.field, num.nvars)
        else:
            q = num.try_div(den)
            if q is not None:
                num, den = q, MultiPoly.one(num.field, num.nvars)
        self.num = num
        self.den = den

    @staticmethod
    def of(p: MultiPoly) -> "RatPoly":
        return RatPoly(p)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return bool(self.num)

    def __add__(self, other: "RatPoly") -> "RatPoly":
        if self.den == other.den:
            return RatPoly(self.num + other.num, self.den)
        return RatPoly(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "RatPoly") -> "RatPoly":
        return self + (-other)

    def __neg__(self) -> "RatPoly":
        return RatPoly(-self.num, self.den)

    def __mul__(self, other) -> "RatPoly":
        if isinstance(other, MultiPoly):
            other = RatPoly(other)
        return RatPoly(self.num * other.num, self.den * other.den)

    def __truediv__(self, other) -> "RatPoly":
        if isinstance(other, MultiPoly):
            other = RatPoly(other)
        return RatPoly(self.num * other.den, self.den * other.num)

    def __eq__(self, other):
        if not isinstance(other, RatPoly):
            return NotImplemented
        return (self.num * other.den) == (other.num * self.den)

    def __hash__(self):
        raise TypeError("RatPoly is unhashable")

    def as_polynomial(self) -> MultiPoly | None:
        if self.den.is_constant():
            return self.num.scale(self.num.field.one / self.den.constant_coeff())
        return self.num.try_div(self.den)

    def __repr__(self):
        if self.den.is_constant() and self.den.constant_coeff() == self.num.field.one:
            return f"({self.num})"
        return f"({self.num})/({self.den})"


# ---------------------------------------------------------------------------
# fraction-free linear algebra over R


class LinearSolution:
    """Result of solving A x = b over Frac(R) by fraction-free elimination."""

    __slots__ = ("rank", "pivots", "solution", "is_polynomial", "polynomial_solution")

    def __init__(self, rank, pivots, solution):
        self.rank = rank
        self.pivots = pivots
        self.solution = solution
        polys = [x.as_polynomial() for x in solution]
        self.is_polynomial = all(p is not None for p in polys)
        self.polynomial_solution = polys if self.is_polynomial else None


def _bareiss_forward(M, nrows, ncols_total):
    """In-place fraction-free elimination; returns (pivot columns, row order used)."""
    pivots = []
    piv = 0
    prev = None
    for c in range(ncols_total):
        if piv >= nrows:
            break
        r = next((i for i in range(piv, nrows) if M[i][c]), None)
        if r is None:
            continue
        if r != piv:
            M[piv], M[r] = M[r], M[piv]
        for i in range(piv + 1, nrows):
            for j in range(c + 1, ncols_total):
                t = M[piv][c] * M[i][j] - M[i][c] * M[piv][j]
                M[i][j] = t if prev is None else t.exact_div(prev)
            M[i][c] = MultiPoly.zero(M[i][c].field, M[i][c].nvars)
        prev = M[piv][c]
        pivots.append(c)
        piv += 1
    return pivots


def solve_over_fraction_field(A, b) -> LinearSolution:
    """Solve A x = b exactly; free variables are set to zero.

    A is a list of rows of MultiPoly, b a list of MultiPoly.  Raises
    NoSolutionError when the system is inconsistent.
    """
    sols = solve_many(A, [b])
    return sols[0]


def solve_many(A, bs) -> list[LinearSolution]:
    """Solve A x = b for several right-hand sides with one elimination."""
    nrows = len(A)
    if nrows == 0 or len(A[0]) == 0:
        raise PolyError("empty coefficient matrix")
    ncols = len(A[0])
    field, nvars = A[0][0].field, A[0][0].nvars
    nb = len(bs)
    if any(len(b) != nrows for b in bs):
        raise PolyError("right-hand side of wrong length")
    M = [list(A[i]) + [bs[k][i] for k in range(nb)] for i in range(nrows)]
    pivots_all = _bareiss_forward(M, nrows, ncols + nb)
    pivots = [c for c in pivots_all if c < ncols]
    rank = len(pivots)
    if len(pivots_all) > rank:
        raise NoSolutionError("inconsistent linear system")
    out = []
    zero = RatPoly(MultiPoly.zero(field, nvars))
    for k in range(nb):
        x: list[RatPoly] = [zero for _ in range(ncols)]
        for r in range(rank - 1, -1, -1):
            c = pivots[r]
            acc = RatPoly(M[r][ncols + k])
            for j in range(c + 1, ncols):
                if M[r][j] and x[j]:
                    acc = acc - x[j] * M[r][j]
            x[c] = acc / RatPoly(M[r][c])
        out.append(LinearSolution(rank, pivots, x))
    return out


def bareiss_det(A) -> MultiPoly:
    """Determinant of a square polynomial matrix by fraction-free elimination."""
    n = len(A)
    if n == 0:
        raise PolyError("empty matrix")
    field, nvars = A[0][0].field, A[0][0].nvars
    if n != len(A[0]):
        raise PolyError("determinant of a non-square matrix")
    M = [list(row) for row in A]
    sign = 1
    prev = None
    for c in range(n):
        r = next((i for i in range(c, n) if M[i][c]), None)
        if r is None:
            return MultiPoly.zero(field, nvars)
        if r != c:
            M[c], M[r] = M[r], M[c]
            sign = -sign
        for i in range(c + 1, n):
            for j in range(c + 1, n):
                t = M[c][c] * M[i][j] - M[i][c] * M[c][j]
                M[i][j] = t if prev is None else t.exact_div(prev)
            M[i][c] = MultiPoly.zero(field, nvars)
        prev = M[c][c]
    return M[n - 1][n - 1] if sign == 1 else -M[n - 1][n - 1]


def rank_over_fraction_field(A) -> int:
    nrows = len(A)
    if nrows == 0:
        return 0
    M = [list(row) for row in A]
    return len(_bareiss_forward(M, nrows, len(A[0])))


# ---------------------------------------------------------------------------
# sparse reduced row echelon over the scalar field


class FieldRREF:
    """Incremental RREF with sparse dict rows over an exact field."""

    def __init__(self, field, ncols: int):
        self.field = field
        self.ncols = ncols
        self.pivot_rows: dict[int, dict] = {}

    def reduce(self, row: dict) -> dict:
        """Eliminate every pivot column occurring in the row."""
        row = {j: c for j, c in row.items() if c}
        while True:
            cols = [j for j in row if j in self.pivot_rows]
            if not cols:
                return row
            p = min(cols)
            c = row.pop(p)
            for j, a in self.pivot_rows[p].items():
                if j == p:
                    continue
                s = row.get(j, self.field.zero) - c * a
                if s:
                    row[j] = s
                else:
                    row.pop(j, None)

    def add_row(self, row: dict) -> bool:
        """Reduce and insert; returns True if the row added a new pivot."""
        row = self.reduce(row)
        if not row:
            return False
        p = min(row)
        inv = self.field.one / row[p]
        row = {j: c * inv for j, c in row.items()}
        # back-eliminate the new pivot from stored rows; stored rows contain no
        # other pivot columns, so a single pass keeps the full RREF invariant
        for pr in self.pivot_rows.values():
            c = pr.get(p)
            if c:
                del pr[p]
                for j, a in row.items():
                    if j == p:
                        continue
                    s = pr.get(j, self.field.zero) - c * a
                    if s:
                        pr[j] = s
                    else:
                        pr.pop(j, None)
        self.pivot_rows[p] = row
        return True

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)

    def pivot_columns(self) -> list[int]:
        return sorted(self.pivot_rows)


def solve_affine(field, nunknowns: int, rows: list[dict], rhs: list) -> list | None:
    """Solve sparse rows . x = rhs over the field; free unknowns are zero.

    Returns the lexicographically-first basic solution (free variables set to
    zero under the given unknown order), or None when inconsistent.
    """
    rref = FieldRREF(field, nunknowns + 1)
    for row, b in zip(rows, rhs):
        r = dict(row)
        if b:
            r[nunknowns] = b
        rref.add_row(r)
    if nunknowns in rref.pivot_rows:
        return None
    # after full RREF, non-pivot entries of each row sit at free columns;
    # with free variables at zero, each pivot unknown equals the rhs entry
    x = [field.zero] * nunknowns
    for p, row in rref.pivot_rows.items():
        x[p] = row.get(nunknowns, field.zero)
    return x


def nullspace_basis(field, nunknowns: int, rows: list[dict]) -> list[list]:
    """Basis of the solution space of rows . x = 0, one vector per free column."""
    rref = FieldRREF(field, nunknowns)
    for row in rows:
        rref.add_row(dict(row))
    pivots = set(rref.pivot_rows)
    basis = []
    for f in range(nunknowns):
        if f in pivots:
            continue
        v = [field.zero] * nunknowns
        v[f] = field.one
        for p, row in rref.pivot_rows.items():
            c = row.get(f)
            if c:
                v[p] = -c
        basis.append(v)
    return basis

"""Realizations: a Coxeter matrix with root/coroot data over an exact field.

A realization packages (V, {alpha_s}, {alpha_s^vee}) with V = K^n and checks
the defining conditions: <alpha_s^vee, alpha_s> = 2, alpha_s != 0, alpha_s^vee
surjective, the generator matrices are involutions satisfying the braid
relations, and <alpha_s^vee, delta_s> = 1 for the chosen delta_s (default
alpha_s / 2 when 2 is invertible).

Two further diagnostics are warnings, not failures: the rank-2 sufficient
condition for the existence of braid morphisms (for each finite dihedral pair
and each ordered pair of distinct reflections t1, t2 in it, some v in V has
<alpha_{t1}^vee, v> = 0 and <alpha_{t2}^vee, v> = 1) and injectivity of each
dihedral subgroup's action.  When they fail the braid-morphism solver decides
operationally.

For a reflection t = w s w^{-1} the root alpha_t = w(alpha_s) depends on the
choice of (w, s); we fix the shortest w with ShortLex tie-break.  All
consumers of alpha_t are unit-invariant (divisibility tests), which matches
the ambiguity K^x alpha_t of the choice.
"""

from __future__ import annotations

import json
from importlib import resources

from . import coxeter
from .coxeter import CoxeterMatrix, Element
from .fields import field_from_name
from .polyring import MultiPoly, WAction


class RealizationError(ValueError):
    pass


class NotAReflection(RealizationError):
    pass


class Realization:
    def __init__(self, matrix: CoxeterMatrix, field, nvars: int, alpha, coroot, delta=None):
        self.matrix = matrix
        self.field = field
        self.nvars = nvars
        self.action = WAction(matrix, field, nvars, alpha, coroot, delta)
        self._root_cache: dict[Element, tuple] = {}

    # convenience passthroughs used everywhere downstream
    @property
    def alphas(self):
        return self.action.alphas

    @property
    def deltas(self):
        return self.action.deltas

    def act(self, w, f: MultiPoly) -> MultiPoly:
        return self.action.act(w, f)

    def demazure(self, s: int, f: MultiPoly) -> MultiPoly:
        return self.action.demazure(s, f)

    def delta_split(self, s: int, f: MultiPoly):
        return self.action.delta_split(s, f)

    def zero(self) -> MultiPoly:
        return MultiPoly.zero(self.field, self.nvars)

    def one(self) -> MultiPoly:
        return MultiPoly.one(self.field, self.nvars)

    def const(self, c) -> MultiPoly:
        return MultiPoly.const(self.field, self.nvars, c)

    # -- reflection roots -----------------------------------------------------

    def _reflection_data(self, t: Element):
        """The fixed (w, s) with w s w^{-1} = t: shortest w, ShortLex tie-break."""
        got = self._root_cache.get(t)
        if got is not None:
            return got
        if t.length % 2 == 0:
            raise NotAReflection(f"{t!r} has even length")
        k = (t.length - 1) // 2
        for u in coxeter.elements_upto(self.matrix, k):
            if u.length != k:
                continue
            for s in range(self.matrix.rank):
                if coxeter.normalize(self.matrix, u.word + (s,) + tuple(reversed(u.word))) == t:
                    self._root_cache[t] = (u, s)
                    return u, s
        raise NotAReflection(f"{t!r} is not a reflection")

    def root_of_reflection(self, t: Element) -> MultiPoly:
        """alpha_t = w(alpha_s) for the fixed conjugation choice."""
        u, s = self._reflection_data(t)
        vec = self.action.act_vec(u.word, self.action.alpha_coords[s])
        return MultiPoly.linear(self.field, vec)

    def coroot_of_reflection(self, t: Element) -> list:
        """alpha_t^vee = w(alpha_s^vee) as a coordinate functional."""
        u, s = self._reflection_data(t)
        return self.action.act_covec(u.word, self.coroot_coords(s))

    def coroot_coords(self, s: int):
        return self.action.coroot_coords[s]

    def alpha_coords(self, s: int):
        return self.action.alpha_coords[s]

    # -- validation -------------------------------------------------------------

    def validate(self) -> "ValidationReport":
        checks = []
        act = self.action
        n, field = self.nvars, self.field

        for s in range(self.matrix.rank):
            name = self.matrix.names[s]
            pairing = act.pair(act.coroot_coords[s], act.alpha_coords[s])
            checks.append(
                Check(f"pairing-two[{name}]", pairing == field.of_int(2), "hard",
                      f"<coroot,root> = {pairing}")
            )
            checks.append(
                Check(f"root-nonzero[{name}]", any(c for c in act.alpha_coords[s]), "hard", "")
            )
            checks.append(
                Check(f"coroot-surjective[{name}]", any(c for c in act.coroot_coords[s]),
                      "hard", "")
            )
            dpair = act.pair(act.coroot_coords[s], act.delta_coords[s])
            checks.append(
                Check(f"delta-pairing-one[{name}]", dpair == field.one, "hard",
                      f"<coroot,delta> = {dpair}")
            )
            m2 = _mat_mul(field, act.mats[s], act.mats[s])
            checks.append(Check(f"involution[{name}]", _is_identity(field, m2), "hard", ""))

        for s in range(self.matrix.rank):
            for t in range(s + 1, self.matrix.rank):
                m = self.matrix.m(s, t)
                if m == 0:
                    continue
                prod = _mat_identity(field, n)
                for _ in range(m):
                    prod = _mat_mul(field, prod, _mat_mul(field, act.mats[s], act.mats[t]))
                names = f"{self.matrix.names[s]},{self.matrix.names[t]}"
                checks.append(Check(f"braid-relation[{names}]", _is_identity(field, prod), "hard", ""))
                ok, detail = self._rank2_sufficient(s, t)
                checks.append(Check(f"rank2-sufficient[{names}]", ok, "warning", detail))
                ok, detail = self._dihedral_injective(s, t)
                checks.append(Check(f"dihedral-injective[{names}]", ok, "warning", detail))

        return ValidationReport(checks)

    def _dihedral_reflections(self, s: int, t: int) -> list[Element]:
        """The m reflections of the finite dihedral subgroup <s, t>."""
        m = self.matrix.m(s, t)
        out = []
        for start in (s, t):
            word: tuple[int, ...] = ()
            for k in range(m):
                letter = start if k % 2 == 0 else ({s, t} - {start}).pop()
                word = word + (letter,)
                if len(word) % 2 == 1:
                    el = coxeter.normalize(self.matrix, word)
                    if el not in out:
                        out.append(el)
        return sorted(out)

    def _rank2_sufficient(self, s: int, t: int):
        refl = self._dihedral_reflections(s, t)
        for t1 in refl:
            for t2 in refl:
                if t1 == t2:
                    continue
                c1 = self.coroot_of_reflection(t1)
                c2 = self.coroot_of_reflection(t2)
                if not _solvable_two_rows(self.field, c1, c2):
                    return False, f"no v with <coroot({t1!r}),v>=0, <coroot({t2!r}),v>=1"
        return True, ""

    def _dihedral_injective(self, s: int, t: int):
        m = self.matrix.m(s, t)
        elements = [w for w in coxeter.elements_upto(self.matrix, m)
                    if set(w.word) <= {s, t}]
        seen = {}
        for w in elements:
            key = tuple(tuple(row) for row in self.action.mat_of_word(w.word))
            if key in seen:
                return False, f"{seen[key]!r} and {w!r} act identically"
            seen[key] = w
        return True, ""

    # -- GKM ---------------------------------------------------------------------

    def gkm_check(self, length: int):
        """Pairwise linear independence of alpha_t over reflections of length <= L.

        Returns (ok, witness) with witness a violating pair or None.
        """
        refl = coxeter.reflections_upto(self.matrix, length)
        roots = [(t, self.root_of_reflection(t).linear_coords()) for t in refl]
        for i in range(len(roots)):
            for j in range(i + 1, len(roots)):
                if not _independent_two(self.field, roots[i][1], roots[j][1]):
                    return False, (roots[i][0], roots[j][0])
        return True, None


class Check:
    __slots__ = ("name", "ok", "kind", "detail")

    def __init__(self, name, ok, kind, detail):
        self.name, self.ok, self.kind, self.detail = name, bool(ok), kind, detail

    def as_dict(self):
        return {"name": self.name, "ok": self.ok, "kind": self.kind, "detail": self.detail}


class ValidationReport:
    def __init__(self, checks: list[Check]):
        self.checks = checks

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks if c.kind == "hard")

    @property
    def warnings(self) -> list[Check]:
        return [c for c in self.checks if c.kind == "warning" and not c.ok]

    def as_dict(self):
        return {
            "ok": self.ok,
            "warnings": [c.name for c in self.warnings],
            "checks": [c.as_dict() for c in self.checks],
        }


# ---------------------------------------------------------------------------
# small dense field linear algebra


def _mat_identity(field, n):
    return [[field.one if i == j else field.zero for j in range(n)] for i in range(n)]


def _mat_mul(field, a, b):
    n = len(a)
    return [
        [sum((a[i][k] * b[k][j] for k in range(n)), field.zero) for j in range(n)]
        for i in range(n)
    ]


def _is_identity(field, m):
    n = len(m)
    return all(m[i][j] == (field.one if i == j else field.zero) for i in range(n) for j in range(n))


def _solvable_two_rows(field, row0, row1) -> bool:
    """Is there v with row0 . v = 0 and row1 . v = 1?"""
    rows = [list(row0) + [field.zero], list(row1) + [field.one]]
    n = len(row0)
    # Gaussian elimination on the 2 x (n+1) augmented system
    piv = 0
    for c in range(n):
        r = next((i for i in range(piv, 2) if rows[i][c]), None)
        if r is None:
            continue
        rows[piv], rows[r] = rows[r], rows[piv]
        inv = field.one / rows[piv][c]
        rows[piv] = [x * inv for x in rows[piv]]
        for i in range(2):
            if i != piv and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[piv])]
        piv += 1
        if piv == 2:
            break
    # inconsistent iff some row is (0 ... 0 | nonzero)
    for row in rows:
        if not any(row[:n]) and row[n]:
            return False
    return True


def _independent_two(field, v0, v1) -> bool:
    n = len(v0)
    for i in range(n):
        for j in range(i + 1, n):
            if v0[i] * v1[j] - v0[j] * v1[i]:
                return True
    return False


# ---------------------------------------------------------------------------
# JSON configuration and bundled realizations


def from_config(cfg: dict, field_override=None) -> Realization:
    """Build a realization from the JSON configuration mapping.

    Schema: {"generators": [names], "coxeter": [[m]], "field": "Q"|{"p": int},
    "n": int, "alpha": [[coeff-str]], "coroot": [[...]], "delta": [[...]]?}.
    Infinite orders are encoded as 0.
    """
    names = cfg.get("generators")
    matrix = CoxeterMatrix.from_lists(cfg["coxeter"], names)
    field = field_from_name(field_override if field_override is not None else cfg["field"])
    n = int(cfg["n"])

    def vectors(key):
        if key not in cfg or cfg[key] is None:
            return None
        return [[field.of_str(str(c)) for c in row] for row in cfg[key]]

    alpha = vectors("alpha")
    coroot = vectors("coroot")
    delta = vectors("delta")
    if alpha is None or coroot is None:
        raise RealizationError("configuration must provide alpha and coroot")
    if len(alpha) != matrix.rank or len(coroot) != matrix.rank:
        raise RealizationError("alpha/coroot must have one row per generator")
    return Realization(matrix, field, n, alpha, coroot, delta)


def to_config(real: Realization) -> dict:
    field = real.field
    cfg = {
        "generators": list(real.matrix.names),
        "coxeter": [list(row) for row in real.matrix.orders],
        "field": "Q" if field.characteristic == 0 else {"p": field.characteristic},
        "n": real.nvars,
        "alpha": [[field.to_str(c) for c in v] for v in real.action.alpha_coords],
        "coroot": [[field.to_str(c) for c in v] for v in real.action.coroot_coords],
        "delta": [[field.to_str(c) for c in v] for v in real.action.delta_coords],
    }
    return cfg


def load_file(path, field_override=None) -> Realization:
    with open(path, "r", encoding="utf-8") as fh:
        return from_config(json.load(fh), field_override)


BUNDLED = ("a1", "a2", "b2", "g2", "a1xa1", "a1xa1deg")


def bundled(name: str, field_override=None) -> Realization:
    """Load a bundled realization.

    a1, a2, b2, g2 are the Cartan realizations (g2 is the m=6 dihedral
    matrix); a1xa1 is the orthogonal commuting pair; a1xa1deg is a degenerate
    rank-one realization with equal roots, which fails GKM and dihedral
    injectivity on purpose.
    """
    name = name.lower()
    if name not in BUNDLED:
        raise RealizationError(f"unknown bundled realization {name!r}; have {BUNDLED}")
    data = resources.files("soergel.data").joinpath(f"{name}.json").read_text()
    return from_config(json.loads(data), field_override)

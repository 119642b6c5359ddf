"""Coxeter system combinatorics.

Words are tuples of generator indices (ints).  The word problem is solved by
exhaustive closure under braid moves and ss-deletions (Tits' solution), which
is exact and adequate at desk scale (word length <= ~12).  The canonical form
of a group element is the ShortLex-minimal reduced word with respect to the
declared generator order; since all reduced words of an element have the same
length, ShortLex-minimal means lexicographically minimal on index tuples.

The Coxeter matrix stores m(s,t) with 0 encoding an infinite order, so the
group may be infinite; every enumeration here takes an explicit length bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class CoxeterError(ValueError):
    pass


class WordsNotReduced(CoxeterError):
    pass


class DifferentElements(CoxeterError):
    pass


class NotClosed(CoxeterError):
    pass


class NotMaximal(CoxeterError):
    pass


class EndpointMismatch(CoxeterError):
    pass


@dataclass(frozen=True)
class CoxeterMatrix:
    """Generator names plus the symmetric order matrix; m = 0 means infinity."""

    names: tuple[str, ...]
    orders: tuple[tuple[int, ...], ...]
    _cache: dict = field(
        default_factory=dict, compare=False, hash=False, repr=False
    )

    def __post_init__(self):
        n = len(self.names)
        if len(set(self.names)) != n:
            raise CoxeterError("duplicate generator names")
        if len(self.orders) != n or any(len(row) != n for row in self.orders):
            raise CoxeterError("order matrix must be square of generator size")
        for i in range(n):
            if self.orders[i][i] != 1:
                raise CoxeterError("diagonal entries must be 1")
            for j in range(n):
                if self.orders[i][j] != self.orders[j][i]:
                    raise CoxeterError("order matrix must be symmetric")
                if i != j and self.orders[i][j] == 1:
                    raise CoxeterError("off-diagonal entries must be >= 2 (0 = infinity)")

    @staticmethod
    def from_lists(orders, names=None) -> "CoxeterMatrix":
        n = len(orders)
        if names is None:
            names = tuple("stuvwxyz"[:n])
        return CoxeterMatrix(tuple(names), tuple(tuple(int(m) for m in row) for row in orders))

    @property
    def rank(self) -> int:
        return len(self.names)

    def m(self, i: int, j: int) -> int:
        return self.orders[i][j]

    def index(self, name: str) -> int:
        return self.names.index(name)

    def word(self, *names: str) -> tuple[int, ...]:
        """Build a word (tuple of generator indices) from generator names."""
        return tuple(self.index(n) for n in names)

    def word_names(self, word) -> tuple[str, ...]:
        return tuple(self.names[i] for i in word)

    def element(self, *names: str) -> "Element":
        return normalize(self, self.word(*names))

    @property
    def unit(self) -> "Element":
        return Element(self, ())


@dataclass(frozen=True)
class Element:
    """A group element, identified with its ShortLex-minimal reduced word.

    Instances must be produced through :func:`normalize`.
    """

    matrix: CoxeterMatrix
    word: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.word)

    def __mul__(self, other: "Element") -> "Element":
        return multiply(self, other)

    def inverse(self) -> "Element":
        return normalize(self.matrix, tuple(reversed(self.word)))

    def names(self) -> tuple[str, ...]:
        return self.matrix.word_names(self.word)

    def __repr__(self):
        return "e" if not self.word else ".".join(self.names())

    def __lt__(self, other: "Element"):
        # length-then-ShortLex; a deterministic total order used for reports
        return (self.length, self.word) < (other.length, other.word)


@dataclass(frozen=True)
class LabeledSubsequence:
    """A 01-vector along a word with its U/D labels, endpoint and defect."""

    matrix: CoxeterMatrix
    base: tuple[int, ...]
    bits: tuple[int, ...]
    labels: tuple[str, ...]
    prefixes: tuple[Element, ...]  # x_0 = e, x_1, ..., x_l
    defect: int

    @property
    def endpoint(self) -> Element:
        return self.prefixes[-1]


@dataclass(frozen=True)
class BraidMove:
    """Replacement of an alternating st-run by the ts-run at a position."""

    pos: int
    old: tuple[int, ...]
    new: tuple[int, ...]


# ---------------------------------------------------------------------------
# word problem


def _braid_neighbors(mat: CoxeterMatrix, word: tuple[int, ...]):
    out = []
    n = len(word)
    for i in range(n - 1):
        a, b = word[i], word[i + 1]
        if a == b:
            continue
        m = mat.m(a, b)
        if m < 2 or i + m > n:
            continue
        seg = word[i : i + m]
        ok = all(seg[k] == (a if k % 2 == 0 else b) for k in range(m))
        if ok:
            new_seg = tuple(b if k % 2 == 0 else a for k in range(m))
            out.append((i, seg, word[:i] + new_seg + word[i + m :]))
    return out


def _braid_closure(mat: CoxeterMatrix, word: tuple[int, ...]) -> frozenset:
    seen = {word}
    stack = [word]
    while stack:
        u = stack.pop()
        for _, _, v in _braid_neighbors(mat, u):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return frozenset(seen)


def normalize(mat: CoxeterMatrix, word) -> Element:
    """Canonical Element of a word: braid/deletion closure, ShortLex pick."""
    word = tuple(word)
    cache = mat._cache.setdefault("normalize", {})
    if word in cache:
        return cache[word]
    current = word
    while True:
        seen = {current}
        stack = [current]
        shortened = None
        while stack and shortened is None:
            u = stack.pop()
            for j in range(len(u) - 1):
                if u[j] == u[j + 1]:
                    shortened = u[:j] + u[j + 2 :]
                    break
            if shortened is not None:
                break
            for _, _, v in _braid_neighbors(mat, u):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if shortened is None:
            # the closure is complete and deletion-free: current is reduced
            closure = _braid_closure(mat, current)
            elt = Element(mat, min(closure))
            cache[word] = elt
            return elt
        current = shortened


def multiply(a: Element, b: Element) -> Element:
    if a.matrix != b.matrix:
        raise CoxeterError("elements of different Coxeter systems")
    return normalize(a.matrix, a.word + b.word)


def mult_gen(a: Element, s: int) -> Element:
    return normalize(a.matrix, a.word + (s,))


def is_reduced(mat: CoxeterMatrix, word) -> bool:
    return normalize(mat, word).length == len(word)


def right_descends(w: Element, s: int) -> bool:
    """True iff ws < w."""
    return mult_gen(w, s).length < w.length


def bruhat_below(w: Element) -> frozenset:
    """All elements <= w, by the subword property on the canonical word."""
    cache = w.matrix._cache.setdefault("below", {})
    if w.word in cache:
        return cache[w.word]
    out = set()
    word = w.word
    n = len(word)
    for mask in range(1 << n):
        sub = tuple(word[i] for i in range(n) if mask >> i & 1)
        out.add(normalize(w.matrix, sub))
    result = frozenset(out)
    cache[w.word] = result
    return result


def bruhat_leq(a: Element, b: Element) -> bool:
    if a.matrix != b.matrix:
        raise CoxeterError("elements of different Coxeter systems")
    return a in bruhat_below(b)


def elements_upto(mat: CoxeterMatrix, length: int) -> list[Element]:
    """All elements of length <= `length`, sorted by (length, ShortLex)."""
    cache = mat._cache.setdefault("elements_upto", {})
    if length in cache:
        return cache[length]
    found = {Element(mat, ())}
    frontier = [Element(mat, ())]
    for _ in range(length):
        nxt = []
        for w in frontier:
            for s in range(mat.rank):
                u = mult_gen(w, s)
                if u.length == w.length + 1 and u not in found:
                    found.add(u)
                    nxt.append(u)
        frontier = nxt
    result = sorted(found)
    cache[length] = result
    return result


def reflections_upto(mat: CoxeterMatrix, length: int) -> list[Element]:
    """All reflections of length <= `length`, sorted.

    Every reflection t has a palindromic reduced word u s u^{-1} with
    2 l(u) + 1 = l(t), so conjugating generators by elements of length
    <= (length-1)//2 is exhaustive.
    """
    if length < 1:
        raise CoxeterError("length bound must be >= 1")
    cache = mat._cache.setdefault("reflections_upto", {})
    if length in cache:
        return cache[length]
    out = set()
    for u in elements_upto(mat, (length - 1) // 2):
        rev = tuple(reversed(u.word))
        for s in range(mat.rank):
            t = normalize(mat, u.word + (s,) + rev)
            if t.length <= length:
                out.add(t)
    result = sorted(out)
    cache[length] = result
    return result


def is_reflection(t: Element) -> bool:
    return t.length % 2 == 1 and t in reflections_upto(t.matrix, t.length)


def reduced_expressions(w: Element) -> list[tuple[int, ...]]:
    """All reduced words of w, in lexicographic order."""
    return sorted(_braid_closure(w.matrix, w.word))


def left_inversions(w: Element) -> list[tuple[Element, Element, int]]:
    """The reflections t with tw < w, as (t, prefix, s) with t = prefix.s.prefix^-1.

    Taken along the canonical reduced word s_1...s_l of w, the i-th inversion
    is s_1...s_{i-1} s_i s_{i-1}...s_1; the list has exactly l(w) distinct
    entries.
    """
    mat = w.matrix
    out = []
    for i in range(w.length):
        prefix = normalize(mat, w.word[:i])
        t = normalize(mat, prefix.word + (w.word[i],) + tuple(reversed(prefix.word)))
        out.append((t, prefix, w.word[i]))
    return out


# ---------------------------------------------------------------------------
# rex graph


def rex_path(mat: CoxeterMatrix, x: tuple[int, ...], y: tuple[int, ...]) -> list[BraidMove]:
    """BFS-shortest braid-move path x -> y, lexicographic tie-break."""
    x, y = tuple(x), tuple(y)
    if not is_reduced(mat, x) or not is_reduced(mat, y):
        raise WordsNotReduced(f"{x} or {y} is not reduced")
    if normalize(mat, x) != normalize(mat, y):
        raise DifferentElements(f"{x} and {y} are different elements")
    # distances to y over the rex graph
    dist = {y: 0}
    frontier = [y]
    while frontier and x not in dist:
        nxt = []
        for u in frontier:
            for _, _, v in _braid_neighbors(mat, u):
                if v not in dist:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    path = []
    cur = x
    while cur != y:
        steps = []
        for i, old, v in _braid_neighbors(mat, cur):
            if dist.get(v) == dist[cur] - 1:
                steps.append((v, i, old, v[i : i + len(old)]))
        v, i, old, new = min(steps)
        path.append(BraidMove(i, old, new))
        cur = v
    return path


# ---------------------------------------------------------------------------
# closed subsets


def is_closed(I) -> bool:
    S = set(I)
    return all(bruhat_below(w) <= S for w in S)


def closed_enumeration(I, w: Element) -> list[Element]:
    """Enumerate a finite closed I so every prefix is closed and w comes last."""
    S = set(I)
    if w not in S:
        raise NotMaximal(f"{w!r} is not in the subset")
    if not is_closed(S):
        raise NotClosed("subset is not Bruhat-closed")
    if any(u != w and bruhat_leq(w, u) for u in S):
        raise NotMaximal(f"{w!r} is not maximal in the subset")
    return sorted(S - {w}) + [w]


# ---------------------------------------------------------------------------
# labelled subsequences (defect calculus)


def label_subsequence(mat: CoxeterMatrix, word, bits) -> LabeledSubsequence:
    word, bits = tuple(word), tuple(bits)
    if len(bits) != len(word):
        raise CoxeterError("bit vector and word must have the same length")
    prefixes = [Element(mat, ())]
    labels = []
    defect = 0
    for i, (s, b) in enumerate(zip(word, bits)):
        x = prefixes[-1]
        up = not right_descends(x, s)
        labels.append("U" if up else "D")
        if b == 0:
            defect += 1 if up else -1
        prefixes.append(mult_gen(x, s) if b else x)
    return LabeledSubsequence(mat, word, bits, tuple(labels), tuple(prefixes), defect)


def subword_endpoint(mat: CoxeterMatrix, word, bits) -> Element:
    sub = tuple(s for s, b in zip(word, bits) if b)
    return normalize(mat, sub)


def subseq_order_less(a: LabeledSubsequence, b: LabeledSubsequence) -> bool:
    """The total order on subsequences of a fixed word with a fixed endpoint:
    a < b iff at the first index where labels differ, a is U and b is D."""
    if a.base != b.base:
        raise CoxeterError("subsequences of different words")
    if a.endpoint != b.endpoint:
        raise EndpointMismatch(f"{a.endpoint!r} != {b.endpoint!r}")
    for la, lb in zip(a.labels, b.labels):
        if la != lb:
            return la == "U"
    return False


def all_subsequences(mat: CoxeterMatrix, word) -> list[LabeledSubsequence]:
    """All 2^l labelled subsequences of a word, bits in lexicographic order."""
    word = tuple(word)
    out = []
    for mask in range(1 << len(word)):
        bits = tuple((mask >> (len(word) - 1 - i)) & 1 for i in range(len(word)))
        out.append(label_subsequence(mat, word, bits))
    return out


def subsequences_with_endpoint(mat: CoxeterMatrix, word, w: Element) -> list[LabeledSubsequence]:
    """Subsequences of `word` with endpoint w, sorted by the total order."""
    found = [ls for ls in all_subsequences(mat, word) if ls.endpoint == w]
    # insertion sort by the strict total order (it is total on this set)
    out: list[LabeledSubsequence] = []
    for ls in found:
        k = 0
        while k < len(out) and subseq_order_less(out[k], ls):
            k += 1
        out.insert(k, ls)
    return out

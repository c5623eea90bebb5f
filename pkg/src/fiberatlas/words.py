"""Quadratic words, disk gluings and the integer pairing matrices.

A quadratic word of length 2n uses each letter index 1..n exactly twice,
once with exponent +1 and once with exponent -1.  Gluing the boundary of
a 2n-gon along equal letters produces a closed orientable surface; the
derived data (vertex classes, genus, punctures, spanning-tree status and
the prefix-sum matrices) drive every other module.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError, ValidationError

_ALPHABET = "abcdefghijklmnopqrstuvwxyz"
_EXPLICIT_TOKEN = re.compile(r"^a(\d+)(\^-1)?$")


@dataclass(frozen=True)
class QuadraticWord:
    """Letter sequence plus the cached position permutations.

    ``letters[j]`` is ``(k, sign)`` for the occurrence at position j+1;
    ``tau[2k-2]`` / ``tau[2k-1]`` are the 1-based positions of the
    positive / negative occurrence of letter k, and ``sigma`` is the
    inverse permutation of ``tau``.
    """

    n: int
    letters: tuple[tuple[int, int], ...]
    tau: tuple[int, ...]
    sigma: tuple[int, ...]

    @classmethod
    def from_letters(cls, letters) -> "QuadraticWord":
        letters = tuple((int(k), int(s)) for k, s in letters)
        if not letters:
            raise ParseError("empty word")
        if len(letters) % 2:
            raise ParseError("word length must be even")
        n = len(letters) // 2
        pos = {}
        for j, (k, s) in enumerate(letters, start=1):
            if s not in (-1, 1):
                raise ParseError(f"bad exponent {s} at position {j}")
            if not 1 <= k <= n:
                raise ParseError(f"letter index {k} outside 1..{n}")
            if (k, s) in pos:
                kind = "positively" if s == 1 else "negatively"
                raise ParseError(f"letter {k} appears {kind} twice")
            pos[(k, s)] = j
        for k in range(1, n + 1):
            if (k, 1) not in pos or (k, -1) not in pos:
                raise ParseError(f"letter {k} must appear once with each exponent")
        tau = []
        for k in range(1, n + 1):
            tau.append(pos[(k, 1)])
            tau.append(pos[(k, -1)])
        sigma = [0] * (2 * n)
        for j, p in enumerate(tau, start=1):
            sigma[p - 1] = j
        return cls(n=n, letters=letters, tau=tuple(tau), sigma=tuple(sigma))

    def text(self) -> str:
        """Compact form when n <= 26, explicit form otherwise."""
        if self.n <= 26:
            return "".join(
                _ALPHABET[k - 1] if s == 1 else _ALPHABET[k - 1].upper()
                for k, s in self.letters
            )
        return " ".join(f"a{k}" if s == 1 else f"a{k}^-1" for k, s in self.letters)

    def relabel(self, rho: dict[int, int]) -> "QuadraticWord":
        """Apply a bijection of letter indices."""
        return QuadraticWord.from_letters((rho[k], s) for k, s in self.letters)


def parse_word(text: str) -> QuadraticWord:
    """Parse either compact (``abAB``) or explicit (``a1 a2 a1^-1 a2^-1``) form."""
    text = text.strip()
    if not text:
        raise ParseError("empty word")
    if " " in text or "^" in text or any(ch.isdigit() for ch in text):
        letters = []
        for token in text.split():
            m = _EXPLICIT_TOKEN.match(token)
            if not m:
                raise ParseError(f"bad token {token!r} in explicit word")
            k = int(m.group(1))
            if k < 1:
                raise ParseError(f"letter index must be >= 1, got {k}")
            letters.append((k, -1 if m.group(2) else 1))
        return QuadraticWord.from_letters(letters)
    if not text.isalpha():
        raise ParseError("compact word must match [a-zA-Z]+")
    used = {ch.lower() for ch in text}
    indices = sorted(_ALPHABET.index(ch) + 1 for ch in used)
    if len(text) > 52 or len(indices) > 26:
        raise ParseError("compact form supports at most 26 letters; use the explicit form")
    if indices != list(range(1, len(indices) + 1)):
        raise ParseError("compact word must use an initial run of the alphabet (a, b, c, ...)")
    letters = [(_ALPHABET.index(ch.lower()) + 1, 1 if ch.islower() else -1) for ch in text]
    return QuadraticWord.from_letters(letters)


@dataclass(frozen=True)
class GluedSurface:
    """Result of gluing the 2n-gon boundary along its letter pairing."""

    word: QuadraticWord
    class_of: tuple[int, ...]  # class index for each disk vertex 1..2n (0-based entry j = vertex j+1)
    vertex_classes: tuple[tuple[int, ...], ...]
    s: int
    g: int
    skeleton_edges: tuple[tuple[int, int], ...]  # per letter k: (class of start vertex, class of end vertex)
    tree_ok: bool


def glue(word: QuadraticWord) -> GluedSurface:
    """Identify boundary edges pairwise and read off genus and punctures.

    Edge k runs from disk vertex tau(2k-1) to tau(2k-1)+1 and is glued to
    the reversed edge from tau(2k) to tau(2k)+1, which identifies
    v_{tau(2k-1)} ~ v_{tau(2k)+1} and v_{tau(2k-1)+1} ~ v_{tau(2k)}
    (vertex indices cyclic mod 2n).
    """
    n = word.n
    m = 2 * n
    tau = word.tau
    parent = list(range(m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k in range(n):
        a = tau[2 * k] - 1
        b = tau[2 * k + 1] - 1
        ra, rb = find(a), find((b + 1) % m)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
        ra, rb = find((a + 1) % m), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots = {}
    class_of = []
    for v in range(m):
        r = find(v)
        if r not in roots:
            roots[r] = len(roots)
        class_of.append(roots[r])
    s = len(roots)
    if (n + 1 - s) % 2:
        raise AssertionError("n + 1 - s must be even for a closed orientable gluing")
    g = (n + 1 - s) // 2
    if g < 0:
        raise AssertionError("negative genus")
    classes = [[] for _ in range(s)]
    for v, c in enumerate(class_of):
        classes[c].append(v + 1)
    edges = []
    for k in range(n):
        a = tau[2 * k] - 1
        edges.append((class_of[a], class_of[(a + 1) % m]))
    tree_ok = _spanning_tree_ok(edges[2 * g:], s)
    return GluedSurface(
        word=word,
        class_of=tuple(class_of),
        vertex_classes=tuple(tuple(c) for c in classes),
        s=s,
        g=g,
        skeleton_edges=tuple(edges),
        tree_ok=tree_ok,
    )


def _spanning_tree_ok(edges, s) -> bool:
    if len(edges) != s - 1:
        return False
    parent = list(range(s))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[max(ra, rb)] = min(ra, rb)
    return True


def normalize(word: QuadraticWord, surface: GluedSurface | None = None) -> QuadraticWord:
    """Relabel letters so the last n-2g edges form a spanning tree.

    Identity when the input already satisfies the tree condition.  The
    tree is chosen by breadth-first search from the class containing
    disk vertex 1, visiting (neighbour class, edge index) pairs in
    increasing order; among relabelings mapping that tree to the top
    indices the lexicographically smallest one is used.  A precomputed
    gluing for the same word may be passed to avoid recomputation.
    """
    surf = glue(word) if surface is None else surface
    if surf.tree_ok:
        return word
    n, s = word.n, surf.s
    adj = [[] for _ in range(s)]
    for k, (a, b) in enumerate(surf.skeleton_edges, start=1):
        adj[a].append((b, k))
        adj[b].append((a, k))
    start = surf.class_of[0]
    seen = [False] * s
    seen[start] = True
    queue = [start]
    tree = []
    while queue:
        u = queue.pop(0)
        for v, k in sorted(adj[u]):
            if not seen[v]:
                seen[v] = True
                tree.append(k)
                queue.append(v)
    tree_set = set(tree)
    non_tree = [k for k in range(1, n + 1) if k not in tree_set]
    rho = {}
    for i, k in enumerate(sorted(non_tree), start=1):
        rho[k] = i
    for i, k in enumerate(sorted(tree_set), start=len(non_tree) + 1):
        rho[k] = i
    out = word.relabel(rho)
    if not glue(out).tree_ok:
        raise AssertionError("normalize failed to reach the spanning-tree form")
    return out


@dataclass(frozen=True)
class IntersectionData:
    """Prefix-sum matrix A, pairing map T and the antisymmetric form phi.

    ``A[l][k]`` is the coefficient of z_{k+1} in the position of polygon
    vertex l+1.  ``T[k]`` holds the coefficients of the k+1-st side
    pairing translation, and ``phi[l][k] = T[k][l]``.
    """

    A: tuple[tuple[int, ...], ...]
    T: tuple[tuple[int, ...], ...]
    phi: tuple[tuple[int, ...], ...]


def matrices(word: QuadraticWord) -> IntersectionData:
    n = word.n
    m = 2 * n
    rows = [[0] * n]
    acc = [0] * n
    for k, sgn in word.letters:
        acc = list(acc)
        acc[k - 1] += sgn
        rows.append(acc)
    # rows has m+1 entries; the last is the full signed sum (must vanish)
    if any(rows[m]):
        raise AssertionError("total signed sum must vanish")
    T = []
    for k in range(1, n + 1):
        hi = rows[word.tau[2 * k - 1]]  # A_{tau(2k)+1}
        lo = rows[word.tau[2 * k - 2] - 1]  # A_{tau(2k-1)}
        T.append(tuple(h - l for h, l in zip(hi, lo)))
    phi = tuple(tuple(T[k][l] for k in range(n)) for l in range(n))
    return IntersectionData(
        A=tuple(tuple(r) for r in rows[:m]),
        T=tuple(T),
        phi=phi,
    )


def apply_T(data: IntersectionData, values) -> list:
    """Evaluate every pairing translation on a vector of side values."""
    return [sum(row[l] * values[l] for l in range(len(row)) if row[l]) for row in data.T]


def integer_rank(mat) -> int:
    """Exact rank of an integer matrix by fraction-free elimination."""
    rows = [list(map(int, r)) for r in mat]
    if not rows:
        return 0
    cols = len(rows[0])
    rank = 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        pv = pr[c]
        for i in range(rank + 1, len(rows)):
            f = rows[i][c]
            if f:
                ri = rows[i]
                for j in range(c, cols):
                    ri[j] = ri[j] * pv - pr[j] * f
        rank += 1
    return rank


def word_report(word: QuadraticWord) -> dict:
    """JSON-ready summary: n, permutations, genus data and matrices."""
    surf = glue(word)
    data = matrices(word)
    return {
        "word": word.text(),
        "n": word.n,
        "sigma": list(word.sigma),
        "tau": list(word.tau),
        "s": surf.s,
        "g": surf.g,
        "tree_ok": surf.tree_ok,
        "vertex_classes": [list(c) for c in surf.vertex_classes],
        "A": [list(r) for r in data.A],
        "T": [list(r) for r in data.T],
        "phi": [list(r) for r in data.phi],
    }


def validate_word(word: QuadraticWord) -> None:
    """Re-check the defining invariants (used by property tests)."""
    n = word.n
    for j in range(1, 2 * n + 1):
        k = (j + 1) // 2
        sign = 1 if j % 2 else -1
        if word.letters[word.tau[j - 1] - 1] != (k, sign):
            raise ValidationError("tau is inconsistent with the letter sequence")
    for j in range(1, 2 * n + 1):
        if word.sigma[word.tau[j - 1] - 1] != j:
            raise ValidationError("sigma is not the inverse of tau")

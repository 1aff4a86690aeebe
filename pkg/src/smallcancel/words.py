"""Alphabet and word primitives.

Words are tuples of integer letters.  Generator ``i`` is the letter ``2*i``
and its formal inverse is ``2*i + 1``, so ``x ^ 1`` inverts a letter.  The
fixed total order on letters is the integer order, which in text form reads
``a < A < b < B < ...`` (lowercase generator, uppercase inverse).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

Word = tuple[int, ...]

EMPTY: Word = ()


def letter_inverse(x: int) -> int:
    return x ^ 1


class InputError(ValueError):
    """Malformed user-supplied data (bad letters, out-of-range parameters)."""


class ContractError(RuntimeError):
    """A documented precondition of an operation was violated."""


class ResourceError(RuntimeError):
    """A computation exceeded the region or budget it was given."""

    def __init__(self, message: str, completed: object = None):
        super().__init__(message)
        self.completed = completed


@dataclass(frozen=True)
class Alphabet:
    """Ordered generator names; each generator has a formal inverse.

    Names must be single ASCII lowercase characters, pairwise distinct.
    """

    names: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise InputError(f"duplicate generators in {self.names}")
        for n in self.names:
            if len(n) != 1 or not ("a" <= n <= "z"):
                raise InputError(f"generator names must be single lowercase ascii letters, got {n!r}")

    @property
    def size(self) -> int:
        return len(self.names)

    @property
    def num_letters(self) -> int:
        return 2 * len(self.names)

    def letters(self) -> range:
        return range(2 * len(self.names))

    def letter_of_char(self, c: str) -> int:
        low = c.lower()
        try:
            i = self.names.index(low)
        except ValueError:
            raise InputError(f"letter {c!r} is not in the alphabet {self.names}") from None
        return 2 * i + (0 if c == low else 1)

    def char_of_letter(self, x: int) -> str:
        name = self.names[x >> 1]
        return name.upper() if x & 1 else name

    def parse(self, text: str) -> Word:
        """Parse a text word (lowercase = generator, uppercase = inverse)."""
        return tuple(self.letter_of_char(c) for c in text.strip())

    def format(self, w: Sequence[int]) -> str:
        return "".join(self.char_of_letter(x) for x in w)


def is_reduced(w: Sequence[int]) -> bool:
    return all(w[i] != (w[i + 1] ^ 1) for i in range(len(w) - 1))


def free_reduce(w: Iterable[int]) -> Word:
    """Freely reduce a word (cancel adjacent mutually inverse letters)."""
    out: list[int] = []
    for x in w:
        if out and out[-1] == (x ^ 1):
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def invert(w: Sequence[int]) -> Word:
    return tuple((x ^ 1) for x in reversed(w))


def concat(*ws: Sequence[int]) -> Word:
    out: list[int] = []
    for w in ws:
        for x in w:
            if out and out[-1] == (x ^ 1):
                out.pop()
            else:
                out.append(x)
    return tuple(out)


def is_cyclically_reduced(w: Sequence[int]) -> bool:
    return is_reduced(w) and (len(w) < 2 or w[0] != (w[-1] ^ 1))


def cyclic_reduce(w: Sequence[int]) -> Word:
    w = free_reduce(w)
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == (w[j - 1] ^ 1):
        i += 1
        j -= 1
    return tuple(w[i:j])


def rotate(w: Sequence[int], k: int) -> Word:
    if not w:
        return EMPTY
    k %= len(w)
    return tuple(w[k:]) + tuple(w[:k])


def rotations(w: Sequence[int]) -> list[Word]:
    """All distinct rotations of a cyclic word."""
    seen: dict[Word, None] = {}
    for k in range(max(1, len(w))):
        seen.setdefault(rotate(w, k), None)
    return list(seen)


def canonical_rotation_index(w: Sequence[int]) -> int:
    """Index of the lexicographically least rotation (least index on ties)."""
    best, best_k = None, 0
    for k in range(max(1, len(w))):
        r = rotate(w, k)
        if best is None or r < best:
            best, best_k = r, k
    return best_k


@dataclass(frozen=True)
class CyclicWord:
    """A cyclically reduced word together with its canonical rotation.

    ``representative`` is the stored rotation; ``canonical_index`` says how
    far to rotate it to reach the lexicographically least rotation.
    """

    representative: Word
    canonical_index: int = field(default=-1)

    def __post_init__(self):
        if not is_cyclically_reduced(self.representative):
            raise InputError(f"not cyclically reduced: {self.representative}")
        if self.canonical_index < 0:
            object.__setattr__(self, "canonical_index", canonical_rotation_index(self.representative))

    @property
    def canonical(self) -> Word:
        return rotate(self.representative, self.canonical_index)

    def __len__(self) -> int:
        return len(self.representative)


def _as_array(w: Sequence[int]) -> np.ndarray:
    return np.asarray(w, dtype=np.int16)


def _max_true_run(mask: np.ndarray) -> int:
    if not mask.any():
        return 0
    padded = np.concatenate(([False], mask, [False]))
    diff = np.diff(padded.astype(np.int8))
    starts = np.flatnonzero(diff == 1)
    ends = np.flatnonzero(diff == -1)
    return int((ends - starts).max())


def max_cyclic_repeat(w: Sequence[int]) -> int:
    """Longest subword occurring at two distinct cyclic offsets of ``w``.

    For a shift under which the word is fully periodic the repeat length is
    ``len(w) - gcd(shift, len(w))`` (the whole word is excluded: a word
    trivially "occurs" at its own offset).
    """
    n = len(w)
    if n < 2:
        return 0
    a = _as_array(w)
    best = 0
    for d in range(1, n):
        eq = a == np.roll(a, -d)
        if eq.all():
            best = max(best, n - math.gcd(d, n))
        else:
            run = _max_true_run(np.concatenate([eq, eq]))
            best = max(best, min(run, n - 1))
    return best


def max_common_cyclic(u: Sequence[int], v: Sequence[int]) -> int:
    """Longest common subword of two cyclic words (at most min length)."""
    n1, n2 = len(u), len(v)
    if n1 == 0 or n2 == 0:
        return 0
    a = np.concatenate([_as_array(u)] * 2)
    b = np.resize(_as_array(v), 2 * n1 + n2)
    best = 0
    for s in range(n2):
        eq = a == b[s:s + 2 * n1]
        best = max(best, _max_true_run(eq))
    return min(best, n1, n2)


def locate_cyclic(pattern: Sequence[int], host: Sequence[int]) -> list[int]:
    """Cyclic offsets of ``host`` at which ``pattern`` occurs (len <= |host|)."""
    n, m = len(host), len(pattern)
    if m == 0 or m > n:
        return []
    doubled = tuple(host) + tuple(host)
    pat = tuple(pattern)
    return [j for j in range(n) if doubled[j:j + m] == pat]


@dataclass(frozen=True)
class Fragment:
    """A maximal subword of a host word matching a relator fraction.

    ``start``/``end`` index into the host word; the matched subword occurs
    in orbit ``orbit`` (index into the piece index's orbit list) at cyclic
    offset ``offset`` of the orbit representative.
    """

    start: int
    end: int
    orbit: int
    offset: int

    def __len__(self) -> int:
        return self.end - self.start


class PieceIndex:
    """Common-subword statistics over a symmetrized relator set.

    Elements of the set are grouped into rotation orbits; repeats inside one
    orbit and common subwords across distinct orbits are the two kinds of
    piece.  Comparing a word with its own rotations would make every
    multi-letter relator fail, so rotation-mates are handled by the
    intra-orbit statistic only.
    """

    def __init__(self, relators: "object"):
        # relators: a SymmetrizedSet (duck-typed to avoid an import cycle)
        self.source = relators
        self.orbit_reps: list[Word] = list(relators.orbit_reps)
        self._intra: list[int] = [max_cyclic_repeat(r) for r in self.orbit_reps]
        k = len(self.orbit_reps)
        self._inter = np.zeros((k, k), dtype=np.int64)
        for i in range(k):
            for j in range(i + 1, k):
                m = max_common_cyclic(self.orbit_reps[i], self.orbit_reps[j])
                self._inter[i, j] = self._inter[j, i] = m
        self._fragment_tables: dict[tuple[Fraction, int], dict] = {}

    @property
    def num_orbits(self) -> int:
        return len(self.orbit_reps)

    def intra_max(self, orbit: int) -> int:
        return self._intra[orbit]

    def inter_max(self, o1: int, o2: int) -> int:
        if o1 == o2:
            raise InputError("inter_max needs two distinct orbits")
        return int(self._inter[o1, o2])

    def max_piece(self, orbit: int) -> int:
        """Max piece length over all pieces touching this orbit."""
        best = self._intra[orbit]
        if self.num_orbits > 1:
            row = self._inter[orbit].copy()
            row[orbit] = 0
            best = max(best, int(row.max()))
        return best

    def locate(self, query: Sequence[int]) -> list[tuple[int, int]]:
        """All (orbit, cyclic offset) occurrences of ``query`` in the set."""
        out = []
        for o, rep in enumerate(self.orbit_reps):
            for j in locate_cyclic(query, rep):
                out.append((o, j))
        return out

    def _window_table(self, orbit: int, lo: int) -> dict[Word, list[int]]:
        key = (Fraction(lo), orbit)
        tab = self._fragment_tables.get(key)
        if tab is None:
            rep = self.orbit_reps[orbit]
            n = len(rep)
            doubled = rep + rep
            tab = {}
            for j in range(n):
                tab.setdefault(doubled[j:j + lo], []).append(j)
            self._fragment_tables[key] = tab
        return tab

    def fragments(self, w: Sequence[int], eta: Fraction) -> list[Fragment]:
        """Maximal subwords of ``w`` that are an eta-fraction of a relator.

        A fragment matches a subword ``u`` of some orbit representative ``v``
        with ``eta*|v| <= |u| <= |v|/2``.  Maximality is with respect to
        interval inclusion in ``w``; result is sorted by start position.
        """
        if not (0 < eta <= Fraction(1, 2)):
            raise InputError(f"eta must lie in (0, 1/2], got {eta}")
        w = tuple(w)
        if not is_reduced(w):
            raise InputError("fragments expects a freely reduced word")
        found: list[Fragment] = []
        for o, rep in enumerate(self.orbit_reps):
            n = len(rep)
            lo = max(1, int(math.ceil(eta * n)))
            hi = n // 2
            if lo > hi or lo > len(w):
                continue
            doubled = rep + rep
            table = self._window_table(o, lo)
            for i in range(len(w) - lo + 1):
                hits = table.get(w[i:i + lo])
                if not hits:
                    continue
                for j in hits:
                    m = lo
                    while m < hi and i + m < len(w) and doubled[j + m] == w[i + m]:
                        m += 1
                    found.append(Fragment(i, i + m, o, j % n))
        return _prune_to_maximal(found)


def _prune_to_maximal(frags: list[Fragment]) -> list[Fragment]:
    """Drop fragments strictly contained in another; dedupe equal intervals."""
    frags = sorted(frags, key=lambda f: (f.start, -f.end, f.orbit, f.offset))
    out: list[Fragment] = []
    best_end = -1
    seen: set[tuple[int, int]] = set()
    for f in frags:
        if f.end <= best_end:
            continue
        if (f.start, f.end) in seen:
            continue
        seen.add((f.start, f.end))
        out.append(f)
        best_end = f.end
    return out


def build_piece_index(relators) -> PieceIndex:
    """Index a symmetrized relator set for piece queries."""
    if not getattr(relators, "is_symmetrized", False):
        raise ContractError("build_piece_index requires a symmetrized set")
    return PieceIndex(relators)


def eta_fragments(w: Sequence[int], idx: PieceIndex, eta: Fraction) -> list[Fragment]:
    """Operation form of :meth:`PieceIndex.fragments`."""
    return idx.fragments(w, Fraction(eta))

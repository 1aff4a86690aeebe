"""Relator families, symmetrization and the C'(lambda) checker.

A presentation is an alphabet, a (possibly infinite) relator family and an
exact rational lambda.  Infinite families are materialized up to a length
bound; the bound needed for ball computations of a given radius comes from
:func:`truncation_bound`.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .words import (
    Alphabet,
    ContractError,
    InputError,
    PieceIndex,
    Word,
    build_piece_index,
    canonical_rotation_index,
    cyclic_reduce,
    free_reduce,
    invert,
    is_cyclically_reduced,
    rotate,
    rotations,
)


class RelatorFamily:
    """Base class: a finite or infinite ordered family of relators."""

    kind = "abstract"

    def materialize_upto(self, length_bound: int) -> list[Word]:
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class ExplicitFamily(RelatorFamily):
    words: tuple[Word, ...]
    kind = "explicit"

    def __post_init__(self):
        for i, w in enumerate(self.words):
            if len(w) == 0:
                raise InputError(f"relator {i} is empty")
            if not is_cyclically_reduced(w):
                raise InputError(f"relator {i} is not cyclically reduced: {w}")

    def materialize_upto(self, length_bound: int) -> list[Word]:
        return [w for w in self.words if len(w) <= length_bound]

    def describe(self) -> str:
        return f"explicit({len(self.words)} relators)"


@dataclass(frozen=True)
class BlocksFamily(RelatorFamily):
    """The infinite family r_n = prod_{i=1..k} a * b^(k*n + i), n >= 1.

    Relator lengths grow strictly in n, so truncation by length terminates.
    Over the alphabet (a, b); requires k >= 1.
    """

    k: int
    n_max: int | None = None
    kind = "blocks"

    def __post_init__(self):
        if self.k < 1:
            raise InputError("blocks family needs k >= 1")

    def relator(self, n: int) -> Word:
        a, b = 0, 2
        out: list[int] = []
        for i in range(1, self.k + 1):
            out.append(a)
            out.extend([b] * (self.k * n + i))
        return tuple(out)

    def length(self, n: int) -> int:
        return self.k + self.k * self.k * n + self.k * (self.k + 1) // 2

    def materialize_upto(self, length_bound: int) -> list[Word]:
        out = []
        n = 1
        while self.length(n) <= length_bound and (self.n_max is None or n <= self.n_max):
            out.append(self.relator(n))
            n += 1
        return out

    def describe(self) -> str:
        rng = "auto" if self.n_max is None else f"1..{self.n_max}"
        return f"blocks(k={self.k}, n={rng})"


@dataclass(frozen=True)
class Origin:
    """Where a symmetrized element came from: base relator, rotation, sign."""

    family_index: int
    rotation: int
    sign: int  # +1 for the relator, -1 for its inverse


class SymmetrizedSet:
    """All rotations and inverses of a list of base relators, deduplicated.

    Elements are linear words.  They are grouped into rotation orbits; an
    orbit and the orbit of its inverse are distinct unless they coincide as
    sets.  ``origin`` maps each element to one witness derivation.
    """

    is_symmetrized = True

    def __init__(self, base: Sequence[Word]):
        for i, w in enumerate(base):
            if len(w) == 0 or not is_cyclically_reduced(w):
                raise InputError(f"base relator {i} must be nonempty and cyclically reduced")
        self.base: tuple[Word, ...] = tuple(base)
        elements: dict[Word, Origin] = {}
        orbit_of: dict[Word, int] = {}
        orbit_reps: list[Word] = []
        rep_index: dict[Word, int] = {}
        for fi, w in enumerate(base):
            for sign, word in ((+1, w), (-1, invert(w))):
                rep = rotate(word, canonical_rotation_index(word))
                if rep not in rep_index:
                    rep_index[rep] = len(orbit_reps)
                    orbit_reps.append(rep)
                o = rep_index[rep]
                for k in range(len(word)):
                    r = rotate(word, k)
                    if r not in elements:
                        elements[r] = Origin(fi, k, sign)
                        orbit_of[r] = o
        self.elements: tuple[Word, ...] = tuple(elements)
        self.origin: dict[Word, Origin] = elements
        self.orbit_of: dict[Word, int] = orbit_of
        self.orbit_reps: list[Word] = orbit_reps
        self._piece_index: PieceIndex | None = None

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, w: Word) -> bool:
        return tuple(w) in self.origin

    @property
    def max_length(self) -> int:
        return max((len(w) for w in self.base), default=0)

    @property
    def min_length(self) -> int:
        return min((len(w) for w in self.base), default=0)

    def piece_index(self) -> PieceIndex:
        if self._piece_index is None:
            self._piece_index = build_piece_index(self)
        return self._piece_index

    def inverse_orbit(self, orbit: int) -> int:
        rep = self.orbit_reps[orbit]
        return self.orbit_of[rotate(invert(rep), canonical_rotation_index(invert(rep)))]


def symmetrize(family: RelatorFamily | Sequence[Word], length_bound: int) -> SymmetrizedSet:
    """Symmetrized closure of the family members of length <= length_bound."""
    if length_bound < 0:
        raise InputError("length_bound must be >= 0")
    if isinstance(family, RelatorFamily):
        base = family.materialize_upto(length_bound)
    else:
        base = [w for w in family if len(w) <= length_bound]
        for i, w in enumerate(base):
            if not is_cyclically_reduced(w):
                raise InputError(f"relator {i} is not cyclically reduced")
    return SymmetrizedSet(base)


def materialize(family: RelatorFamily, length_bound: int) -> list[Word]:
    """Family members of length <= bound, by nondecreasing length then index.

    This ordering is the global relator enumeration r_1, r_2, ... used by the
    quasimorphism construction.
    """
    if length_bound < 0:
        raise InputError("length_bound must be >= 0")
    words = family.materialize_upto(length_bound)
    lengths = [len(w) for w in words]
    if isinstance(family, BlocksFamily) or not isinstance(family, ExplicitFamily):
        if any(lengths[i] > lengths[i + 1] for i in range(len(lengths) - 1)):
            raise ContractError("template family must have nondecreasing relator lengths")
    order = sorted(range(len(words)), key=lambda i: (lengths[i], i))
    return [words[i] for i in order]


@dataclass(frozen=True)
class PieceWitness:
    """A re-verifiable piece: a subword occurring at two distinct places."""

    kind: str  # "repeat" (one orbit) or "common" (two orbits)
    orbit1: int
    orbit2: int
    subword: Word
    offset1: int
    offset2: int

    def verify(self, sym: SymmetrizedSet) -> bool:
        r1 = sym.orbit_reps[self.orbit1]
        r2 = sym.orbit_reps[self.orbit2]
        m = len(self.subword)
        if m > len(r1) or m > len(r2):
            return False
        d1 = r1 + r1
        d2 = r2 + r2
        ok = d1[self.offset1:self.offset1 + m] == self.subword == d2[self.offset2:self.offset2 + m]
        if self.kind == "repeat":
            ok = ok and self.orbit1 == self.orbit2 and self.offset1 != self.offset2
        else:
            ok = ok and self.orbit1 != self.orbit2
        return ok


@dataclass(frozen=True)
class PieceReport:
    verdict: bool
    worst_ratio: Fraction
    witnesses: tuple[PieceWitness, ...] = ()
    length_bound: int = 0

    @property
    def passed(self) -> bool:
        return self.verdict


def _repeat_witness(rep: Word, want: int) -> tuple[int, int] | None:
    """Offsets of two distinct cyclic occurrences of some subword of length want."""
    n = len(rep)
    a = np.asarray(rep, dtype=np.int16)
    for d in range(1, n):
        eq = a == np.roll(a, -d)
        if eq.all():
            if want <= n - math.gcd(d, n):
                return 0, d
            continue
        mask = np.concatenate([eq, eq])
        run = 0
        for pos in range(2 * n):
            run = run + 1 if mask[pos] else 0
            if run >= want:
                start = (pos - want + 1) % n
                return start, (start + d) % n
    return None


def _common_witness(r1: Word, r2: Word, want: int) -> tuple[int, int] | None:
    d1 = r1 + r1
    table: dict[Word, int] = {}
    for j in range(len(r2)):
        table.setdefault((r2 + r2)[j:j + want], j)
    for i in range(len(r1)):
        j = table.get(d1[i:i + want])
        if j is not None:
            return i, j
    return None


def check_c_prime(sym: SymmetrizedSet, lam: Fraction, max_witnesses: int = 10) -> PieceReport:
    """Check the metric small cancellation condition at the given lambda.

    Pieces are (a) subwords repeated at two distinct cyclic positions of one
    relator and (b) common subwords of two rotation-distinct relators; the
    condition holds when every piece is strictly shorter than lambda times
    the length of each relator carrying it.
    """
    lam = Fraction(lam)
    idx = sym.piece_index()
    worst = Fraction(0)
    failures: list[tuple[Fraction, str, int, int, int]] = []
    for o, rep in enumerate(idx.orbit_reps):
        n = len(rep)
        m = idx.intra_max(o)
        if m:
            ratio = Fraction(m, n)
            worst = max(worst, ratio)
            if ratio >= lam:
                failures.append((ratio, "repeat", o, o, m))
    for o1 in range(idx.num_orbits):
        for o2 in range(o1 + 1, idx.num_orbits):
            m = idx.inter_max(o1, o2)
            if m:
                nmin = min(len(idx.orbit_reps[o1]), len(idx.orbit_reps[o2]))
                ratio = Fraction(m, nmin)
                worst = max(worst, ratio)
                if ratio >= lam:
                    failures.append((ratio, "common", o1, o2, m))
    failures.sort(key=lambda t: (-t[0], t[1], t[2], t[3]))
    witnesses = []
    for ratio, kind, o1, o2, m in failures[:max_witnesses]:
        if kind == "repeat":
            pos = _repeat_witness(sym.orbit_reps[o1], m)
        else:
            pos = _common_witness(sym.orbit_reps[o1], sym.orbit_reps[o2], m)
        if pos is None:
            continue
        rep1 = sym.orbit_reps[o1]
        sub = (rep1 + rep1)[pos[0]:pos[0] + m]
        witnesses.append(PieceWitness(kind, o1, o2, sub, pos[0], pos[1]))
    return PieceReport(
        verdict=not failures,
        worst_ratio=worst,
        witnesses=tuple(witnesses),
        length_bound=sym.max_length,
    )


def truncation_bound(radius: int, lam: Fraction) -> int:
    """Relator length below which all relators relevant to B(1, radius) lie.

    Any nonempty freely reduced word of length <= 2*radius + 2 representing
    the identity contains more than (1 - 3*lambda) of some relator, so
    equality tests inside the ball only need relators shorter than
    ceil((2*radius + 2) / (1 - 3*lambda)).
    """
    lam = Fraction(lam)
    if radius < 0:
        raise InputError("radius must be >= 0")
    if lam >= Fraction(1, 6):
        raise InputError("truncation bound needs lambda < 1/6")
    return int(math.ceil(Fraction(2 * radius + 2) / (1 - 3 * lam)))


class Presentation:
    """Alphabet + relator family + exact lambda, with cached certificates."""

    def __init__(self, alphabet: Alphabet, family: RelatorFamily, lam: Fraction, name: str = ""):
        lam = Fraction(lam)
        if not (0 < lam < 1):
            raise InputError("lambda must lie in (0, 1)")
        self.alphabet = alphabet
        self.family = family
        self.lam = lam
        self.name = name or family.describe()
        self._sym_cache: dict[int, SymmetrizedSet] = {}
        self._relator_cache: dict[int, list[Word]] = {}
        self._certificates: dict[int, PieceReport] = {}

    def relators_upto(self, length_bound: int) -> list[Word]:
        if length_bound not in self._relator_cache:
            self._relator_cache[length_bound] = materialize(self.family, length_bound)
        return self._relator_cache[length_bound]

    def symmetrized(self, length_bound: int) -> SymmetrizedSet:
        if length_bound not in self._sym_cache:
            self._sym_cache[length_bound] = SymmetrizedSet(self.relators_upto(length_bound))
        return self._sym_cache[length_bound]

    def certify(self, length_bound: int) -> PieceReport:
        """Run the checker on the truncated symmetrized set; cache the report."""
        if length_bound not in self._certificates:
            self._certificates[length_bound] = check_c_prime(self.symmetrized(length_bound), self.lam)
        return self._certificates[length_bound]

    def is_certified(self, length_bound: int) -> bool:
        return self.certify(length_bound).passed

    def require_certified(self, length_bound: int, max_lambda: Fraction | None = None) -> SymmetrizedSet:
        rep = self.certify(length_bound)
        if not rep.passed:
            raise ContractError(
                f"presentation {self.name!r} is not C'({self.lam}) up to length {length_bound} "
                f"(worst piece ratio {rep.worst_ratio})"
            )
        if max_lambda is not None and self.lam > Fraction(max_lambda):
            raise ContractError(
                f"operation needs lambda <= {max_lambda}, presentation has {self.lam}"
            )
        return self.symmetrized(length_bound)

    def ball_relators(self, radius: int) -> SymmetrizedSet:
        """Symmetrized relators sufficient for equality tests in B(1, radius)."""
        return self.symmetrized(truncation_bound(radius, self.lam) - 1)

    def digest(self) -> str:
        payload = f"{self.alphabet.names}|{self.family.describe()}|{self.lam}"
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


# Built-in presentations -----------------------------------------------------

#: Rank-2 relator found by randomized search over closed trails in the
#: reduced-trigram graph: its 18 cyclic trigrams and those of its inverse
#: are 36 pairwise distinct words, i.e. all reduced trigrams occur exactly
#: once.  Pieces therefore have length exactly 2 and the checker certifies
#: C'(1/8) (worst ratio 2/18 = 1/9).  No symmetrized set over 2 generators
#: with relators shorter than this can satisfy C'(1/8): a relator of length
#: L and its inverse need 2L distinct reduced trigrams and only 36 exist.
SHORT8_RELATOR = "abbabAbbbAAABabaBa"


def short8() -> Presentation:
    """The short-relator C'(1/8) presentation used for exhaustive ball tests."""
    ab = Alphabet(("a", "b"))
    fam = ExplicitFamily((ab.parse(SHORT8_RELATOR),))
    return Presentation(ab, fam, Fraction(1, 8), name="short8")


def blocks(k: int = 32, n_max: int | None = None) -> Presentation:
    """The blocks family at lambda = 1/12.

    The checker certifies C'(1/12) exactly for k >= 32.  The worst piece is
    b^(2k-1) a b^(2k) (suffix of one b-run, an a, and the full next run),
    shared by r_1 and r_2; at k=31 its ratio against |r_1| is exactly 1/12,
    which fails the strict inequality, and k=32 is the first pass.
    """
    ab = Alphabet(("a", "b"))
    return Presentation(ab, BlocksFamily(k, n_max), Fraction(1, 12), name=f"blocks(k={k})")


def free_presentation(rank: int = 2) -> Presentation:
    names = tuple(chr(ord("a") + i) for i in range(rank))
    return Presentation(Alphabet(names), ExplicitFamily(()), Fraction(1, 10), name=f"free({rank})")


# Presentation text files ----------------------------------------------------

FAMILY_REGISTRY = {"blocks": BlocksFamily}


def parse_presentation_text(text: str, source: str = "<string>") -> Presentation:
    """Parse the presentation file format.

    Lines: ``alphabet: a b``, ``lambda: p/q``, ``relator: <word>`` (any
    number), ``family: <name> key=value ... n=<lo>..<hi|auto>``; ``#`` starts
    a comment.  Exactly one alphabet line and one lambda line are required.
    """
    alphabet: Alphabet | None = None
    lam: Fraction | None = None
    relator_texts: list[tuple[int, str]] = []
    family_specs: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise InputError(f"{source}:{lineno}: expected 'key: value', got {raw!r}")
        key, _, value = line.partition(":")
        key = key.strip()
        value = value.strip()
        if key == "alphabet":
            if alphabet is not None:
                raise InputError(f"{source}:{lineno}: duplicate alphabet line")
            alphabet = Alphabet(tuple(value.split()))
        elif key == "lambda":
            if lam is not None:
                raise InputError(f"{source}:{lineno}: duplicate lambda line")
            try:
                lam = Fraction(value)
            except (ValueError, ZeroDivisionError):
                raise InputError(f"{source}:{lineno}: bad rational {value!r}") from None
        elif key == "relator":
            relator_texts.append((lineno, value))
        elif key == "family":
            family_specs.append((lineno, value))
        else:
            raise InputError(f"{source}:{lineno}: unknown key {key!r}")
    if alphabet is None:
        raise InputError(f"{source}: missing alphabet line")
    if lam is None:
        raise InputError(f"{source}: missing lambda line")

    explicit: list[Word] = []
    for lineno, t in relator_texts:
        try:
            w = alphabet.parse(t)
        except InputError as e:
            raise InputError(f"{source}:{lineno}: {e}") from None
        r = cyclic_reduce(w)
        if r != w:
            raise InputError(f"{source}:{lineno}: relator {t!r} is not cyclically reduced")
        if not w:
            raise InputError(f"{source}:{lineno}: empty relator")
        explicit.append(w)

    family: RelatorFamily
    if family_specs:
        if len(family_specs) > 1 or explicit:
            raise InputError(f"{source}: at most one family line, not mixed with relator lines")
        lineno, spec = family_specs[0]
        parts = spec.split()
        name = parts[0] if parts else ""
        if name == "short8":
            family = ExplicitFamily((alphabet.parse(SHORT8_RELATOR),))
        elif name in FAMILY_REGISTRY:
            kwargs: dict[str, int] = {}
            n_max: int | None = None
            for p in parts[1:]:
                if "=" not in p:
                    raise InputError(f"{source}:{lineno}: bad family parameter {p!r}")
                k, _, v = p.partition("=")
                if k == "n":
                    if v == "auto" or v.endswith("..auto"):
                        n_max = None
                    else:
                        lo, _, hi = v.partition("..")
                        if (lo and lo != "1") or not hi:
                            raise InputError(f"{source}:{lineno}: family ranges start at 1: {p!r}")
                        n_max = int(hi)
                else:
                    kwargs[k] = int(v)
            family = FAMILY_REGISTRY[name](n_max=n_max, **kwargs)
        else:
            raise InputError(f"{source}:{lineno}: unknown family {name!r}")
    else:
        family = ExplicitFamily(tuple(explicit))
    return Presentation(alphabet, family, lam, name=source)


def parse_presentation_file(path: str) -> Presentation:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_presentation_text(fh.read(), source=path)

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smallcancel.words import (
    Alphabet,
    CyclicWord,
    InputError,
    build_piece_index,
    cyclic_reduce,
    eta_fragments,
    free_reduce,
    invert,
    is_reduced,
    max_cyclic_repeat,
    max_common_cyclic,
    rotations,
)
from smallcancel.presentation import SymmetrizedSet

from oracles import naive_eta_fragments, naive_intra_max, naive_inter_max

AB = Alphabet(("a", "b"))

words_st = st.lists(st.integers(min_value=0, max_value=3), max_size=14).map(tuple)
reduced_st = words_st.map(free_reduce)


def w(text: str):
    return AB.parse(text)


class TestFreeReduce:
    def test_empty(self):
        assert free_reduce(()) == ()

    def test_adjacent_cancellation(self):
        assert free_reduce(w("aAb")) == w("b")

    def test_nested_cancellation(self):
        abc = Alphabet(("a", "b", "c"))
        assert free_reduce(abc.parse("abBAc")) == abc.parse("c")

    @given(words_st)
    def test_idempotent(self, word):
        r = free_reduce(word)
        assert free_reduce(r) == r
        assert is_reduced(r)

    @given(words_st)
    def test_length_and_parity(self, word):
        r = free_reduce(word)
        assert len(r) <= len(word)
        assert (len(word) - len(r)) % 2 == 0


class TestInvert:
    def test_examples(self):
        assert invert(()) == ()
        assert invert(w("a")) == w("A")
        assert invert(w("ab")) == w("BA")

    @given(reduced_st)
    def test_involution(self, word):
        assert invert(invert(word)) == word

    @given(reduced_st)
    def test_inverse_cancels(self, word):
        assert free_reduce(word + invert(word)) == ()


class TestCyclic:
    def test_cyclic_reduce(self):
        assert cyclic_reduce(w("Aba")) == w("b")
        assert cyclic_reduce(w("ab")) == w("ab")
        assert cyclic_reduce(w("aBbA")) == ()

    def test_canonical_rotation(self):
        c = CyclicWord(w("ba"))
        assert c.canonical == w("ab")

    def test_rotations_collapse_for_powers(self):
        assert rotations(w("aaaa")) == [w("aaaa")]

    def test_not_cyclically_reduced_rejected(self):
        with pytest.raises(InputError):
            CyclicWord(w("abA"))


class TestPieceIndex:
    def test_empty_set(self):
        sym = SymmetrizedSet(())
        idx = build_piece_index(sym)
        assert idx.num_orbits == 0

    def test_a7_repeat_is_six(self):
        sym = SymmetrizedSet((w("aaaaaaa"),))
        idx = sym.piece_index()
        assert idx.num_orbits == 2
        assert all(idx.intra_max(o) == 6 for o in range(2))
        assert idx.inter_max(0, 1) == 0

    def test_locate(self):
        sym = SymmetrizedSet((w("aaaaaaa"),))
        idx = sym.piece_index()
        occurrences = idx.locate(w("aaa"))
        assert len(occurrences) == 7  # one per offset of the a^7 orbit

    @given(st.lists(st.integers(0, 3), min_size=2, max_size=12).map(tuple))
    @settings(max_examples=150, deadline=None)
    def test_intra_matches_oracle(self, word):
        word = cyclic_reduce(word)
        if len(word) < 2:
            return
        assert max_cyclic_repeat(word) == naive_intra_max(word)

    @given(
        st.lists(st.integers(0, 3), min_size=1, max_size=12).map(tuple),
        st.lists(st.integers(0, 3), min_size=1, max_size=12).map(tuple),
    )
    @settings(max_examples=150, deadline=None)
    def test_inter_matches_oracle(self, u, v):
        u, v = cyclic_reduce(u), cyclic_reduce(v)
        if not u or not v:
            return
        assert max_common_cyclic(u, v) == naive_inter_max(u, v)


class TestEtaFragments:
    def setup_method(self):
        self.rel = w("abbabAbbbAAABabaBa")
        self.sym = SymmetrizedSet((self.rel,))
        self.idx = self.sym.piece_index()

    def test_eta_out_of_range(self):
        with pytest.raises(InputError):
            eta_fragments(w("ab"), self.idx, Fraction(3, 5))

    def test_no_overlap_word(self):
        # a word over a disjoint alphabet region cannot match; use a free letter pair
        sym = SymmetrizedSet((w("aaaaaaa"),))
        frags = sym.piece_index().fragments(w("bbb"), Fraction(1, 4))
        assert frags == []

    def test_half_prefix_is_single_fragment(self):
        half = self.rel[: len(self.rel) // 2]
        frags = self.idx.fragments(half, Fraction(1, 4))
        assert len(frags) == 1
        f = frags[0]
        assert (f.start, f.end) == (0, len(half))

    def test_full_relator_fragments_capped_at_half(self):
        frags = self.idx.fragments(self.rel, Fraction(1, 4))
        n = len(self.rel)
        assert frags
        assert all(len(f) == n // 2 for f in frags)
        # every half-length window appears
        assert [(f.start, f.end) for f in frags] == [(i, i + n // 2) for i in range(n - n // 2 + 1)]

    def test_fragment_bounds_and_witnesses(self):
        word = free_reduce(self.rel[2:11] + (1,))
        eta = Fraction(1, 4)
        frags = self.idx.fragments(word, eta)
        for f in frags:
            rep = self.idx.orbit_reps[f.orbit]
            assert eta * len(rep) <= len(f) <= Fraction(len(rep), 2)
            doubled = rep + rep
            assert doubled[f.offset:f.offset + len(f)] == word[f.start:f.end]

    @given(st.lists(st.integers(0, 3), max_size=12).map(tuple))
    @settings(max_examples=100, deadline=None)
    def test_matches_naive_oracle(self, word):
        word = free_reduce(word)
        eta = Fraction(1, 4)
        got = [(f.start, f.end) for f in self.idx.fragments(word, eta)]
        expected = naive_eta_fragments(word, list(self.idx.orbit_reps), eta)
        assert got == expected

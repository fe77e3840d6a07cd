import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carpetdim import (
    DigitWord,
    alternating_block_word,
    base_expansions,
    canonical_representative,
    digit_frequencies,
    empirical_row_frequencies,
    expansions_of,
    make_target,
    slice_dimension,
    target_from_word,
    validate_ifs,
)
from carpetdim.errors import (
    DegenerateExpansionError,
    EmptyCandidateSetError,
    FiniteTruncationError,
    NotInAttractorError,
    UndecidableDominanceError,
)

from conftest import VICSEK_PAIRS


class TestBaseExpansions:
    def test_zero_and_one(self):
        assert base_expansions(Fraction(0), 3) == [((), (0,))]
        assert base_expansions(Fraction(1), 3) == [((), (2,))]

    def test_third_has_two(self):
        exps = set(base_expansions(Fraction(1, 3), 3))
        assert exps == {((1,), (0,)), ((0,), (2,))}

    def test_half_base_three_single(self):
        assert base_expansions(Fraction(1, 2), 3) == [((), (1,))]

    def test_values_recovered(self):
        for num in range(0, 28):
            r = Fraction(num, 27)
            for pre, per in base_expansions(r, 3):
                w = DigitWord.periodic([(d, d) for d in pre], [(d, d) for d in per])
                assert w.point(3)[0] == r

    def test_float_rejected(self):
        ifs = validate_ifs(3, VICSEK_PAIRS)
        with pytest.raises(ValueError):
            expansions_of(ifs, 0.5, 0)


class TestExpansionsOf:
    def test_origin_unique(self, vicsek):
        assert expansions_of(vicsek, 0, 0) == {DigitWord.periodic([], [(0, 0)])}

    def test_one_third_pair(self, vicsek):
        got = expansions_of(vicsek, Fraction(1, 3), Fraction(1, 3))
        assert got == {
            DigitWord.periodic([(1, 1)], [(0, 0)]),
            DigitWord.periodic([(0, 0)], [(2, 2)]),
        }

    def test_point_off_attractor(self, vicsek):
        with pytest.raises(NotInAttractorError):
            expansions_of(vicsek, Fraction(1, 2), Fraction(1, 3))


class TestCanonicalRepresentative:
    def test_prefers_larger_row_products(self, vicsek):
        cands = {
            DigitWord.periodic([(1, 1)], [(0, 0)]),
            DigitWord.periodic([(0, 0)], [(2, 2)]),
        }
        assert canonical_representative(vicsek, cands) == DigitWord.periodic([(0, 0)], [(2, 2)])

    def test_singleton(self, vicsek):
        w = DigitWord.periodic([], [(1, 1)])
        assert canonical_representative(vicsek, [w]) == w

    def test_tied_products_break_on_origin_pair_count(self):
        # rows all the same size, so the running products agree everywhere;
        # the word carrying (0,0) forever must win
        ifs = validate_ifs(3, [(0, 0), (1, 0), (2, 0), (1, 1)])
        a = DigitWord.periodic([(1, 0)], [(0, 0)])  # x = 1/3 coded 0.10...
        b = DigitWord.periodic([(0, 0)], [(2, 0)])  # x = 1/3 coded 0.02...
        assert canonical_representative(ifs, [a, b]) == a

    def test_empty_candidates(self, vicsek):
        with pytest.raises(EmptyCandidateSetError):
            canonical_representative(vicsek, [])

    def test_truncation_rejected(self, vicsek):
        with pytest.raises(UndecidableDominanceError):
            canonical_representative(vicsek, [DigitWord.truncation([(0, 0)])])

    def test_distinct_points_rejected(self, vicsek):
        with pytest.raises(ValueError):
            canonical_representative(
                vicsek,
                [DigitWord.periodic([], [(0, 0)]), DigitWord.periodic([], [(1, 1)])],
            )

    def test_full_tie_raises_instead_of_guessing(self):
        # single-row system: equal products everywhere and no marked pair
        # appears in either coding, so nothing separates them
        ifs = validate_ifs(3, [(0, 1), (1, 1), (2, 1)])
        a = DigitWord.periodic([(1, 1)], [(0, 1)])
        b = DigitWord.periodic([(0, 1)], [(2, 1)])
        assert a.point(3)[0] == b.point(3)[0] == Fraction(1, 3)
        with pytest.raises(UndecidableDominanceError):
            canonical_representative(ifs, [a, b])

    def test_selection_preserves_the_point(self, vicsek):
        cands = expansions_of(vicsek, Fraction(1, 3), Fraction(1, 3))
        chosen = canonical_representative(vicsek, cands)
        pts = {c.point(3) for c in cands}
        assert chosen.point(3) in pts and len(pts) == 1


class TestDigitFrequencies:
    def test_constant_word(self, vicsek):
        freqs = digit_frequencies(vicsek, DigitWord.periodic([], [(0, 0)]))
        assert freqs == {0: 1, 1: 0, 2: 0}

    def test_alternating_rows(self, vicsek):
        freqs = digit_frequencies(vicsek, DigitWord.periodic([], [(0, 0), (0, 2)]))
        assert freqs[0] == Fraction(1, 2) and freqs[2] == Fraction(1, 2)

    def test_preperiod_ignored(self, vicsek):
        freqs = digit_frequencies(vicsek, DigitWord.periodic([(0, 0)], [(2, 2)]))
        assert freqs[2] == 1

    def test_truncation_refused(self, vicsek):
        with pytest.raises(FiniteTruncationError):
            digit_frequencies(vicsek, DigitWord.truncation([(0, 0)]))

    def test_empirical_counts(self, vicsek):
        w = DigitWord.truncation([(0, 0), (0, 2), (0, 2), (1, 1)])
        freqs = empirical_row_frequencies(vicsek, w, 4)
        assert freqs == {0: Fraction(1, 4), 1: Fraction(1, 4), 2: Fraction(1, 2)}


@st.composite
def vicsek_periodic_words(draw):
    pairs = st.sampled_from(sorted(VICSEK_PAIRS))
    pre = draw(st.lists(pairs, max_size=3))
    per = draw(st.lists(pairs, min_size=1, max_size=4))
    return DigitWord.periodic(pre, per)


@given(vicsek_periodic_words())
@settings(max_examples=80, deadline=None)
def test_frequencies_sum_to_one(vicsek_word):
    ifs = validate_ifs(3, VICSEK_PAIRS)
    assert sum(digit_frequencies(ifs, vicsek_word).values()) == 1


class TestSliceDimension:
    def test_bottom_row_is_cantor(self, vicsek):
        result = slice_dimension(vicsek, DigitWord.periodic([], [(0, 0)]))
        assert result.liminf_attained
        assert abs(result.value - math.log(2) / math.log(3)) < 1e-15

    def test_center_slice_is_a_point(self, vicsek):
        result = slice_dimension(vicsek, DigitWord.periodic([], [(1, 1)]))
        assert result.value == 0.0

    def test_second_expansion_heights_refused(self, vicsek):
        with pytest.raises(DegenerateExpansionError):
            slice_dimension(vicsek, DigitWord.periodic([(1, 1)], [(0, 0)]))

    def test_truncation_gets_windowed_estimate(self, vicsek):
        w = DigitWord.truncation([(0, 0)] * 12)
        result = slice_dimension(vicsek, w)
        assert not result.liminf_attained
        assert abs(result.value - math.log(2) / math.log(3)) < 1e-12

    def test_preperiod_invariance(self, vicsek):
        base = DigitWord.periodic([], [(0, 0), (0, 2), (1, 1)])
        padded = DigitWord.periodic([(2, 2), (1, 1)], [(0, 0), (0, 2), (1, 1)])
        assert slice_dimension(vicsek, base).value == slice_dimension(vicsek, padded).value


@given(vicsek_periodic_words())
@settings(max_examples=80, deadline=None)
def test_slice_bounded_by_one_and_attractor_dimension(word):
    ifs = validate_ifs(3, VICSEK_PAIRS)
    freqs = digit_frequencies(ifs, word)
    if freqs.get(0) == 1 or freqs.get(2) == 1:
        return
    value = slice_dimension(ifs, word).value
    assert -1e-15 <= value <= 1.0 + 1e-15
    assert value <= ifs.attractor_dimension() + 1e-15


def _slice_count(ifs, word, n):
    """Independent oracle: enumerate admissible column strings of length n."""
    count = 0
    rows = [word.row_digit(i) for i in range(1, n + 1)]
    for cols in itertools.product(range(ifs.base), repeat=n):
        if all((u, v) in ifs.digits for u, v in zip(cols, rows)):
            count += 1
    return count


@pytest.mark.parametrize(
    "system_pairs,base,word",
    [
        (VICSEK_PAIRS, 3, DigitWord.periodic([], [(0, 0), (0, 2)])),
        (VICSEK_PAIRS, 3, DigitWord.periodic([(1, 1)], [(0, 2), (2, 2), (1, 1)])),
        ([(0, 0), (1, 1), (1, 0)], 2, DigitWord.periodic([], [(1, 1), (0, 0)])),
    ],
)
def test_slice_against_counting_oracle(system_pairs, base, word):
    ifs = validate_ifs(base, system_pairs)
    q = len(word.period)
    pre = len(word.preperiod)
    n1, n2 = pre + 2 * q, pre + 3 * q
    c1, c2 = _slice_count(ifs, word, n1), _slice_count(ifs, word, n2)
    oracle = (math.log(c2) - math.log(c1)) / (q * math.log(base))
    assert abs(slice_dimension(ifs, word).value - oracle) < 1e-12


class TestTargets:
    def test_center_target(self, vicsek):
        t = make_target(vicsek, Fraction(1, 2), Fraction(1, 2))
        assert t.word == DigitWord.periodic([], [(1, 1)])
        assert t.frequency_map()[1] == 1
        assert t.point == (Fraction(1, 2), Fraction(1, 2))

    def test_origin_target_canonical(self, vicsek):
        t = make_target(vicsek, Fraction(1, 3), Fraction(1, 3))
        assert t.word == DigitWord.periodic([(0, 0)], [(2, 2)])

    def test_truncation_target_has_no_frequencies(self, corner):
        word = alternating_block_word(depth=64)
        t = target_from_word(corner, word)
        assert not t.frequencies_exist
        assert t.point is None

    def test_block_word_layout(self):
        w = alternating_block_word(block_base=4, depth=70)
        assert [tuple(w.pair_at(i)) for i in (1, 3)] == [(0, 0), (0, 0)]
        assert [tuple(w.pair_at(i)) for i in (4, 15)] == [(0, 2), (0, 2)]
        assert [tuple(w.pair_at(i)) for i in (16, 63)] == [(0, 0), (0, 0)]
        assert tuple(w.pair_at(64)) == (0, 2)

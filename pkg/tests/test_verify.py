import itertools
import random
from fractions import Fraction

import pytest

import carpetdim.shrinking as shrinking
from carpetdim import (
    DigitWord,
    RateSchedule,
    build_cover,
    build_lower_bound_measure,
    brute_force_window_set,
    check_containment_backward,
    check_containment_forward,
    check_set_relation,
    exhaustive_relation_check,
    exhaustive_truncations,
    holder_exponent_samples,
    make_target,
    oracle_window_report,
    pattern_window_set,
    random_words,
    window_hit,
)
from carpetdim.errors import (
    BadBreakPointsError,
    DepthTooLargeError,
    EnumerationTooLargeError,
    RadiusTooSmallError,
    ThresholdNotMetError,
)

from carpetdim.verify import shifted_intervals


@pytest.fixture(scope="module")
def origin(vicsek):
    return make_target(vicsek, 0, 0)


@pytest.fixture(scope="module")
def corner_origin(corner):
    return make_target(corner, 0, 0)


class TestContainment:
    def test_exact_continuation_inside_and_member(self, vicsek, origin, linear12):
        n = 3
        word = DigitWord.periodic([(1, 1)] * 3, [(0, 0)])
        rep_f = check_containment_forward(vicsek, origin, linear12, n, [word])
        assert rep_f.passed and rep_f.details["inside"] == 1
        rep_b = check_containment_backward(vicsek, origin, linear12, n, [word])
        assert rep_b.passed and rep_b.details["window_hits"] == 1

    def test_double_deviation_outside_and_nonmember(self, vicsek, origin, linear12):
        n = 3
        word = DigitWord.periodic([(1, 1)] * 3, [(2, 2)])
        assert not window_hit(vicsek, origin, linear12, n, word)
        (xlo, _), _ = shifted_intervals(word, 3, n)
        assert abs(xlo - 0) > Fraction(1, 27)

    def test_random_sampling_has_no_violations(self, vicsek, origin, linear12):
        n = 4
        rng = random.Random(7)
        words = random_words(vicsek, origin, linear12, n, 800, n + 8 + 5, rng)
        rep_f = check_containment_forward(vicsek, origin, linear12, n, words)
        rep_b = check_containment_backward(vicsek, origin, linear12, n, words)
        assert rep_f.passed and rep_b.passed
        assert rep_b.details["window_hits"] > 0

    def test_small_exhaustive_corner(self, corner, corner_origin, linear12):
        words = list(exhaustive_truncations(corner, 8))
        assert len(words) == 3 ** 8
        rep_f = check_containment_forward(corner, corner_origin, linear12, 2, words)
        rep_b = check_containment_backward(corner, corner_origin, linear12, 2, words)
        assert rep_f.passed and rep_b.passed
        assert rep_f.details["inside"] > 0


class TestSetRelation:
    def test_interior_spot_samples(self, vicsek, linear12):
        target = make_target(vicsek, Fraction(4, 9), Fraction(4, 9))
        rng = random.Random(3)
        digits = sorted(vicsek.digits)
        words = [
            DigitWord.periodic((), [rng.choice(digits) for _ in range(9)])
            for _ in range(300)
        ]
        rep = check_set_relation(vicsek, target, linear12, 3, words)
        assert rep.passed and rep.details["interior"]

    def test_interior_threshold(self, vicsek, linear12):
        target = make_target(vicsek, Fraction(4, 9), Fraction(4, 9))
        with pytest.raises(ThresholdNotMetError):
            check_set_relation(vicsek, target, linear12, 1, [])

    def test_boundary_witness_carries_shift(self, vicsek, origin, linear12):
        # shifted point sits at 1 exactly; the witness translate is one box over
        n = 3
        word = DigitWord.periodic([(0, 0)] * 3, [(2, 2)])
        rep = check_set_relation(vicsek, origin, linear12, n, [word])
        assert rep.passed
        assert rep.details["nonzero_shift_witnesses"] >= 1

    def test_exhaustive_small_matches_general(self, vicsek, origin, linear12):
        fast = exhaustive_relation_check(vicsek, origin, linear12, 2, 4)
        digits = sorted(vicsek.digits)
        tails = [digits[0], digits[-1]]
        words = [
            DigitWord.periodic(p, (t,))
            for p in itertools.product(digits, repeat=4)
            for t in tails
        ]
        slow = check_set_relation(vicsek, origin, linear12, 2, words)
        assert fast.passed and slow.passed
        assert fast.checked == len(words)
        assert fast.details["nonzero_shift_witnesses"] == slow.details["nonzero_shift_witnesses"]
        assert fast.details["nonzero_shift_witnesses"] > 0

    def test_enumeration_guard(self, vicsek, origin, linear12):
        with pytest.raises(EnumerationTooLargeError):
            exhaustive_relation_check(vicsek, origin, linear12, 2, 30)


class TestWindowOracle:
    def test_vicsek_origin_small(self, vicsek, origin):
        sch = RateSchedule.from_tables([1, 2], [2, 4])
        for n in (1, 2):
            rep = oracle_window_report(vicsek, origin, sch, n)
            assert rep.passed, rep.failures

    def test_pattern_set_equals_brute_set(self, corner, corner_origin):
        sch = RateSchedule.from_tables([2, 2, 3], [3, 4, 5])
        for n in (1, 2, 3):
            assert pattern_window_set(corner, corner_origin, sch, n) == brute_force_window_set(
                corner, corner_origin, sch, n
            )

    def test_corrupted_predicate_is_caught(self, vicsek, origin, monkeypatch):
        # negative control: a predicate that refuses deviations shrinks the
        # brute-force side, and the oracle comparison must notice
        def exact_only(base, target_digits, word_digits):
            return tuple(target_digits) == tuple(word_digits)

        monkeypatch.setattr(shrinking, "axis_digits_admissible", exact_only)
        sch = RateSchedule.from_tables([1, 2], [2, 4])
        rep = oracle_window_report(vicsek, origin, sch, 2)
        assert not rep.passed
        assert rep.failures[0]["reason"] == "window sets differ"


class TestCover:
    def test_cover_matches_direct_enumeration(self, vicsek, origin, linear12):
        n, j = 2, 3
        family = build_cover(vicsek, origin, linear12, n, j)
        # oracle: walk every depth-6 truncation through the membership test
        corners = set()
        for word in exhaustive_truncations(vicsek, 6):
            if window_hit(vicsek, origin, linear12, n, word):
                digits = word.preperiod[: n + j]
                xn = yn = 0
                for u, v in digits:
                    xn = xn * 3 + u
                    yn = yn * 3 + v
                corners.add((Fraction(xn, 3 ** 5), Fraction(yn, 3 ** 5)))
        assert {box.corner for box in family.boxes} == corners
        assert len(family.boxes) <= family.cardinality_bound

    def test_minimal_stage_cover(self, vicsek, origin, linear12):
        family = build_cover(vicsek, origin, linear12, 1, 2)
        assert family.boxes and len(family.boxes) <= family.cardinality_bound

    def test_depth_range_validated(self, vicsek, origin, linear12):
        with pytest.raises(ValueError):
            build_cover(vicsek, origin, linear12, 2, 1)


def _direct_mass_table(builder, depth):
    """Independent oracle: apply the three mass rules by plain recursion."""
    ifs = builder.ifs
    schedule = builder.schedule
    bps = builder.break_points
    table = {(): Fraction(1)}
    for level in range(1, depth + 1):
        rule = None
        for n_k in bps:
            lam_k, xi_k = schedule.lam(n_k), schedule.xi(n_k)
            if n_k < level <= n_k + lam_k + 2:
                rule = ("point", builder.spines[n_k][level - n_k - 1])
                break
            if n_k + lam_k + 2 < level <= n_k + xi_k + 2:
                rule = ("row", builder.spines[n_k][level - n_k - 1].v)
                break
        nxt = {}
        for prefix, mass in table.items():
            if rule is None:
                for pair in ifs.sorted_digits():
                    nxt[prefix + (pair,)] = mass / len(ifs.digits)
            elif rule[0] == "point":
                nxt[prefix + (rule[1],)] = mass
            else:
                row = sorted(ifs.row_set(rule[1]))
                for pair in row:
                    nxt[prefix + (pair,)] = mass / len(row)
        table = nxt
    return table


@pytest.fixture(scope="module")
def measure(vicsek, linear12):
    origin = make_target(vicsek, 0, 0)
    return build_lower_bound_measure(vicsek, origin, linear12, [3, 17], 2)


class TestMeasure:
    def test_level_sums_are_exactly_one(self, measure):
        assert measure.depth == 17 + 34 + 2
        for m in range(1, measure.depth + 1):
            assert measure.level_sum(m) == 1

    def test_against_direct_recursion(self, measure):
        # level 13 spans all three phases: uniform, follow-the-word, row split
        table = _direct_mass_table(measure, 13)
        assert sum(table.values()) == 1
        for prefix, mass in list(table.items())[:500]:
            assert measure.mass(prefix) == mass
        enumerated = dict(measure.enumerate_level(13))
        assert enumerated == {p: m for p, m in table.items() if m > 0}
        assert sum(enumerated.values()) == 1

    def test_uniform_levels_before_first_break(self, measure):
        for prefix, mass in measure.enumerate_level(3):
            assert mass == Fraction(1, 125)

    def test_point_phase_mass_and_formula_agree(self, measure):
        for k in range(2):
            assert measure.point_phase_mass(k) == measure.point_phase_mass_explicit(k)

    def test_mass_bound_holds(self, measure):
        assert measure.mass_bound_holds(0)
        assert measure.mass_bound_holds(1)

    def test_break_point_conditions_enforced(self, vicsek, linear12):
        origin = make_target(vicsek, 0, 0)
        with pytest.raises(BadBreakPointsError):
            build_lower_bound_measure(vicsek, origin, linear12, [3, 12], 2)
        with pytest.raises(BadBreakPointsError):
            build_lower_bound_measure(vicsek, origin, linear12, [3, 17], Fraction(1, 2))

    def test_depth_guard(self, vicsek, linear12):
        origin = make_target(vicsek, 0, 0)
        with pytest.raises(DepthTooLargeError):
            build_lower_bound_measure(vicsek, origin, linear12, [3, 17], 2, depth=60)

    def test_support_word_has_positive_mass(self, measure):
        word = measure.support_word(measure.depth)
        assert measure.mass(word.preperiod[: measure.depth]) > 0

    def test_holder_exponents_clear_threshold(self, measure):
        points = [measure.support_word(measure.depth)]
        radii = [Fraction(1, 3 ** m) for m in range(4, measure.depth + 1)]
        samples = holder_exponent_samples(measure, points, radii)
        for s in samples:
            k = max(i for i, n_k in enumerate(measure.break_points) if n_k < s.level)
            threshold = 0.5 * measure.stage_values[measure.break_points[k]] - 0.05
            assert s.exponent >= threshold, (s.level, s.exponent, threshold)

    def test_point_phase_ball_mass_is_the_cylinder_mass(self, measure):
        # inside the follow-the-word phase the ball meets one positive box
        word = measure.support_word(measure.depth)
        level = measure.break_points[0] + 2
        r = Fraction(1, 3 ** level)
        (sample,) = holder_exponent_samples(measure, [word], [r])
        assert sample.ball_mass >= measure.point_phase_mass(0)
        assert sample.ball_mass <= 9 * measure.point_phase_mass(0)

    def test_radius_guards(self, measure):
        word = measure.support_word(measure.depth)
        with pytest.raises(RadiusTooSmallError):
            holder_exponent_samples(measure, [word], [Fraction(1, 3 ** (measure.depth + 1))])
        with pytest.raises(RadiusTooSmallError):
            holder_exponent_samples(measure, [word], [Fraction(2)])

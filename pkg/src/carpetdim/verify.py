"""Finite-depth verification of the cover and measure constructions.

Everything here runs in exact rational or integer arithmetic. Truncated
words are treated as intervals: inclusion tests shrink the rectangle by the
truncation slack and exclusion tests grow it, so no sample can be
misclassified by rounding. Eventually periodic samples are exact points.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .coding import TargetSpec
from .errors import (
    BadBreakPointsError,
    DepthTooLargeError,
    EnumerationTooLargeError,
    InsufficientDepthError,
    RadiusTooSmallError,
    ThresholdNotMetError,
)
from .grid import DigitPair, DyadicBox, GridIFS
from .schedules import RateSchedule
from .shrinking import (
    _StageWindow,
    _row_product,
    axis_window_patterns,
    stage_exponent,
    window_hit,
)
from .words import DigitWord

ENUMERATION_GUARD = 10 ** 7


@dataclass
class CheckReport:
    """Outcome of one verification pass."""

    name: str
    passed: bool
    checked: int
    skipped: int = 0
    failures: list[dict] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "skipped": self.skipped,
            "failures": self.failures[:20],
            "details": self.details,
        }


def _fail(report: CheckReport, word: DigitWord, reason: str) -> None:
    report.passed = False
    report.failures.append(
        {"word": {"preperiod": [list(p) for p in word.preperiod],
                  "period": [list(p) for p in word.period]},
         "reason": reason}
    )


def shifted_intervals(
    word: DigitWord, base: int, n: int
) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
    """Exact interval hull of the shift-n projection, per axis.

    Periodic words give degenerate intervals (exact points); a depth-D
    truncation gives intervals of width b^-(D-n).
    """
    shifted = word.shift(n)
    if shifted.is_periodic:
        x, y = shifted.point(base)
        return (x, x), (y, y)
    digits = shifted.preperiod
    m = len(digits)
    xn = yn = 0
    for u, v in digits:
        xn = xn * base + u
        yn = yn * base + v
    den = base ** m
    slack = Fraction(1, den)
    xlo = Fraction(xn, den)
    ylo = Fraction(yn, den)
    return (xlo, xlo + slack), (ylo, ylo + slack)


def _target_point(target: TargetSpec) -> tuple[Fraction, Fraction]:
    if target.point is None:
        raise InsufficientDepthError(
            "this check needs an exact target point; the target is a truncation"
        )
    return target.point


def check_containment_forward(
    ifs: GridIFS,
    target: TargetSpec,
    schedule: RateSchedule,
    n: int,
    samples: Iterable[DigitWord],
) -> CheckReport:
    """Samples whose shifted hull sits inside the stage rectangle must hit
    the window conditions. Hulls straddling the boundary are skipped."""
    lam, xi = schedule.lam(n), schedule.xi(n)
    z, w = _target_point(target)
    rx = Fraction(1, ifs.base ** lam)
    ry = Fraction(1, ifs.base ** xi)
    report = CheckReport("containment-forward", True, 0)
    inside_count = 0
    for word in samples:
        word.require_depth(n + xi)
        (xlo, xhi), (ylo, yhi) = shifted_intervals(word, ifs.base, n)
        inside = z - rx <= xlo and xhi <= z + rx and w - ry <= ylo and yhi <= w + ry
        outside = xhi < z - rx or xlo > z + rx or yhi < w - ry or ylo > w + ry
        report.checked += 1
        if inside:
            inside_count += 1
            if not window_hit(ifs, target, schedule, n, word):
                _fail(report, word, "shifted point inside the rectangle but window miss")
        elif not outside:
            report.skipped += 1
    report.details["inside"] = inside_count
    return report


def check_containment_backward(
    ifs: GridIFS,
    target: TargetSpec,
    schedule: RateSchedule,
    n: int,
    samples: Iterable[DigitWord],
) -> CheckReport:
    """Samples hitting the window conditions must land in the enlarged
    rectangle (two grid levels wider per axis), up to truncation slack."""
    lam, xi = schedule.lam(n), schedule.xi(n)
    z, w = _target_point(target)
    rx = Fraction(ifs.base ** 2, ifs.base ** lam)
    ry = Fraction(ifs.base ** 2, ifs.base ** xi)
    report = CheckReport("containment-backward", True, 0)
    hits = 0
    for word in samples:
        word.require_depth(n + xi)
        if not window_hit(ifs, target, schedule, n, word):
            continue
        hits += 1
        report.checked += 1
        (xlo, xhi), (ylo, yhi) = shifted_intervals(word, ifs.base, n)
        slack_x = xhi - xlo
        slack_y = yhi - ylo
        ok = (
            xlo >= z - rx - slack_x
            and xhi <= z + rx + slack_x
            and ylo >= w - ry - slack_y
            and yhi <= w + ry + slack_y
        )
        if not ok:
            _fail(report, word, "window hit but shifted point outside the enlarged rectangle")
    report.details["window_hits"] = hits
    return report


def _interior_thresholds(
    ifs: GridIFS, z: Fraction, w: Fraction, lam: int, xi: int
) -> None:
    """The two-sided margin exponents must be dominated by the window sizes."""
    def margin(c: Fraction) -> int:
        k = 1
        while not Fraction(1, ifs.base ** k) < c < 1 - Fraction(1, ifs.base ** k):
            k += 1
        return k

    kz, kw = margin(z), margin(w)
    if lam <= kz or xi <= kw:
        raise ThresholdNotMetError(
            f"stage too small: need lam > {kz} and xi > {kw}, got ({lam}, {xi})"
        )


def check_set_relation(
    ifs: GridIFS,
    target: TargetSpec,
    schedule: RateSchedule,
    n: int,
    samples: Iterable[DigitWord],
) -> CheckReport:
    """Rectangle hits versus image-translate hits, on exact sample points.

    For each sample the candidate witness prefixes are recovered from the
    point itself; each witness carries an integer shift per axis which must
    lie in {-1, 0, 1}, and for interior targets must vanish (making the two
    conditions equivalent). Boundary targets only get the one-sided
    implications plus the 3x3 rectangle containment.
    """
    lam, xi = schedule.lam(n), schedule.xi(n)
    b = ifs.base
    z, w = _target_point(target)
    interior = 0 < z < 1 and 0 < w < 1
    if interior:
        _interior_thresholds(ifs, z, w, lam, xi)
    rx = Fraction(1, b ** lam)
    ry = Fraction(1, b ** xi)
    bn = b ** n
    report = CheckReport("set-relation", True, 0, details={"interior": interior})
    digit_cache = {}

    def digits_of(value: int) -> tuple[int, ...]:
        if value not in digit_cache:
            ds = []
            v = value
            for _ in range(n):
                ds.append(v % b)
                v //= b
            digit_cache[value] = tuple(reversed(ds))
        return digit_cache[value]

    nonzero_shift_witnesses = 0
    for word in samples:
        if not word.is_periodic:
            raise InsufficientDepthError("set-relation samples must be eventually periodic")
        report.checked += 1
        x, y = word.point(b)
        xs, ys = word.shift(n).point(b)
        kx = int(bn * x - xs)
        ky = int(bn * y - ys)
        valid_sx = [s for s in (-2, -1, 0, 1, 2) if abs(s + xs - z) <= rx]
        valid_sy = [s for s in (-2, -1, 0, 1, 2) if abs(s + ys - w) <= ry]
        if any(abs(s) > 1 for s in valid_sx + valid_sy):
            _fail(report, word, "witness shift outside {-1,0,1}")
            continue
        eq1 = 0 in valid_sx and 0 in valid_sy
        witnesses = []
        for sx in valid_sx:
            p = kx - sx
            if not 0 <= p <= bn - 1:
                continue
            pd = digits_of(p)
            for sy in valid_sy:
                q = ky - sy
                if not 0 <= q <= bn - 1:
                    continue
                qd = digits_of(q)
                if all((pu, qv) in ifs.digits for pu, qv in zip(pd, qd)):
                    witnesses.append((sx, sy))
        eq2 = bool(witnesses)
        if eq1 and (0, 0) not in witnesses:
            _fail(report, word, "rectangle hit but own prefix not a witness")
        if interior:
            if eq2 != eq1:
                _fail(report, word, f"interior equivalence broken: eq1={eq1} eq2={eq2}")
            if any(s != (0, 0) for s in witnesses):
                _fail(report, word, "interior witness with nonzero shift")
        else:
            if eq1 and not eq2:
                _fail(report, word, "rectangle hit without any witness")
            nonzero_shift_witnesses += sum(1 for s in witnesses if s != (0, 0))
    report.details["nonzero_shift_witnesses"] = nonzero_shift_witnesses
    return report


def exhaustive_relation_check(
    ifs: GridIFS, target: TargetSpec, schedule: RateSchedule, n: int, depth: int
) -> CheckReport:
    """check_set_relation over every depth-`depth` prefix extended by a
    constant tail (the lowest and highest pair of the digit set), in plain
    integer arithmetic so exhaustive runs stay fast.

    The constant-tail extensions matter: they include the words whose shifted
    point sits at a box boundary, where witness translates pick up a nonzero
    shift for boundary targets.
    """
    b = ifs.base
    if len(ifs.digits) ** depth > ENUMERATION_GUARD:
        raise EnumerationTooLargeError(f"{len(ifs.digits)}^{depth} words exceed the guard")
    if depth < n:
        raise InsufficientDepthError(f"depth {depth} below n = {n}")
    lam, xi = schedule.lam(n), schedule.xi(n)
    z, w = _target_point(target)
    interior = 0 < z < 1 and 0 < w < 1
    if interior:
        _interior_thresholds(ifs, z, w, lam, xi)
    bn = b ** n
    # shifted coordinate of prefix + constant tail (alpha, beta):
    #   xs = ((b-1) * A' + alpha) / ((b-1) * b^(depth-n))
    # with A' the value of the last depth-n prefix digits
    den = (b - 1) * b ** (depth - n)
    zn, zd = z.numerator, z.denominator
    wn, wd = w.numerator, w.denominator
    blam = b ** lam
    bxi = b ** xi

    pair_digits = {}
    for p in range(bn):
        ds = []
        v = p
        for _ in range(n):
            ds.append(v % b)
            v //= b
        pair_digits[p] = tuple(reversed(ds))
    in_j = ifs.digits
    sorted_digits = ifs.sorted_digits()
    tails = sorted({sorted_digits[0], sorted_digits[-1]})

    report = CheckReport("set-relation-exhaustive", True, 0, details={"interior": interior})
    nonzero = 0
    tail_mod = b ** (depth - n)

    def axis_valid(shift: int, xs_num: int, cn: int, cd: int, be: int) -> bool:
        return abs((shift * den + xs_num) * cd - cn * den) * be <= den * cd

    for prefix in itertools.product(sorted_digits, repeat=depth):
        xnum = ynum = 0
        for u, v in prefix:
            xnum = xnum * b + u
            ynum = ynum * b + v
        kx, ax_tail = divmod(xnum, tail_mod)
        ky, ay_tail = divmod(ynum, tail_mod)
        for alpha, beta in tails:
            xs_num = (b - 1) * ax_tail + alpha
            ys_num = (b - 1) * ay_tail + beta
            report.checked += 1
            valid_sx = [s for s in (-2, -1, 0, 1, 2) if axis_valid(s, xs_num, zn, zd, blam)]
            valid_sy = [s for s in (-2, -1, 0, 1, 2) if axis_valid(s, ys_num, wn, wd, bxi)]
            if any(abs(s) > 1 for s in valid_sx + valid_sy):
                _fail(report, DigitWord.periodic(prefix, ((alpha, beta),)),
                      "witness shift outside {-1,0,1}")
                continue
            eq1 = 0 in valid_sx and 0 in valid_sy
            witnesses = []
            for sx in valid_sx:
                p = kx - sx
                if not 0 <= p <= bn - 1:
                    continue
                pd = pair_digits[p]
                for sy in valid_sy:
                    q = ky - sy
                    if not 0 <= q <= bn - 1:
                        continue
                    qd = pair_digits[q]
                    if all((pu, qv) in in_j for pu, qv in zip(pd, qd)):
                        witnesses.append((sx, sy))
            eq2 = bool(witnesses)
            bad = None
            if eq1 and (0, 0) not in witnesses:
                bad = "rectangle hit but own prefix not a witness"
            elif interior and eq2 != eq1:
                bad = f"interior equivalence broken: eq1={eq1} eq2={eq2}"
            elif interior and any(s != (0, 0) for s in witnesses):
                bad = "interior witness with nonzero shift"
            elif not interior and eq1 and not eq2:
                bad = "rectangle hit without any witness"
            if bad:
                _fail(report, DigitWord.periodic(prefix, ((alpha, beta),)), bad)
            if not interior:
                nonzero += sum(1 for s in witnesses if s != (0, 0))
    report.details["nonzero_shift_witnesses"] = nonzero
    return report


# window enumeration: definition-style oracle versus pattern expansion


def brute_force_window_set(
    ifs: GridIFS, target: TargetSpec, schedule: RateSchedule, n: int
) -> set[tuple[DigitPair, ...]]:
    """Every length-xi(n) pair window passing the window conditions, found by
    direct predicate evaluation over all of J^xi(n)."""
    lam, xi = schedule.lam(n), schedule.xi(n)
    if len(ifs.digits) ** xi > ENUMERATION_GUARD:
        raise EnumerationTooLargeError(f"{len(ifs.digits)}^{xi} windows exceed the guard")
    from .shrinking import axis_digits_admissible

    tcols = target.col_digits(lam - 1)
    trows = target.row_digits(xi - 1)
    b = ifs.base
    out = set()
    for win in itertools.product(ifs.sorted_digits(), repeat=xi):
        cols = tuple(p.u for p in win[: lam - 1])
        rows = tuple(p.v for p in win[: xi - 1])
        if axis_digits_admissible(b, tcols, cols) and axis_digits_admissible(b, trows, rows):
            out.add(win)
    return out


def pattern_window_set(
    ifs: GridIFS, target: TargetSpec, schedule: RateSchedule, n: int
) -> set[tuple[DigitPair, ...]]:
    """The same windows, expanded from the axis pattern lists."""
    lam, xi = schedule.lam(n), schedule.xi(n)
    hpats = axis_window_patterns(ifs, target.col_digits(lam - 1), lam, axis="horizontal")
    vpats = axis_window_patterns(ifs, target.row_digits(xi - 1), xi, axis="vertical")
    out: set[tuple[DigitPair, ...]] = set()
    for h in hpats:
        for v in vpats:
            forced = []
            ok = True
            for i in range(lam - 1):
                pair = DigitPair(h.digits[i], v.digits[i])
                if pair not in ifs.digits:
                    ok = False
                    break
                forced.append((pair,))
            if not ok:
                continue
            for i in range(lam - 1, xi - 1):
                row = sorted(ifs.row_set(v.digits[i]))
                if not row:
                    ok = False
                    break
                forced.append(tuple(row))
            if not ok:
                continue
            forced.append(ifs.sorted_digits())  # the final, unconstrained slot
            out.update(itertools.product(*forced))
    return out


def oracle_window_report(
    ifs: GridIFS, target: TargetSpec, schedule: RateSchedule, n: int
) -> CheckReport:
    """Pattern machinery versus the exhaustive predicate oracle: the window
    sets must coincide and the best row products must agree at every depth."""
    from .shrinking import max_row_counts

    lam, xi = schedule.lam(n), schedule.xi(n)
    brute = brute_force_window_set(ifs, target, schedule, n)
    patt = pattern_window_set(ifs, target, schedule, n)
    report = CheckReport("window-oracle", True, len(brute))
    if brute != patt:
        report.passed = False
        sample = list(brute.symmetric_difference(patt))[:5]
        report.failures.append(
            {"reason": "window sets differ",
             "brute_only": len(brute - patt),
             "pattern_only": len(patt - brute),
             "examples": [[list(p) for p in w] for w in sample]}
        )
        return report
    row_strings = {tuple(p.v for p in win) for win in brute}
    for j in range(lam, xi + 1):
        best = 0
        for rows in row_strings:
            prod = 1
            for i in range(lam, j + 1):
                prod *= ifs.row_size(rows[i - 1])
            best = max(best, prod)
        fast = max_row_counts(ifs, target, schedule, n, j).product(ifs)
        if fast != best:
            report.passed = False
            report.failures.append(
                {"reason": "row product mismatch", "j": j, "brute": best, "pattern": fast}
            )
    return report


# covers


@dataclass(frozen=True)
class CoverFamily:
    """Distinct level-(n+j) squares occupied by the stage-n window words."""

    n: int
    j: int
    boxes: tuple[DyadicBox, ...]
    cardinality_bound: int


def build_cover(
    ifs: GridIFS, target: TargetSpec, schedule: RateSchedule, n: int, j: int
) -> CoverFamily:
    """Enumerate the window words to depth n+j and collect their squares."""
    lam, xi = schedule.lam(n), schedule.xi(n)
    if not lam <= j <= xi:
        raise ValueError(f"need lam(n) <= j <= xi(n), got j={j} with ({lam}, {xi})")
    if len(ifs.digits) ** n > ENUMERATION_GUARD:
        raise EnumerationTooLargeError(f"{len(ifs.digits)}^{n} prefixes exceed the guard")
    b = ifs.base
    win = _StageWindow(ifs, target, schedule, n)
    hpats = axis_window_patterns(ifs, target.col_digits(lam - 1), lam, axis="horizontal")

    window_slots: list[tuple[tuple[DigitPair, ...], ...]] = []
    for v in win.patterns:
        for h in hpats:
            slots = []
            ok = True
            for i in range(lam - 1):
                pair = DigitPair(h.digits[i], v.digits[i])
                if pair not in ifs.digits:
                    ok = False
                    break
                slots.append((pair,))
            if not ok:
                continue
            for i in range(lam - 1, min(j, xi - 1)):
                slots.append(tuple(sorted(ifs.row_set(v.digits[i]))))
            for _ in range(max(0, j - xi + 1)):
                slots.append(ifs.sorted_digits())
            window_slots.append(tuple(slots))

    corners: set[tuple[int, int]] = set()
    for prefix in itertools.product(ifs.sorted_digits(), repeat=n):
        px = py = 0
        for u, v in prefix:
            px = px * b + u
            py = py * b + v
        for slots in window_slots:
            for tail in itertools.product(*slots):
                xn, yn = px, py
                for u, v in tail:
                    xn = xn * b + u
                    yn = yn * b + v
                corners.add((xn, yn))

    level = n + j
    den = b ** level
    boxes = tuple(
        DyadicBox(b, level, (Fraction(xn, den), Fraction(yn, den)))
        for xn, yn in sorted(corners)
    )
    max_prod = max(_row_product(ifs, win.best_counts(j)), 1)
    bound = 9 * len(ifs.digits) ** n * max_prod
    return CoverFamily(n, j, boxes, bound)


# lower-bound measure


@dataclass
class MeasureBuilder:
    """Level-by-level mass rules for the lower-bound measure.

    The mass of a cylinder factors through one distribution per level, so
    exact level sums and cylinder masses are products over levels; support
    sizes can be astronomically large without materializing anything.
    """

    ifs: GridIFS
    schedule: RateSchedule
    break_points: tuple[int, ...]
    delta: Fraction
    depth: int
    level_dists: list[dict[DigitPair, Fraction]]
    spines: dict[int, tuple[DigitPair, ...]]
    stage_values: dict[int, float]

    def dist(self, level: int) -> dict[DigitPair, Fraction]:
        if not 1 <= level <= self.depth:
            raise DepthTooLargeError(f"level {level} outside 1..{self.depth}")
        return self.level_dists[level - 1]

    def mass(self, prefix: Sequence[tuple[int, int]]) -> Fraction:
        """Exact mass of the cylinder of this prefix."""
        m = Fraction(1)
        for level, pair in enumerate(prefix, start=1):
            m *= self.dist(level).get(DigitPair(*pair), Fraction(0))
            if m == 0:
                return m
        return m

    def level_sum(self, level: int) -> Fraction:
        """Exact total mass at a level (product of per-level sums)."""
        total = Fraction(1)
        for ell in range(1, level + 1):
            total *= sum(self.dist(ell).values())
        return total

    def support_size(self, level: int) -> int:
        size = 1
        for ell in range(1, level + 1):
            size *= len(self.dist(ell))
        return size

    def enumerate_level(self, level: int, limit: int = 10 ** 6) -> Iterator[tuple[tuple[DigitPair, ...], Fraction]]:
        if self.support_size(level) > limit:
            raise EnumerationTooLargeError(
                f"level {level} support has {self.support_size(level)} cylinders"
            )
        slots = [sorted(self.dist(ell)) for ell in range(1, level + 1)]
        for prefix in itertools.product(*slots):
            yield prefix, self.mass(prefix)

    def point_phase_mass(self, k: int) -> Fraction:
        """Mass of any positive cylinder at levels just past break point k
        (constant across the point phase)."""
        n_k = self.break_points[k]
        m = Fraction(1)
        for ell in range(1, n_k + 1):
            m *= Fraction(1, len(self.dist(ell)))
        return m

    def point_phase_mass_explicit(self, k: int) -> Fraction:
        """The same mass from the closed bookkeeping formula: uniform levels
        contribute 1/#J each, earlier row-split phases their row sizes."""
        n_k = self.break_points[k]
        uniform_levels = n_k - sum(
            self.schedule.xi(self.break_points[i]) + 2 for i in range(k)
        )
        m = Fraction(1, len(self.ifs.digits) ** uniform_levels)
        for l in range(k):
            n_l = self.break_points[l]
            lam_l, xi_l = self.schedule.lam(n_l), self.schedule.xi(n_l)
            spine = self.spines[n_l]
            for i in range(lam_l + 3, xi_l + 3):
                m *= Fraction(1, self.ifs.row_size(spine[i - 1].v))
        return m

    def mass_bound_holds(self, k: int) -> bool:
        """point mass <= (#J)^(-n_k (1 - 1/delta)), compared exactly."""
        n_k = self.break_points[k]
        u = self.point_phase_mass(k)
        p, q = self.delta.numerator, self.delta.denominator
        lhs = Fraction(u.numerator ** p, u.denominator ** p)
        rhs = Fraction(1, len(self.ifs.digits) ** (n_k * (p - q)))
        return lhs <= rhs

    def support_word(self, upto: int, rng: random.Random | None = None) -> DigitWord:
        """A periodic word whose first `upto` levels all carry positive mass."""
        digits = []
        for ell in range(1, upto + 1):
            choices = sorted(self.dist(ell))
            digits.append(choices[0] if rng is None else rng.choice(choices))
        return DigitWord.periodic(digits, (digits[-1],))


def _spine_word_digits(
    ifs: GridIFS, target: TargetSpec, schedule: RateSchedule, n: int, j_star: int
) -> tuple[DigitPair, ...]:
    """Window digits (positions n+1 .. n+xi+2) of a window word whose row
    products over lam..j_star are maximal; free slots take the fullest row."""
    lam, xi = schedule.lam(n), schedule.xi(n)
    win = _StageWindow(ifs, target, schedule, n)
    best_idx, best_prod = 0, -1
    for idx in range(len(win.patterns)):
        prod = _row_product(ifs, win.counts_for(idx, j_star))
        if prod > best_prod:
            best_idx, best_prod = idx, prod
    v = win.patterns[best_idx]
    hpats = axis_window_patterns(ifs, target.col_digits(lam - 1), lam, axis="horizontal")
    h = next(
        h for h in hpats
        if all((h.digits[i], v.digits[i]) in ifs.digits for i in range(lam - 1))
    )
    filler = min(ifs.row_set(ifs.max_row_digit))
    pairs = []
    for i in range(1, xi + 3):
        if i <= lam - 1:
            pairs.append(DigitPair(h.digits[i - 1], v.digits[i - 1]))
        elif i <= xi - 1:
            pairs.append(min(ifs.row_set(v.digits[i - 1])))
        else:
            pairs.append(filler)
    return tuple(pairs)


def build_lower_bound_measure(
    ifs: GridIFS,
    target: TargetSpec,
    schedule: RateSchedule,
    break_points: Sequence[int],
    delta,
    depth: int | None = None,
) -> MeasureBuilder:
    """Assemble the level distributions of the lower-bound measure.

    Mass is uniform over the digit set away from the break points; just past
    each break point it rides a single chosen window word for lam+2 levels,
    then spreads over that word's rows until xi+2 levels past the break.
    """
    delta = Fraction(delta)
    if delta <= 1:
        raise BadBreakPointsError(f"delta must exceed 1, got {delta}")
    bps = tuple(int(n) for n in break_points)
    if len(bps) < 1 or any(n < 1 for n in bps):
        raise BadBreakPointsError("need at least one positive break point")
    for k in range(len(bps) - 1):
        tail_sum = sum(schedule.xi(bps[i]) + 2 for i in range(k + 1))
        if not (bps[k + 1] > delta * tail_sum and bps[k + 1] > bps[k] + schedule.xi(bps[k]) + 2):
            raise BadBreakPointsError(
                f"break point {bps[k + 1]} too close after {bps[: k + 1]}"
            )
    max_depth = bps[-1] + schedule.xi(bps[-1]) + 2
    if depth is None:
        depth = max_depth
    if depth > max_depth:
        raise DepthTooLargeError(f"depth {depth} beyond last phase end {max_depth}")

    spines: dict[int, tuple[DigitPair, ...]] = {}
    stage_values: dict[int, float] = {}
    for n_k in bps:
        rec = stage_exponent(ifs, target, schedule, n_k)
        stage_values[n_k] = rec.value
        j_star = _argmin_j_below_xi(ifs, target, schedule, n_k)
        spines[n_k] = _spine_word_digits(ifs, target, schedule, n_k, j_star)

    uniform = {p: Fraction(1, len(ifs.digits)) for p in ifs.sorted_digits()}
    dists: list[dict[DigitPair, Fraction]] = []
    for level in range(1, depth + 1):
        rule = uniform
        for n_k in bps:
            lam_k, xi_k = schedule.lam(n_k), schedule.xi(n_k)
            if n_k < level <= n_k + lam_k + 2:
                pair = spines[n_k][level - n_k - 1]
                rule = {pair: Fraction(1)}
                break
            if n_k + lam_k + 2 < level <= n_k + xi_k + 2:
                row = spines[n_k][level - n_k - 1].v
                row_pairs = sorted(ifs.row_set(row))
                rule = {p: Fraction(1, len(row_pairs)) for p in row_pairs}
                break
        dists.append(rule)

    return MeasureBuilder(
        ifs=ifs,
        schedule=schedule,
        break_points=bps,
        delta=delta,
        depth=depth,
        level_dists=dists,
        spines=spines,
        stage_values=stage_values,
    )


def _argmin_j_below_xi(
    ifs: GridIFS, target: TargetSpec, schedule: RateSchedule, n: int
) -> int:
    """Depth minimizing the stage quotient over lam(n)..xi(n)-1 (the measure
    construction stops the window one level short)."""
    lam, xi = schedule.lam(n), schedule.xi(n)
    if xi == lam:
        return lam
    win = _StageWindow(ifs, target, schedule, n)
    log_j = math.log(len(ifs.digits))
    log_b = math.log(ifs.base)
    best_j, best_v = lam, math.inf
    for j in range(lam, xi):
        v = (n * log_j + win.a_float(j)) / ((n + j) * log_b)
        if v < best_v - 1e-12:
            best_j, best_v = j, v
    return best_j


@dataclass(frozen=True)
class HolderSample:
    point: tuple[Fraction, Fraction]
    radius: Fraction
    level: int
    ball_mass: Fraction
    exponent: float


def holder_exponent_samples(
    builder: MeasureBuilder,
    sample_points: Sequence[DigitWord],
    radii: Sequence[Fraction],
) -> list[HolderSample]:
    """Mass decay exponents log(mass of ball) / log(radius).

    The ball of radius r meets at most nine grid squares at the matching
    level; the ball mass is the exact sum of their cylinder masses.
    """
    ifs = builder.ifs
    b = ifs.base
    out = []
    for r in radii:
        r = Fraction(r)
        if not 0 < r < 1:
            raise RadiusTooSmallError(f"radius {r} outside (0, 1)")
        if r < Fraction(1, b ** builder.depth):
            raise RadiusTooSmallError(f"radius {r} finer than depth {builder.depth}")
        # level n with b^-(n+1) < r <= b^-n
        level = 0
        while Fraction(1, b ** (level + 1)) >= r:
            level += 1
        for word in sample_points:
            x, y = word.point(b)
            nu = Fraction(0)
            scale = b ** level
            kx_lo = max(0, math.ceil((x - r) * scale) - 1)
            kx_hi = min(scale - 1, math.floor((x + r) * scale))
            ky_lo = max(0, math.ceil((y - r) * scale) - 1)
            ky_hi = min(scale - 1, math.floor((y + r) * scale))
            for kx in range(kx_lo, kx_hi + 1):
                for ky in range(ky_lo, ky_hi + 1):
                    nu += _grid_cylinder_mass(builder, level, kx, ky)
            if nu == 0:
                exponent = math.inf
            else:
                log_nu = math.log(nu.numerator) - math.log(nu.denominator)
                log_r = math.log(r.numerator) - math.log(r.denominator)
                exponent = log_nu / log_r
            out.append(HolderSample((x, y), r, level, nu, exponent))
    return out


def _grid_cylinder_mass(builder: MeasureBuilder, level: int, kx: int, ky: int) -> Fraction:
    b = builder.ifs.base
    xd = []
    yd = []
    vx, vy = kx, ky
    for _ in range(level):
        xd.append(vx % b)
        yd.append(vy % b)
        vx //= b
        vy //= b
    m = Fraction(1)
    for ell, (u, v) in enumerate(zip(reversed(xd), reversed(yd)), start=1):
        m *= builder.dist(ell).get(DigitPair(u, v), Fraction(0))
        if m == 0:
            return m
    return m


# sample word generation


def random_words(
    ifs: GridIFS,
    target: TargetSpec,
    schedule: RateSchedule,
    n: int,
    count: int,
    depth: int,
    rng: random.Random,
) -> list[DigitWord]:
    """Sample truncations biased toward the window boundary: a mix of plain
    uniform words, exact-match continuations, and pattern-following words."""
    lam, xi = schedule.lam(n), schedule.xi(n)
    digits = ifs.sorted_digits()
    hpats = axis_window_patterns(ifs, target.col_digits(lam - 1), lam, axis="horizontal")
    vpats = axis_window_patterns(ifs, target.row_digits(xi - 1), xi, axis="vertical")
    out = []
    for i in range(count):
        style = i % 4
        prefix = [rng.choice(digits) for _ in range(n)]
        if style == 0 or style == 1:
            body = [rng.choice(digits) for _ in range(depth - n)]
        else:
            h = rng.choice(hpats)
            v = rng.choice(vpats)
            body = []
            ok = True
            for idx in range(xi - 1):
                col = h.digits[idx] if idx < lam - 1 else None
                row = v.digits[idx]
                pool = [p for p in ifs.row_set(row) if col is None or p.u == col]
                if not pool:
                    ok = False
                    break
                body.append(rng.choice(sorted(pool)))
            if not ok:
                body = [rng.choice(digits) for _ in range(depth - n)]
            else:
                while len(body) < depth - n:
                    body.append(rng.choice(digits))
        out.append(DigitWord.truncation(prefix + body[: depth - n]))
    return out


def exhaustive_truncations(ifs: GridIFS, depth: int) -> Iterator[DigitWord]:
    """Every truncation of the given depth (guarded)."""
    if len(ifs.digits) ** depth > ENUMERATION_GUARD:
        raise EnumerationTooLargeError(f"{len(ifs.digits)}^{depth} words exceed the guard")
    for prefix in itertools.product(ifs.sorted_digits(), repeat=depth):
        yield DigitWord.truncation(prefix)

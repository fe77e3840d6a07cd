"""Point codings: expansion enumeration, representative selection, digit
frequencies, and horizontal slice dimensions.

Every point of the attractor has between one and four admissible codings
(each coordinate has at most two base-b expansions). A unique representative
is selected by maximizing the running product of row sizes along the coding,
with pair-count tie-breaks; all comparisons are done in exact integer
arithmetic, never floating logs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping

from .errors import (
    DegenerateExpansionError,
    EmptyCandidateSetError,
    FiniteTruncationError,
    InadmissiblePairError,
    NotInAttractorError,
    UndecidableDominanceError,
)
from .grid import DigitPair, GridIFS
from .words import DigitWord


def _as_unit_fraction(value) -> Fraction:
    if isinstance(value, float):
        raise ValueError(
            "floating-point input is ambiguous; pass a Fraction, int, or string like '1/3'"
        )
    r = Fraction(value)
    if not 0 <= r <= 1:
        raise ValueError(f"coordinate {r} outside [0, 1]")
    return r


def base_expansions(r: Fraction, base: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All base-b digit expansions of r in [0, 1] as (preperiod, period).

    Rationals whose reduced denominator divides a power of b have two
    expansions (terminating and high-digit tail); everything else has one,
    found by long division with remainder cycling.
    """
    if r == 0:
        return [((), (0,))]
    if r == 1:
        return [((), (base - 1,))]
    seen: dict[Fraction, int] = {}
    digits: list[int] = []
    x = r
    while x not in seen:
        seen[x] = len(digits)
        x *= base
        d = int(x)
        digits.append(d)
        x -= d
    start = seen[x]
    pre, per = tuple(digits[:start]), tuple(digits[start:])
    out = [(pre, per)]
    if per == (0,):
        # terminating expansion: also the variant ending in (b-1)(b-1)...
        term = list(pre)
        while term and term[-1] == 0:
            term.pop()
        term[-1] -= 1
        out.append((tuple(term), (base - 1,)))
    return out


def _combine_axes(
    x_exp: tuple[tuple[int, ...], tuple[int, ...]],
    y_exp: tuple[tuple[int, ...], tuple[int, ...]],
) -> tuple[tuple[tuple[int, int], ...], tuple[tuple[int, int], ...]]:
    """Zip two per-axis expansions into one pair word (preperiod, period)."""
    (xp, xq), (yp, yq) = x_exp, y_exp
    p = max(len(xp), len(yp))
    q = lcm(len(xq), len(yq))

    def dig(pre, per, i):  # 0-indexed
        return pre[i] if i < len(pre) else per[(i - len(pre)) % len(per)]

    pre = tuple((dig(xp, xq, i), dig(yp, yq, i)) for i in range(p))
    per = tuple((dig(xp, xq, p + i), dig(yp, yq, p + i)) for i in range(q))
    return pre, per


def expansions_of(ifs: GridIFS, z, w) -> set[DigitWord]:
    """All admissible codings of the rational point (z, w).

    Raises NotInAttractorError when no joint expansion uses only pairs from
    the digit set.
    """
    zr = _as_unit_fraction(z)
    wr = _as_unit_fraction(w)
    found: set[DigitWord] = set()
    for xe in base_expansions(zr, ifs.base):
        for ye in base_expansions(wr, ifs.base):
            pre, per = _combine_axes(xe, ye)
            if all(p in ifs.digits for p in pre) and all(p in ifs.digits for p in per):
                found.add(DigitWord.periodic(pre, per))
    if not found:
        raise NotInAttractorError(f"({zr}, {wr}) has no admissible coding")
    return found


# representative selection


def _row_products_window(ifs: GridIFS, word: DigitWord, upto: int) -> list[int]:
    """Prefix products of row sizes, positions 1..upto."""
    out = []
    acc = 1
    for i in range(1, upto + 1):
        acc *= ifs.row_size(word.row_digit(i))
        out.append(acc)
    return out


def _pair_count_key(ifs: GridIFS, word: DigitWord) -> tuple:
    """Tie-break key: for each marked pair, its density in the cycle first,
    then its count over preperiod plus one cycle."""
    b = ifs.base
    marked = [DigitPair(0, 0), DigitPair(0, b - 1), DigitPair(b - 1, 0)]
    window = word.preperiod + word.period
    key = []
    for m in marked:
        density = Fraction(word.period.count(m), len(word.period))
        key.append(density)
        key.append(window.count(m))
    return tuple(key)


def canonical_representative(ifs: GridIFS, candidates: Iterable[DigitWord]) -> DigitWord:
    """Pick the unique representative coding from a set of candidates.

    The winner's running product of row sizes must weakly dominate every
    other candidate's at all large depths (decided exactly: per-cycle
    geometric means first, then pointwise comparison across one aligned
    cycle). Remaining ties fall to marked-pair counts.
    """
    cands = list(dict.fromkeys(candidates))
    if not cands:
        raise EmptyCandidateSetError("no candidate codings given")
    for c in cands:
        if not c.is_periodic:
            raise UndecidableDominanceError(
                "dominance is only decidable for eventually periodic words"
            )
    if len(cands) == 1:
        return cands[0]
    pts = {c.point(ifs.base) for c in cands}
    if len(pts) > 1:
        raise ValueError("candidates project to different points")

    # growth rate: compare per-cycle products raised to lcm/q, exactly
    L = lcm(*(len(c.period) for c in cands))

    def cycle_product(c: DigitWord) -> int:
        prod = 1
        for p in c.period:
            prod *= ifs.row_size(p.v)
        return prod

    rates = [cycle_product(c) ** (L // len(c.period)) for c in cands]
    top = max(rates)
    cands = [c for c, r in zip(cands, rates) if r == top]
    if len(cands) == 1:
        return cands[0]

    # equal growth: compare prefix products pointwise across one aligned cycle
    start = max(len(c.preperiod) for c in cands)
    upto = start + L
    tables = [_row_products_window(ifs, c, upto) for c in cands]
    dominant = []
    for ci, ti in enumerate(tables):
        if all(
            ti[n] >= tables[cj][n]
            for n in range(start, upto)
            for cj in range(len(cands))
        ):
            dominant.append(cands[ci])
    if not dominant:
        raise UndecidableDominanceError(
            "no candidate maximizes the row products at every large depth"
        )
    if len(dominant) == 1:
        return dominant[0]

    keyed = sorted(dominant, key=lambda c: _pair_count_key(ifs, c), reverse=True)
    best_key = _pair_count_key(ifs, keyed[0])
    tied = [c for c in keyed if _pair_count_key(ifs, c) == best_key]
    if len(tied) > 1:
        raise UndecidableDominanceError(
            "marked-pair tie-breaks do not separate the candidates"
        )
    return keyed[0]


# frequencies and slices


def digit_frequencies(ifs: GridIFS, word: DigitWord) -> dict[int, Fraction]:
    """Limiting frequency of each row digit: cycle counts over cycle length.

    The preperiod never affects the limit. Truncations have no limit; use
    empirical_row_frequencies for those.
    """
    if not word.is_periodic:
        raise FiniteTruncationError(
            "frequencies of a truncation are undefined; use empirical_row_frequencies"
        )
    q = len(word.period)
    freqs = {a: Fraction(0) for a in range(ifs.base)}
    for p in word.period:
        freqs[p.v] += Fraction(1, q)
    return freqs


def empirical_row_frequencies(ifs: GridIFS, word: DigitWord, upto: int) -> dict[int, Fraction]:
    """Row-digit counts over positions 1..upto, normalized."""
    word.require_depth(upto)
    freqs = {a: Fraction(0) for a in range(ifs.base)}
    for i in range(1, upto + 1):
        freqs[word.row_digit(i)] += Fraction(1, upto)
    return freqs


def frequency_slice_value(ifs: GridIFS, freqs: Mapping[int, Fraction]) -> float:
    """Weighted row entropy sum(p_a log row_a) / log b."""
    total = 0.0
    for a, p in freqs.items():
        if p:
            total += float(p) * ifs.row_log(a)
    return total / math.log(ifs.base)


@dataclass(frozen=True)
class SliceDimension:
    value: float
    liminf_attained: bool


def slice_dimension(ifs: GridIFS, word: DigitWord) -> SliceDimension:
    """Dimension of the horizontal slice through the word's height.

    For eventually periodic words with a well-defined height this is the
    frequency-weighted row entropy. Heights with a second expansion available
    (row digits eventually constant 0 or b-1, height not 0 or 1) are refused:
    the slice formula does not see the other coding, so callers must route
    those through the constant-row closed forms.
    """
    b = ifs.base
    if word.is_periodic:
        freqs = digit_frequencies(ifs, word)
        if freqs.get(0) == 1 or freqs.get(b - 1) == 1:
            _, w_val = word.point(b)
            if w_val not in (0, 1):
                raise DegenerateExpansionError(
                    f"height {w_val} has a second expansion; use the constant-row special case"
                )
        return SliceDimension(frequency_slice_value(ifs, freqs), True)
    # truncation: smallest windowed average over the tail half of the known digits
    depth = len(word.preperiod)
    if depth == 0:
        raise FiniteTruncationError("empty truncation has no slice estimate")
    logs = [ifs.row_log(word.row_digit(i)) for i in range(1, depth + 1)]
    acc = 0.0
    best = None
    for n, lg in enumerate(logs, start=1):
        acc += lg
        if n >= max(1, depth // 2):
            v = acc / (n * math.log(b))
            best = v if best is None else min(best, v)
    return SliceDimension(best, False)


# target bundles


@dataclass(frozen=True)
class TargetSpec:
    """A target point: its representative coding plus cached frequency data.

    `frequencies` is None when the coding is a truncation (no limit known).
    `point` is None for truncations as well.
    """

    word: DigitWord
    frequencies: tuple[tuple[int, Fraction], ...] | None
    point: tuple[Fraction, Fraction] | None

    @property
    def frequencies_exist(self) -> bool:
        return self.frequencies is not None

    def frequency_map(self) -> dict[int, Fraction] | None:
        return dict(self.frequencies) if self.frequencies is not None else None

    def col_digits(self, upto: int) -> tuple[int, ...]:
        return tuple(p.u for p in self.word.pairs_up_to(upto))

    def row_digits(self, upto: int) -> tuple[int, ...]:
        return tuple(p.v for p in self.word.pairs_up_to(upto))


def make_target(ifs: GridIFS, z, w) -> TargetSpec:
    """Target from exact rational coordinates: expand, select, cache."""
    word = canonical_representative(ifs, expansions_of(ifs, z, w))
    return target_from_word(ifs, word)


def alternating_block_word(
    base_pair: tuple[int, int] = (0, 0),
    alt_pair: tuple[int, int] = (0, 2),
    block_base: int = 4,
    depth: int = 16384,
) -> DigitWord:
    """Truncated word alternating two pairs on geometric blocks.

    Position i carries base_pair when the block index j with
    block_base^j <= i < block_base^(j+1) is even, alt_pair when odd. The row
    digit frequencies of such a word oscillate forever, so it has no
    eventually periodic form and ships as a deep truncation.
    """
    if block_base < 2:
        raise ValueError("block base must be >= 2")
    digits = []
    j = 0
    for i in range(1, depth + 1):
        while block_base ** (j + 1) <= i:
            j += 1
        digits.append(base_pair if j % 2 == 0 else alt_pair)
    return DigitWord.truncation(digits)


def target_from_word(ifs: GridIFS, word: DigitWord) -> TargetSpec:
    """Target from an explicit coding (trusted as the representative).

    This path exists for exotic targets, e.g. block constructions given as
    deep truncations, which have no eventually periodic form.
    """
    check_to = len(word.preperiod) + len(word.period)
    for i in range(1, check_to + 1):
        if word.pair_at(i) not in ifs.digits:
            raise InadmissiblePairError(
                f"target digit {tuple(word.pair_at(i))} at position {i} not in the digit set"
            )
    if word.is_periodic:
        freqs = tuple(sorted(digit_frequencies(ifs, word).items()))
        return TargetSpec(word, freqs, word.point(ifs.base))
    return TargetSpec(word, None, None)

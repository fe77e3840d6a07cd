"""Symbolic codings: finite truncations and eventually periodic digit words.

Infinite words are stored as (preperiod, period) in minimal form; anything
that is not eventually periodic is only representable as a finite truncation
carrying an explicit depth. The left shift is implemented on symbols alone,
never on floating-point coordinates, so multi-expansion ambiguity at box
boundaries cannot corrupt the dynamics.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .errors import InsufficientDepthError
from .grid import DigitPair


def _coerce(pairs: Iterable[tuple[int, int]]) -> tuple[DigitPair, ...]:
    return tuple(DigitPair(*p) for p in pairs)


def _primitive(period: tuple[DigitPair, ...]) -> tuple[DigitPair, ...]:
    """Shortest word whose repetition gives `period`."""
    q = len(period)
    for d in range(1, q + 1):
        if q % d == 0 and period[:d] * (q // d) == period:
            return period[:d]
    return period


@dataclass(frozen=True)
class DigitWord:
    """A coding: eventually periodic when `period` is nonempty, else a
    truncation whose known digits are exactly `preperiod`."""

    preperiod: tuple[DigitPair, ...]
    period: tuple[DigitPair, ...]

    def __post_init__(self):
        pre = _coerce(self.preperiod)
        per = _coerce(self.period)
        if per:
            per = _primitive(per)
            # pull matching trailing digits of the preperiod into the cycle
            while pre and pre[-1] == per[-1]:
                per = (per[-1],) + per[:-1]
                pre = pre[:-1]
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    @classmethod
    def periodic(cls, preperiod: Iterable[tuple[int, int]], period: Iterable[tuple[int, int]]) -> "DigitWord":
        per = _coerce(period)
        if not per:
            raise ValueError("period must be nonempty; use DigitWord.truncation for finite words")
        return cls(_coerce(preperiod), per)

    @classmethod
    def truncation(cls, digits: Iterable[tuple[int, int]]) -> "DigitWord":
        return cls(_coerce(digits), ())

    # structure

    @property
    def is_periodic(self) -> bool:
        return bool(self.period)

    @property
    def truncation_depth(self) -> int | None:
        """Known depth for truncations; None for infinite words."""
        return None if self.period else len(self.preperiod)

    def knows_depth(self, m: int) -> bool:
        return self.is_periodic or m <= len(self.preperiod)

    def require_depth(self, m: int) -> None:
        if not self.knows_depth(m):
            raise InsufficientDepthError(
                f"word only specified to depth {len(self.preperiod)}, need {m}"
            )

    def pair_at(self, i: int) -> DigitPair:
        """1-indexed digit pair."""
        if i < 1:
            raise IndexError("positions are 1-indexed")
        p = len(self.preperiod)
        if i <= p:
            return self.preperiod[i - 1]
        if not self.period:
            raise InsufficientDepthError(f"position {i} beyond truncation depth {p}")
        return self.period[(i - p - 1) % len(self.period)]

    def pairs_up_to(self, m: int) -> tuple[DigitPair, ...]:
        self.require_depth(m)
        p = len(self.preperiod)
        if m <= p:
            return self.preperiod[:m]
        q = len(self.period)
        reps = (m - p + q - 1) // q
        return (self.preperiod + self.period * reps)[:m]

    def col_digit(self, i: int) -> int:
        return self.pair_at(i).u

    def row_digit(self, i: int) -> int:
        return self.pair_at(i).v

    def iter_pairs(self, upto: int) -> Iterator[DigitPair]:
        for i in range(1, upto + 1):
            yield self.pair_at(i)

    # dynamics and projection

    def shift(self, n: int) -> "DigitWord":
        """Drop the first n pairs."""
        if n < 0:
            raise ValueError("shift must be nonnegative")
        p = len(self.preperiod)
        if n <= p:
            return DigitWord(self.preperiod[n:], self.period)
        if not self.period:
            raise InsufficientDepthError(f"cannot shift a depth-{p} truncation by {n}")
        q = len(self.period)
        off = (n - p) % q
        return DigitWord((), self.period[off:] + self.period[:off])

    def point(self, base: int) -> tuple[Fraction, Fraction]:
        """Exact projected coordinates; infinite words only."""
        if not self.period:
            raise InsufficientDepthError("truncations project to a box, not a point")
        p = len(self.preperiod)
        q = len(self.period)
        ax = ay = 0
        for u, v in self.preperiod:
            ax = ax * base + u
            ay = ay * base + v
        bx = by = 0
        for u, v in self.period:
            bx = bx * base + u
            by = by * base + v
        denp = base ** p
        denq = base ** q - 1
        x = Fraction(ax, denp) + Fraction(bx, denp * denq)
        y = Fraction(ay, denp) + Fraction(by, denp * denq)
        return x, y


def apply_shift(word: DigitWord, n: int) -> DigitWord:
    """Shift the coding left n places (the symbolic form of the dynamics)."""
    return word.shift(n)

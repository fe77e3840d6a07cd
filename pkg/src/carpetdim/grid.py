"""Grid iterated function systems on the unit square.

A system is given by a base b >= 2 and a proper subset J of the b x b digit
grid. Each digit pair (u, v) in J corresponds to the contraction
(x, y) -> ((x + u) / b, (y + v) / b), so admissible codings are exactly the
sequences of pairs drawn from J, and the attractor is the set of points whose
two-dimensional base-b expansion uses only pairs from J.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .errors import (
    BaseTooSmallError,
    DigitOutOfRangeError,
    DuplicatePairError,
    InadmissiblePairError,
    NotProperSubsetError,
    TooFewMapsError,
)


class DigitPair(NamedTuple):
    """A (column, row) digit pair; interchangeable with a plain 2-tuple."""

    u: int
    v: int


@dataclass(frozen=True)
class GridIFS:
    """Validated digit system: base and admissible digit pairs.

    Derived row/column structure is precomputed since the dimension formulas
    consult row sizes in tight loops.
    """

    base: int
    digits: frozenset[DigitPair]
    _rows: tuple[frozenset[DigitPair], ...] = field(init=False, compare=False, repr=False)
    _cols: tuple[frozenset[DigitPair], ...] = field(init=False, compare=False, repr=False)
    _row_sizes: tuple[int, ...] = field(init=False, compare=False, repr=False)
    _row_logs: tuple[float, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        b = self.base
        rows = [frozenset(p for p in self.digits if p.v == a) for a in range(b)]
        cols = [frozenset(p for p in self.digits if p.u == a) for a in range(b)]
        sizes = tuple(len(r) for r in rows)
        logs = tuple(math.log(s) if s > 0 else float("-inf") for s in sizes)
        object.__setattr__(self, "_rows", tuple(rows))
        object.__setattr__(self, "_cols", tuple(cols))
        object.__setattr__(self, "_row_sizes", sizes)
        object.__setattr__(self, "_row_logs", logs)

    # row / column structure

    def row_set(self, a: int) -> frozenset[DigitPair]:
        """Digit pairs whose image square sits in row a of the grid."""
        self._check_digit(a)
        return self._rows[a]

    def col_set(self, a: int) -> frozenset[DigitPair]:
        """Digit pairs whose image square sits in column a of the grid."""
        self._check_digit(a)
        return self._cols[a]

    def row_size(self, a: int) -> int:
        return self._row_sizes[a]

    @property
    def row_sizes(self) -> tuple[int, ...]:
        return self._row_sizes

    def row_log(self, a: int) -> float:
        """log of the row size; -inf marks an uninhabited row."""
        return self._row_logs[a]

    @property
    def max_row_size(self) -> int:
        return max(self._row_sizes)

    @property
    def max_row_digit(self) -> int:
        """Smallest row index attaining the largest row size."""
        return self._row_sizes.index(self.max_row_size)

    def attractor_dimension(self) -> float:
        """log #J / log b."""
        return math.log(len(self.digits)) / math.log(self.base)

    def __contains__(self, pair) -> bool:
        return tuple(pair) in self.digits

    def sorted_digits(self) -> tuple[DigitPair, ...]:
        return tuple(sorted(self.digits))

    def _check_digit(self, a: int) -> None:
        if not 0 <= a <= self.base - 1:
            raise DigitOutOfRangeError(f"digit {a} outside 0..{self.base - 1}")


def validate_ifs(base: int, pairs: Iterable[tuple[int, int]]) -> GridIFS:
    """Build a GridIFS from raw input, rejecting malformed systems.

    Requirements: base >= 2, at least two pairs, no duplicates, all digits in
    range, and the pair set a proper subset of the full grid.
    """
    if base < 2:
        raise BaseTooSmallError(f"base must be >= 2, got {base}")
    seen: set[DigitPair] = set()
    for p in pairs:
        u, v = p
        if not (0 <= u <= base - 1 and 0 <= v <= base - 1):
            raise DigitOutOfRangeError(f"pair {(u, v)} outside the {base}x{base} grid")
        dp = DigitPair(u, v)
        if dp in seen:
            raise DuplicatePairError(f"pair {(u, v)} given twice")
        seen.add(dp)
    if len(seen) == base * base:
        raise NotProperSubsetError("digit set must omit at least one grid cell")
    if len(seen) < 2:
        raise TooFewMapsError("need at least two digit pairs")
    return GridIFS(base, frozenset(seen))


@dataclass(frozen=True)
class DyadicBox:
    """Level-m base-b square [cx, cx + b^-m] x [cy, cy + b^-m]."""

    base: int
    level: int
    corner: tuple[Fraction, Fraction]

    @property
    def side(self) -> Fraction:
        return Fraction(1, self.base ** self.level)

    def x_interval(self) -> tuple[Fraction, Fraction]:
        return self.corner[0], self.corner[0] + self.side

    def y_interval(self) -> tuple[Fraction, Fraction]:
        return self.corner[1], self.corner[1] + self.side


def project_prefix(ifs: GridIFS, prefix: Sequence[tuple[int, int]]) -> DyadicBox:
    """The base-b square holding every point whose coding extends `prefix`.

    Corner coordinates are exact rationals with denominator b^len(prefix).
    """
    b = ifs.base
    xn = 0
    yn = 0
    for p in prefix:
        pair = DigitPair(*p)
        if pair not in ifs.digits:
            raise InadmissiblePairError(f"pair {tuple(pair)} not in the digit set")
        xn = xn * b + pair.u
        yn = yn * b + pair.v
    m = len(prefix)
    den = b ** m
    return DyadicBox(b, m, (Fraction(xn, den), Fraction(yn, den)))

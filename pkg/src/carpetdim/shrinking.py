"""Window combinatorics behind the shrinking-target dimension sequence.

A coding hits the stage-n target window when its digits at offset n track the
target's digits: per axis, either an exact match on the constrained positions,
or a single +-1 deviation followed by a forced carry tail (all high digits
against a zero target tail, or all zeros against a high-digit target tail).
Each axis therefore admits at most an exact pattern plus two deviations.

The stage exponent minimizes (n log #J + best weighted row count) over the
window depth j. Row counts are kept as exact integer vectors; logarithms only
enter when a value is reported, and near-tie comparisons fall back to exact
integer cross-powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .coding import TargetSpec
from .errors import EmptyWindowSetError, ScheduleError
from .grid import GridIFS
from .schedules import RateSchedule
from .words import DigitWord

_TIE_EPS = 1e-12


@dataclass(frozen=True)
class WindowPattern:
    """Forced digit string on one axis of a stage window.

    `digits` covers window positions 1..L-1 (position L is unconstrained).
    Deviating patterns record where and in which direction they leave the
    target's digits.
    """

    axis: str
    match_kind: str  # "exact" | "deviate"
    deviate_pos: int | None
    deviate_sign: int | None
    digits: tuple[int, ...]


def axis_window_patterns(
    ifs: GridIFS,
    target_digits: Sequence[int],
    length: int,
    axis: str = "vertical",
) -> list[WindowPattern]:
    """All digit strings one axis of the window may carry.

    A deviation down at position j needs a zero target tail after j (the word
    then carries high digits); a deviation up needs a high-digit target tail
    (the word then carries zeros). Tails are vacuous at the last constrained
    position. Digit admissibility against the pair set is not checked here;
    that happens when the two axes are combined.
    """
    b = ifs.base
    t = tuple(target_digits)
    if length < 1:
        raise ValueError("window length must be >= 1")
    if len(t) != length - 1:
        raise ValueError(f"expected {length - 1} target digits, got {len(t)}")
    for d in t:
        if not 0 <= d <= b - 1:
            raise ValueError(f"target digit {d} outside 0..{b - 1}")

    pats = [WindowPattern(axis, "exact", None, None, t)]
    last = length - 1
    tail_zero = True
    tail_high = True
    for j in range(last, 0, -1):
        d = t[j - 1]
        if d >= 1 and tail_zero:
            digits = t[: j - 1] + (d - 1,) + (b - 1,) * (last - j)
            pats.append(WindowPattern(axis, "deviate", j, -1, digits))
        if d <= b - 2 and tail_high:
            digits = t[: j - 1] + (d + 1,) + (0,) * (last - j)
            pats.append(WindowPattern(axis, "deviate", j, +1, digits))
        tail_zero = tail_zero and d == 0
        tail_high = tail_high and d == b - 1
        if not tail_zero and not tail_high:
            break
    return pats


def axis_digits_admissible(
    base: int, target_digits: Sequence[int], word_digits: Sequence[int]
) -> bool:
    """Single-axis window condition, evaluated directly on digit strings."""
    last = len(target_digits)
    mismatch = -1
    for i in range(last):
        if word_digits[i] != target_digits[i]:
            mismatch = i
            break
    if mismatch < 0:
        return True
    delta = word_digits[mismatch] - target_digits[mismatch]
    if delta == -1:
        return all(
            word_digits[i] - target_digits[i] == base - 1 for i in range(mismatch + 1, last)
        )
    if delta == 1:
        return all(
            target_digits[i] - word_digits[i] == base - 1 for i in range(mismatch + 1, last)
        )
    return False


def window_hit(
    ifs: GridIFS, target: TargetSpec, schedule: RateSchedule, n: int, word: DigitWord
) -> bool:
    """Does the word's offset-n tail satisfy both axis window conditions?"""
    lam, xi = schedule.lam(n), schedule.xi(n)
    word.require_depth(n + xi)
    tcols = target.col_digits(lam - 1)
    trows = target.row_digits(xi - 1)
    wcols = tuple(word.col_digit(n + i) for i in range(1, lam))
    wrows = tuple(word.row_digit(n + i) for i in range(1, xi))
    return axis_digits_admissible(ifs.base, tcols, wcols) and axis_digits_admissible(
        ifs.base, trows, wrows
    )


def _stage_patterns(
    ifs: GridIFS, target: TargetSpec, schedule: RateSchedule, n: int
) -> tuple[list[WindowPattern], list[WindowPattern], list[WindowPattern]]:
    """Axis patterns of stage n plus the jointly realizable vertical ones.

    A vertical pattern is realizable when its rows are inhabited beyond the
    horizontal window and some horizontal pattern pairs with it inside.
    """
    lam, xi = schedule.lam(n), schedule.xi(n)
    hpats = axis_window_patterns(ifs, target.col_digits(lam - 1), lam, axis="horizontal")
    vpats = axis_window_patterns(ifs, target.row_digits(xi - 1), xi, axis="vertical")
    J = ifs.digits
    realizable = []
    for v in vpats:
        if any(ifs.row_size(v.digits[i]) == 0 for i in range(lam - 1, xi - 1)):
            continue
        for h in hpats:
            if all((h.digits[i], v.digits[i]) in J for i in range(lam - 1)):
                realizable.append(v)
                break
    return hpats, vpats, realizable


class _StageWindow:
    """Realizable vertical patterns of one stage, with prefix sums so the
    weighted row count is O(1) per depth j."""

    def __init__(self, ifs: GridIFS, target: TargetSpec, schedule: RateSchedule, n: int):
        self.ifs = ifs
        self.n = n
        self.lam = schedule.lam(n)
        self.xi = schedule.xi(n)
        _, _, realizable = _stage_patterns(ifs, target, schedule, n)
        if not realizable:
            raise EmptyWindowSetError(f"stage {n}: no jointly realizable window pattern")
        self.patterns = realizable
        self.prefix_logs: list[list[float]] = []
        for v in realizable:
            acc = 0.0
            row = [0.0]
            for i in range(self.lam - 1, self.xi - 1):
                acc += ifs.row_log(v.digits[i])
                row.append(acc)
            self.prefix_logs.append(row)
        self.free_log = math.log(ifs.max_row_size)
        self.free_row = ifs.max_row_digit

    def _forced_span(self, j: int) -> int:
        return max(0, min(j, self.xi - 1) - self.lam + 1)

    def _free_span(self, j: int) -> int:
        return max(0, j - self.xi + 1)

    def a_float(self, j: int) -> float:
        t = self._forced_span(j)
        return max(pl[t] for pl in self.prefix_logs) + self._free_span(j) * self.free_log

    def counts_for(self, idx: int, j: int) -> tuple[int, ...]:
        counts = [0] * self.ifs.base
        v = self.patterns[idx]
        for i in range(self.lam - 1, self.lam - 1 + self._forced_span(j)):
            counts[v.digits[i]] += 1
        counts[self.free_row] += self._free_span(j)
        return tuple(counts)

    def best_counts(self, j: int) -> tuple[int, ...]:
        """Row-count vector attaining the stage maximum at depth j, with the
        winner decided by exact integer products."""
        best = None
        best_prod = -1
        for idx in range(len(self.patterns)):
            c = self.counts_for(idx, j)
            p = _row_product(self.ifs, c)
            if p > best_prod:
                best, best_prod = c, p
        return best


def _row_product(ifs: GridIFS, counts: Sequence[int]) -> int:
    prod = 1
    for a, m in enumerate(counts):
        if m:
            prod *= ifs.row_size(a) ** m
    return prod


def _counts_log(ifs: GridIFS, counts: Sequence[int]) -> float:
    return sum(m * ifs.row_log(a) for a, m in enumerate(counts) if m)


@dataclass(frozen=True)
class RowCounts:
    """Exact row-digit count vector; the weighted count is log of product()."""

    counts: tuple[int, ...]

    def log_value(self, ifs: GridIFS) -> float:
        return _counts_log(ifs, self.counts)

    def product(self, ifs: GridIFS) -> int:
        return _row_product(ifs, self.counts)


def max_row_counts(
    ifs: GridIFS, target: TargetSpec, schedule: RateSchedule, n: int, j: int
) -> RowCounts:
    """Best achievable row-digit counts over window positions lam(n)..j.

    Positions past the vertical window contribute the most populated row.
    """
    win = _StageWindow(ifs, target, schedule, n)
    if j < win.lam:
        raise ValueError(f"j = {j} below lam({n}) = {win.lam}")
    return RowCounts(win.best_counts(j))


def row_agreement_length(
    ifs: GridIFS, target: TargetSpec, schedule: RateSchedule, n: int
) -> int:
    """Positions on which every window-hitting word copies the target's rows.

    Equals one less than the first realizable vertical deviation position, or
    the full constrained span when no deviation is realizable.
    """
    xi = schedule.xi(n)
    if xi < 2:
        raise ScheduleError(f"agreement length needs xi(n) >= 2, got {xi}")
    _, _, realizable = _stage_patterns(ifs, target, schedule, n)
    if not realizable:
        raise EmptyWindowSetError(f"stage {n}: no jointly realizable window pattern")
    dev = [v.deviate_pos for v in realizable if v.match_kind == "deviate"]
    return min(dev) - 1 if dev else xi - 1


@dataclass(frozen=True)
class ExponentRecord:
    """One stage of the dimension sequence."""

    n: int
    lam: int
    xi: int
    value: float
    argmin_j: int
    row_counts: tuple[int, ...]

    def weighted_row_count(self, ifs: GridIFS) -> float:
        return _counts_log(ifs, self.row_counts)


def _exact_stage_compare(
    ifs: GridIFS, n: int, j1: int, prod1: int, j2: int, prod2: int
) -> int:
    """Sign of value(j1) - value(j2) in exact integer arithmetic.

    value(j) = log(#J^n * prod) / ((n + j) log b), so cross-raising removes
    the logarithms.
    """
    base1 = len(ifs.digits) ** n * prod1
    base2 = len(ifs.digits) ** n * prod2
    lhs = base1 ** (n + j2)
    rhs = base2 ** (n + j1)
    return (lhs > rhs) - (lhs < rhs)


def stage_exponent(
    ifs: GridIFS, target: TargetSpec, schedule: RateSchedule, n: int
) -> ExponentRecord:
    """Minimize (n log #J + weighted row count) / ((n + j) log b) over the
    window depths j = lam(n)..xi(n); ties resolve to the smallest j."""
    win = _StageWindow(ifs, target, schedule, n)
    log_j = math.log(len(ifs.digits))
    log_b = math.log(ifs.base)
    best_j = None
    best_val = math.inf
    for j in range(win.lam, win.xi + 1):
        v = (n * log_j + win.a_float(j)) / ((n + j) * log_b)
        if v < best_val - _TIE_EPS:
            best_j, best_val = j, v
        elif v < best_val + _TIE_EPS and best_j is not None:
            p_new = _row_product(ifs, win.best_counts(j))
            p_old = _row_product(ifs, win.best_counts(best_j))
            if _exact_stage_compare(ifs, n, j, p_new, best_j, p_old) < 0:
                best_j, best_val = j, v
    counts = win.best_counts(best_j)
    value = (n * log_j + _counts_log(ifs, counts)) / ((n + best_j) * log_b)
    return ExponentRecord(n, win.lam, win.xi, value, best_j, counts)


@dataclass
class DimensionReport:
    """Stage exponents over a sampled range plus the dimension estimate.

    The reported estimate is the maximum over the trailing window of the
    range (burn-in discarded); the overall running maximum is kept alongside
    for diagnostics, since early stages can sit above the limit.
    """

    records: list[ExponentRecord]
    skipped: list[tuple[int, str]]
    limsup_estimate: float
    running_max: float
    tail_start: int
    still_rising: bool
    tail_fraction: float
    closed_form: float | None = None
    closed_form_branch: str | None = None
    formula_source: str | None = None
    warnings: list[str] = field(default_factory=list)


def dimension_report(
    ifs: GridIFS,
    target: TargetSpec,
    schedule: RateSchedule,
    n_values: Sequence[int],
    tail_fraction: float = 0.2,
    attach_closed_form: bool = True,
) -> DimensionReport:
    """Run the stage exponent over n_values and estimate the limiting value."""
    ns = list(n_values)
    if not ns:
        raise ValueError("n_values must be nonempty")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("n_values must be strictly increasing")
    schedule.validate_range(ns)

    records: list[ExponentRecord] = []
    skipped: list[tuple[int, str]] = []
    for n in ns:
        try:
            records.append(stage_exponent(ifs, target, schedule, n))
        except EmptyWindowSetError as exc:
            skipped.append((n, str(exc)))
    if not records:
        raise EmptyWindowSetError("every sampled stage had an empty window set")

    values = [r.value for r in records]
    tail_start = max(0, math.floor(len(values) * (1.0 - tail_fraction)))
    if tail_start >= len(values):
        tail_start = len(values) - 1
    running_max = -math.inf
    last_improvement = 0
    for i, v in enumerate(values):
        if v > running_max:
            running_max = v
            last_improvement = i
    report = DimensionReport(
        records=records,
        skipped=skipped,
        limsup_estimate=max(values[tail_start:]),
        running_max=running_max,
        tail_start=tail_start,
        still_rising=last_improvement >= tail_start,
        tail_fraction=tail_fraction,
    )
    if skipped:
        report.warnings.append(f"{len(skipped)} stages had no realizable window and were skipped")
    if attach_closed_form:
        from .formulas import closed_form_for

        cf = closed_form_for(ifs, target, schedule)
        if cf is not None:
            report.closed_form, report.closed_form_branch, report.formula_source = cf
    return report

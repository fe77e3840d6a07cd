"""Closed-form dimension values for linear schedules.

With linear rates lam and xi, the limiting dimension is the smaller of two
branches: gamma / (1 + lam) (the horizontal window alone) and
(gamma + (xi - lam) * gamma2) / (1 + xi), where gamma is the attractor
dimension and gamma2 the horizontal slice dimension through the target. The
slice term specializes to log of a single row size when the target's row
digits are constant, and to a measure average for typical points of an
ergodic measure.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping, Sequence

from .coding import TargetSpec, frequency_slice_value
from .errors import (
    FrequenciesDoNotExistError,
    InvalidRatesError,
    NotAProbabilityError,
)
from .grid import GridIFS
from .schedules import RateSchedule

LAMBDA_BRANCH = "lambda"
XI_BRANCH = "xi"
BOTH_BRANCHES = "both"


def closed_form_dimension(gamma: float, gamma2: float, lam, xi) -> tuple[float, str]:
    """min of the two branches, tagged with which one attains it."""
    lam_r, xi_r = Fraction(lam), Fraction(xi)
    if lam_r <= 0:
        raise InvalidRatesError("lam must be positive")
    if xi_r < lam_r:
        raise InvalidRatesError(f"xi = {xi_r} below lam = {lam_r}")
    if not 0 <= gamma2 <= gamma:
        raise ValueError(f"slice value {gamma2} outside [0, {gamma}]")
    lam_f, xi_f = float(lam_r), float(xi_r)
    lam_branch = gamma / (1.0 + lam_f)
    xi_branch = (gamma + (xi_f - lam_f) * gamma2) / (1.0 + xi_f)
    if lam_branch == xi_branch:
        return lam_branch, BOTH_BRANCHES
    if lam_branch < xi_branch:
        return lam_branch, LAMBDA_BRANCH
    return xi_branch, XI_BRANCH


W_ZERO = "w-zero"
W_ONE = "w-one"


def special_case_dimension(
    ifs: GridIFS, which: str, gamma: float, lam, xi
) -> tuple[float, str]:
    """Closed form when the target's row digits are constant 0 (or constant
    high): the slice term becomes the log of that single row's size."""
    if which == W_ZERO:
        row = 0
    elif which == W_ONE:
        row = ifs.base - 1
    else:
        raise ValueError(f"which must be '{W_ZERO}' or '{W_ONE}', got {which!r}")
    size = ifs.row_size(row)
    if size == 0:
        raise ValueError(f"row {row} is uninhabited; no such target exists")
    gamma2 = math.log(size) / math.log(ifs.base)
    return closed_form_dimension(gamma, gamma2, lam, xi)


def ergodic_dimension(
    ifs: GridIFS, row_probabilities: Mapping[int, object], gamma: float, lam, xi
) -> tuple[float, str]:
    """Closed form for typical targets of a shift-invariant measure with the
    given row marginals."""
    probs = {a: Fraction(p) for a, p in row_probabilities.items()}
    if any(p < 0 for p in probs.values()) or sum(probs.values()) != 1:
        raise NotAProbabilityError("row probabilities must be nonnegative and sum to 1")
    for a, p in probs.items():
        if p > 0 and ifs.row_size(a) == 0:
            raise NotAProbabilityError(f"row {a} carries mass {p} but is uninhabited")
    gamma2 = frequency_slice_value(ifs, probs)
    return closed_form_dimension(gamma, gamma2, lam, xi)


def ratio_limsup_dimension(
    ifs: GridIFS,
    target: TargetSpec,
    schedule: RateSchedule,
    n_values: Sequence[int],
) -> float:
    """Largest per-stage closed-form value over the sampled stages.

    Covers schedules whose per-n rate ratios do not converge: each stage is
    scored with its own ratios lam(n)/n and xi(n)/n. Requires the target's
    digit frequencies to exist with neither extreme row frequency equal to 1.
    """
    freqs = target.frequency_map()
    if freqs is None:
        raise FrequenciesDoNotExistError(
            "target frequencies do not exist; use the stage-exponent report instead"
        )
    if freqs.get(0) == 1 or freqs.get(ifs.base - 1) == 1:
        raise FrequenciesDoNotExistError(
            "extreme row frequency equals 1; use the constant-row special case"
        )
    gamma = ifs.attractor_dimension()
    gamma2 = frequency_slice_value(ifs, freqs)
    best = -math.inf
    for n in n_values:
        lam_ratio = Fraction(schedule.lam(n), n)
        xi_ratio = Fraction(schedule.xi(n), n)
        value = min(
            gamma / (1.0 + float(lam_ratio)),
            (gamma + float(xi_ratio - lam_ratio) * gamma2) / (1.0 + float(xi_ratio)),
        )
        best = max(best, value)
    return best


CLOSED_FORM_FREQUENCY = "frequency-closed-form"
CLOSED_FORM_ZERO_ROW = "zero-row-target"
CLOSED_FORM_TOP_ROW = "top-row-target"


def closed_form_for(
    ifs: GridIFS, target: TargetSpec, schedule: RateSchedule
) -> tuple[float, str, str] | None:
    """Closed form applicable to this run, if any: (value, branch, source).

    Only linear schedules have one. Targets with an extreme row frequency of
    1 get the constant-row form when they really are the constant-row point;
    otherwise no closed form is reported (the stage sequence still applies).
    """
    if schedule.kind != "linear":
        return None
    if not target.frequencies_exist:
        return None
    lam, xi = schedule.params["lam"], schedule.params["xi"]
    gamma = ifs.attractor_dimension()
    freqs = target.frequency_map()
    b = ifs.base
    if freqs.get(0) == 1 or freqs.get(b - 1) == 1:
        w_val = target.point[1] if target.point is not None else None
        if w_val == 0:
            value, branch = special_case_dimension(ifs, W_ZERO, gamma, lam, xi)
            return value, branch, CLOSED_FORM_ZERO_ROW
        if w_val == 1:
            value, branch = special_case_dimension(ifs, W_ONE, gamma, lam, xi)
            return value, branch, CLOSED_FORM_TOP_ROW
        return None
    gamma2 = frequency_slice_value(ifs, freqs)
    value, branch = closed_form_dimension(gamma, gamma2, lam, xi)
    return value, branch, CLOSED_FORM_FREQUENCY

"""Batch front-end: JSON config in, CSV/JSON reports out.

Subcommands: dimension (stage exponents plus closed form), slice (horizontal
slice through the target), verify (finite-depth check suite, nonzero exit on
any failure), sn-table (the full depth/stage surface for plotting).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import verify as verify_mod
from .coding import (
    TargetSpec,
    alternating_block_word,
    make_target,
    slice_dimension,
    target_from_word,
)
from .errors import CarpetError, ConfigError
from .formulas import ratio_limsup_dimension
from .grid import GridIFS, validate_ifs
from .schedules import RateSchedule
from .shrinking import dimension_report, max_row_counts
from .words import DigitWord

NAMED_IFS = {
    "vicsek": (3, [(0, 0), (2, 0), (0, 2), (1, 1), (2, 2)]),
    "corner": (3, [(0, 0), (2, 0), (0, 2)]),
}

# named targets: (ifs name, builder kind, extras)
NAMED_TARGETS = {
    "vicsek-origin": ("vicsek", "point", ("0", "0")),
    "vicsek-center": ("vicsek", "point", ("1/2", "1/2")),
    "corner-blocks": ("corner", "blocks", None),
}


def fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _round12(x: float) -> float:
    return float(fmt(x))


@dataclass
class RunConfig:
    ifs: GridIFS
    target: TargetSpec
    schedule: RateSchedule
    n_values: list[int]
    verify: dict
    raw: dict

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("$", "config must be a JSON object")
        ifs = _parse_ifs(data.get("ifs"), "ifs")
        target = _parse_target(ifs, data.get("target"), "target")
        schedule = _parse_schedule(data.get("schedule"), "schedule")
        n_values = _parse_n_range(data.get("n_range"), "n_range")
        verify_cfg = data.get("verify", {})
        if not isinstance(verify_cfg, dict):
            raise ConfigError("verify", "must be an object")
        return cls(ifs, target, schedule, n_values, verify_cfg, data)

    def to_dict(self) -> dict:
        return self.raw


def _parse_ifs(node, path: str) -> GridIFS:
    if node is None:
        raise ConfigError(path, "missing")
    if "name" in node:
        name = node["name"]
        if name not in NAMED_IFS:
            raise ConfigError(f"{path}.name", f"unknown system {name!r}; have {sorted(NAMED_IFS)}")
        base, pairs = NAMED_IFS[name]
    else:
        try:
            base = int(node["base"])
            pairs = [tuple(int(c) for c in p) for p in node["pairs"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(path, f"need base and pairs: {exc}") from exc
    try:
        return validate_ifs(base, pairs)
    except CarpetError as exc:
        raise ConfigError(path, str(exc)) from exc


def _parse_word(node, path: str) -> DigitWord:
    try:
        pre = [tuple(int(c) for c in p) for p in node.get("preperiod", [])]
        per = [tuple(int(c) for c in p) for p in node.get("period", [])]
    except (TypeError, ValueError) as exc:
        raise ConfigError(path, f"bad digit pairs: {exc}") from exc
    if per:
        return DigitWord.periodic(pre, per)
    if not pre:
        raise ConfigError(path, "need a nonempty preperiod or a period")
    return DigitWord.truncation(pre)


def _parse_target(ifs: GridIFS, node, path: str) -> TargetSpec:
    if node is None:
        raise ConfigError(path, "missing")
    try:
        if "name" in node:
            name = node["name"]
            if name not in NAMED_TARGETS:
                raise ConfigError(
                    f"{path}.name", f"unknown target {name!r}; have {sorted(NAMED_TARGETS)}"
                )
            _, kind, extra = NAMED_TARGETS[name]
            if kind == "point":
                return make_target(ifs, Fraction(extra[0]), Fraction(extra[1]))
            block_base = int(node.get("block_base", 4))
            depth = int(node.get("depth", 16384))
            word = alternating_block_word(block_base=block_base, depth=depth)
            return target_from_word(ifs, word)
        if "point" in node:
            z, w = node["point"]
            return make_target(ifs, Fraction(str(z)), Fraction(str(w)))
        if "word" in node:
            return target_from_word(ifs, _parse_word(node["word"], f"{path}.word"))
    except ConfigError:
        raise
    except (CarpetError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(path, str(exc)) from exc
    raise ConfigError(path, "need one of name/point/word")


def _parse_schedule(node, path: str) -> RateSchedule:
    if node is None:
        raise ConfigError(path, "missing")
    kind = node.get("kind", "linear")
    try:
        if kind == "linear":
            return RateSchedule.linear(Fraction(str(node["lam"])), Fraction(str(node["xi"])))
        if kind == "table":
            return RateSchedule.from_tables(node["lam"], node["xi"])
        if kind == "alternating":
            ratios = [(Fraction(str(l)), Fraction(str(x))) for l, x in node["ratios"]]
            return RateSchedule.alternating(ratios, int(node.get("block_base", 4)))
    except ConfigError:
        raise
    except (CarpetError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(path, f"bad {kind} schedule: {exc}") from exc
    raise ConfigError(f"{path}.kind", f"unknown kind {kind!r}")


def _parse_n_range(node, path: str) -> list[int]:
    if node is None:
        return list(range(1, 401))
    if isinstance(node, dict) and "values" in node:
        values = [int(v) for v in node["values"]]
        if not values or any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigError(path, "values must be strictly increasing and nonempty")
        return values
    if isinstance(node, dict):
        start = int(node.get("start", 1))
        stop = int(node.get("stop", 400))
        if start < 1 or stop < start:
            raise ConfigError(path, f"bad range [{start}, {stop}]")
        return list(range(start, stop + 1))
    raise ConfigError(path, "expected {start, stop} or {values}")


def load_config(path: str) -> RunConfig:
    with open(path) as fh:
        return RunConfig.from_dict(json.load(fh))


# commands


def cmd_dimension(config: RunConfig, out_dir: Path) -> int:
    report = dimension_report(config.ifs, config.target, config.schedule, config.n_values)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "sn.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "s_n", "argmin_j"])
        for rec in report.records:
            writer.writerow([rec.n, fmt(rec.value), rec.argmin_j])
    summary = {
        "limsup_estimate": _round12(report.limsup_estimate),
        "running_max": _round12(report.running_max),
        "still_rising": report.still_rising,
        "tail_fraction": report.tail_fraction,
        "n_count": len(report.records),
        "skipped": report.skipped,
        "closed_form": None if report.closed_form is None else _round12(report.closed_form),
        "closed_form_branch": report.closed_form_branch,
        "formula_source": report.formula_source,
        "warnings": report.warnings,
    }
    if config.schedule.kind == "alternating" and config.target.frequencies_exist:
        summary["ratio_limsup"] = _round12(
            ratio_limsup_dimension(config.ifs, config.target, config.schedule, config.n_values)
        )
    with open(out_dir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
    print(f"limsup estimate {fmt(report.limsup_estimate)}"
          + (f", closed form {fmt(report.closed_form)}" if report.closed_form is not None else ""))
    return 0


def cmd_slice(config: RunConfig, out_dir: Path) -> int:
    result = slice_dimension(config.ifs, config.target.word)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {
        "value": _round12(result.value),
        "liminf_attained": result.liminf_attained,
        "attractor_dimension": _round12(config.ifs.attractor_dimension()),
    }
    with open(out_dir / "slice.json", "w") as fh:
        json.dump(payload, fh, indent=2)
    print(f"slice dimension {fmt(result.value)}")
    return 0


def cmd_sn_table(config: RunConfig, out_dir: Path) -> int:
    ifs, target, schedule = config.ifs, config.target, config.schedule
    log_j = math.log(len(ifs.digits))
    log_b = math.log(ifs.base)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "sn_table.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "j", "weighted_row_count", "quotient"])
        for n in config.n_values:
            lam, xi = schedule.lam(n), schedule.xi(n)
            for j in range(lam, xi + 1):
                a = max_row_counts(ifs, target, schedule, n, j).log_value(ifs)
                q = (n * log_j + a) / ((n + j) * log_b)
                writer.writerow([n, j, fmt(a), fmt(q)])
    print(f"wrote surface for {len(config.n_values)} stages")
    return 0


def _verify_samples(config: RunConfig, opts: dict, n: int, seed: int):
    count = int(opts.get("samples", 2000))
    depth = int(opts.get("depth", n + config.schedule.xi(n) + 5))
    rng = random.Random(seed)
    return verify_mod.random_words(
        config.ifs, config.target, config.schedule, n, count, depth, rng
    )


def cmd_verify(config: RunConfig, out_dir: Path, seed_override: int | None = None) -> int:
    checks = config.verify.get("checks", {})
    if not checks:
        checks = {
            "oracle": {"n": 2},
            "containment": {"n": 3, "samples": 2000},
            "set_relation": {"n": 3, "samples": 2000},
        }
    seed = int(config.verify.get("seed", 0)) if seed_override is None else seed_override
    reports: list[verify_mod.CheckReport] = []

    if "oracle" in checks:
        opts = checks["oracle"]
        reports.append(
            verify_mod.oracle_window_report(
                config.ifs, config.target, config.schedule, int(opts.get("n", 2))
            )
        )
    if "containment" in checks:
        opts = checks["containment"]
        n = int(opts.get("n", 3))
        samples = _verify_samples(config, opts, n, seed)
        reports.append(
            verify_mod.check_containment_forward(
                config.ifs, config.target, config.schedule, n, samples
            )
        )
        reports.append(
            verify_mod.check_containment_backward(
                config.ifs, config.target, config.schedule, n, samples
            )
        )
    if "containment_exhaustive" in checks:
        opts = checks["containment_exhaustive"]
        n = int(opts.get("n", 2))
        depth = int(opts.get("depth", 10))
        words = list(verify_mod.exhaustive_truncations(config.ifs, depth))
        reports.append(
            verify_mod.check_containment_forward(
                config.ifs, config.target, config.schedule, n, words
            )
        )
        reports.append(
            verify_mod.check_containment_backward(
                config.ifs, config.target, config.schedule, n, words
            )
        )
    if "set_relation" in checks:
        opts = checks["set_relation"]
        n = int(opts.get("n", 3))
        if opts.get("exhaustive"):
            reports.append(
                verify_mod.exhaustive_relation_check(
                    config.ifs, config.target, config.schedule, n, int(opts.get("depth", 8))
                )
            )
        else:
            rng = random.Random(seed)
            depth = int(opts.get("depth", n + config.schedule.xi(n) + 4))
            words = [
                DigitWord.periodic(
                    (), [rng.choice(config.ifs.sorted_digits()) for _ in range(depth)]
                )
                for _ in range(int(opts.get("samples", 2000)))
            ]
            reports.append(
                verify_mod.check_set_relation(
                    config.ifs, config.target, config.schedule, n, words
                )
            )
    if "cover" in checks:
        opts = checks["cover"]
        n = int(opts.get("n", 2))
        j = int(opts.get("j", config.schedule.lam(n)))
        family = verify_mod.build_cover(config.ifs, config.target, config.schedule, n, j)
        rep = verify_mod.CheckReport(
            "cover-bound",
            len(family.boxes) <= family.cardinality_bound,
            len(family.boxes),
            details={"boxes": len(family.boxes), "bound": family.cardinality_bound},
        )
        reports.append(rep)
    if "measure" in checks:
        opts = checks["measure"]
        bps = [int(v) for v in opts.get("break_points", [])]
        if not bps:
            raise ConfigError("verify.checks.measure.break_points", "missing")
        delta = Fraction(str(opts.get("delta", 2)))
        builder = verify_mod.build_lower_bound_measure(
            config.ifs, config.target, config.schedule, bps, delta
        )
        level_ok = all(builder.level_sum(m) == 1 for m in range(1, builder.depth + 1))
        bound_ok = all(builder.mass_bound_holds(k) for k in range(len(bps)))
        rep = verify_mod.CheckReport(
            "measure-normalization", level_ok and bound_ok, builder.depth,
            details={"depth": builder.depth, "mass_bounds": bound_ok},
        )
        if not level_ok:
            rep.failures.append({"reason": "level sum differs from 1"})
        if not bound_ok:
            rep.failures.append({"reason": "point-phase mass bound violated"})
        reports.append(rep)
        rng = random.Random(seed)
        points = [builder.support_word(builder.depth)] + [
            builder.support_word(builder.depth, rng) for _ in range(2)
        ]
        radii = [Fraction(1, config.ifs.base ** m) for m in range(bps[0] + 1, builder.depth + 1)]
        samples = verify_mod.holder_exponent_samples(builder, points, radii)
        slack = float(opts.get("holder_slack", 0.05))
        threshold = {}
        for k, n_k in enumerate(bps):
            threshold[n_k] = (1.0 - 1.0 / float(delta)) * builder.stage_values[n_k] - slack
        bad = []
        for s in samples:
            k_idx = max(i for i, n_k in enumerate(bps) if n_k < s.level)
            if s.exponent < threshold[bps[k_idx]]:
                bad.append({"level": s.level, "exponent": s.exponent})
        reports.append(
            verify_mod.CheckReport(
                "measure-holder", not bad, len(samples),
                failures=bad[:10],
                details={"thresholds": {str(k): v for k, v in threshold.items()}},
            )
        )

    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {"passed": all(r.passed for r in reports), "checks": [r.to_dict() for r in reports]}
    with open(out_dir / "verify.json", "w") as fh:
        json.dump(payload, fh, indent=2)
    for r in reports:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name} (checked {r.checked}, skipped {r.skipped})")
    return 0 if payload["passed"] else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="carpetdim",
        description="dimension of rectangular shrinking targets on grid carpets",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("dimension", "slice", "verify", "sn-table"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--n-max", type=int, default=None, help="override the largest sampled n")
        p.add_argument("--seed", type=int, default=None, help="seed for sampled verification")
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config)
        if args.n_max is not None:
            config.n_values = [n for n in config.n_values if n <= args.n_max] or [args.n_max]
        out_dir = Path(args.out)
        if args.command == "dimension":
            return cmd_dimension(config, out_dir)
        if args.command == "slice":
            return cmd_slice(config, out_dir)
        if args.command == "verify":
            return cmd_verify(config, out_dir, seed_override=args.seed)
        return cmd_sn_table(config, out_dir)
    except CarpetError as exc:
        print(f"error: {exc}")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

"""Command-line front end: ``run``, ``sweep`` and ``validate``.

Exit codes: 0 success, 1 error (bad config, dimension mismatch, failed
validation), 2 when the start-state precheck says there is nothing to
search (``AlreadySolved`` or ``OrthogonalStart``).
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from . import __version__
from .errors import GroverError, PrecheckError
from .generators import RNG_NAME, StateSpec, TargetSpec, UnitarySpec, make_state, make_targets, make_unitary
from .operators import SearchProblem
from .reduced import build_reduced_model, compute_overlaps, optimal_iteration_count
from .serialization import TRACE_FIELDS, fmt, rows_to_csv, rows_to_json
from .simulate import Verdict, evolve, measure, precheck_start, run_search
from .validation import SCOPES, report, run_validation

SWEEP_FIELDS = (
    "point",
    "N",
    "ell",
    "a",
    "m_paper",
    "m_exact",
    "p_at_m_paper",
    "p_at_m_exact",
    "max_deviation",
    "verdict",
)


class ConfigError(GroverError, ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    n: int
    targets: TargetSpec
    unitary: UnitarySpec = UnitarySpec("identity")
    gamma: StateSpec = StateSpec("uniform")
    iterations: int | str = "auto-paper"
    record_full: bool = False
    measure_seed: int | None = None
    out: str | None = None
    fmt: str = "csv"

    def echo(self) -> dict:
        return {
            "n": self.n,
            "targets": str(self.targets),
            "unitary": str(self.unitary),
            "gamma": str(self.gamma),
            "iterations": self.iterations,
            "record_full": self.record_full,
            "measure_seed": self.measure_seed,
            "format": self.fmt,
        }

    def problem(self) -> SearchProblem:
        return SearchProblem(
            targets=make_targets(self.targets, self.n),
            gamma=make_state(self.gamma, self.n),
            v=make_unitary(self.unitary, self.n),
        )


@dataclass(frozen=True)
class SweepConfig:
    base: RunConfig
    axis: str  # n | ell | seed
    values: tuple[int, ...]
    workers: int = 1

    def points(self) -> list[RunConfig]:
        out = []
        for val in self.values:
            if self.axis == "n":
                out.append(replace(self.base, n=val))
            elif self.axis == "ell":
                out.append(replace(self.base, targets=TargetSpec(count=val, seed=self.base.targets.seed)))
            else:
                out.append(replace(self.base, unitary=UnitarySpec("haar", seed=val)))
        return out


# -- argument handling ------------------------------------------------------


def _int_list(text) -> tuple[int, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(int(v) for v in text)
    text = str(text)
    if ".." in text:
        lo, hi = text.split("..", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(v) for v in text.split(","))


def _iterations(value) -> int | str:
    if value in ("auto-paper", "auto-exact"):
        return value
    try:
        m = int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"--iterations must be an integer, auto-paper or auto-exact; got {value!r}") from None
    if m < 0:
        raise ConfigError(f"--iterations must be non-negative, got {m}")
    return m


def _load_config(path) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return {k.replace("-", "_"): v for k, v in doc.items()}


def _pick(args, cfg: dict, key: str, default=None):
    val = getattr(args, key, None)
    if val is not None:
        return val
    return cfg.get(key, default)


def _parse_spec(parser, text, what):
    try:
        return parser(str(text))
    except ValueError as exc:
        raise ConfigError(f"{what}: {exc}") from None


def build_run_config(args, cfg: dict | None = None, need_targets: bool = True) -> RunConfig:
    cfg = cfg if cfg is not None else _load_config(getattr(args, "config", None))
    n = _pick(args, cfg, "n")
    if n is None:
        raise ConfigError("--n is required")
    targets = _pick(args, cfg, "targets", None if need_targets else "count:1@0")
    if targets is None:
        raise ConfigError("--targets is required")
    out = _pick(args, cfg, "out")
    fmt_ = _pick(args, cfg, "format") or ("json" if out and str(out).endswith(".json") else "csv")
    if fmt_ not in ("csv", "json"):
        raise ConfigError(f"unknown format {fmt_!r}")
    measure_seed = _pick(args, cfg, "measure_seed")
    return RunConfig(
        n=int(n),
        targets=_parse_spec(TargetSpec.parse, targets, "targets"),
        unitary=_parse_spec(UnitarySpec.parse, _pick(args, cfg, "unitary", "identity"), "unitary"),
        gamma=_parse_spec(StateSpec.parse, _pick(args, cfg, "gamma", "uniform"), "gamma"),
        iterations=_iterations(_pick(args, cfg, "iterations", "auto-paper")),
        record_full=bool(getattr(args, "record_full", False) or cfg.get("record_full", False)),
        measure_seed=None if measure_seed is None else int(measure_seed),
        out=out,
        fmt=fmt_,
    )


def build_sweep_config(args) -> SweepConfig:
    cfg = _load_config(args.config)
    axes = {
        key: _pick(args, cfg, attr)
        for key, attr in (("n", "n_values"), ("ell", "ell_values"), ("seed", "seeds"))
    }
    chosen = {k: v for k, v in axes.items() if v is not None}
    if len(chosen) != 1:
        raise ConfigError("sweep needs exactly one of --n-values, --ell-values, --seeds")
    axis, raw = chosen.popitem()
    if axis == "n" and _pick(args, cfg, "n") is None:
        cfg = {**cfg, "n": _int_list(raw)[0]}
    base = build_run_config(args, cfg, need_targets=axis != "ell")
    if axis == "seed" and base.unitary.tag != "haar":
        raise ConfigError("--seeds sweeps the Haar seed; use --unitary haar:SEED")
    if axis == "ell" and base.targets.indices is not None:
        base = replace(base, targets=TargetSpec(count=1, seed=0))
    workers = int(_pick(args, cfg, "workers", 1))
    if workers < 1:
        raise ConfigError("--workers must be >= 1")
    return SweepConfig(base=base, axis=axis, values=_int_list(raw), workers=workers)


# -- commands -------------------------------------------------------------


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _metadata(command: str, config: dict, **extra) -> dict:
    return {"command": command, "config": config, "rng": RNG_NAME, "version": __version__, **extra}


def _choose_iterations(config: RunConfig, model) -> int:
    if config.iterations == "auto-paper":
        return optimal_iteration_count(model, "paper")
    if config.iterations == "auto-exact":
        return optimal_iteration_count(model, "exact")
    return int(config.iterations)


def cmd_run(config: RunConfig) -> int:
    problem = config.problem()
    verdict = precheck_start(problem)
    if verdict is not Verdict.PROCEED:
        raise PrecheckError(verdict)
    model = build_reduced_model(compute_overlaps(problem))
    m = _choose_iterations(config, model)
    trace = run_search(problem, m, record_full=config.record_full)
    last = trace.rows[-1]

    summary = {
        "a": model.a,
        "theta": model.theta,
        "m": m,
        "p_reduced": last.p_reduced,
        "p_full": last.p_full,
    }
    if config.measure_seed is not None:
        state = trace.final_state if trace.final_state is not None else evolve(problem, m)
        index, hit = measure(state, problem.targets, problem.v, config.measure_seed)
        summary.update(measured_index=index, hit=hit)

    rows = [r.as_dict() for r in trace.rows]
    if config.fmt == "json":
        text = rows_to_json(rows, _metadata("run", config.echo(), summary=summary))
    else:
        text = rows_to_csv(TRACE_FIELDS, rows)
    _emit(text, config.out)

    line = " ".join(f"{k}={fmt(v)}" for k, v in summary.items())
    print(line, file=sys.stdout if config.out else sys.stderr)
    return 0


def sweep_point(config: RunConfig) -> dict:
    row = {"N": config.n, "ell": None}
    try:
        problem = config.problem()
    except GroverError as exc:
        return {**row, "verdict": f"error: {exc}"}
    row["ell"] = problem.ell
    verdict = precheck_start(problem)
    if verdict is not Verdict.PROCEED:
        return {**row, "verdict": verdict.value}
    model = build_reduced_model(compute_overlaps(problem))
    m_paper = optimal_iteration_count(model, "paper")
    m_exact = optimal_iteration_count(model, "exact")
    trace = run_search(problem, max(m_paper, m_exact), record_full=True)
    return {
        **row,
        "a": model.a,
        "m_paper": m_paper,
        "m_exact": m_exact,
        "p_at_m_paper": trace.rows[m_paper].p_full,
        "p_at_m_exact": trace.rows[m_exact].p_full,
        "max_deviation": trace.max_deviation(),
        "verdict": verdict.value,
    }


def cmd_sweep(config: SweepConfig) -> int:
    points = config.points()
    if config.workers == 1:
        rows = [sweep_point(p) for p in points]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(sweep_point, points))
    for val, row in zip(config.values, rows):
        row["point"] = val

    base = config.base
    if base.fmt == "json":
        echo = {**base.echo(), "axis": config.axis, "values": list(config.values)}
        text = rows_to_json(rows, _metadata("sweep", echo))
    else:
        text = rows_to_csv(SWEEP_FIELDS, rows)
    _emit(text, base.out)
    bad = sum(r["verdict"] != Verdict.PROCEED.value for r in rows)
    print(f"{len(rows)} points, {bad} not searched", file=sys.stdout if base.out else sys.stderr)
    return 0


def cmd_validate(scope: str, seed: int, problems: int = 50, out: str | None = None) -> int:
    results = run_validation(scope, seed, problems)
    _emit(report(results), out)
    return 0 if all(r.passed for r in results) else 1


# -- entry point ------------------------------------------------------------


def _add_run_args(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file with the same keys as the flags")
    p.add_argument("--n", type=int, help="Hilbert-space dimension N")
    p.add_argument("--targets", help="idx:a,b,c or count:K@SEED")
    p.add_argument("--unitary", help="identity | walsh-hadamard | haar:SEED | file:PATH")
    p.add_argument("--gamma", help="uniform | basis:K | random:SEED | file:PATH")
    p.add_argument("--iterations", help="integer, auto-paper or auto-exact (default auto-paper)")
    p.add_argument("--record-full", action="store_true", default=None, help="also simulate in the full space")
    p.add_argument("--measure-seed", type=int, help="sample a measurement of the final state")
    p.add_argument("--out", help="output path (default: standard output)")
    p.add_argument("--format", choices=("csv", "json"))


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multigrover", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    _add_run_args(sub.add_parser("run", help="run one search and write its iteration trace"))

    sweep = sub.add_parser("sweep", help="sweep N, the target count, or the Haar seed")
    _add_run_args(sweep)
    sweep.add_argument("--n-values", help="comma list or LO..HI of dimensions")
    sweep.add_argument("--ell-values", help="comma list or LO..HI of target counts")
    sweep.add_argument("--seeds", help="comma list or LO..HI of Haar seeds")
    sweep.add_argument("--workers", type=int, help="worker processes (default 1)")

    val = sub.add_parser("validate", help="run the invariant-subspace validation suite")
    val.add_argument("--scope", choices=("all",) + SCOPES, default="all")
    val.add_argument("--seed", type=int, default=0)
    val.add_argument("--problems", type=int, default=50, help="size of the random problem family")
    val.add_argument("--out")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(build_run_config(args))
        if args.command == "sweep":
            return cmd_sweep(build_sweep_config(args))
        return cmd_validate(args.scope, args.seed, args.problems, args.out)
    except PrecheckError as exc:
        print(f"precheck verdict: {exc.verdict.value}", file=sys.stderr)
        return 2
    except (GroverError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

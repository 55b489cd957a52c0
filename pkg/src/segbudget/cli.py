"""Command-line interface: allocation, simulation, reporting, serving.

Every subcommand is a thin shell over the library; allocate in particular
prints exactly what the library's allocator plus plan serializer produce.
Exit codes: 0 success, 2 parse/validation failure, 3 infeasible budget.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .ablation import parse_report, run_ablation, serialize_report
from .allocation import AllocationConfig, allocate
from .assembly import serialize_plan
from .errors import BudgetInfeasible, ParseError, SegBudgetError
from .reports import emit_report
from .runconfig import RunConfig, default_config, load_run_config

EXIT_PARSE = 2
EXIT_INFEASIBLE = 3

REPORT_JSON = "report.json"


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def parse_scores_text(text: str) -> list[float]:
    """Scores from either a JSON array or whitespace-separated plain text,
    autodetected by the first non-whitespace byte."""
    stripped = text.lstrip()
    if not stripped:
        raise ParseError("scores input is empty")
    if stripped[0] == "[":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid scores document: {exc.msg}", offset=exc.pos) from exc
        if not isinstance(doc, list) or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in doc
        ):
            raise ParseError("scores document must be an array of numbers")
        return [float(x) for x in doc]
    values = []
    for token in stripped.split():
        try:
            values.append(float(token))
        except ValueError as exc:
            raise ParseError(f"not a number: {token!r}") from exc
    return values


@click.group()
@click.version_option(package_name="segbudget")
def main():
    """Budget-constrained token allocation and its simulation harness."""


@main.command("allocate")
@click.argument("scores_file", type=click.Path(path_type=Path, allow_dash=True))
@click.option("--k-min", type=int, default=4, show_default=True)
@click.option("--k-max", type=int, default=128, show_default=True)
@click.option("--budget", type=int, required=True, help="Global token budget.")
@click.option("--epsilon", type=float, default=1e-6, show_default=True)
def cmd_allocate(scores_file: Path, k_min: int, k_max: int, budget: int, epsilon: float):
    """Allocate per-segment budgets for the scores in SCORES_FILE ('-' for stdin)."""
    try:
        if str(scores_file) == "-":
            text = sys.stdin.read()
        else:
            text = scores_file.read_text(encoding="utf-8")
    except OSError as exc:
        _fail(EXIT_PARSE, f"cannot read {scores_file}: {exc}")
    try:
        scores = parse_scores_text(text)
        cfg = AllocationConfig(b_max=budget, k_min=k_min, k_max=k_max, epsilon=epsilon)
        plan = allocate(scores, cfg)
    except BudgetInfeasible as exc:
        _fail(EXIT_INFEASIBLE, str(exc))
    except (SegBudgetError, ValueError) as exc:
        _fail(EXIT_PARSE, str(exc))
    click.echo(serialize_plan(plan))


def _load_config(config_path: Path | None, seed: int | None, trials: int | None) -> RunConfig:
    if config_path is None:
        cfg = default_config()
    else:
        try:
            cfg = load_run_config(config_path.read_text(encoding="utf-8"))
        except OSError as exc:
            _fail(EXIT_PARSE, f"cannot read {config_path}: {exc}")
        except ParseError as exc:
            _fail(EXIT_PARSE, str(exc))
    if seed is not None:
        cfg.seed = seed
    if trials is not None:
        cfg.trials = trials
    return cfg


def _print_summary(report) -> None:
    click.echo(f"{'policy':<20}{'accuracy':>10}{'mean_tokens':>14}")
    for kind in report.policies:
        click.echo(
            f"{kind:<20}{report.accuracy[kind]:>10.4f}{report.mean_tokens[kind]:>14.1f}"
        )


def _run_and_emit(cfg: RunConfig, out_dir: Path, verbose: bool) -> None:
    sweep = len(cfg.budgets) > 1
    for budget in cfg.budgets:
        target = out_dir / f"budget_{budget}" if sweep else out_dir
        report = run_ablation(
            cfg.episode_spec(),
            cfg.policy_list(),
            cfg.scorer_spec(),
            cfg.allocation_config(budget),
            cfg.trials,
            window=cfg.window,
            fps=cfg.fps,
            compressor=cfg.compressor_spec(),
        )
        target.mkdir(parents=True, exist_ok=True)
        (target / REPORT_JSON).write_text(serialize_report(report), encoding="utf-8")
        paths = emit_report(report, target)
        click.echo(f"budget {budget}: {cfg.trials} trials -> {target}")
        _print_summary(report)
        if verbose:
            for p in paths:
                click.echo(f"wrote {p}")


@main.command("simulate")
@click.option("--config", "config_path", type=click.Path(path_type=Path, exists=False))
@click.option("--out", "out_dir", type=click.Path(path_type=Path), default=Path("out"))
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--trials", type=int, default=None, help="Override the trial count.")
@click.option("-v", "--verbose", is_flag=True)
def cmd_simulate(config_path, out_dir: Path, seed, trials, verbose: bool):
    """Run the adaptive-allocation pipeline alone and emit its report."""
    cfg = _load_config(config_path, seed, trials)
    cfg.policies = ["ata"]
    _run_and_emit(cfg, out_dir, verbose)


@main.command("ablate")
@click.option("--config", "config_path", type=click.Path(path_type=Path, exists=False))
@click.option("--out", "out_dir", type=click.Path(path_type=Path), default=Path("out"))
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--trials", type=int, default=None, help="Override the trial count.")
@click.option("-v", "--verbose", is_flag=True)
def cmd_ablate(config_path, out_dir: Path, seed, trials, verbose: bool):
    """Run the full policy zoo over seeded trials and emit reports."""
    cfg = _load_config(config_path, seed, trials)
    _run_and_emit(cfg, out_dir, verbose)


@main.command("report")
@click.argument("report_file", type=click.Path(path_type=Path))
@click.option("--out", "out_dir", type=click.Path(path_type=Path), default=Path("out"))
@click.option("-v", "--verbose", is_flag=True)
def cmd_report(report_file: Path, out_dir: Path, verbose: bool):
    """Re-emit tables and charts from a saved report.json."""
    try:
        report = parse_report(report_file.read_text(encoding="utf-8"))
    except OSError as exc:
        _fail(EXIT_PARSE, f"cannot read {report_file}: {exc}")
    except ParseError as exc:
        _fail(EXIT_PARSE, str(exc))
    paths = emit_report(report, out_dir)
    _print_summary(report)
    if verbose:
        for p in paths:
            click.echo(f"wrote {p}")


@main.command("serve")
@click.option("--bind", default="127.0.0.1:8000", show_default=True, help="host:port")
def cmd_serve(bind: str):
    """Serve the stateless allocation endpoint."""
    import uvicorn

    from .service import create_app

    host, _, port_text = bind.rpartition(":")
    if not host or not port_text.isdigit():
        _fail(EXIT_PARSE, f"--bind must be host:port, got {bind!r}")
    uvicorn.run(create_app(), host=host, port=int(port_text))


if __name__ == "__main__":
    main()

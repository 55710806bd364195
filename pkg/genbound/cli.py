"""Command-line experiment runner.

    genbound <experiment> [--config PATH] [--out PATH] [--format csv|json] [--seed N] [--record]

Exit status is 0 when every row passes, 1 when some row fails and 2 on errors.
"""
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple
import argparse
import itertools
import json
import logging
import math
import sys
import time

import pandas as pd
from pydantic import ValidationError

from genbound.config import get_settings
from genbound.exceptions import ConfigError, GenboundError, InvalidParameterError, OutputError
from genbound.experiments import SUITES
from genbound.schemas.experiment import (
    ExperimentConfig, ExperimentName, GridValue, OutputFormat, ResultRow,
)

logger = logging.getLogger(__name__)

RESERVED = ("experiment", "measured", "theoretical", "pass", "runtime_ms")
NON_FINITE = ("inf", "-inf", "nan")
_CONFIG_KEYS = {"seeds", "output_path", "format"}


# ---------------------------------------------------------------------------
# Config files
# ---------------------------------------------------------------------------

def parse_value(token: str) -> GridValue:
    """int, then float, else the stripped string."""
    token = token.strip()
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        return token


def parse_config(text: str, experiment: ExperimentName) -> ExperimentConfig:
    """Flat `key = value` lines; lists are comma separated and `#` starts a comment."""
    grid: Dict[str, List[GridValue]] = {}
    settings: Dict[str, object] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {number}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {number}: missing key")
        values = [parse_value(token) for token in value.split(",") if token.strip()]
        if key == "experiment":
            named = str(values[0]) if values else ""
            if named != experiment.value:
                raise ConfigError(f"config is for {named!r}, not {experiment.value!r}")
        elif key == "seeds":
            settings["seeds"] = values
        elif key in _CONFIG_KEYS:
            settings[key] = str(values[0]) if values else ""
        else:
            grid[key] = values
    try:
        return ExperimentConfig(experiment=experiment, grid=grid, **settings)
    except ValidationError as exc:
        raise ConfigError(f"invalid config: {exc}") from exc


def load_config(path: str, experiment: ExperimentName) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, experiment)


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------

def expand_grid(config: ExperimentConfig) -> List[Dict[str, GridValue]]:
    """Suite defaults overridden by the config, as points in grid order."""
    suite = SUITES[config.experiment]
    unknown = sorted(set(config.grid) - set(suite.DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown parameters for {config.experiment.value}: {', '.join(unknown)}")
    grid = {**suite.DEFAULTS, **config.grid}
    keys = list(grid)
    return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[key] for key in keys))]


def _evaluate_point(experiment: ExperimentName, point: Dict[str, GridValue], seed: int,
                    emit_timing: bool) -> List[ResultRow]:
    suite = SUITES[experiment]
    started = time.perf_counter()
    try:
        rows = suite.evaluate(point, seed)
    except InvalidParameterError as exc:
        raise ConfigError(f"invalid grid point {point}: {exc.detail}") from exc
    except GenboundError:
        raise
    except (ValidationError, KeyError, ValueError) as exc:
        raise ConfigError(f"invalid grid point {point}: {exc}") from exc
    runtime_ms = (time.perf_counter() - started) * 1000 if emit_timing else 0.0
    return [
        row.model_copy(update={"params": {**point, "seed": seed, **row.params}, "runtime_ms": runtime_ms})
        for row in rows
    ]


def run(config: ExperimentConfig, emit_output: bool = True) -> List[ResultRow]:
    """Evaluate every grid point for every seed, write the output file and return the rows."""
    settings = get_settings()
    points = expand_grid(config)
    work: List[Tuple[Dict[str, GridValue], int]] = [(point, seed) for seed in config.seeds for point in points]
    logger.info("%s: %d grid points × %d seeds", config.experiment.value, len(points), len(config.seeds))

    with ThreadPoolExecutor(max_workers=settings.workers) as pool:
        batches = list(pool.map(
            lambda item: _evaluate_point(config.experiment, item[0], item[1], settings.emit_timing), work
        ))
    rows = [row for batch in batches for row in batch]

    failed = sum(not row.passed for row in rows)
    if failed:
        logger.warning("%s: %d of %d rows failed", config.experiment.value, failed, len(rows))
    if emit_output:
        emit(rows, config.format, config.output_path)
    return rows


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _format_number(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _json_number(value):
    """Non-finite floats as the same strings the CSV writer uses."""
    if isinstance(value, float) and not math.isfinite(value):
        return _format_number(value)
    return value


def _param_columns(rows: Sequence[ResultRow]) -> List[str]:
    columns: List[str] = []
    for row in rows:
        for key in row.params:
            if key in RESERVED:
                raise OutputError(f"parameter name {key!r} collides with an output column")
            if key not in columns:
                columns.append(key)
    return columns


def emit(rows: Sequence[ResultRow], format: OutputFormat, path: str) -> None:
    """CSV `experiment,params…,measured,theoretical,pass,runtime_ms` or the same keys as JSON."""
    format = OutputFormat(format)
    params = _param_columns(rows)
    columns = ["experiment", *params, "measured", "theoretical", "pass", "runtime_ms"]
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        if format == OutputFormat.CSV:
            frame = pd.DataFrame(
                [[row.experiment,
                  *(_format_number(row.params[key]) if key in row.params else "" for key in params),
                  _format_number(row.measured), _format_number(row.theoretical),
                  _format_number(row.passed), _format_number(row.runtime_ms)] for row in rows],
                columns=columns,
                dtype=object,
            )
            frame.to_csv(path, index=False, lineterminator="\n")
        else:
            records = [
                {"experiment": row.experiment,
                 **{key: _json_number(row.params.get(key)) for key in params},
                 "measured": _json_number(row.measured), "theoretical": _json_number(row.theoretical),
                 "pass": row.passed, "runtime_ms": _json_number(row.runtime_ms)}
                for row in rows
            ]
            Path(path).write_text(json.dumps(records, indent=2, allow_nan=False) + "\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    logger.info("wrote %d rows to %s", len(rows), path)


def _row_from_record(record: Dict[str, object], parse_params: bool) -> ResultRow:
    params = {}
    for key, value in record.items():
        if key in RESERVED or value is None or value == "":
            continue
        if parse_params or value in NON_FINITE:
            value = parse_value(value)
        params[key] = value
    return ResultRow(
        experiment=str(record["experiment"]),
        params=params,
        measured=float(record["measured"]),
        theoretical=float(record["theoretical"]),
        passed=record["pass"] in (True, "true"),
        runtime_ms=float(record["runtime_ms"]),
    )


def read_rows(path: str, format: OutputFormat) -> List[ResultRow]:
    """Rows back from an emitted file."""
    format = OutputFormat(format)
    if format == OutputFormat.CSV:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
        return [_row_from_record(record, parse_params=True) for record in frame.to_dict(orient="records")]
    records = json.loads(Path(path).read_text())
    return [_row_from_record(record, parse_params=False) for record in records]


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="genbound", description="Run a covering/complexity bound experiment.")
    parser.add_argument("experiment", choices=[name.value for name in ExperimentName])
    parser.add_argument("--config", help="key = value grid file (suite defaults when omitted)")
    parser.add_argument("--out", help="output path")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat])
    parser.add_argument("--seed", type=int, help="run a single seed")
    parser.add_argument("--record", action="store_true", help="store the run in the ledger database")
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    experiment = ExperimentName(args.experiment)
    if args.config:
        config = load_config(args.config, experiment)
        explicit = config.model_fields_set
    else:
        config = ExperimentConfig(experiment=experiment, grid=dict(SUITES[experiment].DEFAULTS))
        explicit = set()

    update: Dict[str, object] = {}
    if args.format:
        update["format"] = OutputFormat(args.format)
    fmt = update.get("format", config.format)
    if args.out:
        update["output_path"] = args.out
    elif "output_path" not in explicit:
        update["output_path"] = f"{experiment.value}.{OutputFormat(fmt).value}"
    if args.seed is not None:
        update["seeds"] = [args.seed]
    return config.model_copy(update=update)


def main(argv: Optional[Sequence[str]] = None) -> int:
    settings = get_settings()
    logging.basicConfig(level=settings.log_level.upper(),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args)
        rows = run(config)
        if args.record or settings.record_runs:
            from genbound.database import SessionLocal, init_db
            from genbound.ledger import record_run

            init_db()
            db = SessionLocal()
            try:
                record_run(db, config, rows)
            finally:
                db.close()
    except GenboundError as exc:
        print(f"genbound: {exc.kind}: {exc.detail}", file=sys.stderr)
        return 2

    failed = sum(not row.passed for row in rows)
    if failed:
        print(f"genbound: {failed} of {len(rows)} rows failed", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

import json
import logging
import sys
from pathlib import Path
from typing import Optional

import click
from pydantic import ValidationError

from larmor_clock.config import get_settings
from larmor_clock.errors import LarmorError
from larmor_clock.schemas import OutputRecord, ScenarioConfig, SweepSpec, config_schema
from larmor_clock.services import ScenarioService
from larmor_clock.validation import run_validation

settings = get_settings()
logger = logging.getLogger(__name__)

EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_VALIDATION = 4

HBAR_MEV_S = 6.582119569e-22

ENERGY_FIELDS = ("E", "m", "V")
TIME_FIELDS = ("tau_T", "tau_R", "tau_L", "tau_D", "tau_free")


def _config_error(message: str):
    click.echo(f"Config error: {message}", err=True)
    sys.exit(EXIT_CONFIG)


def load_config(path: str) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as e:
        _config_error(f"cannot read {path}: {e}")
    try:
        return ScenarioConfig.model_validate_json(text)
    except ValidationError as e:
        for error in e.errors():
            location = ".".join(str(part) for part in error["loc"])
            click.echo(f"  {location}: {error['msg']}", err=True)
        _config_error(f"{e.error_count()} invalid field(s) in {path}")


def to_si(record: OutputRecord, mass_mev: float) -> OutputRecord:
    """Energies in MeV and times in seconds for a particle of rest energy mass_mev."""
    seconds = HBAR_MEV_S / mass_mev
    update = {name: getattr(record, name) * mass_mev for name in ENERGY_FIELDS}
    update.update({name: getattr(record, name) * seconds for name in TIME_FIELDS})
    return record.model_copy(update=update)


def _display(records, si: bool, mass_mev: Optional[float]):
    if si:
        if not (mass_mev and mass_mev > 0):
            raise click.UsageError("--si needs a positive --mass-mev")
        return [to_si(record, mass_mev) for record in records]
    return records


def _emit_csv(records, output: Optional[str]):
    if output:
        with open(output, "w", newline="") as stream:
            ScenarioService.write_csv(records, stream)
        logger.info(f"Wrote {len(records)} rows to {output}")
    else:
        ScenarioService.write_csv(records, click.get_text_stream("stdout"))


@click.group()
@click.option("--log-level", default=None, help="Override LARMOR_LOG_LEVEL.")
def cli(log_level: Optional[str]):
    """Relativistic Larmor-clock tunneling times in natural units."""
    logging.basicConfig(
        level=(log_level or settings.LOG_LEVEL).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


@cli.command()
@click.argument("config_path", type=click.Path())
@click.option("--output", "-o", type=click.Path(), help="Write a one-row CSV instead of JSON to stdout.")
@click.option("--si", is_flag=True, help="Report energies in MeV and times in seconds.")
@click.option("--mass-mev", type=float, help="Rest energy in MeV used by --si.")
def run(config_path: str, output: Optional[str], si: bool, mass_mev: Optional[float]):
    """Compute every clock quantity for a single scenario."""
    config = load_config(config_path)
    try:
        record = ScenarioService.run_point(config)
    except LarmorError as e:
        click.echo(f"Solver error ({type(e).__name__}): {e}", err=True)
        sys.exit(EXIT_SOLVER)

    (record,) = _display([record], si, mass_mev)
    if output:
        _emit_csv([record], output)
    else:
        click.echo(json.dumps(record.to_json_dict(), indent=2))


@cli.command()
@click.argument("config_path", type=click.Path())
@click.option("--axis", required=True, type=click.Choice(["E", "d", "U0", "V", "n_segments"]))
@click.option("--start", required=True, type=float)
@click.option("--stop", required=True, type=float)
@click.option("--count", required=True, type=int)
@click.option("--log", "log_spacing", is_flag=True, help="Geometric spacing between start and stop.")
@click.option("--output", "-o", type=click.Path(), help="CSV file; stdout when omitted.")
@click.option("--threads", type=int, default=None, help="Override LARMOR_THREADS.")
@click.option("--si", is_flag=True)
@click.option("--mass-mev", type=float)
def sweep(config_path: str, axis: str, start: float, stop: float, count: int, log_spacing: bool,
          output: Optional[str], threads: Optional[int], si: bool, mass_mev: Optional[float]):
    """Run one scenario over a range of one parameter and emit CSV rows."""
    config = load_config(config_path)
    try:
        sweep_spec = SweepSpec(axis=axis, start=start, stop=stop, count=count,
                              spacing="log" if log_spacing else "linear")
    except ValidationError as e:
        _config_error("; ".join(error["msg"] for error in e.errors()))
    records = ScenarioService.run_sweep(config, sweep_spec, threads=threads)
    _emit_csv(_display(records, si, mass_mev), output)


@cli.command()
@click.option("--json", "as_json", is_flag=True, help="Machine-readable report.")
@click.option("--tol", type=float, default=None, help="Replace every suite tolerance.")
@click.option("--seed", type=int, default=0, show_default=True)
def validate(as_json: bool, tol: Optional[float], seed: int):
    """Run the invariant suite; exit 4 if any suite fails."""
    report = run_validation(seed=seed, tol=tol)
    if as_json:
        click.echo(report.model_dump_json(indent=2))
    else:
        for suite in report.suites:
            status = "PASS" if suite.passed else "FAIL"
            line = f"{status}  {suite.name:<24} cases={suite.cases:<4} max_error={suite.max_error:.3e} tol={suite.tolerance:.1e}"
            click.echo(f"{line}  {suite.message}".rstrip())
        click.echo(f"{'all suites passed' if report.passed else 'validation FAILED'} in {report.duration:.1f}s")
    if not report.passed:
        sys.exit(EXIT_VALIDATION)


@cli.command()
def schema():
    """Print the JSON schema of scenario configs."""
    click.echo(json.dumps(config_schema(), indent=2))


if __name__ == "__main__":
    cli()

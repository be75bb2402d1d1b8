import csv
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, Iterable, List, Optional, TextIO

from larmor_clock.clock import clock_times, free_traversal_time
from larmor_clock.config import get_settings
from larmor_clock.core import SpinOrientation
from larmor_clock.errors import LarmorError
from larmor_clock.profiles import make_profile, to_piecewise
from larmor_clock.scattering import scatter_channel, scatter_spin
from larmor_clock.schemas import CSV_HEADER, OutputRecord, ScenarioConfig, SweepSpec
from larmor_clock.spin import incident_spin, summed_spin

logger = logging.getLogger(__name__)
settings = get_settings()


class ScenarioService:

    @staticmethod
    def run_point(config: ScenarioConfig, axis_value: float = math.nan) -> OutputRecord:
        """Every reported quantity for one validated scenario."""
        E, m, V = config.particle.E, config.particle.m, config.field.V
        numerics = config.numerics
        barrier = to_piecewise(make_profile(config.barrier), numerics.n_segments)
        orientation = SpinOrientation(config.spin.theta, config.spin.phi)

        base = scatter_channel(barrier, E, 0.0, m)
        channels = scatter_spin(barrier, E, V, m)
        times = clock_times(barrier, E, m=m, h=numerics.fd_step, richardson=numerics.richardson)

        if V > 0:
            spin = summed_spin(channels, orientation)
        else:
            spin = incident_spin(orientation, base.f0)

        residual = max((base, *channels), key=lambda r: abs(r.unitarity_residual)).unitarity_residual
        converged = times.converged and abs(residual) < numerics.unitarity_tol
        if abs(residual) >= numerics.unitarity_tol:
            logger.warning(f"Unitarity residual {residual:.3e} above tolerance at E={E}, V={V}")

        data = {**base.to_dict(), **times.to_dict(), **spin.to_dict()}
        data.update(
            beta=base.beta if not times.resonance else math.nan,
            tau_free=free_traversal_time(E, barrier.length, m),
            unitarity_residual=residual,
            converged=converged,
        )
        return OutputRecord(
            axis_value=axis_value,
            E=E,
            m=m,
            V=V,
            theta=config.spin.theta,
            phi=config.spin.phi,
            n_segments=numerics.n_segments,
            **data,
        )

    @staticmethod
    def _failed_record(config: ScenarioConfig, axis: str, value: float, error: Exception) -> OutputRecord:
        echo = {
            "E": config.particle.E,
            "m": config.particle.m,
            "V": config.field.V,
            "theta": config.spin.theta,
            "phi": config.spin.phi,
            "n_segments": config.numerics.n_segments,
        }
        if axis in echo:
            echo[axis] = int(round(value)) if axis == "n_segments" else value
        return OutputRecord(axis_value=value, converged=False, error=str(error), **echo)

    @staticmethod
    def apply_axis(config: ScenarioConfig, axis: str, value: float) -> ScenarioConfig:
        return config.with_axis(axis, value)

    @staticmethod
    def run_sweep(config: ScenarioConfig, sweep: SweepSpec, threads: Optional[int] = None) -> List[OutputRecord]:
        """One record per sweep value, in sweep order; failing points become converged=false rows."""
        values = sweep.values()
        workers = threads or settings.threads
        logger.info(f"Starting {sweep.axis} sweep over {len(values)} points ({sweep.spacing} spacing)")
        started = time.perf_counter()

        def point(value: float) -> OutputRecord:
            try:
                scenario = ScenarioService.apply_axis(config, sweep.axis, value)
                return ScenarioService.run_point(scenario, axis_value=value)
            except (LarmorError, ValueError) as e:
                logger.warning(f"Sweep point {sweep.axis}={value:.6g} failed: {e}")
                return ScenarioService._failed_record(config, sweep.axis, value, e)

        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(point, values))

        stats = ScenarioService.sweep_stats(records)
        logger.info(
            f"Sweep finished in {time.perf_counter() - started:.2f}s: "
            f"{stats['converged']} converged, {stats['failed']} failed, {stats['resonances']} resonances"
        )
        return records

    @staticmethod
    def sweep_stats(records: Iterable[OutputRecord]) -> Dict[str, Any]:
        records = list(records)
        return {
            "points": len(records),
            "converged": sum(1 for r in records if r.converged),
            "failed": sum(1 for r in records if r.error),
            "resonances": sum(1 for r in records if not r.error and math.isnan(r.tau_R)),
        }

    @staticmethod
    def write_csv(records: Iterable[OutputRecord], stream: TextIO):
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for record in records:
            writer.writerow(record.to_row())

    @staticmethod
    def record_to_config(record: OutputRecord, base: ScenarioConfig) -> ScenarioConfig:
        """Scenario that reproduces ``record``: its echoed inputs on top of ``base``."""
        data = base.model_dump()
        data["particle"] = {"E": record.E, "m": record.m}
        data["field"] = {"V": record.V}
        data["spin"] = {"theta": record.theta, "phi": record.phi}
        data["numerics"]["n_segments"] = record.n_segments
        return ScenarioConfig.model_validate(data)

"""Subcommand dispatch, CSV outputs and the run manifest."""
import logging
import platform
import time
from importlib import metadata
from pathlib import Path
from typing import Any, Callable, Optional

from attrs import define, field, validators, Factory, evolve

from .base.interface import BaseInterface
from .base.report import BoundReport
from .base.types import Subcommand, EquationKind, AblationVariant
from .base.exceptions import (
    WorkbenchException,
    CheckFailure,
    DegenerateSamplesException,
)
from .config import RunConfig
from .grid.field import set_fft_workers
from .physics.norms import strichartz_diagnostic, h1_difference
from .physics.potential import measure_convolution_rate, multiplier_bound_check, bilinear_pairing_bound_check
from .physics.evolution import EvolutionSpec, solve, scattering_defect, write_snapshots
from .studies.harness import make_initial_data, run_pair, run_sweep, box_doubling_check
from .studies.resonance import verify_lower_bound, ablation_check
from .studies.boardgame import boardgame_table, verify_counts
from .studies.hierarchy import hierarchy_difference_series
from .utils.digest import Digest
from .utils.writers import write_csv, write_json


logger = logging.getLogger(__name__)

__MANIFEST__ = "manifest.json"
__MASS_TOLERANCE__ = 1e-10
__ENERGY_TOLERANCE__ = 1e-6
__EXHAUSTIVE_RANGE__ = 6
__PACKAGES__ = ("biscatter", "numpy", "scipy", "attrs", "ruamel.yaml")

EXIT_SUCCESS = 0
EXIT_CHECK_FAILED = 1
EXIT_ERROR = 2


@define(frozen=True, slots=True, weakref_slot=False)
class CheckOutcome(BaseInterface):
    """One named verdict in a manifest

    Args:
        name (str): What was checked
        passed (bool): The verdict
        gated (bool): Whether a failure changes the exit code
        details (dict): lhs, rhs and context
    """
    name: str = field(validator=validators.instance_of(str))
    passed: bool = field(validator=validators.instance_of(bool))
    gated: bool = field(default=True, validator=validators.instance_of(bool))
    details: dict = field(default=Factory(dict))

    @classmethod
    def from_report(cls, name: str, report: BoundReport, gated: bool = True) -> 'CheckOutcome':
        return cls(name, report.passed, gated, {"lhs": report.lhs, "rhs": report.rhs, **report.details})

    @classmethod
    def at_most(cls, name: str, value: float, limit: float, gated: bool = True) -> 'CheckOutcome':
        return cls(name, bool(value <= limit), gated, {"value": float(value), "limit": float(limit)})


def package_versions() -> dict[str, str]:
    versions = {"python": platform.python_version()}
    for package in __PACKAGES__:
        try:
            versions[package] = metadata.version(package)
        except metadata.PackageNotFoundError:
            versions[package] = "unknown"
    return versions


@define(slots=True, weakref_slot=False)
class Controller:
    """The Controller runs one configured subcommand and records what it produced

    Args:
        config (RunConfig): The validated configuration
        directory (Path): Where outputs and the manifest go
        outputs (dict[str, str]): File name to SHA-256 digest of everything written
        checks (list[CheckOutcome]): Verdicts in the order they were made
        summary (dict[str, Any]): Scalars worth echoing into the manifest
    """
    config: RunConfig = field(validator=validators.instance_of(RunConfig))
    directory: Path = field(converter=Path)
    outputs: dict = field(default=Factory(dict))
    checks: list = field(default=Factory(list))
    summary: dict = field(default=Factory(dict))

    @property
    def formats(self) -> tuple[str, ...]:
        return self.config.output.formats

    def _write_rows(self, name: str, rows: list[dict], columns: list[str]) -> None:
        if "csv" not in self.formats:
            return
        digest = write_csv(rows, self.directory / name, columns)
        self.outputs[name] = digest.hex
        logger.info("Wrote %d rows to %s", len(rows), self.directory / name)

    def _record(self, outcome: CheckOutcome) -> None:
        if not outcome.passed:
            logger.warning("Check %s failed: %s", outcome.name, outcome.details)
        self.checks.append(outcome)

    def _conservation(self, label: str, mass_drift: float, energy_drift: float) -> None:
        self._record(CheckOutcome.at_most(f"{label}.mass_conservation", mass_drift, __MASS_TOLERANCE__))
        self._record(CheckOutcome.at_most(f"{label}.energy_conservation", energy_drift, __ENERGY_TOLERANCE__))

    def _initial_data(self):
        grid = self.config.grid_spec()
        return make_initial_data(self.config.data.recipe_for(self.config.physics), grid)

    def _run_solve(self) -> None:
        config, physics = self.config, self.config.physics
        hartree = physics.equation is EquationKind.HARTREE
        spec = EvolutionSpec(
            physics.equation, config.grid_spec(), config.time.dt, config.time.T, config.time.stride,
            b0=physics.b0,
            profile=config.profile() if hartree else None,
            N=physics.N if hartree else None,
            beta=physics.beta if hartree else None)
        run = solve(spec, self._initial_data())
        self._write_rows("solve.csv", run.diagnostic_rows(), ["t", "mass", "energy", "h1norm"])
        if "bin" in self.formats:
            path = write_snapshots(run, self.directory / "snapshots.bin")
            self.outputs[path.name] = _file_digest(path)
        self.summary.update(
            E0=run.initial_energy_norm,
            scattering_defect=scattering_defect(run),
            strichartz=strichartz_diagnostic(run))
        self._conservation(physics.equation.value, run.mass_drift, run.energy_drift)

    def _run_compare(self) -> None:
        config, physics = self.config, self.config.physics
        pair = run_pair(self._initial_data(), config.time.T, config.time.dt, config.profile(), physics.N, physics.beta, config.time.stride)
        rows = [
            {"t": t, "h1_diff": h1_difference(a, b),
             "mass_cubic": m_a, "mass_hartree": m_b, "energy_cubic": e_a, "energy_hartree": e_b}
            for (t, a), (_, b), m_a, m_b, e_a, e_b in zip(
                pair.cubic.snapshots, pair.hartree.snapshots,
                pair.cubic.masses, pair.hartree.masses, pair.cubic.energies, pair.hartree.energies)]
        self._write_rows("compare.csv", rows, ["t", "h1_diff", "mass_cubic", "mass_hartree", "energy_cubic", "energy_hartree"])
        self.summary.update(
            N=physics.N, sup_diff=pair.sup_diff,
            scattering_defect_cubic=scattering_defect(pair.cubic),
            scattering_defect_hartree=scattering_defect(pair.hartree))
        self._conservation("pair", pair.mass_drift_max, pair.energy_drift_max)

    def _run_sweep(self) -> None:
        config, physics, check = self.config, self.config.physics, self.config.check
        recipe = config.data.recipe_for(physics)
        grid = config.grid_spec()
        report = run_sweep(recipe, physics.beta, physics.N_list, config.time.T, config.time.dt, config.profile(), grid,
                           config.time.stride, physics.model, config.output.jobs, check.tolerance)
        self._write_rows("sweep.csv", report.rows(),
                         ["N", "beta", "q", "T", "dt", "supDiff", "mass_drift_max", "energy_drift_max"])
        self.summary.update(
            slope=report.fit.slope, intercept=report.fit.intercept, max_residual=report.fit.max_residual,
            discarded=list(report.fit.discarded), predicted=report.predicted._to_dict(),
            horizons=None if report.horizons is None else report.horizons._to_dict(),
            satisfies_main_hypotheses=config.profile().satisfies_main_hypotheses())
        self._conservation("sweep", report.max_mass_drift, report.max_energy_drift)
        self.summary.update(dt_robustness=report.dt_robustness._to_dict())
        self._record(CheckOutcome.from_report("dt_robustness", report.dt_robustness))
        if check.box_doubling:
            self._record(CheckOutcome.from_report("box_doubling", box_doubling_check(
                recipe, physics.beta, physics.N_list, config.time.T, config.time.dt, config.profile(), grid,
                check.tolerance, config.output.jobs)))

    def _run_resonance(self) -> None:
        physics, dim = self.config.physics, self.config.grid.dim
        profile = physics.profile_for(dim)
        options = dict(t=physics.t, profile=profile, modes_per_bump=physics.modes_per_bump,
                       transverse_modes=physics.transverse_modes, dim=dim)
        report = verify_lower_bound(physics.beta, physics.q, physics.N_list, jobs=self.config.output.jobs, **options)
        self._write_rows("resonance.csv", report.rows(), ["N", "beta", "q", "F_h1", "rescaled", "slope"])
        self.summary.update(slope=report.fit.slope, band_factor=report.band_factor, dominance=list(report.dominance))
        self._record(CheckOutcome("lower_bound", report.passed, True,
                                  {"slope": report.fit.slope, "target": -physics.q * physics.beta, "band_factor": report.band_factor}))
        if physics.variant is not AblationVariant.NONE:
            ablation = ablation_check(physics.beta, physics.q, physics.N_list[-1], physics.variant, **options)
            self._record(CheckOutcome.from_report(f"ablation.{physics.variant.value}", ablation))

    def _run_boardgame(self) -> None:
        physics = self.config.physics
        rows = boardgame_table(physics.k_max, physics.j_max)
        self._write_rows("boardgame.csv", [row._asdict() for row in rows],
                         ["k", "j", "admissible_count", "reduced_count", "catalan_bound", "power_bound"])
        bounded = all(row.reduced_count <= row.catalan_bound <= row.power_bound for row in rows)
        self._record(CheckOutcome("boardgame.bounds", bounded, True, {"rows": len(rows)}))
        exhaustive = [verify_counts(k, j)
                      for k in range(1, min(physics.k_max, __EXHAUSTIVE_RANGE__) + 1)
                      for j in range(1, min(physics.j_max, __EXHAUSTIVE_RANGE__) + 1)]
        failed = [(item.k, item.j) for item in exhaustive if not item.passed]
        self._record(CheckOutcome("boardgame.exhaustive", not failed, True, {"verified": len(exhaustive), "failed": failed}))

    def _run_hierarchy(self) -> None:
        config, physics = self.config, self.config.physics
        pair = run_pair(self._initial_data(), config.time.T, config.time.dt, config.profile(), physics.N, physics.beta, config.time.stride)
        series = hierarchy_difference_series(pair.cubic, pair.hartree, physics.Z)
        self._write_rows("hierarchy.csv", [row._asdict() for row in series.rows],
                         ["t", "Z", "k_max", "hierarchy_diff", "envelope_bound"])
        self.summary.update(sup_hierarchy_diff=series.sup, sup_diff=pair.sup_diff, C1=series.C1, Z=physics.Z)
        self._record(CheckOutcome("hierarchy.envelope", series.envelope_holds, True, {"sup": series.sup}))
        self._conservation("pair", pair.mass_drift_max, pair.energy_drift_max)

    def _run_convrate(self) -> None:
        config, physics = self.config, self.config.physics
        profile, f = config.profile(), self._initial_data()
        fit = measure_convolution_rate(profile, f, physics.s, physics.N_list, physics.beta)
        self._write_rows("convrate.csv",
                         [{"N": N, "ratio": ratio, "beta": physics.beta, "s": physics.s, "slope": fit.slope} for N, ratio in fit.samples],
                         ["N", "ratio", "beta", "s", "slope"])
        self.summary.update(slope=fit.slope, intercept=fit.intercept, profile=profile.name, even=profile.even)
        partner = make_initial_data(evolve(config.data.recipe_for(physics), seed=config.data.seed + 1), f.grid)
        for N in physics.N_list:
            self._record(CheckOutcome.from_report(f"multiplier_bound.N{N}", multiplier_bound_check(profile, N, physics.beta, f.grid)))
            self._record(CheckOutcome.from_report(f"bilinear_bound.N{N}", bilinear_pairing_bound_check(f, partner, profile, N, physics.beta)))

    def _handler(self) -> Callable[[], None]:
        return {
            Subcommand.SOLVE: self._run_solve,
            Subcommand.COMPARE: self._run_compare,
            Subcommand.SWEEP: self._run_sweep,
            Subcommand.RESONANCE: self._run_resonance,
            Subcommand.BOARDGAME: self._run_boardgame,
            Subcommand.HIERARCHY: self._run_hierarchy,
            Subcommand.CONVRATE: self._run_convrate,
        }[self.config.subcommand]

    def dispatch(self) -> int:
        """Runs the subcommand and writes the manifest on every path

        Returns:
            int: 0 on success, 1 on a failed scientific check, 2 on a configuration or runtime error
        """
        self.directory.mkdir(parents=True, exist_ok=True)
        set_fft_workers(self.config.output.fft_workers)
        started = time.perf_counter()
        error: Optional[BaseException] = None
        logger.info("Starting %s into %s", self.config.subcommand.value, self.directory)
        try:
            self._handler()()
            failed = [check.name for check in self.checks if check.gated and not check.passed]
            exit_code = EXIT_CHECK_FAILED if failed else EXIT_SUCCESS
        except (CheckFailure, DegenerateSamplesException) as exc:
            error, exit_code = exc, EXIT_CHECK_FAILED
            logger.error("%s", exc)
        except WorkbenchException as exc:
            error, exit_code = exc, EXIT_ERROR
            logger.error("%s: %s", type(exc).__name__, exc)
        except Exception as exc:
            error, exit_code = exc, EXIT_ERROR
            logger.exception("Unexpected failure")

        write_manifest(self.directory, build_manifest(
            config=self.config._to_dict(),
            fingerprint=self.config._hash_repr(),
            seed=self.config.data.seed,
            wall_time=time.perf_counter() - started,
            checks=[check._to_dict() for check in self.checks],
            outputs=dict(self.outputs),
            summary=dict(self.summary),
            exit_code=exit_code,
            error=error))
        logger.info("Finished %s with exit code %d", self.config.subcommand.value, exit_code)
        return exit_code


def _file_digest(path: Path) -> str:
    return Digest.from_file(path).hex


def build_manifest(config: Optional[dict], fingerprint: Optional[str], seed: Optional[int], wall_time: float,
                   checks: list, outputs: dict, summary: dict, exit_code: int, error: Optional[BaseException]) -> dict[str, Any]:
    """The JSON record written next to every run's outputs"""
    return {
        "config": config,
        "config_sha256": fingerprint,
        "seed": seed,
        "versions": package_versions(),
        "platform": platform.platform(),
        "wall_time_s": wall_time,
        "checks": checks,
        "outputs": outputs,
        "summary": summary,
        "exit_code": exit_code,
        "error": None if error is None else {"class": type(error).__name__, "message": str(error)},
    }


def write_manifest(directory: str | Path, manifest: dict[str, Any]) -> Path:
    return write_json(manifest, Path(directory) / __MANIFEST__)


def dispatch(config: RunConfig, directory: Optional[str | Path] = None) -> int:
    """Runs a configuration; see Controller.dispatch"""
    return Controller(config, directory if directory is not None else config.output.directory).dispatch()

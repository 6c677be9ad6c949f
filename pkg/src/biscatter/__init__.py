import logging
import os
import time
from pathlib import Path
from typing import Optional, Sequence

from attrs import define, field, validators

from .base.exceptions import ConfigException
from .config import RunConfig, parse_config, load_config
from .controller import Controller, build_manifest, write_manifest, EXIT_ERROR
from .acceptance import run_acceptance


logger = logging.getLogger(__name__)

__OUTPUT_ENV__ = "BISCATTER_OUTPUT_DIR"
__DEFAULT_OUTPUT__ = "biscatter-out"


def resolve_output_directory(flag: Optional[str] = None, configured: Optional[str] = None) -> Path:
    """--output beats BISCATTER_OUTPUT_DIR, which beats output.directory"""
    if flag:
        return Path(flag)
    environment = os.environ.get(__OUTPUT_ENV__)
    if environment:
        return Path(environment)
    return Path(configured or __DEFAULT_OUTPUT__)


@define(slots=True, weakref_slot=False)
class Workbench:
    """Entry point for batch runs and the acceptance suite

    Args:
        output (str, optional): An explicit output directory that wins over config and environment
        jobs (int, optional): Worker processes, overriding output.jobs
    """
    output: Optional[str] = field(default=None, validator=validators.optional(validators.instance_of(str)))
    jobs: Optional[int] = field(default=None, validator=validators.optional(validators.instance_of(int)))

    def _configure(self, config: RunConfig) -> RunConfig:
        config = config.with_output_directory(resolve_output_directory(self.output, config.output.directory))
        if self.jobs is not None:
            config = config.with_jobs(self.jobs)
        return config

    def _config_failure(self, exc: ConfigException, source: str) -> int:
        directory = resolve_output_directory(self.output)
        logger.error("Invalid configuration %s", source)
        for path, message in exc.errors:
            logger.error("  %s: %s", path, message)
        write_manifest(directory, build_manifest(
            config=None, fingerprint=None, seed=None, wall_time=0.0,
            checks=[], outputs={}, summary={"errors": [list(error) for error in exc.errors]},
            exit_code=EXIT_ERROR, error=exc))
        return EXIT_ERROR

    def run_text(self, text: str) -> int:
        """Parses a YAML document and runs it"""
        try:
            config = parse_config(text)
        except ConfigException as exc:
            return self._config_failure(exc, "<text>")
        return self.run(config)

    def run_file(self, path: str | Path) -> int:
        """Loads a YAML file and runs it"""
        try:
            config = load_config(path)
        except ConfigException as exc:
            return self._config_failure(exc, str(path))
        return self.run(config)

    def run(self, config: RunConfig) -> int:
        """Runs a validated configuration

        Returns:
            int: The exit code, see Controller.dispatch
        """
        config = self._configure(config)
        return Controller(config, config.output.directory).dispatch()

    def check(self, criteria: Optional[Sequence[str]] = None) -> int:
        """Runs the acceptance suite into the resolved output directory"""
        directory = resolve_output_directory(self.output)
        started = time.perf_counter()
        code = run_acceptance(directory, jobs=self.jobs or 1, criteria=criteria)
        logger.info("Acceptance suite took %.1f s", time.perf_counter() - started)
        return code


__all__ = [
    "Workbench",
    "RunConfig",
    "parse_config",
    "load_config",
    "resolve_output_directory",
]

"""
RUN CONFIGURATION

A run is described by one YAML document with a top-level `subcommand` and flat sections.

    subcommand: sweep
    grid:    {dim: 1, modes: [256], extents: [50.26548245743669], dealias: true}
    physics: {beta: 0.2, N_list: [32, 64, 128, 256, 512, 1024], profile: gaussian, q: 1.0, b0: 1.0}
    time:    {T: 1.0, dt: 0.001, stride: 1}
    data:    {recipe: hq-limited, seed: 0, amplitude: 1.0, cutoff: 8.0}
    output:  {directory: biscatter-out, jobs: 1}
    check:   {box_doubling: false, tolerance: 0.02}

NOTES:
    A. Every section is an attrs record; omitted keys take the documented defaults.
    B. Validation never stops at the first problem: every unknown key, type mismatch and
       physics inconsistency is collected as a (path, message) pair and raised together
       in one ConfigException.
    C. A scalar `modes` or `extents` is broadcast over `dim` axes.
    D. The density is dealiased by the 2/3 rule unless `dealias: false`.
    E. Every sweep reruns its largest N at dt/2; `check.tolerance` bounds the change of supDiff.
"""
import math
from pathlib import Path
from typing import Any, Optional

from attrs import define, field, validators, fields, evolve
from ruamel.yaml import YAML
from ruamel.yaml.error import YAMLError

from .base.interface import BaseInterface
from .base.types import (
    Subcommand,
    EquationKind,
    RecipeKind,
    ProfileKind,
    FitModel,
    AblationVariant,
    enum_from_alias,
)
from .base.exceptions import ConfigException
from .grid.spec import GridSpec
from .physics.potential import PotentialProfile
from .studies.harness import DataRecipe
from .utils.validators import (
    is_dyadic_sequence,
    validate_positive,
    validate_nonnegative,
    validate_open_unit_interval,
    validate_positive_tuple,
    validate_even_tuple,
)


__SECTIONS__ = ("grid", "physics", "time", "data", "output", "check")
__FORMATS__ = ("csv", "json", "bin")
__DEFAULT_EXTENT__ = 16.0 * math.pi


def _to_float(value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeError(f"expected a number, got {value!r}")
    return float(value)


def _to_optional_float(value: Any) -> Optional[float]:
    return None if value is None else _to_float(value)


def _to_int(value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not float(value).is_integer():
        raise TypeError(f"expected an integer, got {value!r}")
    return int(value)


def _to_optional_int(value: Any) -> Optional[int]:
    return None if value is None else _to_int(value)


def _to_bool(value: Any) -> bool:
    if not isinstance(value, bool):
        raise TypeError(f"expected true or false, got {value!r}")
    return value


def _to_str(value: Any) -> str:
    if not isinstance(value, str):
        raise TypeError(f"expected a string, got {value!r}")
    return value


def _sequence(value: Any) -> tuple:
    return tuple(value) if isinstance(value, (list, tuple)) else (value,)


def _to_float_tuple(value: Any) -> tuple[float, ...]:
    return tuple(_to_float(item) for item in _sequence(value))


def _to_int_tuple(value: Any) -> tuple[int, ...]:
    return tuple(_to_int(item) for item in _sequence(value))


def _to_optional_int_tuple(value: Any) -> Optional[tuple[int, ...]]:
    return None if value is None else _to_int_tuple(value)


def _alias(enum_type):
    def convert(value: Any):
        return enum_from_alias(enum_type, _to_str(value) if not isinstance(value, enum_type) else value)
    return convert


def _validate_range(low: int, high: int):
    def validate(instance, attribute, value) -> None:
        if not low <= value <= high:
            raise ValueError(f"must lie in {low}..{high}, got {value}")
    return validate


def _validate_even(instance, attribute, value) -> None:
    if value <= 0 or value % 2 != 0:
        raise ValueError(f"must be a positive even integer, got {value}")


def _validate_formats(instance, attribute, value) -> None:
    unknown = [item for item in value if item not in __FORMATS__]
    if unknown:
        raise ValueError(f"unknown formats {unknown}, expected a subset of {list(__FORMATS__)}")


@define(frozen=True, slots=True, weakref_slot=False)
class GridConfig(BaseInterface):
    """The periodic box

    Args:
        dim (int): 1, 2 or 3
        modes (tuple[int, ...]): Even mode counts per axis
        extents (tuple[float, ...]): Side lengths per axis
        dealias (bool): Apply the 2/3 rule to the density, on unless switched off
    """
    dim: int = field(default=1, converter=_to_int, validator=_validate_range(1, 3))
    modes: tuple[int, ...] = field(default=(256,), converter=_to_int_tuple, validator=validate_even_tuple)
    extents: tuple[float, ...] = field(default=(__DEFAULT_EXTENT__,), converter=_to_float_tuple, validator=validate_positive_tuple)
    dealias: bool = field(default=True, converter=_to_bool)

    def broadcast(self) -> 'GridConfig':
        modes = self.modes * self.dim if len(self.modes) == 1 else self.modes
        extents = self.extents * self.dim if len(self.extents) == 1 else self.extents
        return evolve(self, modes=modes, extents=extents)

    def spec(self) -> GridSpec:
        grid = self.broadcast()
        return GridSpec(grid.extents, grid.modes, grid.dealias)


@define(frozen=True, slots=True, weakref_slot=False)
class PhysicsConfig(BaseInterface):
    """Equation, potential and study parameters

    Args:
        beta (float): The contraction exponent in (0, 1)
        N (int | None): The particle number of single-N runs
        N_list (tuple[int, ...]): Dyadic N for sweeps
        equation (EquationKind): The flow of a solve run
        profile (ProfileKind): The interaction profile
        sigma (float): Gaussian width
        shift (float): Shift of the shifted Gaussian
        radius (float): Bump radius
        q (float): The regularity index, at least 1
        b0 (float): The coupling int V
        s (float): The derivative order of convolution rates
        model (FitModel): The rate fit model
        variant (AblationVariant): The resonant datum variant
        t (float): The forcing time of resonance runs
        modes_per_bump (int): Resonant grid modes per bump
        transverse_modes (int): Resonant grid transverse modes
        Z (float | None): The hierarchy level weight
        k_max (int): Board-game table range in k
        j_max (int): Board-game table range in j
    """
    beta: float = field(default=0.25, converter=_to_float, validator=validate_open_unit_interval)
    N: Optional[int] = field(default=None, converter=_to_optional_int, validator=validators.optional(validators.ge(1)))
    N_list: tuple[int, ...] = field(default=(), converter=_to_int_tuple)
    equation: EquationKind = field(default=EquationKind.CUBIC, converter=_alias(EquationKind))
    profile: ProfileKind = field(default=ProfileKind.GAUSSIAN, converter=_alias(ProfileKind))
    sigma: float = field(default=1.0, converter=_to_float, validator=validate_positive)
    shift: float = field(default=1.0, converter=_to_float)
    radius: float = field(default=1.0, converter=_to_float, validator=validate_positive)
    q: float = field(default=1.0, converter=_to_float, validator=validators.ge(1.0))
    b0: float = field(default=1.0, converter=_to_float, validator=validate_positive)
    s: float = field(default=0.0, converter=_to_float, validator=[validators.ge(0.0), validators.le(1.0)])
    model: FitModel = field(default=FitModel.PURE_POWER, converter=_alias(FitModel))
    variant: AblationVariant = field(default=AblationVariant.NONE, converter=_alias(AblationVariant))
    t: float = field(default=1.0, converter=_to_float, validator=validate_nonnegative)
    modes_per_bump: int = field(default=4, converter=_to_int, validator=validators.ge(1))
    transverse_modes: int = field(default=32, converter=_to_int, validator=_validate_even)
    Z: Optional[float] = field(default=None, converter=_to_optional_float, validator=validators.optional(validate_positive))
    k_max: int = field(default=6, converter=_to_int, validator=_validate_range(1, 8))
    j_max: int = field(default=6, converter=_to_int, validator=_validate_range(1, 8))

    def profile_for(self, dim: int) -> PotentialProfile:
        return PotentialProfile(self.profile, b0=self.b0, dim=dim, sigma=self.sigma, shift=self.shift, radius=self.radius)


@define(frozen=True, slots=True, weakref_slot=False)
class TimeConfig(BaseInterface):
    """T, dt and the snapshot stride"""
    T: float = field(default=1.0, converter=_to_float, validator=validate_positive)
    dt: float = field(default=1e-3, converter=_to_float, validator=validate_positive)
    stride: int = field(default=1, converter=_to_int, validator=validators.ge(1))


@define(frozen=True, slots=True, weakref_slot=False)
class DataConfig(BaseInterface):
    """The initial data recipe; see DataRecipe"""
    recipe: RecipeKind = field(default=RecipeKind.SMOOTH_RANDOM, converter=_alias(RecipeKind))
    seed: int = field(default=0, converter=_to_int)
    amplitude: float = field(default=1.0, converter=_to_float, validator=validate_nonnegative)
    cutoff: float = field(default=8.0, converter=_to_float, validator=validate_positive)
    width: float = field(default=1.0, converter=_to_float, validator=validate_positive)
    mode: Optional[tuple[int, ...]] = field(default=None, converter=_to_optional_int_tuple)

    def recipe_for(self, physics: PhysicsConfig, N: Optional[int] = None) -> DataRecipe:
        return DataRecipe(
            self.recipe, q=physics.q, amplitude=self.amplitude, seed=self.seed, cutoff=self.cutoff,
            width=self.width, mode=self.mode, N=N, beta=physics.beta if N is not None else None)


@define(frozen=True, slots=True, weakref_slot=False)
class OutputConfig(BaseInterface):
    """Where and how results are written

    Args:
        directory (str): The output directory
        formats (tuple[str, ...]): Any of csv, json, bin
        jobs (int): Worker processes for per-N elements
        fft_workers (int): Threads per transform
    """
    directory: str = field(default="biscatter-out", converter=_to_str)
    formats: tuple[str, ...] = field(default=("csv", "json"), converter=lambda value: tuple(_to_str(item) for item in _sequence(value)), validator=_validate_formats)
    jobs: int = field(default=1, converter=_to_int, validator=validators.ge(1))
    fft_workers: int = field(default=1, converter=_to_int, validator=validators.ge(1))


@define(frozen=True, slots=True, weakref_slot=False)
class CheckConfig(BaseInterface):
    """Robustness checks attached to sweeps; the dt/2 rerun always runs, box doubling on request"""
    box_doubling: bool = field(default=False, converter=_to_bool)
    tolerance: float = field(default=0.02, converter=_to_float, validator=validate_positive)


@define(frozen=True, slots=True, weakref_slot=False)
class RunConfig(BaseInterface):
    """A fully validated run description"""
    subcommand: Subcommand = field(converter=_alias(Subcommand))
    grid: GridConfig = field(factory=GridConfig)
    physics: PhysicsConfig = field(factory=PhysicsConfig)
    time: TimeConfig = field(factory=TimeConfig)
    data: DataConfig = field(factory=DataConfig)
    output: OutputConfig = field(factory=OutputConfig)
    check: CheckConfig = field(factory=CheckConfig)

    def with_output_directory(self, directory: str | Path) -> 'RunConfig':
        return evolve(self, output=evolve(self.output, directory=str(directory)))

    def with_jobs(self, jobs: int) -> 'RunConfig':
        return evolve(self, output=evolve(self.output, jobs=int(jobs)))

    def grid_spec(self) -> GridSpec:
        return self.grid.spec()

    def profile(self) -> PotentialProfile:
        return self.physics.profile_for(self.grid.dim)


__SECTION_TYPES__ = {
    "grid": GridConfig,
    "physics": PhysicsConfig,
    "time": TimeConfig,
    "data": DataConfig,
    "output": OutputConfig,
    "check": CheckConfig,
}


def _build_section(cls: type, path: str, document: Any, errors: list[tuple[str, str]]):
    """Converts and validates one section field by field so that every problem is reported"""
    if document is None:
        document = {}
    if not isinstance(document, dict):
        errors.append((path, f"must be a mapping, got {type(document).__name__}"))
        return cls()
    known = {attribute.name: attribute for attribute in fields(cls)}
    for key in document:
        if key not in known:
            errors.append((f"{path}.{key}", "unknown key"))
    values = {}
    for name, attribute in known.items():
        if name not in document:
            continue
        try:
            value = attribute.converter(document[name]) if attribute.converter is not None else document[name]
            if attribute.validator is not None:
                attribute.validator(None, attribute, value)
            values[name] = value
        except (TypeError, ValueError) as exc:
            errors.append((f"{path}.{name}", str(exc)))
    return cls(**values)


def _check_grid(grid: GridConfig, errors: list[tuple[str, str]]) -> None:
    for name in ("modes", "extents"):
        count = len(getattr(grid, name))
        if count not in (1, grid.dim):
            errors.append((f"grid.{name}", f"needs 1 or {grid.dim} entries for dim={grid.dim}, got {count}"))


def _check_consistency(config: RunConfig, errors: list[tuple[str, str]]) -> None:
    """Cross-field physics checks, subcommand by subcommand"""
    command, physics, time, data = config.subcommand, config.physics, config.time, config.data
    _check_grid(config.grid, errors)
    grid_ok = not any(path.startswith("grid") for path, _ in errors)

    if command in (Subcommand.SWEEP, Subcommand.CONVRATE, Subcommand.RESONANCE):
        if not is_dyadic_sequence(physics.N_list):
            errors.append(("physics.N_list", f"{command.value} requires dyadic N_list"))
        elif len(physics.N_list) < 4:
            errors.append(("physics.N_list", f"{command.value} needs at least 4 values, got {len(physics.N_list)}"))

    if command in (Subcommand.COMPARE, Subcommand.HIERARCHY) and physics.N is None:
        errors.append(("physics.N", f"{command.value} requires N"))
    if command is Subcommand.SOLVE and physics.equation is EquationKind.HARTREE and physics.N is None:
        errors.append(("physics.N", "a Hartree solve requires N"))
    if command is Subcommand.HIERARCHY and physics.Z is None:
        errors.append(("physics.Z", "hierarchy requires Z"))

    if command in (Subcommand.SOLVE, Subcommand.COMPARE, Subcommand.SWEEP, Subcommand.HIERARCHY) and time.dt > time.T:
        errors.append(("time.dt", f"dt={time.dt} exceeds T={time.T}"))

    uses_grid_data = command in (Subcommand.SOLVE, Subcommand.COMPARE, Subcommand.SWEEP, Subcommand.HIERARCHY, Subcommand.CONVRATE)
    if uses_grid_data and data.recipe in (RecipeKind.SMOOTH_RANDOM, RecipeKind.HQ_LIMITED) and grid_ok:
        nyquist = config.grid_spec().min_nyquist
        if data.cutoff > nyquist:
            errors.append(("data.cutoff", f"cutoff {data.cutoff} exceeds the grid Nyquist wavenumber {nyquist:.6g}"))
    if uses_grid_data and data.recipe is RecipeKind.RESONANT:
        errors.append(("data.recipe", "the resonant datum is only available to the resonance subcommand"))
    if data.mode is not None and len(data.mode) != config.grid.dim:
        errors.append(("data.mode", f"needs {config.grid.dim} entries, got {len(data.mode)}"))


def parse_config(text: str) -> RunConfig:
    """Parses and validates a run document

    Args:
        text (str): The YAML document

    Returns:
        RunConfig: The validated configuration with defaults filled in

    Raises:
        ConfigException: Carrying every (path, message) problem found
    """
    try:
        document = YAML(typ="safe", pure=True).load(text)
    except YAMLError as exc:
        raise ConfigException([("<document>", f"not valid YAML: {exc}")]) from exc
    if not isinstance(document, dict):
        raise ConfigException([("<document>", "must be a mapping of sections")])

    errors: list[tuple[str, str]] = []
    for key in document:
        if key != "subcommand" and key not in __SECTIONS__:
            errors.append((str(key), "unknown key"))

    subcommand = None
    if "subcommand" not in document:
        errors.append(("subcommand", f"missing, expected one of {[member.value for member in Subcommand]}"))
    else:
        try:
            subcommand = _alias(Subcommand)(document["subcommand"])
        except (TypeError, ValueError) as exc:
            errors.append(("subcommand", str(exc)))

    sections = {name: _build_section(cls, name, document.get(name), errors) for name, cls in __SECTION_TYPES__.items()}
    if subcommand is None:
        raise ConfigException(errors)

    config = RunConfig(subcommand, **sections)
    _check_consistency(config, errors)
    if errors:
        raise ConfigException(errors)
    return config


def load_config(path: str | Path) -> RunConfig:
    """Reads and parses a run document from disk

    Raises:
        ConfigException: If the file cannot be read or fails validation
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigException([(str(path), f"cannot be read: {exc.strerror}")]) from exc
    return parse_config(text)

"""Scenario files: flat `key = value` configs with dotted keys.

Files are read with python-dotenv, so `#` comments, quoting and `export`
prefixes behave as in a .env file. Example:

    schema_version = 1
    input.kind = squeezed_vacuum
    input.kappa_abs = 0.77
    input.kappa_phase = 3.141592653589793
    splitter.transmissivity = 0.9
    operation.kind = subtract
    operation.count = 4
    detector.kind = chopping
    detector.channels = 20
    detector.efficiency = 0.95
    detector.clicks = 4

The squeeze parameter is given either as a complex literal (`input.kappa`) or
as `input.kappa_abs` plus `input.kappa_phase` (radians). `input.kappa_reference =
effective` marks the given value as the transmitted kappa' = T^2 kappa.
"""

import cmath
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, TypeVar

from dotenv import dotenv_values

from config.constants import (
    DEFAULT_SLICE_POINTS,
    ERROR_BAD_VALUE,
    ERROR_CONFIG_NOT_FOUND,
    ERROR_MISSING_KEY,
    ERROR_SCHEMA_VERSION,
    ERROR_UNKNOWN_KEY,
    SCHEMA_VERSION,
)
from src.catgen.optics.beam_splitter import BeamSplitterParams
from src.catgen.phasespace.grid import GridSpec
from src.catgen.states.fock_space import SqueezeParam
from src.catgen.utils.errors import ConfigError, DomainError

INPUT_KINDS = ("squeezed_vacuum", "fock", "coherent", "thermal", "amplitudes")
KAPPA_REFERENCES = ("input", "effective")
OPERATION_KINDS = ("add", "subtract", "condition")
DETECTOR_KINDS = ("ideal", "chopping")
SOURCE_KINDS = ("pure", "binomial")
WEIGHTINGS = ("source", "bayes")

KNOWN_KEYS = (
    "schema_version",
    "input.kind",
    "input.kappa",
    "input.kappa_abs",
    "input.kappa_phase",
    "input.kappa_reference",
    "input.n",
    "input.alpha",
    "input.mean_photons",
    "input.amplitudes",
    "input.n_max",
    "splitter.transmissivity",
    "splitter.phi_t",
    "splitter.phi_r",
    "operation.kind",
    "operation.count",
    "operation.reference",
    "detector.kind",
    "detector.channels",
    "detector.efficiency",
    "detector.clicks",
    "source.kind",
    "source.trials",
    "source.success",
    "source.weighting",
    "grid.x_min",
    "grid.x_max",
    "grid.p_min",
    "grid.p_max",
    "grid.n_x",
    "grid.n_p",
    "output.phases",
    "output.slice_points",
    "output.max_count",
)

T = TypeVar("T")


@dataclass(frozen=True)
class InputSpec:
    kind: str
    kappa: complex = 0j
    kappa_reference: str = "input"
    n: int = 0
    alpha: complex = 0j
    mean_photons: float = 0.0
    amplitudes: Tuple[complex, ...] = ()
    n_max: Optional[int] = None


@dataclass(frozen=True)
class SplitterSpec:
    transmissivity: float
    phi_t: float = 0.0
    phi_r: float = 0.0

    def params(self) -> BeamSplitterParams:
        return BeamSplitterParams.from_transmissivity(
            self.transmissivity, self.phi_t, self.phi_r
        )


@dataclass(frozen=True)
class OperationSpec:
    """add: n0 = count; subtract: m2 = count; condition: n0 = reference, m2 = count."""

    kind: str
    count: int
    reference: int = 0

    @property
    def outcome(self) -> Tuple[int, int]:
        if self.kind == "add":
            return self.count, 0
        if self.kind == "subtract":
            return 0, self.count
        return self.reference, self.count


@dataclass(frozen=True)
class DetectorSpec:
    kind: str = "ideal"
    channels: int = 1
    efficiency: float = 1.0
    clicks: int = 0


@dataclass(frozen=True)
class SourceSpec:
    kind: str = "pure"
    trials: int = 0
    success: float = 0.5
    weighting: str = "source"


@dataclass(frozen=True)
class OutputSpec:
    phases: Tuple[float, ...] = (0.0, 0.5 * math.pi)
    slice_points: int = DEFAULT_SLICE_POINTS
    max_count: int = 6


@dataclass(frozen=True)
class Scenario:
    input: InputSpec
    splitter: SplitterSpec
    operation: OperationSpec
    detector: DetectorSpec = field(default_factory=DetectorSpec)
    source: SourceSpec = field(default_factory=SourceSpec)
    grid: GridSpec = field(default_factory=GridSpec)
    output: OutputSpec = field(default_factory=OutputSpec)
    schema_version: int = SCHEMA_VERSION

    def input_kappa(self) -> SqueezeParam:
        """Squeeze parameter of the signal before the beam splitter."""
        kappa = self.input.kappa
        if self.input.kappa_reference == "effective":
            transmittance = self.splitter.params().transmittance
            if abs(transmittance) == 0.0:
                raise DomainError("Effective kappa is undefined for |T| = 0")
            kappa = kappa / transmittance**2
        return SqueezeParam(kappa)

    def effective_kappa(self) -> complex:
        """kappa' = T^2 kappa seen by the closed forms."""
        return self.input_kappa().attenuated(self.splitter.params().transmittance).kappa


def _convert(
    raw: Dict[str, str], key: str, parse: Callable[[str], T], default=None
) -> T:
    value = raw.get(key)
    if value is None or value == "":
        if default is None:
            raise ConfigError(f"{ERROR_MISSING_KEY}: {key}")
        return default
    try:
        return parse(value)
    except ValueError as e:
        raise ConfigError(f"{ERROR_BAD_VALUE}: {key} = {value!r} ({e})") from e


def _choice(
    raw: Dict[str, str], key: str, choices: Tuple[str, ...], default=None
) -> str:
    value = _convert(raw, key, str.strip, default)
    if value not in choices:
        raise ConfigError(
            f"{ERROR_BAD_VALUE}: {key} = {value!r} (expected one of {choices})"
        )
    return value


def _complex_list(text: str) -> Tuple[complex, ...]:
    items = [item.replace(" ", "") for item in text.split(",")]
    return tuple(complex(item) for item in items if item)


def _float_list(text: str) -> Tuple[float, ...]:
    return tuple(float(item) for item in text.split(",") if item.strip())


def _optional_int(text: str) -> Optional[int]:
    return None if text.strip().lower() == "auto" else int(text)


def _parse_kappa(raw: Dict[str, str]) -> complex:
    if raw.get("input.kappa"):
        if "input.kappa_abs" in raw or "input.kappa_phase" in raw:
            raise ConfigError(
                f"{ERROR_BAD_VALUE}: "
                "give input.kappa or input.kappa_abs/phase, not both"
            )
        return _convert(raw, "input.kappa", lambda v: complex(v.replace(" ", "")))
    magnitude = _convert(raw, "input.kappa_abs", float)
    phase = _convert(raw, "input.kappa_phase", float, 0.0)
    return cmath.rect(magnitude, phase)


def _parse_input(raw: Dict[str, str]) -> InputSpec:
    kind = _choice(raw, "input.kind", INPUT_KINDS)
    n_max = _convert(raw, "input.n_max", _optional_int, "auto")
    n_max = None if n_max == "auto" else n_max
    if kind == "squeezed_vacuum":
        return InputSpec(
            kind,
            kappa=_parse_kappa(raw),
            kappa_reference=_choice(
                raw, "input.kappa_reference", KAPPA_REFERENCES, "input"
            ),
            n_max=n_max,
        )
    if kind == "fock":
        return InputSpec(kind, n=_convert(raw, "input.n", int), n_max=n_max)
    if kind == "coherent":
        alpha = _convert(raw, "input.alpha", lambda v: complex(v.replace(" ", "")))
        return InputSpec(kind, alpha=alpha, n_max=n_max)
    if kind == "thermal":
        mean_photons = _convert(raw, "input.mean_photons", float)
        return InputSpec(kind, mean_photons=mean_photons, n_max=n_max)
    return InputSpec(kind, amplitudes=_convert(raw, "input.amplitudes", _complex_list))


def _read(path: Path) -> Dict[str, str]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"{ERROR_CONFIG_NOT_FOUND}: {path}")
    raw = {k: (v or "").strip() for k, v in dotenv_values(path).items()}
    unknown = sorted(set(raw) - set(KNOWN_KEYS))
    if unknown:
        raise ConfigError(f"{ERROR_UNKNOWN_KEY}: {', '.join(unknown)}")
    return raw


def parse_scenario(path: Path) -> Scenario:
    """Read and validate a scenario file."""
    raw = _read(path)
    version = _convert(raw, "schema_version", int, -1)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"{ERROR_SCHEMA_VERSION}: {raw.get('schema_version')!r}")

    splitter = SplitterSpec(
        _convert(raw, "splitter.transmissivity", float),
        _convert(raw, "splitter.phi_t", float, 0.0),
        _convert(raw, "splitter.phi_r", float, 0.0),
    )
    if not 0.0 <= splitter.transmissivity <= 1.0:
        raise ConfigError(
            f"{ERROR_BAD_VALUE}: splitter.transmissivity must lie in [0, 1]"
        )

    operation = OperationSpec(
        _choice(raw, "operation.kind", OPERATION_KINDS),
        _convert(raw, "operation.count", int),
        _convert(raw, "operation.reference", int, 0),
    )
    if operation.count < 0 or operation.reference < 0:
        raise ConfigError(f"{ERROR_BAD_VALUE}: photon counts must be non-negative")

    detector = DetectorSpec(
        _choice(raw, "detector.kind", DETECTOR_KINDS, "ideal"),
        _convert(raw, "detector.channels", int, 1),
        _convert(raw, "detector.efficiency", float, 1.0),
        _convert(raw, "detector.clicks", int, operation.count),
    )
    source = SourceSpec(
        _choice(raw, "source.kind", SOURCE_KINDS, "pure"),
        _convert(raw, "source.trials", int, operation.count),
        _convert(raw, "source.success", float, 0.5),
        _choice(raw, "source.weighting", WEIGHTINGS, "source"),
    )
    defaults = GridSpec()
    try:
        grid = GridSpec(
            _convert(raw, "grid.x_min", float, defaults.x_min),
            _convert(raw, "grid.x_max", float, defaults.x_max),
            _convert(raw, "grid.p_min", float, defaults.p_min),
            _convert(raw, "grid.p_max", float, defaults.p_max),
            _convert(raw, "grid.n_x", int, defaults.n_x),
            _convert(raw, "grid.n_p", int, defaults.n_p),
        )
    except DomainError as e:
        raise ConfigError(f"{ERROR_BAD_VALUE}: grid ({e})") from e
    output = OutputSpec(
        _convert(raw, "output.phases", _float_list, OutputSpec().phases),
        _convert(raw, "output.slice_points", int, DEFAULT_SLICE_POINTS),
        _convert(raw, "output.max_count", int, OutputSpec().max_count),
    )

    scenario = Scenario(
        _parse_input(raw), splitter, operation, detector, source, grid, output, version
    )
    _check_consistency(scenario)
    return scenario


def _check_consistency(scenario: Scenario):
    if scenario.detector.kind == "chopping" and scenario.operation.kind != "subtract":
        raise ConfigError(
            f"{ERROR_BAD_VALUE}: a chopping detector heralds subtraction only"
        )
    if scenario.source.kind == "binomial" and scenario.operation.kind != "add":
        raise ConfigError(
            f"{ERROR_BAD_VALUE}: a binomial source feeds photon addition only"
        )
    needs_squeezing = (
        scenario.detector.kind == "chopping" or scenario.source.kind == "binomial"
    )
    if needs_squeezing and scenario.input.kind != "squeezed_vacuum":
        raise ConfigError(f"{ERROR_BAD_VALUE}: mixtures need a squeezed vacuum input")


def _format(value) -> str:
    if isinstance(value, complex):
        return repr(value).strip("()")
    if isinstance(value, tuple):
        return ",".join(_format(v) for v in value)
    if value is None:
        return "auto"
    return repr(value) if isinstance(value, float) else str(value)


def serialize_scenario(scenario: Scenario) -> str:
    """Canonical text form; parse_scenario of it gives back an equal Scenario."""
    spec = scenario.input
    items: List[Tuple[str, object]] = [
        ("schema_version", scenario.schema_version),
        ("input.kind", spec.kind),
    ]
    if spec.kind == "squeezed_vacuum":
        items += [
            ("input.kappa", spec.kappa),
            ("input.kappa_reference", spec.kappa_reference),
        ]
    elif spec.kind == "fock":
        items.append(("input.n", spec.n))
    elif spec.kind == "coherent":
        items.append(("input.alpha", spec.alpha))
    elif spec.kind == "thermal":
        items.append(("input.mean_photons", spec.mean_photons))
    else:
        items.append(("input.amplitudes", spec.amplitudes))
    if spec.kind != "amplitudes":
        items.append(("input.n_max", spec.n_max))
    items += [
        ("splitter.transmissivity", scenario.splitter.transmissivity),
        ("splitter.phi_t", scenario.splitter.phi_t),
        ("splitter.phi_r", scenario.splitter.phi_r),
        ("operation.kind", scenario.operation.kind),
        ("operation.count", scenario.operation.count),
        ("operation.reference", scenario.operation.reference),
        ("detector.kind", scenario.detector.kind),
        ("detector.channels", scenario.detector.channels),
        ("detector.efficiency", scenario.detector.efficiency),
        ("detector.clicks", scenario.detector.clicks),
        ("source.kind", scenario.source.kind),
        ("source.trials", scenario.source.trials),
        ("source.success", scenario.source.success),
        ("source.weighting", scenario.source.weighting),
        ("grid.x_min", scenario.grid.x_min),
        ("grid.x_max", scenario.grid.x_max),
        ("grid.p_min", scenario.grid.p_min),
        ("grid.p_max", scenario.grid.p_max),
        ("grid.n_x", scenario.grid.n_x),
        ("grid.n_p", scenario.grid.n_p),
        ("output.phases", scenario.output.phases),
        ("output.slice_points", scenario.output.slice_points),
        ("output.max_count", scenario.output.max_count),
    ]
    return "".join(f"{key} = {_format(value)}\n" for key, value in items)


def scenario_summary(scenario: Scenario) -> Dict[str, str]:
    """Key/value echo of the scenario for summary.json."""
    summary = {}
    for line in serialize_scenario(scenario).splitlines():
        key, _, value = line.partition(" = ")
        summary[key] = value
    return summary

"""
Scenario configuration: section dataclasses and INI persistence.

Physical quantities in files carry their unit in the key suffix (_um, _nm,
_mm, _cm); the UM, NM, MM and CM factors convert them to meters. Lists are comma separated.
"""

import configparser
import dataclasses
import hashlib
import io
import json
import logging
import math
import typing
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from .errors import ConfigurationError
from .types import Experiment, MaterialKind, Medium, ShapingScenario

logger = logging.getLogger(__name__)

UM, NM, MM, CM = 1e-6, 1e-9, 1e-3, 1e-2


@dataclass
class ScenarioSection:
    name: str = "custom"
    medium: Medium = Medium.FIBER_STEP
    experiment: Experiment = Experiment.CORRELATION_SCAN


@dataclass
class GridSection:
    size: int = 256
    pitch_um: float = 0.25


@dataclass
class FiberSection:
    core_radius_um: float = 25.0
    numerical_aperture: float = 0.2
    length_cm: float = 10.0
    cladding_index: float = 1.45


@dataclass
class SpdcSection:
    pump_wavelength_nm: float = 405.0
    crystal_length_mm: float = 0.0
    pump_waist_um: float = math.inf
    magnification: float = 1.0
    pump_bandwidth_nm: float = 0.0      # pump linewidth, converted to epsilon_p at the pump wavelength
    crystal_index: float = 1.69
    crystal_lengths_mm: Tuple[float, ...] = ()


@dataclass
class ScanSection:
    center_wavelength_nm: float = 810.0
    detunings_nm: Tuple[float, ...] = (0.0, 0.1, 0.2, 0.5, 1.0, 2.0, 3.0, 5.0)
    realizations: int = 23
    sum_band_nm: float = 5.0
    method: str = "direct"              # coincidence evaluation: direct or awp


@dataclass
class DiffuserSection:
    macro_pixel_samples: int = 8
    thickness_max_waves: float = 40.0
    material: MaterialKind = MaterialKind.CONSTANT
    index: float = 1.5
    cauchy_a: float = 0.0
    cauchy_b_um2: float = 0.0
    cauchy_c_um4: float = 0.0
    focal_length_mm: float = 100.0
    illumination_waist_samples: float = 32.0


@dataclass
class GratingSection:
    period_um: float = 20.0
    index: float = 1.5
    beam_waist_periods: float = 16.0
    focal_length_mm: float = 100.0
    band_nm: float = 40.0
    band_step_nm: float = 5.0


@dataclass
class ShapingSection:
    slm_pixels: int = 16
    slm_samples: int = 13
    focal_length_mm: float = 100.0
    scenarios: Tuple[ShapingScenario, ...] = tuple(ShapingScenario)
    detunings_nm: Tuple[float, ...] = (0.0, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 20.0, 30.0, 40.0)


@dataclass
class StudySection:
    dz_um: Tuple[float, ...] = (0.0,)
    mixing_pixel_samples: Tuple[int, ...] = (16, 8, 4)
    mixing_seeds: int = 10
    residuals: bool = False             # also tabulate per-mode phase residuals in fiber scans


@dataclass
class RunSection:
    seed: int = 0
    threads: int = 1
    output_dir: str = "out"
    mode_cache: str = ""


@dataclass
class ScenarioConfig:
    scenario: ScenarioSection = field(default_factory=ScenarioSection)
    grid: GridSection = field(default_factory=GridSection)
    fiber: FiberSection = field(default_factory=FiberSection)
    spdc: SpdcSection = field(default_factory=SpdcSection)
    scan: ScanSection = field(default_factory=ScanSection)
    diffuser: DiffuserSection = field(default_factory=DiffuserSection)
    grating: GratingSection = field(default_factory=GratingSection)
    shaping: ShapingSection = field(default_factory=ShapingSection)
    study: StudySection = field(default_factory=StudySection)
    run: RunSection = field(default_factory=RunSection)

    @property
    def medium(self) -> Medium:
        return self.scenario.medium

    @property
    def experiment(self) -> Experiment:
        return self.scenario.experiment

    def to_dict(self) -> Dict[str, Dict[str, Any]]:
        out = {}
        for section in dataclasses.fields(self):
            values = getattr(self, section.name)
            out[section.name] = {f.name: _to_plain(getattr(values, f.name)) for f in dataclasses.fields(values)}
        return out


def _to_plain(value):
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, tuple):
        return [_to_plain(v) for v in value]
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return value


def _format(value) -> str:
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, tuple):
        return ", ".join(_format(v) for v in value)
    if isinstance(value, float):
        return "inf" if math.isinf(value) else repr(value)
    return str(value)


def _parse(text: str, kind, path: str):
    text = text.strip()
    origin = typing.get_origin(kind)
    try:
        if origin is tuple:
            item = typing.get_args(kind)[0]
            return tuple(_parse(part, item, path) for part in text.split(",") if part.strip())
        if isinstance(kind, type) and issubclass(kind, Enum):
            return kind(text)
        if kind is bool:
            if text.lower() in ("1", "true", "yes", "on"):
                return True
            if text.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
        return text
    except ValueError:
        raise ConfigurationError(f"cannot read {text!r} as {getattr(kind, '__name__', kind)}", path)


class ConfigManager:
    """Handles configuration persistence"""

    @staticmethod
    def loads(text: str, source: str = "<string>") -> ScenarioConfig:
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        parser.optionxform = str
        try:
            parser.read_string(text, source=source)
        except configparser.Error as e:
            raise ConfigurationError(str(e).splitlines()[0], source)
        config = ScenarioConfig()
        sections = {f.name: f for f in dataclasses.fields(config)}
        for name in parser.sections():
            if name not in sections:
                raise ConfigurationError("unknown section", name)
            target = getattr(config, name)
            hints = typing.get_type_hints(type(target))
            for key, raw in parser.items(name):
                path = f"{name}.{key}"
                if key not in hints:
                    raise ConfigurationError("unknown key", path)
                setattr(target, key, _parse(raw, hints[key], path))
        return config

    @staticmethod
    def load(path: Path) -> ScenarioConfig:
        path = Path(path)
        if not path.exists():
            raise ConfigurationError("config file not found", str(path))
        return ConfigManager.loads(path.read_text(encoding="utf-8"), str(path))

    @staticmethod
    def dumps(config: ScenarioConfig) -> str:
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        for section in dataclasses.fields(config):
            values = getattr(config, section.name)
            parser[section.name] = {f.name: _format(getattr(values, f.name)) for f in dataclasses.fields(values)}
        buffer = io.StringIO()
        parser.write(buffer)
        return buffer.getvalue()

    @staticmethod
    def save(config: ScenarioConfig, path: Path):
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(ConfigManager.dumps(config))


def config_hash(config: ScenarioConfig) -> str:
    """SHA-256 of the canonical JSON form"""
    canonical = json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def apply_overrides(config: ScenarioConfig, seed: Optional[int] = None, output_dir: Optional[str] = None,
                    mode_cache: Optional[str] = None, threads: Optional[int] = None) -> ScenarioConfig:
    """Copy of `config` with command-line overrides applied"""
    run = dataclasses.replace(config.run)
    if seed is not None:
        run.seed = seed
    if output_dir is not None:
        run.output_dir = output_dir
    if mode_cache is not None:
        run.mode_cache = mode_cache
    if threads is not None:
        run.threads = threads
    return dataclasses.replace(config, run=run)

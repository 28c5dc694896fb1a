"""Configuration, presets, shared types, errors and the task queue"""

from .config import ScenarioConfig, ConfigManager, config_hash, apply_overrides
from .errors import (QtpError, ConfigurationError, GridMismatchError, UndefinedCorrelationError, EmptyBasisError,
                     RootBracketError, ModeMatchingError, UnderSamplingError, ExperimentError)
from .presets import built_in_presets
from .types import Medium, Experiment, IndexProfile, Parity, Channel, ShapingScenario, SlmPlane, MaterialKind
from .workqueue import WorkQueue

__all__ = [
    'ScenarioConfig',
    'ConfigManager',
    'config_hash',
    'apply_overrides',
    'QtpError',
    'ConfigurationError',
    'GridMismatchError',
    'UndefinedCorrelationError',
    'EmptyBasisError',
    'RootBracketError',
    'ModeMatchingError',
    'UnderSamplingError',
    'ExperimentError',
    'built_in_presets',
    'Medium',
    'Experiment',
    'IndexProfile',
    'Parity',
    'Channel',
    'ShapingScenario',
    'SlmPlane',
    'MaterialKind',
    'WorkQueue',
]

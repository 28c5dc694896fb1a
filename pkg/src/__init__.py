"""
Quantum Twin Photons
Classical and photon-pair speckle through multimode fibers and thin elements
"""

__version__ = "0.1.0"

from .core.config import ScenarioConfig, ConfigManager
from .fiber.modes import FiberSpec, ModeBasis, solve_modes
from .runner.runner import RunManifest, run

__all__ = [
    'ScenarioConfig',
    'ConfigManager',
    'FiberSpec',
    'ModeBasis',
    'solve_modes',
    'RunManifest',
    'run',
]

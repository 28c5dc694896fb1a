"""Refractive index models for thin elements"""

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..core.errors import ConfigurationError
from ..core.types import MaterialKind

DEFAULT_INDEX = 1.5


@dataclass(frozen=True)
class MaterialModel:
    """n(lambda): a constant, or Cauchy A + B/lambda^2 + C/lambda^4 with lambda in um"""
    kind: MaterialKind = MaterialKind.CONSTANT
    n0: float = DEFAULT_INDEX
    cauchy_a: float = 0.0
    cauchy_b: float = 0.0       # um^2
    cauchy_c: float = 0.0       # um^4

    def __post_init__(self):
        object.__setattr__(self, "kind", MaterialKind(self.kind))
        if self.kind is MaterialKind.CONSTANT and not self.n0 > 1:
            raise ConfigurationError(f"refractive index must be > 1, got {self.n0}", "material.n0")
        if self.kind is MaterialKind.CAUCHY and not self.cauchy_a > 0:
            raise ConfigurationError(f"Cauchy A must be > 0, got {self.cauchy_a}", "material.cauchy_a")

    @classmethod
    def constant(cls, n: float = DEFAULT_INDEX) -> "MaterialModel":
        return cls(MaterialKind.CONSTANT, n)

    @classmethod
    def cauchy(cls, a: float, b: float = 0.0, c: float = 0.0) -> "MaterialModel":
        return cls(MaterialKind.CAUCHY, a, a, b, c)

    def index(self, wavelength: float) -> float:
        if self.kind is MaterialKind.CONSTANT:
            return self.n0
        lam_um = wavelength * 1e6
        return self.cauchy_a + self.cauchy_b / lam_um ** 2 + self.cauchy_c / lam_um ** 4

    def check_band(self, wavelengths: Iterable[float]):
        """n > 1 over every simulated wavelength"""
        for w in wavelengths:
            n = self.index(w)
            if not n > 1:
                raise ConfigurationError(f"n({w * 1e9:.1f} nm) = {n:.4f} is not > 1", "material")

    def describe(self) -> str:
        if self.kind is MaterialKind.CONSTANT:
            return f"constant n={self.n0:g}"
        return f"cauchy A={self.cauchy_a:g} B={self.cauchy_b:g}um^2 C={self.cauchy_c:g}um^4"


def phase_factor(material: MaterialModel, wavelength: float) -> float:
    """(n(lambda) - 1) k: phase per meter of thickness"""
    return (material.index(wavelength) - 1.0) * 2 * np.pi / wavelength

"""
Scalar (LP) eigenmodes of weakly guiding fibers.

Step-index propagation constants come from the LP characteristic equation,
graded-index (parabolic) ones from a radial finite-difference eigenproblem.
Profiles are real: cos(l theta) and sin(l theta) partners are stored as
separate modes.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy import linalg, optimize, special

from ..core.errors import ConfigurationError, EmptyBasisError, RootBracketError
from ..core.types import IndexProfile, Parity
from ..optics.field import ComplexField, Grid

logger = logging.getLogger(__name__)

DEFAULT_CLADDING_INDEX = 1.45
GRADED_RADIAL_POINTS = 2000
GRADED_DOMAIN_FACTOR = 3.0      # radial domain = 3 x core radius, Dirichlet outside
MIN_WINDOW_POWER = 0.99         # modes leaking more than 1% beyond the window are dropped


@dataclass(frozen=True)
class FiberSpec:
    core_radius: float
    numerical_aperture: float
    length: float
    profile: IndexProfile = IndexProfile.STEP
    cladding_index: float = DEFAULT_CLADDING_INDEX

    def __post_init__(self):
        if not self.core_radius > 0:
            raise ConfigurationError(f"core radius must be > 0, got {self.core_radius}", "fiber.core_radius")
        if not 0 < self.numerical_aperture < self.cladding_index:
            raise ConfigurationError(
                f"need 0 < NA < cladding index ({self.cladding_index}), got {self.numerical_aperture}",
                "fiber.numerical_aperture")
        if not self.length > 0:
            raise ConfigurationError(f"length must be > 0, got {self.length}", "fiber.length")
        object.__setattr__(self, "profile", IndexProfile(self.profile))

    @property
    def core_index(self) -> float:
        return float(np.sqrt(self.cladding_index ** 2 + self.numerical_aperture ** 2))

    def v_number(self, wavelength: float) -> float:
        return 2 * np.pi * self.core_radius * self.numerical_aperture / wavelength


@dataclass(frozen=True)
class FiberMode:
    azimuthal_order: int
    radial_order: int
    parity: Parity
    beta: float
    profile: np.ndarray = field(repr=False)     # real, read-only view into the basis
    pitch: float = field(default=1.0, repr=False)
    wavelength: float = field(default=1.0, repr=False)

    @property
    def label(self) -> str:
        suffix = "" if self.azimuthal_order == 0 else ("c" if self.parity is Parity.COS else "s")
        return f"LP{self.azimuthal_order}{self.radial_order}{suffix}"

    def as_field(self) -> ComplexField:
        return ComplexField(self.profile, self.pitch, self.wavelength)


@dataclass(frozen=True)
class ModeBasis:
    wavelength: float
    fiber: FiberSpec
    grid: Grid
    modes: Tuple[FiberMode, ...]
    profiles: np.ndarray = field(repr=False)    # (M, N, N) float64

    def __len__(self) -> int:
        return len(self.modes)

    @property
    def betas(self) -> np.ndarray:
        return np.array([m.beta for m in self.modes])

    @property
    def labels(self) -> List[str]:
        return [m.label for m in self.modes]

    @property
    def matrix(self) -> np.ndarray:
        """Profiles flattened to (M, N*N)"""
        return self.profiles.reshape(len(self.modes), -1)

    def gram(self) -> np.ndarray:
        F = self.matrix
        return F @ F.T * self.grid.pitch ** 2

    @classmethod
    def from_arrays(cls, wavelength: float, fiber: FiberSpec, grid: Grid, ells, ps, parities, betas,
                    profiles: np.ndarray) -> "ModeBasis":
        profiles = np.array(profiles, dtype=np.float64, copy=True)
        profiles.setflags(write=False)
        modes = tuple(
            FiberMode(int(l), int(p), Parity(int(s)), float(b), profiles[i], grid.pitch, wavelength)
            for i, (l, p, s, b) in enumerate(zip(ells, ps, parities, betas)))
        return cls(wavelength, fiber, grid, modes, profiles)


@dataclass
class _RadialMode:
    ell: int
    p: int
    beta: float
    radial: object          # callable r -> R(r)
    window_power: float


def _step_characteristic(ell: int, V: float):
    """u J_{l+1}(u) K_l(w) - w K_{l+1}(w) J_l(u), pole-free, exponentially scaled K"""
    def f(u):
        w = np.sqrt(np.maximum(V * V - u * u, 0.0))
        return u * special.jv(ell + 1, u) * special.kve(ell, w) - w * special.kve(ell + 1, w) * special.jv(ell, u)
    return f


def _neff_from_u(fiber: FiberSpec, k: float, u: float) -> float:
    return float(np.sqrt(fiber.core_index ** 2 - (u / (k * fiber.core_radius)) ** 2))


def _step_radial_modes(fiber: FiberSpec, wavelength: float, window_radius: float) -> List[_RadialMode]:
    a = fiber.core_radius
    k = 2 * np.pi / wavelength
    V = fiber.v_number(wavelength)
    n_samples = max(2000, int(np.ceil(V / 0.005)))
    u_grid = np.linspace(1e-6 * V, V * (1 - 1e-10), n_samples)
    found = []
    ell = 0
    while True:
        f = _step_characteristic(ell, V)
        values = f(u_grid)
        crossings = np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)[0]
        if crossings.size == 0:
            break
        roots = []
        for i in crossings:
            lo, hi = u_grid[i], u_grid[i + 1]
            try:
                roots.append(optimize.brentq(f, lo, hi, xtol=1e-13 * V, rtol=1e-12, maxiter=200))
            except (ValueError, RuntimeError) as exc:
                raise RootBracketError(ell, (_neff_from_u(fiber, k, hi), _neff_from_u(fiber, k, lo)), str(exc))
        # larger u -> smaller beta; radial order counts from the highest beta
        for p, u in enumerate(sorted(roots), start=1):
            w = float(np.sqrt(V * V - u * u))
            beta = float(np.sqrt((k * fiber.core_index) ** 2 - (u / a) ** 2))
            radial = _step_radial_function(ell, u, w, a)
            found.append(_RadialMode(ell, p, beta, radial, _window_power(radial, a, w, window_radius)))
        ell += 1
    return found


def _step_radial_function(ell: int, u: float, w: float, a: float):
    j_edge = special.jv(ell, u)
    k_edge = special.kve(ell, w)

    def radial(r):
        r = np.asarray(r, dtype=np.float64)
        rho = r / a
        core = special.jv(ell, u * rho) / j_edge
        clad = special.kve(ell, w * np.maximum(rho, 1.0)) / k_edge * np.exp(-w * (np.maximum(rho, 1.0) - 1.0))
        return np.where(rho < 1.0, core, clad)
    return radial


def _window_power(radial, a: float, w: float, window_radius: float) -> float:
    """Fraction of the radial power sum R(r)^2 r inside the simulation window"""
    r_far = a * (1.0 + min(40.0 / max(w, 1e-3), 1e4))
    r = np.concatenate([np.linspace(0.0, a, 4000, endpoint=False), np.linspace(a, r_far, 20000)])
    density = radial(r) ** 2 * r
    total = np.trapz(density, r)
    inside = r <= window_radius
    return float(np.trapz(density[inside], r[inside]) / total)


def _graded_radial_modes(fiber: FiberSpec, wavelength: float, window_radius: float) -> List[_RadialMode]:
    a = fiber.core_radius
    k = 2 * np.pi / wavelength
    n_core, n_clad = fiber.core_index, fiber.cladding_index
    delta = (n_core ** 2 - n_clad ** 2) / (2 * n_core ** 2)
    N = GRADED_RADIAL_POINTS
    h = GRADED_DOMAIN_FACTOR * a / N
    r = (np.arange(N) + 0.5) * h
    r_half = np.arange(N + 1) * h           # r_{j-1/2}, r_{N-1/2} ... ; r_{-1/2} = 0
    n2 = np.where(r < a, n_core ** 2 * (1 - 2 * delta * (r / a) ** 2), n_clad ** 2)
    lower, upper = (k * n_clad) ** 2, (k * n_core) ** 2
    found = []
    ell = 0
    while True:
        # (r R')' - l^2/r R + k^2 n^2 r R = beta^2 r R, symmetrised by diag(r)^(1/2)
        diag = (-(r_half[1:] + r_half[:-1]) / h ** 2 - ell ** 2 / r + k ** 2 * n2 * r) / r
        off = (r_half[1:-1] / h ** 2) / np.sqrt(r[:-1] * r[1:])
        try:
            eigvals, eigvecs = linalg.eigh_tridiagonal(diag, off, select="v", select_range=(lower, upper))
        except linalg.LinAlgError as exc:
            raise RootBracketError(ell, (n_clad, n_core), str(exc))
        if eigvals.size == 0:
            break
        order = np.argsort(eigvals)[::-1]
        for p, idx in enumerate(order, start=1):
            R = eigvecs[:, idx] / np.sqrt(r)
            R = R / R[np.argmax(np.abs(R))]
            beta = float(np.sqrt(eigvals[idx]))
            density = R ** 2 * r
            inside = r <= window_radius
            window_power = float(density[inside].sum() / density.sum())
            radial = _tabulated_radial(r, R)
            found.append(_RadialMode(ell, p, beta, radial, window_power))
        ell += 1
    return found


def _tabulated_radial(r_nodes: np.ndarray, values: np.ndarray):
    def radial(r):
        return np.interp(np.asarray(r, dtype=np.float64), r_nodes, values, right=0.0)
    return radial


def _lowdin(profiles: np.ndarray, pitch: float) -> np.ndarray:
    """Symmetric orthonormalisation on the grid: F <- G^(-1/2) F"""
    M = profiles.shape[0]
    F = profiles.reshape(M, -1)
    G = F @ F.T * pitch ** 2
    w, U = linalg.eigh(G)
    if w.min() <= 1e-8:
        raise EmptyBasisError("mode profiles are linearly dependent on this grid; refine the grid")
    inv_sqrt = (U / np.sqrt(w)) @ U.T
    return (inv_sqrt @ F).reshape(profiles.shape)


def solve_modes(fiber: FiberSpec, wavelength: float, grid: Grid) -> ModeBasis:
    """Guided scalar modes of `fiber` at `wavelength`, sampled on `grid`"""
    if not wavelength > 0:
        raise ConfigurationError(f"wavelength must be > 0, got {wavelength}", "wavelength")
    window_radius = 0.5 * grid.extent
    if fiber.profile is IndexProfile.STEP:
        radial_modes = _step_radial_modes(fiber, wavelength, window_radius)
    else:
        radial_modes = _graded_radial_modes(fiber, wavelength, window_radius)

    kept = [m for m in radial_modes if m.window_power >= MIN_WINDOW_POWER]
    dropped = len(radial_modes) - len(kept)
    if dropped:
        logger.warning("dropped %d near-cutoff radial modes leaking beyond the %.1f um window",
                       dropped, 1e6 * grid.extent)
    if not kept:
        raise EmptyBasisError(
            f"no guided modes for a={fiber.core_radius:.3e} m, NA={fiber.numerical_aperture}, "
            f"lambda={wavelength:.4e} m (V={fiber.v_number(wavelength):.3f})")

    entries = []
    for m in kept:
        entries.append((m, Parity.COS))
        if m.ell > 0:
            entries.append((m, Parity.SIN))
    entries.sort(key=lambda e: (-e[0].beta, e[0].ell, e[1].value))

    R, theta = grid.polar()
    profiles = np.empty((len(entries),) + grid.shape)
    radial_cache = {}
    for i, (m, parity) in enumerate(entries):
        key = (m.ell, m.p)
        if key not in radial_cache:
            radial_cache[key] = m.radial(R)
        angular = np.cos(m.ell * theta) if parity is Parity.COS else np.sin(m.ell * theta)
        f = radial_cache[key] * angular
        profiles[i] = f / np.sqrt(np.sum(f * f) * grid.pitch ** 2)
    profiles = _lowdin(profiles, grid.pitch)

    logger.debug("solved %d modes (%s, V=%.2f) at %.3f nm", len(entries), fiber.profile.value,
                 fiber.v_number(wavelength), wavelength * 1e9)
    return ModeBasis.from_arrays(
        wavelength, fiber, grid,
        [m.ell for m, _ in entries], [m.p for m, _ in entries], [s.value for _, s in entries],
        [m.beta for m, _ in entries], profiles)

"""On-disk and in-memory cache of solved mode bases"""

import hashlib
import json
import logging
import os
import threading
from dataclasses import asdict
from pathlib import Path
from typing import Dict, Optional

import numpy as np

from .. import __version__
from ..optics.field import Grid
from .modes import FiberSpec, ModeBasis, solve_modes

logger = logging.getLogger(__name__)

CACHE_FORMAT = 1


def basis_key(fiber: FiberSpec, wavelength: float, grid: Grid) -> str:
    """SHA-256 over the canonical description of a solve"""
    spec = asdict(fiber)
    spec["profile"] = fiber.profile.value
    payload = {
        "format": CACHE_FORMAT,
        "fiber": spec,
        "wavelength": repr(float(wavelength)),
        "grid": {"size": grid.size, "pitch": repr(float(grid.pitch))},
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()


class ModeCache:
    """Solved bases keyed by (fiber, wavelength, grid).

    Bases live in memory for the lifetime of the cache; with a directory
    they are also stored as one .npz file per key.
    """

    def __init__(self, directory: Optional[Path] = None):
        self.directory = Path(directory) if directory is not None else None
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)
        self._memory: Dict[str, ModeBasis] = {}
        self._lock = threading.Lock()
        self._key_locks: Dict[str, threading.Lock] = {}
        self.hits = 0
        self.misses = 0

    def _path(self, key: str) -> Optional[Path]:
        return None if self.directory is None else self.directory / f"{key}.npz"

    def contains(self, fiber: FiberSpec, wavelength: float, grid: Grid) -> bool:
        key = basis_key(fiber, wavelength, grid)
        path = self._path(key)
        return key in self._memory or (path is not None and path.exists())

    def solve(self, fiber: FiberSpec, wavelength: float, grid: Grid) -> ModeBasis:
        key = basis_key(fiber, wavelength, grid)
        with self._lock:
            if key in self._memory:
                self.hits += 1
                return self._memory[key]
            key_lock = self._key_locks.setdefault(key, threading.Lock())
        with key_lock:
            # another thread may have finished the same solve
            with self._lock:
                if key in self._memory:
                    self.hits += 1
                    return self._memory[key]
            basis = self._load(key, fiber, wavelength, grid)
            if basis is None:
                basis = solve_modes(fiber, wavelength, grid)
                self._store(key, basis)
                with self._lock:
                    self.misses += 1
            else:
                with self._lock:
                    self.hits += 1
            with self._lock:
                self._memory[key] = basis
        return basis

    __call__ = solve

    def _load(self, key: str, fiber: FiberSpec, wavelength: float, grid: Grid) -> Optional[ModeBasis]:
        path = self._path(key)
        if path is None or not path.exists():
            return None
        try:
            with np.load(path, allow_pickle=False) as data:
                basis = ModeBasis.from_arrays(wavelength, fiber, grid, data["ells"], data["radial_orders"],
                                              data["parities"], data["betas"], data["profiles"])
        except (OSError, KeyError, ValueError) as e:
            logger.warning("ignoring unreadable cache entry %s: %s", path.name, e)
            return None
        logger.debug("mode cache hit %s (%d modes)", key[:12], len(basis))
        return basis

    def _store(self, key: str, basis: ModeBasis):
        path = self._path(key)
        if path is None:
            return
        tmp = path.with_name(f"{key}.{os.getpid()}.{threading.get_ident()}.tmp.npz")
        np.savez(tmp,
                 ells=np.array([m.azimuthal_order for m in basis.modes]),
                 radial_orders=np.array([m.radial_order for m in basis.modes]),
                 parities=np.array([m.parity.value for m in basis.modes]),
                 betas=basis.betas,
                 profiles=basis.profiles,
                 version=np.array(__version__))
        os.replace(tmp, path)
        logger.debug("mode cache stored %s (%d modes)", key[:12], len(basis))

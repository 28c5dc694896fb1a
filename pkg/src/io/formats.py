"""
Artifact writers: QTPF float dumps, 16-bit PGM maps, CSV tables, manifest.

QTPF layout (little-endian): magic b"QTPF", uint32 rows, uint32 cols,
float32 pitch in meters, then rows*cols float32 values in row-major order.
"""

import csv
import hashlib
import json
import logging
import struct
from pathlib import Path
from typing import Iterable, Sequence, Tuple

import cv2
import numpy as np

from ..core.errors import ConfigurationError
from ..optics.field import IntensityMap

logger = logging.getLogger(__name__)

QTPF_MAGIC = b"QTPF"
QTPF_HEADER = struct.Struct("<4sIIf")
PGM_MAX = 65535


def write_qtpf(path: Path, values: np.ndarray, pitch: float) -> Path:
    values = np.asarray(values)
    if values.ndim != 2:
        raise ConfigurationError(f"QTPF holds 2D arrays, got {values.shape}", "qtpf")
    path = Path(path)
    with open(path, "wb") as f:
        f.write(QTPF_HEADER.pack(QTPF_MAGIC, values.shape[0], values.shape[1], float(pitch)))
        f.write(np.ascontiguousarray(values, dtype="<f4").tobytes())
    return path


def read_qtpf(path: Path) -> Tuple[np.ndarray, float]:
    data = Path(path).read_bytes()
    if len(data) < QTPF_HEADER.size:
        raise ConfigurationError("file too short for a QTPF header", str(path))
    magic, rows, cols, pitch = QTPF_HEADER.unpack_from(data)
    if magic != QTPF_MAGIC:
        raise ConfigurationError(f"bad magic {magic!r}", str(path))
    expected = QTPF_HEADER.size + 4 * rows * cols
    if len(data) != expected:
        raise ConfigurationError(f"expected {expected} bytes, found {len(data)}", str(path))
    values = np.frombuffer(data, dtype="<f4", offset=QTPF_HEADER.size).reshape(rows, cols)
    return values.astype(np.float32), float(pitch)


def write_pgm(path: Path, image: IntensityMap) -> Path:
    """16-bit binary PGM scaled to the map maximum, plus a .txt sidecar with the scale"""
    path = Path(path)
    peak = float(image.values.max())
    scale = PGM_MAX / peak if peak > 0 else 0.0
    pixels = np.round(image.values * scale).astype(np.uint16)
    if not cv2.imwrite(str(path), pixels):
        raise OSError(f"could not write {path}")
    sidecar = path.with_suffix(".txt")
    with open(sidecar, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"label={image.label}\n")
        f.write(f"rows={image.shape[0]}\n")
        f.write(f"cols={image.shape[1]}\n")
        f.write(f"pitch_m={image.pitch!r}\n")
        f.write(f"max_value={peak!r}\n")
        f.write(f"counts_per_unit={scale!r}\n")
    return path


def _write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
    return path


def _fmt(value: float) -> str:
    return repr(float(value))


def write_curve_csv(path: Path, curves) -> Path:
    """delta_lambda_nm,pcc_mean,pcc_stderr,channel"""
    rows = []
    for curve in curves:
        channel = curve.label or curve.channel.value
        for d, m, s in zip(curve.detunings, curve.pcc_mean, curve.pcc_stderr):
            rows.append((_fmt(d * 1e9), _fmt(m), _fmt(s), channel))
    return _write_rows(path, ("delta_lambda_nm", "pcc_mean", "pcc_stderr", "channel"), rows)


def write_focus_csv(path: Path, reports) -> Path:
    """delta_lambda_nm,enhancement,scenario"""
    rows = [(_fmt(d * 1e9), _fmt(e), report.scenario.value) for report in reports for d, e in report.curve]
    return _write_rows(path, ("delta_lambda_nm", "enhancement", "scenario"), rows)


def write_orders_csv(path: Path, order_rows) -> Path:
    """delta_lambda_nm,order,channel,center_m,weight_analytical,weight_numerical"""
    rows = [(_fmt(r.delta_lambda * 1e9), r.analytical.order, r.channel.value, _fmt(r.analytical.center),
             _fmt(r.analytical.weight), _fmt(r.numerical.weight)) for r in order_rows]
    return _write_rows(path, ("delta_lambda_nm", "order", "channel", "center_m", "weight_analytical",
                              "weight_numerical"), rows)


def write_table_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    return _write_rows(path, header, [[_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row]
                                      for row in rows])


def write_screen(path: Path, screen) -> Path:
    """Thickness dump (QTPF, macro-pixel pitch) with a text sidecar"""
    path = write_qtpf(path, screen.thickness, screen.macro_pixel)
    with open(path.with_suffix(".txt"), "w", encoding="utf-8", newline="\n") as f:
        f.write(f"kind={screen.kind}\n")
        f.write(f"macro_pixel_m={screen.macro_pixel!r}\n")
        f.write(f"material={screen.material.describe()}\n")
        f.write(f"seed={screen.seed}\n")
    return path


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def write_manifest(path: Path, manifest: dict) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return path

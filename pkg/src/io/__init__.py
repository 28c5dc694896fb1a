"""Artifact writers"""

from .formats import (write_qtpf, read_qtpf, write_pgm, write_curve_csv, write_focus_csv, write_orders_csv,
                      write_table_csv, write_screen, sha256_file, write_manifest)

__all__ = [
    'write_qtpf',
    'read_qtpf',
    'write_pgm',
    'write_curve_csv',
    'write_focus_csv',
    'write_orders_csv',
    'write_table_csv',
    'write_screen',
    'sha256_file',
    'write_manifest',
]

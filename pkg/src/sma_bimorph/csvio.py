"""Deterministic CSV emission.

Artifacts are diffed byte-for-byte in tests, so the writer is strict:
fixed column order, '\n' newlines, UTF-8, shortest round-trip decimal
formatting (repr) for floats, no trailing whitespace.
"""

from dataclasses import dataclass
from pathlib import Path

from .errors import ParameterError


@dataclass(frozen=True)
class CsvSchema:
    name: str
    columns: tuple

    @property
    def header(self):
        return ",".join(self.columns)


TRACE_SCHEMA = CsvSchema("trace", ("t_s", "delta_mm", "delta_filt_mm"))
SWEEP_SCHEMA = CsvSchema("sweep", ("f_hz", "dc_pct", "amado_mm", "amado_std_mm", "amado_norm"))
POWER_SCHEMA = CsvSchema("power", ("t_s", "v_t_v", "v_b_v", "i_t_a", "i_b_a", "p_a_w"))
TRAJECTORY_SCHEMA = CsvSchema("trajectory", ("t_s", "x_mm", "y_mm", "psi_deg", "v_mm_s"))
SPEED_SCAN_SCHEMA = CsvSchema("speed_scan", ("f_hz", "v_mm_s"))


def format_value(value) -> str:
    if isinstance(value, bool):
        raise ParameterError("boolean values have no CSV representation here")
    if isinstance(value, (int,)):
        return str(value)
    return repr(float(value))


def write_csv(path, schema: CsvSchema, rows) -> Path:
    """Write rows (iterables matching schema.columns) under the fixed header."""
    path = Path(path)
    lines = [schema.header]
    for i, row in enumerate(rows):
        row = tuple(row)
        if len(row) != len(schema.columns):
            raise ParameterError(
                f"row {i} has {len(row)} values for schema {schema.name!r} "
                f"with columns {schema.columns}")
        lines.append(",".join(format_value(v) for v in row))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(("\n".join(lines) + "\n").encode("utf-8"))
    return path

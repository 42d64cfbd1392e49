# Copyright 2025 Google LLC.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Supports input and output of waveforms and reports.

Waveform CSV layout (version 1):

  # scfcl waveform v1 frequency_hz=50 t_fault_s=0.023 t_clear_s=none
  time_s,i_line_A,v_fcl_V,v_dc_V,i_shorted_<id>_A...,B_<branch>_T...,
  H_<branch>_A_per_m...,i_dc_A

Floats are written with 17 significant digits so a reloaded series is
bit-identical. All writers replace the target atomically.
"""

from __future__ import annotations

import contextlib
import json
import os
import pathlib
import tempfile
from typing import Any, Dict, Iterator, List, Mapping, Optional, TextIO, Union

from absl import logging
import numpy as np
import pandas as pd

from scfcl import data_lib
from scfcl.core import data
from scfcl.core import exceptions

__all__ = [
    "CSV_VERSION",
    "waveform_columns",
    "write_waveform_csv",
    "read_waveform_csv",
    "write_json",
    "read_json",
    "write_summary",
    "read_summary",
    "write_residuals",
    "write_text",
]

CSV_VERSION = 1
_HEADER_PREFIX = "# scfcl waveform v"
_FLOAT_FORMAT = "%.17g"
_BASE_COLUMNS = (
    ("time_s", "time"),
    ("i_line_A", "i_line"),
    ("v_fcl_V", "v_fcl"),
    ("v_dc_V", "v_dc"),
)
_MAPPED = (
    ("i_shorted", "i_shorted_", "_A"),
    ("b", "B_", "_T"),
    ("h", "H_", "_A_per_m"),
)
# Written after the mapped columns.
_TRAILING_COLUMNS = (("i_dc_A", "i_dc"),)

PathLike = Union[str, os.PathLike]


@contextlib.contextmanager
def _atomic_open(path: PathLike) -> Iterator[TextIO]:
  """Writes to a temporary file next to path, then renames it over path."""
  path = pathlib.Path(path)
  path.parent.mkdir(parents=True, exist_ok=True)
  fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
  try:
    with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
      yield f
    os.replace(tmp, path)
  except BaseException:
    with contextlib.suppress(FileNotFoundError):
      os.unlink(tmp)
    raise
  logging.debug("Wrote %s", path)


def _optional(value: Optional[float]) -> str:
  return "none" if value is None else repr(float(value))


def waveform_columns(ts: data.TimeSeries) -> List[str]:
  """Column names of a series in file order."""
  columns = [name for name, _ in _BASE_COLUMNS]
  for attr, prefix, suffix in _MAPPED:
    columns.extend(f"{prefix}{key}{suffix}" for key in getattr(ts, attr))
  columns.extend(name for name, _ in _TRAILING_COLUMNS)
  return columns


def write_waveform_csv(ts: data.TimeSeries, path: PathLike) -> pathlib.Path:
  """Writes a series as a versioned CSV file.

  Args:
    ts: The series.
    path: Target file.

  Returns:
    The written path.
  """
  columns: Dict[str, np.ndarray] = {
      name: getattr(ts, attr) for name, attr in _BASE_COLUMNS
  }
  for attr, prefix, suffix in _MAPPED:
    for key, values in getattr(ts, attr).items():
      columns[f"{prefix}{key}{suffix}"] = values
  for name, attr in _TRAILING_COLUMNS:
    columns[name] = getattr(ts, attr)
  frame = pd.DataFrame(columns)
  header = (
      f"{_HEADER_PREFIX}{CSV_VERSION} frequency_hz={ts.frequency!r}"
      f" t_fault_s={_optional(ts.t_fault)} t_clear_s={_optional(ts.t_clear)}\n"
  )
  with _atomic_open(path) as f:
    f.write(header)
    frame.to_csv(
        f, index=False, float_format=_FLOAT_FORMAT, lineterminator="\n"
    )
  return pathlib.Path(path)


def _parse_header(line: str, path: PathLike) -> Dict[str, Optional[float]]:
  if not line.startswith(_HEADER_PREFIX):
    raise exceptions.MetricsError(f"{path} is not an scfcl waveform file.")
  tokens = line[len(_HEADER_PREFIX) :].split()
  if not tokens or tokens[0] != str(CSV_VERSION):
    raise exceptions.MetricsError(
        f"{path}: unsupported waveform version {tokens[:1]}"
    )
  meta: Dict[str, Optional[float]] = {}
  for token in tokens[1:]:
    key, _, value = token.partition("=")
    meta[key] = None if value == "none" else float(value)
  return meta


def read_waveform_csv(path: PathLike) -> data.TimeSeries:
  """Loads a series written by write_waveform_csv.

  Solver statistics, flux linkages and winding currents are not stored and
  come back empty.

  Raises:
    IOError: If the file does not exist.
    MetricsError: Not a version-1 waveform file.
  """
  if not os.path.exists(path):
    raise IOError(f"File does not exist: {path}")
  with open(path, "r", encoding="utf-8") as f:
    meta = _parse_header(f.readline().strip(), path)
    frame = pd.read_csv(f, dtype=float, float_precision="round_trip")
  series = {
      attr: frame[name].to_numpy()
      for name, attr in _BASE_COLUMNS + _TRAILING_COLUMNS
  }
  mapped: Dict[str, Dict[str, np.ndarray]] = {
      attr: {} for attr, _, _ in _MAPPED
  }
  for column in frame.columns:
    for attr, prefix, suffix in _MAPPED:
      if column.startswith(prefix) and column.endswith(suffix):
        key = column[len(prefix) : len(column) - len(suffix)]
        mapped[attr][key] = frame[column].to_numpy()
        break
  return data.TimeSeries(
      **series,
      **mapped,
      frequency=meta.get("frequency_hz") or 50.0,
      t_fault=meta.get("t_fault_s"),
      t_clear=meta.get("t_clear_s"),
  )


def write_json(payload: Mapping[str, Any], path: PathLike) -> pathlib.Path:
  """Writes a mapping as sorted, indented JSON."""
  with _atomic_open(path) as f:
    json.dump(payload, f, indent=2, sort_keys=True, allow_nan=False)
    f.write("\n")
  return pathlib.Path(path)


def read_json(path: PathLike) -> Dict[str, Any]:
  if not os.path.exists(path):
    raise IOError(f"File does not exist: {path}")
  with open(path, "r", encoding="utf-8") as f:
    return json.load(f)


def write_summary(report: data.SummaryReport, path: PathLike) -> pathlib.Path:
  return write_json(data_lib.report_to_dict(report), path)


def read_summary(path: PathLike) -> data.SummaryReport:
  return data_lib.dict_to_report(read_json(path))


def write_residuals(
    error: exceptions.SolverError, path: PathLike, *, name: str = ""
) -> pathlib.Path:
  """Writes the diagnostic trace of a failed run."""
  payload = {
      "scenario": name,
      "error": type(error).__name__,
      "message": str(error),
      "time_s": getattr(error, "time_s", None),
      "branch_id": getattr(error, "branch_id", None),
      "residual_history": [
          float(r) for r in getattr(error, "residual_history", [])
      ],
  }
  return write_json(payload, path)


def write_text(text: str, path: PathLike) -> pathlib.Path:
  """Writes a text file atomically."""
  with _atomic_open(path) as f:
    f.write(text)
  return pathlib.Path(path)

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

"""Library for data conversion between reports and JSON-ready dicts."""

from __future__ import annotations

import dataclasses
import enum
import numbers
from typing import Any, Dict, Iterable, Mapping, Optional, Tuple

import numpy as np

from scfcl.core import data

__all__ = [
    "enum_asdict_factory",
    "report_to_dict",
    "dict_to_report",
    "stats_to_dict",
]


def _plain(value: Any) -> Any:
  if dataclasses.is_dataclass(value) and not isinstance(value, type):
    return dataclasses.asdict(value, dict_factory=enum_asdict_factory)
  if isinstance(value, enum.Enum):
    return value.value
  if isinstance(value, np.ndarray):
    return value.tolist()
  if isinstance(value, Mapping):
    return {str(k): _plain(v) for k, v in value.items()}
  if isinstance(value, (list, tuple)):
    return [_plain(v) for v in value]
  if isinstance(value, numbers.Integral) and not isinstance(value, bool):
    return int(value)
  if isinstance(value, numbers.Real) and not isinstance(value, bool):
    return float(value)
  return value


def enum_asdict_factory(items: Iterable[Tuple[str, Any]]) -> Dict[str, Any]:
  """Custom dict_factory for dataclasses.asdict.

  Recursively converts dataclass instances, converts enum values to their
  underlying values, numpy scalars and arrays to Python numbers and lists,
  and skips any field whose name starts with an underscore.

  Args:
    items: An iterable of (key, value) pairs from fields of a dataclass.

  Returns:
    A mapping of field names to JSON-ready values.
  """
  result: Dict[str, Any] = {}
  for key, value in items:
    # Skip internal fields.
    if key.startswith("_"):
      continue
    result[key] = _plain(value)
  return result


def report_to_dict(report: Optional[data.SummaryReport]) -> Dict[str, Any]:
  """Converts a SummaryReport into a JSON-ready dict.

  The insertion drop is also reported in percent.
  """
  if report is None:
    return {}
  result = dataclasses.asdict(report, dict_factory=enum_asdict_factory)
  result["insertion_drop_pct"] = report.insertion_drop_pct
  return result


def stats_to_dict(stats: data.SolverStats) -> Dict[str, Any]:
  return dataclasses.asdict(stats, dict_factory=enum_asdict_factory)


def dict_to_report(report_dict: Mapping[str, Any]) -> data.SummaryReport:
  """Converts a dict written by report_to_dict back to a SummaryReport."""
  fields = {f.name for f in dataclasses.fields(data.SummaryReport)}
  kwargs = {k: v for k, v in report_dict.items() if k in fields}
  kwargs["newton"] = data.SolverStats(**report_dict.get("newton", {}))
  kwargs["provenance"] = data.Provenance(**report_dict.get("provenance", {}))
  kwargs["peak_b_t"] = dict(report_dict.get("peak_b_t", {}))
  return data.SummaryReport(**kwargs)

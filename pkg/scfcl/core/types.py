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

"""Core enumerations shared across scfcl modules."""

from __future__ import annotations

import enum

__all__ = [
    'ScfclModel',
    'CurveKind',
    'BranchKind',
    'WindingRole',
    'Integrator',
    'DcMode',
    'VoltageBasis',
]


class ScfclModel(enum.Enum):
  """Stock limiter configurations.

  A: partial magnetic separation (auxiliary dc coil on the ac leg).
  B: 100% magnetic separation.
  C: main dc coil short-circuited, auxiliary coil carries the bias.
  D: inductive single-phase limiter, gap in the middle leg.
  E: single core with short-circuited yoke windings.
  NONE: no limiter in the line.
  """

  A = 'A'
  B = 'B'
  C = 'C'
  D = 'D'
  E = 'E'
  NONE = 'None'


class CurveKind(enum.Enum):
  """B-H law families."""

  LINEAR = 'linear'
  SATURATING = 'saturating'


class BranchKind(enum.Enum):
  """Reluctance branch families."""

  CORE = 'core'
  GAP = 'gap'
  PM = 'pm'


class WindingRole(enum.Enum):
  """Which circuit loop a winding belongs to."""

  AC_SERIES = 'ac-series'
  DC_SOURCE = 'dc-source'
  DC_AUXILIARY = 'dc-auxiliary'
  SHORTED = 'shorted'
  OPEN = 'open'


class Integrator(enum.Enum):
  """Implicit time discretizations."""

  BACKWARD_EULER = 'backward-euler'
  TRAPEZOIDAL = 'trapezoidal'

  @property
  def theta(self) -> float:
    """Weight of the new time level in the theta-method."""
    return 1.0 if self is Integrator.BACKWARD_EULER else 0.5


class DcMode(enum.Enum):
  """Bias source models."""

  IDEAL_CURRENT = 'ideal-current'
  VOLTAGE_SOURCE = 'voltage-source'


class VoltageBasis(enum.Enum):
  """How a configured source voltage is read."""

  PEAK = 'peak'
  RMS = 'rms'

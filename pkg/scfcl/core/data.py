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

"""Value types that cross module boundaries: waveforms and reports."""

from __future__ import annotations

import dataclasses
import math
from typing import Dict, Mapping, Optional

import numpy as np

from scfcl.core import exceptions

__all__ = [
    "SolverStats",
    "TimeSeries",
    "Provenance",
    "SummaryReport",
]


def _frozen_array(values) -> np.ndarray:
  arr = np.array(values, dtype=float)
  arr.setflags(write=False)
  return arr


def _frozen_map(values: Mapping[str, object]) -> Dict[str, np.ndarray]:
  return {k: _frozen_array(v) for k, v in values.items()}


@dataclasses.dataclass(frozen=True)
class SolverStats:
  """Newton bookkeeping of one transient run.

  Attributes:
    steps: Number of time steps taken on the output grid.
    newton_iterations: Total Newton updates over the run.
    max_step_iterations: Largest Newton update count of any single solve.
    substepped_steps: Steps that needed local dt halving.
    max_flux_residual_ratio: Largest nodal flux residual over max branch flux
      seen at any converged solve.
  """

  steps: int = 0
  newton_iterations: int = 0
  max_step_iterations: int = 0
  substepped_steps: int = 0
  max_flux_residual_ratio: float = 0.0


@dataclasses.dataclass(frozen=True)
class TimeSeries:
  """Sampled waveforms of one transient run on a uniform grid.

  Attributes:
    time: Sample instants in seconds.
    i_line: Line current in amperes.
    v_fcl: Limiter terminal voltage (sum over ac windings) in volts.
    v_dc: Bias-source terminal voltage in volts.
    i_dc: Bias loop current in amperes.
    i_shorted: Current per short-circuited winding id.
    b: Flux density per branch id in tesla.
    h: Field strength per branch id in A/m.
    flux_linkage: Flux linkage per winding id in weber-turns.
    winding_current: Current per winding id in amperes.
    frequency: System frequency in hertz.
    t_fault: Fault inception in seconds, or None for a normal run.
    t_clear: Fault clearing instant, or None.
    stats: Solver statistics of the run.
  """

  time: np.ndarray
  i_line: np.ndarray
  v_fcl: np.ndarray
  v_dc: np.ndarray
  i_dc: np.ndarray
  i_shorted: Mapping[str, np.ndarray] = dataclasses.field(default_factory=dict)
  b: Mapping[str, np.ndarray] = dataclasses.field(default_factory=dict)
  h: Mapping[str, np.ndarray] = dataclasses.field(default_factory=dict)
  flux_linkage: Mapping[str, np.ndarray] = dataclasses.field(
      default_factory=dict
  )
  winding_current: Mapping[str, np.ndarray] = dataclasses.field(
      default_factory=dict
  )
  frequency: float = 50.0
  t_fault: Optional[float] = None
  t_clear: Optional[float] = None
  stats: SolverStats = dataclasses.field(default_factory=SolverStats)

  def __post_init__(self):
    for name in ("time", "i_line", "v_fcl", "v_dc", "i_dc"):
      object.__setattr__(self, name, _frozen_array(getattr(self, name)))
    for name in ("i_shorted", "b", "h", "flux_linkage", "winding_current"):
      object.__setattr__(self, name, _frozen_map(getattr(self, name)))

    n = len(self.time)
    series = [self.i_line, self.v_fcl, self.v_dc, self.i_dc]
    for name in ("i_shorted", "b", "h", "flux_linkage", "winding_current"):
      series.extend(getattr(self, name).values())
    if any(len(s) != n for s in series):
      raise exceptions.MetricsError("All series must share the time grid.")
    if n >= 3:
      steps = np.diff(self.time)
      if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-15):
        raise exceptions.MetricsError("Time grid is not uniform.")

  @property
  def dt(self) -> float:
    """Output sample spacing."""
    if len(self.time) < 2:
      return 0.0
    return float(self.time[1] - self.time[0])

  @property
  def period(self) -> float:
    return 1.0 / self.frequency

  def __len__(self) -> int:
    return len(self.time)

  def index_at(self, t: float) -> int:
    """Nearest sample index of instant t."""
    if self.dt == 0.0:
      return 0
    return int(round((t - self.time[0]) / self.dt))


@dataclasses.dataclass(frozen=True)
class Provenance:
  """Where a report came from."""

  config_hash: str = ""
  version: str = ""
  dt: float = 0.0
  integrator: str = ""


@dataclasses.dataclass(frozen=True)
class SummaryReport:
  """Per-scenario metrics.

  Metrics that do not apply to the run (no fault, no bias source) are None.
  insertion_drop is a fraction; insertion_drop_pct reports it in percent.
  """

  name: str
  model: str
  first_peak_a: Optional[float] = None
  later_peak_a: Optional[float] = None
  steady_fault_amplitude_a: Optional[float] = None
  normal_amplitude_a: Optional[float] = None
  limiting_ratio: Optional[float] = None
  insertion_drop: Optional[float] = None
  peak_b_t: Mapping[str, float] = dataclasses.field(default_factory=dict)
  peak_v_dc_v: Optional[float] = None
  total_turns: int = 0
  newton: SolverStats = dataclasses.field(default_factory=SolverStats)
  provenance: Provenance = dataclasses.field(default_factory=Provenance)

  def __post_init__(self):
    for field in dataclasses.fields(self):
      value = getattr(self, field.name)
      if isinstance(value, float) and not math.isfinite(value):
        raise exceptions.MetricsError(
            f"Metric {field.name} is not finite: {value}"
        )
    for branch_id, value in self.peak_b_t.items():
      if not math.isfinite(value):
        raise exceptions.MetricsError(f"Peak B of {branch_id} is not finite.")

  @property
  def insertion_drop_pct(self) -> Optional[float]:
    if self.insertion_drop is None:
      return None
    return 100.0 * self.insertion_drop

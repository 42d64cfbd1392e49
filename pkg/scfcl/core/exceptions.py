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

"""Core error types for scfcl.

This module defines all base exceptions for scfcl. Every error raised by the
package derives from ScfclError so callers (and the CLI exit-code mapping)
can catch them with a single except clause.
"""

from __future__ import annotations

from typing import Optional, Sequence

__all__ = [
    "ScfclError",
    "InputError",
    "ConfigError",
    "TopologyError",
    "SolverError",
    "NonConvergenceError",
    "SingularJacobianError",
    "ResonanceError",
    "MetricsError",
]


class ScfclError(Exception):
  """Base exception for all scfcl errors."""


class InputError(ScfclError, ValueError):
  """A numeric argument is non-finite or outside its valid range."""


class ConfigError(ScfclError):
  """Exception raised for scenario or flag validation failures.

  The message names the offending key so the CLI can print it verbatim.
  """

  def __init__(self, message: str, *, key: Optional[str] = None) -> None:
    super().__init__(message)
    self.key = key


class TopologyError(ConfigError):
  """A magnetic network or limiter assembly cannot be constructed."""


class SolverError(ScfclError):
  """Base exception for numerical failures."""


class NonConvergenceError(SolverError):
  """Newton iteration exhausted its iterations or its damping.

  Attributes:
    residual_history: Scaled residual norm after every Newton iteration.
    time_s: Simulated time of the failing step, when raised by cosim.
  """

  def __init__(
      self,
      message: str,
      *,
      residual_history: Optional[Sequence[float]] = None,
      time_s: Optional[float] = None,
  ) -> None:
    super().__init__(message)
    self.residual_history = list(residual_history or [])
    self.time_s = time_s


class SingularJacobianError(SolverError):
  """The Newton matrix is singular; branch_id names the degenerate branch."""

  def __init__(self, message: str, *, branch_id: Optional[str] = None) -> None:
    super().__init__(message)
    self.branch_id = branch_id


class ResonanceError(InputError):
  """Parallel LC evaluated at its resonance singularity."""


class MetricsError(ScfclError):
  """Waveforms cannot be reduced to the requested metric."""

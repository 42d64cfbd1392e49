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

"""Single-valued B-H laws for soft iron.

Two laws are provided. The linear law is B = mu0*mu_r*H. The saturating law is

  B(H) = mu0*H + (2*B_sat/pi)*atan(H/H_knee),

an anhysteretic curve whose excess over the air line tends to +/-B_sat and
whose slope never drops below mu0. Every function accepts a scalar or a numpy
array and returns the same shape (a Python float for scalar input).

Example:

  curve = material.BHCurve.saturating(b_sat=1.8, h_knee=500.0)
  b = material.b_of_h(curve, 1234.0)
  h = material.h_of_b(curve, b)  # 1234.0
"""

from __future__ import annotations

import dataclasses
import math
from typing import Union

import numpy as np
from scipy import optimize

from scfcl.core import exceptions
from scfcl.core import types

MU0 = 4e-7 * math.pi

ArrayLike = Union[float, np.ndarray]

__all__ = [
    "MU0",
    "BHCurve",
    "b_of_h",
    "h_of_b",
    "mu_differential",
    "mu_secant",
    "coenergy_density",
    "energy_density",
    "DEFAULT_SOFT_IRON",
]

_RTOL = 4 * np.finfo(float).eps


@dataclasses.dataclass(frozen=True)
class BHCurve:
  """Material law of a core branch.

  Attributes:
    kind: Law family.
    mu_r: Relative permeability of the linear law. Ignored by the saturating
      law, whose slope at the origin is reported by initial_mu_r.
    b_sat: Saturation flux density in tesla.
    h_knee: Knee sharpness in A/m.
  """

  kind: types.CurveKind = types.CurveKind.SATURATING
  mu_r: float = 1000.0
  b_sat: float = 1.8
  h_knee: float = 500.0

  def __post_init__(self):
    if not isinstance(self.kind, types.CurveKind):
      try:
        object.__setattr__(self, "kind", types.CurveKind(self.kind))
      except ValueError as e:
        raise exceptions.InputError(f"Unknown curve kind: {self.kind}") from e
    for name in ("mu_r", "b_sat", "h_knee"):
      value = getattr(self, name)
      if not math.isfinite(value):
        raise exceptions.InputError(f"{name} must be finite, got {value}")
    if self.mu_r < 1.0:
      raise exceptions.InputError(f"mu_r must be >= 1, got {self.mu_r}")
    if self.b_sat <= 0.0:
      raise exceptions.InputError(f"b_sat must be > 0, got {self.b_sat}")
    if self.h_knee <= 0.0:
      raise exceptions.InputError(f"h_knee must be > 0, got {self.h_knee}")

  @classmethod
  def linear(cls, mu_r: float) -> BHCurve:
    return cls(kind=types.CurveKind.LINEAR, mu_r=mu_r)

  @classmethod
  def saturating(cls, b_sat: float = 1.8, h_knee: float = 500.0) -> BHCurve:
    return cls(kind=types.CurveKind.SATURATING, b_sat=b_sat, h_knee=h_knee)

  @property
  def is_linear(self) -> bool:
    return self.kind is types.CurveKind.LINEAR

  @property
  def saturation_scale(self) -> float:
    """Coefficient 2*B_sat/pi in front of the atan term."""
    return 2.0 * self.b_sat / math.pi

  @property
  def initial_mu_r(self) -> float:
    """Relative permeability at H = 0."""
    if self.is_linear:
      return self.mu_r
    return 1.0 + self.saturation_scale / (self.h_knee * MU0)


DEFAULT_SOFT_IRON = BHCurve.saturating(b_sat=1.8, h_knee=500.0)


def _finite(values: ArrayLike, name: str) -> np.ndarray:
  arr = np.asarray(values, dtype=float)
  if not np.all(np.isfinite(arr)):
    raise exceptions.InputError(f"{name} must be finite, got {values!r}")
  return arr


def _like(template: ArrayLike, result: np.ndarray) -> ArrayLike:
  if np.ndim(template) == 0:
    return float(result)
  return result


def b_of_h(curve: BHCurve, h: ArrayLike) -> ArrayLike:
  """Flux density in tesla at field strength h (A/m)."""
  h_arr = _finite(h, "H")
  if curve.is_linear:
    return _like(h, MU0 * curve.mu_r * h_arr)
  # Evaluated on |H| and re-signed so that B(-H) == -B(H) bit for bit.
  mag = np.abs(h_arr)
  b = MU0 * mag + curve.saturation_scale * np.arctan(mag / curve.h_knee)
  return _like(h, np.sign(h_arr) * b)


def mu_differential(curve: BHCurve, h: ArrayLike) -> ArrayLike:
  """dB/dH in H/m at field strength h."""
  h_arr = _finite(h, "H")
  if curve.is_linear:
    return _like(h, np.full_like(h_arr, MU0 * curve.mu_r))
  with np.errstate(over="ignore"):
    x2 = np.square(h_arr / curve.h_knee)
  mu = MU0 + (curve.saturation_scale / curve.h_knee) / (1.0 + x2)
  return _like(h, mu)


def _h_of_b_magnitude(curve: BHCurve, b_mag: float) -> float:
  if b_mag == 0.0:
    return 0.0
  # B(H) <= mu_init*H and B(H) >= mu0*H bracket the root.
  lo = b_mag / (MU0 * curve.initial_mu_r)
  hi = b_mag / MU0
  return optimize.brentq(
      lambda x: float(b_of_h(curve, x)) - b_mag,
      lo,
      hi,
      xtol=1e-300,
      rtol=_RTOL,
      maxiter=200,
  )


def h_of_b(curve: BHCurve, b: ArrayLike) -> ArrayLike:
  """Field strength in A/m that produces flux density b (tesla)."""
  b_arr = _finite(b, "B")
  if curve.is_linear:
    return _like(b, b_arr / (MU0 * curve.mu_r))
  flat = np.abs(b_arr).ravel()
  h = np.array([_h_of_b_magnitude(curve, float(v)) for v in flat])
  h = np.sign(b_arr) * h.reshape(b_arr.shape)
  return _like(b, h)


def mu_secant(curve: BHCurve, b: ArrayLike) -> ArrayLike:
  """B/H in H/m at flux density b; the initial slope at B = 0."""
  b_arr = _finite(b, "B")
  h = np.asarray(h_of_b(curve, b_arr), dtype=float)
  mu0_init = MU0 * curve.initial_mu_r
  with np.errstate(divide="ignore", invalid="ignore"):
    mu = np.where(b_arr == 0.0, mu0_init, b_arr / np.where(h == 0.0, 1.0, h))
  return _like(b, mu)


def coenergy_density(curve: BHCurve, h: ArrayLike) -> ArrayLike:
  """Integral of B dH from 0 to h, in J/m^3."""
  h_arr = _finite(h, "H")
  if curve.is_linear:
    return _like(h, 0.5 * MU0 * curve.mu_r * h_arr * h_arr)
  x = h_arr / curve.h_knee
  w = 0.5 * MU0 * h_arr * h_arr + curve.saturation_scale * (
      h_arr * np.arctan(x) - 0.5 * curve.h_knee * np.log1p(x * x)
  )
  return _like(h, w)


def energy_density(curve: BHCurve, h: ArrayLike) -> ArrayLike:
  """Integral of H dB up to the state at h, in J/m^3."""
  h_arr = _finite(h, "H")
  b = np.asarray(b_of_h(curve, h_arr))
  w_co = np.asarray(coenergy_density(curve, h_arr))
  return _like(h, h_arr * b - w_co)

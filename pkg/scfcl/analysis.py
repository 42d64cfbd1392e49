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

"""Closed-form limiter design formulas.

These are the hand calculations a limiter designer starts from: the
asymmetric fault current of an R-L line, time constants with a resistive or
inductive limiter, the parallel LC impedance, lumped core inductances,
saturation margins, induced bias-winding voltage, auxiliary winding sizing
and the inductive limiter's bias and inductance estimates. They double as
oracles for the transient simulator tests.

All voltages are peak values.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Tuple, Union

import numpy as np

from scfcl import material
from scfcl.core import exceptions

__all__ = [
    "LineParams",
    "SaturationMargin",
    "DcBias",
    "fault_current",
    "prospective_amplitude",
    "first_peak",
    "worst_first_peak",
    "time_constants",
    "resonant_impedance",
    "inductances",
    "saturation_margin",
    "induced_dc_overvoltage",
    "aux_turns",
    "inductive_dc_bias",
    "inductive_fcl_inductances",
]

RESONANCE_TOL = 1e-9

ArrayLike = Union[float, np.ndarray]


def _check(name: str, value: float, *, allow_zero: bool = False) -> float:
  value = float(value)
  ok = value >= 0 if allow_zero else value > 0
  if not (math.isfinite(value) and ok):
    bound = ">= 0" if allow_zero else "> 0"
    raise exceptions.InputError(
        f"{name} must be finite and {bound}, got {value}"
    )
  return value


@dataclasses.dataclass(frozen=True)
class LineParams:
  """Source and series line impedance seen by the fault.

  Attributes:
    u_peak: Source peak voltage in volts.
    omega: Angular frequency in rad/s.
    r_line: Line resistance in ohm.
    l_line: Line inductance in henry.
  """

  u_peak: float
  omega: float
  r_line: float
  l_line: float

  def __post_init__(self):
    _check("u_peak", self.u_peak, allow_zero=True)
    _check("omega", self.omega)
    _check("r_line", self.r_line)
    _check("l_line", self.l_line, allow_zero=True)

  @classmethod
  def from_frequency(
      cls, u_peak: float, frequency: float, r_line: float, l_line: float
  ) -> LineParams:
    return cls(u_peak, 2.0 * math.pi * frequency, r_line, l_line)

  @property
  def reactance(self) -> float:
    return self.omega * self.l_line

  @property
  def phi(self) -> float:
    """Impedance angle atan(omega*L/R) in radians."""
    return math.atan2(self.reactance, self.r_line)

  @property
  def z_mag(self) -> float:
    return math.hypot(self.r_line, self.reactance)

  @property
  def tau(self) -> float:
    return self.l_line / self.r_line


def prospective_amplitude(line: LineParams) -> float:
  """Steady fault current amplitude U_peak/|Z_L| in amperes."""
  return line.u_peak / line.z_mag


def fault_current(
    line: LineParams,
    i_l_tf: float,
    t_f: float,
    tau: float,
    t: ArrayLike,
    *,
    literal: bool = False,
) -> ArrayLike:
  """Fault current of an R-L line after inception at t_f.

  i(t) = I_p sin(wt - phi) + (i_l_tf - I_p sin(w t_f - phi)) exp(-(t-t_f)/tau)

  Args:
    line: Source and line.
    i_l_tf: Line current at the inception instant.
    t_f: Inception time in seconds.
    tau: Decay time constant in seconds.
    t: Evaluation time(s), each >= t_f.
    literal: Use the variant that repeats the running sinusoid inside the
      decaying bracket, (i_l_tf - I_p sin(wt - phi)), for comparison. It does
      not tend to the inception-time offset and is not the physical solution.

  Returns:
    Current in amperes, same shape as t.

  Raises:
    InputError: t before t_f or tau not positive.
  """
  _check("tau", tau)
  t_arr = np.asarray(t, dtype=float)
  if np.any(t_arr < t_f) or not np.all(np.isfinite(t_arr)):
    raise exceptions.InputError("fault_current is defined for t >= t_f only.")
  amp = prospective_amplitude(line)
  steady = amp * np.sin(line.omega * t_arr - line.phi)
  if literal:
    offset = i_l_tf - steady
  else:
    offset = i_l_tf - amp * math.sin(line.omega * t_f - line.phi)
  i = steady + offset * np.exp(-(t_arr - t_f) / tau)
  if np.ndim(t) == 0:
    return float(i)
  return i


def first_peak(
    line: LineParams,
    tau: float,
    inception_angle: float,
    *,
    i_l_tf: float = 0.0,
    samples_per_cycle: int = 4000,
) -> float:
  """Largest |i| during the first cycle after inception at source phase angle.

  Inception happens at t_f = inception_angle/omega.
  """
  t_f = (inception_angle % (2.0 * math.pi)) / line.omega
  period = 2.0 * math.pi / line.omega
  t = t_f + np.linspace(0.0, period, samples_per_cycle + 1)
  i = fault_current(line, i_l_tf, t_f, tau, t)
  return float(np.max(np.abs(i)))


def worst_first_peak(
    line: LineParams, tau: float, n_angles: int = 360
) -> Tuple[float, float]:
  """Scans inception angles over [0, 2*pi).

  Returns:
    (worst inception angle in radians, its first peak in amperes).
  """
  angles = np.linspace(0.0, 2.0 * math.pi, n_angles, endpoint=False)
  peaks = [first_peak(line, tau, a) for a in angles]
  k = int(np.argmax(peaks))
  return float(angles[k]), float(peaks[k])


def time_constants(
    r_line: float, l_line: float, r_fcl: float = 0.0, l_fcl: float = 0.0
) -> Tuple[float, float]:
  """Fault time constants with a resistive and with an inductive limiter.

  Returns:
    (L_L/(R_L + R_FCL), (L_L + L_FCL)/R_L) in seconds.
  """
  r_line = _check("r_line", r_line)
  l_line = _check("l_line", l_line, allow_zero=True)
  r_fcl = _check("r_fcl", r_fcl, allow_zero=True)
  l_fcl = _check("l_fcl", l_fcl, allow_zero=True)
  return l_line / (r_line + r_fcl), (l_line + l_fcl) / r_line


def resonant_impedance(omega: float, l_fcl: float, c_fcl: float) -> float:
  """Signed reactance omega*L/(1 - omega^2*L*C) of a parallel LC in ohm.

  Raises:
    ResonanceError: |1 - omega^2 L C| below 1e-9.
  """
  omega = _check("omega", omega)
  l_fcl = _check("l_fcl", l_fcl)
  c_fcl = _check("c_fcl", c_fcl, allow_zero=True)
  denominator = 1.0 - omega * omega * l_fcl * c_fcl
  if abs(denominator) < RESONANCE_TOL:
    raise exceptions.ResonanceError(
        f"Parallel LC is resonant at omega={omega} (1 - w^2LC ="
        f" {denominator:.3g})"
    )
  return omega * l_fcl / denominator


def inductances(
    n_turns: float, area: float, l_mean: float, mu_r: float, mu_r_sat: float
) -> Tuple[float, float]:
  """Unsaturated and saturated core inductances mu0*mu_r*N^2*A/l."""
  n_turns = _check("n_turns", n_turns)
  base = material.MU0 * n_turns * n_turns * _check("area", area) / _check(
      "l_mean", l_mean
  )
  return base * _check("mu_r", mu_r), base * _check("mu_r_sat", mu_r_sat)


@dataclasses.dataclass(frozen=True)
class SaturationMargin:
  """Safe-zone check of a bias design.

  Attributes:
    satisfied: Normal ac peaks leave the core saturated.
    h_s: Safe zone width in A/m; negative when violated.
  """

  satisfied: bool
  h_s: float


def saturation_margin(
    n_dc: float,
    i_dc: float,
    n_ac: float,
    i_l_max: float,
    h_sat: float,
    l_mean: float,
) -> SaturationMargin:
  """Whether the bias MMF exceeds the ac peak MMF plus H_sat*l."""
  n_dc = _check("n_dc", n_dc)
  i_dc = _check("i_dc", i_dc, allow_zero=True)
  n_ac = _check("n_ac", n_ac)
  i_l_max = _check("i_l_max", i_l_max, allow_zero=True)
  h_sat = _check("h_sat", h_sat, allow_zero=True)
  l_mean = _check("l_mean", l_mean)
  excess = n_dc * i_dc - n_ac * i_l_max
  return SaturationMargin(
      satisfied=excess > h_sat * l_mean, h_s=excess / l_mean - h_sat
  )


def induced_dc_overvoltage(n_dc: float, n_ac: float, u_l_peak: float) -> float:
  """Transformer-ratio bound (N_dc/N_ac)*U_L on the bias winding voltage."""
  return (
      _check("n_dc", n_dc)
      / _check("n_ac", n_ac)
      * _check("u_l_peak", u_l_peak, allow_zero=True)
  )


def aux_turns(n_ac: float, i_l: float, i_dc: float) -> int:
  """Auxiliary winding turns ceil(N_ac*I_L/I_dc)."""
  n_ac = _check("n_ac", n_ac)
  i_l = _check("i_l", i_l, allow_zero=True)
  i_dc = _check("i_dc", i_dc)
  # Absorbs float noise such as 76.00000000000001.
  return int(math.ceil(n_ac * i_l / i_dc - 1e-9))


@dataclasses.dataclass(frozen=True)
class DcBias:
  """Bias flux densities of the inductive limiter, in tesla."""

  b_mid: float
  b_outer: float


def inductive_dc_bias(
    mu_sat: float,
    n_dc: float,
    i_dc: float,
    l_mean_outer: float,
    b_sat: float,
    h_sat: float,
) -> DcBias:
  """Bias state of the inductive limiter.

  The outer-leg density follows the straight saturated branch of a
  piecewise-linear B-H curve through (H_sat, B_sat) with slope mu_sat (an
  absolute permeability, H/m). The middle leg carries no bias flux, whatever
  the gap length.
  """
  mu_sat = _check("mu_sat", mu_sat)
  h_dc = _check("n_dc", n_dc) * _check("i_dc", i_dc, allow_zero=True) / _check(
      "l_mean_outer", l_mean_outer
  )
  b_sat = _check("b_sat", b_sat)
  h_sat = _check("h_sat", h_sat, allow_zero=True)
  return DcBias(b_mid=0.0, b_outer=mu_sat * h_dc + (b_sat - mu_sat * h_sat))


def inductive_fcl_inductances(
    n_ac: float, area_outer: float, l_mean_outer: float, l_gap: float
) -> Tuple[float, float]:
  """Inductive limiter ac inductance at full bias and desaturated.

  Returns:
    (L_sat, L_lin) with L_sat = mu0 N^2 A/(l_outer + l_gap) and
    L_lin = mu0 N^2 2A/l_gap, in henry.
  """
  n2 = _check("n_ac", n_ac) ** 2
  area = _check("area_outer", area_outer)
  l_gap = _check("l_gap", l_gap)
  l_outer = _check("l_mean_outer", l_mean_outer)
  l_sat = material.MU0 * n2 * area / (l_outer + l_gap)
  l_lin = material.MU0 * n2 * 2.0 * area / l_gap
  return l_sat, l_lin

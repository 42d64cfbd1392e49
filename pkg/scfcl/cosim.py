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

"""Transient co-simulation of a limiter in a single-phase line.

The electrical side is a set of KVL loops, each threading some windings:

  ac line:   u(t) = (R_L + R_eff(t) + sum r_ac) i + L_L di/dt + dLambda_ac/dt
  dc bias:   V_dc = (R_dc + sum R_w) i_dc + dLambda_dc/dt   (voltage mode)
  shorted:   0    = R_s i_s + dLambda_s/dt

where Lambda is the summed flux linkage of the loop's windings. An ideal dc
current source instead fixes the bias winding currents. Each time step the
loop currents and the magnetic nodal potentials are solved together by one
Newton iteration over the theta-method residual

  L_ext (I1 - I0) + (Lambda1 - Lambda0)
      - h [theta (e1 - R I1) + (1 - theta) (e0 - R I0)] = 0
  A Phi(P1, I1) = 0

(theta = 1 backward Euler, 1/2 trapezoidal). Steps that fail to converge are
retried as 2, 4, ... 2^k substeps.

The second half of the module reduces waveforms to metrics.
"""

from __future__ import annotations

import dataclasses
import math
from typing import List, Optional, Sequence, Tuple, Union

from absl import logging
import numpy as np
import scipy.linalg

from scfcl import analysis
from scfcl import material as material_lib
from scfcl import mec
from scfcl import topology
from scfcl.core import data
from scfcl.core import debug_utils
from scfcl.core import exceptions
from scfcl.core import types

__all__ = [
    "FaultSpec",
    "DcSide",
    "FclSpec",
    "CircuitScenario",
    "SimConfig",
    "EnergyBalance",
    "run",
    "fundamental_amplitude",
    "measure_induced_dc_voltage",
    "extract_metrics",
    "energy_balance",
    "desaturation_sequence",
]

_DC_ROLES = (types.WindingRole.DC_SOURCE, types.WindingRole.DC_AUXILIARY)


@dataclasses.dataclass(frozen=True)
class FaultSpec:
  """Single-phase-to-ground fault at the load bus.

  Attributes:
    t_fault_s: Inception time.
    r_fault_ohm: Fault resistance replacing the load while the fault lasts.
    t_clear_s: Clearing time; None means the fault is never cleared.
  """

  t_fault_s: float = 0.023
  r_fault_ohm: float = 1e-4
  t_clear_s: Optional[float] = None

  def __post_init__(self):
    if not (math.isfinite(self.t_fault_s) and self.t_fault_s >= 0):
      raise exceptions.ConfigError(
          f"fault.t_fault_s must be >= 0, got {self.t_fault_s}",
          key="t_fault_s",
      )
    if not (math.isfinite(self.r_fault_ohm) and self.r_fault_ohm >= 0):
      raise exceptions.ConfigError(
          f"fault.r_fault_ohm must be >= 0, got {self.r_fault_ohm}",
          key="r_fault_ohm",
      )
    if self.t_clear_s is not None and not self.t_clear_s > self.t_fault_s:
      raise exceptions.ConfigError(
          "fault.t_clear_s must come after t_fault_s", key="t_clear_s"
      )


@dataclasses.dataclass(frozen=True)
class DcSide:
  """Bias source of the limiter.

  Attributes:
    mode: Ideal current source or voltage source behind a resistance.
    v_dc_v: Source emf in voltage mode; None sets it so that the steady bias
      current equals the windings' i_dc_a.
    r_dc_ohm: Internal resistance of the voltage source.
    active_trip: Switch the bias off at fault inception.
  """

  mode: types.DcMode = types.DcMode.IDEAL_CURRENT
  v_dc_v: Optional[float] = None
  r_dc_ohm: float = 1.0
  active_trip: bool = False

  def __post_init__(self):
    if not isinstance(self.mode, types.DcMode):
      object.__setattr__(self, "mode", types.DcMode(self.mode))
    if not (math.isfinite(self.r_dc_ohm) and self.r_dc_ohm > 0):
      raise exceptions.ConfigError(
          f"dc.r_dc_ohm must be > 0, got {self.r_dc_ohm}", key="r_dc_ohm"
      )


@dataclasses.dataclass(frozen=True)
class FclSpec:
  """Which limiter sits in the line and how it is built."""

  model: types.ScfclModel = types.ScfclModel.NONE
  geometry: topology.GeometrySpec = dataclasses.field(
      default_factory=topology.GeometrySpec
  )
  windings: topology.WindingSpec = dataclasses.field(
      default_factory=topology.WindingSpec
  )
  material: material_lib.BHCurve = material_lib.DEFAULT_SOFT_IRON
  cores_per_phase: Optional[int] = None
  override_cores: bool = False

  def __post_init__(self):
    if not isinstance(self.model, types.ScfclModel):
      object.__setattr__(self, "model", types.ScfclModel(self.model))

  def build(self) -> topology.FclAssembly:
    return topology.build(
        self.model,
        self.geometry,
        self.windings,
        self.material,
        self.cores_per_phase,
        override_cores=self.override_cores,
    )


@dataclasses.dataclass(frozen=True)
class CircuitScenario:
  """Source, line, load, fault and limiter of one run.

  Attributes:
    name: Scenario name used for output files.
    u_peak_v: Source peak voltage.
    frequency_hz: System frequency.
    phase_rad: Source phase at t = 0 (inception angle sweeps move it).
    r_line_ohm: Line resistance R_L.
    l_line_h: Line inductance L_L.
    z_load_ohm: Resistive load.
    fault: Fault event; None for a normal-operation run.
    dc: Bias source.
    fcl: Limiter in the line.
  """

  name: str = "scenario"
  u_peak_v: float = 14142.1
  frequency_hz: float = 50.0
  phase_rad: float = 0.0
  r_line_ohm: float = 0.1095
  l_line_h: float = 5.63419e-4
  z_load_ohm: float = 8.79
  fault: Optional[FaultSpec] = None
  dc: DcSide = dataclasses.field(default_factory=DcSide)
  fcl: FclSpec = dataclasses.field(default_factory=FclSpec)

  def __post_init__(self):
    for key in ("u_peak_v", "frequency_hz", "r_line_ohm", "z_load_ohm"):
      value = getattr(self, key)
      if not (math.isfinite(value) and value > 0):
        raise exceptions.ConfigError(f"{key} must be > 0, got {value}", key=key)
    if not (math.isfinite(self.l_line_h) and self.l_line_h >= 0):
      raise exceptions.ConfigError(
          f"l_line_h must be >= 0, got {self.l_line_h}", key="l_line_h"
      )
    if not math.isfinite(self.phase_rad):
      raise exceptions.ConfigError("phase_rad must be finite", key="phase_rad")

  @classmethod
  def from_rms(cls, u_rms_v: float, **kwargs) -> CircuitScenario:
    """Scenario whose configured supply value is an rms voltage."""
    return cls(u_peak_v=math.sqrt(2.0) * u_rms_v, **kwargs)

  @property
  def omega(self) -> float:
    return 2.0 * math.pi * self.frequency_hz

  @property
  def period(self) -> float:
    return 1.0 / self.frequency_hz

  @property
  def fault_line(self) -> analysis.LineParams:
    """Source and line as the fault sees them (load bypassed)."""
    return analysis.LineParams(
        self.u_peak_v, self.omega, self.r_line_ohm, self.l_line_h
    )

  @property
  def normal_line(self) -> analysis.LineParams:
    return analysis.LineParams(
        self.u_peak_v,
        self.omega,
        self.r_line_ohm + self.z_load_ohm,
        self.l_line_h,
    )

  def without_fcl(self) -> CircuitScenario:
    """Same circuit with the limiter removed."""
    return dataclasses.replace(self, fcl=FclSpec())


@dataclasses.dataclass(frozen=True)
class SimConfig:
  """Time stepping and Newton settings.

  Attributes:
    dt_s: Time step.
    t_end_s: Simulated horizon.
    integrator: Backward Euler or trapezoidal.
    newton_tol: Relative convergence threshold of every residual row.
    max_iter: Newton iterations per step.
    decimation: Keep every n-th step in the output.
    max_halvings: Local dt halvings tried before a step is abandoned.
  """

  dt_s: float = 1e-5
  t_end_s: float = 0.1
  integrator: types.Integrator = types.Integrator.TRAPEZOIDAL
  newton_tol: float = mec.DEFAULT_TOL
  max_iter: int = mec.DEFAULT_MAX_ITER
  decimation: int = 1
  max_halvings: int = 6

  def __post_init__(self):
    if not isinstance(self.integrator, types.Integrator):
      object.__setattr__(self, "integrator", types.Integrator(self.integrator))
    if not (math.isfinite(self.dt_s) and self.dt_s > 0):
      raise exceptions.ConfigError(f"dt_s must be > 0, got {self.dt_s}",
                                   key="dt_s")
    if not (math.isfinite(self.t_end_s) and self.t_end_s > 0):
      raise exceptions.ConfigError(
          f"t_end_s must be > 0, got {self.t_end_s}", key="t_end_s"
      )
    if not self.newton_tol > 0:
      raise exceptions.ConfigError("newton_tol must be > 0", key="newton_tol")
    for key in ("max_iter", "decimation"):
      if getattr(self, key) < 1:
        raise exceptions.ConfigError(f"{key} must be >= 1", key=key)
    if self.max_halvings < 0:
      raise exceptions.ConfigError(
          "max_halvings must be >= 0", key="max_halvings"
      )

  @property
  def n_steps(self) -> int:
    return int(math.floor(self.t_end_s / self.dt_s + 1e-9))

  @property
  def n_samples(self) -> int:
    return self.n_steps // self.decimation + 1


@dataclasses.dataclass
class _State:
  """Solution at one time level."""

  t: float
  potentials: np.ndarray
  loop_currents: np.ndarray
  winding_currents: np.ndarray
  branch: mec.BranchState
  linkage: np.ndarray


class _CoupledSystem:
  """Loop structure and Newton solver of one run.

  Mutable counters live here; an instance belongs to a single run.
  """

  def __init__(
      self,
      scenario: CircuitScenario,
      sim: SimConfig,
      assembly: topology.FclAssembly,
  ):
    self.scenario = scenario
    self.sim = sim
    self.kernel = assembly.kernel()
    self.theta = sim.integrator.theta
    windings = self.kernel.windings
    n_w = len(windings)
    self.voltage_mode = scenario.dc.mode is types.DcMode.VOLTAGE_SOURCE

    ac = [m for m, w in enumerate(windings)
          if w.role is types.WindingRole.AC_SERIES]
    dc = [m for m, w in enumerate(windings) if w.role in _DC_ROLES]
    shorted = [m for m, w in enumerate(windings)
               if w.role is types.WindingRole.SHORTED]
    self.dc_windings = dc
    self.shorted_windings = shorted
    self.i_dc = assembly.windings_spec.i_dc_a if dc else 0.0

    loops: List[Tuple[str, List[int], float, float]] = []
    r_ac = sum(windings[m].resistance_ohm for m in ac)
    loops.append(("ac", ac, scenario.l_line_h, scenario.r_line_ohm + r_ac))
    self.dc_loop: Optional[int] = None
    r_dc_total = scenario.dc.r_dc_ohm + sum(
        windings[m].resistance_ohm for m in dc
    )
    if dc and self.voltage_mode:
      self.dc_loop = len(loops)
      loops.append(("dc", dc, 0.0, r_dc_total))
    for m in shorted:
      loops.append((windings[m].id, [m], 0.0, windings[m].resistance_ohm))
    self.loop_names = [name for name, _, _, _ in loops]

    self.loop_matrix = np.zeros((n_w, len(loops)))
    for k, (_, members, _, _) in enumerate(loops):
      self.loop_matrix[members, k] = 1.0
    self.l_ext = np.array([l for _, _, l, _ in loops])
    self.r_base = np.array([r for _, _, _, r in loops])
    self.coupling = self.kernel.winding_matrix @ self.loop_matrix

    if scenario.dc.v_dc_v is None:
      self.v_dc = self.i_dc * r_dc_total
    else:
      self.v_dc = scenario.dc.v_dc_v
    self.fixed_mask = np.zeros(n_w)
    if not self.voltage_mode:
      self.fixed_mask[dc] = 1.0

    self.iterations = 0
    self.max_step_iterations = 0
    self.substepped = 0
    self.max_flux_ratio = 0.0

  @property
  def n_loops(self) -> int:
    return len(self.loop_names)

  def resistance(self, faulted: bool) -> np.ndarray:
    r = self.r_base.copy()
    fault = self.scenario.fault
    r[0] += fault.r_fault_ohm if faulted else self.scenario.z_load_ohm
    return r

  def sources(self, t: float, tripped: bool) -> np.ndarray:
    e = np.zeros(self.n_loops)
    s = self.scenario
    e[0] = s.u_peak_v * math.sin(s.omega * t + s.phase_rad)
    if self.dc_loop is not None and not tripped:
      e[self.dc_loop] = self.v_dc
    return e

  def fixed_currents(self, tripped: bool) -> np.ndarray:
    return self.fixed_mask * (0.0 if tripped else self.i_dc)

  def initial_state(self) -> _State:
    i = np.zeros(self.n_loops)
    if self.dc_loop is not None:
      i[self.dc_loop] = self.v_dc / self.r_base[self.dc_loop]
    iw = self.loop_matrix @ i + self.fixed_currents(False)
    try:
      p, st, _, ratio = self.kernel.newton(
          iw, tol=self.sim.newton_tol, max_iter=self.sim.max_iter
      )
    except exceptions.NonConvergenceError as e:
      raise exceptions.NonConvergenceError(
          f"Initial magnetic state did not converge: {e}",
          residual_history=e.residual_history,
          time_s=0.0,
      ) from e
    self.max_flux_ratio = max(self.max_flux_ratio, ratio)
    return _State(0.0, p, i, iw, st, self.coupling.T @ st.flux)

  def _jacobian(self, st: mec.BranchState, loop_diag: np.ndarray):
    g = st.conductance
    ag = self.kernel.incidence * g
    j_pp = ag @ self.kernel.incidence.T
    j_pi = ag @ self.coupling
    j_ii = np.diag(loop_diag) + self.coupling.T @ (g[:, None] * self.coupling)
    return np.block([[j_pp, j_pi], [j_pi.T, j_ii]])

  def step(
      self,
      s0: _State,
      t1: float,
      h: float,
      faulted: Tuple[bool, bool],
      tripped: bool,
  ) -> _State:
    """One theta-method step from s0 to t1; raises SolverError on failure.

    faulted holds the fault state at s0.t and at t1, so the explicit part
    of the step sees the network that was in place at s0.t.
    """
    kernel = self.kernel
    theta = self.theta
    tol = self.sim.newton_tol
    r0 = self.resistance(faulted[0])
    r = self.resistance(faulted[1])
    e0 = self.sources(s0.t, tripped)
    e1 = self.sources(t1, tripped)
    fixed = self.fixed_currents(tripped)
    known = (
        s0.linkage
        + self.l_ext * s0.loop_currents
        + h * (1.0 - theta) * (e0 - r0 * s0.loop_currents)
        + h * theta * e1
    )
    loop_diag = self.l_ext + h * theta * r
    n_p = kernel.n_nodes

    def evaluate(p, i):
      iw = self.loop_matrix @ i + fixed
      st = kernel.evaluate(p, iw)
      lam = self.coupling.T @ st.flux
      f = np.concatenate(
          [kernel.flux_residual(st), loop_diag * i + lam - known]
      )
      return iw, st, lam, f

    def loop_scale(i, lam):
      return np.maximum.reduce([
          h * np.abs(e0),
          h * np.abs(e1),
          h * np.maximum(r, r0) * np.abs(i),
          np.abs(self.l_ext * i),
          1e-4 * np.abs(lam),
          np.full(self.n_loops, 1e-12),
      ])

    p = s0.potentials.copy()
    i = s0.loop_currents.copy()
    iw, st, lam, f = evaluate(p, i)
    weights = None
    history: List[float] = []
    for iteration in range(self.sim.max_iter + 1):
      flux_ratio = kernel.flux_residual_ratio(st)
      loop_ratio = float(np.max(np.abs(f[n_p:]) / loop_scale(i, lam)))
      history.append(max(flux_ratio, loop_ratio))
      if history[-1] <= tol:
        self.iterations += iteration
        self.max_step_iterations = max(self.max_step_iterations, iteration)
        self.max_flux_ratio = max(self.max_flux_ratio, flux_ratio)
        return _State(t1, p, i, iw, st, lam)
      if iteration == self.sim.max_iter:
        break
      if weights is None:
        flux_scale = max(
            float(np.max(np.abs(st.flux), initial=0.0)), mec.FLUX_FLOOR
        )
        weights = np.concatenate(
            [np.full(n_p, 1.0 / flux_scale), 1.0 / loop_scale(i, lam)]
        )
      kernel.check_conductance(st)
      jac = self._jacobian(st, loop_diag)
      diag = np.abs(np.diag(jac))
      d = 1.0 / np.sqrt(np.where(diag > 0, diag, 1.0))
      try:
        y = scipy.linalg.solve(jac * d[:, None] * d[None, :], -d * f)
      except (np.linalg.LinAlgError, ValueError) as e:
        raise kernel.singular_error(st) from e
      dx = d * y

      merit = np.linalg.norm(weights * f)
      step = 1.0
      for _ in range(mec.MAX_HALVINGS + 1):
        p_try = p + step * dx[:n_p]
        i_try = i + step * dx[n_p:]
        try:
          trial = evaluate(p_try, i_try)
        except exceptions.InputError:
          trial = None
        if trial is not None and np.linalg.norm(weights * trial[3]) < merit:
          p, i = p_try, i_try
          iw, st, lam, f = trial
          break
        step *= 0.5
      else:
        raise exceptions.NonConvergenceError(
            f"Coupled Newton damping exhausted at t={t1:.6g}s",
            residual_history=history,
            time_s=t1,
        )
    raise exceptions.NonConvergenceError(
        f"Coupled Newton did not converge at t={t1:.6g}s",
        residual_history=history,
        time_s=t1,
    )

  def advance(
      self,
      s0: _State,
      dt: float,
      faulted: Tuple[bool, bool],
      tripped: bool,
  ) -> _State:
    """Steps dt, falling back to 2^k equal substeps."""
    try:
      return self.step(s0, s0.t + dt, dt, faulted, tripped)
    except exceptions.SolverError as e:
      last = e
    for k in range(1, self.sim.max_halvings + 1):
      m = 2**k
      s = s0
      try:
        for j in range(m):
          ends = faulted if j == 0 else (faulted[1], faulted[1])
          s = self.step(s, s0.t + dt * (j + 1) / m, dt / m, ends, tripped)
      except exceptions.SolverError as e:
        last = e
        continue
      self.substepped += 1
      logging.debug("Step at t=%.6g s needed %d substeps", s0.t, m)
      return s
    raise exceptions.NonConvergenceError(
        f"Step at t={s0.t:.6g}s failed after {self.sim.max_halvings} dt"
        f" halvings: {last}",
        residual_history=getattr(last, "residual_history", None),
        time_s=s0.t,
    ) from last


def _fault_steps(
    scenario: CircuitScenario, sim: SimConfig
) -> Tuple[Optional[int], Optional[int]]:
  fault = scenario.fault
  if fault is None:
    return None, None
  n_fault = int(round(fault.t_fault_s / sim.dt_s))
  n_clear = None
  if fault.t_clear_s is not None:
    n_clear = int(round(fault.t_clear_s / sim.dt_s))
  return n_fault, n_clear


@debug_utils.debug_log_calls
def run(
    scenario: CircuitScenario,
    sim: Optional[SimConfig] = None,
    assembly: Optional[topology.FclAssembly] = None,
) -> data.TimeSeries:
  """Integrates the coupled line and limiter.

  Args:
    scenario: Circuit, fault and limiter description.
    sim: Time stepping settings; SimConfig() when omitted.
    assembly: Prebuilt magnetic side; built from scenario.fcl when omitted.

  Returns:
    The sampled TimeSeries, starting from the pre-energized limiter at t = 0.

  Raises:
    ConfigError: dt not below a twentieth of the period.
    NonConvergenceError: A step failed after all dt halvings.
  """
  sim = sim or SimConfig()
  if not sim.dt_s < scenario.period / 20:
    raise exceptions.ConfigError(
        f"dt_s={sim.dt_s} must be below 1/(20 f)={scenario.period / 20:.3g}",
        key="dt_s",
    )
  if assembly is None:
    assembly = scenario.fcl.build()
  system = _CoupledSystem(scenario, sim, assembly)
  kernel = system.kernel
  n_steps = sim.n_steps
  n_fault, n_clear = _fault_steps(scenario, sim)
  if n_fault is not None and n_fault >= n_steps:
    logging.warning(
        "Fault at %.6g s lies beyond t_end; running without fault.",
        scenario.fault.t_fault_s,
    )
    n_fault = n_clear = None
  logging.info(
      "Running %s: model %s, %d steps of %.3g s (%s)",
      scenario.name,
      assembly.model.value,
      n_steps,
      sim.dt_s,
      sim.integrator.value,
  )

  n_out = sim.n_samples
  dc_sel = np.zeros(kernel.n_windings)
  dc_sel[system.dc_windings] = 1.0
  dc_r = np.array([w.resistance_ohm for w in kernel.windings]) * dc_sel
  out = {
      key: np.zeros(n_out)
      for key in ("time", "i_line", "v_fcl", "v_dc", "i_dc")
  }
  b_out = np.zeros((n_out, kernel.n_branches))
  h_out = np.zeros((n_out, kernel.n_branches))
  lam_out = np.zeros((n_out, kernel.n_windings))
  iw_out = np.zeros((n_out, kernel.n_windings))

  state = system.initial_state()
  was_faulted = False
  prev_ac = state.linkage[0]
  prev_dc = float(dc_sel @ kernel.flux_linkages(state.branch))

  def record(row: int, s: _State, v_fcl: float, dlam_dc: float) -> None:
    out["time"][row] = s.t
    out["i_line"][row] = s.loop_currents[0]
    out["v_fcl"][row] = v_fcl
    out["v_dc"][row] = float(dc_r @ s.winding_currents) + dlam_dc
    out["i_dc"][row] = (
        s.winding_currents[system.dc_windings[0]] if system.dc_windings else 0.0
    )
    b_out[row] = s.branch.b
    h_out[row] = s.branch.h
    lam_out[row] = kernel.flux_linkages(s.branch)
    iw_out[row] = s.winding_currents

  record(0, state, 0.0, 0.0)
  dt = sim.dt_s
  for n in range(n_steps):
    faulted = n_fault is not None and n >= n_fault and (
        n_clear is None or n < n_clear
    )
    tripped = (
        scenario.dc.active_trip and n_fault is not None and n >= n_fault
    )
    state = system.advance(state, dt, (was_faulted, faulted), tripped)
    was_faulted = faulted
    # Grid time, not accumulated sums of dt.
    state.t = (n + 1) * dt
    lam_dc = float(dc_sel @ kernel.flux_linkages(state.branch))
    v_fcl = (state.linkage[0] - prev_ac) / dt
    dlam_dc = (lam_dc - prev_dc) / dt
    prev_ac, prev_dc = state.linkage[0], lam_dc
    if (n + 1) % sim.decimation == 0:
      record((n + 1) // sim.decimation, state, v_fcl, dlam_dc)

  stats = data.SolverStats(
      steps=n_steps,
      newton_iterations=system.iterations,
      max_step_iterations=system.max_step_iterations,
      substepped_steps=system.substepped,
      max_flux_residual_ratio=system.max_flux_ratio,
  )
  logging.info(
      "Finished %s: %d Newton iterations, %d substepped steps",
      scenario.name,
      stats.newton_iterations,
      stats.substepped_steps,
  )
  windings = kernel.windings
  return data.TimeSeries(
      time=out["time"],
      i_line=out["i_line"],
      v_fcl=out["v_fcl"],
      v_dc=out["v_dc"],
      i_dc=out["i_dc"],
      i_shorted={
          windings[m].id: iw_out[:, m] for m in system.shorted_windings
      },
      b={bid: b_out[:, j] for j, bid in enumerate(kernel.branch_ids)},
      h={bid: h_out[:, j] for j, bid in enumerate(kernel.branch_ids)},
      flux_linkage={w.id: lam_out[:, m] for m, w in enumerate(windings)},
      winding_current={w.id: iw_out[:, m] for m, w in enumerate(windings)},
      frequency=scenario.frequency_hz,
      t_fault=None if n_fault is None else scenario.fault.t_fault_s,
      t_clear=(
          None
          if n_fault is None or n_clear is None
          else scenario.fault.t_clear_s
      ),
      stats=stats,
  )


def _samples_per_period(ts: data.TimeSeries) -> int:
  if ts.dt <= 0:
    raise exceptions.MetricsError("A single sample has no period.")
  return max(int(round(ts.period / ts.dt)), 1)


def fundamental_amplitude(
    ts: data.TimeSeries,
    t_start: float,
    t_stop: Optional[float] = None,
    signal: Optional[np.ndarray] = None,
) -> float:
  """Amplitude of the system-frequency component over whole cycles.

  Uses the largest whole number of periods that fits in [t_start, t_stop).

  Raises:
    MetricsError: Less than one period available.
  """
  y = ts.i_line if signal is None else np.asarray(signal, dtype=float)
  n_per = _samples_per_period(ts)
  i0 = max(ts.index_at(t_start), 0)
  i1 = len(ts) - 1 if t_stop is None else min(ts.index_at(t_stop), len(ts) - 1)
  cycles = (i1 - i0) // n_per
  if cycles < 1:
    raise exceptions.MetricsError(
        f"Window [{t_start}, {t_stop}] is shorter than one period."
    )
  seg = slice(i0, i0 + cycles * n_per)
  phase = 2.0 * math.pi * ts.frequency * ts.time[seg]
  n = cycles * n_per
  a = 2.0 / n * np.dot(y[seg], np.cos(phase))
  b = 2.0 / n * np.dot(y[seg], np.sin(phase))
  return float(math.hypot(a, b))


def _fault_window(ts: data.TimeSeries) -> Tuple[int, int]:
  if ts.t_fault is None:
    raise exceptions.MetricsError("The run has no fault window.")
  i_f = ts.index_at(ts.t_fault)
  i_end = len(ts) - 1
  if ts.t_clear is not None:
    i_end = min(ts.index_at(ts.t_clear), i_end)
  return i_f, i_end


def measure_induced_dc_voltage(
    ts: data.TimeSeries, scenario: Optional[CircuitScenario] = None
) -> float:
  """Peak |v_dc| of the bias source terminals during the fault window.

  For a perfectly coupled winding pair this approaches
  analysis.induced_dc_overvoltage.

  Raises:
    MetricsError: The run (or the scenario, when given) has no fault.
  """
  if scenario is not None and scenario.fault is None:
    raise exceptions.MetricsError(f"Scenario {scenario.name} has no fault.")
  i_f, i_end = _fault_window(ts)
  return float(np.max(np.abs(ts.v_dc[i_f : i_end + 1])))


def _check_same_grid(ts: data.TimeSeries, baseline: data.TimeSeries) -> None:
  if len(ts) != len(baseline) or not np.allclose(
      ts.time, baseline.time, rtol=0, atol=1e-12
  ):
    raise exceptions.MetricsError(
        "Series and baseline are not on the same time grid."
    )
  if ts.t_fault != baseline.t_fault or ts.frequency != baseline.frequency:
    raise exceptions.MetricsError(
        "Series and baseline differ in fault timing or frequency."
    )


def _normal_amplitude(ts: data.TimeSeries) -> Optional[float]:
  period = ts.period
  if ts.t_fault is None:
    t_stop = float(ts.time[-1])
  else:
    t_stop = ts.t_fault
  if t_stop - float(ts.time[0]) < period - 0.5 * ts.dt:
    return None
  return fundamental_amplitude(ts, t_stop - period, t_stop)


def _steady_fault_amplitude(ts: data.TimeSeries) -> Optional[float]:
  i_f, i_end = _fault_window(ts)
  n_per = _samples_per_period(ts)
  if i_end - i_f < 2 * n_per:
    return None
  t_stop = float(ts.time[i_end])
  return fundamental_amplitude(ts, t_stop - ts.period, t_stop)


def extract_metrics(
    ts: data.TimeSeries,
    baseline: data.TimeSeries,
    *,
    name: str = "",
    model: str = "",
    total_turns: int = 0,
    provenance: Optional[data.Provenance] = None,
) -> data.SummaryReport:
  """Compares a run against the same scenario without the limiter.

  Args:
    ts: Run with the limiter.
    baseline: Run without it, on the same grid and fault timing.
    name: Scenario name for the report.
    model: Limiter model tag for the report.
    total_turns: Winding turns of the limiter.
    provenance: Config hash, version and step size.

  Returns:
    SummaryReport; fault metrics are None for runs without a fault and
    normal-mode metrics are None when less than one pre-fault cycle exists.

  Raises:
    MetricsError: Mismatched grids.
  """
  _check_same_grid(ts, baseline)
  normal = _normal_amplitude(ts)
  normal_base = _normal_amplitude(baseline)
  insertion_drop = None
  if normal is not None and normal_base:
    insertion_drop = 1.0 - normal / normal_base

  first_peak = later_peak = steady = limiting_ratio = None
  if ts.t_fault is not None:
    i_f, i_end = _fault_window(ts)
    n_per = _samples_per_period(ts)
    first_end = min(i_f + n_per, i_end)
    first_peak = float(np.max(np.abs(ts.i_line[i_f : first_end + 1])))
    if i_end > first_end:
      later_peak = float(np.max(np.abs(ts.i_line[first_end + 1 : i_end + 1])))
    steady = _steady_fault_amplitude(ts)
    steady_base = _steady_fault_amplitude(baseline)
    if steady and steady_base is not None:
      limiting_ratio = steady_base / steady
    peak_v_dc = measure_induced_dc_voltage(ts)
  else:
    peak_v_dc = float(np.max(np.abs(ts.v_dc)))

  return data.SummaryReport(
      name=name,
      model=model,
      first_peak_a=first_peak,
      later_peak_a=later_peak,
      steady_fault_amplitude_a=steady,
      normal_amplitude_a=normal,
      limiting_ratio=limiting_ratio,
      insertion_drop=insertion_drop,
      peak_b_t={k: float(np.max(np.abs(v))) for k, v in ts.b.items()},
      peak_v_dc_v=peak_v_dc,
      total_turns=total_turns,
      newton=ts.stats,
      provenance=provenance or data.Provenance(dt=ts.dt),
  )


@dataclasses.dataclass(frozen=True)
class EnergyBalance:
  """Magnetic energy bookkeeping over a window, in joules.

  Attributes:
    energy_in: Sum over windings of the integral of i d(lambda).
    delta_stored: Change of stored magnetic energy.
    drift: |energy_in - delta_stored| / peak_coenergy.
    peak_coenergy: Largest total co-energy in the window.
  """

  energy_in: float
  delta_stored: float
  drift: float
  peak_coenergy: float


def energy_balance(
    ts: data.TimeSeries,
    assembly: Union[topology.FclAssembly, CircuitScenario],
    t_start: float,
    t_stop: Optional[float] = None,
) -> EnergyBalance:
  """Checks that the windings deliver exactly the stored-energy change.

  Copper losses are outside the balance: i d(lambda) is the power crossing
  into the magnetic circuit. Needs an undecimated series.

  Args:
    ts: Series of the run.
    assembly: The run's limiter, or its scenario (the limiter is rebuilt).
    t_start: Window start.
    t_stop: Window end; the last sample when omitted.

  Raises:
    MetricsError: No magnetic circuit or an empty window.
  """
  if isinstance(assembly, CircuitScenario):
    assembly = assembly.fcl.build()
  if assembly.is_empty:
    raise exceptions.MetricsError("No magnetic circuit to balance.")
  i0 = max(ts.index_at(t_start), 0)
  i1 = len(ts) - 1 if t_stop is None else min(ts.index_at(t_stop), len(ts) - 1)
  if i1 <= i0:
    raise exceptions.MetricsError("Energy window is empty.")
  window = slice(i0, i1 + 1)
  energy_in = 0.0
  for w in assembly.windings():
    i = ts.winding_current[w.id][window]
    lam = ts.flux_linkage[w.id][window]
    energy_in += float(np.sum(0.5 * (i[1:] + i[:-1]) * np.diff(lam)))
  stored = np.zeros(i1 - i0 + 1)
  co = np.zeros(i1 - i0 + 1)
  for bid in assembly.branch_ids():
    energy, coenergy = mec.branch_energy(
        assembly.branch(bid), ts.b[bid][window], ts.h[bid][window]
    )
    stored += energy
    co += coenergy
  delta = float(stored[-1] - stored[0])
  peak = float(np.max(np.abs(co)))
  if peak <= 0:
    raise exceptions.MetricsError("No stored co-energy in the window.")
  return EnergyBalance(
      energy_in=energy_in,
      delta_stored=delta,
      drift=abs(energy_in - delta) / peak,
      peak_coenergy=peak,
  )


def desaturation_sequence(
    ts: data.TimeSeries,
    branch_ids: Sequence[str],
    t_start: Optional[float] = None,
) -> List[str]:
  """Which branch desaturates in each half cycle of the line current.

  Half cycles are the windows between successive zero crossings of i_line
  after t_start (default: fault inception, else the start). In each window
  the branch whose |H| gets closest to zero is reported.
  """
  if not branch_ids:
    return []
  if t_start is None:
    t_start = ts.t_fault if ts.t_fault is not None else float(ts.time[0])
  i0 = max(ts.index_at(t_start), 0)
  current = ts.i_line[i0:]
  positive = current >= 0
  crossings = np.flatnonzero(positive[1:] != positive[:-1]) + 1 + i0
  h_abs = np.abs(np.stack([ts.h[b] for b in branch_ids]))
  sequence: List[str] = []
  for start, stop in zip(crossings[:-1], crossings[1:]):
    lowest = np.min(h_abs[:, start:stop], axis=1)
    sequence.append(branch_ids[int(np.argmin(lowest))])
  return sequence

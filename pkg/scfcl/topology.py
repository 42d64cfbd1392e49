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

"""Builders for the stock limiter configurations.

Each model registers a per-core builder with @register. build() calls it once
per core of the phase and qualifies every id as "core<k>.<name>" so that the
cores of one assembly can be compiled into a single NetworkKernel.

Per-core layouts (branches run bottom -> top unless noted):

  B  left core leg (dc winding), middle core leg (ac winding), right gapped
     leg. Two cores per phase, ac windings series-opposed.
  A  B plus an auxiliary dc winding on the middle leg.
  C  A with the main dc winding short-circuited; the auxiliary carries dc.
  D  one core; left and right core legs each carry an ac and a dc winding,
     the middle leg is the gap (area 2*A).
  E  one core; a four-node ring TL/TR/BL/BR with ac legs and gap legs on
     both sides and short-circuited windings on the top and bottom yokes.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable, Dict, List, Mapping, Optional, Tuple

from absl import logging
import numpy as np

from scfcl import material as material_lib
from scfcl import mec
from scfcl.core import exceptions
from scfcl.core import types

__all__ = [
    "GeometrySpec",
    "WindingSpec",
    "FclAssembly",
    "DcBiasReport",
    "InductiveLimits",
    "register",
    "available_models",
    "default_cores_per_phase",
    "build",
    "bias_currents",
    "dc_bias_check",
    "series_inductance",
    "inductive_limits",
]

_DC_ROLES = (types.WindingRole.DC_SOURCE, types.WindingRole.DC_AUXILIARY)

MID_TO_OUTER_LIMIT = 1e-3
GAP_INDEPENDENCE_LIMIT = 1e-6
# Gap MMF of a reversed, saturated ac leg stays below N_dc*I_dc with the
# default windings.
RETURN_AREA_SCALE = 12.0


@dataclasses.dataclass(frozen=True)
class GeometrySpec:
  """Core dimensions shared by every leg unless overridden.

  Attributes:
    l_mean_m: Mean magnetic path length of a leg.
    a_core_m2: Leg cross-section.
    l_gap_m: Air-gap length.
    l_yoke_m: Yoke segment length (Model E only).
    fringing_factor: Divides every gap reluctance.
    return_area_scale: Cross-section of the gapped return leg of Models A to
      C in units of a_core_m2.
    leg_overrides: Leg name -> (length_m, area_m2) replacing the defaults.
  """

  l_mean_m: float = 2.0
  a_core_m2: float = 0.04
  l_gap_m: float = 0.3
  l_yoke_m: float = 2.0
  fringing_factor: float = 1.0
  return_area_scale: float = RETURN_AREA_SCALE
  leg_overrides: Mapping[str, Tuple[float, float]] = dataclasses.field(
      default_factory=dict
  )

  def __post_init__(self):
    for name in ("l_mean_m", "a_core_m2", "l_gap_m", "l_yoke_m",
                 "fringing_factor", "return_area_scale"):
      value = getattr(self, name)
      if not (math.isfinite(value) and value > 0):
        raise exceptions.TopologyError(
            f"geometry.{name} must be > 0, got {value}", key=name
        )
    for leg, (length, area) in self.leg_overrides.items():
      if not (length > 0 and area > 0):
        raise exceptions.TopologyError(
            f"geometry.leg_overrides.{leg} must be positive",
            key=f"leg_overrides.{leg}",
        )

  def leg(self, name: str, length: float, area: float) -> Tuple[float, float]:
    return tuple(self.leg_overrides.get(name, (length, area)))


@dataclasses.dataclass(frozen=True)
class WindingSpec:
  """Turns, bias current and copper of the limiter windings.

  Attributes:
    n_ac: Turns of each ac winding.
    n_dc: Turns of each main dc winding.
    i_dc_a: Bias current.
    n_dc_aux: Turns of the auxiliary dc winding (Models A and C).
    n_shorted: Turns of each short-circuited winding.
    r_shorted_ohm: Resistance of each short-circuited loop.
    r_dc_winding_ohm: Resistance of each dc winding.
    r_ac_winding_ohm: Resistance of each ac winding.
    open_shorted: Build the short-circuited windings open-circuited instead.
  """

  n_ac: int = 60
  n_dc: int = 500
  i_dc_a: float = 450.0
  n_dc_aux: int = 76
  n_shorted: int = 500
  r_shorted_ohm: float = 0.01
  r_dc_winding_ohm: float = 0.1
  r_ac_winding_ohm: float = 0.002
  open_shorted: bool = False

  def __post_init__(self):
    for name in ("n_ac", "n_dc", "n_dc_aux", "n_shorted"):
      value = getattr(self, name)
      if int(value) != value or value < 1:
        raise exceptions.TopologyError(
            f"windings.{name} must be a positive integer, got {value}",
            key=name,
        )
    if not (math.isfinite(self.i_dc_a) and self.i_dc_a >= 0):
      raise exceptions.TopologyError(
          f"windings.i_dc_a must be >= 0, got {self.i_dc_a}", key="i_dc_a"
      )
    if not self.r_shorted_ohm > 0:
      raise exceptions.TopologyError(
          "windings.r_shorted_ohm must be > 0", key="r_shorted_ohm"
      )
    for name in ("r_dc_winding_ohm", "r_ac_winding_ohm"):
      value = getattr(self, name)
      if not (math.isfinite(value) and value >= 0):
        raise exceptions.TopologyError(
            f"windings.{name} must be >= 0, got {value}", key=name
        )

  @property
  def shorted_role(self) -> types.WindingRole:
    if self.open_shorted:
      return types.WindingRole.OPEN
    return types.WindingRole.SHORTED


@dataclasses.dataclass(frozen=True)
class FclAssembly:
  """The magnetic side of one limiter phase.

  Attributes:
    model: Configuration tag.
    cores: Independent magnetic networks, one per core.
    windings_spec: Winding parameters the cores were built from; carries the
      bias current.
  """

  model: types.ScfclModel
  cores: Tuple[mec.MagneticNetwork, ...] = ()
  windings_spec: WindingSpec = dataclasses.field(default_factory=WindingSpec)

  def __post_init__(self):
    object.__setattr__(self, "cores", tuple(self.cores))

  @property
  def is_empty(self) -> bool:
    return not self.cores

  @property
  def roles(self) -> Dict[str, types.WindingRole]:
    return {w.id: w.role for net in self.cores for w in net.windings}

  def windings(
      self, role: Optional[types.WindingRole] = None
  ) -> List[mec.WindingLink]:
    return [
        w
        for net in self.cores
        for w in net.windings
        if role is None or w.role is role
    ]

  def dc_windings(self) -> List[mec.WindingLink]:
    return [w for w in self.windings() if w.role in _DC_ROLES]

  def branch_ids(self) -> List[str]:
    return [b.id for net in self.cores for b in net.branches]

  def branch(self, branch_id: str) -> mec.Branch:
    return self.network_for(branch_id).branch(branch_id)

  def network_for(self, item_id: str) -> mec.MagneticNetwork:
    """The core that owns a branch or winding id."""
    for net in self.cores:
      if any(b.id == item_id for b in net.branches):
        return net
      if any(w.id == item_id for w in net.windings):
        return net
    raise exceptions.TopologyError(f"No core owns id {item_id}", key=item_id)

  @property
  def total_turns(self) -> int:
    return sum(w.turns for w in self.windings())

  def kernel(self) -> mec.NetworkKernel:
    return mec.NetworkKernel(self.cores)


CoreBuilder = Callable[
    [GeometrySpec, WindingSpec, material_lib.BHCurve, str, int],
    mec.MagneticNetwork,
]

_BUILDERS: Dict[types.ScfclModel, CoreBuilder] = {}
_CORES_PER_PHASE: Dict[types.ScfclModel, int] = {}


def register(
    model: types.ScfclModel, *, cores_per_phase: int
) -> Callable[[CoreBuilder], CoreBuilder]:
  """Decorator registering the per-core builder of a model.

  Args:
    model: Configuration the builder produces.
    cores_per_phase: Number of cores a phase uses by default.

  Returns:
    Decorator that records the builder and returns it unchanged.
  """

  def _decorator(fn: CoreBuilder) -> CoreBuilder:
    if model in _BUILDERS:
      logging.debug("Replacing builder for model %s", model.value)
    _BUILDERS[model] = fn
    _CORES_PER_PHASE[model] = cores_per_phase
    return fn

  return _decorator


def available_models() -> List[types.ScfclModel]:
  return [types.ScfclModel.NONE] + list(_BUILDERS)


def default_cores_per_phase(model: types.ScfclModel) -> int:
  if model is types.ScfclModel.NONE:
    return 0
  return _CORES_PER_PHASE[model]


def _core_leg(geom, curve, prefix, name, frm, to, length=None):
  length, area = geom.leg(name, length or geom.l_mean_m, geom.a_core_m2)
  return mec.Branch.core(
      f"{prefix}.{name}", f"{prefix}.{frm}", f"{prefix}.{to}",
      length=length, area=area, curve=curve,
  )


def _gap_leg(geom, prefix, name, frm, to, area_scale=1.0):
  length, area = geom.leg(name, geom.l_gap_m, area_scale * geom.a_core_m2)
  return mec.Branch.gap(
      f"{prefix}.{name}", f"{prefix}.{frm}", f"{prefix}.{to}",
      length=length, area=area, fringing_factor=geom.fringing_factor,
  )


def _three_leg_core(
    geom: GeometrySpec,
    wind: WindingSpec,
    curve: material_lib.BHCurve,
    prefix: str,
    index: int,
    *,
    main_dc_role: types.WindingRole,
    with_aux: bool,
):
  ac_sign = 1 if index % 2 == 0 else -1
  branches = (
      _core_leg(geom, curve, prefix, "left", "bottom", "top"),
      _core_leg(geom, curve, prefix, "middle", "bottom", "top"),
      # Right-leg iron is lumped into the gap branch.
      _gap_leg(geom, prefix, "right", "bottom", "top",
               area_scale=geom.return_area_scale),
  )
  if main_dc_role in (types.WindingRole.SHORTED, types.WindingRole.OPEN):
    main = mec.WindingLink(
        f"{prefix}.dc", f"{prefix}.left", wind.n_shorted, 1, main_dc_role,
        wind.r_shorted_ohm,
    )
  else:
    main = mec.WindingLink(
        f"{prefix}.dc", f"{prefix}.left", wind.n_dc, 1, main_dc_role,
        wind.r_dc_winding_ohm,
    )
  windings = [
      main,
      mec.WindingLink(
          f"{prefix}.ac", f"{prefix}.middle", wind.n_ac, ac_sign,
          types.WindingRole.AC_SERIES, wind.r_ac_winding_ohm,
      ),
  ]
  if with_aux:
    # Drives middle-leg flux the same way as the circulating main bias.
    windings.append(
        mec.WindingLink(
            f"{prefix}.aux", f"{prefix}.middle", wind.n_dc_aux, -1,
            types.WindingRole.DC_AUXILIARY, wind.r_dc_winding_ohm,
        )
    )
  return mec.MagneticNetwork(
      nodes=(f"{prefix}.bottom", f"{prefix}.top"),
      branches=branches,
      windings=tuple(windings),
  )


@register(types.ScfclModel.B, cores_per_phase=2)
def _build_b(geom, wind, curve, prefix, index):
  return _three_leg_core(
      geom, wind, curve, prefix, index,
      main_dc_role=types.WindingRole.DC_SOURCE, with_aux=False,
  )


@register(types.ScfclModel.A, cores_per_phase=2)
def _build_a(geom, wind, curve, prefix, index):
  return _three_leg_core(
      geom, wind, curve, prefix, index,
      main_dc_role=types.WindingRole.DC_SOURCE, with_aux=True,
  )


@register(types.ScfclModel.C, cores_per_phase=2)
def _build_c(geom, wind, curve, prefix, index):
  return _three_leg_core(
      geom, wind, curve, prefix, index,
      main_dc_role=wind.shorted_role, with_aux=True,
  )


@register(types.ScfclModel.D, cores_per_phase=1)
def _build_d(geom, wind, curve, prefix, index):
  del index
  ac = types.WindingRole.AC_SERIES
  dc = types.WindingRole.DC_SOURCE
  return mec.MagneticNetwork(
      nodes=(f"{prefix}.bottom", f"{prefix}.top"),
      branches=(
          _core_leg(geom, curve, prefix, "left", "bottom", "top"),
          _gap_leg(geom, prefix, "middle", "bottom", "top", area_scale=2.0),
          _core_leg(geom, curve, prefix, "right", "bottom", "top"),
      ),
      windings=(
          mec.WindingLink(f"{prefix}.ac_left", f"{prefix}.left", wind.n_ac, 1,
                          ac, wind.r_ac_winding_ohm),
          mec.WindingLink(f"{prefix}.ac_right", f"{prefix}.right", wind.n_ac,
                          1, ac, wind.r_ac_winding_ohm),
          mec.WindingLink(f"{prefix}.dc_left", f"{prefix}.left", wind.n_dc, 1,
                          dc, wind.r_dc_winding_ohm),
          mec.WindingLink(f"{prefix}.dc_right", f"{prefix}.right", wind.n_dc,
                          -1, dc, wind.r_dc_winding_ohm),
      ),
  )


@register(types.ScfclModel.E, cores_per_phase=1)
def _build_e(geom, wind, curve, prefix, index):
  del index
  ac = types.WindingRole.AC_SERIES
  dc = types.WindingRole.DC_SOURCE
  shorted = wind.shorted_role
  return mec.MagneticNetwork(
      nodes=tuple(f"{prefix}.{n}" for n in ("bl", "tl", "br", "tr")),
      branches=(
          _core_leg(geom, curve, prefix, "leg_left", "bl", "tl"),
          _gap_leg(geom, prefix, "gap_left", "bl", "tl"),
          _core_leg(geom, curve, prefix, "leg_right", "br", "tr"),
          _gap_leg(geom, prefix, "gap_right", "br", "tr"),
          _core_leg(geom, curve, prefix, "yoke_top", "tl", "tr",
                    length=geom.l_yoke_m),
          _core_leg(geom, curve, prefix, "yoke_bottom", "bl", "br",
                    length=geom.l_yoke_m),
      ),
      windings=(
          mec.WindingLink(f"{prefix}.ac_left", f"{prefix}.leg_left", wind.n_ac,
                          1, ac, wind.r_ac_winding_ohm),
          mec.WindingLink(f"{prefix}.ac_right", f"{prefix}.leg_right",
                          wind.n_ac, 1, ac, wind.r_ac_winding_ohm),
          mec.WindingLink(f"{prefix}.dc_left", f"{prefix}.leg_left", wind.n_dc,
                          1, dc, wind.r_dc_winding_ohm),
          mec.WindingLink(f"{prefix}.dc_right", f"{prefix}.leg_right",
                          wind.n_dc, -1, dc, wind.r_dc_winding_ohm),
          mec.WindingLink(f"{prefix}.shorted_top", f"{prefix}.yoke_top",
                          wind.n_shorted, 1, shorted, wind.r_shorted_ohm),
          mec.WindingLink(f"{prefix}.shorted_bottom", f"{prefix}.yoke_bottom",
                          wind.n_shorted, 1, shorted, wind.r_shorted_ohm),
      ),
  )


def build(
    model: types.ScfclModel,
    geom: Optional[GeometrySpec] = None,
    wind: Optional[WindingSpec] = None,
    material: material_lib.BHCurve = material_lib.DEFAULT_SOFT_IRON,
    cores_per_phase: Optional[int] = None,
    *,
    override_cores: bool = False,
) -> FclAssembly:
  """Builds the magnetic side of one limiter phase.

  Args:
    model: Configuration tag.
    geom: Core dimensions; defaults to GeometrySpec().
    wind: Winding parameters; defaults to WindingSpec().
    material: B-H law of every core branch.
    cores_per_phase: Number of cores. Must equal the model's default unless
      override_cores is set.
    override_cores: Allow a non-default number of cores.

  Returns:
    The FclAssembly; empty for ScfclModel.NONE.

  Raises:
    TopologyError: Unknown model or wrong number of cores.
  """
  model = types.ScfclModel(model)
  geom = geom or GeometrySpec()
  wind = wind or WindingSpec()
  if model is types.ScfclModel.NONE:
    return FclAssembly(model, (), wind)
  if model not in _BUILDERS:
    raise exceptions.TopologyError(
        f"No builder registered for model {model.value}", key="model"
    )
  expected = _CORES_PER_PHASE[model]
  n_cores = expected if cores_per_phase is None else cores_per_phase
  if n_cores != expected and not override_cores:
    raise exceptions.TopologyError(
        f"Model {model.value} uses {expected} core(s) per phase, got"
        f" {n_cores}; set override_cores to build it anyway",
        key="cores_per_phase",
    )
  if n_cores < 1:
    raise exceptions.TopologyError(
        "cores_per_phase must be >= 1", key="cores_per_phase"
    )
  builder = _BUILDERS[model]
  cores = tuple(
      builder(geom, wind, material, f"core{k}", k) for k in range(n_cores)
  )
  logging.debug(
      "Built model %s: %d core(s), %d branches, %d windings",
      model.value,
      len(cores),
      sum(len(c.branches) for c in cores),
      sum(len(c.windings) for c in cores),
  )
  return FclAssembly(model, cores, wind)


def bias_currents(
    assembly: FclAssembly, i_dc: Optional[float] = None
) -> Dict[str, float]:
  """Winding currents with only the bias loop energized."""
  current = assembly.windings_spec.i_dc_a if i_dc is None else i_dc
  return {w.id: current for w in assembly.dc_windings()}


@dataclasses.dataclass(frozen=True)
class DcBiasReport:
  """Magnetic state of a limiter with only its bias winding energized.

  Attributes:
    model: Configuration tag.
    b: Flux density per branch id.
    mid_to_outer_ratio: |B_mid|/|B_outer| (Model D).
    gap_independence: Relative change of B_outer when the gap is halved
      (Model D).
    gap_to_dc_leg_ratio: |Phi_gap|/|Phi_dc leg| of the first core (Models
      A, B, C).
    separation_margin: N_dc*I_dc on the dc leg over the gap MMF needed to
      return the dc-leg flux plus a reversed, saturated ac leg (Models A and
      B with a saturating law). Above 1 the dc leg keeps its bias whatever
      the ac current.
    checks: Named pass/fail results of the applicable checks.
  """

  model: types.ScfclModel
  b: Mapping[str, float]
  mid_to_outer_ratio: Optional[float] = None
  gap_independence: Optional[float] = None
  gap_to_dc_leg_ratio: Optional[float] = None
  separation_margin: Optional[float] = None
  checks: Mapping[str, bool] = dataclasses.field(default_factory=dict)

  @property
  def passed(self) -> bool:
    return all(self.checks.values())


def _solve_bias(assembly: FclAssembly) -> mec.MecSolution:
  return mec.solve(assembly.cores, bias_currents(assembly))


def _separation_margin(
    assembly: FclAssembly, dc_flux: float
) -> Optional[float]:
  left = assembly.branch("core0.left")
  middle = assembly.branch("core0.middle")
  if left.material.is_linear or middle.material.is_linear:
    return None
  bias = bias_currents(assembly)
  dc_mmf = sum(
      w.turns * abs(bias[w.id])
      for w in assembly.dc_windings()
      if w.branch_id == left.id
  )
  if not dc_mmf:
    return None
  saturated = middle.material.b_sat * middle.area
  gap_mmf = mec.branch_reluctance(assembly.branch("core0.right")) * (
      dc_flux + saturated
  )
  return dc_mmf / gap_mmf


def dc_bias_check(
    model: types.ScfclModel,
    geom: Optional[GeometrySpec] = None,
    wind: Optional[WindingSpec] = None,
    material: material_lib.BHCurve = material_lib.DEFAULT_SOFT_IRON,
) -> DcBiasReport:
  """Solves the bias-only operating point and checks the bias flux paths.

  Model D: |B_mid| <= 1e-3 |B_outer| and B_outer unchanged (1e-6 relative)
  when the gap is halved. Model B: separation_margin above 1.

  Raises:
    TopologyError: Model NONE has no magnetic circuit.
    SolverError: Propagated from the magnetic solve.
  """
  model = types.ScfclModel(model)
  geom = geom or GeometrySpec()
  if model is types.ScfclModel.NONE:
    raise exceptions.TopologyError("Model None has no bias circuit.")
  assembly = build(model, geom, wind, material)
  sol = _solve_bias(assembly)
  fields = dict(b=dict(sol.b))
  checks: Dict[str, bool] = {}

  if model is types.ScfclModel.D:
    b_outer = max(abs(sol.b["core0.left"]), abs(sol.b["core0.right"]))
    ratio = abs(sol.b["core0.middle"]) / b_outer if b_outer else 0.0
    halved = dataclasses.replace(geom, l_gap_m=geom.l_gap_m / 2)
    sol_halved = _solve_bias(build(model, halved, wind, material))
    b_halved = abs(sol_halved.b["core0.left"])
    change = abs(b_halved - abs(sol.b["core0.left"])) / max(b_outer, 1e-300)
    fields.update(mid_to_outer_ratio=ratio, gap_independence=change)
    checks["mid_to_outer"] = ratio <= MID_TO_OUTER_LIMIT
    checks["gap_independence"] = change <= GAP_INDEPENDENCE_LIMIT
  elif model in (types.ScfclModel.A, types.ScfclModel.B, types.ScfclModel.C):
    dc_flux = abs(sol.fluxes["core0.left"])
    gap_ratio = (
        abs(sol.fluxes["core0.right"]) / dc_flux if dc_flux else 0.0
    )
    margin = _separation_margin(assembly, dc_flux)
    fields.update(gap_to_dc_leg_ratio=gap_ratio, separation_margin=margin)
    if model is types.ScfclModel.B and margin is not None:
      checks["separation"] = margin > 1.0

  report = DcBiasReport(model=model, checks=checks, **fields)
  for name, ok in checks.items():
    if not ok:
      logging.warning("dc bias check %s failed for model %s", name, model.value)
  return report


def series_inductance(
    assembly: FclAssembly,
    role: types.WindingRole = types.WindingRole.AC_SERIES,
    currents: Optional[Mapping[str, float]] = None,
) -> float:
  """Small-signal inductance of the series string of one winding role.

  The string sees sum_jk L[j][k] over its windings; cores do not couple.
  """
  windings = assembly.windings(role)
  if not windings:
    return 0.0
  matrix = mec.incremental_inductance(assembly.cores, currents)
  ids = [w.id for w in windings]
  idx = [matrix.winding_ids.index(w) for w in ids]
  return float(np.sum(matrix.values[np.ix_(idx, idx)]))


@dataclasses.dataclass(frozen=True)
class InductiveLimits:
  """Model D series ac inductance in its two limiting states (henry).

  Attributes:
    desaturated_h: Series inductance with the bias removed.
    saturated_h: Series inductance at full bias.
    saturated_per_leg_h: saturated_h shared over the ac windings; the
      quantity a one-leg hand formula counts.
  """

  desaturated_h: float
  saturated_h: float
  saturated_per_leg_h: float

  @property
  def ratio(self) -> float:
    return self.desaturated_h / self.saturated_per_leg_h


def inductive_limits(
    geom: Optional[GeometrySpec] = None,
    wind: Optional[WindingSpec] = None,
    material: material_lib.BHCurve = material_lib.DEFAULT_SOFT_IRON,
) -> InductiveLimits:
  """Model D small-signal ac inductance unbiased and at full bias."""
  assembly = build(types.ScfclModel.D, geom, wind, material)
  desaturated = series_inductance(assembly, currents=None)
  saturated = series_inductance(
      assembly, currents=bias_currents(assembly)
  )
  n_ac = len(assembly.windings(types.WindingRole.AC_SERIES))
  return InductiveLimits(
      desaturated_h=desaturated,
      saturated_h=saturated,
      saturated_per_leg_h=saturated / n_ac,
  )

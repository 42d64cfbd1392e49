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

"""Scenario files: schema, loading, sweep expansion and config hashing.

A scenario file is JSON (or YAML for .yaml/.yml) with unit-suffixed keys:

  {
    "name": "model_b_fault",
    "u_source_v": 14142.1,
    "voltage_basis": "peak",
    "fault": {"t_fault_s": 0.023},
    "fcl": {"model": "B", "windings": {"n_dc": 500}},
    "sim": {"dt_s": 1e-5, "t_end_s": 0.1},
    "sweep": {"inception_angle_rad": [0.0, 1.5708]}
  }

Omitted keys take the defaults of the cosim and topology dataclasses.
"""

from __future__ import annotations

import dataclasses
import hashlib
import itertools
import json
import math
import pathlib
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from absl import logging
import pydantic
import yaml

from scfcl import cosim
from scfcl import material
from scfcl import topology
from scfcl.core import exceptions
from scfcl.core import types

__all__ = [
    "ScenarioFile",
    "Variant",
    "parse",
    "load_file",
    "to_domain",
    "expand",
    "config_hash",
]

_YAML_SUFFIXES = (".yaml", ".yml")
_SWEEP_KEYS = ("inception_angle_rad", "l_gap_m", "n_shorted")


class _Strict(pydantic.BaseModel):
  model_config = pydantic.ConfigDict(extra="forbid", frozen=True)


class FaultModel(_Strict):
  t_fault_s: Optional[float] = None
  r_fault_ohm: Optional[float] = None
  t_clear_s: Optional[float] = None


class DcModel(_Strict):
  mode: Optional[types.DcMode] = None
  v_dc_v: Optional[float] = None
  r_dc_ohm: Optional[float] = None
  active_trip: Optional[bool] = None


class GeometryModel(_Strict):
  l_mean_m: Optional[float] = None
  a_core_m2: Optional[float] = None
  l_gap_m: Optional[float] = None
  l_yoke_m: Optional[float] = None
  fringing_factor: Optional[float] = None
  return_area_scale: Optional[float] = None
  leg_overrides: Optional[Dict[str, Tuple[float, float]]] = None


class WindingsModel(_Strict):
  n_ac: Optional[int] = None
  n_dc: Optional[int] = None
  i_dc_a: Optional[float] = None
  n_dc_aux: Optional[int] = None
  n_shorted: Optional[int] = None
  r_shorted_ohm: Optional[float] = None
  r_dc_winding_ohm: Optional[float] = None
  r_ac_winding_ohm: Optional[float] = None
  open_shorted: Optional[bool] = None


class MaterialModel(_Strict):
  kind: types.CurveKind = types.CurveKind.SATURATING
  mu_r: Optional[float] = None
  b_sat_t: Optional[float] = None
  h_knee_a_per_m: Optional[float] = None


class FclModel(_Strict):
  model: types.ScfclModel = types.ScfclModel.NONE
  cores_per_phase: Optional[int] = None
  override_cores: bool = False
  geometry: GeometryModel = GeometryModel()
  windings: WindingsModel = WindingsModel()
  material: MaterialModel = MaterialModel()


class SimModel(_Strict):
  dt_s: Optional[float] = None
  t_end_s: Optional[float] = None
  integrator: Optional[types.Integrator] = None
  newton_tol: Optional[float] = None
  max_iter: Optional[int] = None
  decimation: Optional[int] = None
  max_halvings: Optional[int] = None


class SweepModel(_Strict):
  inception_angle_rad: List[float] = []
  l_gap_m: List[float] = []
  n_shorted: List[int] = []


class ScenarioFile(_Strict):
  """Validated scenario file; every key carries its unit."""

  name: str = "scenario"
  u_source_v: float = 14142.1
  voltage_basis: types.VoltageBasis = types.VoltageBasis.PEAK
  frequency_hz: Optional[float] = None
  phase_rad: Optional[float] = None
  inception_angle_rad: Optional[float] = None
  r_line_ohm: Optional[float] = None
  l_line_h: Optional[float] = None
  z_load_ohm: Optional[float] = None
  fault: Optional[FaultModel] = None
  dc: DcModel = DcModel()
  fcl: FclModel = FclModel()
  sim: SimModel = SimModel()
  sweep: SweepModel = SweepModel()

  @pydantic.field_validator("name")
  @classmethod
  def _name_is_filename_safe(cls, value: str) -> str:
    if not value or any(c in value for c in "/\\"):
      raise ValueError("name must be non-empty and contain no path separators")
    return value


@dataclasses.dataclass(frozen=True)
class Variant:
  """One runnable scenario after sweep expansion.

  Attributes:
    name: Scenario name; sweep variants append __<key>=<value>.
    scenario: Circuit and limiter.
    sim: Time stepping.
    config_hash: SHA-256 of the canonical variant file, dt included.
    source: The validated file content of this variant.
  """

  name: str
  scenario: cosim.CircuitScenario
  sim: cosim.SimConfig
  config_hash: str
  source: ScenarioFile


def _key_of(error: Mapping[str, Any]) -> str:
  return ".".join(str(part) for part in error.get("loc", ())) or "<root>"


def parse(content: Mapping[str, Any]) -> ScenarioFile:
  """Validates a mapping against the scenario schema.

  Raises:
    ConfigError: Unknown key, wrong type or invalid value; the message and
      the key attribute name the first offending key.
  """
  if not isinstance(content, Mapping):
    raise exceptions.ConfigError("Scenario file must hold a mapping.")
  try:
    file = ScenarioFile.model_validate(dict(content))
  except pydantic.ValidationError as e:
    first = e.errors()[0]
    key = _key_of(first)
    raise exceptions.ConfigError(f"{key}: {first['msg']}", key=key) from e
  # Surfaces dataclass-level checks (ranges, cross-field rules) at load time.
  to_domain(file)
  return file


def load_file(path: Union[str, pathlib.Path]) -> ScenarioFile:
  """Reads a JSON or YAML scenario file.

  Raises:
    ConfigError: The file is missing, unparsable or invalid.
  """
  path = pathlib.Path(path)
  try:
    text = path.read_text(encoding="utf-8")
  except OSError as e:
    raise exceptions.ConfigError(
        f"Cannot read scenario file {path}: {e}"
    ) from e
  try:
    if path.suffix.lower() in _YAML_SUFFIXES:
      content = yaml.safe_load(text)
    else:
      content = json.loads(text)
  except (json.JSONDecodeError, yaml.YAMLError) as e:
    raise exceptions.ConfigError(
        f"Failed to parse scenario file {path}: {e}"
    ) from e
  logging.info("Loaded scenario file %s", path)
  return parse(content or {})


def _given(model: pydantic.BaseModel) -> Dict[str, Any]:
  """Fields set to a value; None means "use the dataclass default"."""
  return {k: v for k, v in dict(model).items() if v is not None}


def _curve(model: MaterialModel) -> material.BHCurve:
  kwargs: Dict[str, Any] = {"kind": model.kind}
  for src, dst in (
      ("mu_r", "mu_r"),
      ("b_sat_t", "b_sat"),
      ("h_knee_a_per_m", "h_knee"),
  ):
    value = getattr(model, src)
    if value is not None:
      kwargs[dst] = value
  try:
    return material.BHCurve(**kwargs)
  except exceptions.InputError as e:
    raise exceptions.ConfigError(
        f"fcl.material: {e}", key="fcl.material"
    ) from e


def _fcl(model: FclModel) -> cosim.FclSpec:
  return cosim.FclSpec(
      model=model.model,
      geometry=topology.GeometrySpec(**_given(model.geometry)),
      windings=topology.WindingSpec(**_given(model.windings)),
      material=_curve(model.material),
      cores_per_phase=model.cores_per_phase,
      override_cores=model.override_cores,
  )


def to_domain(
    file: ScenarioFile,
) -> Tuple[cosim.CircuitScenario, cosim.SimConfig]:
  """Converts a validated file into the frozen domain dataclasses.

  inception_angle_rad, when set, overrides phase_rad so that the source phase
  at fault inception equals the angle.

  Raises:
    ConfigError: A value outside the range a dataclass accepts.
  """
  circuit = {
      key: getattr(file, key)
      for key in (
          "frequency_hz",
          "phase_rad",
          "r_line_ohm",
          "l_line_h",
          "z_load_ohm",
      )
      if getattr(file, key) is not None
  }
  u_peak = file.u_source_v
  if file.voltage_basis is types.VoltageBasis.RMS:
    u_peak *= math.sqrt(2.0)
  fault = None if file.fault is None else cosim.FaultSpec(**_given(file.fault))
  scenario = cosim.CircuitScenario(
      name=file.name,
      u_peak_v=u_peak,
      fault=fault,
      dc=cosim.DcSide(**_given(file.dc)),
      fcl=_fcl(file.fcl),
      **circuit,
  )
  if file.inception_angle_rad is not None:
    t_ref = 0.0 if fault is None else fault.t_fault_s
    phase = math.remainder(
        file.inception_angle_rad - scenario.omega * t_ref, 2.0 * math.pi
    )
    scenario = dataclasses.replace(scenario, phase_rad=phase)
  return scenario, cosim.SimConfig(**_given(file.sim))


def config_hash(file: ScenarioFile) -> str:
  """SHA-256 of the canonical JSON of a validated file."""
  canonical = json.dumps(
      file.model_dump(mode="json"), sort_keys=True, separators=(",", ":")
  )
  return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _format_value(value: Any) -> str:
  return f"{value:g}" if isinstance(value, float) else str(value)


def expand(
    file: ScenarioFile,
    *,
    dt_s: Optional[float] = None,
    t_end_s: Optional[float] = None,
) -> List[Variant]:
  """Expands sweep lists into the Cartesian product of variants.

  Args:
    file: Validated scenario file.
    dt_s: Command-line override of sim.dt_s.
    t_end_s: Command-line override of sim.t_end_s.

  Returns:
    One Variant per sweep combination; a single Variant without sweeps.
  """
  sim_updates = {}
  if dt_s is not None:
    sim_updates["dt_s"] = dt_s
  if t_end_s is not None:
    sim_updates["t_end_s"] = t_end_s
  if sim_updates:
    file = file.model_copy(
        update={"sim": file.sim.model_copy(update=sim_updates)}
    )

  axes = [
      (key, list(getattr(file.sweep, key)))
      for key in _SWEEP_KEYS
      if getattr(file.sweep, key)
  ]
  base = file.model_copy(update={"sweep": SweepModel()})
  variants = []
  for combo in itertools.product(*(values for _, values in axes)):
    current = base
    suffix = ""
    for (key, _), value in zip(axes, combo):
      current = _apply_sweep(current, key, value)
      suffix += f"__{key}={_format_value(value)}"
    current = current.model_copy(update={"name": file.name + suffix})
    # Re-validate so swept values hit the same checks as file values.
    current = parse(current.model_dump(mode="json"))
    scenario, sim = to_domain(current)
    variants.append(
        Variant(
            name=current.name,
            scenario=scenario,
            sim=sim,
            config_hash=config_hash(current),
            source=current,
        )
    )
  logging.info("Scenario %s expands to %d variant(s)", file.name, len(variants))
  return variants


def _apply_sweep(file: ScenarioFile, key: str, value: Any) -> ScenarioFile:
  if key == "inception_angle_rad":
    return file.model_copy(update={"inception_angle_rad": value})
  fcl = file.fcl
  if key == "l_gap_m":
    geometry = fcl.geometry.model_copy(update={"l_gap_m": value})
    return file.model_copy(
        update={"fcl": fcl.model_copy(update={"geometry": geometry})}
    )
  windings = fcl.windings.model_copy(update={"n_shorted": value})
  return file.model_copy(
      update={"fcl": fcl.model_copy(update={"windings": windings})}
  )

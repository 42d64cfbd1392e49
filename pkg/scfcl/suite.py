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

"""Batch execution of transient runs and the model comparison suites.

A batch is a list of RunSpecs executed on a thread pool. Each finished run
writes its waveform CSV right away; reports are computed once every run is
in. When a run fails, pending runs are cancelled, a residual trace and a
manifest of completed and failed runs are written, and the error propagates.

Suites are registered by name:

  normal-comparison  None, A, B, C in normal operation.
  fault-comparison   None, A, B, C in normal and fault operation.
  flux-comparison    as fault-comparison, plus Model C with its shorted coil
                     opened and with half the shorted turns.
  model-DE           None, D, E in normal and fault operation.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import hashlib
import json
import pathlib
import time
from typing import Callable, Dict, List, Optional, Sequence, Union

from absl import logging
import numpy as np
import pandas as pd

import scfcl
from scfcl import analysis
from scfcl import cosim
from scfcl import data_lib
from scfcl import io
from scfcl import progress
from scfcl import scenario as scenario_lib
from scfcl import topology
from scfcl import visualization
from scfcl.core import data
from scfcl.core import exceptions
from scfcl.core import types

__all__ = [
    "NORMAL",
    "FAULT",
    "RunSpec",
    "Check",
    "BatchResult",
    "SuiteResult",
    "config_hash_of",
    "run_batch",
    "run_scenarios",
    "comparison_frame",
    "register",
    "available_suites",
    "run_suite",
]

Model = types.ScfclModel
PathLike = Union[str, pathlib.Path]

NORMAL = "normal"
FAULT = "fault"

FLUX_RESIDUAL_LIMIT = 1e-9
INSERTION_LIMIT = 0.05
ENERGY_DRIFT_LIMIT = 1e-3
INDUCED_DC_LIMIT = 0.10
DROP_TIE_TOLERANCE = 0.01

_COMPARISON_COLUMNS = (
    "name",
    "model",
    "condition",
    "first_peak_A",
    "later_peak_A",
    "steady_fault_amplitude_A",
    "normal_amplitude_A",
    "limiting_ratio",
    "insertion_drop_pct",
    "peak_v_dc_V",
    "peak_B_T",
    "total_turns",
    "newton_iterations",
    "substepped_steps",
)


def config_hash_of(
    circuit: cosim.CircuitScenario, sim: cosim.SimConfig
) -> str:
  """SHA-256 of the canonical JSON of a scenario and its step settings."""
  payload = {
      "scenario": dataclasses.asdict(
          circuit, dict_factory=data_lib.enum_asdict_factory
      ),
      "sim": dataclasses.asdict(sim, dict_factory=data_lib.enum_asdict_factory),
  }
  canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
  return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclasses.dataclass(frozen=True)
class RunSpec:
  """One transient run of a batch.

  Attributes:
    name: Run name and stem of its output files.
    scenario: Circuit and limiter.
    sim: Time stepping.
    baseline: Name of the run without the limiter that metrics compare
      against; None compares the run with itself.
    condition: NORMAL or FAULT.
    config_hash: Provenance hash; derived from scenario and sim when empty.
  """

  name: str
  scenario: cosim.CircuitScenario
  sim: cosim.SimConfig
  baseline: Optional[str] = None
  condition: str = NORMAL
  config_hash: str = ""

  def __post_init__(self):
    if not self.config_hash:
      object.__setattr__(
          self, "config_hash", config_hash_of(self.scenario, self.sim)
      )


@dataclasses.dataclass(frozen=True)
class Check:
  """Outcome of one suite property.

  Informational checks are reported but never fail the suite.
  """

  name: str
  passed: bool
  detail: str = ""
  informational: bool = False


@dataclasses.dataclass(frozen=True)
class BatchResult:
  specs: Dict[str, RunSpec]
  series: Dict[str, data.TimeSeries]
  reports: Dict[str, data.SummaryReport]
  paths: List[pathlib.Path]


@dataclasses.dataclass(frozen=True)
class SuiteResult:
  """Outcome of a suite.

  Attributes:
    name: Suite name.
    out_dir: Report directory.
    batch: Runs and their reports.
    checks: Suite properties, informational ones included.
    elapsed_s: Wall time in seconds.
  """

  name: str
  out_dir: pathlib.Path
  batch: BatchResult
  checks: List[Check]
  elapsed_s: float = 0.0

  @property
  def failed_checks(self) -> List[Check]:
    return [c for c in self.checks if not c.passed and not c.informational]

  @property
  def passed(self) -> bool:
    return not self.failed_checks


def _provenance(spec: RunSpec) -> data.Provenance:
  return data.Provenance(
      config_hash=spec.config_hash,
      version=scfcl.__version__,
      dt=spec.sim.dt_s,
      integrator=spec.sim.integrator.value,
  )


def _write_manifest(
    out: pathlib.Path,
    label: str,
    specs: Sequence[RunSpec],
    completed: Sequence[str],
    failed: Sequence[str],
    aborted: bool,
) -> pathlib.Path:
  done = set(completed) | set(failed)
  payload = {
      "label": label,
      "version": scfcl.__version__,
      "aborted": aborted,
      "completed": [s.name for s in specs if s.name in completed],
      "failed": list(failed),
      "not_run": [s.name for s in specs if s.name not in done],
  }
  return io.write_json(payload, out / "manifest.json")


def _execute(spec: RunSpec) -> data.TimeSeries:
  start = time.time()
  ts = cosim.run(spec.scenario, spec.sim)
  logging.info("Run %s finished in %.2f s", spec.name, time.time() - start)
  return ts


def _check_batch(specs: Sequence[RunSpec]) -> Dict[str, RunSpec]:
  by_name: Dict[str, RunSpec] = {}
  for spec in specs:
    if spec.name in by_name:
      raise exceptions.ConfigError(
          f"Duplicate run name {spec.name}", key="name"
      )
    by_name[spec.name] = spec
  for spec in specs:
    if spec.baseline is not None and spec.baseline not in by_name:
      raise exceptions.ConfigError(
          f"Run {spec.name} refers to unknown baseline {spec.baseline}",
          key="baseline",
      )
  return by_name


def run_batch(
    specs: Sequence[RunSpec],
    out_dir: PathLike,
    *,
    workers: int = 1,
    label: str = "batch",
    show_progress: bool = True,
) -> BatchResult:
  """Runs specs concurrently and writes one waveform CSV per run.

  Args:
    specs: Runs to execute; names must be unique.
    out_dir: Directory for <name>.csv and manifest.json.
    workers: Thread pool size.
    label: Name shown on the progress bar and in the manifest.
    show_progress: Whether to show a progress bar.

  Returns:
    Series, reports and written paths keyed by run name, in spec order.

  Raises:
    ConfigError: Duplicate names or an unknown baseline.
    SolverError: A run failed; <name>_residuals.json and an aborted
      manifest were written first.
    MetricsError: A report could not be computed.
  """
  by_name = _check_batch(specs)
  out = pathlib.Path(out_dir)
  out.mkdir(parents=True, exist_ok=True)
  series: Dict[str, data.TimeSeries] = {}
  paths: List[pathlib.Path] = []
  pbar = progress.create_suite_progress_bar(
      len(specs), label, disable=not show_progress
  )
  try:
    with concurrent.futures.ThreadPoolExecutor(
        max_workers=max(1, min(workers, len(specs) or 1))
    ) as executor:
      future_to_name = {
          executor.submit(_execute, spec): spec.name for spec in specs
      }
      for future in concurrent.futures.as_completed(future_to_name):
        name = future_to_name[future]
        try:
          ts = future.result()
        except exceptions.ScfclError as e:
          for pending in future_to_name:
            pending.cancel()
          logging.error("Run %s failed: %s", name, e)
          if show_progress:
            progress.print_run_failed(name, e)
          if isinstance(e, exceptions.SolverError):
            paths.append(
                io.write_residuals(
                    e, out / f"{name}_residuals.json", name=name
                )
            )
          _write_manifest(
              out, label, specs, list(series), [name], aborted=True
          )
          raise
        series[name] = ts
        paths.append(io.write_waveform_csv(ts, out / f"{name}.csv"))
        pbar.set_postfix_str(name)
        pbar.update(1)
  finally:
    pbar.close()

  reports: Dict[str, data.SummaryReport] = {}
  for spec in specs:
    reports[spec.name] = cosim.extract_metrics(
        series[spec.name],
        series[spec.baseline or spec.name],
        name=spec.name,
        model=spec.scenario.fcl.model.value,
        total_turns=spec.scenario.fcl.build().total_turns,
        provenance=_provenance(spec),
    )
  paths.append(_write_manifest(
      out, label, specs, list(series), [], aborted=False
  ))
  return BatchResult(
      specs=by_name,
      series={s.name: series[s.name] for s in specs},
      reports=reports,
      paths=paths,
  )


def _save_charts(batch: BatchResult, out: pathlib.Path) -> List[pathlib.Path]:
  paths = []
  by_condition: Dict[str, Dict[str, data.TimeSeries]] = {}
  for name, spec in batch.specs.items():
    ts = batch.series[name]
    baseline = batch.series[spec.baseline] if spec.baseline else None
    paths.append(
        pathlib.Path(
            visualization.save_waveform_svg(
                ts, out / f"{name}.svg", title=name, baseline=baseline
            )
        )
    )
    by_condition.setdefault(spec.condition, {})[name] = ts
  for condition, runs in by_condition.items():
    if len(runs) > 1:
      paths.append(
          pathlib.Path(
              visualization.save_comparison_svg(
                  runs,
                  out / f"comparison_{condition}.svg",
                  title=f"line current, {condition} operation",
              )
          )
      )
  return paths


def run_scenarios(
    variants: Sequence[scenario_lib.Variant],
    out_dir: PathLike,
    *,
    workers: int = 1,
    svg: bool = False,
    show_progress: bool = True,
) -> BatchResult:
  """Runs scenario-file variants, each with its limiter-free baseline.

  Writes <name>.csv, <name>_baseline.csv and <name>_summary.json per variant
  and, with svg, <name>.svg.
  """
  specs: List[RunSpec] = []
  for variant in variants:
    baseline_name = f"{variant.name}_baseline"
    condition = NORMAL if variant.scenario.fault is None else FAULT
    specs.append(
        RunSpec(
            name=variant.name,
            scenario=variant.scenario,
            sim=variant.sim,
            baseline=baseline_name,
            condition=condition,
            config_hash=variant.config_hash,
        )
    )
    specs.append(
        RunSpec(
            name=baseline_name,
            scenario=dataclasses.replace(
                variant.scenario.without_fcl(), name=baseline_name
            ),
            sim=variant.sim,
            condition=condition,
            config_hash=variant.config_hash,
        )
    )
  label = variants[0].source.name if variants else "scenario"
  batch = run_batch(
      specs, out_dir, workers=workers, label=label, show_progress=show_progress
  )
  out = pathlib.Path(out_dir)
  for variant in variants:
    batch.paths.append(
        io.write_summary(
            batch.reports[variant.name], out / f"{variant.name}_summary.json"
        )
    )
    if svg:
      batch.paths.append(
          pathlib.Path(
              visualization.save_waveform_svg(
                  batch.series[variant.name],
                  out / f"{variant.name}.svg",
                  title=variant.name,
                  baseline=batch.series[f"{variant.name}_baseline"],
              )
          )
      )
  return batch


def _peak_b(report: data.SummaryReport) -> Optional[float]:
  return max(report.peak_b_t.values(), default=None)


def comparison_frame(batch: BatchResult) -> pd.DataFrame:
  """One row per run, by limiting ratio (desc) then insertion drop (asc)."""
  rows = []
  for name, report in batch.reports.items():
    rows.append({
        "name": name,
        "model": report.model,
        "condition": batch.specs[name].condition,
        "first_peak_A": report.first_peak_a,
        "later_peak_A": report.later_peak_a,
        "steady_fault_amplitude_A": report.steady_fault_amplitude_a,
        "normal_amplitude_A": report.normal_amplitude_a,
        "limiting_ratio": report.limiting_ratio,
        "insertion_drop_pct": report.insertion_drop_pct,
        "peak_v_dc_V": report.peak_v_dc_v,
        "peak_B_T": _peak_b(report),
        "total_turns": report.total_turns,
        "newton_iterations": report.newton.newton_iterations,
        "substepped_steps": report.newton.substepped_steps,
    })
  frame = pd.DataFrame(rows, columns=list(_COMPARISON_COLUMNS))
  return frame.sort_values(
      ["limiting_ratio", "insertion_drop_pct", "name"],
      ascending=[False, True, True],
      na_position="last",
      kind="mergesort",
  ).reset_index(drop=True)


# Suite definitions

RunsFn = Callable[[cosim.SimConfig], List[RunSpec]]
ChecksFn = Callable[[BatchResult], List[Check]]


@dataclasses.dataclass(frozen=True)
class _Suite:
  runs: RunsFn
  checks: ChecksFn


_SUITES: Dict[str, _Suite] = {}


def register(name: str, *, checks: ChecksFn) -> Callable[[RunsFn], RunsFn]:
  """Decorator registering the run matrix of a suite.

  Args:
    name: Suite name used on the command line.
    checks: Evaluates the suite properties on the finished batch.

  Returns:
    Decorator that records the matrix builder and returns it unchanged.
  """

  def _decorator(fn: RunsFn) -> RunsFn:
    if name in _SUITES:
      logging.debug("Replacing suite %s", name)
    _SUITES[name] = _Suite(runs=fn, checks=checks)
    return fn

  return _decorator


def available_suites() -> List[str]:
  return sorted(_SUITES)


def _spec(
    model: Model,
    condition: str,
    sim: cosim.SimConfig,
    *,
    variant: str = "",
    windings: Optional[topology.WindingSpec] = None,
) -> RunSpec:
  name = f"{model.value}{variant}_{condition}"
  circuit = cosim.CircuitScenario(
      name=name,
      fault=cosim.FaultSpec() if condition == FAULT else None,
      fcl=cosim.FclSpec(
          model=model, windings=windings or topology.WindingSpec()
      ),
  )
  baseline = None if model is Model.NONE else f"{Model.NONE.value}_{condition}"
  return RunSpec(
      name=name,
      scenario=circuit,
      sim=sim,
      baseline=baseline,
      condition=condition,
  )


def _matrix(
    models: Sequence[Model], conditions: Sequence[str], sim: cosim.SimConfig
) -> List[RunSpec]:
  return [_spec(m, c, sim) for c in conditions for m in models]


def _pct(value: Optional[float]) -> str:
  return "n/a" if value is None else f"{100.0 * value:.3f}%"


def _report(batch: BatchResult, name: str) -> Optional[data.SummaryReport]:
  return batch.reports.get(name)


def _drop(batch: BatchResult, model: Model) -> Optional[float]:
  report = _report(batch, f"{model.value}_{NORMAL}")
  return None if report is None else report.insertion_drop


def _flux_conservation(batch: BatchResult) -> Check:
  worst = max(
      (ts.stats.max_flux_residual_ratio for ts in batch.series.values()),
      default=0.0,
  )
  return Check(
      "nodal flux residual <= 1e-9 of max branch flux",
      worst <= FLUX_RESIDUAL_LIMIT,
      f"worst {worst:.3g}",
  )


def _transparency(
    batch: BatchResult, models: Sequence[Model], *, informational=False
) -> List[Check]:
  checks = []
  for model in models:
    drop = _drop(batch, model)
    checks.append(
        Check(
            f"model {model.value} insertion drop below 5%",
            drop is not None and abs(drop) < INSERTION_LIMIT,
            _pct(drop),
            informational,
        )
    )
  return checks


def _drop_order(
    batch: BatchResult, lower: Model, higher: Model, *, strict: bool
) -> Check:
  """Insertion drop of lower below (strict) or not above that of higher.

  Drops within DROP_TIE_TOLERANCE of each other are a tie. A tie satisfies
  the non-strict order; under the strict order it is reported as
  informational.
  """
  a, b = _drop(batch, lower), _drop(batch, higher)
  relation = "<" if strict else "<="
  name = f"insertion drop {lower.value} {relation} {higher.value}"
  detail = f"{_pct(a)} vs {_pct(b)}"
  if a is None or b is None:
    return Check(name, False, detail)
  tied = abs(a - b) <= DROP_TIE_TOLERANCE * max(abs(a), abs(b))
  if tied and strict:
    return Check(
        name, True, f"{detail}, tied within {DROP_TIE_TOLERANCE:.0%}", True
    )
  return Check(name, tied or (a < b if strict else a <= b), detail)


def _limiting(
    batch: BatchResult, models: Sequence[Model], *, informational=False
) -> List[Check]:
  checks = []
  for model in models:
    report = _report(batch, f"{model.value}_{FAULT}")
    ratio = None if report is None else report.limiting_ratio
    checks.append(
        Check(
            f"model {model.value} limiting ratio above 1",
            ratio is not None and ratio > 1.0,
            "n/a" if ratio is None else f"{ratio:.4g}",
            informational,
        )
    )
  return checks


def _alternation(
    batch: BatchResult, run: str, branch_ids: Sequence[str]
) -> Check:
  sequence = cosim.desaturation_sequence(batch.series[run], list(branch_ids))
  alternating = all(a != b for a, b in zip(sequence, sequence[1:]))
  return Check(
      f"{run}: {' / '.join(branch_ids)} desaturate in alternate half cycles",
      len(sequence) >= 4 and alternating,
      f"{len(sequence)} half cycles",
  )


def _induced_dc_voltage(
    batch: BatchResult, model: Model, *, informational: bool = False
) -> Check:
  """Peak bias-winding voltage of a fault run against the turns-ratio bound."""
  run = f"{model.value}_{FAULT}"
  report = _report(batch, run)
  value = None if report is None else report.peak_v_dc_v
  name = (
      f"model {model.value} peak induced dc voltage <= "
      f"{INDUCED_DC_LIMIT:.0%} of N_dc/N_ac*U_peak"
  )
  if value is None:
    return Check(name, False, "n/a", informational)
  circuit = batch.specs[run].scenario
  wind = circuit.fcl.windings
  bound = analysis.induced_dc_overvoltage(
      wind.n_dc, wind.n_ac, circuit.u_peak_v
  )
  return Check(
      name,
      value <= INDUCED_DC_LIMIT * bound,
      f"{value:.4g} V of {bound:.4g} V",
      informational,
  )


def _peak_flux_density(batch: BatchResult, models: Sequence[Model]) -> Check:
  parts = []
  for model in models:
    for condition in (NORMAL, FAULT):
      report = _report(batch, f"{model.value}_{condition}")
      peak = None if report is None else _peak_b(report)
      if peak is not None:
        parts.append(f"{model.value} {condition} {peak:.3f} T")
  return Check(
      "peak flux density", bool(parts), ", ".join(parts), informational=True
  )


def _peak_flux_rate(batch: BatchResult, run: str, branch_id: str) -> float:
  ts = batch.series[run]
  area = batch.specs[run].scenario.fcl.build().branch(branch_id).area
  return float(np.max(np.abs(np.diff(ts.b[branch_id])))) * area / ts.dt


def _shorted_coil(batch: BatchResult) -> List[Check]:
  shorted = _peak_flux_rate(batch, f"C_{NORMAL}", "core0.left")
  opened = _peak_flux_rate(batch, f"C_open_{NORMAL}", "core0.left")
  many = float(
      np.max(np.abs(batch.series[f"C_{NORMAL}"].i_shorted["core0.dc"]))
  )
  few = float(
      np.max(np.abs(batch.series[f"C_n250_{NORMAL}"].i_shorted["core0.dc"]))
  )
  return [
      Check(
          "shorted coil lowers peak dPhi/dt of its leg",
          shorted < opened,
          f"{shorted:.4g} vs {opened:.4g} Wb/s",
      ),
      Check(
          "halving the shorted turns raises the induced current",
          few > many,
          f"{few:.4g} A vs {many:.4g} A",
      ),
  ]


def _energy_drift(batch: BatchResult, run: str) -> Check:
  ts = batch.series[run]
  t_stop = float(ts.time[-1])
  t_start = t_stop - ts.period
  name = f"{run}: magnetic energy drift <= 0.1% of peak co-energy"
  if t_start < float(ts.time[0]):
    return Check(name, False, "horizon shorter than one cycle")
  balance = cosim.energy_balance(ts, batch.specs[run].scenario, t_start, t_stop)
  return Check(
      name, balance.drift <= ENERGY_DRIFT_LIMIT, f"drift {balance.drift:.3g}"
  )


_ABC = (Model.A, Model.B, Model.C)
_AC_LEGS = ("core0.middle", "core1.middle")


def _normal_comparison_checks(batch: BatchResult) -> List[Check]:
  return [
      _flux_conservation(batch),
      *_transparency(batch, _ABC),
      _drop_order(batch, Model.A, Model.B, strict=False),
  ]


def _fault_comparison_checks(batch: BatchResult) -> List[Check]:
  return [
      *_normal_comparison_checks(batch),
      *_limiting(batch, _ABC),
      _induced_dc_voltage(batch, Model.A, informational=True),
      _induced_dc_voltage(batch, Model.B),
  ]


def _flux_comparison_checks(batch: BatchResult) -> List[Check]:
  return [
      _flux_conservation(batch),
      _peak_flux_density(batch, _ABC),
      *(
          _alternation(batch, f"{m.value}_{FAULT}", _AC_LEGS) for m in _ABC
      ),
      *_shorted_coil(batch),
  ]


def _model_de_checks(batch: BatchResult) -> List[Check]:
  return [
      _flux_conservation(batch),
      _drop_order(batch, Model.D, Model.E, strict=True),
      *_transparency(batch, (Model.D, Model.E), informational=True),
      *_limiting(batch, (Model.D, Model.E), informational=True),
      _alternation(batch, f"D_{FAULT}", ("core0.left", "core0.right")),
      _energy_drift(batch, f"D_{NORMAL}"),
  ]


@register("normal-comparison", checks=_normal_comparison_checks)
def _normal_comparison(sim: cosim.SimConfig) -> List[RunSpec]:
  return _matrix((Model.NONE, *_ABC), (NORMAL,), sim)


@register("fault-comparison", checks=_fault_comparison_checks)
def _fault_comparison(sim: cosim.SimConfig) -> List[RunSpec]:
  return _matrix((Model.NONE, *_ABC), (NORMAL, FAULT), sim)


@register("flux-comparison", checks=_flux_comparison_checks)
def _flux_comparison(sim: cosim.SimConfig) -> List[RunSpec]:
  return _matrix((Model.NONE, *_ABC), (NORMAL, FAULT), sim) + [
      _spec(
          Model.C,
          NORMAL,
          sim,
          variant="_open",
          windings=topology.WindingSpec(open_shorted=True),
      ),
      _spec(
          Model.C,
          NORMAL,
          sim,
          variant="_n250",
          windings=topology.WindingSpec(n_shorted=250),
      ),
  ]


@register("model-DE", checks=_model_de_checks)
def _model_de(sim: cosim.SimConfig) -> List[RunSpec]:
  return _matrix((Model.NONE, Model.D, Model.E), (NORMAL, FAULT), sim)


def run_suite(
    name: str,
    out_dir: PathLike,
    *,
    sim: Optional[cosim.SimConfig] = None,
    workers: int = 1,
    svg: bool = False,
    show_progress: bool = True,
) -> SuiteResult:
  """Runs a registered suite and writes its report directory.

  Writes per-run CSVs, comparison.csv, summary.json (reports and checks),
  manifest.json and, with svg, one chart per run plus one per condition.

  Args:
    name: One of available_suites().
    out_dir: Report directory.
    sim: Time stepping of every run; SimConfig() when omitted.
    workers: Thread pool size.
    svg: Whether to write SVG charts.
    show_progress: Whether to show a progress bar.

  Returns:
    The SuiteResult; violated checks are logged at WARNING.

  Raises:
    ConfigError: Unknown suite.
    SolverError: A run failed; the manifest records the partial suite.
  """
  suite = _SUITES.get(name)
  if suite is None:
    raise exceptions.ConfigError(
        f"Unknown suite {name!r}; available: {', '.join(available_suites())}",
        key="suite",
    )
  sim = sim or cosim.SimConfig()
  start = time.time()
  out = pathlib.Path(out_dir)
  batch = run_batch(
      suite.runs(sim),
      out,
      workers=workers,
      label=name,
      show_progress=show_progress,
  )
  checks = suite.checks(batch)
  for check in checks:
    if not check.passed and not check.informational:
      logging.warning(
          "Suite %s: check failed: %s (%s)", name, check.name, check.detail
      )

  frame = comparison_frame(batch)
  batch.paths.append(
      io.write_text(
          frame.to_csv(index=False, float_format="%.10g", lineterminator="\n"),
          out / "comparison.csv",
      )
  )
  summary = {
      "suite": name,
      "version": scfcl.__version__,
      "sim": dataclasses.asdict(sim, dict_factory=data_lib.enum_asdict_factory),
      "runs": {k: data_lib.report_to_dict(r) for k, r in batch.reports.items()},
      "checks": [dataclasses.asdict(c) for c in checks],
      "passed": all(c.passed or c.informational for c in checks),
  }
  batch.paths.append(io.write_json(summary, out / "summary.json"))
  if svg:
    batch.paths.extend(_save_charts(batch, out))
  return SuiteResult(
      name=name,
      out_dir=out,
      batch=batch,
      checks=checks,
      elapsed_s=time.time() - start,
  )

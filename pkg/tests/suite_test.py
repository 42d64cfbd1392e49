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

"""Tests for scfcl.suite."""

import contextlib
import io as std_io
import os
from unittest import mock

from absl.testing import absltest
from absl.testing import parameterized
import numpy as np
import pandas as pd
import pytest

from scfcl import cosim
from scfcl import io
from scfcl import scenario
from scfcl import suite
from scfcl.core import data
from scfcl.core import exceptions
from scfcl.core import types

Model = types.ScfclModel

_COARSE = cosim.SimConfig(dt_s=2e-5, t_end_s=0.04)


def _spec(name, model=Model.NONE, baseline=None, sim=_COARSE, **kwargs):
  return suite.RunSpec(
      name=name,
      scenario=cosim.CircuitScenario(
          name=name, fcl=cosim.FclSpec(model=model), **kwargs
      ),
      sim=sim,
      baseline=baseline,
  )


def _check(result, prefix):
  matches = [c for c in result.checks if c.name.startswith(prefix)]
  if not matches:
    raise AssertionError(f"No check named {prefix!r}")
  return matches[0]


class ConfigHashTest(absltest.TestCase):

  def test_hash_is_reproducible_and_sensitive_to_dt(self):
    circuit = cosim.CircuitScenario(fcl=cosim.FclSpec(model=Model.B))
    first = suite.config_hash_of(circuit, _COARSE)
    self.assertEqual(first, suite.config_hash_of(circuit, _COARSE))
    self.assertNotEqual(
        first, suite.config_hash_of(circuit, cosim.SimConfig(dt_s=1e-5))
    )

  def test_run_spec_derives_hash(self):
    spec = _spec("x")
    self.assertEqual(
        spec.config_hash, suite.config_hash_of(spec.scenario, spec.sim)
    )


class BatchValidationTest(absltest.TestCase):

  def test_duplicate_names(self):
    with self.assertRaises(exceptions.ConfigError):
      suite.run_batch(
          [_spec("a"), _spec("a")],
          self.create_tempdir().full_path,
          show_progress=False,
      )

  def test_unknown_baseline(self):
    with self.assertRaises(exceptions.ConfigError) as cm:
      suite.run_batch(
          [_spec("a", baseline="missing")],
          self.create_tempdir().full_path,
          show_progress=False,
      )
    self.assertEqual(cm.exception.key, "baseline")

  def test_unknown_suite(self):
    with self.assertRaises(exceptions.ConfigError) as cm:
      suite.run_suite("everything", self.create_tempdir().full_path)
    self.assertEqual(cm.exception.key, "suite")

  def test_available_suites(self):
    self.assertEqual(
        suite.available_suites(),
        [
            "fault-comparison",
            "flux-comparison",
            "model-DE",
            "normal-comparison",
        ],
    )


class ComparisonFrameTest(absltest.TestCase):

  def test_ordered_by_ratio_then_drop(self):
    def report(name, ratio, drop):
      return data.SummaryReport(
          name=name, model=name, limiting_ratio=ratio, insertion_drop=drop
      )

    reports = {
        "None": report("None", 1.0, 0.0),
        "A": report("A", 3.0, 0.02),
        "B": report("B", 3.0, 0.01),
        "C": report("C", None, 0.0),
    }
    batch = suite.BatchResult(
        specs={k: _spec(k) for k in reports},
        series={},
        reports=reports,
        paths=[],
    )
    frame = suite.comparison_frame(batch)
    self.assertEqual(list(frame["name"]), ["B", "A", "None", "C"])
    self.assertAlmostEqual(frame["insertion_drop_pct"][0], 1.0)


def _series(h0, h1, time):
  return data.TimeSeries(
      time=time,
      i_line=np.sin(2 * np.pi * 50.0 * time),
      v_fcl=np.zeros_like(time),
      v_dc=np.zeros_like(time),
      i_dc=np.zeros_like(time),
      h={"core0.middle": h0, "core1.middle": h1},
  )


class SuiteCheckTest(parameterized.TestCase):

  def _batch(self, reports, series=None):
    return suite.BatchResult(
        specs={k: _spec(k) for k in reports},
        series=series or {},
        reports=reports,
        paths=[],
    )

  def _drops(self, lower, higher):
    return self._batch({
        "D_normal": data.SummaryReport(
            name="D_normal", model="D", insertion_drop=lower
        ),
        "E_normal": data.SummaryReport(
            name="E_normal", model="E", insertion_drop=higher
        ),
    })

  @parameterized.named_parameters(
      ("clear_order", 0.010, 0.020, True, False),
      ("tie", 5.80e-4, 5.81e-4, True, True),
      ("reversed", 0.020, 0.010, False, False),
  )
  def test_strict_drop_order(self, lower, higher, passed, informational):
    check = suite._drop_order(  # pylint: disable=protected-access
        self._drops(lower, higher), Model.D, Model.E, strict=True
    )
    self.assertEqual(check.passed, passed)
    self.assertEqual(check.informational, informational)

  def test_tie_satisfies_non_strict_order(self):
    check = suite._drop_order(  # pylint: disable=protected-access
        self._drops(0.0101, 0.0100), Model.D, Model.E, strict=False
    )
    self.assertTrue(check.passed)
    self.assertFalse(check.informational)

  @parameterized.named_parameters(
      ("within_bound", 11000.0, True),
      ("above_bound", 12000.0, False),
  )
  def test_induced_dc_voltage_bound(self, peak, passed):
    # 0.1 * 500 / 60 * 14142.1 = 11785.1 V.
    batch = self._batch({
        "B_fault": data.SummaryReport(
            name="B_fault", model="B", peak_v_dc_v=peak
        )
    })
    check = suite._induced_dc_voltage(  # pylint: disable=protected-access
        batch, Model.B
    )
    self.assertEqual(check.passed, passed)
    self.assertFalse(check.informational)

  def test_alternation_of_middle_legs(self):
    time = np.arange(0.0, 0.07, 1e-4)
    s = np.sin(2 * np.pi * 50.0 * time)
    alternating = _series(
        1.0 - 0.99 * np.maximum(s, 0.0),
        1.0 - 0.99 * np.maximum(-s, 0.0),
        time,
    )
    one_sided = _series(
        1.0 - 0.99 * np.abs(s), np.ones_like(time), time
    )
    report = data.SummaryReport(name="A_fault", model="A")
    legs = ("core0.middle", "core1.middle")
    for ts, passed in ((alternating, True), (one_sided, False)):
      with self.subTest(passed=passed):
        batch = self._batch({"A_fault": report}, {"A_fault": ts})
        check = suite._alternation(  # pylint: disable=protected-access
            batch, "A_fault", legs
        )
        self.assertEqual(check.passed, passed)

  def test_flux_comparison_checks_every_three_leg_model(self):
    stub = suite.Check("stub", True)
    with mock.patch.object(
        suite, "_alternation", autospec=True, return_value=stub
    ) as alternation, mock.patch.object(
        suite, "_shorted_coil", autospec=True, return_value=[]
    ), mock.patch.object(
        suite, "_flux_conservation", autospec=True, return_value=stub
    ), mock.patch.object(
        suite, "_peak_flux_density", autospec=True, return_value=stub
    ):
      suite._flux_comparison_checks(  # pylint: disable=protected-access
          self._batch({})
      )
    runs = [c.args[1:] for c in alternation.call_args_list]
    legs = ("core0.middle", "core1.middle")
    self.assertEqual(
        runs, [("A_fault", legs), ("B_fault", legs), ("C_fault", legs)]
    )


class RunBatchTest(absltest.TestCase):

  def test_failure_writes_residuals_and_manifest(self):
    out = self.create_tempdir().full_path
    failing = _spec(
        "B_fault",
        model=Model.B,
        fault=cosim.FaultSpec(),
        sim=cosim.SimConfig(
            dt_s=2e-5, t_end_s=0.04, max_iter=1, max_halvings=0
        ),
    )
    with self.assertRaises(exceptions.NonConvergenceError):
      suite.run_batch([failing], out, show_progress=False)
    manifest = io.read_json(os.path.join(out, "manifest.json"))
    self.assertTrue(manifest["aborted"])
    self.assertEqual(manifest["failed"], ["B_fault"])
    residuals = io.read_json(os.path.join(out, "B_fault_residuals.json"))
    self.assertEqual(residuals["error"], "NonConvergenceError")
    self.assertIsNotNone(residuals["time_s"])

  def test_failure_is_reported_on_the_console(self):
    out = self.create_tempdir().full_path
    error = exceptions.NonConvergenceError("stuck", time_s=0.03)
    stdout = std_io.StringIO()
    with mock.patch.object(cosim, "run", autospec=True, side_effect=error):
      with contextlib.redirect_stdout(stdout):
        with self.assertRaises(exceptions.NonConvergenceError):
          suite.run_batch([_spec("A_fault")], out, show_progress=True)
    self.assertIn("A_fault", stdout.getvalue())
    self.assertIn("NonConvergenceError: stuck", stdout.getvalue())

  def test_run_scenarios_writes_files(self):
    out = self.create_tempdir().full_path
    variants = scenario.expand(
        scenario.parse({
            "name": "line",
            "fault": {"t_fault_s": 0.023},
            "sim": {"dt_s": 1e-4, "t_end_s": 0.08},
        })
    )
    batch = suite.run_scenarios(variants, out, show_progress=False)
    for name in ("line.csv", "line_baseline.csv", "line_summary.json"):
      self.assertTrue(os.path.exists(os.path.join(out, name)), name)

    loaded = io.read_waveform_csv(os.path.join(out, "line.csv"))
    self.assertLen(loaded, 801)
    self.assertEqual(loaded.time[230], batch.series["line"].time[230])

    summary = io.read_summary(os.path.join(out, "line_summary.json"))
    self.assertAlmostEqual(summary.limiting_ratio, 1.0)
    self.assertEqual(summary.provenance.config_hash, variants[0].config_hash)

    baseline = io.read_waveform_csv(os.path.join(out, "line_baseline.csv"))
    recomputed = cosim.extract_metrics(loaded, baseline)
    for field in ("first_peak_a", "later_peak_a", "normal_amplitude_a"):
      expected = getattr(summary, field)
      self.assertAlmostEqual(
          getattr(recomputed, field), expected, delta=1e-9 * abs(expected)
      )

  def test_summary_matches_waveform_file(self):
    out = self.create_tempdir().full_path
    dt, t_fault, t_end = 2e-5, 0.023, 0.065
    variants = scenario.expand(
        scenario.parse({
            "name": "d",
            "fault": {"t_fault_s": t_fault},
            "fcl": {"model": "D"},
            "sim": {"dt_s": dt, "t_end_s": t_end},
        })
    )
    suite.run_scenarios(variants, out, show_progress=False)
    summary = io.read_json(os.path.join(out, "d_summary.json"))

    n_per = int(round(0.02 / dt))

    def read(name):
      return io.read_waveform_csv(os.path.join(out, name))

    def last_cycle_amplitude(ts):
      tail = slice(len(ts) - 1 - n_per, len(ts) - 1)
      phase = 100.0 * np.pi * ts.time[tail]
      i = ts.i_line[tail]
      return 2.0 / n_per * abs(np.sum(i * np.exp(-1j * phase)))

    limited, baseline = read("d.csv"), read("d_baseline.csv")
    i_f = int(round(t_fault / dt))
    first_cycle = np.abs(limited.i_line[i_f : i_f + n_per + 1])
    self.assertAlmostEqual(
        summary["first_peak_a"] / np.max(first_cycle), 1.0, delta=1e-12
    )
    ratio = last_cycle_amplitude(baseline) / last_cycle_amplitude(limited)
    self.assertAlmostEqual(summary["limiting_ratio"] / ratio, 1.0, delta=1e-9)
    self.assertGreater(ratio, 1.0)

  def test_identical_config_gives_identical_csv(self):
    variants = scenario.expand(
        scenario.parse({"name": "det", "sim": {"dt_s": 1e-4, "t_end_s": 0.02}})
    )
    contents = []
    for _ in range(2):
      out = self.create_tempdir().full_path
      suite.run_scenarios(variants, out, show_progress=False)
      with open(os.path.join(out, "det.csv"), encoding="utf-8") as f:
        contents.append(f.read())
    self.assertEqual(contents[0], contents[1])


@pytest.mark.slow
class SuiteRunTest(absltest.TestCase):

  def test_normal_comparison(self):
    out = self.create_tempdir().full_path
    result = suite.run_suite(
        "normal-comparison", out, sim=_COARSE, workers=2, show_progress=False
    )
    for model in ("None", "A", "B", "C"):
      self.assertTrue(os.path.exists(os.path.join(out, f"{model}_normal.csv")))
    frame = pd.read_csv(os.path.join(out, "comparison.csv"))
    self.assertLen(frame, 4)
    self.assertTrue(_check(result, "nodal flux residual").passed)
    for model in ("A", "B", "C"):
      self.assertTrue(_check(result, f"model {model} insertion drop").passed)
    summary = io.read_json(os.path.join(out, "summary.json"))
    self.assertEqual(summary["suite"], "normal-comparison")
    self.assertLen(summary["runs"], 4)
    manifest = io.read_json(os.path.join(out, "manifest.json"))
    self.assertFalse(manifest["aborted"])
    self.assertEmpty(manifest["not_run"])

  def test_model_de_energy_drift(self):
    out = self.create_tempdir().full_path
    result = suite.run_suite(
        "model-DE", out, sim=_COARSE, workers=3, show_progress=False
    )
    self.assertTrue(_check(result, "D_normal: magnetic energy drift").passed)
    self.assertLen(result.batch.reports, 6)
    self.assertIsNotNone(result.batch.reports["E_fault"].first_peak_a)


if __name__ == "__main__":
  absltest.main()

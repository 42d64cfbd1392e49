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

import dataclasses
import json

from absl.testing import absltest
from absl.testing import parameterized
import numpy as np

from scfcl import data_lib
from scfcl.core import data
from scfcl.core import types


def _report(**kwargs):
  defaults = dict(
      name="model_b_fault",
      model="B",
      first_peak_a=21000.0,
      later_peak_a=18000.0,
      steady_fault_amplitude_a=15000.0,
      normal_amplitude_a=1590.0,
      limiting_ratio=4.53,
      insertion_drop=0.012,
      peak_b_t={"core0.left": 1.9, "core1.left": -1.9},
      peak_v_dc_v=120.0,
      total_turns=1120,
      newton=data.SolverStats(steps=10000, newton_iterations=25000),
      provenance=data.Provenance(
          config_hash="abc", version="1.0.0", dt=1e-5, integrator="trapezoidal"
      ),
  )
  defaults.update(kwargs)
  return data.SummaryReport(**defaults)


class EnumAsdictFactoryTest(parameterized.TestCase):

  @parameterized.named_parameters(
      ("enum", types.Integrator.TRAPEZOIDAL, "trapezoidal"),
      ("numpy_float", np.float64(1.5), 1.5),
      ("numpy_int", np.int64(7), 7),
      ("array", np.array([1.0, 2.0]), [1.0, 2.0]),
      ("nested_map", {"a": np.float32(0.5)}, {"a": 0.5}),
      ("none", None, None),
  )
  def test_converts_values(self, value, expected):
    result = data_lib.enum_asdict_factory([("field", value)])
    self.assertEqual(result, {"field": expected})
    self.assertEqual(json.loads(json.dumps(result)), {"field": expected})

  def test_skips_private_fields(self):
    result = data_lib.enum_asdict_factory([("_cache", 1), ("kept", 2)])
    self.assertEqual(result, {"kept": 2})

  def test_numpy_int_becomes_python_int(self):
    result = data_lib.enum_asdict_factory([("n", np.int64(3))])
    self.assertIsInstance(result["n"], int)


class ReportToDictTest(absltest.TestCase):

  def test_none_report_is_empty(self):
    self.assertEqual(data_lib.report_to_dict(None), {})

  def test_report_is_json_ready(self):
    result = data_lib.report_to_dict(_report())
    text = json.dumps(result, allow_nan=False)
    self.assertIn('"limiting_ratio": 4.53', text)
    self.assertAlmostEqual(result["insertion_drop_pct"], 1.2)
    self.assertEqual(result["newton"]["steps"], 10000)
    self.assertEqual(result["provenance"]["integrator"], "trapezoidal")

  def test_normal_run_keeps_none_metrics(self):
    result = data_lib.report_to_dict(
        _report(first_peak_a=None, limiting_ratio=None, insertion_drop=None)
    )
    self.assertIsNone(result["first_peak_a"])
    self.assertIsNone(result["insertion_drop_pct"])

  def test_dict_to_report_restores_report(self):
    report = _report()
    restored = data_lib.dict_to_report(
        json.loads(json.dumps(data_lib.report_to_dict(report)))
    )
    self.assertEqual(restored, report)

  def test_stats_to_dict(self):
    stats = data.SolverStats(steps=3, max_flux_residual_ratio=1e-12)
    self.assertEqual(
        data_lib.stats_to_dict(stats), dataclasses.asdict(stats)
    )


if __name__ == "__main__":
  absltest.main()

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

"""Tests for scfcl.io."""

import math
import os

from absl.testing import absltest
import numpy as np

from scfcl import io
from scfcl.core import data
from scfcl.core import exceptions


def _series(t_fault=0.023, t_clear=None):
  t = np.arange(0.0, 0.04 + 1e-12, 1e-4)
  w = 2 * math.pi * 50
  return data.TimeSeries(
      time=t,
      i_line=1590.0 * np.sin(w * t + 0.1),
      v_fcl=np.cos(w * t),
      v_dc=np.full_like(t, 450.0),
      i_dc=np.full_like(t, 450.0),
      i_shorted={"core0.shorted": np.sin(w * t) * 7.0},
      b={"core0.left": np.tanh(np.sin(w * t)), "core0.gap": 0.1 * t},
      h={"core0.left": 500.0 * np.sin(w * t), "core0.gap": 2.0 * t},
      t_fault=t_fault,
      t_clear=t_clear,
  )


class WaveformCsvTest(absltest.TestCase):

  def test_header_and_column_order(self):
    path = os.path.join(self.create_tempdir().full_path, "wave.csv")
    io.write_waveform_csv(_series(), path)
    with open(path, encoding="utf-8") as f:
      header = f.readline().strip()
      columns = f.readline().strip().split(",")
    self.assertEqual(
        header,
        "# scfcl waveform v1 frequency_hz=50.0 t_fault_s=0.023"
        " t_clear_s=none",
    )
    self.assertEqual(
        columns,
        [
            "time_s",
            "i_line_A",
            "v_fcl_V",
            "v_dc_V",
            "i_shorted_core0.shorted_A",
            "B_core0.left_T",
            "B_core0.gap_T",
            "H_core0.left_A_per_m",
            "H_core0.gap_A_per_m",
            "i_dc_A",
        ],
    )
    self.assertEqual(columns, io.waveform_columns(_series()))

  def test_reload_is_exact(self):
    ts = _series(t_clear=0.03)
    path = os.path.join(self.create_tempdir().full_path, "sub", "wave.csv")
    io.write_waveform_csv(ts, path)
    loaded = io.read_waveform_csv(path)
    np.testing.assert_array_equal(loaded.time, ts.time)
    np.testing.assert_array_equal(loaded.i_line, ts.i_line)
    np.testing.assert_array_equal(loaded.b["core0.left"], ts.b["core0.left"])
    np.testing.assert_array_equal(
        loaded.i_shorted["core0.shorted"], ts.i_shorted["core0.shorted"]
    )
    self.assertEqual(loaded.t_fault, 0.023)
    self.assertEqual(loaded.t_clear, 0.03)
    self.assertEqual(loaded.frequency, 50.0)

  def test_no_temporary_files_left_behind(self):
    tmp = self.create_tempdir()
    io.write_waveform_csv(_series(), os.path.join(tmp.full_path, "w.csv"))
    self.assertEqual(os.listdir(tmp.full_path), ["w.csv"])

  def test_missing_file(self):
    with self.assertRaises(IOError):
      io.read_waveform_csv("/nonexistent/wave.csv")

  def test_foreign_csv_rejected(self):
    path = self.create_tempdir().create_file("x.csv", content="a,b\n1,2\n")
    with self.assertRaises(exceptions.MetricsError):
      io.read_waveform_csv(path.full_path)


class JsonTest(absltest.TestCase):

  def test_summary_round_trip(self):
    report = data.SummaryReport(
        name="b",
        model="B",
        limiting_ratio=4.5,
        peak_b_t={"core0.left": 1.9},
        newton=data.SolverStats(steps=4),
    )
    path = os.path.join(self.create_tempdir().full_path, "summary.json")
    io.write_summary(report, path)
    self.assertEqual(io.read_summary(path), report)

  def test_nan_is_refused(self):
    path = os.path.join(self.create_tempdir().full_path, "x.json")
    with self.assertRaises(ValueError):
      io.write_json({"x": float("nan")}, path)
    self.assertFalse(os.path.exists(path))

  def test_residual_trace(self):
    error = exceptions.NonConvergenceError(
        "stuck", residual_history=[1.0, 0.5, 0.4], time_s=0.031
    )
    path = os.path.join(self.create_tempdir().full_path, "residuals.json")
    io.write_residuals(error, path, name="model_b")
    payload = io.read_json(path)
    self.assertEqual(payload["scenario"], "model_b")
    self.assertEqual(payload["error"], "NonConvergenceError")
    self.assertEqual(payload["time_s"], 0.031)
    self.assertEqual(payload["residual_history"], [1.0, 0.5, 0.4])


if __name__ == "__main__":
  absltest.main()

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

"""Tests for scfcl.progress module."""

import contextlib
import io
import unittest

import tqdm

from scfcl import progress
from scfcl.core import data


class ProgressTest(unittest.TestCase):

  def test_suite_progress_bar(self):
    pbar = progress.create_suite_progress_bar(8, "fault-comparison")
    self.assertIsInstance(pbar, tqdm.tqdm)
    self.assertEqual(pbar.total, 8)
    self.assertIn("scfcl", pbar.desc)
    self.assertIn("fault-comparison", pbar.desc)
    pbar.close()

  def test_format_run_stats(self):
    stats = data.SolverStats(steps=10000, newton_iterations=25000)
    text = progress.format_run_stats(stats)
    self.assertIn("10,000", text)
    self.assertIn("25,000", text)

  def test_run_messages(self):
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
      progress.print_run_complete("B_fault", data.SolverStats(steps=4), 1.5)
      progress.print_run_failed("C_fault", ValueError("boom"))
      progress.print_save_complete(["/tmp/out/B_fault.csv", "B.json"])
    text = out.getvalue()
    self.assertIn("B_fault", text)
    self.assertIn("1.50s", text)
    self.assertIn("ValueError: boom", text)
    self.assertIn("B_fault.csv, B.json", text)
    self.assertNotIn("/tmp/out", text)

  def test_suite_summary(self):
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
      progress.print_suite_summary(
          "model-DE", completed=4, failed=0, checks_failed=1, out_dir="rep"
      )
    text = out.getvalue()
    self.assertIn("model-DE", text)
    self.assertIn("Failed checks", text)
    self.assertIn("rep", text)


if __name__ == "__main__":
  unittest.main()

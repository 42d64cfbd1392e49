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

"""Tests for scfcl.scenario."""

import json
import math
import textwrap

from absl.testing import absltest
from absl.testing import parameterized

from scfcl import scenario
from scfcl.core import exceptions
from scfcl.core import types

_MODEL_B = {
    "name": "model_b",
    "fault": {"t_fault_s": 0.023},
    "fcl": {"model": "B", "windings": {"n_dc": 500, "i_dc_a": 450}},
    "sim": {"dt_s": 1e-5, "t_end_s": 0.1},
}


class ParseTest(parameterized.TestCase):

  def test_empty_mapping_takes_defaults(self):
    file = scenario.parse({})
    circuit, sim = scenario.to_domain(file)
    self.assertEqual(circuit.name, "scenario")
    self.assertAlmostEqual(circuit.u_peak_v, 14142.1)
    self.assertIsNone(circuit.fault)
    self.assertIs(circuit.fcl.model, types.ScfclModel.NONE)
    self.assertEqual(sim.dt_s, 1e-5)

  def test_nested_values_reach_domain(self):
    circuit, sim = scenario.to_domain(scenario.parse(_MODEL_B))
    self.assertIs(circuit.fcl.model, types.ScfclModel.B)
    self.assertEqual(circuit.fcl.windings.n_dc, 500)
    self.assertEqual(circuit.fault.t_fault_s, 0.023)
    self.assertEqual(sim.t_end_s, 0.1)

  def test_return_area_scale_reaches_assembly(self):
    file = scenario.parse(
        {"fcl": {"model": "B", "geometry": {"return_area_scale": 1.0}}}
    )
    circuit, _ = scenario.to_domain(file)
    self.assertEqual(circuit.fcl.geometry.return_area_scale, 1.0)
    right = circuit.fcl.build().branch("core0.right")
    self.assertAlmostEqual(right.area, 0.04)

  @parameterized.named_parameters(
      dict(
          testcase_name="unknown_nested_key",
          content={"fcl": {"bogus": 1}},
          key="fcl.bogus",
      ),
      dict(
          testcase_name="unknown_top_level_key",
          content={"voltage": 1.0},
          key="voltage",
      ),
      dict(
          testcase_name="wrong_type",
          content={"sim": {"dt_s": "fast"}},
          key="sim.dt_s",
      ),
      dict(
          testcase_name="unknown_model",
          content={"fcl": {"model": "Z"}},
          key="fcl.model",
      ),
      dict(
          testcase_name="path_in_name",
          content={"name": "../evil"},
          key="name",
      ),
  )
  def test_schema_errors_name_the_key(self, content, key):
    with self.assertRaises(exceptions.ConfigError) as cm:
      scenario.parse(content)
    self.assertEqual(cm.exception.key, key)
    self.assertIn(key, str(cm.exception))

  @parameterized.named_parameters(
      ("negative_dt", {"sim": {"dt_s": -1.0}}),
      ("negative_gap", {"fcl": {"geometry": {"l_gap_m": -0.1}}}),
      ("clear_before_fault", {"fault": {"t_fault_s": 0.05, "t_clear_s": 0.01}}),
  )
  def test_range_errors_are_config_errors(self, content):
    with self.assertRaises(exceptions.ConfigError):
      scenario.parse(content)

  def test_bad_material_reports_material_key(self):
    with self.assertRaises(exceptions.ConfigError) as cm:
      scenario.parse({"fcl": {"material": {"kind": "linear", "mu_r": 0.5}}})
    self.assertEqual(cm.exception.key, "fcl.material")

  def test_rms_basis_scales_to_peak(self):
    file = scenario.parse({"u_source_v": 10000.0, "voltage_basis": "rms"})
    circuit, _ = scenario.to_domain(file)
    self.assertAlmostEqual(circuit.u_peak_v, 10000.0 * math.sqrt(2.0))

  def test_inception_angle_sets_source_phase_at_fault(self):
    file = scenario.parse(
        {"inception_angle_rad": 0.5, "fault": {"t_fault_s": 0.023}}
    )
    circuit, _ = scenario.to_domain(file)
    at_fault = circuit.omega * 0.023 + circuit.phase_rad
    self.assertAlmostEqual(math.remainder(at_fault - 0.5, 2 * math.pi), 0.0)


class LoadFileTest(absltest.TestCase):

  def test_json_and_yaml_are_equivalent(self):
    tmp = self.create_tempdir()
    json_path = tmp.create_file("b.json", content=json.dumps(_MODEL_B))
    yaml_path = tmp.create_file(
        "b.yaml",
        content=textwrap.dedent("""\
            name: model_b
            fault:
              t_fault_s: 0.023
            fcl:
              model: B
              windings:
                n_dc: 500
                i_dc_a: 450
            sim:
              dt_s: 1.0e-5
              t_end_s: 0.1
            """),
    )
    from_json = scenario.load_file(json_path.full_path)
    from_yaml = scenario.load_file(yaml_path.full_path)
    self.assertEqual(from_json, from_yaml)
    self.assertEqual(
        scenario.config_hash(from_json), scenario.config_hash(from_yaml)
    )

  def test_missing_file(self):
    with self.assertRaises(exceptions.ConfigError):
      scenario.load_file(self.create_tempdir().full_path + "/absent.json")

  def test_unparsable_file(self):
    path = self.create_tempdir().create_file("bad.json", content="{name:")
    with self.assertRaises(exceptions.ConfigError):
      scenario.load_file(path.full_path)


class ExpandTest(absltest.TestCase):

  def test_without_sweep_yields_one_variant(self):
    variants = scenario.expand(scenario.parse(_MODEL_B))
    self.assertLen(variants, 1)
    self.assertEqual(variants[0].name, "model_b")
    self.assertLen(variants[0].config_hash, 64)

  def test_sweep_is_cartesian_product(self):
    content = dict(
        _MODEL_B,
        sweep={"inception_angle_rad": [0.0, 1.5708], "n_shorted": [100, 500]},
    )
    variants = scenario.expand(scenario.parse(content))
    self.assertEqual(
        [v.name for v in variants],
        [
            "model_b__inception_angle_rad=0__n_shorted=100",
            "model_b__inception_angle_rad=0__n_shorted=500",
            "model_b__inception_angle_rad=1.5708__n_shorted=100",
            "model_b__inception_angle_rad=1.5708__n_shorted=500",
        ],
    )
    self.assertEqual(variants[0].scenario.fcl.windings.n_shorted, 100)
    self.assertEqual(variants[3].scenario.fcl.windings.n_shorted, 500)
    self.assertLen({v.config_hash for v in variants}, 4)

  def test_gap_sweep_reaches_geometry(self):
    content = dict(_MODEL_B, sweep={"l_gap_m": [0.1, 0.3]})
    variants = scenario.expand(scenario.parse(content))
    self.assertEqual(
        [v.scenario.fcl.geometry.l_gap_m for v in variants], [0.1, 0.3]
    )

  def test_hash_is_reproducible(self):
    first = scenario.expand(scenario.parse(_MODEL_B))[0].config_hash
    second = scenario.expand(scenario.parse(_MODEL_B))[0].config_hash
    self.assertEqual(first, second)

  def test_dt_override_changes_hash(self):
    file = scenario.parse(_MODEL_B)
    base = scenario.expand(file)[0]
    finer = scenario.expand(file, dt_s=5e-6)[0]
    self.assertEqual(finer.sim.dt_s, 5e-6)
    self.assertNotEqual(base.config_hash, finer.config_hash)


if __name__ == "__main__":
  absltest.main()

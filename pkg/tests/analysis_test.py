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

"""Tests for scfcl.analysis."""

import math

from absl.testing import absltest
from absl.testing import parameterized
import numpy as np

from scfcl import analysis
from scfcl import material
from scfcl.core import exceptions

_LINE = analysis.LineParams.from_frequency(14142.1, 50.0, 0.1095, 5.63419e-4)
_TAU = 5.63419e-4 / 0.1095


class LineParamsTest(absltest.TestCase):

  def test_derived_fields_consistent(self):
    self.assertAlmostEqual(
        math.tan(_LINE.phi), _LINE.omega * _LINE.l_line / _LINE.r_line,
        places=12,
    )
    self.assertAlmostEqual(
        _LINE.z_mag**2, _LINE.r_line**2 + (_LINE.omega * _LINE.l_line) ** 2,
        places=12,
    )

  def test_prospective_amplitude(self):
    self.assertAlmostEqual(
        analysis.prospective_amplitude(_LINE), 67947, delta=10
    )

  def test_rejects_non_positive_resistance(self):
    with self.assertRaises(exceptions.InputError):
      analysis.LineParams(1.0, 314.0, 0.0, 1e-3)


class FaultCurrentTest(parameterized.TestCase):

  def test_value_at_inception(self):
    i = analysis.fault_current(_LINE, 1234.5, 0.023, _TAU, 0.023)
    self.assertAlmostEqual(i, 1234.5, places=6)

  def test_tends_to_steady_phasor(self):
    t = 0.5 + np.linspace(0.0, 0.02, 2001)
    i = analysis.fault_current(_LINE, 1000.0, 0.023, _TAU, t)
    amp = analysis.prospective_amplitude(_LINE)
    self.assertAlmostEqual(np.max(np.abs(i)) / amp, 1.0, places=5)

  def test_worst_first_peak_exceeds_steady_amplitude(self):
    _, peak = analysis.worst_first_peak(_LINE, _TAU)
    self.assertGreater(peak, analysis.prospective_amplitude(_LINE))

  def test_literal_variant_differs_after_inception(self):
    t = np.array([0.023, 0.026])
    standard = analysis.fault_current(_LINE, 0.0, 0.023, _TAU, t)
    literal = analysis.fault_current(_LINE, 0.0, 0.023, _TAU, t, literal=True)
    self.assertAlmostEqual(literal[0], standard[0], places=6)
    self.assertNotAlmostEqual(literal[1], standard[1], places=0)

  def test_before_inception_raises(self):
    with self.assertRaises(exceptions.InputError):
      analysis.fault_current(_LINE, 0.0, 0.023, _TAU, 0.02)

  def test_solves_the_line_equation(self):
    t = np.linspace(0.023, 0.06, 3701)
    i = analysis.fault_current(_LINE, 500.0, 0.023, _TAU, t)
    didt = np.gradient(i, t)
    lhs = _LINE.u_peak * np.sin(_LINE.omega * t)
    rhs = _LINE.r_line * i + _LINE.l_line * didt
    interior = slice(5, -5)
    np.testing.assert_allclose(
        rhs[interior], lhs[interior], atol=1e-3 * _LINE.u_peak
    )


class TimeConstantsTest(parameterized.TestCase):

  def test_no_limiter(self):
    tau_r, tau_x = analysis.time_constants(0.1095, 5.63419e-4)
    self.assertAlmostEqual(tau_r, 5.1454e-3, places=7)
    self.assertAlmostEqual(tau_x, 5.1454e-3, places=7)

  def test_resistive_limiter(self):
    tau_r, _ = analysis.time_constants(0.1095, 5.63419e-4, r_fcl=0.1095)
    self.assertAlmostEqual(tau_r, 2.5727e-3, places=7)

  @parameterized.parameters((0.05, 1e-4), (1.0, 3e-3), (10.0, 0.2))
  def test_ordering(self, r_fcl, l_fcl):
    tau_r, tau_x = analysis.time_constants(0.1095, 5.63419e-4, r_fcl, l_fcl)
    self.assertLess(tau_r, _TAU)
    self.assertLess(_TAU, tau_x)

  @parameterized.parameters(0.01, 0.5, 3.0)
  def test_equal_impedance_ordering(self, z_fcl):
    omega = 2 * math.pi * 50
    tau_r, _ = analysis.time_constants(0.1095, 5.63419e-4, r_fcl=z_fcl)
    _, tau_x = analysis.time_constants(
        0.1095, 5.63419e-4, l_fcl=z_fcl / omega
    )
    self.assertLess(tau_r, tau_x)


class ResonantImpedanceTest(absltest.TestCase):

  def test_half_resonant_capacitor(self):
    omega, l = 314.159, 1e-3
    c = 0.5 / (omega**2 * l)
    self.assertAlmostEqual(
        analysis.resonant_impedance(omega, l, c), 0.62832, places=5
    )

  def test_resonance_raises(self):
    omega, l = 314.159, 1e-3
    with self.assertRaises(exceptions.ResonanceError):
      analysis.resonant_impedance(omega, l, 1.0 / (omega**2 * l))

  def test_resonance_is_an_input_error(self):
    self.assertTrue(issubclass(exceptions.ResonanceError, ValueError))

  def test_small_capacitor_limit(self):
    self.assertAlmostEqual(
        analysis.resonant_impedance(314.159, 1e-3, 0.0), 0.314159
    )

  def test_above_resonance_is_capacitive(self):
    omega, l = 314.159, 1e-3
    z = analysis.resonant_impedance(omega, l, 2.0 / (omega**2 * l))
    self.assertLess(z, 0.0)


class CoreFormulaTest(parameterized.TestCase):

  def test_inductances(self):
    l_x, l_y = analysis.inductances(60, 0.04, 2.0, 1000.0, 2.0)
    self.assertAlmostEqual(l_x / 9.04779e-2, 1.0, places=5)
    self.assertAlmostEqual(l_y / 1.80956e-4, 1.0, places=5)

  def test_equal_permeabilities(self):
    l_x, l_y = analysis.inductances(60, 0.04, 2.0, 7.0, 7.0)
    self.assertEqual(l_x, l_y)

  def test_saturation_margin(self):
    margin = analysis.saturation_margin(500, 450, 60, 1000, 5000, 2.0)
    self.assertTrue(margin.satisfied)
    self.assertAlmostEqual(margin.h_s, 77500.0)

  def test_saturation_margin_boundary(self):
    margin = analysis.saturation_margin(500, 132, 60, 1000, 3000, 2.0)
    self.assertEqual(margin.h_s, 0.0)
    self.assertFalse(margin.satisfied)

  def test_saturation_margin_violated(self):
    margin = analysis.saturation_margin(500, 100, 60, 1000, 5000, 2.0)
    self.assertFalse(margin.satisfied)
    self.assertLess(margin.h_s, 0.0)

  @parameterized.parameters(
      (500, 60, 14142.1, 117851.0), (60, 60, 14142.1, 14142.1), (500, 60, 0, 0)
  )
  def test_induced_dc_overvoltage(self, n_dc, n_ac, u, expected):
    self.assertAlmostEqual(
        analysis.induced_dc_overvoltage(n_dc, n_ac, u), expected, places=0
    )

  @parameterized.parameters(
      (60, 450, 450, 60), (60, 570, 450, 76), (60, 0, 450, 0)
  )
  def test_aux_turns(self, n_ac, i_l, i_dc, expected):
    self.assertEqual(analysis.aux_turns(n_ac, i_l, i_dc), expected)

  def test_aux_turns_rounds_up(self):
    self.assertEqual(analysis.aux_turns(60, 451, 450), 61)

  def test_inductive_dc_bias(self):
    bias = analysis.inductive_dc_bias(material.MU0, 500, 450, 2.0, 1.8, 5000)
    self.assertEqual(bias.b_mid, 0.0)
    self.assertAlmostEqual(bias.b_outer, 1.93509, places=5)

  def test_inductive_dc_bias_at_knee(self):
    bias = analysis.inductive_dc_bias(material.MU0, 500, 20, 2.0, 1.8, 5000)
    self.assertAlmostEqual(bias.b_outer, 1.8, places=12)

  def test_inductive_fcl_inductances(self):
    l_sat, l_lin = analysis.inductive_fcl_inductances(60, 0.04, 2.0, 0.3)
    self.assertAlmostEqual(l_sat / 7.86765e-5, 1.0, places=5)
    self.assertAlmostEqual(l_lin / 1.20637e-3, 1.0, places=5)
    self.assertAlmostEqual(l_lin / l_sat, 15.333, places=3)

  def test_limiting_exceeds_insertion_when_leg_longer_than_gap(self):
    for l_outer, l_gap in ((2.0, 0.3), (0.5, 0.4), (10.0, 1.0)):
      l_sat, l_lin = analysis.inductive_fcl_inductances(
          60, 0.04, l_outer, l_gap
      )
      self.assertLess(l_sat, l_lin)

  def test_long_gap_limit(self):
    l_sat, l_lin = analysis.inductive_fcl_inductances(60, 0.04, 2.0, 1e9)
    self.assertLess(l_sat, 1e-12)
    self.assertLess(l_lin, 1e-12)


if __name__ == "__main__":
  absltest.main()

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

"""Tests for scfcl.mec."""

from absl.testing import absltest
from absl.testing import parameterized
import numpy as np

from scfcl import material
from scfcl import mec
from scfcl.core import exceptions
from scfcl.core import types

_LINEAR = material.BHCurve.linear(1000.0)
_SAT = material.BHCurve.saturating(b_sat=1.8, h_knee=500.0)


def _single_loop(curve, turns=100, sign=1):
  """One core branch closing on itself, with one winding."""
  return mec.MagneticNetwork(
      nodes=("n",),
      branches=(mec.Branch.core("core", "n", "n", length=2.0, area=0.04,
                                curve=curve),),
      windings=(mec.WindingLink("w", "core", turns, sign),),
  )


def _three_leg(curve, ac_sign=1):
  """Left core leg with dc coil, middle core leg with ac coil, gapped right."""
  return mec.MagneticNetwork(
      nodes=("bottom", "top"),
      branches=(
          mec.Branch.core("left", "bottom", "top", length=2.0, area=0.04,
                          curve=curve),
          mec.Branch.core("middle", "bottom", "top", length=2.0, area=0.04,
                          curve=curve),
          mec.Branch.gap("right", "bottom", "top", length=0.3, area=0.04),
      ),
      windings=(
          mec.WindingLink("dc", "left", 500, 1, types.WindingRole.DC_SOURCE),
          mec.WindingLink("ac", "middle", 60, ac_sign),
      ),
  )


def _mirror(curve):
  """Two identical outer legs in parallel with a middle gap."""
  return mec.MagneticNetwork(
      nodes=("bottom", "top"),
      branches=(
          mec.Branch.core("left", "bottom", "top", length=2.0, area=0.04,
                          curve=curve),
          mec.Branch.gap("middle", "bottom", "top", length=0.3, area=0.08),
          mec.Branch.core("right", "bottom", "top", length=2.0, area=0.04,
                          curve=curve),
      ),
      windings=(
          mec.WindingLink("ac_left", "left", 60, 1),
          mec.WindingLink("ac_right", "right", 60, 1),
      ),
  )


class BranchReluctanceTest(parameterized.TestCase):

  def test_core_defaults_to_soft_iron(self):
    core = mec.Branch.core("c", "a", "b", length=2.0, area=0.04)
    self.assertIs(core.material, material.DEFAULT_SOFT_IRON)
    self.assertGreater(mec.branch_reluctance(core), 0.0)

  def test_gap(self):
    gap = mec.Branch.gap("g", "a", "b", length=0.3, area=0.04)
    self.assertAlmostEqual(mec.branch_reluctance(gap) / 5.96831e6, 1.0, 5)

  @parameterized.parameters(0.0, 0.5, 1.2)
  def test_linear_core_independent_of_b(self, b):
    core = mec.Branch.core("c", "a", "b", length=2.0, area=0.04, curve=_LINEAR)
    self.assertAlmostEqual(mec.branch_reluctance(core, b) / 3.97887e4, 1.0, 5)

  def test_series_core_and_gap_right_leg(self):
    core = mec.Branch.core("c", "a", "b", length=2.0, area=0.04, curve=_LINEAR)
    gap = mec.Branch.gap("g", "a", "b", length=0.3, area=0.04)
    total = mec.branch_reluctance(core) + mec.branch_reluctance(gap)
    self.assertAlmostEqual(total / 6.00810e6, 1.0, 5)
    self.assertAlmostEqual(total / mec.branch_reluctance(core), 151.0, 0)

  def test_saturating_core_uses_secant(self):
    core = mec.Branch.core("c", "a", "b", length=2.0, area=0.04, curve=_SAT)
    b = material.b_of_h(_SAT, 5e4)
    expected = 2.0 * 5e4 / (b * 0.04)
    self.assertAlmostEqual(mec.branch_reluctance(core, b) / expected, 1.0, 9)

  def test_fringing_factor_scales_gap(self):
    plain = mec.Branch.gap("g", "a", "b", length=0.3, area=0.04)
    fringed = mec.Branch.gap(
        "g", "a", "b", length=0.3, area=0.04, fringing_factor=1.25
    )
    self.assertAlmostEqual(
        mec.branch_reluctance(plain) / mec.branch_reluctance(fringed), 1.25
    )

  def test_pm_reluctance(self):
    pm = mec.Branch.pm("m", "a", "b", mmf=1000.0, reluctance=2e5)
    self.assertEqual(mec.branch_reluctance(pm, 3.0), 2e5)


class NetworkValidationTest(parameterized.TestCase):

  def test_disconnected(self):
    with self.assertRaisesRegex(exceptions.TopologyError, "not connected"):
      mec.MagneticNetwork(
          nodes=("a", "b", "c"),
          branches=(mec.Branch.gap("g", "a", "b", length=1.0, area=1.0),),
      )

  def test_undeclared_node(self):
    with self.assertRaises(exceptions.TopologyError):
      mec.MagneticNetwork(
          nodes=("a",),
          branches=(mec.Branch.gap("g", "a", "z", length=1.0, area=1.0),),
      )

  def test_no_branches(self):
    with self.assertRaises(exceptions.TopologyError):
      mec.MagneticNetwork(nodes=("a",), branches=())

  def test_winding_on_unknown_branch(self):
    with self.assertRaises(exceptions.TopologyError):
      mec.MagneticNetwork(
          nodes=("a",),
          branches=(mec.Branch.gap("g", "a", "a", length=1.0, area=1.0),),
          windings=(mec.WindingLink("w", "nope", 10),),
      )

  @parameterized.named_parameters(
      dict(testcase_name="zero_turns", turns=0, sign=1),
      dict(testcase_name="fractional_turns", turns=2.5, sign=1),
      dict(testcase_name="bad_sign", turns=3, sign=2),
  )
  def test_bad_winding(self, turns, sign):
    with self.assertRaises(exceptions.TopologyError):
      mec.WindingLink("w", "g", turns, sign)

  def test_non_positive_length(self):
    with self.assertRaises(exceptions.TopologyError):
      mec.Branch.gap("g", "a", "b", length=0.0, area=1.0)

  def test_core_requires_material(self):
    with self.assertRaises(exceptions.TopologyError):
      mec.Branch("c", "a", "b", types.BranchKind.CORE)

  def test_without_windings(self):
    net = _three_leg(_LINEAR)
    stripped = net.without_windings(types.WindingRole.DC_SOURCE)
    self.assertEqual([w.id for w in stripped.windings], ["ac"])
    self.assertEqual(stripped.branches, net.branches)


class SolveTest(parameterized.TestCase):

  def test_single_linear_loop(self):
    sol = mec.solve(_single_loop(_LINEAR), {"w": 10.0})
    self.assertAlmostEqual(sol.fluxes["core"] / 2.51327e-2, 1.0, 5)

  def test_current_divider(self):
    net = mec.MagneticNetwork(
        nodes=("a", "b"),
        branches=(
            mec.Branch.pm("src", "b", "a", mmf=3000.0, reluctance=1.0),
            mec.Branch.pm("r1", "a", "b", mmf=0.0, reluctance=1e6),
            mec.Branch.pm("r2", "a", "b", mmf=0.0, reluctance=3e6),
        ),
    )
    sol = mec.solve(net)
    np.testing.assert_allclose(
        [sol.fluxes["r1"], sol.fluxes["r2"]], [3e-3, 1e-3], rtol=1e-5
    )
    self.assertEqual(sol.iterations, 1)

  def test_saturating_single_loop_matches_inverse_law(self):
    sol = mec.solve(_single_loop(_SAT, turns=500), {"w": 450.0})
    self.assertAlmostEqual(sol.h["core"], 112500.0, places=6)
    self.assertAlmostEqual(
        sol.fluxes["core"], material.b_of_h(_SAT, 112500.0) * 0.04, places=12
    )

  def test_flux_conservation_in_saturation(self):
    net = _three_leg(_SAT)
    sol = mec.solve(net, {"dc": 450.0, "ac": 3000.0})
    fluxes = np.array(list(sol.fluxes.values()))
    self.assertLessEqual(
        abs(fluxes.sum()), 1e-9 * np.max(np.abs(fluxes))
    )
    self.assertLessEqual(sol.residual_norm, 1e-9)

  def test_linear_network_converges_in_one_iteration(self):
    net = _three_leg(_LINEAR)
    sol = mec.solve(net, {"dc": 450.0})
    r_core = 2.0 / (material.MU0 * 1000.0 * 0.04)
    r_gap = 0.3 / (material.MU0 * 0.04)
    parallel = r_core * r_gap / (r_core + r_gap)
    expected_left = 500 * 450.0 / (r_core + parallel)
    self.assertEqual(sol.iterations, 1)
    self.assertAlmostEqual(sol.fluxes["left"] / expected_left, 1.0, places=12)
    gap_share = -sol.fluxes["right"] / sol.fluxes["left"]
    self.assertAlmostEqual(gap_share, r_core / (r_core + r_gap), places=12)

  def test_superposition_in_linear_network(self):
    net = _three_leg(_LINEAR)
    both = mec.solve(net, {"dc": 450.0, "ac": 1000.0})
    dc = mec.solve(net, {"dc": 450.0})
    ac = mec.solve(net, {"ac": 1000.0})
    for bid in both.fluxes:
      self.assertAlmostEqual(
          both.fluxes[bid],
          dc.fluxes[bid] + ac.fluxes[bid],
          delta=1e-10 * abs(both.fluxes[bid]) + 1e-18,
      )

  def test_mirror_symmetry(self):
    sol = mec.solve(_mirror(_SAT), {"ac_left": 2000.0, "ac_right": 2000.0})
    self.assertAlmostEqual(
        sol.fluxes["left"],
        sol.fluxes["right"],
        delta=1e-10 * abs(sol.fluxes["left"]),
    )

  def test_warm_start_needs_no_iterations(self):
    net = _three_leg(_SAT)
    first = mec.solve(net, {"dc": 450.0})
    again = mec.solve(net, {"dc": 450.0}, initial=first)
    self.assertEqual(again.iterations, 0)

  def test_unknown_winding_current(self):
    with self.assertRaises(exceptions.TopologyError):
      mec.solve(_three_leg(_SAT), {"nope": 1.0})

  def test_non_convergence_reports_history(self):
    with self.assertRaises(exceptions.NonConvergenceError) as ctx:
      mec.solve(_three_leg(_SAT), {"dc": 450.0}, max_iter=0)
    self.assertLen(ctx.exception.residual_history, 1)

  def test_degenerate_conductance_names_branch(self):
    kernel = mec.NetworkKernel([_three_leg(_SAT)])
    state = kernel.evaluate(np.zeros(1), np.zeros(2))
    bad = mec.BranchState(
        drop=state.drop,
        flux=state.flux,
        conductance=np.array([1.0, 0.0, 1.0]),
        b=state.b,
        h=state.h,
    )
    with self.assertRaises(exceptions.SingularJacobianError) as ctx:
      kernel.check_conductance(bad)
    self.assertEqual(ctx.exception.branch_id, "middle")


class FluxLinkageTest(parameterized.TestCase):

  @parameterized.named_parameters(
      dict(testcase_name="positive", sign=1, expected=2.51327),
      dict(testcase_name="negative", sign=-1, expected=-2.51327),
  )
  def test_orientation(self, sign, expected):
    net = _single_loop(_LINEAR, sign=sign)
    sol = mec.solve(net, {"w": 10.0 * sign})
    self.assertAlmostEqual(mec.flux_linkage(net, sol, "w"), expected, places=5)

  def test_zero_currents(self):
    net = _three_leg(_SAT)
    sol = mec.solve(net)
    self.assertEqual(mec.flux_linkage(net, sol, "ac"), 0.0)

  def test_unknown_winding(self):
    net = _three_leg(_SAT)
    with self.assertRaises(exceptions.TopologyError):
      mec.flux_linkage(net, mec.solve(net), "missing")


class InductanceTest(parameterized.TestCase):

  def test_single_linear_loop(self):
    net = _single_loop(_LINEAR, turns=60)
    ind = mec.incremental_inductance(net, {"w": 5.0})
    self.assertAlmostEqual(ind.get("w", "w") / 9.04779e-2, 1.0, places=5)

  def test_deep_saturation_limit(self):
    net = _single_loop(_SAT, turns=60)
    ind = mec.incremental_inductance(net, {"w": 2e7 / 60})
    self.assertAlmostEqual(ind.get("w", "w") / 9.04779e-5, 1.0, places=4)

  def test_symmetric_matrix(self):
    ind = mec.incremental_inductance(
        _three_leg(_SAT), {"dc": 450.0, "ac": 800.0}
    )
    values = ind.values
    self.assertLessEqual(
        np.max(np.abs(values - values.T)), 1e-8 * np.max(np.abs(values))
    )

  def test_jacobian_matches_finite_difference(self):
    net = _three_leg(_SAT)
    currents = {"dc": 20.0, "ac": 40.0}
    jac = mec.incremental_inductance(net, currents)
    fd = mec.incremental_inductance(net, currents, method="finite_difference")
    np.testing.assert_allclose(fd.values, jac.values, rtol=1e-4)

  def test_non_increasing_with_excitation(self):
    net = _single_loop(_SAT, turns=60)
    values = [
        mec.incremental_inductance(net, {"w": i}).get("w", "w")
        for i in (0.0, 10.0, 100.0, 1000.0, 1e4, 1e5)
    ]
    self.assertTrue(all(a >= b for a, b in zip(values, values[1:])))

  def test_unknown_method(self):
    with self.assertRaises(exceptions.InputError):
      mec.incremental_inductance(_single_loop(_SAT), method="secant")


class EnergyTest(absltest.TestCase):

  def test_linear_loop_energy(self):
    net = _single_loop(_LINEAR)
    sol = mec.solve(net, {"w": 10.0})
    expected = 0.5 * 100 * 10.0 * sol.fluxes["core"]
    self.assertAlmostEqual(mec.stored_energy(net, sol), expected, places=9)
    self.assertAlmostEqual(mec.coenergy(net, sol), expected, places=9)

  def test_saturated_coenergy_exceeds_energy(self):
    net = _single_loop(_SAT, turns=500)
    sol = mec.solve(net, {"w": 450.0})
    self.assertGreater(mec.coenergy(net, sol), mec.stored_energy(net, sol))


if __name__ == "__main__":
  absltest.main()

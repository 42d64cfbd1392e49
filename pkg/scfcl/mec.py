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

"""Magnetic equivalent circuits.

A MagneticNetwork is a graph of reluctance branches between named nodes, with
windings that add N*I ampere-turns to the branch they sit on. The network is
solved for its nodal magnetic scalar potentials by Newton-Raphson:

  drop = A^T P + W i + F_pm          (MMF available to each branch)
  Phi  = phi_b(drop)                  (branch law, exact)
  A Phi = 0                           (flux conservation at every node)

with A the reduced incidence matrix (reference node removed) and W the
winding matrix (sign*N). The Jacobian A diag(dPhi/d drop) A^T uses the
differential permeability of each core branch.

NetworkKernel is the compiled, vectorized form used by both this module and
the transient co-simulator.
"""

from __future__ import annotations

import collections
import dataclasses
from typing import (
    Dict,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

from absl import logging
import numpy as np
import scipy.linalg

from scfcl import material as material_lib
from scfcl.core import debug_utils
from scfcl.core import exceptions
from scfcl.core import types

__all__ = [
    "Branch",
    "WindingLink",
    "MagneticNetwork",
    "MecSolution",
    "InductanceMatrix",
    "NetworkKernel",
    "branch_reluctance",
    "solve",
    "flux_linkage",
    "incremental_inductance",
    "stored_energy",
    "coenergy",
    "branch_energy",
]

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 50
MAX_HALVINGS = 30
FLUX_FLOOR = 1e-30
# Finite differences need the flux linkages well below the step size.
FD_TOL = 1e-12

Currents = Union[Mapping[str, float], Sequence[float], np.ndarray]


@dataclasses.dataclass(frozen=True)
class Branch:
  """One reluctance branch; reference flux direction is from_node -> to_node.

  Attributes:
    id: Branch id, unique within the network.
    from_node: Tail node.
    to_node: Head node. May equal from_node (a closed single-branch loop).
    kind: core, gap or pm.
    length: Magnetic path length in meters.
    area: Cross-section in square meters.
    material: B-H law of a core branch.
    fringing_factor: Gap reluctance is divided by this factor.
    mmf: Thevenin MMF of a pm branch in ampere-turns.
    reluctance: Internal reluctance of a pm branch in At/Wb.
  """

  id: str
  from_node: str
  to_node: str
  kind: types.BranchKind
  length: float = 1.0
  area: float = 1.0
  material: Optional[material_lib.BHCurve] = None
  fringing_factor: float = 1.0
  mmf: float = 0.0
  reluctance: float = 0.0

  def __post_init__(self):
    if not isinstance(self.kind, types.BranchKind):
      object.__setattr__(self, "kind", types.BranchKind(self.kind))
    if not (np.isfinite(self.length) and self.length > 0):
      raise exceptions.TopologyError(
          f"Branch {self.id}: length must be > 0, got {self.length}"
      )
    if not (np.isfinite(self.area) and self.area > 0):
      raise exceptions.TopologyError(
          f"Branch {self.id}: area must be > 0, got {self.area}"
      )
    if self.kind is types.BranchKind.CORE and self.material is None:
      raise exceptions.TopologyError(f"Core branch {self.id} needs a material.")
    if self.kind is types.BranchKind.GAP and not self.fringing_factor > 0:
      raise exceptions.TopologyError(
          f"Branch {self.id}: fringing_factor must be > 0"
      )
    if self.kind is types.BranchKind.PM:
      if not (np.isfinite(self.reluctance) and self.reluctance > 0):
        raise exceptions.TopologyError(
            f"PM branch {self.id}: internal reluctance must be > 0"
        )
      if not np.isfinite(self.mmf):
        raise exceptions.TopologyError(f"PM branch {self.id}: MMF not finite")

  @classmethod
  def core(
      cls,
      branch_id: str,
      from_node: str,
      to_node: str,
      *,
      length: float,
      area: float,
      curve: material_lib.BHCurve = material_lib.DEFAULT_SOFT_IRON,
  ) -> Branch:
    return cls(
        branch_id,
        from_node,
        to_node,
        types.BranchKind.CORE,
        length=length,
        area=area,
        material=curve,
    )

  @classmethod
  def gap(
      cls,
      branch_id: str,
      from_node: str,
      to_node: str,
      *,
      length: float,
      area: float,
      fringing_factor: float = 1.0,
  ) -> Branch:
    return cls(
        branch_id,
        from_node,
        to_node,
        types.BranchKind.GAP,
        length=length,
        area=area,
        fringing_factor=fringing_factor,
    )

  @classmethod
  def pm(
      cls,
      branch_id: str,
      from_node: str,
      to_node: str,
      *,
      mmf: float,
      reluctance: float,
      length: float = 1.0,
      area: float = 1.0,
  ) -> Branch:
    """Permanent magnet as MMF source behind a fixed reluctance.

    length and area only scale the reported B and H.
    """
    return cls(
        branch_id,
        from_node,
        to_node,
        types.BranchKind.PM,
        length=length,
        area=area,
        mmf=mmf,
        reluctance=reluctance,
    )

  @property
  def constant_reluctance(self) -> Optional[float]:
    """Reluctance of gap and pm branches; None for core branches."""
    if self.kind is types.BranchKind.GAP:
      return self.length / (material_lib.MU0 * self.area * self.fringing_factor)
    if self.kind is types.BranchKind.PM:
      return self.reluctance
    return None

  @property
  def volume(self) -> float:
    return self.length * self.area


@dataclasses.dataclass(frozen=True)
class WindingLink:
  """A coil around one branch.

  Attributes:
    id: Winding id, unique within the network.
    branch_id: Branch the coil links.
    turns: Number of turns N >= 1.
    sign: +1 when positive current drives flux along the branch direction.
    role: Circuit loop the winding belongs to.
    resistance_ohm: Copper resistance of the coil.
  """

  id: str
  branch_id: str
  turns: int
  sign: int = 1
  role: types.WindingRole = types.WindingRole.AC_SERIES
  resistance_ohm: float = 0.0

  def __post_init__(self):
    if not isinstance(self.role, types.WindingRole):
      object.__setattr__(self, "role", types.WindingRole(self.role))
    if int(self.turns) != self.turns or self.turns < 1:
      raise exceptions.TopologyError(
          f"Winding {self.id}: turns must be a positive integer, got"
          f" {self.turns}"
      )
    object.__setattr__(self, "turns", int(self.turns))
    if self.sign not in (1, -1):
      raise exceptions.TopologyError(
          f"Winding {self.id}: sign must be +1 or -1, got {self.sign}"
      )
    if not (np.isfinite(self.resistance_ohm) and self.resistance_ohm >= 0):
      raise exceptions.TopologyError(
          f"Winding {self.id}: resistance must be >= 0"
      )

  @property
  def coupling(self) -> int:
    """Signed turns sign*N."""
    return self.sign * self.turns


@dataclasses.dataclass(frozen=True)
class MagneticNetwork:
  """Nodes, branches and windings of one magnetic circuit.

  The reference node (potential 0) defaults to the first node.
  """

  nodes: Tuple[str, ...]
  branches: Tuple[Branch, ...]
  windings: Tuple[WindingLink, ...] = ()
  reference: Optional[str] = None

  def __post_init__(self):
    object.__setattr__(self, "nodes", tuple(self.nodes))
    object.__setattr__(self, "branches", tuple(self.branches))
    object.__setattr__(self, "windings", tuple(self.windings))
    if not self.nodes:
      raise exceptions.TopologyError("A network needs at least one node.")
    if self.reference is None:
      object.__setattr__(self, "reference", self.nodes[0])
    self._validate()

  def _validate(self) -> None:
    if len(set(self.nodes)) != len(self.nodes):
      raise exceptions.TopologyError(f"Duplicate node ids in {self.nodes}")
    if self.reference not in self.nodes:
      raise exceptions.TopologyError(
          f"Reference node {self.reference} is not declared."
      )
    if not self.branches:
      raise exceptions.TopologyError("A network needs at least one branch.")
    branch_ids = [b.id for b in self.branches]
    if len(set(branch_ids)) != len(branch_ids):
      raise exceptions.TopologyError(f"Duplicate branch ids in {branch_ids}")
    declared = set(self.nodes)
    for b in self.branches:
      for node in (b.from_node, b.to_node):
        if node not in declared:
          raise exceptions.TopologyError(
              f"Branch {b.id} references undeclared node {node}"
          )
    winding_ids = [w.id for w in self.windings]
    if len(set(winding_ids)) != len(winding_ids):
      raise exceptions.TopologyError(f"Duplicate winding ids in {winding_ids}")
    for w in self.windings:
      if w.branch_id not in branch_ids:
        raise exceptions.TopologyError(
            f"Winding {w.id} references unknown branch {w.branch_id}"
        )
    self._check_connected()

  def _check_connected(self) -> None:
    adjacency: Dict[str, set] = collections.defaultdict(set)
    for b in self.branches:
      adjacency[b.from_node].add(b.to_node)
      adjacency[b.to_node].add(b.from_node)
    seen = {self.reference}
    queue = collections.deque([self.reference])
    while queue:
      node = queue.popleft()
      for nxt in adjacency[node] - seen:
        seen.add(nxt)
        queue.append(nxt)
    missing = [n for n in self.nodes if n not in seen]
    if missing:
      raise exceptions.TopologyError(
          f"Network is not connected; unreachable nodes: {missing}"
      )

  def branch(self, branch_id: str) -> Branch:
    for b in self.branches:
      if b.id == branch_id:
        return b
    raise exceptions.TopologyError(f"Unknown branch id: {branch_id}")

  def winding(self, winding_id: str) -> WindingLink:
    for w in self.windings:
      if w.id == winding_id:
        return w
    raise exceptions.TopologyError(f"Unknown winding id: {winding_id}")

  def windings_with_role(self, role: types.WindingRole) -> List[WindingLink]:
    return [w for w in self.windings if w.role is role]

  def without_windings(self, role: types.WindingRole) -> MagneticNetwork:
    """Same network with every winding of the given role removed."""
    return dataclasses.replace(
        self, windings=tuple(w for w in self.windings if w.role is not role)
    )


@dataclasses.dataclass(frozen=True)
class MecSolution:
  """Converged operating point of a network.

  Attributes:
    potentials: Nodal magnetic potential in ampere-turns (reference is 0).
    fluxes: Branch flux in webers along the branch direction.
    b: Branch flux density in tesla.
    h: Branch field strength in A/m.
    winding_currents: Currents the solution was computed for.
    iterations: Newton updates taken.
    residual_norm: Final nodal flux residual over max branch flux.
  """

  potentials: Mapping[str, float]
  fluxes: Mapping[str, float]
  b: Mapping[str, float]
  h: Mapping[str, float]
  winding_currents: Mapping[str, float]
  iterations: int
  residual_norm: float


@dataclasses.dataclass(frozen=True)
class InductanceMatrix:
  """Incremental inductance L[j][k] = d(lambda_j)/d(i_k) in henry."""

  winding_ids: Tuple[str, ...]
  values: np.ndarray

  def get(self, row: str, col: str) -> float:
    j = self.winding_ids.index(row)
    k = self.winding_ids.index(col)
    return float(self.values[j, k])


@dataclasses.dataclass(frozen=True)
class BranchState:
  """Vectorized branch quantities at one set of potentials and currents."""

  drop: np.ndarray
  flux: np.ndarray
  conductance: np.ndarray
  b: np.ndarray
  h: np.ndarray


class NetworkKernel:
  """Compiled form of one or more independent networks.

  Each network keeps its own reference node; potentials of all non-reference
  nodes form one unknown vector. Branch and winding ids must be unique across
  the networks.
  """

  def __init__(self, networks: Iterable[MagneticNetwork]):
    self.networks = tuple(networks)
    self.branches: List[Branch] = [
        b for net in self.networks for b in net.branches
    ]
    self.windings: List[WindingLink] = [
        w for net in self.networks for w in net.windings
    ]
    self.branch_ids = [b.id for b in self.branches]
    self.winding_ids = [w.id for w in self.windings]
    if len(set(self.branch_ids)) != len(self.branch_ids):
      raise exceptions.TopologyError("Branch ids collide across networks.")
    if len(set(self.winding_ids)) != len(self.winding_ids):
      raise exceptions.TopologyError("Winding ids collide across networks.")
    all_nodes = [node for net in self.networks for node in net.nodes]
    if len(set(all_nodes)) != len(all_nodes):
      raise exceptions.TopologyError("Node ids collide across networks.")

    self.node_keys: List[Tuple[int, str]] = []
    row_of: Dict[Tuple[int, str], int] = {}
    for k, net in enumerate(self.networks):
      for node in net.nodes:
        if node != net.reference:
          row_of[(k, node)] = len(self.node_keys)
          self.node_keys.append((k, node))

    nb = len(self.branches)
    self.incidence = np.zeros((len(self.node_keys), nb))
    col = 0
    for k, net in enumerate(self.networks):
      for b in net.branches:
        if (k, b.from_node) in row_of:
          self.incidence[row_of[(k, b.from_node)], col] += 1.0
        if (k, b.to_node) in row_of:
          self.incidence[row_of[(k, b.to_node)], col] -= 1.0
        col += 1

    index = {bid: j for j, bid in enumerate(self.branch_ids)}
    self.winding_matrix = np.zeros((nb, len(self.windings)))
    for m, w in enumerate(self.windings):
      self.winding_matrix[index[w.branch_id], m] = w.coupling

    self.length = np.array([b.length for b in self.branches])
    self.area = np.array([b.area for b in self.branches])
    self.pm_mmf = np.array([
        b.mmf if b.kind is types.BranchKind.PM else 0.0 for b in self.branches
    ])
    self._linear_idx = np.array(
        [j for j, b in enumerate(self.branches) if b.material is None],
        dtype=int,
    )
    self._linear_g = np.array(
        [1.0 / self.branches[j].constant_reluctance for j in self._linear_idx]
    )
    groups: Dict[material_lib.BHCurve, List[int]] = (
        collections.defaultdict(list)
    )
    for j, b in enumerate(self.branches):
      if b.material is not None:
        groups[b.material].append(j)
    self._core_groups = [
        (np.array(idx, dtype=int), curve) for curve, idx in groups.items()
    ]

  @property
  def n_nodes(self) -> int:
    return len(self.node_keys)

  @property
  def n_branches(self) -> int:
    return len(self.branches)

  @property
  def n_windings(self) -> int:
    return len(self.windings)

  def current_vector(self, currents: Optional[Currents]) -> np.ndarray:
    """Winding currents as an array ordered like self.windings.

    Mappings may omit windings (their current is zero) but may not name
    unknown windings.
    """
    if currents is None:
      return np.zeros(self.n_windings)
    if isinstance(currents, Mapping):
      unknown = set(currents) - set(self.winding_ids)
      if unknown:
        raise exceptions.TopologyError(
            f"Unknown winding id(s): {sorted(unknown)}"
        )
      vec = np.array([float(currents.get(w, 0.0)) for w in self.winding_ids])
    else:
      vec = np.asarray(currents, dtype=float).reshape(-1)
      if vec.shape != (self.n_windings,):
        raise exceptions.InputError(
            f"Expected {self.n_windings} winding currents, got {vec.size}"
        )
    if not np.all(np.isfinite(vec)):
      raise exceptions.InputError(f"Winding currents must be finite: {vec}")
    return vec

  def evaluate(
      self, potentials: np.ndarray, currents: np.ndarray
  ) -> BranchState:
    """Branch drops, fluxes and differential conductances."""
    drop = (
        self.incidence.T @ potentials + self.winding_matrix @ currents
    ) + self.pm_mmf
    nb = self.n_branches
    flux = np.empty(nb)
    g = np.empty(nb)
    b = np.empty(nb)
    h = np.empty(nb)
    lin = self._linear_idx
    if lin.size:
      flux[lin] = drop[lin] * self._linear_g
      g[lin] = self._linear_g
      h[lin] = (drop[lin] - self.pm_mmf[lin]) / self.length[lin]
      b[lin] = flux[lin] / self.area[lin]
    for idx, curve in self._core_groups:
      hh = drop[idx] / self.length[idx]
      bb = np.asarray(material_lib.b_of_h(curve, hh))
      h[idx] = hh
      b[idx] = bb
      flux[idx] = bb * self.area[idx]
      g[idx] = (
          np.asarray(material_lib.mu_differential(curve, hh))
          * self.area[idx]
          / self.length[idx]
      )
    return BranchState(drop=drop, flux=flux, conductance=g, b=b, h=h)

  def flux_residual(self, state: BranchState) -> np.ndarray:
    return self.incidence @ state.flux

  def flux_residual_ratio(self, state: BranchState) -> float:
    """Largest nodal flux imbalance over the largest branch flux."""
    if self.n_nodes == 0:
      return 0.0
    r = np.max(np.abs(self.flux_residual(state)))
    scale = max(float(np.max(np.abs(state.flux), initial=0.0)), FLUX_FLOOR)
    return float(r / scale)

  def nodal_jacobian(self, state: BranchState) -> np.ndarray:
    return (self.incidence * state.conductance) @ self.incidence.T

  def check_conductance(self, state: BranchState) -> None:
    """Raises SingularJacobianError on a degenerate branch."""
    bad = ~np.isfinite(state.conductance) | (state.conductance <= 0)
    if np.any(bad):
      j = int(np.flatnonzero(bad)[0])
      raise exceptions.SingularJacobianError(
          f"Branch {self.branch_ids[j]} has degenerate permeance"
          f" {state.conductance[j]}",
          branch_id=self.branch_ids[j],
      )

  def singular_error(
      self, state: BranchState
  ) -> exceptions.SingularJacobianError:
    j = int(np.argmin(state.conductance)) if self.n_branches else 0
    branch_id = self.branch_ids[j] if self.n_branches else None
    return exceptions.SingularJacobianError(
        f"Singular Newton matrix; weakest branch is {branch_id}",
        branch_id=branch_id,
    )

  def newton(
      self,
      currents: np.ndarray,
      potentials: Optional[np.ndarray] = None,
      *,
      tol: float = DEFAULT_TOL,
      max_iter: int = DEFAULT_MAX_ITER,
  ) -> Tuple[np.ndarray, BranchState, int, float]:
    """Solves A Phi = 0 for the potentials at fixed winding currents.

    Returns:
      (potentials, branch state, iterations, final residual ratio).
    """
    p = (
        np.zeros(self.n_nodes)
        if potentials is None
        else np.array(potentials, dtype=float)
    )
    state = self.evaluate(p, currents)
    history: List[float] = []
    for iteration in range(max_iter + 1):
      ratio = self.flux_residual_ratio(state)
      history.append(ratio)
      if ratio <= tol:
        return p, state, iteration, ratio
      if iteration == max_iter:
        break
      self.check_conductance(state)
      residual = self.flux_residual(state)
      try:
        dp = scipy.linalg.solve(
            self.nodal_jacobian(state), -residual, assume_a="sym"
        )
      except (np.linalg.LinAlgError, ValueError) as e:
        raise self.singular_error(state) from e

      merit = np.linalg.norm(residual)
      step = 1.0
      for _ in range(MAX_HALVINGS + 1):
        trial = p + step * dp
        try:
          trial_state = self.evaluate(trial, currents)
        except exceptions.InputError:
          trial_state = None
        if (
            trial_state is not None
            and np.linalg.norm(self.flux_residual(trial_state)) < merit
        ):
          p, state = trial, trial_state
          break
        step *= 0.5
      else:
        raise exceptions.NonConvergenceError(
            "Magnetic Newton damping exhausted", residual_history=history
        )
      if step < 1.0:
        logging.debug("Magnetic Newton damped step %.3g", step)
    raise exceptions.NonConvergenceError(
        f"Magnetic Newton did not converge in {max_iter} iterations",
        residual_history=history,
    )

  def inductance_matrix(self, state: BranchState) -> np.ndarray:
    """d(lambda)/d(i) at a converged state, by the implicit-function rule."""
    w = self.winding_matrix
    gw = state.conductance[:, None] * w
    direct = w.T @ gw
    if self.n_nodes == 0:
      return direct
    agw = self.incidence @ gw
    try:
      x = scipy.linalg.solve(self.nodal_jacobian(state), agw, assume_a="sym")
    except (np.linalg.LinAlgError, ValueError) as e:
      raise self.singular_error(state) from e
    return direct - agw.T @ x

  def flux_linkages(self, state: BranchState) -> np.ndarray:
    return self.winding_matrix.T @ state.flux

  def to_solution(
      self,
      potentials: np.ndarray,
      state: BranchState,
      currents: np.ndarray,
      iterations: int,
      residual: float,
  ) -> MecSolution:
    node_p: Dict[str, float] = {}
    for net in self.networks:
      node_p[net.reference] = 0.0
    for (_, node), value in zip(self.node_keys, potentials):
      node_p[node] = float(value)
    return MecSolution(
        potentials=node_p,
        fluxes=dict(zip(self.branch_ids, map(float, state.flux))),
        b=dict(zip(self.branch_ids, map(float, state.b))),
        h=dict(zip(self.branch_ids, map(float, state.h))),
        winding_currents=dict(zip(self.winding_ids, map(float, currents))),
        iterations=iterations,
        residual_norm=residual,
    )

  def potentials_of(self, solution: MecSolution) -> np.ndarray:
    return np.array([solution.potentials[node] for _, node in self.node_keys])


NetworkLike = Union[MagneticNetwork, Sequence[MagneticNetwork], NetworkKernel]


def _kernel(network: NetworkLike) -> NetworkKernel:
  if isinstance(network, NetworkKernel):
    return network
  if isinstance(network, MagneticNetwork):
    return NetworkKernel([network])
  return NetworkKernel(network)


def branch_reluctance(branch: Branch, b: float = 0.0) -> float:
  """Secant reluctance of a branch at flux density b (At/Wb).

  Gap and pm branches ignore b.
  """
  fixed = branch.constant_reluctance
  if fixed is not None:
    return fixed
  mu = material_lib.mu_secant(branch.material, b)
  return branch.length / (mu * branch.area)


@debug_utils.debug_log_calls
def solve(
    network: NetworkLike,
    currents: Optional[Currents] = None,
    initial: Optional[MecSolution] = None,
    *,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> MecSolution:
  """Solves the flux distribution for given winding currents.

  Args:
    network: A network, several independent networks, or a compiled kernel.
    currents: Current per winding id (missing windings carry zero current) or
      a vector ordered like the windings.
    initial: Warm-start solution; zero potentials when omitted.
    tol: Convergence threshold on nodal flux residual over max branch flux.
    max_iter: Newton iteration limit.

  Returns:
    The converged MecSolution.

  Raises:
    NonConvergenceError: Iterations or damping exhausted.
    SingularJacobianError: The Newton matrix is singular.
  """
  kernel = _kernel(network)
  i = kernel.current_vector(currents)
  p0 = kernel.potentials_of(initial) if initial is not None else None
  p, state, iterations, ratio = kernel.newton(i, p0, tol=tol, max_iter=max_iter)
  return kernel.to_solution(p, state, i, iterations, ratio)


def flux_linkage(
    network: NetworkLike, solution: MecSolution, winding_id: str
) -> float:
  """lambda = sign*N*Phi of the winding's branch, in weber-turns."""
  kernel = _kernel(network)
  for net in kernel.networks:
    for w in net.windings:
      if w.id == winding_id:
        return w.coupling * solution.fluxes[w.branch_id]
  raise exceptions.TopologyError(f"Unknown winding id: {winding_id}")


def incremental_inductance(
    network: NetworkLike,
    currents: Optional[Currents] = None,
    *,
    method: str = "jacobian",
) -> InductanceMatrix:
  """Small-signal inductance matrix at the operating point of currents.

  Args:
    network: Network(s) to linearize.
    currents: Operating point winding currents.
    method: "jacobian" (implicit differentiation of the converged Newton
      system) or "finite_difference" (central differences with step
      max(1e-6*|i|, 1e-3 A)).

  Returns:
    InductanceMatrix over all windings.
  """
  kernel = _kernel(network)
  i0 = kernel.current_vector(currents)
  tol = DEFAULT_TOL if method == "jacobian" else FD_TOL
  p0, state, _, _ = kernel.newton(i0, tol=tol)
  if method == "jacobian":
    values = kernel.inductance_matrix(state)
  elif method == "finite_difference":
    values = np.zeros((kernel.n_windings, kernel.n_windings))
    for k in range(kernel.n_windings):
      step = max(1e-6 * abs(i0[k]), 1e-3)
      lam = []
      for direction in (1.0, -1.0):
        i = i0.copy()
        i[k] += direction * step
        _, st, _, _ = kernel.newton(i, p0, tol=FD_TOL)
        lam.append(kernel.flux_linkages(st))
      values[:, k] = (lam[0] - lam[1]) / (2 * step)
  else:
    raise exceptions.InputError(f"Unknown inductance method: {method}")
  return InductanceMatrix(tuple(kernel.winding_ids), values)


def branch_energy(
    branch: Branch, b: np.ndarray, h: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
  """Stored energy and co-energy of a branch from its B and H samples."""
  b = np.asarray(b, dtype=float)
  h = np.asarray(h, dtype=float)
  if branch.material is not None:
    energy = branch.volume * np.asarray(
        material_lib.energy_density(branch.material, h)
    )
    co = branch.volume * np.asarray(
        material_lib.coenergy_density(branch.material, h)
    )
    return energy, co
  flux = b * branch.area
  energy = 0.5 * flux * flux * branch.constant_reluctance
  return energy, energy


def _total_energy(network: NetworkLike, solution: MecSolution, which: int):
  kernel = _kernel(network)
  total = 0.0
  for br in kernel.branches:
    pair = branch_energy(br, solution.b[br.id], solution.h[br.id])
    total += float(pair[which])
  return total


def stored_energy(network: NetworkLike, solution: MecSolution) -> float:
  """Magnetic energy of a solution in joules."""
  return _total_energy(network, solution, 0)


def coenergy(network: NetworkLike, solution: MecSolution) -> float:
  """Magnetic co-energy of a solution in joules."""
  return _total_energy(network, solution, 1)

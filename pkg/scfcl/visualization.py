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

"""Optional SVG line charts of transient runs.

Requires the ``plot`` extra (matplotlib). Figures are built through the
object-oriented API so worker threads never share pyplot state.

Example
-------
>>> from scfcl import cosim, visualization
>>> ts = cosim.run(scenario)
>>> visualization.save_waveform_svg(ts, "model_b.svg", title="Model B")
"""

from __future__ import annotations

import io as std_io
import os
from typing import Dict, List, Mapping, Optional, Sequence, Union

from absl import logging

from scfcl import io
from scfcl.core import data

# Fallback if matplotlib is not present
try:
  from matplotlib import figure as mpl_figure  # type: ignore[import-not-found]
except ImportError:
  mpl_figure = None

__all__ = [
    "save_waveform_svg",
    "save_comparison_svg",
]

_PALETTE: List[str] = [
    "#4285F4",  # Google Blue
    "#DB4437",  # Google Red
    "#F4B400",  # Google Yellow
    "#0F9D58",  # Google Green
    "#AB47BC",  # Purple
    "#00ACC1",  # Teal
    "#FF7043",  # Orange
    "#5F6368",  # Grey
]

_INSTALL_HINT = (
    "SVG charts need matplotlib; install it with: pip install 'scfcl[plot]'"
)

PathLike = Union[str, os.PathLike]


def _require_matplotlib() -> None:
  if mpl_figure is None:
    raise ImportError(_INSTALL_HINT)


def _assign_colors(labels: Sequence[str]) -> Dict[str, str]:
  """Assigns palette colors to labels in sorted order, cycling if needed."""
  return {
      label: _PALETTE[i % len(_PALETTE)]
      for i, label in enumerate(sorted(set(labels)))
  }


def _mark_fault(axes, ts: data.TimeSeries) -> None:
  for t, style in ((ts.t_fault, "--"), (ts.t_clear, ":")):
    if t is not None:
      axes.axvline(t * 1e3, color="#5F6368", linestyle=style, linewidth=0.8)


def _save(fig, path: PathLike) -> str:
  buffer = std_io.StringIO()
  fig.savefig(buffer, format="svg", metadata={"Date": None})
  io.write_text(buffer.getvalue(), path)
  logging.info("Saved chart %s", path)
  return os.fspath(path)


def save_waveform_svg(
    ts: data.TimeSeries,
    path: PathLike,
    *,
    title: str = "",
    baseline: Optional[data.TimeSeries] = None,
) -> str:
  """Saves line current, limiter voltages and flux densities of one run.

  Args:
    ts: The run.
    path: Target .svg file.
    title: Figure title.
    baseline: Optional run without the limiter, drawn dashed on the current
      panel.

  Returns:
    The written path.

  Raises:
    ImportError: matplotlib is not installed.
  """
  _require_matplotlib()
  fig = mpl_figure.Figure(figsize=(9.0, 8.0))
  current_ax, voltage_ax, flux_ax = fig.subplots(3, 1, sharex=True)
  t_ms = ts.time * 1e3

  if baseline is not None:
    current_ax.plot(
        baseline.time * 1e3,
        baseline.i_line / 1e3,
        color=_PALETTE[7],
        linestyle="--",
        linewidth=0.8,
        label="no limiter",
    )
  current_ax.plot(t_ms, ts.i_line / 1e3, color=_PALETTE[0], label="line")
  current_ax.set_ylabel("current [kA]")
  current_ax.legend(loc="upper right", fontsize="small")

  voltage_ax.plot(t_ms, ts.v_fcl / 1e3, color=_PALETTE[1], label="v_fcl")
  voltage_ax.plot(t_ms, ts.v_dc / 1e3, color=_PALETTE[3], label="v_dc")
  voltage_ax.set_ylabel("voltage [kV]")
  voltage_ax.legend(loc="upper right", fontsize="small")

  colors = _assign_colors(list(ts.b))
  for branch_id, b in ts.b.items():
    flux_ax.plot(t_ms, b, color=colors[branch_id], label=branch_id)
  flux_ax.set_ylabel("B [T]")
  flux_ax.set_xlabel("time [ms]")
  if ts.b:
    flux_ax.legend(loc="upper right", fontsize="x-small", ncol=2)

  for axes in (current_ax, voltage_ax, flux_ax):
    _mark_fault(axes, ts)
    axes.grid(True, linewidth=0.3)
  if title:
    fig.suptitle(title)
  fig.tight_layout()
  return _save(fig, path)


def save_comparison_svg(
    runs: Mapping[str, data.TimeSeries],
    path: PathLike,
    *,
    title: str = "",
    signal: str = "i_line",
) -> str:
  """Overlays one signal of several runs, e.g. line current per model.

  Args:
    runs: Label to run.
    path: Target .svg file.
    title: Figure title.
    signal: TimeSeries attribute to draw ("i_line", "v_fcl", "v_dc", "i_dc").

  Returns:
    The written path.

  Raises:
    ImportError: matplotlib is not installed.
    ValueError: Unknown signal.
  """
  _require_matplotlib()
  if signal not in ("i_line", "v_fcl", "v_dc", "i_dc"):
    raise ValueError(f"Unknown signal: {signal}")
  fig = mpl_figure.Figure(figsize=(9.0, 4.5))
  axes = fig.subplots()
  colors = _assign_colors(list(runs))
  for label, ts in runs.items():
    axes.plot(
        ts.time * 1e3,
        getattr(ts, signal),
        color=colors[label],
        linewidth=0.9,
        label=label,
    )
  first = next(iter(runs.values()), None)
  if first is not None:
    _mark_fault(axes, first)
  axes.set_xlabel("time [ms]")
  axes.set_ylabel(signal)
  axes.grid(True, linewidth=0.3)
  if runs:
    axes.legend(loc="upper right", fontsize="small")
  if title:
    axes.set_title(title)
  fig.tight_layout()
  return _save(fig, path)

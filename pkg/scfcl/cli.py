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

"""Command-line front end.

  scfcl run <file> [--out DIR] [--svg] [--workers N]
  scfcl suite <name> [--out DIR] [--svg] [--workers N]
  scfcl analyze <sub> [flags]

Global flags (accepted before or after the subcommand): --dt, --t-end,
--format {csv,json}, --seed-free, -v/--verbose.

Exit codes: 0 success, 1 a suite property check failed, 2 configuration or
flag error, 3 solver or metrics failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence

from absl import logging
import pandas as pd

import scfcl
from scfcl import analysis
from scfcl import cosim
from scfcl import material
from scfcl import progress
from scfcl import scenario
from scfcl import suite
from scfcl import visualization
from scfcl.core import debug_utils
from scfcl.core import exceptions

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3

# Table defaults of the analysis subcommands.
_U_PEAK = 14142.1
_FREQUENCY = 50.0
_R_LINE = 0.1095
_L_LINE = 5.63419e-4

Rows = List[Dict[str, Any]]


def _positive_int(text: str) -> int:
  value = int(text)
  if value < 1:
    raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
  return value


def _global_flags() -> argparse.ArgumentParser:
  # SUPPRESS keeps a subparser from overwriting a value given before it.
  flags = argparse.ArgumentParser(add_help=False)
  flags.add_argument(
      "--dt",
      type=float,
      default=argparse.SUPPRESS,
      help="Time step in seconds; overrides scenario and suite settings.",
  )
  flags.add_argument(
      "--t-end",
      dest="t_end",
      type=float,
      default=argparse.SUPPRESS,
      help="Simulated horizon in seconds.",
  )
  flags.add_argument(
      "--format",
      dest="output_format",
      choices=["csv", "json"],
      default=argparse.SUPPRESS,
      help="Machine-readable output on stdout.",
  )
  flags.add_argument(
      "--seed-free",
      action="store_true",
      default=argparse.SUPPRESS,
      help="Documents determinism; scfcl uses no random numbers.",
  )
  flags.add_argument(
      "-v",
      "--verbose",
      action="store_true",
      default=argparse.SUPPRESS,
      help="Debug logging for the scfcl namespace.",
  )
  return flags


def _add_batch_flags(parser: argparse.ArgumentParser, default_out: str):
  parser.add_argument(
      "--out", default=default_out, help="Output directory."
  )
  parser.add_argument(
      "--svg", action="store_true", help="Also write SVG charts."
  )
  parser.add_argument(
      "--workers",
      type=_positive_int,
      default=1,
      help="Number of runs executed concurrently.",
  )


# Analysis subcommands


def _line(args: argparse.Namespace) -> analysis.LineParams:
  return analysis.LineParams.from_frequency(args.u, args.f, args.rl, args.ll)


def _analyze_overvoltage(args) -> Rows:
  peak = analysis.induced_dc_overvoltage(args.ndc, args.nac, args.u)
  return [{"u_dc_peak_V": peak, "u_dc_rms_V": peak / math.sqrt(2.0)}]


def _analyze_tau(args) -> Rows:
  tau_r, tau_x = analysis.time_constants(args.rl, args.ll, args.rfcl, args.lfcl)
  return [{"tau_rfcl_s": tau_r, "tau_xfcl_s": tau_x}]


def _analyze_aux_turns(args) -> Rows:
  return [{"n_aux": analysis.aux_turns(args.nac, args.il, args.idc)}]


def _analyze_inductances(args) -> Rows:
  l_x, l_y = analysis.inductances(
      args.n, args.area, args.l_mean, args.mu_r, args.mu_r_sat
  )
  return [{"l_unsaturated_H": l_x, "l_saturated_H": l_y, "ratio": l_x / l_y}]


def _analyze_margin(args) -> Rows:
  margin = analysis.saturation_margin(
      args.ndc, args.idc, args.nac, args.il_max, args.h_sat, args.l_mean
  )
  return [{"satisfied": margin.satisfied, "h_s_A_per_m": margin.h_s}]


def _analyze_resonance(args) -> Rows:
  omega = args.omega if args.omega is not None else 2 * math.pi * args.f
  return [{"z_ohm": analysis.resonant_impedance(omega, args.l, args.c)}]


def _analyze_dc_bias(args) -> Rows:
  bias = analysis.inductive_dc_bias(
      args.mu_sat, args.ndc, args.idc, args.l_mean, args.b_sat, args.h_sat
  )
  return [{"b_mid_T": bias.b_mid, "b_outer_T": bias.b_outer}]


def _analyze_inductive(args) -> Rows:
  l_sat, l_lin = analysis.inductive_fcl_inductances(
      args.nac, args.area, args.l_mean, args.l_gap
  )
  return [{"l_sat_H": l_sat, "l_lin_H": l_lin, "ratio": l_lin / l_sat}]


def _analyze_fault_current(args) -> Rows:
  line = _line(args)
  tau = args.tau if args.tau is not None else line.tau
  return [
      {
          "t_s": t,
          "i_A": analysis.fault_current(
              line, args.il_tf, args.t_f, tau, t, literal=args.literal
          ),
      }
      for t in args.t
  ]


def _analyze_prospective(args) -> Rows:
  line = _line(args)
  angle, peak = analysis.worst_first_peak(line, line.tau)
  amplitude = analysis.prospective_amplitude(line)
  return [{
      "i_prospective_A": amplitude,
      "i_prospective_rms_A": amplitude / math.sqrt(2.0),
      "tau_s": line.tau,
      "worst_inception_angle_rad": angle,
      "worst_first_peak_A": peak,
  }]


def _add_line_flags(parser: argparse.ArgumentParser) -> None:
  parser.add_argument("--u", type=float, default=_U_PEAK, help="U_peak [V]")
  parser.add_argument("--f", type=float, default=_FREQUENCY, help="[Hz]")
  parser.add_argument("--rl", type=float, default=_R_LINE, help="R_L [ohm]")
  parser.add_argument("--ll", type=float, default=_L_LINE, help="L_L [H]")


def _add_analyze_parsers(analyze: argparse.ArgumentParser, parents) -> None:
  subs = analyze.add_subparsers(dest="formula", metavar="<sub>")
  subs.required = True

  def add(name: str, fn: Callable[..., Rows], help_text: str):
    p = subs.add_parser(name, help=help_text, parents=parents)
    p.set_defaults(formula_fn=fn)
    return p

  p = add("overvoltage", _analyze_overvoltage, "Induced dc winding voltage.")
  p.add_argument("--ndc", type=float, default=500.0)
  p.add_argument("--nac", type=float, default=60.0)
  p.add_argument("--u", type=float, default=_U_PEAK, help="U_L peak [V]")

  p = add("tau", _analyze_tau, "Fault time constants.")
  p.add_argument("--rl", type=float, default=_R_LINE)
  p.add_argument("--ll", type=float, default=_L_LINE)
  p.add_argument("--rfcl", type=float, default=0.0)
  p.add_argument("--lfcl", type=float, default=0.0)

  p = add("aux-turns", _analyze_aux_turns, "Auxiliary winding turns.")
  p.add_argument("--nac", type=float, default=60.0)
  p.add_argument("--il", type=float, default=570.0)
  p.add_argument("--idc", type=float, default=450.0)

  p = add("inductances", _analyze_inductances, "Core inductances.")
  p.add_argument("--n", type=float, default=60.0)
  p.add_argument("--area", type=float, default=0.04)
  p.add_argument("--l-mean", dest="l_mean", type=float, default=2.0)
  p.add_argument("--mu-r", dest="mu_r", type=float, default=1000.0)
  p.add_argument("--mu-r-sat", dest="mu_r_sat", type=float, default=2.0)

  p = add("margin", _analyze_margin, "Bias safe zone width.")
  p.add_argument("--ndc", type=float, default=500.0)
  p.add_argument("--idc", type=float, default=450.0)
  p.add_argument("--nac", type=float, default=60.0)
  p.add_argument("--il-max", dest="il_max", type=float, default=1000.0)
  p.add_argument("--h-sat", dest="h_sat", type=float, default=5000.0)
  p.add_argument("--l-mean", dest="l_mean", type=float, default=2.0)

  p = add("resonance", _analyze_resonance, "Parallel LC reactance.")
  p.add_argument("--omega", type=float, default=None, help="[rad/s]")
  p.add_argument("--f", type=float, default=_FREQUENCY, help="[Hz]")
  p.add_argument("--l", type=float, required=True, help="[H]")
  p.add_argument("--c", type=float, required=True, help="[F]")

  p = add("dc-bias", _analyze_dc_bias, "Inductive limiter bias densities.")
  p.add_argument("--mu-sat", dest="mu_sat", type=float, default=material.MU0)
  p.add_argument("--ndc", type=float, default=500.0)
  p.add_argument("--idc", type=float, default=450.0)
  p.add_argument("--l-mean", dest="l_mean", type=float, default=2.0)
  p.add_argument("--b-sat", dest="b_sat", type=float, default=1.8)
  p.add_argument("--h-sat", dest="h_sat", type=float, default=5000.0)

  p = add("inductive", _analyze_inductive, "Inductive limiter inductances.")
  p.add_argument("--nac", type=float, default=60.0)
  p.add_argument("--area", type=float, default=0.04)
  p.add_argument("--l-mean", dest="l_mean", type=float, default=2.0)
  p.add_argument("--l-gap", dest="l_gap", type=float, default=0.3)

  p = add("fault-current", _analyze_fault_current, "Closed-form i(t).")
  _add_line_flags(p)
  p.add_argument("--il-tf", dest="il_tf", type=float, default=0.0)
  p.add_argument("--t-f", dest="t_f", type=float, default=0.023)
  p.add_argument("--tau", type=float, default=None, help="Default L_L/R_L.")
  p.add_argument("--t", type=float, nargs="+", required=True, help="[s]")
  p.add_argument("--literal", action="store_true")

  p = add("prospective", _analyze_prospective, "Prospective fault current.")
  _add_line_flags(p)


def build_parser() -> argparse.ArgumentParser:
  flags = _global_flags()
  parser = argparse.ArgumentParser(
      prog="scfcl",
      description="Saturated-core fault current limiter co-simulator.",
      parents=[flags],
  )
  parser.add_argument(
      "--version", action="version", version=f"scfcl {scfcl.__version__}"
  )
  subparsers = parser.add_subparsers(dest="command", metavar="<command>")
  subparsers.required = True

  run_parser = subparsers.add_parser(
      "run", help="Run a scenario file.", parents=[flags]
  )
  run_parser.add_argument("file", help="Scenario file (.json, .yaml, .yml).")
  _add_batch_flags(run_parser, default_out=".")
  run_parser.set_defaults(func=_cmd_run)

  suite_parser = subparsers.add_parser(
      "suite", help="Run a comparison suite.", parents=[flags]
  )
  suite_parser.add_argument("name", choices=suite.available_suites())
  _add_batch_flags(suite_parser, default_out="")
  suite_parser.set_defaults(func=_cmd_suite)

  analyze_parser = subparsers.add_parser(
      "analyze", help="Evaluate closed-form formulas.", parents=[flags]
  )
  _add_analyze_parsers(analyze_parser, parents=[flags])
  analyze_parser.set_defaults(func=_cmd_analyze)
  return parser


# Output


def _format_value(value: Any) -> str:
  if isinstance(value, bool):
    return str(value).lower()
  if isinstance(value, float):
    return f"{value:.6g}"
  return str(value)


def _emit(rows: Rows, output_format: Optional[str]) -> None:
  if output_format == "csv":
    pd.DataFrame(rows).to_csv(
        sys.stdout, index=False, float_format="%.10g", lineterminator="\n"
    )
  elif output_format == "json":
    payload: Any = rows[0] if len(rows) == 1 else rows
    print(json.dumps(payload, indent=2, sort_keys=True))
  else:
    for row in rows:
      print("  ".join(f"{k} = {_format_value(v)}" for k, v in row.items()))


def _report_rows(batch: suite.BatchResult, names: Sequence[str]) -> Rows:
  frame = suite.comparison_frame(batch)
  frame = frame[frame["name"].isin(list(names))]
  return json.loads(frame.to_json(orient="records", double_precision=15))


# Commands


def _require_svg(args: argparse.Namespace) -> None:
  if args.svg and visualization.mpl_figure is None:
    raise exceptions.ConfigError(
        "--svg needs matplotlib: pip install 'scfcl[plot]'", key="svg"
    )


def _sim_overrides(args: argparse.Namespace) -> Dict[str, float]:
  overrides = {}
  if getattr(args, "dt", None) is not None:
    overrides["dt_s"] = args.dt
  if getattr(args, "t_end", None) is not None:
    overrides["t_end_s"] = args.t_end
  return overrides


def _cmd_run(args: argparse.Namespace) -> int:
  _require_svg(args)
  overrides = _sim_overrides(args)
  variants = scenario.expand(
      scenario.load_file(args.file),
      dt_s=overrides.get("dt_s"),
      t_end_s=overrides.get("t_end_s"),
  )
  output_format = getattr(args, "output_format", None)
  batch = suite.run_scenarios(
      variants,
      args.out,
      workers=args.workers,
      svg=args.svg,
      show_progress=output_format is None,
  )
  names = [v.name for v in variants]
  if output_format is None:
    for name in names:
      progress.print_run_complete(name, batch.reports[name].newton)
    progress.print_save_complete([str(p) for p in batch.paths])
  else:
    _emit(_report_rows(batch, names), output_format)
  return EXIT_OK


def _cmd_suite(args: argparse.Namespace) -> int:
  _require_svg(args)
  sim = cosim.SimConfig(**_sim_overrides(args))
  output_format = getattr(args, "output_format", None)
  result = suite.run_suite(
      args.name,
      args.out or args.name,
      sim=sim,
      workers=args.workers,
      svg=args.svg,
      show_progress=output_format is None,
  )
  if output_format is None:
    for check in result.checks:
      progress.print_check(check.name, check.passed, check.detail)
    progress.print_suite_summary(
        result.name,
        completed=len(result.batch.series),
        failed=0,
        checks_failed=len(result.failed_checks),
        elapsed_time=result.elapsed_s,
        out_dir=str(result.out_dir),
    )
  elif output_format == "json":
    _emit(
        [{
            "suite": result.name,
            "passed": result.passed,
            "checks": [dataclasses.asdict(c) for c in result.checks],
        }],
        output_format,
    )
  else:
    _emit(_report_rows(result.batch, list(result.batch.reports)), "csv")
  return EXIT_OK if result.passed else EXIT_CHECK_FAILED


def _cmd_analyze(args: argparse.Namespace) -> int:
  _emit(args.formula_fn(args), getattr(args, "output_format", None))
  return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
  """Runs the command line and returns the exit code."""
  parser = build_parser()
  try:
    args = parser.parse_args(argv)
  except SystemExit as e:
    return EXIT_OK if e.code in (0, None) else EXIT_CONFIG
  if getattr(args, "verbose", False):
    debug_utils.configure_debug_logging()
  if getattr(args, "seed_free", False):
    logging.info("scfcl draws no random numbers; runs are deterministic.")
  try:
    return args.func(args)
  except (exceptions.ConfigError, exceptions.InputError) as e:
    print(f"scfcl: configuration error: {e}", file=sys.stderr)
    return EXIT_CONFIG
  except (exceptions.SolverError, exceptions.MetricsError) as e:
    print(f"scfcl: {type(e).__name__}: {e}", file=sys.stderr)
    return EXIT_SOLVER


if __name__ == "__main__":
  sys.exit(main())

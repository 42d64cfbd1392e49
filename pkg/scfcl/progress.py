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

"""Progress bars and styled completion messages for scfcl runs."""

from __future__ import annotations

import os
from typing import Iterable, Optional

import tqdm

from scfcl.core import data

# ANSI color codes for terminal output
BLUE = "\033[94m"
GREEN = "\033[92m"
RED = "\033[91m"
YELLOW = "\033[93m"
CYAN = "\033[96m"
BOLD = "\033[1m"
RESET = "\033[0m"

# Google Blue color for progress bars
GOOGLE_BLUE = "#4285F4"

_BRAND = f"{BLUE}{BOLD}scfcl{RESET}"


def _basename(path: str) -> str:
  return os.path.basename(os.fspath(path).rstrip("/")) or str(path)


def create_suite_progress_bar(
    total_runs: int, suite_name: str, disable: bool = False
) -> tqdm.tqdm:
  """Create a progress bar over the runs of a suite or scenario file.

  Args:
    total_runs: Number of transient runs, baselines included.
    suite_name: Suite or scenario name shown in the description.
    disable: Whether to disable the progress bar.

  Returns:
    A configured tqdm progress bar.
  """
  return tqdm.tqdm(
      total=total_runs,
      desc=f"{_BRAND}: {GREEN}{suite_name}{RESET}",
      bar_format=(
          "{desc}: {percentage:3.0f}%|{bar}| {n_fmt}/{total_fmt} runs"
          " [{elapsed}<{remaining}]"
      ),
      colour=GOOGLE_BLUE,
      ncols=100,
      disable=disable,
  )


def format_run_stats(stats: data.SolverStats) -> str:
  """Format Newton statistics of one run with colors."""
  return (
      f"steps={GREEN}{stats.steps:,}{RESET},"
      f" newton={GREEN}{stats.newton_iterations:,}{RESET},"
      f" substepped={GREEN}{stats.substepped_steps}{RESET}"
  )


def print_run_complete(
    name: str, stats: data.SolverStats, elapsed_time: Optional[float] = None
) -> None:
  """Print a styled completion message for one transient run.

  Args:
    name: Run name.
    stats: Solver statistics of the run.
    elapsed_time: Optional wall time in seconds.
  """
  message = f"{GREEN}✓{RESET} {BOLD}{name}{RESET} ({format_run_stats(stats)})"
  if elapsed_time is not None:
    message += f" in {BOLD}{elapsed_time:.2f}s{RESET}"
  print(message, flush=True)


def print_run_failed(name: str, error: Exception) -> None:
  """Print the error that stopped a run."""
  print(
      f"{RED}✗{RESET} {BOLD}{name}{RESET}: {type(error).__name__}: {error}",
      flush=True,
  )


def print_save_complete(paths: Iterable[str]) -> None:
  """Print the files written by a run."""
  names = [_basename(p) for p in paths]
  if not names:
    return
  print(
      f"{GREEN}✓{RESET} Saved {BOLD}{len(names)}{RESET} files:"
      f" {GREEN}{', '.join(names)}{RESET}",
      flush=True,
  )


def print_check(name: str, passed: bool, detail: str = "") -> None:
  mark = f"{GREEN}✓{RESET}" if passed else f"{YELLOW}!{RESET}"
  suffix = f" ({detail})" if detail else ""
  print(f"  {mark} {name}{suffix}", flush=True)


def print_suite_summary(
    suite_name: str,
    completed: int,
    failed: int,
    checks_failed: int,
    elapsed_time: Optional[float] = None,
    out_dir: Optional[str] = None,
) -> None:
  """Print a styled suite summary.

  Args:
    suite_name: Suite name.
    completed: Number of completed runs.
    failed: Number of failed runs.
    checks_failed: Number of violated suite properties.
    elapsed_time: Optional elapsed time in seconds.
    out_dir: Optional report directory.
  """
  ok = failed == 0 and checks_failed == 0
  mark = f"{GREEN}✓{RESET}" if ok else f"{RED}✗{RESET}"
  print(
      f"{mark} Suite {BOLD}{suite_name}{RESET}: {BOLD}{completed}{RESET} runs"
      f" completed, {BOLD}{failed}{RESET} failed",
      flush=True,
  )
  metrics = [f"Failed checks: {BOLD}{checks_failed}{RESET}"]
  if elapsed_time is not None:
    metrics.append(f"Time: {BOLD}{elapsed_time:.2f}s{RESET}")
  if out_dir is not None:
    metrics.append(f"Report: {BLUE}{out_dir}{RESET}")
  for metric in metrics:
    print(f"  {CYAN}•{RESET} {metric}", flush=True)

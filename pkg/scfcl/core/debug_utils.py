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

"""Call tracing and debug logging for the numerical entry points.

Tracing costs nothing unless the "scfcl" logger is at DEBUG, which
configure_debug_logging() (or scfcl -v) turns on. Arrays and solver results
are summarized rather than printed in full.
"""

from __future__ import annotations

import functools
import inspect
import logging
import reprlib
import time
from typing import Any, Callable, Mapping

from absl import logging as absl_logging
import numpy as np

from scfcl.core import exceptions

_LOG = logging.getLogger("scfcl.trace")

_scfcl_logger = logging.getLogger("scfcl")
if not _scfcl_logger.handlers:
  _scfcl_logger.addHandler(logging.NullHandler())

_MAX_ITEMS = 6
_RESIDUAL_TAIL = 3

_repr = reprlib.Repr()
_repr.maxstring = 120
_repr.maxother = 120
_repr.maxlist = _repr.maxtuple = _repr.maxdict = _MAX_ITEMS


def _summarize(value: Any) -> str:
  """Short description of an argument or result."""
  if isinstance(value, np.ndarray):
    if value.size == 0:
      return f"array{value.shape}"
    return f"array{value.shape}[{np.min(value):.4g}..{np.max(value):.4g}]"
  stats = getattr(value, "stats", None)
  if stats is not None and hasattr(value, "time"):
    return (
        f"{type(value).__name__}(samples={len(value.time)},"
        f" newton={stats.newton_iterations},"
        f" substepped={stats.substepped_steps})"
    )
  if hasattr(value, "iterations") and hasattr(value, "residual_norm"):
    return (
        f"{type(value).__name__}(iterations={value.iterations},"
        f" residual={value.residual_norm:.3g})"
    )
  if isinstance(value, Mapping) and all(
      isinstance(v, (int, float)) for v in value.values()
  ):
    items = [f"{k}={v:.4g}" for k, v in list(value.items())[:_MAX_ITEMS]]
    if len(value) > _MAX_ITEMS:
      items.append("...")
    return "{" + ", ".join(items) + "}"
  name = getattr(value, "name", None)
  if isinstance(name, str) and hasattr(value, "__dataclass_fields__"):
    return f"{type(value).__name__}({name!r})"
  return _repr.repr(value)


def _arguments(fn: Callable, args, kwargs) -> str:
  try:
    bound = inspect.signature(fn).bind_partial(*args, **kwargs)
  except (TypeError, ValueError):
    return ", ".join(_summarize(a) for a in args)
  return ", ".join(
      f"{k}={_summarize(v)}" for k, v in bound.arguments.items()
      if v is not None
  )


def debug_log_calls(fn: Callable) -> Callable:
  """Traces calls, results and wall time of fn at DEBUG.

  A SolverError is logged with the simulated time and the last residuals
  before it propagates.
  """
  qualname = f"{fn.__module__}.{fn.__qualname__}"

  @functools.wraps(fn)
  def wrapper(*args, **kwargs):
    if not _LOG.isEnabledFor(logging.DEBUG):
      return fn(*args, **kwargs)

    _LOG.debug("%s(%s)", qualname, _arguments(fn, args, kwargs))
    start = time.perf_counter()
    try:
      result = fn(*args, **kwargs)
    except exceptions.SolverError as e:
      residuals = getattr(e, "residual_history", [])[-_RESIDUAL_TAIL:]
      _LOG.debug(
          "%s failed after %.1f ms at t=%s: %s (last residuals %s)",
          qualname,
          (time.perf_counter() - start) * 1e3,
          getattr(e, "time_s", None),
          e,
          ", ".join(f"{r:.3g}" for r in residuals) or "none",
      )
      raise
    _LOG.debug(
        "%s -> %s in %.1f ms",
        qualname,
        _summarize(result),
        (time.perf_counter() - start) * 1e3,
    )
    return result

  return wrapper


def configure_debug_logging() -> None:
  """Sends DEBUG records of the "scfcl" namespace to stderr.

  Safe to call more than once. Handlers installed by the application are
  kept and no stream handler is added next to them.
  """
  logger = logging.getLogger("scfcl")
  logger.setLevel(logging.DEBUG)
  if any(getattr(h, "scfcl_debug", False) for h in logger.handlers):
    return
  if all(isinstance(h, logging.NullHandler) for h in logger.handlers):
    handler = logging.StreamHandler()
    handler.setFormatter(
        logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s")
    )
    handler.scfcl_debug = True
    logger.addHandler(handler)
    logger.propagate = False
  absl_logging.set_verbosity(absl_logging.DEBUG)

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

"""scfcl: transient co-simulation of saturated-core fault current limiters.

This package provides the top-level run and run_suite functions, with lazy
loading for other submodules accessed via attribute access.
"""

from __future__ import annotations

import importlib
import sys
from typing import Any, Dict

__version__ = "1.0.0"

# pylint: disable=wrong-import-position
from scfcl import cosim

__all__ = [
    # Public convenience functions (thin wrappers)
    "run",
    "run_suite",
    # Submodules exposed lazily on attribute access:
    "analysis",
    "cosim",
    "material",
    "mec",
    "topology",
    "scenario",
    "suite",
    "io",
    "visualization",
    "exceptions",
    "core",
]

_CACHE: Dict[str, Any] = {}


def run(*args: Any, **kwargs: Any):
  """Top-level API: scfcl.run(scenario, sim)."""
  return cosim.run(*args, **kwargs)


def run_suite(*args: Any, **kwargs: Any):
  """Top-level API: scfcl.run_suite("fault-comparison", out_dir)."""
  from scfcl import suite  # pylint: disable=import-outside-toplevel

  return suite.run_suite(*args, **kwargs)


# PEP 562 lazy loading
_LAZY_MODULES = {
    "analysis": "scfcl.analysis",
    "cli": "scfcl.cli",
    "core": "scfcl.core",
    "data": "scfcl.core.data",
    "data_lib": "scfcl.data_lib",
    "debug_utils": "scfcl.core.debug_utils",
    "exceptions": "scfcl.core.exceptions",
    "io": "scfcl.io",
    "material": "scfcl.material",
    "mec": "scfcl.mec",
    "progress": "scfcl.progress",
    "scenario": "scfcl.scenario",
    "suite": "scfcl.suite",
    "topology": "scfcl.topology",
    "types": "scfcl.core.types",
    "visualization": "scfcl.visualization",
}


def __getattr__(name: str) -> Any:
  if name in _CACHE:
    return _CACHE[name]
  modpath = _LAZY_MODULES.get(name)
  if modpath is None:
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
  module = importlib.import_module(modpath)
  setattr(sys.modules[__name__], name, module)
  _CACHE[name] = module
  return module


def __dir__():
  return sorted(__all__)

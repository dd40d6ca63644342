# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""Entrypoint for the norden_lab package."""
from ._version import __version__, version_info  # noqa: F401
from .labapp import launch_instance  # noqa: F401

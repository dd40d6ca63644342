# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""Version of norden_lab, stamped into every report as ``toolkit_version``."""

# hatch reads this line; keep it a plain string literal
__version__ = "0.4.0"

#: ``(major, minor, patch)`` integers, used by the docs build.
version_info = tuple(int(part) for part in __version__.split(".")[:3])

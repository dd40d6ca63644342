# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""CLI entrypoint for the norden_lab package."""

if __name__ == "__main__":
    import norden_lab.labapp as app

    app.launch_instance()

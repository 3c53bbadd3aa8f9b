"""Presets, config files, CSV/SVG output and the ``dpde`` command line."""

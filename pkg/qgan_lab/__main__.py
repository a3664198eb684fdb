"""qgan-lab entry point."""

from __future__ import annotations

from qgan_lab.cli import cli

cli()

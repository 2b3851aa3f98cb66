"""
Command-line interface for chaplygin-kit.

Provides Click-based commands to simulate built-in systems, run the
structural diagnostics, Hamiltonise phi-simple systems and emit plot scripts.
"""

from chaplygin_kit.cli.main import cli

__all__ = ["cli"]

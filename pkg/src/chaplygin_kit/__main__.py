"""
CLI entry point for running chaplygin-kit as a module.

Usage: python -m chaplygin_kit [OPTIONS] COMMAND [ARGS]...
"""

from chaplygin_kit.cli.main import cli

if __name__ == "__main__":
    cli()

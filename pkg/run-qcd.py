#!/usr/bin/env python3
"""
QCD Runner

Entry point for the quaternionic Cowen-Douglas toolkit:
- Reproduces the worked examples (tci, cndu)
- Runs the acceptance suite
- Forwards any other command line to the `qcd` CLI
"""

import sys
from pathlib import Path

# Configuration variables for easy VS Code execution
# Change these values and run the script directly from VS Code
COMMAND = "example"   # Options: "example", "suite"
EXAMPLE = "cndu"      # Options: "tci", "cndu"
OUTPUT_FORMAT = "json"  # Options: "json", "csv"

# Add the src/qcd directory to Python path
sys.path.insert(0, str(Path(__file__).parent / "src" / "qcd"))

from cli import main


def default_argv() -> list:
    """Command line built from the configuration variables above."""
    argv = [COMMAND]
    if COMMAND == "example":
        argv.append(EXAMPLE)
    return argv + ["--format", OUTPUT_FORMAT]


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:] or default_argv()))

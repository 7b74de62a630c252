"""
emrQA toolkit entry point

Usage:
    python main.py <subcommand> [options]
    python main.py --help
"""

import sys

from src.cli import run

if __name__ == "__main__":
    sys.exit(run())

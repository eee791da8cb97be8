#!/usr/bin/env python3
"""
PAVANE Command-Line Launcher
Run this script with a subcommand, e.g.

    python run_app.py count --class A:4 --max-n 8
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from app.main import run_cli


def main():
    try:
        return run_cli(sys.argv[1:])
    except KeyboardInterrupt:
        sys.stderr.write("\nStopped by user\n")
        return 130


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""
qtp - classical and photon-pair speckle simulator
Entry point for the `qtp` command line
"""

import sys

from src.runner.cli import main

if __name__ == "__main__":
    sys.exit(main())

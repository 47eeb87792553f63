#!/usr/bin/env python3
"""Runner script for the stochastica command line."""

import os
import sys

# Add the repository root to the path to import the packages
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from stochastica.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""
Run the gradord command line from a source checkout.
"""
import os
import sys

# Add the parent directory to sys.path to allow importing from the project
parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if parent_dir not in sys.path:
    sys.path.insert(0, parent_dir)

from gradord.api.cli import main

if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""
Experiment Runner CLI

Runs one gcrm experiment without installing the package:

    python scripts/run_experiment.py pair-corr --sampler a1 --alpha 1.5 --b 1 --n 1,2,3
"""

import os
import sys

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from gcrm.runner import main

if __name__ == "__main__":
    sys.exit(main())

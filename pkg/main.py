#!/usr/bin/env python3
"""
Approximate At-Most-k Toolkit
=============================

CNF encodings of at-most-k constraints and their incomplete
approximate-at-most-k tree models.

Usage:
    python main.py encode --shape "2x2,2x2;m=2;k=2;ff=0;ft=0" -o model.cnf
    python main.py encode --encoding counter --n 10 --k 5
    python main.py analyze --shape "2x3;m=2;k=3;ff=1;ft=1" --oracle both
    python main.py search --k 5 --n 10
    python main.py reproduce fig4

Workflow:
1. ENCODE: build the model formula, write DIMACS
2. ANALYZE: literal rate against the counter encoding, coverage, efficiency
3. SEARCH: rank every shape within the bounds for (k, n)
4. REPRODUCE: CSV data for the literal, efficiency and coverage experiments
"""

import sys
from pathlib import Path

# Add modules to path
sys.path.insert(0, str(Path(__file__).parent))

from modules.cli import main
from modules.config_manager import Constants
from modules.logger import get_logger

logger = get_logger(__name__)


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        sys.exit(Constants.EXIT_VALIDATION)

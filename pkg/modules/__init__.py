"""
Approximate At-Most-k Toolkit Modules
=====================================

Modules:
- cnf: formula container, literals, DIMACS writer
- encoders: binomial and counter at-most-k, order columns, baselines
- approx: approximate-at-most-k tree models and their encoder
- solver: embedded DPLL satisfiability checker
- oracle: structural and brute-force acceptance counting, coverage
- metrics: literal rate, efficiency, best-model search
- reports: CSV tables for the experiments
- ui: Rich terminal rendering
- cli: argparse front end
- config_manager: Singleton configuration management
- logger: Centralized logging
- cache: File-based histogram cache
"""

from .cnf import Cnf, CnfError, CnfStats, new_formula, write_dimacs
from .encoders import EncoderError, at_most_binomial, at_most_counter, encode_baseline
from .approx import ModelShape, SearchBounds, ShapeError, encode_approx, parse_shape
from .oracle import OracleError, count_accepted_bruteforce, count_accepted_dp, coverage
from .metrics import EfficiencyReport, best_model, efficiency, find_probability, rank_models
from .config_manager import config, Constants, get_thread_count
from .logger import get_logger, setup_logging
from .cache import ResultCache, get_cache

__all__ = [
    # Formulas
    'Cnf',
    'CnfError',
    'CnfStats',
    'new_formula',
    'write_dimacs',
    # Encoders
    'EncoderError',
    'at_most_binomial',
    'at_most_counter',
    'encode_baseline',
    # Models
    'ModelShape',
    'SearchBounds',
    'ShapeError',
    'encode_approx',
    'parse_shape',
    # Oracles
    'OracleError',
    'count_accepted_bruteforce',
    'count_accepted_dp',
    'coverage',
    # Metrics
    'EfficiencyReport',
    'best_model',
    'efficiency',
    'find_probability',
    'rank_models',
    # Config
    'config',
    'Constants',
    'get_thread_count',
    # Logging
    'get_logger',
    'setup_logging',
    # Cache
    'ResultCache',
    'get_cache',
]

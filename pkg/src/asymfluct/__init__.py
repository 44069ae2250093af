"""Asymptotic states, clustering tests and fluctuation moments for quantum dynamical systems."""

__version__ = "0.1.0"

from .averaging import AverageConfig, evaluate_phi_infinity, nested_average, phi_infinity
from .clustering import CONDITIONS, catmap_counterexample, check_implication_chain, run_all_conditions, run_condition
from .fluctuations import FluctuationSpec, asymptotic_moment_pair_sum, convergence_table, finite_n_moment
from .models import build_model, resolve_model
from .partitions import catalan, catalan_audit, enumerate_pair_partitions
from .words import Letter, Word, format_word, normalize_labels, parse_word, reduce, word

__all__ = [
    "AverageConfig",
    "CONDITIONS",
    "FluctuationSpec",
    "Letter",
    "Word",
    "__version__",
    "asymptotic_moment_pair_sum",
    "build_model",
    "catalan",
    "catalan_audit",
    "catmap_counterexample",
    "check_implication_chain",
    "convergence_table",
    "enumerate_pair_partitions",
    "evaluate_phi_infinity",
    "finite_n_moment",
    "format_word",
    "nested_average",
    "normalize_labels",
    "parse_word",
    "phi_infinity",
    "reduce",
    "resolve_model",
    "run_all_conditions",
    "run_condition",
    "word",
]

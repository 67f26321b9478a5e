"""Measures on base sets, their extension along fiberings, and the audits."""

from .assignment import MeasureAssignment, corrupted, pair_measure
from .audit import (AuditReport, CheckResult, check_composition, check_fubini, check_fubini_map,
                    check_uniqueness, check_witness_independence, finite_corpus, generate_corpus,
                    projection_value, squaring_instances)
from .extend import MeasureReport, extend
from .levels import LevelSetReport, base_measure, level_sets, mu_f, param_level_sets

__all__ = ["AuditReport", "CheckResult", "LevelSetReport", "MeasureAssignment", "MeasureReport",
           "base_measure", "check_composition", "check_fubini", "check_fubini_map",
           "check_uniqueness", "check_witness_independence", "corrupted", "extend",
           "finite_corpus", "generate_corpus", "level_sets", "mu_f", "pair_measure",
           "param_level_sets", "projection_value", "squaring_instances"]

"""Extreme sets and measures on finite abelian groups: exact verification,
grid search with certified bounds, and a catalog of known examples."""

from .catalog import CatalogEntry, load_catalog, verify_all, verify_entry
from .cyclotomic import CycloSum, ExactVerdict, exact_extremality_check
from .equivalence import are_equivalent, canonical_form, enumerate_class_representatives
from .groups import GroupSpec, make_group, parse_elements, parse_group
from .measures import PhaseMeasure, adjoint, convolve, dual_measure, sup_transform, transform
from .search import (
    CertifiedNotExtreme,
    ExtremeFound,
    Inconclusive,
    Objective,
    SearchConfig,
    SearchReport,
    coefficient_certificate,
    psc_lower_bound,
    psc_upper_bound,
    run_search,
)
from .structure import build_coset_union_measure, passes_difference_test, two_element_psc

__all__ = [
    "CatalogEntry", "load_catalog", "verify_all", "verify_entry",
    "CycloSum", "ExactVerdict", "exact_extremality_check",
    "are_equivalent", "canonical_form", "enumerate_class_representatives",
    "GroupSpec", "make_group", "parse_elements", "parse_group",
    "PhaseMeasure", "adjoint", "convolve", "dual_measure", "sup_transform", "transform",
    "CertifiedNotExtreme", "ExtremeFound", "Inconclusive", "Objective", "SearchConfig", "SearchReport",
    "coefficient_certificate", "psc_lower_bound", "psc_upper_bound", "run_search",
    "build_coset_union_measure", "passes_difference_test", "two_element_psc",
]

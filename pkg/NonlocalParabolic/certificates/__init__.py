from .bounds import BoundEstimate, BoundSet, estimate_bounds, estimate_sup, check_ordering
from .theorems import (
    Inequality, CertificateReport, certify_existence, certify_or_existence, certify_three_solutions,
    certify_nonexistence, scan_nested_radii,
)

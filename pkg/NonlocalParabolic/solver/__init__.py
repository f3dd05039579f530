from .picard import (
    CONVERGED, DIVERGED, MAX_ITERS, Localization, SolveResult, MultiStartResult,
    localize, classify_region, verify, picard_solve, make_seeds, multi_start,
)

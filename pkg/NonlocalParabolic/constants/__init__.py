from .harnack import (
    ConstantsError, ConditionBounds, ConstantsBundle, MResult, Thresholds, DEFAULT_T_GIBBS,
    compute_m, compute_c1_c2, compute_C1_C2, nonexistence_constants, thresholds, compute_constants,
)
from .scan import ScanRow, scan_b, write_scan_csv

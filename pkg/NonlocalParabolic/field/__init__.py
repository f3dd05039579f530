from .field import (
    SpaceTimeField, CheckOutcome, DEFAULT_CONE_TOL, plateau, sup_norm, floor_functional,
    evolve_initial, in_cone, harnack_check, write_pair_csv,
)

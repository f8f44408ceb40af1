"""Exact computations with (C,F)-sequences of rank-one group actions."""
from .errors import DomainError, FormatError, InvariantViolation, PreconditionError, RankOneError, ValidationError
from .factor import (
    FactorWitness,
    OdometerSpec,
    approx_eq,
    build_factor_map,
    check_factor_witness,
    check_topological_quotient,
    non_overlap,
    odometer_defects,
    search_odometer_telescoping,
)
from .groups import DirectProduct, FreeGroup, Group, IntegerLattice, IntegerLine
from .iso import (
    IsoWitness,
    SearchBounds,
    ShiftMap,
    build_auxiliary,
    build_isomorphism,
    check_witness,
    good_sequence,
    search_witness,
    shift_witness,
)
from .maps import (
    calibrate,
    chain_check,
    chain_map,
    chain_normalize,
    compose,
    map_divergence,
    normalize,
    quotient_check,
    quotient_map,
    reduce,
    standardize,
    telescope,
)
from .params import (
    CFSequence,
    FiniteSubset,
    arithmetic_family,
    from_cutting_stacking,
    mass_profile,
    odometer,
    shift_family,
    validate,
)
from .space import Point, act, cocycle, cylinder, cylinder_measure, enumerate_points

__version__ = "0.1.0"

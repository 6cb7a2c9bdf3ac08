"""Functional equivalence classes of single-hidden-layer tanh networks."""

from .canonical import CanonicalisationRecord, canonical_form, canonicalise, equivalent
from .characterisation import (
    Exchange,
    Negate,
    Trace,
    apply_transforms,
    canonicalisation_trace,
    enumerate_traces,
    exchange_units,
    generate_instance,
    in_class_bruteforce,
    negate_unit,
    sample_class_member,
    trace_membership,
)
from .core import (
    DEFAULT_TOL,
    Parameter,
    Shape,
    ToleranceConfig,
    evaluate,
    functions_equal,
    lex_compare,
    lex_sign,
    plant_redundancy,
    random_parameter,
)
from .paths import (
    PiecewiseLinearPath,
    blank_exchange_path,
    connect,
    path_to_canonical,
    seven_segment_path,
    verify_path,
)
from .reducibility import Condition, Witness, find_redundancy, rank, reduce_in_place, reduce_once

__version__ = "0.1.0"

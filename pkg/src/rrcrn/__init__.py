"""Reverse-robust chemical reaction networks: simulation, bounded
verification, invariants and the semilinear constructions."""

from .constructions import (
    Composition,
    combine_boolean,
    compile_affine,
    compile_mod,
    compile_predicate,
    compile_semilinear,
    compile_threshold,
    complement,
    parallel_compose,
    split_reactions,
)
from .core import (
    CRC,
    CRD,
    CRN,
    Config,
    Device,
    Direction,
    Execution,
    Mode,
    Reaction,
    Step,
    Vote,
    apply,
    crc_output,
    crd_output,
    enabled,
    initial_configuration,
    net_change,
)
from .devfile import parse_device, parse_trace, serialize_device
from .errors import *  # noqa: F401,F403
from .invariants import (
    LinearInvariant,
    ModularInvariant,
    check,
    conserved_along,
    evaluate,
    find_linear_invariants,
)
from .reachability import Cap, Model, Outcome, ReachSet, Verdict, explore, is_stable, verify, witness
from .specs import AffineSpec, ModSpec, SemilinearSpec, ThresholdSpec
from .transform import (
    cancel_inverse_pair,
    commute_adjacent,
    eliminate_reverse_splits,
    is_split_normal,
    replay,
)

__version__ = "0.1.0"

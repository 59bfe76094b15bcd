"""Adaptive streaming erasure codes for a source -> relay -> destination network."""

from .bounds import BoundReport, adversary_heuristic, bruteforce_bound, upper_bound
from .channel import ErasurePair, enumerate_admissible_pairs, sample_pair, validate_pair
from .destination import DestinationDecoder, reconstruct_first_link_history
from .errors import *  # noqa: F401,F403
from .field import (
    CauchyCode,
    Field,
    make_systematic_mds_generator,
    mds_decode_from_subset,
    mds_encode,
    solve_linear_system,
)
from .harness import run_session, run_sweep, structural_check, verify_exhaustive
from .params import CodeParams, achievable_rate, derive_params, nonadaptive_rate
from .relay import Estimate, RelayNode, RelayPacket
from .schedule import RelaySchedule, alpha_trace, compute_alphas
from .source import SourceEncoder, encode_source

__version__ = "0.1.0"

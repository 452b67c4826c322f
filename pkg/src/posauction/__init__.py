"""Budget-constrained position auctions: GSP, VCG and EGFP under liquid welfare."""
from .errors import *  # noqa: F401,F403
from .mechanisms import Mechanism, check_no_over, egfp_outcome, gsp_outcome, outcome, vcg_outcome
from .model import (
    Assignment,
    Instance,
    MatrixBidProfile,
    Outcome,
    ScalarBidProfile,
    rank_by_bids,
    validate_instance,
)
from .welfare import liquid_welfare, optimal_assignment, social_welfare

__version__ = "0.1.0"

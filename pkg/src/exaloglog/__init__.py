"""ExaLogLog: approximate distinct counting up to the exa-scale.

A HyperLogLog-family sketch with (6 + t + d)-bit registers: the top
6 + t bits track the maximum update value, the low d bits flag the
occurrences of the d next-smaller values.  Insertion is constant time,
merging and parameter reduction are lossless, and estimation uses either
a Newton-based maximum-likelihood solver or an online martingale
estimator.  A sparse mode collects compact hash tokens before the
register array is worth allocating.
"""

from .backend import BACKEND
from .bitpack import PackedArray
from .estimator import (
    Coefficients,
    MartingaleState,
    MlSolution,
    bias_correction_constant,
    compute_coefficients,
    estimate_distinct,
    martingale_update,
    nu,
    pmf_register,
    record_hashes,
    solve_ml,
    state_change_probability,
)
from .params import Params, exponent, rho, sigma
from .sketch import (
    IncompatibleParamsError,
    Sketch,
    SketchFormatError,
    UpdateOutcome,
    merge_registers,
    record,
)
from .sim import ErrorReport, ReportRow, SimPlan, aggregate, run_plan
from .theory import (
    TheoryConfig,
    hurwitz_zeta,
    mvp_grid_argmin,
    mvp_martingale,
    mvp_ml,
    theoretical_rmse,
)
from .tokens import (
    TokenSet,
    estimate_from_tokens,
    from_token,
    to_token,
    token_coefficients,
    token_pmf,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Coefficients",
    "ErrorReport",
    "IncompatibleParamsError",
    "MartingaleState",
    "MlSolution",
    "PackedArray",
    "Params",
    "ReportRow",
    "SimPlan",
    "Sketch",
    "SketchFormatError",
    "TheoryConfig",
    "TokenSet",
    "UpdateOutcome",
    "aggregate",
    "bias_correction_constant",
    "compute_coefficients",
    "estimate_distinct",
    "estimate_from_tokens",
    "exponent",
    "from_token",
    "hurwitz_zeta",
    "martingale_update",
    "merge_registers",
    "mvp_grid_argmin",
    "mvp_martingale",
    "mvp_ml",
    "nu",
    "pmf_register",
    "record",
    "record_hashes",
    "rho",
    "run_plan",
    "sigma",
    "solve_ml",
    "state_change_probability",
    "theoretical_rmse",
    "to_token",
    "token_coefficients",
    "token_pmf",
]

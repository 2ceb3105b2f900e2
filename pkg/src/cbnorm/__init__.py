"""Fidelity, maximum output fidelity and completely bounded norms via semidefinite programming."""
from .channels import (
    ChannelRep,
    ChoiMatrix,
    StinespringPair,
    adjoint,
    apply,
    choi_from_stinespring,
    reduced_maps,
    stinespring_from_choi,
)
from .linalg import fidelity_direct, partial_trace, sqrtm_psd, trace_norm
from .programs import (
    NormResult,
    alberti_check,
    cb_spectral_norm,
    diamond_norm,
    fidelity_sdp,
    max_output_fidelity,
)
from .sdp import Certificate, SdpProblem, SdpSolution, check, solve

__version__ = "0.1.0"

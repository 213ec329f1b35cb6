"""Achievable rate regions of the two-user Gaussian interference channel
with trellis-coded BPSK inputs."""

__version__ = "0.1.0"

from .channel import ChannelParams, SampleRecord, branch_loglik, db_to_linear, simulate
from .infodensity import (RateEstimate, TrellisHMM, estimate_conditional_entropy_rate,
                          estimate_mi_rate, estimate_output_entropy_rate,
                          forward_log_likelihood)
from .quadrature import bpsk_awgn_mi, noise_model_mi
from .region import RateRegion, Rectangle, assemble, point_a_b, point_c
from .trellis import (GeneratorMatrix, JointTrellis, Trellis, build_conv_trellis,
                      build_iud_trellis, parse_scheme, product_trellis)

__all__ = [
    "ChannelParams", "SampleRecord", "branch_loglik", "db_to_linear", "simulate",
    "RateEstimate", "TrellisHMM", "estimate_conditional_entropy_rate", "estimate_mi_rate",
    "estimate_output_entropy_rate", "forward_log_likelihood",
    "bpsk_awgn_mi", "noise_model_mi",
    "RateRegion", "Rectangle", "assemble", "point_a_b", "point_c",
    "GeneratorMatrix", "JointTrellis", "Trellis", "build_conv_trellis", "build_iud_trellis",
    "parse_scheme", "product_trellis",
]

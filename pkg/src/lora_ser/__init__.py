"""LoRa error probability on flat Rician/Rayleigh block fading.

Monte Carlo simulation of the chirp modem, the exact SER (alternating sum and
numerical integration) and two-region union bounds.
"""

from .analytic import (
    PrecisionError,
    ber_from_ser,
    exact_rician_sum,
    ser_exact_rician,
    ser_noncoherent,
    ser_numeric_integration,
)
from .bounds import (
    BoundDomainError,
    bound_terms,
    marcum_args,
    ser_lower,
    ser_lower_exp,
    ser_lower_rayleigh,
    ser_upper,
    ser_upper_exp,
    ser_upper_rayleigh,
)
from .channel import ChannelParams, apply_channel, sample_tap
from .link import LinkBudget, db_to_linear
from .modem import LoRaParams, dechirp_dft, detect, modulate
from .montecarlo import McConfig, McResult, simulate_ser
from .quadrature import QuadratureError
from .specfun import (
    NoncentralChi2,
    bessel_i0_scaled,
    log_binomial,
    marcum_p1,
    marcum_q1,
    noncentral_chi2_cdf,
    noncentral_chi2_pdf,
)

__version__ = "0.1.0"

"""Rate-distortion converse bounds for integrated sensing and communication.

Quantities are in nats unless a function says otherwise.
"""

from .channels import SystemConfig, ergodic_rate_csir, sample_nakagami_matrix
from .mathfn import binary_entropy, binary_entropy_inverse, digamma, kl_bernoulli, log_gamma
from .montecarlo import McEstimate, ergodic_capacity_mc, expect
from .nakagami import (
    BcrbInapplicable,
    NakagamiParams,
    bcrb_from_cov,
    c_m,
    inverse_rd_nakagami,
    mmse_lower_bound_from_cov,
    mmse_lower_bound_global,
)
from .occupancy import OccupancyConfig, detection_bound_from_gamma, detection_error_lower_bound
from .optimizer import (
    LogdetFloor,
    PsdConstraintSet,
    QuadformFloor,
    maximize_rate_with_floor,
    pareto_hull,
    pareto_sweep_nakagami,
    pareto_sweep_occupancy,
    water_filling,
)
from .rdtheory import BernoulliSource, DiscreteSource, bernoulli_rd, blahut_arimoto, second_order_bound

__version__ = "0.1.0"

"""Distortion analysis of correlated Gaussian sources over Gaussian multiple-access
and orthogonal channels: uncoded (AF), separation-based (SB) and correlated-codebook
(LT) transmission, converse bounds, power allocation and side information."""
from .af import (AfParams, MultiUserParams, af_distortions, af_multiuser, af_multiuser_limits,
                 af_symmetric, af_symmetric_limit)
from .bounds import nc_distortion, nc_high_branch, nc_low_branch, nc_threshold
from .errors import (ConfigError, DegenerateCorrelation, InvalidParams, JsccError, NoConvergence,
                     SingularObservation, UnknownLabel, UnsupportedScheme)
from .gauss import (ConditionalLaw, JointGaussian, condition, conditional_variance,
                    mutual_information)
from .lt import (lt_covariance, lt_distortions, lt_high_snr_approx, lt_low_snr_approx, lt_optimize,
                 lt_optimize_symmetric, lt_rate_bounds, lt_rho_tilde)
from .mc import SimResult, simulate_af_gmac, simulate_af_orthogonal, simulate_af_si
from .multiuser import lt_multiuser, multiuser_distortion, sb_multiuser
from .orthogonal import (GapBounds, OrthParams, orth_af_distortions, orth_af_symmetric,
                         orth_gap_bounds, orth_sb_distortion)
from .power import (PowerSolution, af_critical_power, af_weighted_objective, lt_weighted_objective,
                    optimize_af_powers, verify_full_power_optimal)
from .results import SchemeResult
from .sb import (RatePair, sb_gmac_distortion, sb_gmac_rate, sb_high_snr_bound, sb_low_snr_bound,
                 sb_optimize, sb_region_bounds, sb_region_contains)
from .side_info import (AVAILABILITY, LinearCombo, SideInfoSpec, af_si_distortion, build_si_joint,
                        lt_si_distortion, optimize_af_si, optimize_si, orth_si_compare,
                        sb_si_distortion)

__version__ = "0.1.0"

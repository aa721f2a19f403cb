"""Monte-Carlo and exact checks of the estimates."""
from .averaging import NyquistError, avg_qnorm, plane_avg
from .dyadic import ParameterRangeError, verify_dyadic_sums
from .haar import OrthogonalSample, RejectionError, sample_haar, sample_haar_ball
from .operators import PhiSpec, bilinear_norm, verify_localization, verify_zeta_stability
from .report import EstimateReport
from .strichartz import PreconditionError, strichartz_constant

__all__ = [
    "NyquistError",
    "avg_qnorm",
    "plane_avg",
    "ParameterRangeError",
    "verify_dyadic_sums",
    "OrthogonalSample",
    "RejectionError",
    "sample_haar",
    "sample_haar_ball",
    "PhiSpec",
    "bilinear_norm",
    "verify_localization",
    "verify_zeta_stability",
    "EstimateReport",
    "PreconditionError",
    "strichartz_constant",
]

from .constraints import ConstraintConfig, DecisionMatrix, build_decision_matrix, check_cc, check_ic
from .estimation import SnrSampleSet, fit_fading, fit_log_distance_lse
from .fading import FadingKind, SnrDist, snr_cdf
from .scenario import CampaignConfig, run_campaign

__version__ = "0.1.0"

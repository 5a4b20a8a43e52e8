"""Perfect distinguishability, error-exponent bounds and simulated discrimination of quantum channels."""
from .bounds import BoundsReport, MultiBoundsReport, chernoff_envelope, multi_bounds, parallel_lower, zeta_bound
from .channel import KrausChannel, from_preset, load_channel, parse_channel
from .distinguish import DistinguishVerdict, Reason, Verdict, perfect_distinguishability, span_criterion
from .errors import QchanError
from .metrics import common_part, fidelity, helstrom_error, multi_error, state_chernoff
from .search import OptimizerConfig
from .sim import Strategy, fit_exponent, run_discrimination, run_multi, validate_theorems

__version__ = "0.1.0"

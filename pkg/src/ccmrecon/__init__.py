"""Channel covariance reconstruction for FDD massive MIMO training."""

from .array import ArrayConfig, steering
from .covariance import CcmEstimate
from .numerics import ContractError

__version__ = "0.1.0"

__all__ = ["ArrayConfig", "CcmEstimate", "ContractError", "steering", "__version__"]

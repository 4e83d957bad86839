"""Complex quartic random matrix model: equilibrium-measure phases and the
topological expansion of the free energy."""
from .model import (MULTICRITICAL, ONE_CUT, THREE_CUT, TWO_CUT, BranchConvention, PhaseRegime,
                    SigmaPoint, UPoint, potential, sigma_from_u, u_from_sigma)

__version__ = "0.1.0"

__all__ = ["MULTICRITICAL", "ONE_CUT", "TWO_CUT", "THREE_CUT", "BranchConvention", "PhaseRegime",
           "SigmaPoint", "UPoint", "potential", "sigma_from_u", "u_from_sigma"]

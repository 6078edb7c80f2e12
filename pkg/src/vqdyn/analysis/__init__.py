from .resources import Method, ResourceEstimate, estimate_circuits
from .spectrum import SpectrumResult, hhg_spectrum

__all__ = ["Method", "ResourceEstimate", "SpectrumResult", "estimate_circuits", "hhg_spectrum"]

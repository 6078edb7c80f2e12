from .hva import Ansatz, build_hva, hva_generators, initial_params, parameter_shift_gradient

__all__ = ["Ansatz", "build_hva", "hva_generators", "initial_params", "parameter_shift_gradient"]

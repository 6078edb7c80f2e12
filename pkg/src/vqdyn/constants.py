"""
Global constants for vqdyn.

All internal arithmetic runs in Hartree atomic units (hbar = m_e = e = 1).
"""

# Repository information
REPOSITORY_URL = "https://github.com/vqdyn/vqdyn"
DEFAULT_VERSION = "v0.1.0"  # Fallback version if unable to determine from metadata or git

# Unit conversions (CODATA)
ANGSTROM_TO_BOHR = 1.8897261254578281
AU_TIME_FS = 0.024188843265857  # 1 a.u. of time in femtoseconds
FS_TO_AU = 1.0 / AU_TIME_FS
HARTREE_TO_EV = 27.211386245988
PROTON_MASS = 1836.15267343  # in electron masses
INTENSITY_AU_W_CM2 = 3.50944758e16  # atomic unit of intensity in W/cm^2

# Grid / encoding limits
DENSE_CAP = 4096  # largest L^d that may be materialised densely
PRUNE_THRESHOLD = 1e-12  # Pauli coefficients below this magnitude are dropped

# Variational dynamics defaults
RIDGE_LAMBDA = 1e-6
IMAG_MAX_ITERATIONS = 1000
IMAG_PLATEAU_TOL = 1e-8
IMAG_PLATEAU_PATIENCE = 20
VQD_RESTARTS = 3
INIT_PARAM_SCALE = 0.01

# Subspace propagation: largest phase |H| * h allowed per rk4 substep
SUBSTEP_PHASE = 0.005
NORM_DRIFT_TOL = 1e-9
UNITARITY_TOL = 1e-12

# File names
RUN_MANIFEST = "run_manifest.json"
EIGEN_MANIFEST = "eigenset.json"

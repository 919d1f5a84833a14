"""Numerical tolerances shared by the library and the acceptance suite."""

#: Hermiticity tolerance on input operators (max entrywise asymmetry).
HERMITIAN_TOL = 1e-10
#: Stricter Hermiticity / trace checks for validated density matrices.
DENSITY_HERMITIAN_TOL = 1e-12
DENSITY_TRACE_TOL = 1e-12
#: Smallest admissible eigenvalue of a density matrix before rejection.
DENSITY_EIG_FLOOR = -1e-10
#: Jacobi stops once the off-diagonal Frobenius mass drops below this.
JACOBI_OFF_TOL = 1e-14
JACOBI_MAX_SWEEPS = 60
#: Bloch vectors may exceed the unit ball by this much (round-off).
BLOCH_NORM_SLACK = 1e-12

#: Probability entries above -PROB_NEG_TOL are clipped to zero.
PROB_NEG_TOL = 1e-12
PROB_SUM_TOL = 1e-9
#: Probabilities below this are exact zeros inside entropy sums.
ENTROPY_ZERO_CUT = 1e-15

#: Series truncation and convergence margin for curvature checks.
SERIES_TERM_TOL = 1e-14
SERIES_Z_MARGIN = 1e-6
FINITE_DIFF_STEP = 1e-4

#: Pattern search schedule.
PATTERN_STEP0 = 0.25
PATTERN_STEP_MIN = 1e-5

#: Exact-feasibility gate for CHSH protocols (L1 mismatch).
CHSH_FEASIBILITY_TOL = 1e-6
IC_DEFAULT_NMAX = 25

#: Largest channel net we are willing to enumerate.
EPSNET_MAX_MEMBERS = 10 ** 7

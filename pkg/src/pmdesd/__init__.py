"""Entanglement of polarization-entangled photon pairs under PMD.

Build the two-photon density matrix after two fibers with differential
group delays, compute purity, concurrence and the maximal CHSH value in
closed form and by independent numerics, and sweep for sudden death.
"""

from .channel import PmdRealization, TwoPhotonDensityMatrix, build_density_matrix, density_matrices
from .linalg import JonesVector, StokesVector, jones_to_stokes
from .metrics import (
    EntanglementReport,
    analytic_metrics,
    concurrence_wootters,
    esd_threshold,
    full_report,
    x_state_reduce,
)
from .source import (
    CorrelationFunction,
    FilterSpec,
    PspBases,
    SourceConfig,
    SourceDecomposition,
    gaussian_correlation,
    numeric_correlation,
    psp_decompose,
)
from .sweep import GridSpec, concurrence_surface, esd_probability_map
from .tolerances import TOL, Tolerances

__version__ = "0.1.0"

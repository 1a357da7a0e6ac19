"""Transfer-matrix band structure and two-terminal transport for 1D periodic chains."""

from .bands import (
    Band,
    BandEdge,
    BandLocation,
    NoRootError,
    WindowTooSmallError,
    band_edges,
    bands,
    dispersion,
    in_band,
)
from .linalg2 import (
    IDENTITY2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    EigenPair,
    Mat2,
    Mat2OverflowError,
    ScaledMat2,
    eig2,
    power_scaled,
)
from .negf import (
    Bath,
    ClosedBathError,
    ConductanceResult,
    SemiInfiniteLead,
    SizeCapError,
    WideBand,
    boundary_determinant,
    conductance,
    conductance_dense_oracle,
)
from .scaling import (
    DegenerateFitError,
    MuSweepRow,
    NonDecayingError,
    RegimeReport,
    TransportRegime,
    classify_transport,
    fit_exponential,
    fit_powerlaw,
    mu_sweep,
)
from .transfer import (
    SYMMETRY_UNITARY,
    InBandError,
    PeriodicPotential,
    SpectralClass,
    SpectralClassification,
    classify,
    localization_length,
    lyapunov,
    site_transfer,
    symmetry_conjugate,
    unit_cell_transfer,
)

__version__ = "0.1.0"

"""dimlab: a numerical laboratory for fractal dimension theory.

Estimates box, intermediate, Assouad-type dimensions and capacity-driven
dimension profiles of finite point clouds, and stress-tests projection and
fractional-Brownian-image dimension laws at desk scale.
"""

__version__ = "0.1.0"

from .assouad import (
    LocalCountSample,
    estimate_assouad,
    estimate_assouad_spectrum,
    estimate_quasi_assouad,
)
from .capacity import (
    EnergySolution,
    KernelParams,
    SimplexMeasure,
    capacity,
    estimate_profile,
    kernel_phi,
    kernel_phi_trunc,
    min_energy,
)
from .covering import (
    DimensionEstimate,
    ScaleGrid,
    box_count,
    cover_sum,
    estimate_box_dim,
    estimate_intermediate_dim,
)
from .errors import (
    ConfigError,
    DiagnosticsError,
    DimlabError,
    NumericError,
    ScaleError,
    SizeError,
)
from .pointset import (
    IfsSpec,
    PointCloud,
    diameter,
    embed,
    gen_ifs,
    gen_log_set,
    gen_sequence_set,
    middle_third_cantor,
    product,
    read_cloud_csv,
    single_point,
    unit_interval_grid,
    write_cloud_csv,
)
from .stochastic import (
    FbmSample,
    FbmSampler,
    SubspaceBasis,
    project,
    sample_fbm,
    sample_grassmannian,
)
from .theorems import (
    CheckVerdict,
    check_angelini,
    check_banaji,
    check_fbm,
    check_marstrand_quasi,
    check_profile_assouad_bound,
    check_profile_ratio_bound,
    check_projection_profile,
    exceptional_frequency,
)

__all__ = [name for name in dir() if not name.startswith("_")]

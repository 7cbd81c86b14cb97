"""Standard-Gaussianity regularization for latent vectors."""

from .combined import RegConfig, gaussian_reg_loss
from .errors import (
    ConfigurationError,
    DegenerateVarianceError,
    DimensionError,
    GaussRegError,
    InsufficientDataError,
    NumericalAbort,
    SingularityError,
    SpectralSingularityError,
)
from .evaluation import GaussianityReport, evaluate, spatial_ks, spectral_ks
from .kernels import BACKEND
from .latent import (
    apply_permutation,
    make_checkerboard,
    make_checkerboard_2d,
    random_permutation,
    read_latent,
    sample_standard_gaussian,
    write_latent,
)
from .optimizer import OptimizerConfig, Trajectory, optimize
from .prno import BlockView, prno_loss
from .spatial import LossEval, kl_loss, kurtosis_loss, moment_loss, norm_loss, theoretical_moment
from .spectral import SpectralBatchConfig, power_loss, power_spectrum, spectral_nll_loss

__version__ = "0.1.0"

__all__ = [
    "RegConfig",
    "gaussian_reg_loss",
    "ConfigurationError",
    "DegenerateVarianceError",
    "DimensionError",
    "GaussRegError",
    "InsufficientDataError",
    "NumericalAbort",
    "SingularityError",
    "SpectralSingularityError",
    "GaussianityReport",
    "evaluate",
    "spatial_ks",
    "spectral_ks",
    "BACKEND",
    "apply_permutation",
    "make_checkerboard",
    "make_checkerboard_2d",
    "random_permutation",
    "read_latent",
    "sample_standard_gaussian",
    "write_latent",
    "OptimizerConfig",
    "Trajectory",
    "optimize",
    "BlockView",
    "prno_loss",
    "LossEval",
    "kl_loss",
    "kurtosis_loss",
    "moment_loss",
    "norm_loss",
    "theoretical_moment",
    "SpectralBatchConfig",
    "power_loss",
    "power_spectrum",
    "spectral_nll_loss",
    "__version__",
]

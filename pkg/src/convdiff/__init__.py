"""convdiff: frequency-domain progressive blur and iterative deblurring.

A blur kernel's transfer function raised to fractional powers defines a
continuous degradation trajectory between a sharp image and its blurred
counterpart. This package implements that forward process, Wiener-based
kernel estimation, the iterative restoration loop with pluggable
restorers, quality metrics, and the file formats and CLI tying them
together.

Everything operates on float64 numpy arrays: grayscale images are
(H, W), color images channel-planar (C, H, W) with values in [0, 1],
transfer functions complex (H, W) grids at image resolution.
"""

from ._accel import BACKEND
from .degradation import (DegradationStrength, KernelValidityReport,
                          MAGNITUDE_FLOOR, degrade, fractional_power,
                          high_frequency_energy, trajectory, validate_kernel)
from .fileio import (TENSOR_MAGIC, read_image, read_kernel, read_tensor,
                     write_image, write_kernel, write_tensor)
from .metrics import MetricReport, PSNR_CAP, evaluate_pair, psnr, ssim
from .pipeline import (InferenceConfig, InferenceResult,
                       PipelineDivergenceError, StepRecord, TrainingTriple,
                       gen_training_samples, infer, mse)
from .restorers import (RestorerError, RestorerHandle, external_restorer,
                        identity_at_zero_error, identity_restorer,
                        oracle_restorer, wiener_deconv_restorer)
from .spectral import (ExtractedKernel, fft2, ifft2, kernel_to_transfer,
                       spectrum_image, transfer_to_kernel)
from .synth import (GaussianSpec, make_gaussian_kernel, make_test_image,
                    spectral_annulus_mask, untruncated_size)
from .wiener import (EXCITATION_FACTOR, WienerConfig, WienerDiagnostics,
                     estimate_from_images, luminance, renormalize_dc,
                     wiener_estimate)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DegradationStrength",
    "KernelValidityReport",
    "MAGNITUDE_FLOOR",
    "degrade",
    "fractional_power",
    "high_frequency_energy",
    "trajectory",
    "validate_kernel",
    "TENSOR_MAGIC",
    "read_image",
    "read_kernel",
    "read_tensor",
    "write_image",
    "write_kernel",
    "write_tensor",
    "MetricReport",
    "PSNR_CAP",
    "evaluate_pair",
    "psnr",
    "ssim",
    "InferenceConfig",
    "InferenceResult",
    "PipelineDivergenceError",
    "StepRecord",
    "TrainingTriple",
    "gen_training_samples",
    "infer",
    "mse",
    "RestorerError",
    "RestorerHandle",
    "external_restorer",
    "identity_at_zero_error",
    "identity_restorer",
    "oracle_restorer",
    "wiener_deconv_restorer",
    "ExtractedKernel",
    "fft2",
    "ifft2",
    "kernel_to_transfer",
    "spectrum_image",
    "transfer_to_kernel",
    "GaussianSpec",
    "make_gaussian_kernel",
    "make_test_image",
    "spectral_annulus_mask",
    "untruncated_size",
    "EXCITATION_FACTOR",
    "WienerConfig",
    "WienerDiagnostics",
    "estimate_from_images",
    "luminance",
    "renormalize_dc",
    "wiener_estimate",
    "__version__",
]

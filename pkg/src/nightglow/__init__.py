"""Physically-based light pollution simulation for night cityscapes.

The toolkit degrades clean nighttime photographs with three additive
pollution layers (skyline-induced sky glow, per-source anisotropic
scattering, isotropic atmospheric scattering), builds reproducible
paired datasets from them, and scores restorations with PSNR/SSIM.
"""

from .alsf import (
    AlsfParams,
    BeamSpec,
    DisplacementField,
    build_alsf,
    build_displacement_field,
    preset_kernel,
    warp_apsf,
)
from .apsf import ApsfParams, apsf_radial_profile, generate_apsf, kernel_size
from .convolve import fft_convolve
from .errors import (
    ImageFormatError,
    NightglowError,
    ParameterError,
    SizeMismatchError,
)
from .image import hsv_to_rgb, luminance, normalize_kernel, sample_bilinear
from .imgio import load_image, load_mask, save_image
from .lightmap import (
    ComponentMap,
    LightSourceMap,
    assign_kernel_types,
    connected_components,
    extract_lights_threshold,
    render_alsf_layer,
    render_apsf_layer,
)
from .metrics import psnr, ssim
from .skyglow import extract_skyline, place_hidden_lights, render_sky_glow
from .synth import (
    SceneAssets,
    SynthesisParams,
    SynthesisRecord,
    make_variants,
    sample_params,
    synthesize,
)

__version__ = "0.1.0"

__all__ = [
    "AlsfParams",
    "ApsfParams",
    "BeamSpec",
    "ComponentMap",
    "DisplacementField",
    "ImageFormatError",
    "LightSourceMap",
    "NightglowError",
    "ParameterError",
    "SceneAssets",
    "SizeMismatchError",
    "SynthesisParams",
    "SynthesisRecord",
    "apsf_radial_profile",
    "assign_kernel_types",
    "build_alsf",
    "build_displacement_field",
    "connected_components",
    "extract_lights_threshold",
    "extract_skyline",
    "fft_convolve",
    "generate_apsf",
    "hsv_to_rgb",
    "kernel_size",
    "load_image",
    "load_mask",
    "luminance",
    "make_variants",
    "normalize_kernel",
    "place_hidden_lights",
    "preset_kernel",
    "psnr",
    "render_alsf_layer",
    "render_apsf_layer",
    "render_sky_glow",
    "sample_bilinear",
    "sample_params",
    "save_image",
    "ssim",
    "synthesize",
    "warp_apsf",
]

"""Glottal source estimation by zeros of the chirp Z-transform.

A pitch-synchronous speech frame is factored into its Z-transform roots; the
roots outside a circle of radius R form the anticausal (glottal open phase)
component and those inside form the causal (vocal tract and return phase)
component. R can be fixed at 1, placed from the true GCI position, or found
from a gap in the sorted root moduli.
"""

from .decomp import Decomposition, chirp_ztransform, completeness_error, decompose
from .errors import (
    ChirpGlottalError,
    DegenerateInput,
    FormatError,
    InvalidArgument,
    NumericalFailure,
    OutOfRange,
)
from .lf import LFParams, lf_pulse
from .metrics import (
    MetricsReport,
    determination_rate,
    glottal_formant_frequency,
    reference_Fg,
    spectral_distortion,
)
from .polyroots import RootSet, find_roots, verify_roots
from .radius import ChirpContour, auto_radius, ideal_radius, selection_bounds, unit_radius
from .signal import Frame, GCITrack, SampleBuffer, blackman_window, extract_frame
from .synth import TestCondition, synthesize, vowel_filter

__version__ = "0.1.0"

__all__ = [
    "ChirpContour", "ChirpGlottalError", "Decomposition", "DegenerateInput", "FormatError",
    "Frame", "GCITrack", "InvalidArgument", "LFParams", "MetricsReport", "NumericalFailure",
    "OutOfRange", "RootSet", "SampleBuffer", "TestCondition", "auto_radius", "blackman_window",
    "chirp_ztransform", "completeness_error", "decompose", "determination_rate", "extract_frame", "find_roots",
    "glottal_formant_frequency", "ideal_radius", "lf_pulse", "reference_Fg", "selection_bounds",
    "spectral_distortion", "synthesize", "unit_radius", "verify_roots", "vowel_filter",
]

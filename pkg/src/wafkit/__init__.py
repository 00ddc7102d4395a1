"""Wideband ambiguity functions, affine-group operators, wavelet frames,
and difference-set pulse-train design."""

from .affine import (
    AffineElement,
    AffineError,
    DEFAULT_INTERPOLATOR,
    Interpolator,
    compose,
    dilate,
    dilate_translate,
    evaluate_at,
    inverse,
    resample_to,
    translate,
)
from .ambiguity import (
    AmbiguityError,
    AmbiguitySurface,
    DopplerAxis,
    cross_af,
    naf,
    narrowband_approx_error,
    narrowband_phase_form,
    waf,
    waf_coded_decomposition,
    waf_point,
)
from .design import (
    DesignedSequences,
    DesignError,
    MainlobeExtent,
    SidelobeReport,
    all_ones_sequences,
    assign,
    default_mainlobe,
    design_bound,
    score,
)
from .diffset import (
    DifferenceSet,
    DiffSetError,
    SingerParams,
    singer_construct,
    verify,
    welch_bound,
)
from .frame import (
    CoefficientTable,
    FrameBounds,
    FrameGrid,
    WaveletFrame,
    analyze,
    atom,
    certify_frame_inequality,
    dual_frame,
    frame_bounds,
    reconstruct,
    reconstruction_error,
    true_dual,
)
from .galois import (
    ExtField,
    ExtFieldElement,
    FieldError,
    PrimeField,
    ext_field_build,
    find_primitive,
    mul,
    trace_to_base,
)
from .signals import (
    ChipPulse,
    PhaseCode,
    PulseTrainSpec,
    SampledSignal,
    SignalError,
    gaussian_pulse,
    golay_companion,
    modulate,
    morlet_pulse,
    signal_from_csv,
    signal_to_csv,
    synth_chip,
    synth_coded,
    synth_train,
)

__version__ = "0.1.0"

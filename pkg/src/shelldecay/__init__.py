"""Decay of a particle confined by a repulsive delta-shell potential.

Two independent formulations of ``Psi(r, t)``:

* :func:`psi_continuum` integrates over the continuum wave functions
  (Hermitian picture);
* :func:`psi_resonant` sums Moshinsky-propagated Gamow states over the
  resonance poles (non-Hermitian picture), with :func:`psi_longtime` as its
  exponential-plus-``t**(-3/2)`` asymptotic form.

Hot kernels are compiled with numba when available; set
``SHELLDECAY_DISABLE_NUMBA=1`` (or use :func:`use_backend`) for pure numpy.
"""

from __future__ import annotations

from ._jit import backend, use_backend
from .errors import (
    ConfigError,
    ConvergenceDomain,
    DecayError,
    DegeneratePair,
    DomainError,
    MissingPole,
    NearDegenerate,
    NoConvergence,
    OverflowUnrepresentable,
    QuadrantEscape,
    SymmetryViolation,
    ToleranceNotMet,
)
from .hermitian import QuadratureSpec, closure_defect, continuum_norm, psi_continuum
from .model import (
    PotentialSpec,
    box_overlap,
    continuum_wavefunction,
    initial_state_value,
    jost_entire,
    jost_minus,
    jost_normalized,
    overlap_continuum,
    s_matrix,
)
from .nonhermitian import (
    LongTimeSample,
    WaveSample,
    psi_longtime,
    psi_resonant,
    psi_resonant_batch,
    survival_density_series,
)
from .poles import ResonancePole, find_poles, mirror, refine, seed, winding_count
from .resonant import (
    ResonantMode,
    build_mode,
    build_modes,
    check_normalization,
    check_orthogonality,
    gamma_from_flux,
    mirror_mode,
    mode_value,
    smoothed_closure_defect,
    sum_rule_partial,
)
from .special import faddeyeva, faddeyeva_array, moshinsky_external, moshinsky_internal

__version__ = "0.1.0"

__all__ = [
    "backend",
    "use_backend",
    "ConfigError",
    "ConvergenceDomain",
    "DecayError",
    "DegeneratePair",
    "DomainError",
    "MissingPole",
    "NearDegenerate",
    "NoConvergence",
    "OverflowUnrepresentable",
    "QuadrantEscape",
    "SymmetryViolation",
    "ToleranceNotMet",
    "QuadratureSpec",
    "closure_defect",
    "continuum_norm",
    "psi_continuum",
    "PotentialSpec",
    "box_overlap",
    "continuum_wavefunction",
    "initial_state_value",
    "jost_entire",
    "jost_minus",
    "jost_normalized",
    "overlap_continuum",
    "s_matrix",
    "LongTimeSample",
    "WaveSample",
    "psi_longtime",
    "psi_resonant",
    "psi_resonant_batch",
    "survival_density_series",
    "ResonancePole",
    "find_poles",
    "mirror",
    "refine",
    "seed",
    "winding_count",
    "ResonantMode",
    "build_mode",
    "build_modes",
    "check_normalization",
    "check_orthogonality",
    "gamma_from_flux",
    "mirror_mode",
    "mode_value",
    "smoothed_closure_defect",
    "sum_rule_partial",
    "faddeyeva",
    "faddeyeva_array",
    "moshinsky_external",
    "moshinsky_internal",
    "__version__",
]

"""Spectra, metrics and exceptional points of PT-symmetric tight-binding chains."""

from .errors import AmbiguousClusterError, ConvergenceError, SpecError
from .lattice import (DefectConfig, HamiltonianSpec, ParityOperator, build_dense,
                      check_pt_symmetry, dump_spec, is_centrohermitian, load_spec,
                      spec_from_dict, spec_to_dict, transpose_symmetrize)
from .spectra import (PTPhase, SpectrumReport, closed_form_spectrum, eigensystem,
                      multiset_distance, spectrum)

__version__ = "0.1.0"

__all__ = [
    "AmbiguousClusterError", "ConvergenceError", "DefectConfig", "HamiltonianSpec",
    "PTPhase", "ParityOperator", "SpecError", "SpectrumReport", "build_dense",
    "check_pt_symmetry", "closed_form_spectrum", "dump_spec", "eigensystem",
    "is_centrohermitian", "load_spec", "multiset_distance", "spec_from_dict", "spec_to_dict",
    "spectrum", "transpose_symmetrize",
]

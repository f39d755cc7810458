"""Explicit genus-3 AGM step on plane quartics with a two-torsion class."""

from .agm_step import StepOutput, agm_step, roundtrip_check
from .configuration import PlaneConfiguration, build_space_model, extract_configuration
from .errors import (AmbiguousRank, CommonComponent, CountMismatch, G3Error, NonConvergence,
                     NonGeneric, NumericFailure)
from .forms import HomogeneousForm
from .numkernel import RankCertificate, ToleranceProfile
from .quartic_theta import FlagSpec, Quartic, alpha_class, bitangents, classify_pairs

__all__ = [
    "AmbiguousRank", "CommonComponent", "CountMismatch", "FlagSpec", "G3Error", "HomogeneousForm",
    "NonConvergence", "NonGeneric", "NumericFailure", "PlaneConfiguration", "Quartic",
    "RankCertificate", "StepOutput", "ToleranceProfile", "agm_step", "alpha_class", "bitangents",
    "build_space_model", "classify_pairs", "extract_configuration", "roundtrip_check",
]

"""Linear monads on cyclic varieties: Chern data, derived cohomology
vanishing, stability verdicts and an explicit-matrix numeric lab."""

from .chern import ChernSeries, KClass, chern_of_monad, chi_of_kclass, chi_tensor_display_chain, kclass_of_monad, slope
from .monads import MonadExtension, MonadSpec, Twisted, dualize, linear, validate
from .stability import StabilityVerdict, verdict
from .varieties import VarietyDescriptor, parse_variety_token, projective_space, quadric

__version__ = "0.1.0"

__all__ = [
    "ChernSeries", "KClass", "MonadExtension", "MonadSpec", "StabilityVerdict", "Twisted",
    "VarietyDescriptor", "chern_of_monad", "chi_of_kclass", "chi_tensor_display_chain", "dualize",
    "kclass_of_monad", "linear", "parse_variety_token", "projective_space", "quadric", "slope",
    "validate", "verdict",
]

"""Zero-divisor graphs of the Lipschitz quaternions modulo n."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    BudgetExceededError,
    ModulusMismatchError,
    NoClosedFormError,
    NotAUnitError,
    RingTooLargeError,
    ZdquatError,
)
from .lipschitz import LipschitzQuat
from .ring_core import Residue, RingSpec, factorize

__all__ = [
    "BudgetExceededError",
    "LipschitzQuat",
    "ModulusMismatchError",
    "NoClosedFormError",
    "NotAUnitError",
    "Residue",
    "RingSpec",
    "RingTooLargeError",
    "ZdquatError",
    "__version__",
    "factorize",
]

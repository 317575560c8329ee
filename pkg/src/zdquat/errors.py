"""Exception types shared across the package."""

from __future__ import annotations


class ZdquatError(Exception):
    """Base class for all errors raised by this package."""


class ModulusMismatchError(ZdquatError, TypeError):
    """Two operands live in rings with different moduli."""

    def __init__(self, left: int, right: int) -> None:
        super().__init__(f"modulus mismatch: {left} vs {right}")
        self.left = left
        self.right = right


class NotAUnitError(ZdquatError, ArithmeticError):
    def __init__(self, value: object, modulus: int, gcd: int) -> None:
        super().__init__(f"{value} is not a unit mod {modulus} (gcd = {gcd})")
        self.value = value
        self.modulus = modulus
        self.gcd = gcd


class BudgetExceededError(ZdquatError):
    """A scan or search would exceed its configured budget."""

    def __init__(self, what: str, needed: int, budget: int, hint: str = "") -> None:
        msg = f"{what}: needs {needed}, budget is {budget}"
        if hint:
            msg += f" ({hint})"
        super().__init__(msg)
        self.needed = needed
        self.budget = budget


class RingTooLargeError(BudgetExceededError):
    def __init__(self, n: int, needed: int, budget: int) -> None:
        super().__init__(f"ring too large (n={n})", needed, budget)


class NoClosedFormError(ZdquatError, ValueError):
    """No closed-form dominating set construction covers this modulus."""

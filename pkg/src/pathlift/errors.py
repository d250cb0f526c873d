"""Shared exception types.

Input/validation problems raise plain ValueError throughout the library.
Mathematical preconditions that can fail at runtime on otherwise
well-formed input get their own hierarchy so callers (and the CLI exit
codes) can tell the two apart.
"""


class MathPreconditionError(RuntimeError):
    """A mathematical precondition failed on valid input."""


class ParabolicityError(MathPreconditionError):
    """2a - sigma sigma^T has a negative eigenvalue beyond tolerance."""

    def __init__(self, t, x, min_eigenvalue):
        self.t = t
        self.x = x
        self.min_eigenvalue = min_eigenvalue
        super().__init__(
            f"parabolicity violated at t={t!r}, x={x!r}: "
            f"min eigenvalue of 2a - sigma sigma^T is {min_eigenvalue:.3e}"
        )

"""Exception hierarchy shared by every module in the package.

All failures raised on purpose derive from :class:`OrthoscherkError`, so
callers can distinguish "the configuration you gave me is bad" from a
genuine bug.  Validation problems carry enough state (residual vectors,
offending values) to make postmortems possible without rerunning.
"""

from __future__ import annotations

import numpy as np


class OrthoscherkError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(OrthoscherkError):
    """Input data violates a documented precondition."""


class SingularPathError(OrthoscherkError):
    """An integration path passes through (or too close to) a singularity."""


class DivergenceError(OrthoscherkError):
    """A requested integral does not converge (endpoint exponent <= -2)."""


class GeometryError(OrthoscherkError):
    """A geometric construction is infeasible for the given configuration."""


class DegenerateQuadrilateralError(OrthoscherkError):
    """Extremal length of a quadrilateral with coincident or adjacent sides."""


class EdgeDegenerationError(OrthoscherkError):
    """An edge required by a conformal invariant has zero length."""


class BoundaryStratumError(ValidationError):
    """Staircase parameters lie on the boundary of moduli space (b <= c)."""


class FitError(OrthoscherkError):
    """Prevertex fitting did not reach the requested tolerance.

    The ``residual`` attribute holds the last residual vector so the
    caller can judge how close the iteration got.
    """

    def __init__(self, message: str, residual: np.ndarray | None = None):
        super().__init__(message)
        self.residual = residual


class SolverError(OrthoscherkError):
    """Height minimization failed; ``report`` holds the best state seen."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class ContractError(OrthoscherkError):
    """An internal consistency contract between modules was violated."""


class PeriodClosureError(OrthoscherkError):
    """Developed mesh loops fail to close within tolerance."""


class AssemblyError(OrthoscherkError):
    """Symmetry copies of the fundamental patch do not meet along seams."""


class TopologyError(OrthoscherkError):
    """Mesh connectivity is not the expected manifold-with-boundary."""


class NotSupportedError(OrthoscherkError):
    """The requested computation is outside the implemented symmetry class."""

"""Exception types shared across the package.

Two families matter for exit-code mapping in the CLI:

* ``ValueError`` subclasses: invalid inputs, geometry, or configuration.
  The driver maps these to exit code 2.
* ``ArithmeticError`` subclasses: numerical failures discovered at run
  time (singular systems, eigensolver breakdown). Exit code 3.
"""


class DomainError(ValueError):
    """Argument outside the mathematical domain of a special function."""


class CoincidentPoints(ValueError):
    """Source and field point closer than the coincidence tolerance."""


class CellTooLarge(ValueError):
    """Quadrature cell too large for the closed-form self integral."""


class EmptyGrid(ValueError):
    """Rasterization kept no cells (shape smaller than one cell)."""


class PointInsideDefectError(ValueError):
    """Field evaluation requested inside the rasterized defect."""


class DegenerateSquare(ValueError):
    """Test square with non-positive half width."""


class DimensionMismatch(ValueError):
    """Operands whose shapes do not compose."""


class NotHermitian(ValueError):
    """Matrix fails the entrywise Hermitian tolerance."""


class ConfigError(ValueError):
    """Invalid or inconsistent reconstruction configuration."""


class MetadataMismatch(ConfigError):
    """Near-field file metadata disagrees with the configuration."""


class SingularMatrix(ArithmeticError):
    """LU pivot below the relative tolerance; system not solvable."""


class SingularSystem(SingularMatrix):
    """Discretized scattering system is singular (resonant grid)."""


class NoConvergence(ArithmeticError):
    """Eigensolver failed to converge or its self-check failed."""

"""Monotonicity tests: compare near-field data against probe operators.

Mathematical formulation
------------------------
For a test square B in the upper half-plane, the probe operator is the
Gram matrix of the (conjugated) Green's function between B and the
measurement points,

    P[l, p] = w sum_c w_c G(y_c, x_l) conj(G(y_c, x_p)),

with y_c the midpoints of a uniform subcell grid over B and w the
measurement quadrature weight. P is Hermitian positive semidefinite by
construction.

The tests count eigenvalues below a small negative threshold:

    inside test   count of eig(Re N - alpha P) below -tau
    outside test  count of eig(alpha P - Re N) below -tau

where Re N = (N + N^H)/2 and tau = max(tol_abs, tol_rel * max |eig|).
A low inside count signals that B sits inside the defect support; a low
outside count signals that B covers it. For negative contrasts the same
tests apply to -N (see :func:`sign_flipped`).
"""

import logging
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DegenerateSquare, DimensionMismatch
from .greens import WaveConfig, green_halfplane
from .forward import MeasurementLine

logger = logging.getLogger(__name__)

# Eigenvalue sign threshold tau = max(DEFAULT_TOL_ABS, DEFAULT_TOL_REL * spectral radius).
DEFAULT_TOL_ABS: float = 1e-12
DEFAULT_TOL_REL: float = 1e-10
# Subcell midpoints per side when integrating the probe over a square.
DEFAULT_QUAD_POINTS: int = 3


@dataclass(frozen=True)
class ProbeSquare:
    """Axis-aligned probe square with its quadrature resolution.

    Attributes
    ----------
    center : tuple
        Square center (x1, x2), strictly inside the upper half-plane.
    half_width : float
        Half the side length, positive.
    quad_points_per_side : int
        Midpoint subcells per side for the probe integral.
    """

    center: tuple
    half_width: float
    quad_points_per_side: int = DEFAULT_QUAD_POINTS

    def __post_init__(self) -> None:
        if not np.isfinite(self.half_width) or self.half_width <= 0:
            raise DegenerateSquare(f"half_width must be positive, got {self.half_width}")
        if self.center[1] - self.half_width <= 0:
            raise ValueError(
                f"square centered at {self.center} with half width "
                f"{self.half_width} leaves the open upper half-plane"
            )
        if self.quad_points_per_side < 1:
            raise ValueError(
                f"need at least one quadrature point per side, got {self.quad_points_per_side}"
            )

    def quadrature_points(self) -> tuple:
        """Subcell midpoints (n_q^2, 2) and the common subcell area."""
        nq = self.quad_points_per_side
        h = 2.0 * self.half_width / nq
        idx = np.arange(nq) + 0.5
        cx, cy = np.meshgrid(
            self.center[0] - self.half_width + idx * h,
            self.center[1] - self.half_width + idx * h,
            indexing="ij",
        )
        return np.column_stack([cx.ravel(), cy.ravel()]), h * h


@dataclass(frozen=True)
class ProbeMatrix:
    """Hermitian PSD probe operator discretized on the measurement points."""

    entries: np.ndarray

    def validate(self) -> None:
        d0, d1 = self.entries.shape
        if d0 != d1:
            raise ValueError(f"probe matrix must be square, got {self.entries.shape}")
        if not np.all(np.isfinite(self.entries)):
            raise ValueError("non-finite probe entries")


@dataclass(frozen=True)
class MonotonicityVerdict:
    """Outcome of one eigenvalue-counting test.

    Attributes
    ----------
    negative_count : int
        Eigenvalues below -tau.
    eigenvalues : np.ndarray
        Full real spectrum, ascending.
    direction : str
        "inside" or "outside".
    alpha : float
        Contrast bound used in the comparison.
    """

    negative_count: int
    eigenvalues: np.ndarray
    direction: str
    alpha: float


def assemble_probe(cfg: WaveConfig, line: MeasurementLine, square: ProbeSquare) -> ProbeMatrix:
    """Probe operator of a test square on the measurement line.

    Parameters
    ----------
    cfg : WaveConfig
    line : MeasurementLine
    square : ProbeSquare
        Must lie strictly below the measurement line.

    Returns
    -------
    ProbeMatrix
        Exactly Hermitian (the Gram product is symmetrized to remove
        accumulation-order roundoff).
    """
    if square.center[1] + square.half_width >= line.height_m:
        raise ValueError(
            f"square centered at {square.center} reaches the measurement line"
        )
    pts, subcell_area = square.quadrature_points()
    meas = line.points()
    h_mat = np.conj(green_halfplane(cfg, pts[:, None, :], meas[None, :, :]))  # (nq^2, d)
    entries = line.weight * subcell_area * (h_mat.conj().T @ h_mat)
    probe = ProbeMatrix(entries=linalg.hermitian_part(entries))
    probe.validate()
    return probe


def _as_matrix(obj, name: str) -> np.ndarray:
    mat = np.asarray(getattr(obj, "entries", obj), dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionMismatch(f"{name} must be a square matrix, got shape {mat.shape}")
    return mat


def _count_negative(
    herm: np.ndarray, direction: str, alpha: float, tol_abs: float, tol_rel: float
) -> MonotonicityVerdict:
    eig = linalg.hermitian_eigenvalues(herm)
    tau = max(tol_abs, tol_rel * float(np.abs(eig).max(initial=0.0)))
    count = int(np.sum(eig < -tau))
    return MonotonicityVerdict(
        negative_count=count, eigenvalues=eig, direction=direction, alpha=alpha
    )


def _validate_pair(n, probe, alpha: float) -> tuple:
    if not np.isfinite(alpha) or alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    n_mat = _as_matrix(n, "near-field data")
    p_mat = _as_matrix(probe, "probe")
    if n_mat.shape != p_mat.shape:
        raise DimensionMismatch(
            f"near-field shape {n_mat.shape} != probe shape {p_mat.shape}"
        )
    return linalg.hermitian_part(n_mat), p_mat


def inside_test(
    n,
    probe,
    alpha: float,
    tol_abs: float = DEFAULT_TOL_ABS,
    tol_rel: float = DEFAULT_TOL_REL,
) -> MonotonicityVerdict:
    """Count eigenvalues of Re N - alpha P below -tau.

    Parameters
    ----------
    n : NearFieldMatrix or array_like
        Measured data (any object with square complex ``entries``).
    probe : ProbeMatrix or array_like
    alpha : float
        Positive lower bound on the contrast over its support.
    tol_abs, tol_rel : float
        Threshold tau = max(tol_abs, tol_rel * spectral radius).

    Returns
    -------
    MonotonicityVerdict
        Low ``negative_count`` indicates the square sits inside the defect.
    """
    re_n, p_mat = _validate_pair(n, probe, alpha)
    return _count_negative(re_n - alpha * p_mat, "inside", alpha, tol_abs, tol_rel)


def outside_test(
    n,
    probe,
    alpha: float,
    tol_abs: float = DEFAULT_TOL_ABS,
    tol_rel: float = DEFAULT_TOL_REL,
) -> MonotonicityVerdict:
    """Count eigenvalues of alpha P - Re N below -tau.

    Parameters mirror :func:`inside_test`; here ``alpha`` bounds the
    contrast from above and a low count indicates the square covers the
    defect support.
    """
    re_n, p_mat = _validate_pair(n, probe, alpha)
    return _count_negative(alpha * p_mat - re_n, "outside", alpha, tol_abs, tol_rel)


def sign_flipped(test):
    """Wrap an inside/outside test so it sees -N instead of N.

    For a negative contrast the monotonicity relations hold with the
    data sign reversed; the wrapped test is otherwise unchanged. Wrapping
    twice restores the original test.
    """

    def flipped(n, probe, alpha, **kwargs):
        n_mat = np.asarray(getattr(n, "entries", n), dtype=complex)
        return test(-n_mat, probe, alpha, **kwargs)

    flipped.__name__ = f"sign_flipped_{getattr(test, '__name__', 'test')}"
    return flipped

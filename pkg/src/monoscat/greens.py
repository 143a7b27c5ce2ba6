"""Green's functions for the Helmholtz operator in the upper half-plane.

Mathematical formulation
------------------------
    Phi(x, y) = (i/4) H_0^(1)(k |x - y|)            free-space kernel
    G(x, y)   = Phi(x, y) - Phi(x, y*)              sound-soft half-plane
    y*        = (y1, -y2)                           mirror image source

G vanishes on the boundary x2 = 0 (the two distances coincide there) and
is symmetric in its arguments. The self-cell integral replaces a small
quadrature cell by the disk of equal area centered at the singularity:

    int_disk Phi(x, y) dy = (i pi rho / (2k)) H_1^(1)(k rho) - 1/k^2

with rho the disk radius; the identity follows from
d/dr[r H_1^(1)(kr)] = k r H_0^(1)(kr) and r H_1^(1)(kr) -> -2i/(pi k).
"""

from dataclasses import dataclass

import numpy as np

from .errors import CellTooLarge, CoincidentPoints
from .specfun import hankel1_0, hankel1_1

# Two points closer than this (length units) count as coincident.
COINCIDENCE_TOL: float = 1e-14


@dataclass(frozen=True)
class WaveConfig:
    """Wavenumber and (constant) refractive index of the background.

    Attributes
    ----------
    k : float
        Wavenumber, > 0.
    n_const : float
        Background index. Only the homogeneous case 1.0 is supported;
        the field is kept explicit so configs serialize completely.
    """

    k: float
    n_const: float = 1.0

    def __post_init__(self) -> None:
        if not np.isfinite(self.k) or self.k <= 0:
            raise ValueError(f"wavenumber must be positive, got {self.k}")
        if self.n_const != 1.0:
            raise ValueError(
                f"only constant refractive index 1.0 is supported, got {self.n_const}"
            )


def _distances(x, y) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.hypot(x[..., 0] - y[..., 0], x[..., 1] - y[..., 1])


def fundamental_solution(cfg: WaveConfig, x, y):
    """Free-space kernel (i/4) H_0^(1)(k |x - y|).

    Parameters
    ----------
    cfg : WaveConfig
    x, y : array_like, shape (..., 2)
        Field and source points; leading dimensions broadcast.

    Returns
    -------
    complex or np.ndarray
        Complex kernel values over the broadcast shape.

    Raises
    ------
    CoincidentPoints
        If any pair is closer than the coincidence tolerance.
    """
    r = _distances(x, y)
    if np.any(r < COINCIDENCE_TOL):
        raise CoincidentPoints(f"minimum separation {np.min(r):.3e} below tolerance")
    return 0.25j * hankel1_0(cfg.k * r)


def green_halfplane(cfg: WaveConfig, x, y):
    """Sound-soft half-plane Green's function Phi(x, y) - Phi(x, y*).

    Parameters
    ----------
    cfg : WaveConfig
    x : array_like, shape (..., 2)
        Field points with x2 >= 0 (boundary allowed).
    y : array_like, shape (..., 2)
        Source points strictly inside the half-plane (y2 > 0).

    Returns
    -------
    complex or np.ndarray
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(y[..., 1] <= 0.0):
        raise ValueError("source points must satisfy x2 > 0")
    y_img = y.copy()
    y_img[..., 1] = -y_img[..., 1]
    r_direct = _distances(x, y)
    if np.any(r_direct < COINCIDENCE_TOL):
        raise CoincidentPoints(
            f"minimum separation {np.min(r_direct):.3e} below tolerance"
        )
    r_image = _distances(x, y_img)
    return 0.25j * (hankel1_0(cfg.k * r_direct) - hankel1_0(cfg.k * r_image))


def self_cell_integral(cfg: WaveConfig, cell_area: float) -> complex:
    """Integral of the free-space kernel over its own quadrature cell.

    The square cell is replaced by the disk of equal area centered at the
    singularity, where the integral has the closed form

        (i pi rho / (2k)) H_1^(1)(k rho) - 1/k^2,   rho = sqrt(area/pi).

    Parameters
    ----------
    cfg : WaveConfig
    cell_area : float
        Cell area, > 0. The closed form is used only well inside the
        first oscillation: k * rho must stay below 1.

    Returns
    -------
    complex

    Raises
    ------
    CellTooLarge
        If k * rho >= 1.
    """
    if not np.isfinite(cell_area) or cell_area <= 0:
        raise ValueError(f"cell_area must be positive, got {cell_area}")
    rho = float(np.sqrt(cell_area / np.pi))
    if cfg.k * rho >= 1.0:
        raise CellTooLarge(
            f"k * rho = {cfg.k * rho:.3f} >= 1; refine the grid (rho = {rho:.3e})"
        )
    return (1j * np.pi * rho / (2.0 * cfg.k)) * hankel1_1(cfg.k * rho) - 1.0 / cfg.k**2

"""Forward scattering: rasterize the defect, solve the volume integral
equation, assemble the near-field matrix.

Mathematical formulation
------------------------
The defect is a contrast q supported on a bounded set Q in the upper
half-plane. For a point source at z above Q, the incident field is the
conjugated half-plane Green's function

    u_inc(x, z) = conj(G(x, z))

and the scattered field solves the volume integral equation

    u_s(x, z) = k^2 int_Q q(y) u_s(y, z) G(x, y) dy
              + k^2 int_Q q(y) conj(G(y, z)) G(x, y) dy.

Midpoint (Nystrom) discretization on cells y_c with areas w_c turns this
into (I - A) u = A u_inc with

    A[c, c'] = k^2 q_c' w_c' G(y_c, y_c'),        c != c'
    A[c, c ] = k^2 q_c (S(w_c) - w_c Phi(y_c, y_c*)),

where S is the closed-form self-cell integral of the free-space kernel
and the smooth image term is integrated by the midpoint rule.

The near-field matrix samples u_s between all pairs of points on the
measurement line x_l = (a + (b-a) l / d, m), l = 1..d:

    N[l, p] = w_M u_s(x_l, x_p),   w_M = (b - a) / d.

All d sources share one LU factorization of (I - A).
"""

import logging
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    EmptyGrid,
    PointInsideDefectError,
    SingularMatrix,
    SingularSystem,
)
from .greens import WaveConfig, green_halfplane, self_cell_integral
from .specfun import hankel1_0

logger = logging.getLogger(__name__)

# Cells per side of the bounding box when rasterizing for a forward solve.
DEFAULT_CELLS_PER_SIDE: int = 32
# Finer default used when synthesizing data that an inversion will consume,
# so inversion-side assumptions never coincide with the synthesis grid.
SYNTHESIS_CELLS_PER_SIDE: int = 48


# ---------------------------------------------------------------------------
# Defect geometry
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Circle:
    """Disk (x - c)^2 < radius^2."""

    center: tuple
    radius: float

    def __post_init__(self) -> None:
        if self.radius <= 0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    def contains(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        dx = pts[..., 0] - self.center[0]
        dy = pts[..., 1] - self.center[1]
        return dx * dx + dy * dy < self.radius**2

    def bounding_box(self) -> tuple:
        cx, cy = self.center
        r = self.radius
        return (cx - r, cy - r, cx + r, cy + r)


@dataclass(frozen=True)
class Ellipse:
    """Axis-aligned ellipse ((x1-c1)/ax)^2 + ((x2-c2)/ay)^2 < 1."""

    center: tuple
    semi_axes: tuple

    def __post_init__(self) -> None:
        ax, ay = self.semi_axes
        if ax <= 0 or ay <= 0:
            raise ValueError(f"semi-axes must be positive, got {self.semi_axes}")

    def contains(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        ax, ay = self.semi_axes
        dx = (pts[..., 0] - self.center[0]) / ax
        dy = (pts[..., 1] - self.center[1]) / ay
        return dx * dx + dy * dy < 1.0

    def bounding_box(self) -> tuple:
        cx, cy = self.center
        ax, ay = self.semi_axes
        return (cx - ax, cy - ay, cx + ax, cy + ay)


@dataclass(frozen=True)
class ContrastSpec:
    """Defect support (one shape or a union) with a constant amplitude.

    Attributes
    ----------
    shapes : tuple of Circle | Ellipse
        Union of supports; must lie in the open upper half-plane.
    amplitude : float
        Contrast value q on the union, nonzero. A single amplitude keeps
        the sign constant over the union by construction.
    """

    shapes: tuple
    amplitude: float

    def __post_init__(self) -> None:
        if not self.shapes:
            raise ValueError("contrast needs at least one shape")
        if self.amplitude == 0:
            raise ValueError("contrast amplitude must be nonzero")
        for shape in self.shapes:
            if shape.bounding_box()[1] <= 0.0:
                raise ValueError(f"shape {shape} leaves the open upper half-plane")

    def contains(self, pts: np.ndarray) -> np.ndarray:
        mask = self.shapes[0].contains(pts)
        for shape in self.shapes[1:]:
            mask = mask | shape.contains(pts)
        return mask

    def bounding_box(self) -> tuple:
        boxes = [s.bounding_box() for s in self.shapes]
        return (
            min(b[0] for b in boxes),
            min(b[1] for b in boxes),
            max(b[2] for b in boxes),
            max(b[3] for b in boxes),
        )


@dataclass(frozen=True)
class ContrastGrid:
    """Rasterized defect: kept cell centers, areas, and contrast values.

    Attributes
    ----------
    cell_centers : np.ndarray, shape (n, 2)
    cell_weights : np.ndarray, shape (n,)
        Cell areas, all positive.
    q_values : np.ndarray, shape (n,)
        Contrast at each kept cell, all nonzero.
    cells_per_side : int
        Rasterization resolution of the bounding box.
    half_sizes : tuple
        Half extents (hx/2, hy/2) of one cell.
    """

    cell_centers: np.ndarray
    cell_weights: np.ndarray
    q_values: np.ndarray
    cells_per_side: int
    half_sizes: tuple

    @property
    def n_cells(self) -> int:
        return len(self.cell_weights)

    def validate(self) -> None:
        n = self.n_cells
        if self.cell_centers.shape != (n, 2):
            raise ValueError(f"cell_centers shape {self.cell_centers.shape} != ({n}, 2)")
        if self.q_values.shape != (n,):
            raise ValueError(f"q_values shape {self.q_values.shape} != ({n},)")
        if np.any(self.cell_weights <= 0):
            raise ValueError("non-positive cell weights")
        if np.any(self.q_values == 0):
            raise ValueError("zero contrast on a kept cell")
        if len(self.half_sizes) != 2 or min(self.half_sizes) <= 0:
            raise ValueError(f"bad cell half sizes {self.half_sizes}")


# ---------------------------------------------------------------------------
# Measurement geometry
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class MeasurementLine:
    """Sampled segment {(x1, m) : a < x1 <= b} with d equispaced points.

    Sample l (1-based) sits at x_l = (a + (b - a) l / d, m); the
    quadrature weight is w = (b - a) / d.
    """

    a: float
    b: float
    height_m: float
    d: int

    def __post_init__(self) -> None:
        if not self.a < self.b:
            raise ValueError(f"need a < b, got a={self.a}, b={self.b}")
        if self.height_m <= 0:
            raise ValueError(f"line height must be positive, got {self.height_m}")
        if self.d < 1:
            raise ValueError(f"need at least one sample, got d={self.d}")

    @property
    def weight(self) -> float:
        """Quadrature weight w = (b - a) / d."""
        return (self.b - self.a) / self.d

    def points(self) -> np.ndarray:
        """Sample coordinates, shape (d, 2)."""
        ell = np.arange(1, self.d + 1)
        x1 = self.a + (self.b - self.a) * ell / self.d
        return np.column_stack([x1, np.full(self.d, self.height_m)])


@dataclass(frozen=True)
class NearFieldMatrix:
    """Discrete near-field data N[l, p] = w u_s(x_l, x_p).

    Attributes
    ----------
    entries : np.ndarray, shape (d, d)
        Complex samples, rows = receivers, columns = sources.
    wave : WaveConfig
    line : MeasurementLine
    """

    entries: np.ndarray
    wave: WaveConfig
    line: MeasurementLine

    def validate(self) -> None:
        d = self.line.d
        if self.entries.shape != (d, d):
            raise ValueError(f"entries shape {self.entries.shape} != ({d}, {d})")
        if not np.all(np.isfinite(self.entries)):
            raise ValueError("non-finite near-field entries")


# ---------------------------------------------------------------------------
# Rasterization
# ---------------------------------------------------------------------------
def rasterize(contrast: ContrastSpec, cells_per_side: int = DEFAULT_CELLS_PER_SIDE) -> ContrastGrid:
    """Rasterize a contrast onto a uniform grid over its bounding box.

    Cells whose center lies inside the union are kept with weight equal
    to the cell area and contrast equal to the amplitude; all others are
    dropped (no partial-cell weighting; accuracy comes from refinement).

    Parameters
    ----------
    contrast : ContrastSpec
    cells_per_side : int
        Grid resolution per bounding-box side, >= 4.

    Returns
    -------
    ContrastGrid

    Raises
    ------
    EmptyGrid
        If no cell center falls inside the union.
    """
    if cells_per_side < 4:
        raise ValueError(f"cells_per_side must be >= 4, got {cells_per_side}")
    x_lo, y_lo, x_hi, y_hi = contrast.bounding_box()
    hx = (x_hi - x_lo) / cells_per_side
    hy = (y_hi - y_lo) / cells_per_side
    idx = np.arange(cells_per_side) + 0.5
    cx, cy = np.meshgrid(x_lo + idx * hx, y_lo + idx * hy, indexing="ij")
    centers = np.column_stack([cx.ravel(), cy.ravel()])  # (n^2, 2)
    keep = contrast.contains(centers)
    if not np.any(keep):
        raise EmptyGrid(
            f"no cell center inside the contrast at {cells_per_side} cells/side"
        )
    centers = centers[keep]
    n = len(centers)
    grid = ContrastGrid(
        cell_centers=centers,
        cell_weights=np.full(n, hx * hy),
        q_values=np.full(n, float(contrast.amplitude)),
        cells_per_side=cells_per_side,
        half_sizes=(hx / 2.0, hy / 2.0),
    )
    grid.validate()
    logger.debug("rasterized %d cells (%d per side)", n, cells_per_side)
    return grid


# ---------------------------------------------------------------------------
# System assembly and solves
# ---------------------------------------------------------------------------
def _green_pairwise(cfg: WaveConfig, pts: np.ndarray) -> np.ndarray:
    """Half-plane Green matrix over all cell pairs, zero on the diagonal."""
    r_direct = np.hypot(
        pts[:, None, 0] - pts[None, :, 0], pts[:, None, 1] - pts[None, :, 1]
    )  # (n, n)
    r_image = np.hypot(
        pts[:, None, 0] - pts[None, :, 0], pts[:, None, 1] + pts[None, :, 1]
    )
    np.fill_diagonal(r_direct, 1.0)  # sentinel; diagonal overwritten below
    g = 0.25j * (hankel1_0(cfg.k * r_direct) - hankel1_0(cfg.k * r_image))
    np.fill_diagonal(g, 0.0)
    return g


def _system_matrix(cfg: WaveConfig, grid: ContrastGrid) -> np.ndarray:
    """Nystrom matrix A of the volume integral equation, shape (n, n)."""
    pts = grid.cell_centers
    w = grid.cell_weights
    q = grid.q_values
    a = cfg.k**2 * q[None, :] * w[None, :] * _green_pairwise(cfg, pts)
    # Diagonal: closed-form self integral of the singular part, midpoint
    # rule for the smooth image part Phi(y, y*) at distance 2 y2.
    self_terms = np.array([self_cell_integral(cfg, area) for area in w])
    image_phi = 0.25j * hankel1_0(cfg.k * 2.0 * pts[:, 1])
    np.fill_diagonal(a, cfg.k**2 * q * (self_terms - w * image_phi))
    return a


def incident_on_grid(cfg: WaveConfig, grid: ContrastGrid, source) -> np.ndarray:
    """Incident field conj(G(y_c, source)) on the cell centers, shape (n,)."""
    src = np.asarray(source, dtype=float)
    return np.conj(green_halfplane(cfg, grid.cell_centers, src[None, :]))


def _check_source_outside(grid: ContrastGrid, source) -> None:
    src = np.asarray(source, dtype=float)
    hx, hy = grid.half_sizes
    inside = np.any(
        (np.abs(grid.cell_centers[:, 0] - src[0]) < hx)
        & (np.abs(grid.cell_centers[:, 1] - src[1]) < hy)
    )
    if inside:
        raise PointInsideDefectError(f"source {tuple(src)} lies inside a defect cell")


def solve_scattered_on_grid(cfg: WaveConfig, grid: ContrastGrid, source) -> np.ndarray:
    """Scattered field on the defect cells for one point source.

    Solves (I - A) u = A u_inc and returns u, the discrete scattered
    field at the cell centers.

    Parameters
    ----------
    cfg : WaveConfig
    grid : ContrastGrid
    source : array_like, shape (2,)
        Source location, outside the defect (and above it in practice).

    Returns
    -------
    np.ndarray, shape (n,)
        Complex scattered field u_s(y_c, source).

    Raises
    ------
    SingularSystem
        If the discretized system is numerically singular.
    """
    _check_source_outside(grid, source)
    a = _system_matrix(cfg, grid)
    u_inc = incident_on_grid(cfg, grid, source)
    system = np.eye(grid.n_cells, dtype=complex) - a
    try:
        return linalg.lu_solve(system, a @ u_inc)
    except SingularMatrix as exc:
        raise SingularSystem(f"resonant discretization: {exc}") from exc


def scattered_field_at(cfg: WaveConfig, grid: ContrastGrid, u_on_grid, source, x) -> complex:
    """Re-evaluate the scattered field at a point outside the defect.

        u_s(x) = k^2 sum_c w_c q_c G(x, y_c) (u_c + u_inc_c)

    Parameters
    ----------
    cfg : WaveConfig
    grid : ContrastGrid
    u_on_grid : np.ndarray, shape (n,)
        Scattered field on the cells from :func:`solve_scattered_on_grid`.
    source : array_like, shape (2,)
        The source that produced ``u_on_grid``.
    x : array_like, shape (2,)
        Evaluation point, outside every grid cell.

    Returns
    -------
    complex
    """
    u_on_grid = np.asarray(u_on_grid, dtype=complex)
    if u_on_grid.shape != (grid.n_cells,):
        raise DimensionMismatch(
            f"u_on_grid shape {u_on_grid.shape} != ({grid.n_cells},)"
        )
    pt = np.asarray(x, dtype=float)
    hx, hy = grid.half_sizes
    inside = np.any(
        (np.abs(grid.cell_centers[:, 0] - pt[0]) < hx)
        & (np.abs(grid.cell_centers[:, 1] - pt[1]) < hy)
    )
    if inside:
        raise PointInsideDefectError(f"evaluation point {tuple(pt)} is inside the defect")
    u_inc = incident_on_grid(cfg, grid, source)
    kernel = green_halfplane(cfg, pt[None, :], grid.cell_centers)  # (n,)
    total = u_on_grid + u_inc
    return complex(cfg.k**2 * np.sum(grid.cell_weights * grid.q_values * kernel * total))


def assemble_near_field(cfg: WaveConfig, grid: ContrastGrid, line: MeasurementLine) -> NearFieldMatrix:
    """Near-field matrix over all source/receiver pairs on the line.

    Entry (l, p) is w u_s(x_l, x_p) with w = (b - a)/d. One LU
    factorization of (I - A) serves all d source columns: with
    U_inc[:, p] = conj(G(cells, x_p)), the total field on the cells is
    (I - A)^{-1} U_inc, and

        N = w k^2 E (I - A)^{-1} U_inc,   E[l, c] = G(x_l, y_c) w_c q_c.

    Raises
    ------
    ValueError
        If the line is not strictly above the defect.
    SingularSystem
        If the discretized system is numerically singular.
    """
    top = float(grid.cell_centers[:, 1].max() + grid.half_sizes[1])
    if line.height_m <= top:
        raise ValueError(
            f"measurement line at {line.height_m} must lie above the defect top {top}"
        )
    meas = line.points()  # (d, 2)
    a = _system_matrix(cfg, grid)
    u_inc = np.conj(green_halfplane(cfg, grid.cell_centers[:, None, :], meas[None, :, :]))  # (n, d)
    system = np.eye(grid.n_cells, dtype=complex) - a
    try:
        total = linalg.lu_solve(system, u_inc)  # (n, d), one factorization
    except SingularMatrix as exc:
        raise SingularSystem(f"resonant discretization: {exc}") from exc
    emit = green_halfplane(cfg, meas[:, None, :], grid.cell_centers[None, :, :])  # (d, n)
    emit = emit * (grid.cell_weights * grid.q_values)[None, :]
    entries = line.weight * cfg.k**2 * (emit @ total)
    nf = NearFieldMatrix(entries=entries, wave=cfg, line=line)
    nf.validate()
    return nf


# ---------------------------------------------------------------------------
# Near-field file format
# ---------------------------------------------------------------------------
def _format_complex(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}j"


def save_near_field(nf: NearFieldMatrix, path) -> None:
    """Write a near-field matrix as CSV.

    Line 1 holds the metadata values ``d,k,a,b,m``; then d rows of d
    comma-separated complex entries like ``1.5e-03+2.25e-04j``, printed
    with 17 significant digits so the round trip is bit-exact.
    """
    nf.validate()
    line = nf.line
    header = (
        f"{line.d:d},{nf.wave.k:.17g},{line.a:.17g},{line.b:.17g},{line.height_m:.17g}"
    )
    rows = [
        ",".join(_format_complex(z) for z in row)
        for row in nf.entries
    ]
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(header + "\n")
        fh.write("\n".join(rows) + "\n")


def load_near_field(path) -> NearFieldMatrix:
    """Read a near-field matrix written by :func:`save_near_field`."""
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"empty near-field file {path}")
    head = lines[0].split(",")
    if len(head) != 5:
        raise ValueError(f"malformed metadata row {lines[0]!r}")
    d = int(head[0])
    k, a, b, m = (float(v) for v in head[1:])
    if len(lines) != d + 1:
        raise ValueError(f"expected {d} data rows, found {len(lines) - 1}")
    entries = np.empty((d, d), dtype=complex)
    for i, row in enumerate(lines[1:]):
        parts = row.split(",")
        if len(parts) != d:
            raise ValueError(f"row {i + 1} has {len(parts)} entries, expected {d}")
        entries[i] = [complex(p) for p in parts]
    nf = NearFieldMatrix(
        entries=entries,
        wave=WaveConfig(k=k),
        line=MeasurementLine(a=a, b=b, height_m=m, d=d),
    )
    nf.validate()
    return nf

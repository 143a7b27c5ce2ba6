"""Reconstruction driver: sweep test squares over the region of interest
and export the indicator map.

The region (0, R)^2 is tiled by M x M squares with centers
z_ij = (R (i+1) / M, R (j+1) / M) and half width R / (2 M). For each
square the chosen monotonicity test counts negative eigenvalues; the
resulting integer map is low inside the defect and high outside (or the
reverse for the outside test). Near-field data is either synthesized
from a known contrast or loaded from a file written by
:func:`monoscat.forward.save_near_field`.
"""

import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, MetadataMismatch
from .forward import (
    Circle,
    ContrastSpec,
    Ellipse,
    MeasurementLine,
    NearFieldMatrix,
    assemble_near_field,
    load_near_field,
    rasterize,
    save_near_field,
    SYNTHESIS_CELLS_PER_SIDE,
)
from .greens import WaveConfig
from .mono import (
    DEFAULT_QUAD_POINTS,
    DEFAULT_TOL_ABS,
    DEFAULT_TOL_REL,
    ProbeSquare,
    assemble_probe,
    inside_test,
    outside_test,
    sign_flipped,
)

logger = logging.getLogger(__name__)

DEFAULT_SWEEP_CELLS: int = 40
DEFAULT_ALPHA: float = 10.0


@dataclass(frozen=True)
class ReconConfig:
    """Full description of one reconstruction run.

    Exactly one of ``contrast`` (synthesize data) and ``nearfield_in``
    (load data) must be set.

    Attributes
    ----------
    wave : WaveConfig
    line : MeasurementLine
    contrast : ContrastSpec or None
    nearfield_in : str or None
        Path of a near-field CSV to load instead of synthesizing.
    region_size : float
        Side length R of the square region of interest.
    sweep_cells_per_side : int
        Number M of test squares per side.
    alpha : float
        Contrast bound passed to the monotonicity test.
    direction : str
        "inside" or "outside".
    tol_abs, tol_rel : float
        Eigenvalue sign thresholds.
    quad_points_per_side : int
        Probe quadrature resolution.
    cells_per_side : int
        Rasterization resolution when synthesizing data.
    threads : int
        Worker threads for the sweep (1 = sequential). Never affects the
        output values.
    out_prefix : str
        Basename for exported maps.
    nearfield_out : str or None
        Optional path to save synthesized data.
    """

    wave: WaveConfig
    line: MeasurementLine
    contrast: ContrastSpec = None
    nearfield_in: str = None
    region_size: float = 1.0
    sweep_cells_per_side: int = DEFAULT_SWEEP_CELLS
    alpha: float = DEFAULT_ALPHA
    direction: str = "inside"
    tol_abs: float = DEFAULT_TOL_ABS
    tol_rel: float = DEFAULT_TOL_REL
    quad_points_per_side: int = DEFAULT_QUAD_POINTS
    cells_per_side: int = SYNTHESIS_CELLS_PER_SIDE
    threads: int = 1
    out_prefix: str = "indicator"
    nearfield_out: str = None

    def __post_init__(self) -> None:
        if (self.contrast is None) == (self.nearfield_in is None):
            raise ConfigError("exactly one of contrast and nearfield_in must be set")
        if self.direction not in ("inside", "outside"):
            raise ConfigError(f"direction must be 'inside' or 'outside', got {self.direction!r}")
        if self.alpha <= 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        if self.region_size <= 0:
            raise ConfigError(f"region_size must be positive, got {self.region_size}")
        if self.sweep_cells_per_side < 2:
            raise ConfigError(
                f"sweep needs at least two cells per side, got {self.sweep_cells_per_side}"
            )
        if self.quad_points_per_side < 1:
            raise ConfigError(
                f"need at least one quadrature point, got {self.quad_points_per_side}"
            )
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")

    def to_dict(self) -> dict:
        contrast = None
        if self.contrast is not None:
            shapes = []
            for shape in self.contrast.shapes:
                if isinstance(shape, Circle):
                    shapes.append(
                        {
                            "type": "circle",
                            "center": list(shape.center),
                            "radius": shape.radius,
                        }
                    )
                elif isinstance(shape, Ellipse):
                    shapes.append(
                        {
                            "type": "ellipse",
                            "center": list(shape.center),
                            "semi_axes": list(shape.semi_axes),
                        }
                    )
                else:
                    raise ConfigError(f"unserializable shape {type(shape).__name__}")
            contrast = {"amplitude": self.contrast.amplitude, "shapes": shapes}
        return {
            "wave": {"k": self.wave.k},
            "line": {
                "a": self.line.a,
                "b": self.line.b,
                "height_m": self.line.height_m,
                "d": self.line.d,
            },
            "contrast": contrast,
            "nearfield_in": self.nearfield_in,
            "region_size": self.region_size,
            "sweep_cells_per_side": self.sweep_cells_per_side,
            "alpha": self.alpha,
            "direction": self.direction,
            "tol_abs": self.tol_abs,
            "tol_rel": self.tol_rel,
            "quad_points_per_side": self.quad_points_per_side,
            "cells_per_side": self.cells_per_side,
            "threads": self.threads,
            "out_prefix": self.out_prefix,
            "nearfield_out": self.nearfield_out,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ReconConfig":
        known = {
            "wave",
            "line",
            "contrast",
            "nearfield_in",
            "region_size",
            "sweep_cells_per_side",
            "alpha",
            "direction",
            "tol_abs",
            "tol_rel",
            "quad_points_per_side",
            "cells_per_side",
            "threads",
            "out_prefix",
            "nearfield_out",
        }
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            wave = WaveConfig(**data["wave"])
            line = MeasurementLine(**data["line"])
        except KeyError as exc:
            raise ConfigError(f"missing config section {exc}") from exc
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
        contrast = None
        if data.get("contrast") is not None:
            spec = data["contrast"]
            shapes = []
            for item in spec.get("shapes", ()):
                kind = item.get("type")
                if kind == "circle":
                    shapes.append(
                        Circle(center=tuple(item["center"]), radius=item["radius"])
                    )
                elif kind == "ellipse":
                    shapes.append(
                        Ellipse(
                            center=tuple(item["center"]),
                            semi_axes=tuple(item["semi_axes"]),
                        )
                    )
                else:
                    raise ConfigError(f"unknown shape type {kind!r}")
            contrast = ContrastSpec(shapes=tuple(shapes), amplitude=spec["amplitude"])
        kwargs = {
            key: data[key]
            for key in known - {"wave", "line", "contrast"}
            if key in data
        }
        return cls(wave=wave, line=line, contrast=contrast, **kwargs)

    def config_hash(self) -> str:
        """SHA-256 over the canonical config, excluding threading and paths.

        Thread count and file locations change where the run happens,
        not what it computes, so configs that differ only there hash
        identically.
        """
        payload = self.to_dict()
        for key in ("threads", "nearfield_in", "nearfield_out", "out_prefix"):
            payload.pop(key)
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("ascii")).hexdigest()


@dataclass(frozen=True)
class IndicatorMap:
    """Integer eigenvalue counts over the sweep grid.

    ``values[j, i]`` is the count for the square centered at
    (R (i+1) / M, R (j+1) / M): rows index x2 ascending, columns x1
    ascending.
    """

    values: np.ndarray
    region_size: float
    sensor_count: int

    def validate(self) -> None:
        if self.values.ndim != 2 or self.values.shape[0] != self.values.shape[1]:
            raise ValueError(f"indicator map must be square, got {self.values.shape}")
        if not np.issubdtype(self.values.dtype, np.integer):
            raise ValueError(f"indicator values must be integers, got {self.values.dtype}")
        if self.values.min() < 0 or self.values.max() > self.sensor_count:
            raise ValueError(
                f"counts must lie in [0, {self.sensor_count}], got "
                f"[{self.values.min()}, {self.values.max()}]"
            )

    @property
    def sweep_cells_per_side(self) -> int:
        return self.values.shape[0]

    def square_center(self, i: int, j: int) -> tuple:
        """Center of the (i, j) test square (column i, row j)."""
        m = self.sweep_cells_per_side
        r = self.region_size
        return (r * (i + 1) / m, r * (j + 1) / m)


def synthesize_or_load(config: ReconConfig) -> NearFieldMatrix:
    """Produce the near-field data a reconstruction will invert.

    With a contrast set, rasterizes it at ``config.cells_per_side`` and
    assembles the data (optionally saving it). With ``nearfield_in``
    set, loads the file and checks its metadata against the config.

    Raises
    ------
    MetadataMismatch
        If a loaded file disagrees with the config in k, d, a, b, or m.
    """
    if config.contrast is not None:
        grid = rasterize(config.contrast, config.cells_per_side)
        nf = assemble_near_field(config.wave, grid, config.line)
        if config.nearfield_out is not None:
            save_near_field(nf, config.nearfield_out)
            logger.info("saved synthesized near-field data to %s", config.nearfield_out)
        return nf
    nf = load_near_field(config.nearfield_in)
    mismatches = []
    for name, expected, actual in (
        ("k", config.wave.k, nf.wave.k),
        ("d", config.line.d, nf.line.d),
        ("a", config.line.a, nf.line.a),
        ("b", config.line.b, nf.line.b),
        ("m", config.line.height_m, nf.line.height_m),
    ):
        if expected != actual:
            mismatches.append(f"{name}: config {expected}, file {actual}")
    if mismatches:
        raise MetadataMismatch(
            f"{config.nearfield_in} does not match the config ({'; '.join(mismatches)})"
        )
    return nf


def run_reconstruction(config: ReconConfig) -> IndicatorMap:
    """Sweep the region and return the indicator map.

    The test direction comes from the config; a negative synthesized
    contrast flips the data sign so the same counting rule applies.
    Results are independent of ``config.threads``.
    """
    nf = synthesize_or_load(config)
    test = inside_test if config.direction == "inside" else outside_test
    if config.contrast is not None and config.contrast.amplitude < 0:
        test = sign_flipped(test)
    m = config.sweep_cells_per_side
    half_width = config.region_size / (2 * m)
    values = np.zeros((m, m), dtype=int)

    def count_at(i: int, j: int) -> int:
        square = ProbeSquare(
            center=(
                config.region_size * (i + 1) / m,
                config.region_size * (j + 1) / m,
            ),
            half_width=half_width,
            quad_points_per_side=config.quad_points_per_side,
        )
        probe = assemble_probe(config.wave, nf.line, square)
        verdict = test(
            nf,
            probe,
            config.alpha,
            tol_abs=config.tol_abs,
            tol_rel=config.tol_rel,
        )
        return verdict.negative_count

    if config.threads == 1:
        for j in range(m):
            for i in range(m):
                values[j, i] = count_at(i, j)
    else:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            futures = {
                pool.submit(count_at, i, j): (i, j)
                for j in range(m)
                for i in range(m)
            }
            for future in as_completed(futures):
                i, j = futures[future]
                values[j, i] = future.result()

    imap = IndicatorMap(
        values=values, region_size=config.region_size, sensor_count=nf.line.d
    )
    imap.validate()
    return imap


# ---------------------------------------------------------------------------
# Indicator map files
# ---------------------------------------------------------------------------
def export_csv(imap: IndicatorMap, path, header_comments=()) -> None:
    """Write the indicator map as CSV, one row per x2 level, ascending.

    Comment lines ("# ...") go first; data rows are bare integers with
    no trailing separator, LF line endings.
    """
    imap.validate()
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for comment in header_comments:
            fh.write(f"# {comment}\n")
        for row in imap.values:
            fh.write(",".join(str(int(v)) for v in row) + "\n")


def load_indicator_csv(path) -> tuple:
    """Read an indicator CSV; returns (values array, comment list)."""
    comments = []
    rows = []
    with open(path, "r", encoding="ascii") as fh:
        for raw in fh:
            stripped = raw.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                comments.append(stripped[1:].strip())
                continue
            rows.append([int(tok) for tok in stripped.split(",")])
    if not rows:
        raise ValueError(f"no data rows in {path}")
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise ValueError(f"ragged rows in {path}")
    return np.array(rows, dtype=int), comments


def export_pgm(imap: IndicatorMap, path, header_comments=()) -> None:
    """Write the indicator map as a plain (ASCII) PGM image.

    The maximum gray value is the sensor count, so counts map directly
    to pixel values. Image rows run top-down, so the map rows are
    emitted in reverse: the top image row is the largest x2. No emitted
    line exceeds 70 characters.
    """
    imap.validate()
    m = imap.sweep_cells_per_side
    lines = ["P2"]
    for comment in header_comments:
        # Hard-wrap so no comment line breaks the 70-character limit.
        text = str(comment)
        while len(text) > 68:
            lines.append(f"# {text[:68]}")
            text = text[68:]
        lines.append(f"# {text}")
    lines.append(f"{m} {m}")
    lines.append(f"{imap.sensor_count}")
    for row in imap.values[::-1]:
        current = ""
        for token in (str(int(v)) for v in row):
            if current and len(current) + 1 + len(token) > 70:
                lines.append(current)
                current = token
            else:
                current = token if not current else f"{current} {token}"
        lines.append(current)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")

"""Log-spaced radial grids and grid functions.

All radial data in this package lives on strictly positive, log-uniform
grids.  Log spacing makes the inversion r -> 1/r map a grid onto another
grid of the same family (reversed), so the Kelvin and dual transforms
never interpolate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError

# Allowed spread of log-spacing increments (grid invariant).
LOG_SPACING_TOL = 1e-12


def _readonly(a, preserve_dtype=False) -> np.ndarray:
    if preserve_dtype and isinstance(a, np.ndarray) and np.issubdtype(a.dtype, np.floating):
        arr = a.copy()
    else:
        arr = np.array(a, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class RadialGrid:
    """Strictly increasing, strictly positive, log-uniform radii."""

    points: np.ndarray

    def __post_init__(self):
        pts = _readonly(self.points)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 1 or pts.size < 2:
            raise InvalidParameterError("grid needs at least two points")
        if not np.all(np.isfinite(pts)) or pts[0] <= 0.0:
            raise InvalidParameterError("grid points must be finite and positive")
        logs = np.log(pts)
        steps = np.diff(logs)
        if np.any(steps <= 0.0):
            raise InvalidParameterError("grid points must be strictly increasing")
        if np.ptp(steps) > LOG_SPACING_TOL * max(1.0, steps[0]):
            raise InvalidParameterError("grid is not log-uniform")
        object.__setattr__(self, "_logs", _readonly(logs))

    @classmethod
    def logspaced(cls, r_min: float, r_max: float, n: int) -> "RadialGrid":
        if not (0.0 < r_min < r_max):
            raise InvalidParameterError("need 0 < r_min < r_max")
        return cls(np.geomspace(r_min, r_max, int(n)))

    @property
    def r_min(self) -> float:
        return float(self.points[0])

    @property
    def r_max(self) -> float:
        return float(self.points[-1])

    @property
    def n(self) -> int:
        return int(self.points.size)

    @property
    def log_points(self) -> np.ndarray:
        return self._logs

    @property
    def log_step(self) -> float:
        return float((self._logs[-1] - self._logs[0]) / (self.points.size - 1))

    @property
    def decades(self) -> float:
        return float(np.log10(self.r_max / self.r_min))

    def reflect(self) -> "RadialGrid":
        """Image of the grid under r -> 1/r (reversed to stay increasing)."""
        return RadialGrid(1.0 / self.points[::-1])

    def scaled(self, factor: float) -> "RadialGrid":
        if factor <= 0.0:
            raise InvalidParameterError("scale factor must be positive")
        return RadialGrid(self.points * factor)


@dataclass(frozen=True)
class RadialFunction:
    """Values of a radial function on a :class:`RadialGrid`.

    ``derivative`` holds d/dr values when the producer (e.g. the shooting
    integrator) supplies them; it is not recomputed here.
    """

    grid: RadialGrid
    values: np.ndarray
    derivative: np.ndarray | None = None

    def __post_init__(self):
        # Extended-precision values are preserved; anything else becomes float64.
        vals = _readonly(self.values, preserve_dtype=True)
        object.__setattr__(self, "values", vals)
        if vals.shape != self.grid.points.shape:
            raise InvalidParameterError("values and grid have different lengths")
        if not np.all(np.isfinite(vals)):
            raise InvalidParameterError("values must be finite")
        if self.derivative is not None:
            der = _readonly(self.derivative)
            if der.shape != vals.shape:
                raise InvalidParameterError("derivative and grid have different lengths")
            object.__setattr__(self, "derivative", der)

    def interp(self, r) -> np.ndarray:
        """Linear-in-log-r interpolation of the values.

        Rejects radii outside the grid range (beyond a relative slack of
        1e-12); transforms and assemblies never extrapolate.
        """
        r = np.asarray(r, dtype=float)
        slack = 1e-12
        if np.any(r < self.grid.r_min * (1.0 - slack)) or np.any(
            r > self.grid.r_max * (1.0 + slack)
        ):
            raise InvalidParameterError("interpolation point outside grid range")
        return np.interp(np.log(r), self.grid.log_points, self.values)

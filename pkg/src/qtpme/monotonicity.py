"""Monotonic-versus-oscillatory classification of 3-state relaxation.

The two nonzero generator eigenvalues solve lam^2 + xi*lam + q = 0, so the
sign of D = xi^2 - 4q decides between a real pair (monotonic decay) and a
complex pair (damped oscillation).  In the difference coordinates
(u, v, omega) the same quantity reads D = 3u^2 + v^2 + 4*omega*u + omega^2,
whose zero set is an ellipse that collapses to a point when omega = 0: with
balanced rate sums no oscillatory region exists at all.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    COEFF_NAMES,
    RateMatrix,
    RelaxationClass,
    RelaxationKind,
    UVWCoordinates,
    _frozen_array,
)
from .errors import BadAxis, BadShape, ValidationError

#: base width of the boundary band around D = 0 (scaled by max(1, xi^2))
TOL_B = 1e-9


@dataclass(frozen=True, eq=False)
class RegionMap:
    """Grid of relaxation classes over two varied rate coefficients.

    ``classes[i][j]`` and ``discriminants[i][j]`` describe the cell at
    ``grid1[i]``, ``grid2[j]``; class codes are 'M', 'O', 'B'.
    """

    axis1: str
    axis2: str
    grid1: np.ndarray
    grid2: np.ndarray
    classes: np.ndarray
    discriminants: np.ndarray
    fraction_oscillatory: float

    def __post_init__(self):
        if self.classes.shape != (self.grid1.size, self.grid2.size):
            raise BadShape("classes shape does not match the grids")
        if not 0.0 <= self.fraction_oscillatory <= 1.0:
            raise ValidationError("fraction_oscillatory must lie in [0, 1]")
        for name in ("grid1", "grid2", "classes", "discriminants"):
            object.__setattr__(self, name, _frozen_array(getattr(self, name), dtype=None))


def discriminant_values(a, b, c, d, e, f):
    """Vectorized (D, xi, q) from coefficient arrays.

    q is the sum of the generator's principal 2x2 minors, evaluated
    directly so that grid sweeps need no eigensolver.
    """
    xi = a + b + c + d + e + f
    q = (
        (a + b) * (c + d) - c * a
        + (a + b) * (e + f) - e * b
        + (c + d) * (e + f) - f * d
    )
    return xi * xi - 4.0 * q, xi, q


def classify_discriminant(disc, xi):
    """Class code for a discriminant at the boundary tolerance."""
    tol = TOL_B * np.maximum(1.0, xi * xi)
    return np.where(disc < -tol, "O", np.where(disc > tol, "M", "B"))


def discriminant(w: RateMatrix) -> RelaxationClass:
    """Classify a 3-state rate matrix by the sign of D = xi^2 - 4q.

    D < 0 means the nonzero eigenvalue pair is complex (oscillatory
    relaxation), D > 0 a distinct real pair (monotonic relaxation), and
    |D| within the boundary band a repeated root.
    """
    if w.n != 3:
        raise BadShape(f"expected N=3, got N={w.n}")
    a, b, c, d, e, f = w.coeffs
    disc, xi, q = discriminant_values(a, b, c, d, e, f)
    eta = c + d + f
    code = str(classify_discriminant(disc, xi))
    return RelaxationClass(
        kind=RelaxationKind(code), discriminant=float(disc), xi=float(xi),
        eta=float(eta), q=float(q),
    )


def uvw(w: RateMatrix) -> UVWCoordinates:
    """Difference coordinates of a 3-state rate matrix."""
    if w.n != 3:
        raise BadShape(f"expected N=3, got N={w.n}")
    a, b, c, d, e, f = w.coeffs
    k_c = e - c
    l = f - a
    m_c = b - d
    omega = (a + d + e) - (b + c + f)
    return UVWCoordinates(k_c=k_c, l=l, m_c=m_c, omega=omega, u=l + m_c, v=l - m_c)


def ellipse_value(coords: UVWCoordinates) -> float:
    """3u^2 + v^2 + 4*omega*u + omega^2; identically equal to the
    discriminant of the same rate matrix."""
    u, v, omega = coords.u, coords.v, coords.omega
    return 3.0 * u * u + v * v + 4.0 * omega * u + omega * omega


def _sweep_block(coeffs, axis1, axis2, grid1_block, grid2):
    values = {name: np.full((grid1_block.size, grid2.size), val)
              for name, val in zip(COEFF_NAMES, coeffs)}
    values[axis1] = np.broadcast_to(grid1_block[:, None], (grid1_block.size, grid2.size))
    values[axis2] = np.broadcast_to(grid2[None, :], (grid1_block.size, grid2.size))
    disc, xi, _ = discriminant_values(*(values[name] for name in COEFF_NAMES))
    return disc, classify_discriminant(disc, xi)


def sweep(
    template: RateMatrix,
    axis1: str,
    axis2: str,
    ranges,
    resolution,
    jobs: int = 1,
) -> RegionMap:
    """Classify every cell of a 2-D grid of rate coefficients.

    Parameters
    ----------
    template : RateMatrix
        3-state matrix supplying the four coefficients that are not varied.
    axis1, axis2 : str
        Distinct names from 'a'..'f'; axis1 indexes rows of the output.
    ranges : pair of (lo, hi)
        Nonnegative value ranges for the two axes.
    resolution : int or pair of int
        Number of grid points per axis (a single int applies to both).
    jobs : int
        Worker threads for row blocks; the output is assembled in fixed
        row-major order, so results are identical for any job count.
    """
    if template.n != 3:
        raise BadShape(f"expected N=3 template, got N={template.n}")
    for axis in (axis1, axis2):
        if axis not in COEFF_NAMES:
            raise BadAxis(f"unknown axis {axis!r}; expected one of {COEFF_NAMES}")
    if axis1 == axis2:
        raise BadAxis(f"axes must be distinct, got {axis1!r} twice")
    try:
        (lo1, hi1), (lo2, hi2) = ranges
    except (TypeError, ValueError):
        raise BadAxis(f"ranges must be a pair of (lo, hi) pairs, got {ranges!r}") from None
    if isinstance(resolution, int):
        steps1 = steps2 = resolution
    else:
        steps1, steps2 = resolution
    for lo, hi, steps in ((lo1, hi1, steps1), (lo2, hi2, steps2)):
        if lo < 0.0 or hi < lo:
            raise ValidationError(f"ranges must satisfy 0 <= lo <= hi, got ({lo}, {hi})")
        if steps < 1:
            raise ValidationError(f"resolution must be >= 1, got {steps}")

    grid1 = np.linspace(lo1, hi1, steps1)
    grid2 = np.linspace(lo2, hi2, steps2)
    coeffs = template.coeffs

    if jobs > 1 and grid1.size > 1:
        blocks = np.array_split(np.arange(grid1.size), min(jobs, grid1.size))
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(
                lambda idx: _sweep_block(coeffs, axis1, axis2, grid1[idx], grid2),
                blocks,
            ))
        disc = np.vstack([part[0] for part in parts])
        classes = np.vstack([part[1] for part in parts])
    else:
        disc, classes = _sweep_block(coeffs, axis1, axis2, grid1, grid2)

    fraction = float(np.count_nonzero(classes == "O")) / classes.size
    return RegionMap(
        axis1=axis1, axis2=axis2, grid1=grid1, grid2=grid2,
        classes=classes, discriminants=disc, fraction_oscillatory=fraction,
    )

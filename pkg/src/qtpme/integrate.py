"""Time evolution of master equations with conservation and entropy monitors."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import Generator, ProbabilityVector, QTDecomposition, _frozen_array
from .errors import BadShape, DefectiveGenerator, ValidationError

#: condition-number threshold above which the spectral propagator is refused
EXACT_CONDITION_LIMIT = 1e12


class Method(enum.Enum):
    EXACT = "exact"
    RK4 = "rk4"


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled solution p(t): row ``states[k]`` is the state at ``times[k]``.

    The row sums carry whatever drift the integrator produced; they are
    checked against the 1e-9 budget but never rescaled, so a broken
    generator shows up here instead of being hidden.
    """

    times: np.ndarray
    states: np.ndarray
    method: Method

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=float)
        if times.ndim != 1 or states.ndim != 2 or states.shape[0] != times.size:
            raise BadShape("times must be 1-D and states (T, N) with matching T")
        if not np.all(np.diff(times) > 0.0):
            raise ValidationError("times must be strictly increasing")
        drift = np.abs(states.sum(axis=1) - 1.0).max()
        if drift > 1e-9:
            raise ValidationError(f"probability sum drifted by {drift:.3e} (> 1e-9)")
        object.__setattr__(self, "times", _frozen_array(times))
        object.__setattr__(self, "states", _frozen_array(states))

    @property
    def n(self) -> int:
        return self.states.shape[1]

    def state(self, index: int) -> ProbabilityVector:
        return ProbabilityVector(self.states[index])


@dataclass(frozen=True, eq=False)
class MonitorSeries:
    """Conserved total, quadratic entropy (when available), and the
    Boltzmann-Shannon entropy along a trajectory."""

    h_vals: np.ndarray
    s_vals: np.ndarray | None
    s_bs_vals: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "h_vals", _frozen_array(self.h_vals))
        if self.s_vals is not None:
            object.__setattr__(self, "s_vals", _frozen_array(self.s_vals))
        object.__setattr__(self, "s_bs_vals", _frozen_array(self.s_bs_vals))


def integrate(
    g: Generator,
    p0: ProbabilityVector,
    t_end: float,
    steps: int,
    method: Method = Method.EXACT,
) -> Trajectory:
    """Propagate dp/dt = m p from p0 over ``steps`` uniform intervals.

    ``Method.EXACT`` applies the spectral propagator (eigendecomposition of
    the generator); ``Method.RK4`` takes fixed classical Runge-Kutta steps.
    Neither renormalizes the state: sum drift is reported by the trajectory
    invariant, not repaired.

    Raises
    ------
    DefectiveGenerator
        In exact mode when the eigenvector matrix has condition number
        above ``EXACT_CONDITION_LIMIT``; fall back to RK4.
    """
    if g.n != p0.n:
        raise BadShape(f"generator dimension {g.n} does not match state {p0.n}")
    if steps < 1:
        raise ValidationError(f"steps must be >= 1, got {steps}")
    if not t_end > 0.0:
        raise ValidationError(f"t_end must be positive, got {t_end}")
    times = np.linspace(0.0, t_end, steps + 1)
    p_start = np.asarray(p0.entries, dtype=float)

    if method is Method.EXACT:
        eigvals, eigvecs = np.linalg.eig(g.m)
        condition = np.linalg.cond(eigvecs)
        if not np.isfinite(condition) or condition > EXACT_CONDITION_LIMIT:
            raise DefectiveGenerator(condition)
        coeffs = np.linalg.solve(eigvecs, p_start.astype(complex))
        modes = np.exp(np.outer(times, eigvals))
        states = ((modes * coeffs) @ eigvecs.T).real
        states[0] = p_start  # the propagator at t = 0 is the identity
    elif method is Method.RK4:
        h = t_end / steps
        m = g.m
        states = np.empty((steps + 1, g.n))
        states[0] = p_start
        p = p_start.copy()
        for k in range(steps):
            k1 = m @ p
            k2 = m @ (p + 0.5 * h * k1)
            k3 = m @ (p + 0.5 * h * k2)
            k4 = m @ (p + h * k3)
            p = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            states[k + 1] = p
    else:
        raise ValidationError(f"unknown method {method!r}")

    return Trajectory(times=times, states=states, method=method)


def monitor(traj: Trajectory, qt: QTDecomposition | None = None) -> MonitorSeries:
    """Evaluate the conserved total and the entropies along a trajectory.

    h is the plain probability sum; the quadratic entropy p' sigma p / 2 is
    filled in when a decomposition is supplied; the Boltzmann-Shannon
    entropy uses the convention 0 * log 0 = 0.
    """
    states = traj.states
    h_vals = states.sum(axis=1)
    s_vals = None
    if qt is not None:
        if qt.n != traj.n:
            raise BadShape(f"decomposition dimension {qt.n} does not match trajectory {traj.n}")
        s_vals = 0.5 * np.einsum("ti,ij,tj->t", states, qt.entropy.sigma, states)
    positive = states > 0.0
    s_bs_vals = -np.sum(np.where(positive, states * np.log(np.where(positive, states, 1.0)), 0.0), axis=1)
    return MonitorSeries(h_vals=h_vals, s_vals=s_vals, s_bs_vals=s_bs_vals)


def extrema_count(traj: Trajectory, component: int, tol: float | None = None) -> int:
    """Count strict sign changes of the discrete derivative of one component.

    Differences with magnitude at most ``tol`` are ignored so that
    floating-point ripple on a flat tail is not counted as structure.  The
    default tolerance is 1e-9 times the component's maximum magnitude.
    """
    if traj.times.size < 3:
        raise ValidationError("extrema counting needs at least 3 time points")
    series = traj.states[:, component]
    if tol is None:
        tol = 1e-9 * float(np.abs(series).max())
    diffs = np.diff(series)
    signs = np.sign(diffs[np.abs(diffs) > tol])
    if signs.size < 2:
        return 0
    return int(np.count_nonzero(signs[1:] != signs[:-1]))

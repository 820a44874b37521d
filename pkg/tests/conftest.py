import math

import numpy as np
import pytest

from qtpme import RateMatrix, RelaxationKind, discriminant


def random_rate_matrix(rng, n=3, scale=1.0):
    w = rng.uniform(0.0, scale, (n, n))
    np.fill_diagonal(w, 0.0)
    return RateMatrix(w)


def random_probability(rng, n=3):
    p = rng.uniform(0.0, 1.0, n)
    return p / p.sum()


def predicted_visible_flips(xi, disc, rel_floor=1e-11):
    """Derivative sign changes of a damped oscillation observable in floats.

    The oscillating part decays as exp(-xi t / 2) while extrema recur every
    pi / omega with omega = sqrt(-disc) / 2; once the envelope is below
    rel_floor times the state scale no further extremum is representable.
    """
    omega = math.sqrt(-disc) / 2.0
    t_detect = 2.0 * math.log(1.0 / rel_floor) / xi
    return int(t_detect * omega / math.pi)


def sample_oscillatory(rng, resolvable=True):
    """Random rates classified oscillatory; optionally require that at
    least three derivative sign changes survive double precision."""
    while True:
        w = random_rate_matrix(rng)
        verdict = discriminant(w)
        if verdict.kind is not RelaxationKind.OSCILLATORY:
            continue
        if resolvable and predicted_visible_flips(verdict.xi, verdict.discriminant) < 3:
            continue
        return w, verdict


def sample_monotonic(rng):
    """Random rates with two distinct real nonzero eigenvalues."""
    while True:
        w = random_rate_matrix(rng)
        verdict = discriminant(w)
        if verdict.kind is RelaxationKind.MONOTONIC:
            return w, verdict


@pytest.fixture
def rng():
    return np.random.default_rng(987654321)

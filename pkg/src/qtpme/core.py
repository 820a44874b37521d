"""Shared domain types, validation, and conventions.

Index convention used throughout: ``w[dest][src]`` holds the transition
rate from state ``src`` to state ``dest`` (rows are destinations), so the
master equation reads as the matrix-vector product ``dp/dt = m @ p`` with
``m`` the generator.  For three-state systems the six off-diagonal rates
carry the conventional names::

    a = w[2][1]   b = w[3][1]   c = w[1][2]
    d = w[3][2]   e = w[1][3]   f = w[2][3]     (1-based indices)

Entropy matrices are defined up to a multiple of the all-ones rank-one
form; the canonical gauge zeroes the entry ``sigma[N-2][N-1]`` (0-based),
which for N=3 is the coefficient coupling states 2 and 3.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import BadShape, NegativeRate, NonzeroDiagonal, ValidationError

#: tolerated negative drift on probability entries
TOL_P = 1e-12
#: tolerated deviation of a probability vector's sum from 1
TOL_SUM = 1e-9

_N3_COEFF_INDEX = {
    "a": (1, 0), "b": (2, 0), "c": (0, 1),
    "d": (2, 1), "e": (0, 2), "f": (1, 2),
}
#: canonical coefficient order for 3-state rate matrices
COEFF_NAMES = ("a", "b", "c", "d", "e", "f")


def _frozen_array(values, dtype=float):
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ProbabilityVector:
    """Nonnegative vector summing to one (within drift tolerances)."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim != 1 or arr.size < 2:
            raise BadShape(f"probability vector must be 1-D with >= 2 entries, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("probability vector has non-finite entries")
        if arr.min() < -TOL_P:
            raise ValidationError(
                f"probability entry {arr.min()!r} below -{TOL_P:g}"
            )
        total = arr.sum()
        if abs(total - 1.0) > TOL_SUM:
            raise ValidationError(f"probabilities sum to {total!r}, expected 1 within {TOL_SUM:g}")
        object.__setattr__(self, "entries", _frozen_array(arr))

    @property
    def n(self) -> int:
        return self.entries.size

    def __array__(self, dtype=None, copy=None):
        return np.array(self.entries, dtype=dtype)


@dataclass(frozen=True, eq=False)
class RateMatrix:
    """Nonnegative transition rates with ``w[dest][src]`` orientation.

    The diagonal is identically zero; there is no self-transition rate.
    Construct through :func:`validate_rates` (or the ``from_coeffs``
    classmethod for 3-state systems); direct construction runs the same
    checks.
    """

    w: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.w, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 2:
            raise BadShape(f"rate matrix must be square with N >= 2, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise BadShape("rate matrix has non-finite entries")
        n = arr.shape[0]
        for i in range(n):
            if arr[i, i] != 0.0:
                raise NonzeroDiagonal(i + 1, float(arr[i, i]))
        neg = (arr < 0.0)
        if neg.any():
            i, j = np.argwhere(neg)[0]
            raise NegativeRate(int(i) + 1, int(j) + 1, float(arr[i, j]))
        object.__setattr__(self, "w", _frozen_array(arr))

    @property
    def n(self) -> int:
        return self.w.shape[0]

    @classmethod
    def from_coeffs(cls, a, b, c, d, e, f) -> "RateMatrix":
        """Build a 3-state rate matrix from the named coefficients."""
        return cls(np.array([[0.0, c, e], [a, 0.0, f], [b, d, 0.0]]))

    def _named(self, name):
        if self.n != 3:
            raise BadShape(f"named rate '{name}' is defined for N=3 only (N={self.n})")
        i, j = _N3_COEFF_INDEX[name]
        return float(self.w[i, j])

    # Named accessors for the 3-state case.
    @property
    def a(self): return self._named("a")

    @property
    def b(self): return self._named("b")

    @property
    def c(self): return self._named("c")

    @property
    def d(self): return self._named("d")

    @property
    def e(self): return self._named("e")

    @property
    def f(self): return self._named("f")

    @property
    def coeffs(self):
        """(a, b, c, d, e, f) for a 3-state matrix."""
        return tuple(self._named(name) for name in COEFF_NAMES)


@dataclass(frozen=True, eq=False)
class Generator:
    """Master-equation operator: off-diagonal rates, columns summing to zero."""

    m: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.m, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise BadShape(f"generator must be square, got shape {arr.shape}")
        n = arr.shape[0]
        off = arr - np.diag(np.diag(arr))
        if off.min() < 0.0:
            raise ValidationError("generator has a negative off-diagonal entry")
        if np.diag(arr).max() > 0.0:
            raise ValidationError("generator has a positive diagonal entry")
        scale = max(1.0, np.abs(arr).max())
        col_sums = arr.sum(axis=0)
        if np.abs(col_sums).max() > 1e-12 * scale:
            raise ValidationError(
                f"generator columns do not sum to zero (max |sum| = {np.abs(col_sums).max():.3e})"
            )
        object.__setattr__(self, "m", _frozen_array(arr))

    @property
    def n(self) -> int:
        return self.m.shape[0]


@dataclass(frozen=True, eq=False)
class QuadraticEntropy:
    """Quadratic state function S(p) = p' sigma p / 2 with symmetric sigma."""

    sigma: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.sigma, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 2:
            raise BadShape(f"entropy matrix must be square with N >= 2, got shape {arr.shape}")
        if not np.array_equal(arr, arr.T):
            raise ValidationError("entropy matrix must be exactly symmetric")
        object.__setattr__(self, "sigma", _frozen_array(arr))

    @property
    def n(self) -> int:
        return self.sigma.shape[0]

    def value(self, p) -> float:
        p = np.asarray(p, dtype=float)
        return 0.5 * float(p @ self.sigma @ p)

    def gradient(self, p) -> np.ndarray:
        return self.sigma @ np.asarray(p, dtype=float)

    @property
    def in_canonical_gauge(self) -> bool:
        return self.sigma[self.n - 2, self.n - 1] == 0.0

    def canonicalized(self) -> "QuadraticEntropy":
        """Shift by the all-ones form so sigma[N-2, N-1] becomes exactly zero."""
        shift = self.sigma[self.n - 2, self.n - 1]
        if shift == 0.0:
            return self
        return QuadraticEntropy(self.sigma - shift * np.ones((self.n, self.n)))


def centering_projector(n: int) -> np.ndarray:
    """Orthogonal projector onto the zero-sum subspace: I - J/n."""
    return np.eye(n) - np.full((n, n), 1.0 / n)


#: generator of the 1-parameter antisymmetric family for N=3
K3_PATTERN = np.array([[0.0, 1.0, -1.0], [-1.0, 0.0, 1.0], [1.0, -1.0, 0.0]])


@dataclass(frozen=True, eq=False)
class QTDecomposition:
    """Entropy matrix plus antisymmetric circulation reproducing a generator.

    The reconstructed vector field is ``dp/dt = (n*P + k_mat) @ sigma @ p``
    with ``P`` the centering projector; the total probability is conserved
    because both ``n*P`` and ``k_mat`` annihilate the all-ones covector.
    ``r`` is the scalar circulation strength, defined for N=3 only, where
    ``k_mat = r * K3_PATTERN``.
    """

    entropy: QuadraticEntropy
    k_mat: np.ndarray
    r: float | None
    residual: float

    def __post_init__(self):
        k = np.asarray(self.k_mat, dtype=float)
        n = self.entropy.n
        if k.shape != (n, n):
            raise BadShape(f"k_mat shape {k.shape} does not match entropy dimension {n}")
        scale = max(1.0, np.abs(k).max())
        if np.abs(k + k.T).max() > 1e-12 * scale:
            raise ValidationError("k_mat must be antisymmetric")
        if max(np.abs(k.sum(axis=0)).max(), np.abs(k.sum(axis=1)).max()) > 1e-12 * scale:
            raise ValidationError("k_mat row and column sums must vanish")
        object.__setattr__(self, "k_mat", _frozen_array(k))

    @property
    def n(self) -> int:
        return self.entropy.n

    def linear_operator(self) -> np.ndarray:
        """The matrix n*P + K applied to entropy gradients."""
        return self.n * centering_projector(self.n) + self.k_mat


@dataclass(frozen=True, eq=False)
class SpectralInfo:
    """Eigenvalues of a generator, sorted by descending real part then
    ascending imaginary part, with the structural zero flagged."""

    eigenvalues: np.ndarray
    zero_index: int
    gap: float
    null_dim: int

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _frozen_array(self.eigenvalues, dtype=complex))


class RelaxationKind(enum.Enum):
    MONOTONIC = "M"
    OSCILLATORY = "O"
    BOUNDARY = "B"


@dataclass(frozen=True)
class RelaxationClass:
    """Verdict on a 3-state relaxation spectrum plus the quantities behind it.

    ``discriminant`` is xi^2 - 4q for the nonzero eigenvalue pair of the
    generator; negative values mean a complex pair (oscillatory decay).
    """

    kind: RelaxationKind
    discriminant: float
    xi: float
    eta: float
    q: float

    @property
    def code(self) -> str:
        return self.kind.value


@dataclass(frozen=True)
class UVWCoordinates:
    """Difference coordinates of a 3-state rate matrix.

    k_c = e - c, l = f - a, m_c = b - d, omega = (a+d+e) - (b+c+f),
    u = l + m_c, v = l - m_c.  The identity k_c = omega + l + m_c holds by
    construction.
    """

    k_c: float
    l: float
    m_c: float
    omega: float
    u: float
    v: float


def validate_rates(raw) -> RateMatrix:
    """Validate a raw square array of transition rates.

    Parameters
    ----------
    raw : array_like
        Square array with ``raw[dest][src]`` orientation, zero diagonal,
        nonnegative off-diagonal entries.

    Returns
    -------
    RateMatrix

    Raises
    ------
    BadShape, NegativeRate, NonzeroDiagonal
        Offending indices are reported 1-based.
    """
    return RateMatrix(np.array(raw, dtype=float))


def generator_from_rates(w: RateMatrix) -> Generator:
    """Build the master-equation generator from validated rates.

    Off-diagonal entries equal the rates; each diagonal entry is minus the
    sum of its column's off-diagonal entries, so columns sum to zero and
    total probability is conserved by ``dp/dt = m @ p``.
    """
    m = np.array(w.w, dtype=float)
    np.fill_diagonal(m, 0.0)
    np.fill_diagonal(m, -m.sum(axis=0))
    return Generator(m)


def rate_matrix_to_json(w: RateMatrix) -> dict:
    """Serialize to the documented schema {"n": N, "rates": [[...]]}."""
    return {"n": w.n, "rates": [[float(x) for x in row] for row in w.w]}


def rate_matrix_from_json(obj) -> RateMatrix:
    """Parse the documented rate-matrix schema.

    ``rates`` rows are destinations, the diagonal must be zero, and the
    optional ``n`` must match the array shape.  Values are read as IEEE
    doubles.
    """
    if not isinstance(obj, dict):
        raise BadShape("rate-matrix document must be a JSON object")
    if "rates" not in obj:
        raise BadShape('rate-matrix document is missing the "rates" key')
    w = validate_rates(obj["rates"])
    if "n" in obj and int(obj["n"]) != w.n:
        raise BadShape(f'declared "n" = {obj["n"]} does not match rates shape {w.n}')
    return w

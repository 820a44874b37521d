"""Entropy/circulation decompositions of master-equation generators.

A generator G is rewritten as ``G = (n*P + K) @ sigma`` where P is the
centering projector, sigma is a symmetric entropy matrix in canonical
gauge, and K is antisymmetric with vanishing row and column sums.  Along
``dp/dt = (n*P + K) sigma p`` the total probability is exactly conserved
and S(p) = p' sigma p / 2 is nondecreasing, since the antisymmetric part
contributes nothing to dS/dt = n * |P sigma p|^2.

For N=2 and N=3 the decomposition is available in closed form; for general
N it is found by alternating linear solves on the bilinear matching system
followed by a damped Gauss-Newton polish, and every accepted answer is
certified by its reconstruction residual.
"""

from __future__ import annotations

import warnings

import numpy as np

from .core import (
    K3_PATTERN,
    Generator,
    QTDecomposition,
    QuadraticEntropy,
    RateMatrix,
    centering_projector,
    generator_from_rates,
)
from .errors import BadShape, DegenerateRatesWarning, NoConvergence, SolveFailed


def qt_vector_field(qt: QTDecomposition, p) -> np.ndarray:
    """Evaluate dp/dt = (n*P + K) sigma p at a state p.

    The output always sums to zero: both n*P and K annihilate the all-ones
    covector, so the total probability is a conserved quantity of the
    field.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (qt.n,):
        raise BadShape(f"state has shape {p.shape}, expected ({qt.n},)")
    return qt.linear_operator() @ (qt.entropy.sigma @ p)


def reconstruction_residual(qt: QTDecomposition, g: Generator) -> float:
    """Frobenius norm of (n*P + K) sigma - m."""
    if g.n != qt.n:
        raise BadShape(f"generator dimension {g.n} does not match decomposition {qt.n}")
    return float(np.linalg.norm(qt.linear_operator() @ qt.entropy.sigma - g.m))


def decompose_2state(w: RateMatrix) -> QTDecomposition:
    """Closed-form decomposition of a 2-state system.

    sigma = diag(-W21, -W12) and K = 0; the reconstruction is exact.
    """
    if w.n != 2:
        raise BadShape(f"expected N=2, got N={w.n}")
    sigma = np.diag([-w.w[1, 0], -w.w[0, 1]])
    entropy = QuadraticEntropy(sigma)
    k_mat = np.zeros((2, 2))
    residual = float(np.linalg.norm(
        (2.0 * centering_projector(2) + k_mat) @ sigma - generator_from_rates(w).m
    ))
    return QTDecomposition(entropy=entropy, k_mat=k_mat, r=None, residual=residual)


def decompose_3state(w: RateMatrix) -> QTDecomposition:
    """Closed-form decomposition of a 3-state system.

    The circulation strength is r = omega / xi with
    omega = (a+d+e) - (b+c+f) and xi the total rate sum; the five entropy
    coefficients then follow from the linear matching system between the
    generator and (3*P + r*K3_PATTERN) sigma, solved by elimination in the
    gauge sigma[1, 2] = 0.

    An all-zero rate matrix (xi = 0) returns the zero decomposition and
    emits :class:`DegenerateRatesWarning`.
    """
    if w.n != 3:
        raise BadShape(f"expected N=3, got N={w.n}")
    a, b, c, d, e, f = w.coeffs
    g = generator_from_rates(w)
    xi = a + b + c + d + e + f
    if xi == 0.0:
        warnings.warn(
            "all transition rates are zero; returning the trivial decomposition",
            DegenerateRatesWarning,
            stacklevel=2,
        )
        return QTDecomposition(
            entropy=QuadraticEntropy(np.zeros((3, 3))),
            k_mat=np.zeros((3, 3)),
            r=0.0,
            residual=0.0,
        )

    r = ((a + d + e) - (b + c + f)) / xi
    s, t = 1.0 - r, 1.0 + r

    # Column-wise matching of (3P + K) sigma against the generator, two
    # unknowns per column once the gauge zeroes the (2, 3) entry.
    alpha, big_b = np.linalg.solve(np.array([[2.0, -s], [-s, -t]]), np.array([c, d]))
    beta, big_c = np.linalg.solve(np.array([[2.0, -t], [-t, -s]]), np.array([e, f]))
    if abs(t) >= abs(s):
        big_a = (2.0 * alpha - s * beta - a) / t
    else:
        big_a = (2.0 * beta - t * alpha - b) / s
    if not np.isfinite([alpha, beta, big_a, big_b, big_c]).all():
        raise SolveFailed("3-state matching system produced non-finite coefficients")

    sigma = np.array([
        [big_a, alpha, beta],
        [alpha, big_b, 0.0],
        [beta, 0.0, big_c],
    ])
    k_mat = r * K3_PATTERN
    residual = float(np.linalg.norm(
        (3.0 * centering_projector(3) + k_mat) @ sigma - g.m
    ))
    return QTDecomposition(
        entropy=QuadraticEntropy(sigma), k_mat=k_mat, r=float(r), residual=residual
    )


def free_parameter_count(n: int) -> int:
    """Number of free parameters of the decomposition for dimension n.

    A gauge-fixed symmetric entropy matrix carries n(n+1)/2 - 1 entries and
    the admissible antisymmetric space carries (n-1)(n-2)/2, which together
    equal the n(n-1) independent rates of the master equation.
    """
    return (n * (n + 1)) // 2 - 1 + ((n - 1) * (n - 2)) // 2


def _ones_complement_basis(n: int) -> np.ndarray:
    """Deterministic orthonormal basis of the subspace orthogonal to 1."""
    seed = np.zeros((n, n))
    seed[:, 0] = 1.0
    seed[:, 1:] = np.eye(n)[:, : n - 1]
    q, _ = np.linalg.qr(seed)
    return q[:, 1:]


def _antisym_basis(n: int) -> list[np.ndarray]:
    """Antisymmetric matrices q_a q_b' - q_b q_a' spanning the admissible
    space (every element annihilates the all-ones vector)."""
    q = _ones_complement_basis(n)
    mats = []
    for i in range(n - 1):
        for j in range(i + 1, n - 1):
            mats.append(np.outer(q[:, i], q[:, j]) - np.outer(q[:, j], q[:, i]))
    return mats


def _sym_indices(n: int) -> list[tuple[int, int]]:
    """Upper-triangular index pairs of sigma, excluding the gauge entry."""
    return [
        (i, j)
        for i in range(n)
        for j in range(i, n)
        if not (i == n - 2 and j == n - 1)
    ]


def _sigma_from_vec(vec, indices, n):
    sigma = np.zeros((n, n))
    for val, (i, j) in zip(vec, indices):
        sigma[i, j] = val
        sigma[j, i] = val
    return sigma


def _sigma_columns(operator, indices, n):
    """Columns of the linear map sigma-parameters -> vec(operator @ sigma)."""
    cols = np.empty((n * n, len(indices)))
    for col, (i, j) in enumerate(indices):
        basis = np.zeros((n, n))
        basis[i, j] = 1.0
        basis[j, i] = 1.0
        cols[:, col] = (operator @ basis).ravel()
    return cols


def decompose_nstate(
    w: RateMatrix,
    tol: float = 1e-8,
    max_als_iterations: int = 200,
    max_newton_iterations: int = 60,
    restarts: int = 3,
) -> QTDecomposition:
    """Numerical decomposition for arbitrary dimension.

    Alternates linear least-squares solves for sigma given K and for K
    given sigma (initialized from K = 0), then polishes with damped
    Gauss-Newton steps on the joint bilinear system.  Failed runs are
    retried from seeded random circulation starts.  Success means the
    Frobenius reconstruction residual is at most ``tol``.

    Raises
    ------
    NoConvergence
        If no run reaches ``tol``; carries the best residual seen and the
        iteration count, since solvability for general dimension rests on
        parameter counting rather than proof.
    """
    n = w.n
    assert free_parameter_count(n) == n * (n - 1)
    g = generator_from_rates(w).m
    n_proj = n * centering_projector(n)
    k_basis = _antisym_basis(n)
    sym_idx = _sym_indices(n)
    n_sigma = len(sym_idx)
    n_k = len(k_basis)
    g_vec = g.ravel()

    def k_from_vec(kvec):
        if n_k == 0:
            return np.zeros((n, n))
        return np.tensordot(kvec, np.asarray(k_basis), axes=1)

    def residual_matrix(svec, kvec):
        return (n_proj + k_from_vec(kvec)) @ _sigma_from_vec(svec, sym_idx, n) - g

    def solve_sigma(kvec):
        design = _sigma_columns(n_proj + k_from_vec(kvec), sym_idx, n)
        sol, *_ = np.linalg.lstsq(design, g_vec, rcond=None)
        return sol

    def k_columns(sigma):
        return np.column_stack([(basis @ sigma).ravel() for basis in k_basis])

    def solve_k(svec):
        if n_k == 0:
            return np.zeros(0)
        sigma = _sigma_from_vec(svec, sym_idx, n)
        rhs = (g - n_proj @ sigma).ravel()
        sol, *_ = np.linalg.lstsq(k_columns(sigma), rhs, rcond=None)
        return sol

    def run(k_start):
        iterations = 0
        kvec = k_start
        svec = solve_sigma(kvec)
        res = np.linalg.norm(residual_matrix(svec, kvec))
        for _ in range(max_als_iterations):
            iterations += 1
            kvec = solve_k(svec)
            svec = solve_sigma(kvec)
            new_res = np.linalg.norm(residual_matrix(svec, kvec))
            stalled = abs(res - new_res) <= 1e-15 * max(1.0, res)
            res = new_res
            if res <= tol * 1e-3 or stalled:
                break
        for _ in range(max_newton_iterations):
            if res <= tol * 1e-4:
                break
            iterations += 1
            sigma = _sigma_from_vec(svec, sym_idx, n)
            operator = n_proj + k_from_vec(kvec)
            jac_sigma = _sigma_columns(operator, sym_idx, n)
            if n_k:
                jacobian = np.hstack([jac_sigma, k_columns(sigma)])
            else:
                jacobian = jac_sigma
            step, *_ = np.linalg.lstsq(
                jacobian, -residual_matrix(svec, kvec).ravel(), rcond=None
            )
            damping = 1.0
            for _ in range(30):
                s_try = svec + damping * step[:n_sigma]
                k_try = kvec + damping * step[n_sigma:]
                new_res = np.linalg.norm(residual_matrix(s_try, k_try))
                if new_res < res:
                    break
                damping *= 0.5
            else:
                break
            svec, kvec, res = s_try, k_try, new_res
        return svec, kvec, res, iterations

    best = run(np.zeros(n_k))
    attempt = 0
    while best[2] > tol and attempt < restarts and n_k > 0:
        rng = np.random.default_rng(attempt)
        candidate = run(rng.standard_normal(n_k))
        if candidate[2] < best[2]:
            best = candidate
        attempt += 1
    svec, kvec, res, iterations = best
    if res > tol:
        raise NoConvergence(res, iterations)

    sigma = _sigma_from_vec(svec, sym_idx, n)
    k_mat = k_from_vec(kvec)
    r = float(k_mat[0, 1]) if n == 3 else None
    return QTDecomposition(
        entropy=QuadraticEntropy(sigma),
        k_mat=k_mat,
        r=r,
        residual=float(res),
    )


def decomposition_to_json(qt: QTDecomposition) -> dict:
    """Serialize to the documented schema {"n", "sigma", "k", "r", "residual"}."""
    return {
        "n": qt.n,
        "sigma": [[float(x) for x in row] for row in qt.entropy.sigma],
        "k": [[float(x) for x in row] for row in qt.k_mat],
        "r": None if qt.r is None else float(qt.r),
        "residual": float(qt.residual),
    }

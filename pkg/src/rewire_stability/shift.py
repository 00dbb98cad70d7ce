"""Normalized augmented adjacency operators and their spectral machinery."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .graph import Graph

NORM_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-8
MAX_ITER = 10_000
DEFAULT_SEED = 0
# period-2 cycle: 1 - |v_{k+1}.v_{k-1}| below PERIOD2_RATIO * (1 - |v_{k+1}.v_k|)
PERIOD2_RATIO = 1e-2
ROUNDOFF = 4 * np.finfo(float).eps


class ShiftError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    """Power iteration exhausted its budget.

    Attributes:
        estimate: last norm estimate.
        iterate: last unit-norm iterate.
    """

    def __init__(self, message: str, estimate: float, iterate: np.ndarray):
        super().__init__(message)
        self.estimate = estimate
        self.iterate = iterate


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True, eq=False)
class ShiftOperator:
    gamma: float
    matrix: np.ndarray = field(repr=False)
    source: Graph = field(repr=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def decomposition(self) -> SpectralDecomposition:
        return eigendecompose(self)


def build_shift(g: Graph, gamma: float) -> ShiftOperator:
    """Normalized augmented adjacency ``D_g^{-1/2} (A + gamma I) D_g^{-1/2}``.

    Entries are written directly: ``gamma/(d_u+gamma)`` on the diagonal and
    ``1/sqrt((d_u+gamma)(d_v+gamma))`` on edges.
    """
    gamma = float(gamma)
    if not np.isfinite(gamma) or gamma < 0:
        raise ShiftError(f"gamma must be a finite nonnegative number, got {gamma}")
    if gamma == 0:
        isolated = g.isolated_nodes()
        if isolated:
            raise ShiftError(
                f"node {isolated[0]} is isolated; gamma must be positive "
                f"(isolated nodes: {isolated[:10]})"
            )
    dg = g.degrees().astype(float) + gamma
    n = g.num_nodes
    s = np.zeros((n, n))
    for u, nb in enumerate(g.neighbors):
        if nb:
            idx = np.fromiter(nb, dtype=np.int64)
            s[u, idx] = 1.0 / np.sqrt(dg[u] * dg[idx])
    if gamma > 0:
        s[np.diag_indices(n)] = gamma / dg
    s.setflags(write=False)
    return ShiftOperator(gamma=gamma, matrix=s, source=g)


@dataclass(frozen=True)
class PowerIterationResult:
    value: float
    vector: np.ndarray
    iterations: int
    method: str  # "power" or "dense"
    seed: int


def _check_symmetric(m: np.ndarray) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShiftError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m), initial=0.0)))
    if not np.allclose(m, m.T, rtol=0.0, atol=1e-12 * scale):
        raise ShiftError("matrix is not symmetric")


def _dense_fallback(m: np.ndarray, iterations: int, seed: int) -> PowerIterationResult:
    w, v = np.linalg.eigh(m)
    i = int(np.argmax(np.abs(w)))
    return PowerIterationResult(abs(float(w[i])), v[:, i], iterations, "dense", seed)


def power_iteration(
    m: np.ndarray,
    tol: float = NORM_TOL,
    seed: int = DEFAULT_SEED,
    max_iter: int = MAX_ITER,
) -> PowerIterationResult:
    """Largest-magnitude eigenvalue of a symmetric matrix by power iteration.

    The iteration runs on ``m`` itself. It stops when the Rayleigh quotient
    ``r`` changes by at most ``tol * max(1, |r|)``, the geometric tail of the
    remaining increments (ratio taken from the last two) is below the same
    threshold, and the iterate is an eigenvector to that order, i.e.
    ``||m v|| - |r|`` is below ``10 * tol * max(1, ||m v||)``. An iterate that is not an eigenvector yet
    returns to itself every second step is straddling ``+lambda`` and
    ``-lambda`` (tied or nearly tied spectrum); that case is handed to a
    dense eigensolve.
    """
    m = np.asarray(m, dtype=float)
    _check_symmetric(m)
    if tol <= 0:
        raise ShiftError(f"tol must be positive, got {tol}")
    n = m.shape[0]
    if n == 0 or not np.any(m):
        return PowerIterationResult(0.0, np.zeros(n), 0, "power", seed)

    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    prev_v = v
    r_prev = None
    dr_prev = np.inf
    for k in range(1, max_iter + 1):
        w = m @ v
        nrm = float(np.linalg.norm(w))
        if nrm == 0.0:
            # start vector in the null space; measure-zero, resolve densely
            return _dense_fallback(m, k, seed)
        r = float(v @ w)
        dr = abs(r - r_prev) if r_prev is not None else np.inf
        eigen_gap = nrm - abs(r)
        if eigen_gap <= 10 * tol * max(1.0, nrm):
            scale = max(1.0, abs(r_prev)) if r_prev is not None else 1.0
            if dr <= ROUNDOFF * scale:
                return PowerIterationResult(abs(r), v, k, "power", seed)
            if dr <= tol * scale:
                # geometric tail of the remaining Rayleigh increments
                q = dr / dr_prev
                if q < 1.0 and dr * q / (1.0 - q) <= tol * scale:
                    return PowerIterationResult(abs(r), v, k, "power", seed)
        elif k > 1:
            step = 1.0 - abs(float(w @ v)) / nrm
            two_step = 1.0 - abs(float(w @ prev_v)) / nrm
            if two_step < PERIOD2_RATIO * step:
                return _dense_fallback(m, k, seed)
        prev_v = v
        v = w / nrm
        r_prev = r
        dr_prev = dr
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} iterations", abs(r_prev), v
    )


def spectral_norm(m: np.ndarray, tol: float = NORM_TOL, seed: int = DEFAULT_SEED) -> float:
    """Operator 2-norm of a symmetric matrix (its spectral radius)."""
    return power_iteration(m, tol=tol, seed=seed).value


def operator_norm(theta: np.ndarray, tol: float = NORM_TOL, seed: int = DEFAULT_SEED) -> float:
    """Operator 2-norm of a rectangular matrix via ``sqrt(||theta^T theta||)``."""
    theta = np.asarray(theta, dtype=float)
    gram = theta.T @ theta
    gram = 0.5 * (gram + gram.T)
    return float(np.sqrt(spectral_norm(gram, tol=tol, seed=seed)))


def eigendecompose(s: ShiftOperator | np.ndarray) -> SpectralDecomposition:
    m = s.matrix if isinstance(s, ShiftOperator) else np.asarray(s, dtype=float)
    try:
        w, u = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise ShiftError(f"eigendecomposition failed: {exc}") from exc
    residual = np.max(np.abs(u @ np.diag(w) @ u.T - m), initial=0.0)
    if residual > RECONSTRUCTION_TOL:
        raise ShiftError(f"eigendecomposition residual {residual:.3g} exceeds tolerance")
    return SpectralDecomposition(eigenvalues=w, eigenvectors=u)


def _signal(s: ShiftOperator, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[0] != s.n:
        raise ShiftError(f"signal has length {x.shape[0]}, operator has {s.n} nodes")
    return x


def gft(s: ShiftOperator, x) -> np.ndarray:
    """Graph Fourier coefficients ``U^T x``."""
    return s.decomposition.eigenvectors.T @ _signal(s, x)


def inverse_gft(s: ShiftOperator, x_hat) -> np.ndarray:
    return s.decomposition.eigenvectors @ _signal(s, x_hat)


def export_csv(m: np.ndarray, path: str | Path) -> None:
    np.savetxt(path, np.asarray(m), fmt="%.17g", delimiter=",")

# src/numerics.py
# Dense linear algebra, deterministic random streams and regression primitives.

import hashlib
import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from src.errors import NumericalError, ParameterError, ShapeError
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

# Matrices are plain float64 numpy arrays; as_matrix() enforces the invariants.
Matrix = np.ndarray

JACOBI_MAX_DIM = 64
JACOBI_OFF_TOLERANCE = 1e-12
JACOBI_MAX_SWEEPS = 100
SYMMETRY_TOLERANCE = 1e-10


def as_matrix(a, name: str = "matrix") -> Matrix:
    """Returns `a` as a finite 2-D float64 array."""
    m = np.asarray(a, dtype=float)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {m.shape}.")
    if not np.all(np.isfinite(m)):
        raise NumericalError(f"{name} contains NaN or infinite entries.")
    return m


def max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


# --- Eigen decomposition ---

@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Eigenvalues sorted non-increasing; `vectors[:, i]` belongs to `values[i]`."""
    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> Matrix:
        return (self.vectors * self.values) @ self.vectors.T


def _check_symmetric(a: Matrix) -> None:
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"Eigen decomposition needs a square matrix, got {a.shape}.")
    scale = max(1.0, max_abs(a))
    asym = max_abs(a - a.T)
    if asym > SYMMETRY_TOLERANCE * scale:
        raise ShapeError(f"Matrix is not symmetric (max asymmetry {asym:.3e}).")


def _jacobi(a: Matrix) -> Tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi rotations until the off-diagonal Frobenius norm is negligible."""
    n = a.shape[0]
    work = 0.5 * (a + a.T)
    vectors = np.eye(n)
    norm = math.sqrt(float(np.sum(work * work)))
    threshold = JACOBI_OFF_TOLERANCE * max(norm, 1e-300)
    for sweep in range(JACOBI_MAX_SWEEPS):
        off = math.sqrt(max(float(np.sum(work * work) - np.sum(np.diag(work) ** 2)), 0.0))
        if off <= threshold:
            logger.debug(f"Jacobi converged after {sweep} sweeps (n={n}, off={off:.3e}).")
            return np.diag(work).copy(), vectors
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = work[p, q]
                if apq == 0.0:
                    continue
                theta = (work[q, q] - work[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p = work[:, p].copy()
                col_q = work[:, q].copy()
                work[:, p] = c * col_p - s * col_q
                work[:, q] = s * col_p + c * col_q
                row_p = work[p, :].copy()
                row_q = work[q, :].copy()
                work[p, :] = c * row_p - s * row_q
                work[q, :] = s * row_p + c * row_q
                work[p, q] = work[q, p] = 0.0
                vec_p = vectors[:, p].copy()
                vec_q = vectors[:, q].copy()
                vectors[:, p] = c * vec_p - s * vec_q
                vectors[:, q] = s * vec_p + c * vec_q
    raise NumericalError(f"Jacobi eigen solver did not converge in {JACOBI_MAX_SWEEPS} sweeps (n={n}).")


def sym_eigen(a) -> EigenDecomposition:
    """
    Eigen decomposition of a symmetric matrix.

    Matrices up to JACOBI_MAX_DIM use cyclic Jacobi; larger Gram matrices go to
    LAPACK (numpy.linalg.eigh). Either way the values come back non-increasing
    and every vector's largest-magnitude coordinate is positive.
    """
    m = as_matrix(a, "eigen input")
    _check_symmetric(m)
    n = m.shape[0]
    if n == 0:
        return EigenDecomposition(np.zeros(0), np.zeros((0, 0)))
    if n <= JACOBI_MAX_DIM:
        values, vectors = _jacobi(m)
    else:
        try:
            values, vectors = np.linalg.eigh(0.5 * (m + m.T))
        except np.linalg.LinAlgError as e:
            raise NumericalError(f"LAPACK eigen solver failed: {e}") from e
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    for i in range(n):
        pivot = int(np.argmax(np.abs(vectors[:, i])))
        if vectors[pivot, i] < 0:
            vectors[:, i] = -vectors[:, i]
    return EigenDecomposition(values=values, vectors=vectors)


# --- Cholesky ---

def cholesky(a, relative_pivot_tolerance: float = 0.0) -> Matrix:
    """
    Lower-triangular L with L Lᵀ = a.

    Raises NumericalError naming the first pivot that is not positive (or not
    above `relative_pivot_tolerance` × max diagonal).
    """
    m = as_matrix(a, "cholesky input")
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"Cholesky needs a square matrix, got {m.shape}.")
    n = m.shape[0]
    floor = relative_pivot_tolerance * (max_abs(np.diag(m)) if n else 0.0)
    low = np.zeros_like(m)
    for j in range(n):
        row = low[j, :j]
        pivot = m[j, j] - float(row @ row)
        if not pivot > floor:
            raise NumericalError(
                f"Matrix is not positive definite: pivot {j} is {pivot:.3e}.", pivot_index=j
            )
        low[j, j] = math.sqrt(pivot)
        if j + 1 < n:
            low[j + 1:, j] = (m[j + 1:, j] - low[j + 1:, :j] @ row) / low[j, j]
    return low


def solve_lower(low: Matrix, b: np.ndarray) -> np.ndarray:
    """Forward substitution for a lower-triangular system."""
    x = np.array(b, dtype=float, copy=True)
    for i in range(low.shape[0]):
        x[i] = (x[i] - low[i, :i] @ x[:i]) / low[i, i]
    return x


def solve_upper(up: Matrix, b: np.ndarray) -> np.ndarray:
    """Back substitution for an upper-triangular system."""
    x = np.array(b, dtype=float, copy=True)
    for i in range(up.shape[0] - 1, -1, -1):
        x[i] = (x[i] - up[i, i + 1:] @ x[i + 1:]) / up[i, i]
    return x


def cholesky_solve(a, b, relative_pivot_tolerance: float = 0.0) -> np.ndarray:
    """Solves a x = b for symmetric positive-definite a; b may be a vector or a matrix."""
    m = as_matrix(a, "system matrix")
    rhs = np.asarray(b, dtype=float)
    if rhs.shape[0] != m.shape[0]:
        raise ShapeError(f"Right-hand side has {rhs.shape[0]} rows, system has {m.shape[0]}.")
    low = cholesky(m, relative_pivot_tolerance)
    return solve_upper(low.T, solve_lower(low, rhs))


def log_det_from_cholesky(low: Matrix) -> float:
    return 2.0 * float(np.sum(np.log(np.diag(low))))


# --- Regression primitives ---

def ols_fit(phi, y) -> np.ndarray:
    """Least-squares weights from the normal equations (ΦᵀΦ) w = Φᵀ y."""
    design = as_matrix(phi, "design matrix")
    target = np.asarray(y, dtype=float).ravel()
    n, m = design.shape
    if target.shape[0] != n:
        raise ShapeError(f"Target has {target.shape[0]} entries, design matrix has {n} rows.")
    if n < m:
        raise ShapeError(f"Need at least as many rows as weights (N={n}, M={m}).")
    gram = design.T @ design
    try:
        return cholesky_solve(gram, design.T @ target, relative_pivot_tolerance=1e-12)
    except NumericalError as e:
        raise NumericalError(f"Normal equations are rank deficient: {e}", pivot_index=e.pivot_index) from e


def sigmoid(theta: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Logistic function eᶿ/(eᶿ+1), evaluated without overflow for either sign."""
    t = np.asarray(theta, dtype=float)
    out = np.empty_like(t)
    positive = t >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-t[positive]))
    e = np.exp(t[~positive])
    out[~positive] = e / (1.0 + e)
    if out.ndim == 0:
        return float(out)
    return out


def log_sigmoid(theta: np.ndarray) -> np.ndarray:
    """log(sigmoid(θ)) without underflow."""
    t = np.asarray(theta, dtype=float)
    return -np.logaddexp(0.0, -t)


# --- Random streams ---

U64_MAX = 2 ** 64 - 1


@dataclass(frozen=True)
class RngStream:
    """
    A reproducible random stream keyed by (seed, label).

    Generators are numpy PCG64 seeded with SeedSequence(entropy=seed,
    spawn_key=sha256(label)), so the same pair gives the same sequence on every
    platform and different labels give independent streams.
    """
    seed: int
    label: str = ""

    def __post_init__(self):
        if not isinstance(self.seed, (int, np.integer)) or not 0 <= int(self.seed) <= U64_MAX:
            raise ParameterError(f"Seed must be an unsigned 64-bit integer, got {self.seed!r}.")

    def substream(self, label: str) -> "RngStream":
        return RngStream(self.seed, f"{self.label}/{label}" if self.label else label)

    def _spawn_key(self) -> Tuple[int, ...]:
        digest = hashlib.sha256(self.label.encode("utf-8")).digest()
        return tuple(int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4))

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        seq = np.random.SeedSequence(entropy=int(self.seed), spawn_key=self._spawn_key())
        return np.random.Generator(np.random.PCG64(seq))

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import ConvergenceError, DimensionError

Vector = NDArray[np.float64]
SymMatrix = NDArray[np.float64]
OrthogonalMatrix = NDArray[np.float64]

JACOBI_TOLERANCE = 1e-13
JACOBI_ROTATIONS_PER_ENTRY = 50
CLAMP_RELATIVE = 1e-12
WEYL_TOLERANCE = 1e-10
TRACE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class SymEig:
    """Eigenvalues in non-increasing order with matching eigenvector columns."""

    eigenvalues: Vector
    basis: OrthogonalMatrix

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])

    def reconstruct(self) -> SymMatrix:
        return sym_matrix((self.basis * self.eigenvalues) @ self.basis.T)

    def rotate(self, u: ArrayLike) -> Vector:
        """Coordinates of u in the eigenbasis (Pᵀu)."""
        return self.basis.T @ as_vector(u, self.dim)


@dataclass(frozen=True)
class WeylReport:
    ok: bool
    margins: Vector


@dataclass(frozen=True)
class WeylGeneralReport:
    ok: bool
    lower_margin: float
    upper_margin: float


@dataclass(frozen=True)
class TraceRotationReport:
    ok: bool
    lower: float
    middle: float
    upper: float


def as_vector(values: ArrayLike, dim: int | None = None) -> Vector:
    vector = np.asarray(values, dtype=np.float64).reshape(-1)
    if dim is not None and vector.shape[0] != dim:
        raise DimensionError(f"Expected a vector of dimension {dim}, got {vector.shape[0]}")
    return vector


def sym_matrix(values: ArrayLike) -> SymMatrix:
    matrix = np.atleast_2d(np.asarray(values, dtype=np.float64))
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"Expected a square matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("Matrix entries must be finite")
    symmetric = 0.5 * (matrix + matrix.T)
    symmetric.flags.writeable = False
    return symmetric


def _freeze(array: NDArray[np.float64]) -> NDArray[np.float64]:
    array.flags.writeable = False
    return array


def sym_eig(matrix: ArrayLike) -> SymEig:
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Sweeps over every (p, q) pair until the largest off-diagonal entry drops
    below ``1e-13 * ||M||_F``. At most ``50 * d**2`` rotations are applied.
    """
    source = sym_matrix(matrix)
    dim = source.shape[0]
    work = np.array(source, copy=True)
    basis = np.eye(dim)
    threshold = JACOBI_TOLERANCE * float(np.linalg.norm(source))
    max_rotations = JACOBI_ROTATIONS_PER_ENTRY * dim * dim
    rotations = 0

    while True:
        residual = _max_off_diagonal(work)
        if residual <= threshold:
            break
        for p in range(dim - 1):
            for q in range(p + 1, dim):
                if abs(work[p, q]) <= threshold:
                    continue
                if rotations >= max_rotations:
                    raise ConvergenceError(_max_off_diagonal(work), rotations)
                _rotate(work, basis, p, q)
                rotations += 1

    # Stable sort keeps the sweep order for tied eigenvalues.
    order = np.argsort(-np.diag(work), kind="stable")
    eigenvalues = np.array(np.diag(work)[order], copy=True)
    return SymEig(eigenvalues=_freeze(eigenvalues), basis=_freeze(basis[:, order].copy()))


def _max_off_diagonal(work: NDArray[np.float64]) -> float:
    if work.shape[0] < 2:
        return 0.0
    return float(np.max(np.abs(np.triu(work, 1))))


def _rotate(work: NDArray[np.float64], basis: NDArray[np.float64], p: int, q: int) -> None:
    apq = work[p, q]
    theta = (work[q, q] - work[p, p]) / (2.0 * apq)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
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
    work[p, q] = 0.0
    work[q, p] = 0.0

    vec_p = basis[:, p].copy()
    vec_q = basis[:, q].copy()
    basis[:, p] = c * vec_p - s * vec_q
    basis[:, q] = s * vec_p + c * vec_q


def powered_eigenvalues(eig: SymEig, power: float) -> Vector:
    values = np.array(eig.eigenvalues, copy=True)
    if float(power).is_integer() and power >= 0:
        return values**power
    top = float(values[0]) if values.size else 0.0
    floor = CLAMP_RELATIVE * top
    if top <= 0 or np.any(values < -floor):
        raise ValueError(
            f"Power {power} needs a positive definite matrix "
            f"(smallest eigenvalue {float(values[-1]):.3e})"
        )
    # Roundoff negatives only; true negatives were rejected above.
    values = np.where(values <= 0.0, floor, values)
    return np.power(values, power)


def mat_power(eig: SymEig, power: float) -> SymMatrix:
    scaled = powered_eigenvalues(eig, power)
    return sym_matrix((eig.basis * scaled) @ eig.basis.T)


def rank1_update(matrix: ArrayLike, u: ArrayLike) -> SymMatrix:
    source = sym_matrix(matrix)
    vector = as_vector(u, source.shape[0])
    return sym_matrix(source + np.outer(vector, vector))


def weyl_check(before: SymEig, after: SymEig) -> WeylReport:
    if before.dim != after.dim:
        raise DimensionError(f"Dimension mismatch: {before.dim} vs {after.dim}")
    margins = after.eigenvalues - before.eigenvalues
    slack = WEYL_TOLERANCE * max(1.0, float(after.eigenvalues[0]))
    return WeylReport(ok=bool(np.all(margins >= -slack)), margins=margins)


def weyl_general_check(a: ArrayLike, b: ArrayLike) -> WeylGeneralReport:
    """Both sides of Weyl's inequality for every admissible index triple.

    With 1-based indices, ``λ_j(A) + λ_k(B) <= λ_i(A+B)`` whenever
    ``j + k - d >= i`` and ``λ_i(A+B) <= λ_r(A) + λ_s(B)`` whenever
    ``i >= r + s - 1``.
    """
    left = sym_matrix(a)
    right = sym_matrix(b)
    if left.shape != right.shape:
        raise DimensionError(f"Dimension mismatch: {left.shape} vs {right.shape}")
    dim = left.shape[0]
    la = sym_eig(left).eigenvalues
    lb = sym_eig(right).eigenvalues
    lsum = sym_eig(left + right).eigenvalues

    idx = np.arange(1, dim + 1)
    jj, kk = np.meshgrid(idx, idx, indexing="ij")
    pair = la[:, None] + lb[None, :]
    lower_margin = math.inf
    upper_margin = math.inf
    for i in idx:
        below = jj + kk - dim >= i
        if np.any(below):
            lower_margin = min(lower_margin, float(np.min(lsum[i - 1] - pair[below])))
        above = i >= jj + kk - 1
        if np.any(above):
            upper_margin = min(upper_margin, float(np.min(pair[above] - lsum[i - 1])))

    scale = max(1.0, float(np.max(np.abs(la))) + float(np.max(np.abs(lb))))
    slack = WEYL_TOLERANCE * scale
    return WeylGeneralReport(
        ok=lower_margin >= -slack and upper_margin >= -slack,
        lower_margin=lower_margin,
        upper_margin=upper_margin,
    )


def _check_spectrum(values: ArrayLike, name: str) -> Vector:
    spectrum = as_vector(values)
    if spectrum.size == 0:
        raise ValueError(f"{name} must not be empty")
    if np.any(spectrum <= 0):
        raise ValueError(f"{name} must be strictly positive")
    if np.any(np.diff(spectrum) > 0):
        raise ValueError(f"{name} must be sorted non-increasing")
    return spectrum


def min_rotation_trace(sigma: ArrayLike, sigma_prime: ArrayLike) -> float:
    """Tr(Σ⁻¹Σ'), the smallest value Tr(Σ⁻¹RΣ'Rᵀ) takes over orthogonal R."""
    s = _check_spectrum(sigma, "sigma")
    sp = _check_spectrum(sigma_prime, "sigma_prime")
    if s.shape != sp.shape:
        raise DimensionError(f"Dimension mismatch: {s.shape[0]} vs {sp.shape[0]}")
    return float(np.sum(sp / s))


def trace_rotation_check(
    sigma: ArrayLike,
    sigma_prime: ArrayLike,
    q: ArrayLike,
    r: ArrayLike,
) -> TraceRotationReport:
    s = _check_spectrum(sigma, "sigma")
    sp = _check_spectrum(sigma_prime, "sigma_prime")
    if s.shape != sp.shape:
        raise DimensionError(f"Dimension mismatch: {s.shape[0]} vs {sp.shape[0]}")
    q_mat = np.asarray(q, dtype=np.float64)
    r_mat = np.asarray(r, dtype=np.float64)
    dim = s.shape[0]
    if q_mat.shape != (dim, dim) or r_mat.shape != (dim, dim):
        raise DimensionError(f"Rotations must be {dim}x{dim}")

    lower = float(np.sum(sp / s))
    upper = float(np.sum(sp[::-1] / s))
    left = (q_mat / s) @ q_mat.T
    right = (r_mat * sp) @ r_mat.T
    middle = float(np.sum(left * right.T))

    slack = TRACE_TOLERANCE * max(1.0, abs(upper))
    ok = lower <= middle + slack and middle <= upper + slack
    return TraceRotationReport(ok=ok, lower=lower, middle=middle, upper=upper)


def random_orthogonal(dim: int, seed: int | np.random.Generator) -> OrthogonalMatrix:
    """Haar-distributed orthogonal matrix from the QR factor of a Gaussian matrix."""
    if dim < 1:
        raise ValueError("Dimension must be at least 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    gaussian = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(gaussian)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return _freeze(q * signs)


def orthogonality_error(matrix: ArrayLike) -> float:
    q = np.asarray(matrix, dtype=np.float64)
    return float(np.max(np.abs(q.T @ q - np.eye(q.shape[0]))))


def reconstruction_error(eig: SymEig, matrix: ArrayLike) -> float:
    source = sym_matrix(matrix)
    return float(np.max(np.abs(eig.reconstruct() - source)))


def max_abs(matrix: ArrayLike) -> float:
    return float(np.max(np.abs(np.asarray(matrix, dtype=np.float64))))


def identity(dim: int, scale: float = 1.0) -> SymMatrix:
    return sym_matrix(scale * np.eye(dim))


def diag(values: Sequence[float]) -> SymMatrix:
    return sym_matrix(np.diag(np.asarray(values, dtype=np.float64)))

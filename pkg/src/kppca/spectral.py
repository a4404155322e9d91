"""Dense symmetric eigendecomposition, centering, and PSD square roots.

Everything downstream (primal and dual training, the sampling operator,
conditional covariances) is built on the decompositions produced here, so
this module pins down the conventions once: eigenvalues are sorted in
descending order, tiny negative eigenvalues of nominally PSD matrices are
clamped to zero, and eigenvector signs are made deterministic.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NegativeEigenvalue, NoConvergence, NonFinite


def _require_finite(a, what):
    if not np.all(np.isfinite(a)):
        raise NonFinite(f"{what} contains NaN or Inf entries")


@dataclass(frozen=True)
class SymMatrix:
    """A real symmetric matrix; symmetry is enforced by averaging (M + M^T)/2."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        if m.shape[0] < 1:
            raise ValueError("matrix must be at least 1x1")
        _require_finite(m, "matrix")
        object.__setattr__(self, "entries", (m + m.T) / 2.0)

    @property
    def n(self):
        return self.entries.shape[0]


@dataclass(frozen=True)
class EigenDecomposition:
    """Descending eigenpairs of a symmetric PSD matrix.

    eigenvalues[p] pairs with eigenvectors[:, p]. Values below clamp_floor
    are stored as exactly 0; the unclamped values are kept separately so
    that genuinely negative spectra can still be detected.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    clamp_floor: float
    raw_eigenvalues: np.ndarray = field(repr=False)

    @property
    def n(self):
        return self.eigenvalues.shape[0]

    def rank(self):
        """Number of eigenvalues strictly above the clamp floor."""
        return int(np.count_nonzero(self.eigenvalues > 0.0))


def _fix_signs(vectors):
    # Largest-magnitude entry of each column is made positive; np.argmax
    # takes the first maximum, which breaks ties toward the lowest index.
    idx = np.argmax(np.abs(vectors), axis=0)
    flip = vectors[idx, np.arange(vectors.shape[1])] < 0
    out = vectors.copy()
    out[:, flip] *= -1.0
    return out


def sym_eig(m: SymMatrix) -> EigenDecomposition:
    """Full eigendecomposition of a symmetric PSD-up-to-noise matrix.

    Eigenvalues come back descending and clamped at 1e-12 * max(1, lambda_1);
    eigenvector signs follow the largest-entry-positive convention so that
    repeated runs and cross-implementation comparisons are deterministic.
    """
    a = m.entries
    _require_finite(a, "matrix")
    try:
        values, vectors = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"eigenvalue iteration failed: {exc}") from exc
    values = values[::-1].copy()
    vectors = vectors[:, ::-1].copy()
    floor = 1e-12 * max(1.0, float(values[0]))
    clamped = np.where(values < floor, 0.0, values)
    return EigenDecomposition(
        eigenvalues=clamped,
        eigenvectors=_fix_signs(vectors),
        clamp_floor=floor,
        raw_eigenvalues=values,
    )


def center_gram(k: SymMatrix) -> SymMatrix:
    """Double-center a Gram matrix: K_c = J K J with J = I - (1/N) 11^T."""
    a = k.entries
    row_mean = a.mean(axis=1, keepdims=True)
    col_mean = a.mean(axis=0, keepdims=True)
    total = a.mean()
    return SymMatrix(a - row_mean - col_mean + total)


def center_columns(x):
    """Subtract the column mean from a d x N matrix.

    Returns (centered, mean) where mean is the d-vector average over the N
    columns.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {x.shape}")
    _require_finite(x, "matrix")
    mean = x.mean(axis=1)
    return x - mean[:, None], mean


def psd_sqrt_factor(e: EigenDecomposition) -> np.ndarray:
    """Symmetric square root S = V diag(sqrt(lambda)) V^T, so S @ S restores the source."""
    if np.any(e.raw_eigenvalues < -e.clamp_floor):
        worst = float(e.raw_eigenvalues.min())
        raise NegativeEigenvalue(f"eigenvalue {worst} below -{e.clamp_floor}")
    roots = np.sqrt(e.eigenvalues)
    return (e.eigenvectors * roots) @ e.eigenvectors.T

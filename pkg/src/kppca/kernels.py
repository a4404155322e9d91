"""Kernel evaluation, Gram assembly, and centered out-of-sample kernel vectors.

Only the two kernels actually exercised downstream are shipped: the linear
kernel k(x, y) = <x, y> and the RBF kernel k(x, y) = exp(-||x - y||^2 / (2 gamma^2)).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonFinite
from .spectral import SymMatrix

FAMILIES = ("linear", "rbf")


@dataclass(frozen=True)
class KernelSpec:
    family: str
    gamma: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}; expected one of {FAMILIES}")
        if self.family == "rbf":
            if self.gamma is None or not self.gamma > 0:
                raise ValueError("rbf kernel needs a bandwidth gamma > 0")


@dataclass(frozen=True)
class TrainingSet:
    """N input vectors stored as the rows of an (N, d_in) array."""

    points: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float)
        if p.ndim != 2:
            raise ValueError(f"points must be an (N, d_in) array, got shape {p.shape}")
        if p.shape[0] < 1:
            raise ValueError("training set needs at least one point")
        if not np.all(np.isfinite(p)):
            raise NonFinite("training set contains NaN or Inf entries")
        object.__setattr__(self, "points", p)

    @classmethod
    def from_columns(cls, x):
        """Build from a d x N data matrix whose columns are the samples."""
        return cls(np.asarray(x, dtype=float).T)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def d_in(self):
        return self.points.shape[1]

    def columns(self):
        """The samples as a d_in x N matrix."""
        return self.points.T


def kernel_eval(spec: KernelSpec, x, y) -> float:
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise DimensionMismatch(f"kernel arguments have lengths {x.size} and {y.size}")
    if spec.family == "linear":
        return float(x @ y)
    d2 = float(np.sum((x - y) ** 2))
    return float(np.exp(-d2 / (2.0 * spec.gamma**2)))


def _cross_sqdist(a, b):
    # ||a_i - b_j||^2 via the expansion trick; exact zeros are restored by
    # the caller where i and j index the same point.
    aa = np.sum(a * a, axis=1)
    bb = np.sum(b * b, axis=1)
    d2 = aa[:, None] + bb[None, :] - 2.0 * (a @ b.T)
    return np.maximum(d2, 0.0)


def gram(spec: KernelSpec, ts: TrainingSet) -> SymMatrix:
    """Uncentered N x N kernel matrix K[i, j] = k(x_i, x_j)."""
    p = ts.points
    if spec.family == "linear":
        return SymMatrix(p @ p.T)
    d2 = _cross_sqdist(p, p)
    np.fill_diagonal(d2, 0.0)
    return SymMatrix(np.exp(-d2 / (2.0 * spec.gamma**2)))


def kernel_vector(spec: KernelSpec, ts: TrainingSet, x) -> np.ndarray:
    """Uncentered kernel evaluations (k(x, x_1), ..., k(x, x_N))."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size != ts.d_in:
        raise DimensionMismatch(f"input has length {x.size}, training points have {ts.d_in}")
    if spec.family == "linear":
        return ts.points @ x
    d2 = np.sum((ts.points - x[None, :]) ** 2, axis=1)
    return np.exp(-d2 / (2.0 * spec.gamma**2))


def centered_kernel_vector(spec: KernelSpec, ts: TrainingSet, x) -> np.ndarray:
    """Out-of-sample centered kernel vector, entry i = k_c(x, x_i).

    Double centering in kernel evaluations only:
    k_c(x, x_i) = k(x, x_i) - mean_j k(x, x_j) - mean_j k(x_j, x_i)
                  + mean_{j,l} k(x_j, x_l).
    """
    return centered_kernel_vectors(spec, ts, np.asarray(x, dtype=float).reshape(1, -1))[:, 0]


def centered_kernel_vectors(spec: KernelSpec, ts: TrainingSet, xs) -> np.ndarray:
    """Centered kernel vectors for many inputs at once, as an N x M matrix.

    xs is (M, d_in), one input per row; column m of the result is the
    centered kernel vector of xs[m]. Assembles the training Gram once,
    which is what makes batch projection affordable.
    """
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 2 or xs.shape[1] != ts.d_in:
        raise DimensionMismatch(f"inputs must be (M, {ts.d_in}), got shape {xs.shape}")
    k_train = gram(spec, ts).entries
    col_means = k_train.mean(axis=0)
    grand_mean = k_train.mean()
    if spec.family == "linear":
        kv = ts.points @ xs.T
    else:
        d2 = _cross_sqdist(ts.points, xs)
        kv = np.exp(-d2 / (2.0 * spec.gamma**2))
    return kv - kv.mean(axis=0, keepdims=True) - col_means[:, None] + grand_mean

"""Kernel-smoother preimaging: map a vector of kernel weights back to input
space as a normalized weighted average of the training points.

The default configuration is the bare smoother x_hat = sum_i k_i x_i / sum_i k_i.
Centered kernel vectors sum to (near) zero, which makes that normalizer
blow up; the two stabilizers (an additive epsilon in the denominator and
clipping negative weights) are opt-in.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateNormalizer, DimensionMismatch
from .kernels import TrainingSet

_NORMALIZER_FLOOR = 1e-12


@dataclass(frozen=True)
class PreimageConfig:
    epsilon: float = 0.0
    clip_negative: bool = False

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon}")


def kernel_smoother(ts: TrainingSet, k, cfg: PreimageConfig = PreimageConfig()) -> np.ndarray:
    """Weighted average of the training points under the weights k.

    Raises DegenerateNormalizer when the stabilized weight sum is within
    1e-12 of zero, which is the typical fate of centered weights with
    epsilon = 0.
    """
    w = np.asarray(k, dtype=float).ravel()
    if w.shape[0] != ts.n:
        raise DimensionMismatch(f"weights have length {w.shape[0]}, training set has {ts.n} points")
    if cfg.clip_negative:
        w = np.maximum(w, 0.0)
    denom = float(w.sum()) + cfg.epsilon
    if abs(denom) < _NORMALIZER_FLOOR:
        raise DegenerateNormalizer(
            f"weight sum {denom:.3e} is numerically zero; "
            "set epsilon > 0 or clip_negative to stabilize"
        )
    return (ts.points.T @ w) / denom

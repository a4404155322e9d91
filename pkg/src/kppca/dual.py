"""The kernel-side model: dual training on the centered Gram matrix, MAP
projection and reconstruction in kernel space, the marginal sampling operator,
and probabilistic generation of kernel representations.

A fitted DualModel keeps the full eigendecomposition of the centered Gram
matrix (generation needs the entire spectrum), the Gram matrix itself, and
the training inputs, so projecting new points and preimaging need no side
channel.
"""

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DimensionMismatch,
    LatentExceedsRank,
    NotCentered,
    QEqualsNWarning,
    RankDeficient,
    SigmaTooLarge,
    SigmaZero,
    ZeroSpectrum,
)
from .kernels import KernelSpec, TrainingSet, centered_kernel_vector, centered_kernel_vectors
from .primal import GaussianSpec, sigma2_ml
from .spectral import EigenDecomposition, SymMatrix, psd_sqrt_factor, sym_eig

_LOG_2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class Observed:
    x: np.ndarray


@dataclass(frozen=True)
class Generated:
    seed: int | None
    index: int


@dataclass(frozen=True)
class Reconstructed:
    pass


@dataclass(frozen=True)
class KernelSample:
    """A centered kernel representation together with where it came from."""

    kc_vec: np.ndarray
    origin: object


@dataclass(frozen=True)
class DualModel:
    """Trained kernel-space model.

    a holds the dual loadings, column p = sqrt(1/N - sigma2 / lambda_p) * e_p
    for the leading q eigenpairs (lambda_p, e_p) of the centered Gram matrix.
    """

    a: np.ndarray
    sigma2: float
    q: int
    eigenvalues: np.ndarray
    e: np.ndarray
    kc: SymMatrix
    spec: KernelSpec
    ts: TrainingSet

    @property
    def n(self):
        return self.eigenvalues.shape[0]

    def rank(self):
        return int(np.count_nonzero(self.eigenvalues > 0.0))


def fit_dual(kc: SymMatrix, spec: KernelSpec, ts: TrainingSet,
             q: int | None = None, sigma2: float | None = None) -> DualModel:
    """Closed-form fit from an already centered Gram matrix.

    Exactly one of q and sigma2 must be given, mirroring fit_primal. The
    latent dimension may not exceed the numerical rank of the Gram matrix
    (for a centered kernel this is at most N - 1, the constant direction is
    always in the null space).
    """
    n = kc.n
    if ts.n != n:
        raise DimensionMismatch(f"Gram matrix is {n} x {n} but training set has {ts.n} points")
    scale = max(1.0, float(np.max(np.abs(kc.entries))))
    row_sums = kc.entries.sum(axis=1)
    if np.max(np.abs(row_sums)) > 1e-6 * scale:
        raise NotCentered(f"row sums reach {np.max(np.abs(row_sums)):.3e}; center the Gram matrix first")
    eig = sym_eig(kc)
    lam = eig.eigenvalues
    rank = eig.rank()
    if rank == 0:
        raise ZeroSpectrum("centered Gram matrix has no positive eigenvalues")
    if (q is None) == (sigma2 is None):
        raise ValueError("exactly one of q and sigma2 must be given")
    if q is not None:
        if not 1 <= q <= rank:
            raise LatentExceedsRank(f"q={q} outside 1..rank={rank}")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", QEqualsNWarning)
            s2 = sigma2_ml(lam, q, n)
    else:
        if sigma2 < 0:
            raise ValueError(f"sigma2 must be nonnegative, got {sigma2}")
        if sigma2 > lam[0] / n:
            raise SigmaTooLarge(f"sigma2={sigma2} exceeds lambda_1/N={lam[0] / n}")
        q = int(np.count_nonzero(lam[:rank] / n >= sigma2))
        s2 = float(sigma2)
    scales = np.sqrt(np.maximum(1.0 / n - s2 / lam[:q], 0.0))
    return DualModel(a=eig.eigenvectors[:, :q] * scales, sigma2=s2, q=q,
                     eigenvalues=lam, e=eig.eigenvectors, kc=kc, spec=spec, ts=ts)


def kpca_limit(m: DualModel) -> DualModel:
    """The same model in the noiseless limit: sigma2 = 0 with q unchanged,
    which turns MAP projection/reconstruction into classical kernel PCA."""
    scales = np.full(m.q, 1.0 / np.sqrt(m.n))
    return replace(m, a=m.e[:, : m.q] * scales, sigma2=0.0)


def kernel_sample(m: DualModel, x) -> KernelSample:
    """Centered kernel representation of a new input point."""
    return KernelSample(centered_kernel_vector(m.spec, m.ts, x), Observed(np.asarray(x, dtype=float)))


def kernel_samples(m: DualModel, xs) -> list[KernelSample]:
    """Batch version of kernel_sample; xs has one input per row."""
    mat = centered_kernel_vectors(m.spec, m.ts, xs)
    xs = np.asarray(xs, dtype=float)
    return [KernelSample(mat[:, i].copy(), Observed(xs[i])) for i in range(mat.shape[1])]


def _check_kvec(m, k):
    vec = k.kc_vec if isinstance(k, KernelSample) else np.asarray(k, dtype=float).ravel()
    if vec.shape[0] != m.n:
        raise DimensionMismatch(f"kernel vector has length {vec.shape[0]}, model expects {m.n}")
    return vec


def _latent_normal_matrix(m):
    return m.a.T @ m.kc.entries @ m.a + m.sigma2 * np.eye(m.q)


def dual_latent_map(m: DualModel, k) -> np.ndarray:
    """MAP latent code of a kernel representation:
    (a^T K_c a + sigma2 I)^-1 a^T k_c.

    For a maximum-likelihood model the normal matrix collapses to
    diag(lambda_p / N), recovering the N Lambda^-1 a^T k_c shortcut.
    """
    vec = _check_kvec(m, k)
    if m.eigenvalues[m.q - 1] <= 0.0:
        raise RankDeficient(f"lambda_{m.q} is at the clamp floor; reduce q")
    return np.linalg.solve(_latent_normal_matrix(m), m.a.T @ vec)


def dual_reconstruct(m: DualModel, h) -> KernelSample:
    """MAP kernel representation of a latent code: K_c a h."""
    h = np.asarray(h, dtype=float).ravel()
    if h.size != m.q:
        raise DimensionMismatch(f"latent vector has length {h.size}, model expects {m.q}")
    return KernelSample(m.kc.entries @ (m.a @ h), Reconstructed())


def build_sampler(m: DualModel) -> np.ndarray:
    """The symmetric square-root factor of the marginal kernel covariance.

    B = E diag(c) E^T with c_p = lambda_p / sqrt(N) over the retained
    components and c_p = sigma sqrt(lambda_p) over the discarded ones, so
    that B B^T matches the trained marginal covariance of kernel
    representations and k_c = B u with standard normal u samples from it.
    The second block keeps B invertible whenever sigma2 > 0 and the spectrum
    is positive.
    """
    c = np.empty(m.n)
    c[: m.q] = m.eigenvalues[: m.q] / np.sqrt(m.n)
    c[m.q:] = np.sqrt(m.sigma2) * np.sqrt(m.eigenvalues[m.q:])
    return (m.e * c) @ m.e.T


def samples_from_noise(m: DualModel, u) -> np.ndarray:
    """Deterministic sampling map: columns of u (N x M standard-normal draws)
    to columns of kernel representations. Exposed so callers can pin the
    noise, e.g. for grid sweeps or tests."""
    u = np.asarray(u, dtype=float)
    if u.shape[0] != m.n:
        raise DimensionMismatch(f"noise has {u.shape[0]} rows, model expects {m.n}")
    return build_sampler(m) @ u


def dual_sample(m: DualModel, rng, count: int) -> list[KernelSample]:
    """Draw `count` kernel representations from the trained marginal.

    rng may be a seed or a numpy Generator. Fixed seed means bit-identical
    output; when a plain seed is given it is recorded in each sample origin.
    """
    seed = int(rng) if isinstance(rng, (int, np.integer)) else None
    gen = np.random.default_rng(rng)
    u = gen.standard_normal((m.n, count))
    mat = samples_from_noise(m, u)
    return [KernelSample(mat[:, i].copy(), Generated(seed, i)) for i in range(count)]


def explained_variance(m: DualModel) -> float:
    """Fraction of the total spectrum captured by the q retained components."""
    total = float(m.eigenvalues.sum())
    if total <= 0.0:
        raise ZeroSpectrum("all eigenvalues are zero")
    return float(m.eigenvalues[: m.q].sum() / total)


def dual_latent_posterior(m: DualModel, k) -> GaussianSpec:
    """Posterior of the latent code given a kernel representation; the mean
    coincides with dual_latent_map and the covariance is
    (a^T K_c a + sigma2 I)^-1."""
    if m.sigma2 <= 0.0:
        raise SigmaZero("posterior is degenerate at sigma2 == 0; use dual_latent_map")
    vec = _check_kvec(m, k)
    g = _latent_normal_matrix(m)
    mean = np.linalg.solve(g, m.a.T @ vec)
    vals, vecs = np.linalg.eigh(g)
    factor = (vecs / np.sqrt(vals)) @ vecs.T
    return GaussianSpec(mean=mean, cov_factor=factor, dim=m.q)


def _gram_eig(m):
    # the model already stores the eigendecomposition of kc; rewrap it
    floor = 1e-12 * max(1.0, float(m.eigenvalues[0]))
    return EigenDecomposition(eigenvalues=m.eigenvalues, eigenvectors=m.e,
                              clamp_floor=floor, raw_eigenvalues=m.eigenvalues)


def dual_conditional_kernel(m: DualModel, h) -> GaussianSpec:
    """Distribution of kernel representations given a latent code:
    mean K_c a h, covariance sigma2 K_c."""
    mean = dual_reconstruct(m, h).kc_vec
    factor = np.sqrt(m.sigma2) * psd_sqrt_factor(_gram_eig(m))
    return GaussianSpec(mean=mean, cov_factor=factor, dim=m.n)


def dual_marginal_loglik(m: DualModel, k) -> float:
    """Log-density of a kernel representation under the trained marginal.

    Only the log form is exposed: the normalizer multiplies N eigenvalues
    and underflows quickly as a raw density. Requires sigma2 > 0 and a
    fully positive spectrum, otherwise the marginal is degenerate.
    """
    if m.sigma2 <= 0.0:
        raise SigmaZero("marginal density is degenerate at sigma2 == 0")
    if m.rank() < m.n:
        raise RankDeficient("marginal covariance is singular: spectrum contains zeros")
    vec = _check_kvec(m, k)
    variances = np.empty(m.n)
    variances[: m.q] = m.eigenvalues[: m.q] ** 2 / m.n
    variances[m.q:] = m.sigma2 * m.eigenvalues[m.q:]
    coords = m.e.T @ vec
    quad = float(np.sum(coords**2 / variances))
    logdet = float(np.sum(np.log(variances)))
    return -0.5 * (m.n * _LOG_2PI + logdet + quad)

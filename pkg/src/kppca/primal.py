"""Probabilistic PCA over explicit features: closed-form training, the latent
posterior, MAP projection and reconstruction, marginal log-likelihood, and
sampling in feature space.

Conventions: data matrices are d x N with one sample per column, the centered
covariance is the unnormalized X_c X_c^T (the 1/N lives inside the loading
formula), and the latent basis is fixed to the canonical one so that latent
codes are reproducible up to the documented sign convention.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    LatentTooLarge,
    NonFinite,
    QEqualsNWarning,
    SigmaTooLarge,
    SigmaZero,
)
from .spectral import SymMatrix, center_columns, sym_eig

_LOG_2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class GaussianSpec:
    """A Gaussian as mean plus a covariance factor B with covariance = B B^T."""

    mean: np.ndarray
    cov_factor: np.ndarray
    dim: int

    def covariance(self):
        return self.cov_factor @ self.cov_factor.T


@dataclass(frozen=True)
class PrimalModel:
    """Trained feature-space model.

    w holds the loadings, column p = sqrt(lambda_p / N - sigma2) * v_p;
    eigenvalues is the full length-N spectrum of the centered covariance
    (padded with zeros when d < N), which the noise estimator needs.
    """

    mu: np.ndarray
    w: np.ndarray
    sigma2: float
    q: int
    eigenvalues: np.ndarray
    v: np.ndarray

    @property
    def d(self):
        return self.mu.shape[0]

    @property
    def n(self):
        return self.eigenvalues.shape[0]

    def singular_values(self):
        """Loading scales s_p = ||w_p||, descending."""
        return np.sqrt(np.sum(self.w**2, axis=0))


def sigma2_ml(eigenvalues, q: int, n: int) -> float:
    """Maximum-likelihood noise variance: the discarded spectrum averaged twice.

    sigma2 = sum_{p=q+1..N} lambda_p / (N (N - q)). For q == n there is no
    discarded spectrum; 0 is returned by convention and QEqualsNWarning is
    emitted so callers can tell the degenerate case apart.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    if q < 1 or q > n:
        raise LatentTooLarge(f"q={q} outside 1..{n}")
    if q == n:
        warnings.warn("q == N leaves no discarded eigenvalues", QEqualsNWarning, stacklevel=2)
        return 0.0
    tail = lam[q:n]
    return float(tail.sum() / (n * (n - q)))


def _resolve_latent(lam_over_n, q, sigma2, q_cap, n):
    """Turn the (q | sigma2) choice into a concrete (q, sigma2) pair."""
    if (q is None) == (sigma2 is None):
        raise ValueError("exactly one of q and sigma2 must be given")
    if q is not None:
        if not 1 <= q <= q_cap:
            raise LatentTooLarge(f"q={q} outside 1..{q_cap}")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", QEqualsNWarning)
            s2 = sigma2_ml(lam_over_n * n, q, n)
        return q, s2
    if sigma2 < 0:
        raise ValueError(f"sigma2 must be nonnegative, got {sigma2}")
    if sigma2 > lam_over_n[0]:
        raise SigmaTooLarge(f"sigma2={sigma2} exceeds lambda_1/N={lam_over_n[0]}")
    q = int(np.count_nonzero(lam_over_n[:q_cap] >= sigma2))
    return q, float(sigma2)


def fit_primal(x, q: int | None = None, sigma2: float | None = None) -> PrimalModel:
    """Closed-form maximum-likelihood fit on a d x N data matrix.

    Exactly one of q (latent dimension, noise deduced) and sigma2 (noise,
    latent dimension deduced as the largest p with lambda_p / N >= sigma2)
    must be supplied.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"expected a d x N matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NonFinite("data matrix contains NaN or Inf entries")
    d, n = x.shape
    xc, mu = center_columns(x)
    eig = sym_eig(SymMatrix(xc @ xc.T))
    # The model keeps the length-N spectrum: the d x d covariance and the
    # N x N Gram share their nonzero eigenvalues, everything further is 0.
    lam = np.zeros(n)
    m = min(d, n)
    lam[:m] = eig.eigenvalues[:m]
    q, s2 = _resolve_latent(lam / n, q, sigma2, m, n)
    v = eig.eigenvectors[:, :q]
    scales = np.sqrt(np.maximum(lam[:q] / n - s2, 0.0))
    return PrimalModel(mu=mu, w=v * scales, sigma2=s2, q=q, eigenvalues=lam, v=v)


def _check_phi(m, phi):
    phi = np.asarray(phi, dtype=float).ravel()
    if phi.size != m.d:
        raise DimensionMismatch(f"feature vector has length {phi.size}, model expects {m.d}")
    return phi


def latent_posterior(m: PrimalModel, phi) -> GaussianSpec:
    """Posterior of the latent code given a feature vector.

    Mean (w^T w + sigma2 I)^-1 w^T (phi - mu), covariance sigma2 times that
    same inverse. Needs sigma2 > 0; at sigma2 == 0 the posterior collapses
    and latent_map is the right tool.
    """
    if m.sigma2 <= 0.0:
        raise SigmaZero("posterior is degenerate at sigma2 == 0; use latent_map")
    phi = _check_phi(m, phi)
    g = m.w.T @ m.w + m.sigma2 * np.eye(m.q)
    mean = np.linalg.solve(g, m.w.T @ (phi - m.mu))
    vals, vecs = np.linalg.eigh(g)
    factor = np.sqrt(m.sigma2) * (vecs / np.sqrt(vals)) @ vecs.T
    return GaussianSpec(mean=mean, cov_factor=factor, dim=m.q)


def latent_map(m: PrimalModel, phi) -> np.ndarray:
    """MAP latent code for a feature vector; the posterior mean when
    sigma2 > 0 and the pseudo-inverse projection in the noiseless limit."""
    phi = _check_phi(m, phi)
    resid = phi - m.mu
    if m.sigma2 > 0.0:
        g = m.w.T @ m.w + m.sigma2 * np.eye(m.q)
        return np.linalg.solve(g, m.w.T @ resid)
    s = m.singular_values()
    cutoff = 1e-10 * (s[0] if s.size else 0.0)
    coords = m.v.T @ resid
    out = np.zeros(m.q)
    keep = s > cutoff
    out[keep] = coords[keep] / s[keep]
    return out


def feature_reconstruct(m: PrimalModel, h) -> np.ndarray:
    """Map a latent code back to feature space: w h + mu."""
    h = np.asarray(h, dtype=float).ravel()
    if h.size != m.q:
        raise DimensionMismatch(f"latent vector has length {h.size}, model expects {m.q}")
    return m.w @ h + m.mu


def marginal_loglik(m: PrimalModel, x) -> float:
    """Total log-likelihood of the columns of x under the marginal
    N(mu, w w^T + sigma2 I).

    Evaluated through the spectrum of w w^T (loadings contribute
    s_p^2 + sigma2, the remaining d - q directions contribute sigma2), so no
    dense d x d inverse is ever formed.
    """
    if m.sigma2 <= 0.0:
        raise SigmaZero("marginal density is degenerate at sigma2 == 0")
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] != m.d:
        raise DimensionMismatch(f"expected a {m.d} x M matrix, got shape {x.shape}")
    resid = x - m.mu[:, None]
    coords = m.v.T @ resid
    s2 = np.sum(m.w**2, axis=0)
    denom = s2 + m.sigma2
    quad = np.sum(coords**2 / denom[:, None], axis=0)
    quad += (np.sum(resid**2, axis=0) - np.sum(coords**2, axis=0)) / m.sigma2
    logdet = float(np.sum(np.log(denom)) + (m.d - m.q) * np.log(m.sigma2))
    per_sample = -0.5 * (m.d * _LOG_2PI + logdet + quad)
    return float(per_sample.sum())


def sample_feature(m: PrimalModel, rng, count: int) -> np.ndarray:
    """Draw `count` i.i.d. feature vectors mu + w z + sigma zeta as columns.

    rng may be a seed or a numpy Generator; the caller owns the stream.
    """
    gen = np.random.default_rng(rng)
    z = gen.standard_normal((m.q, count))
    noise = gen.standard_normal((m.d, count))
    return m.mu[:, None] + m.w @ z + np.sqrt(m.sigma2) * noise

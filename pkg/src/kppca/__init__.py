"""Probabilistic principal component analysis, primal and dual.

The primal side trains on the explicit feature covariance; the dual side
trains on the centered kernel matrix, projects and reconstructs in kernel
space, generates new kernel representations, and maps them back to inputs
with a kernel smoother.
"""

from ._version import __version__
from .dual import (
    DualModel,
    Generated,
    KernelSample,
    Observed,
    Reconstructed,
    build_sampler,
    dual_conditional_kernel,
    dual_latent_map,
    dual_latent_posterior,
    dual_marginal_loglik,
    dual_reconstruct,
    dual_sample,
    explained_variance,
    fit_dual,
    kernel_sample,
    kernel_samples,
    kpca_limit,
    samples_from_noise,
)
from .io_datasets import (
    DatasetHandle,
    RunMetadata,
    load_csv,
    load_dataset,
    load_mnist_idx,
    load_model,
    make_rng,
    save_csv,
    save_model,
    write_metadata,
)
from .kernels import (
    KernelSpec,
    TrainingSet,
    centered_kernel_vector,
    centered_kernel_vectors,
    gram,
    kernel_eval,
    kernel_vector,
)
from .preimage import PreimageConfig, kernel_smoother
from .primal import (
    GaussianSpec,
    PrimalModel,
    feature_reconstruct,
    fit_primal,
    latent_map,
    latent_posterior,
    marginal_loglik,
    sample_feature,
    sigma2_ml,
)
from .spectral import (
    EigenDecomposition,
    SymMatrix,
    center_columns,
    center_gram,
    psd_sqrt_factor,
    sym_eig,
)
from .toy import two_arcs

__all__ = [
    "DatasetHandle",
    "DualModel",
    "EigenDecomposition",
    "GaussianSpec",
    "Generated",
    "KernelSample",
    "KernelSpec",
    "Observed",
    "PreimageConfig",
    "PrimalModel",
    "Reconstructed",
    "RunMetadata",
    "SymMatrix",
    "TrainingSet",
    "build_sampler",
    "center_columns",
    "center_gram",
    "centered_kernel_vector",
    "centered_kernel_vectors",
    "dual_conditional_kernel",
    "dual_latent_map",
    "dual_latent_posterior",
    "dual_marginal_loglik",
    "dual_reconstruct",
    "dual_sample",
    "explained_variance",
    "feature_reconstruct",
    "fit_dual",
    "fit_primal",
    "gram",
    "kernel_eval",
    "kernel_sample",
    "kernel_samples",
    "kernel_smoother",
    "kernel_vector",
    "kpca_limit",
    "latent_map",
    "latent_posterior",
    "load_csv",
    "load_dataset",
    "load_mnist_idx",
    "load_model",
    "make_rng",
    "marginal_loglik",
    "psd_sqrt_factor",
    "sample_feature",
    "samples_from_noise",
    "save_csv",
    "save_model",
    "sigma2_ml",
    "sym_eig",
    "two_arcs",
    "write_metadata",
]

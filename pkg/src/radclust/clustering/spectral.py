"""Spectral clustering on the symmetric normalized Laplacian.

Similarity is a Gaussian RBF kernel with zero diagonal; the embedding is
the k eigenvectors of the smallest Laplacian eigenvalues (equivalently the
k largest of the normalized affinity), row-normalized, then clustered with
seeded k-means.
"""

import numpy as np

from ..errors import ConfigError
from ..features import as_rows
from ..numerics import SymMatrix, mix_seed, pairwise_distances, sym_eigen
from .base import ClusterConfig, ClusterResult
from .kmeans import kmeans

_EMBED_SALT = 0x53504543


def median_offdiagonal(dist):
    """Median of the strict upper-triangle entries of a distance matrix."""
    n = dist.shape[0]
    if n < 2:
        return 0.0
    return float(np.median(dist[np.triu_indices(n, k=1)]))


def spectral(x, cfg: ClusterConfig) -> ClusterResult:
    """Cluster via the spectral embedding of the RBF similarity graph.

    ``cfg.rbf_sigma`` defaults to the median pairwise distance. Points whose
    degree underflows to zero are embedded at the origin and listed in
    ``diagnostics["isolated_points"]``. Dense eigensolve only: n is capped
    at ``cfg.spectral_cap``.
    """
    rows = as_rows(x)
    n = rows.shape[0]
    cfg.validate_for(n)
    if n > cfg.spectral_cap:
        raise ConfigError(
            f"spectral clustering is dense-only and capped at n={cfg.spectral_cap}, got {n}"
        )
    dist = pairwise_distances(rows).values
    sigma = cfg.rbf_sigma if cfg.rbf_sigma is not None else median_offdiagonal(dist)
    if sigma <= 0.0:
        sigma = 1.0
    w = np.exp(-(dist * dist) / (2.0 * sigma * sigma))
    np.fill_diagonal(w, 0.0)
    degrees = w.sum(axis=1)
    isolated = np.flatnonzero(degrees <= 0.0)
    inv_sqrt = np.where(degrees > 0.0, 1.0 / np.sqrt(np.where(degrees > 0.0, degrees, 1.0)), 0.0)
    laplacian = np.eye(n) - w * inv_sqrt[:, None] * inv_sqrt[None, :]
    eigenvalues, eigenvectors = sym_eigen(SymMatrix(laplacian))
    embedding = eigenvectors[:, :cfg.k].copy()
    norms = np.sqrt((embedding * embedding).sum(axis=1))
    embedding /= np.where(norms > 0.0, norms, 1.0)[:, None]
    inner_cfg = ClusterConfig(
        k=cfg.k,
        seed=mix_seed(cfg.seed, _EMBED_SALT),
        max_iters=cfg.max_iters,
        tol=cfg.tol,
        init="kmeans++",
        restarts=5,
    )
    inner = kmeans(embedding, inner_cfg)
    return ClusterResult(
        labels=inner.labels,
        centroids=None,
        objective_trace=inner.objective_trace,
        iterations=inner.iterations,
        converged=inner.converged,
        diagnostics={
            "sigma": sigma,
            "isolated_points": isolated.tolist(),
            "laplacian_min_eigenvalue": float(eigenvalues[0]),
        },
    )

"""Deterministic random streams and dense symmetric linear algebra.

Everything downstream (k-means seeding, mini-batch sampling, mixture
initialization, spectral embeddings) rests on the two primitives here: a
counter-based 64-bit random stream that produces the same sequence on every
platform, and a cyclic Jacobi eigensolver for dense symmetric matrices.
All floating arithmetic is 64-bit.
"""

import math

import numpy as np

from .errors import NonConvergenceError, NotPositiveDefiniteError, ShapeError

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_U53 = 2.0 ** -53


def _mix64(z):
    """Bijective finalizing scramble of a 64-bit counter value."""
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


def mix_seed(*parts):
    """Fold integer components into one well-mixed 64-bit seed.

    Pure function of its arguments; used to hand independent child seeds to
    the cells of a sweep so parallel and serial execution agree.
    """
    acc = 0x8A5CD789635D2DFF
    for p in parts:
        acc = _mix64((acc + (int(p) & _MASK64) + _GAMMA) & _MASK64)
    return acc


class RngStream:
    """Deterministic 64-bit random stream (single-owner, mutable).

    The state is a plain counter advanced by a fixed odd increment, and each
    output is a finalizing mix of the counter, so the k-th draw depends only
    on (seed, k). Bulk generation (:meth:`uniforms`, :meth:`gaussians`) is
    therefore bit-identical to repeated scalar draws of the same kind.

    Uniform draws lie in [0, 1). Gaussian draws use the Box-Muller transform
    (cosine branch, two uniforms per value) and are always finite. A stream
    must never be shared across threads; derive independent child streams
    with :meth:`spawn`.
    """

    def __init__(self, seed):
        self.seed = int(seed) & _MASK64
        self._state = self.seed

    def next_u64(self):
        """Next raw 64-bit draw as a Python int."""
        self._state = (self._state + _GAMMA) & _MASK64
        return _mix64(self._state)

    def u64s(self, count):
        """Next ``count`` raw draws as a uint64 array (vectorized)."""
        state = np.uint64(self._state)
        z = state + np.arange(1, count + 1, dtype=np.uint64) * np.uint64(_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        z = z ^ (z >> np.uint64(31))
        self._state = (self._state + count * _GAMMA) & _MASK64
        return z

    def next_uniform(self):
        """Uniform double in [0, 1) built from the top 53 bits of a draw."""
        return (self.next_u64() >> 11) * _U53

    def uniforms(self, count):
        """Array of ``count`` uniforms in [0, 1)."""
        return np.asarray(self.u64s(count) >> np.uint64(11), dtype=np.float64) * _U53

    def next_gaussian(self):
        """Standard normal draw (mean 0, variance 1)."""
        return float(self.gaussians(1)[0])

    def gaussians(self, count):
        """Array of ``count`` standard normal draws.

        Consumes exactly two raw draws per value; the first uniform is mapped
        into (0, 1] so the logarithm stays finite.
        """
        u = self.u64s(2 * count)
        u1 = (np.asarray(u[0::2] >> np.uint64(11), dtype=np.float64) + 1.0) * _U53
        u2 = np.asarray(u[1::2] >> np.uint64(11), dtype=np.float64) * _U53
        return np.sqrt(-2.0 * np.log(u1)) * np.cos((2.0 * math.pi) * u2)

    def next_below(self, bound):
        """Uniform integer in [0, bound), rejection-sampled (no modulo bias)."""
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % bound

    def shuffle(self, items):
        """In-place Fisher-Yates shuffle of a list or 1-D array; returns it."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_below(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def spawn(self):
        """Independent child stream seeded from the next draw of this one."""
        return RngStream(self.next_u64())


class SymMatrix:
    """Dense symmetric matrix of 64-bit floats.

    The constructor symmetrizes its input by averaging with the transpose,
    so ``values[i, j] == values[j, i]`` holds exactly afterwards.
    """

    __slots__ = ("values",)

    def __init__(self, values):
        a = np.array(values, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ShapeError(f"symmetric matrix must be square, got shape {a.shape}")
        if a.shape[0] < 1:
            raise ShapeError("symmetric matrix must have dimension >= 1")
        self.values = (a + a.T) / 2.0

    @property
    def n(self):
        return self.values.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.values
        return self.values.astype(dtype)

    def __repr__(self):
        return f"SymMatrix(n={self.n})"


def _sym_values(m):
    """Working copy of the symmetric content of ``m`` (SymMatrix or array)."""
    if isinstance(m, SymMatrix):
        return m.values.copy()
    return SymMatrix(m).values


def sym_eigen(m, max_sweeps=100):
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi.

    Parameters
    ----------
    m : SymMatrix or (n, n) array_like
        Matrix to decompose; treated as symmetric (averaged if it is not).
    max_sweeps : int
        Cap on full rotation sweeps before giving up.

    Returns
    -------
    w : (n,) ndarray
        Eigenvalues in ascending order.
    v : (n, n) ndarray
        Orthonormal eigenvectors, one per column, aligned with ``w``.

    Raises
    ------
    NonConvergenceError
        If the off-diagonal mass has not vanished after ``max_sweeps``
        sweeps; the error carries the remaining off-diagonal norm.
    """
    a = _sym_values(m)
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), v

    scale = max(1.0, float(np.max(np.abs(a))))
    # Roundoff floor for the summed off-diagonal magnitude; far below the
    # 1e-8 residual contract.
    stop = n * n * 2.3e-16 * scale

    sweep = 0
    while True:
        off = float(np.sum(np.abs(a)) - np.sum(np.abs(np.diag(a))))
        if off <= stop:
            break
        if sweep >= max_sweeps:
            raise NonConvergenceError(
                f"Jacobi eigensolver did not converge in {max_sweeps} sweeps "
                f"(off-diagonal norm {off:.3e})",
                residual=off,
            )
        thresh = 0.2 * off / (n * n) if sweep < 3 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = 100.0 * abs(apq)
                # Once rotations are tiny relative to the diagonal, flush the
                # element to zero instead of rotating forever.
                if sweep > 3 and abs(a[p, p]) + g == abs(a[p, p]) \
                        and abs(a[q, q]) + g == abs(a[q, q]):
                    a[p, q] = a[q, p] = 0.0
                    continue
                if abs(apq) <= thresh:
                    continue
                h = a[q, q] - a[p, p]
                if abs(h) + g == abs(h):
                    t = apq / h
                else:
                    theta = 0.5 * h / apq
                    t = 1.0 / (abs(theta) + math.sqrt(1.0 + theta * theta))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                app, aqq = a[p, p], a[q, q]
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp - s * colq
                a[:, q] = s * colp + c * colq
                a[p, :] = a[:, p]
                a[q, :] = a[:, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        sweep += 1

    w = a.diagonal().copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def cholesky(m):
    """Lower-triangular Cholesky factor L with L @ L.T == m.

    Raises
    ------
    NotPositiveDefiniteError
        When a pivot is not strictly positive; carries the pivot index so
        callers can regularize and retry.
    """
    a = _sym_values(m)
    n = a.shape[0]
    L = np.zeros_like(a)
    for j in range(n):
        row = L[j, :j]
        d = a[j, j] - row @ row
        if not (d > 0.0) or not math.isfinite(d):
            raise NotPositiveDefiniteError(
                f"matrix is not positive definite at pivot {j}", pivot=j
            )
        ljj = math.sqrt(d)
        L[j, j] = ljj
        if j + 1 < n:
            L[j + 1:, j] = (a[j + 1:, j] - L[j + 1:, :j] @ row) / ljj
    return L


def pairwise_distances(x):
    """Euclidean distance matrix between the rows of ``x``.

    Accepts a plain (n, d) array or anything with a ``rows`` attribute.
    Returns a :class:`SymMatrix` with an exactly zero diagonal.
    """
    rows = np.asarray(getattr(x, "rows", x), dtype=np.float64)
    if rows.ndim != 2:
        raise ShapeError(f"expected a 2-D sample matrix, got shape {rows.shape}")
    g = rows @ rows.T
    sq = np.diag(g).copy()
    d2 = sq[:, None] + sq[None, :] - 2.0 * g
    np.maximum(d2, 0.0, out=d2)
    d = np.sqrt(d2)
    np.fill_diagonal(d, 0.0)
    return SymMatrix(d)

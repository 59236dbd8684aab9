"""The shared sample container: an (n, d) matrix of per-image embeddings."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, ShapeError


@dataclass(eq=False)
class FeatureMatrix:
    """Rows of 64-bit features with one string id per row.

    Values must be finite and ids unique; both dimensions must be >= 1.
    """

    rows: np.ndarray
    ids: list = field(default_factory=list)

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 1:
            raise ShapeError(f"feature matrix must be (n>=1, d>=1), got shape {rows.shape}")
        if not np.all(np.isfinite(rows)):
            raise ShapeError("feature matrix must be finite")
        if not self.ids:
            self.ids = [f"row{i}" for i in range(rows.shape[0])]
        self.ids = [str(i) for i in self.ids]
        if len(self.ids) != rows.shape[0]:
            raise ShapeError(
                f"got {len(self.ids)} ids for {rows.shape[0]} rows"
            )
        if len(set(self.ids)) != len(self.ids):
            seen = set()
            dup = next(i for i in self.ids if i in seen or seen.add(i))
            raise DataError(f"duplicate feature id {dup!r}")
        self.rows = rows

    @property
    def n(self):
        return self.rows.shape[0]

    @property
    def d(self):
        return self.rows.shape[1]


def as_rows(x):
    """Coerce a FeatureMatrix or array-like into a float64 (n, d) array."""
    rows = np.asarray(getattr(x, "rows", x), dtype=np.float64)
    if rows.ndim != 2:
        raise ShapeError(f"expected a 2-D sample matrix, got shape {rows.shape}")
    return rows

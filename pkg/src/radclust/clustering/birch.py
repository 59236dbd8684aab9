"""BIRCH: a clustering-feature tree followed by k-means on the leaf entries.

Each leaf entry is the additive triple (count, linear sum, square sum); a
point is absorbed by the closest leaf entry when the merged entry's radius
sqrt(SS/N - ||LS/N||^2) stays within the threshold, and otherwise opens a
new entry. Nodes that outgrow the branching factor split around their
farthest pair. The global phase runs seeded k-means on the leaf-entry
centroids and maps every point to its entry's cluster.
"""

from dataclasses import dataclass, field

import numpy as np

from ..features import as_rows
from ..numerics import RngStream, mix_seed, pairwise_distances
from .base import ClusterConfig, ClusterResult
from .kmeans import kmeans

_THRESHOLD_SALT = 0x42495243
_GLOBAL_SALT = 0x474C4F42


@dataclass(eq=False)
class CfEntry:
    """Additive cluster summary: point count, linear sum, squared-norm sum."""

    count: int
    linear_sum: np.ndarray
    square_sum: float
    point_ids: list = field(default_factory=list)

    @classmethod
    def from_point(cls, point, pid):
        point = np.asarray(point, dtype=np.float64)
        return cls(
            count=1,
            linear_sum=point.copy(),
            square_sum=float(point @ point),
            point_ids=[pid],
        )

    @property
    def centroid(self):
        return self.linear_sum / self.count

    @property
    def radius(self):
        return _radius(self.count, self.linear_sum, self.square_sum)

    def merged_with(self, other):
        """Componentwise sum of two entries (CF additivity)."""
        return CfEntry(
            count=self.count + other.count,
            linear_sum=self.linear_sum + other.linear_sum,
            square_sum=self.square_sum + other.square_sum,
            point_ids=self.point_ids + other.point_ids,
        )

    def absorb(self, point, pid):
        point = np.asarray(point, dtype=np.float64)
        self.count += 1
        self.linear_sum = self.linear_sum + point
        self.square_sum += float(point @ point)
        self.point_ids.append(pid)

    def radius_if_absorbed(self, point):
        point = np.asarray(point, dtype=np.float64)
        return _radius(
            self.count + 1,
            self.linear_sum + point,
            self.square_sum + float(point @ point),
        )


def _radius(count, linear_sum, square_sum):
    centroid = linear_sum / count
    arg = square_sum / count - float(centroid @ centroid)
    # float cancellation can push the argument a hair negative; clamp at 0
    if arg < 0.0:
        arg = 0.0
    return float(np.sqrt(arg))


@dataclass(eq=False)
class CfTreeStats:
    """Tree shape summary reported with BIRCH results."""

    node_count: int
    leaf_entry_count: int
    threshold: float


class _Node:
    __slots__ = ("leaf", "entries", "children")

    def __init__(self, leaf):
        self.leaf = leaf
        self.entries = []
        self.children = []

    @property
    def centroid(self):
        total = sum(it.count for it in (self.entries if self.leaf else self.children))
        linear = sum(
            (it.linear_sum for it in (self.entries if self.leaf else self.children)),
            start=0.0,
        )
        return linear / total

    @property
    def count(self):
        return sum(it.count for it in (self.entries if self.leaf else self.children))

    @property
    def linear_sum(self):
        items = self.entries if self.leaf else self.children
        return sum((it.linear_sum for it in items), start=np.zeros_like(items[0].linear_sum))


def _nearest(items, point):
    centroids = np.array([it.centroid for it in items])
    d2 = ((centroids - point) ** 2).sum(axis=1)
    return int(np.argmin(d2))


def _split(items):
    """Two groups seeded by the farthest centroid pair; others join the nearer seed."""
    centroids = np.array([it.centroid for it in items])
    dist = pairwise_distances(centroids).values
    a, b = divmod(int(np.argmax(dist)), len(items))
    if a > b:
        a, b = b, a
    if a == b:  # all centroids coincide; any two-way split works
        a, b = 0, 1
    group_a, group_b = [items[a]], [items[b]]
    for i, it in enumerate(items):
        if i in (a, b):
            continue
        da = float(((centroids[i] - centroids[a]) ** 2).sum())
        db = float(((centroids[i] - centroids[b]) ** 2).sum())
        (group_a if da <= db else group_b).append(it)
    return group_a, group_b


def _insert(node, point, pid, threshold, branching):
    """Insert a point; returns a new sibling node if this node split."""
    if node.leaf:
        if not node.entries:
            node.entries.append(CfEntry.from_point(point, pid))
            return None
        nearest = _nearest(node.entries, point)
        entry = node.entries[nearest]
        if entry.radius_if_absorbed(point) <= threshold:
            entry.absorb(point, pid)
            return None
        node.entries.append(CfEntry.from_point(point, pid))
        if len(node.entries) > branching:
            group_a, group_b = _split(node.entries)
            node.entries = group_a
            sibling = _Node(leaf=True)
            sibling.entries = group_b
            return sibling
        return None

    child = node.children[_nearest(node.children, point)]
    sibling = _insert(child, point, pid, threshold, branching)
    if sibling is not None:
        node.children.append(sibling)
        if len(node.children) > branching:
            group_a, group_b = _split(node.children)
            node.children = group_a
            new_node = _Node(leaf=False)
            new_node.children = group_b
            return new_node
    return None


def _collect_leaves(node, out):
    if node.leaf:
        out.append(node)
    else:
        for child in node.children:
            _collect_leaves(child, out)


def _count_nodes(node):
    if node.leaf:
        return 1
    return 1 + sum(_count_nodes(c) for c in node.children)


def default_threshold(rows, seed):
    """Median nearest-neighbor distance of a seeded subsample (up to 256 rows).

    A local-spacing scale: large enough to absorb near-duplicates, small
    enough that a populous entry cannot swallow points from a distant
    cluster through radius dilution.
    """
    n = rows.shape[0]
    if n < 2:
        return 1.0
    if n > 256:
        stream = RngStream(mix_seed(seed, _THRESHOLD_SALT))
        idx = np.array(stream.shuffle(list(range(n)))[:256])
        sample = rows[idx]
    else:
        sample = rows
    dist = pairwise_distances(sample).values.copy()
    np.fill_diagonal(dist, np.inf)
    nn = dist.min(axis=1)
    threshold = float(np.median(nn))
    return threshold if threshold > 0.0 else 1e-12


def birch(x, cfg: ClusterConfig) -> ClusterResult:
    """Build the CF tree, cluster its leaf-entry centroids, map points back.

    When the tree compresses below ``cfg.k`` entries the global phase runs
    with one cluster per entry instead.
    """
    rows = as_rows(x)
    n = rows.shape[0]
    cfg.validate_for(n)
    threshold = (
        cfg.birch_threshold
        if cfg.birch_threshold is not None
        else default_threshold(rows, cfg.seed)
    )

    root = _Node(leaf=True)
    for i in range(n):
        sibling = _insert(root, rows[i], i, threshold, cfg.birch_branching)
        if sibling is not None:
            new_root = _Node(leaf=False)
            new_root.children = [root, sibling]
            root = new_root

    leaves = []
    _collect_leaves(root, leaves)
    entries = [e for leaf in leaves for e in leaf.entries]
    centroids = np.array([e.centroid for e in entries])

    k_eff = min(cfg.k, len(entries))
    inner_cfg = ClusterConfig(
        k=k_eff,
        seed=mix_seed(cfg.seed, _GLOBAL_SALT),
        max_iters=cfg.max_iters,
        tol=cfg.tol,
        init="kmeans++",
        restarts=5,
    )
    inner = kmeans(centroids, inner_cfg)

    labels = np.empty(n, dtype=np.intp)
    for entry, cluster in zip(entries, inner.labels):
        labels[entry.point_ids] = cluster

    stats = CfTreeStats(
        node_count=_count_nodes(root),
        leaf_entry_count=len(entries),
        threshold=threshold,
    )
    return ClusterResult(
        labels=labels,
        centroids=inner.centroids,
        objective_trace=inner.objective_trace,
        iterations=inner.iterations,
        converged=inner.converged,
        model=stats,
        diagnostics={"threshold": threshold, "leaf_entries": len(entries)},
    )

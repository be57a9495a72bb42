"""Seeded generators for the three synthetic benchmark datasets.

``gaussians``: isotropic class blobs whose spread shrinks linearly over time,
so every trajectory contracts toward its class center.

``walk``: three clusters that approach a common midpoint, intermingle while
crossing it near the middle timestep, and drift apart again.

``sorts``: eight sorting algorithms each sort several random arrays; an
observation is one (algorithm, array) run and its feature vector is the
partially sorted array, snapshotted at evenly spaced fractions of the run's
total number of array mutations.
"""

from __future__ import annotations

import numpy as np

from .dataset import DynamicDataset


def gen_gaussians(
    seed: int,
    num_classes: int = 10,
    per_class: int = 30,
    n: int = 100,
    T: int = 10,
) -> DynamicDataset:
    """Gaussian blobs with spread decreasing linearly from 1.0 to 0.1.

    Class centers are drawn once, uniformly in [-1, 1]^n. At each timestep a
    point is redrawn around its center with the current spread, using the
    point's own stream of draws (offsets indexed point-major), so identity
    persists and every trajectory contracts toward its class center.
    """
    if min(num_classes, per_class, n, T) < 1:
        raise ValueError("all size parameters must be positive")
    rng = np.random.default_rng(seed)
    centers = rng.uniform(-1.0, 1.0, size=(num_classes, n))
    labels = np.repeat(np.arange(num_classes), per_class)
    # (N, T, n): row i is point i's private stream of per-timestep draws
    offsets = rng.standard_normal(size=(num_classes * per_class, T, n))
    spreads = np.linspace(1.0, 0.1, T)
    revisions = tuple(
        centers[labels] + spreads[t] * offsets[:, t, :] for t in range(T)
    )
    return DynamicDataset(
        name="gaussians",
        revisions=revisions,
        labels=labels,
        class_names=tuple(f"blob_{c}" for c in range(num_classes)),
    )


def gen_walk(
    seed: int,
    num_classes: int = 3,
    per_class: int = 100,
    n: int = 100,
    T: int = 12,
    noise: float = 0.2,
) -> DynamicDataset:
    """Clusters that move linearly through their common midpoint.

    Cluster centers start mutually distant, travel straight toward the
    midpoint of the start positions, pass through it near T/2, and continue
    outward to the mirrored positions. Per-point noise is drawn once and held
    constant over time.
    """
    if min(num_classes, per_class, n, T) < 1:
        raise ValueError("all size parameters must be positive")
    if T < 2:
        raise ValueError("need at least 2 timesteps")
    rng = np.random.default_rng(seed)
    start = rng.uniform(-1.0, 1.0, size=(num_classes, n))
    midpoint = start.mean(axis=0)
    labels = np.repeat(np.arange(num_classes), per_class)
    offsets = noise * rng.standard_normal(size=(num_classes * per_class, n))
    revisions = []
    for t in range(T):
        alpha = 1.0 - 2.0 * t / (T - 1)
        centers_t = midpoint + alpha * (start - midpoint)
        revisions.append(centers_t[labels] + offsets)
    return DynamicDataset(
        name="walk",
        revisions=tuple(revisions),
        labels=labels,
        class_names=tuple(f"cluster_{c}" for c in range(num_classes)),
    )


# ---------------------------------------------------------------------------
# sorts
# ---------------------------------------------------------------------------


class _TrackedArray:
    """List wrapper that counts completed mutations (a swap counts as one)
    and optionally snapshots the array at chosen mutation counts."""

    def __init__(self, values, snapshot_at=None):
        self.values = list(values)
        self.ops = 0
        self._targets = sorted(snapshot_at) if snapshot_at else []
        self._next = 0
        self.snapshots = {}
        self._capture()

    def _capture(self):
        while self._next < len(self._targets) and self._targets[self._next] <= self.ops:
            self.snapshots.setdefault(self._targets[self._next], list(self.values))
            self._next += 1

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def swap(self, i, j):
        v = self.values
        v[i], v[j] = v[j], v[i]
        self.ops += 1
        self._capture()

    def put(self, i, value):
        self.values[i] = value
        self.ops += 1
        self._capture()

    def finish(self):
        # serve any trailing targets equal to the final op count
        self._capture()


def _bubble_sort(a: _TrackedArray):
    n = len(a)
    for end in range(n - 1, 0, -1):
        swapped = False
        for j in range(end):
            if a[j] > a[j + 1]:
                a.swap(j, j + 1)
                swapped = True
        if not swapped:
            break


def _insertion_sort(a: _TrackedArray):
    # exchange variant: every swap removes exactly one inversion
    for i in range(1, len(a)):
        j = i
        while j > 0 and a[j - 1] > a[j]:
            a.swap(j - 1, j)
            j -= 1


def _selection_sort(a: _TrackedArray):
    n = len(a)
    for i in range(n - 1):
        m = i
        for j in range(i + 1, n):
            if a[j] < a[m]:
                m = j
        if m != i:
            a.swap(i, m)


def _shell_sort(a: _TrackedArray):
    n = len(a)
    gap = n // 2
    while gap > 0:
        for i in range(gap, n):
            j = i
            while j >= gap and a[j - gap] > a[j]:
                a.swap(j - gap, j)
                j -= gap
        gap //= 2


def _comb_sort(a: _TrackedArray):
    n = len(a)
    gap = n
    swapped = True
    while gap > 1 or swapped:
        gap = max(1, int(gap / 1.3))
        swapped = False
        for j in range(n - gap):
            if a[j] > a[j + gap]:
                a.swap(j, j + gap)
                swapped = True


def _quick_sort(a: _TrackedArray):
    def partition(lo, hi):
        pivot = a[(lo + hi) // 2]
        i, j = lo, hi
        while True:
            while a[i] < pivot:
                i += 1
            while a[j] > pivot:
                j -= 1
            if i >= j:
                return j
            a.swap(i, j)
            i += 1
            j -= 1

    def rec(lo, hi):
        if lo < hi:
            p = partition(lo, hi)
            rec(lo, p)
            rec(p + 1, hi)

    rec(0, len(a) - 1)


def _merge_sort(a: _TrackedArray):
    def rec(lo, hi):
        if hi - lo <= 1:
            return
        mid = (lo + hi) // 2
        rec(lo, mid)
        rec(mid, hi)
        merged = []
        i, j = lo, mid
        while i < mid and j < hi:
            if a[j] < a[i]:
                merged.append(a[j])
                j += 1
            else:
                merged.append(a[i])
                i += 1
        merged.extend(a[k] for k in range(i, mid))
        merged.extend(a[k] for k in range(j, hi))
        for off, value in enumerate(merged):
            a.put(lo + off, value)

    rec(0, len(a))


def _heap_sort(a: _TrackedArray):
    n = len(a)

    def sift(root, end):
        while True:
            child = 2 * root + 1
            if child > end:
                return
            if child + 1 <= end and a[child] < a[child + 1]:
                child += 1
            if a[root] < a[child]:
                a.swap(root, child)
                root = child
            else:
                return

    for start in range(n // 2 - 1, -1, -1):
        sift(start, n - 1)
    for end in range(n - 1, 0, -1):
        a.swap(0, end)
        sift(0, end - 1)


SORT_ALGORITHMS = (
    ("bubble", _bubble_sort),
    ("insertion", _insertion_sort),
    ("selection", _selection_sort),
    ("shell", _shell_sort),
    ("comb", _comb_sort),
    ("quick", _quick_sort),
    ("merge", _merge_sort),
    ("heap", _heap_sort),
)


def sort_snapshots(name: str, values: np.ndarray, T: int) -> np.ndarray:
    """Run one sorting algorithm and snapshot the array at T evenly spaced
    fractions of its total mutation count.

    The first snapshot is the initial array, the last the fully sorted one.
    Runs shorter than T mutations repeat states.
    """
    algorithms = dict(SORT_ALGORITHMS)
    if name not in algorithms:
        raise ValueError(f"unknown sorting algorithm {name!r}")
    sorter = algorithms[name]

    probe = _TrackedArray(values)
    sorter(probe)
    total_ops = probe.ops

    targets = [int(np.floor(total_ops * f / (T - 1) + 0.5)) for f in range(T)] if T > 1 else [0]
    tracked = _TrackedArray(values, snapshot_at=targets)
    sorter(tracked)
    tracked.finish()
    return np.array([tracked.snapshots[t] for t in targets], dtype=np.float64)


def gen_sorts(
    seed: int,
    algorithms: int = 8,
    arrays_per_algorithm: int = 10,
    array_len: int = 100,
    T: int = 20,
) -> DynamicDataset:
    """Sorting-algorithm behavior dataset: one observation per (algorithm,
    array) run, feature vector = the partially sorted array.

    ``algorithms`` takes a prefix of the eight implemented algorithms; the
    default uses all of them.
    """
    if min(algorithms, arrays_per_algorithm, array_len, T) < 1:
        raise ValueError("all size parameters must be positive")
    if algorithms > len(SORT_ALGORITHMS):
        raise ValueError(f"at most {len(SORT_ALGORITHMS)} algorithms available")
    chosen = SORT_ALGORITHMS[:algorithms]
    rng = np.random.default_rng(seed)
    runs = []
    labels = []
    for algo_index, (name, _) in enumerate(chosen):
        for _ in range(arrays_per_algorithm):
            base = rng.random(array_len)
            runs.append(sort_snapshots(name, base, T))
            labels.append(algo_index)
    stacked = np.stack(runs)  # (N, T, n)
    revisions = tuple(stacked[:, t, :].copy() for t in range(T))
    return DynamicDataset(
        name="sorts",
        revisions=revisions,
        labels=np.array(labels, dtype=np.int64),
        class_names=tuple(name for name, _ in chosen),
    )


GENERATORS = {
    "gaussians": gen_gaussians,
    "walk": gen_walk,
    "sorts": gen_sorts,
}

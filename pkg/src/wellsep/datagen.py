"""Synthetic well-separated 2-D clusters on a (possibly displaced) grid."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .core import UsageError, as_points
from .separation import min_gap_threshold

NOISE = -1


@dataclass(frozen=True)
class GenConfig:
    grid_rows: int = 5
    grid_cols: int = 5
    cluster_size: int = 40
    radius: float = 1.0
    noise_pct: float = 0.0
    displacement_max: float = 0.0  # in units of radius
    rng_seed: int = 0

    def __post_init__(self):
        if self.grid_rows < 1 or self.grid_cols < 1:
            raise UsageError("grid dimensions must be positive")
        if self.cluster_size < 1:
            raise UsageError("cluster_size must be positive")
        if not self.radius > 0:
            raise UsageError("radius must be positive")
        if self.noise_pct < 0 or self.displacement_max < 0:
            raise UsageError("noise_pct and displacement_max must be non-negative")

    @property
    def k(self) -> int:
        return self.grid_rows * self.grid_cols

    @property
    def n_regular(self) -> int:
        return self.k * self.cluster_size

    @property
    def n_noise(self) -> int:
        # round half up
        return int(math.floor(self.noise_pct * self.n_regular / 100.0 + 0.5))

    def spacing(self) -> float:
        gap = min_gap_threshold(self.k, self.radius, 2) if self.k >= 2 else 0.0
        return 2.0 * self.radius * (1.0 + self.displacement_max) + gap

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class LabeledDataset:
    """Points with their intended cluster (``NOISE`` for noise points)."""

    points: np.ndarray
    labels: np.ndarray
    centers: np.ndarray
    config: GenConfig | None = None
    meta: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return int(self.centers.shape[0])

    @property
    def is_noise(self) -> np.ndarray:
        return self.labels == NOISE

    @property
    def regular(self) -> np.ndarray:
        return self.labels != NOISE

    def __len__(self) -> int:
        return int(self.points.shape[0])


def _random_directions(rng: np.random.Generator, n: int) -> np.ndarray:
    theta = rng.uniform(0.0, 2.0 * math.pi, size=n)
    return np.column_stack((np.cos(theta), np.sin(theta)))


def lattice(config: GenConfig) -> np.ndarray:
    """Undisplaced square-lattice positions, row-major."""
    s = config.spacing()
    rows, cols = np.meshgrid(np.arange(config.grid_rows), np.arange(config.grid_cols), indexing="ij")
    return np.column_stack((cols.ravel() * s, rows.ravel() * s)).astype(np.float64)


def grid_centers(config: GenConfig, rng: np.random.Generator | None = None) -> np.ndarray:
    """Lattice centers, each pushed by up to ``displacement_max * radius``."""
    centers = lattice(config)
    if config.displacement_max > 0:
        if rng is None:
            rng = np.random.default_rng(config.rng_seed)
        directions = _random_directions(rng, config.k)
        magnitude = rng.uniform(0.0, config.displacement_max * config.radius, size=config.k)
        centers = centers + directions * magnitude[:, None]
    return centers


def sample_cluster_point(center, radius: float, rng: np.random.Generator, size: int | None = None):
    """Uniform direction, distance uniform in ``[0, radius]``."""
    n = 1 if size is None else size
    r = rng.uniform(0.0, radius, size=n)
    pts = np.asarray(center, dtype=np.float64) + _random_directions(rng, n) * r[:, None]
    return pts[0] if size is None else pts


def sample_noise_point(center, radius: float, rng: np.random.Generator, size: int | None = None):
    """Uniform direction, distance ``max(0, radius + N(0, radius))``."""
    n = 1 if size is None else size
    directions = _random_directions(rng, n)
    r = np.maximum(0.0, radius + rng.normal(0.0, radius, size=n))
    pts = np.asarray(center, dtype=np.float64) + directions * r[:, None]
    return pts[0] if size is None else pts


def generate(config: GenConfig) -> LabeledDataset:
    rng = np.random.default_rng(config.rng_seed)
    centers = grid_centers(config, rng)
    n = config.cluster_size
    labels = np.repeat(np.arange(config.k), n)
    # one vectorised draw per cluster keeps the stream order independent of k
    regular = np.concatenate([sample_cluster_point(c, config.radius, rng, size=n) for c in centers])
    n_noise = config.n_noise
    if n_noise:
        origin = rng.integers(0, config.k, size=n_noise)
        noise = sample_noise_point(np.zeros(2), config.radius, rng, size=n_noise) + centers[origin]
        points = np.vstack((regular, noise))
        labels = np.concatenate((labels, np.full(n_noise, NOISE)))
    else:
        points = regular
    return LabeledDataset(points=points, labels=labels, centers=centers, config=config)


# --- persistence --------------------------------------------------------------

CSV_HEADER = ["point_id", "x", "y", "intended_cluster", "is_noise"]


def write_csv(ld: LabeledDataset, path) -> Path:
    """Write the dataset CSV plus a ``.json`` sidecar holding config and centers."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for i, ((x, y), lab) in enumerate(zip(ld.points.tolist(), ld.labels.tolist())):
            noise = lab == NOISE
            w.writerow([i, repr(x), repr(y), "" if noise else lab, int(noise)])
    meta = {
        "config": ld.config.to_dict() if ld.config else None,
        "intended_centers": ld.centers.tolist(),
    }
    sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True), encoding="utf-8")
    return path


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_suffix(".json")


def read_csv(path) -> LabeledDataset:
    path = Path(path)
    xs, labels = [], []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(CSV_HEADER) - set(reader.fieldnames or [])
        if missing:
            raise UsageError(f"{path}: missing columns {sorted(missing)}")
        for row in reader:
            xs.append((float(row["x"]), float(row["y"])))
            if row["is_noise"].strip() == "1" or row["intended_cluster"].strip() == "":
                labels.append(NOISE)
            else:
                labels.append(int(row["intended_cluster"]))
    points = as_points(xs) if xs else np.zeros((0, 2))
    labels = np.asarray(labels, dtype=np.int64)
    config = None
    side = sidecar_path(path)
    if side.exists():
        meta = json.loads(side.read_text(encoding="utf-8"))
        config = GenConfig(**meta["config"]) if meta.get("config") else None
        centers = np.asarray(meta["intended_centers"], dtype=np.float64).reshape(-1, 2)
    else:
        reg = labels != NOISE
        k = int(labels[reg].max()) + 1 if reg.any() else 0
        centers = np.array([points[labels == j].mean(axis=0) for j in range(k)]).reshape(-1, 2)
    return LabeledDataset(points=points, labels=labels, centers=centers, config=config)

"""Madelon-style synthetic dataset generation.

Datasets mix four kinds of columns: useful features drawn from Gaussian
clusters placed on hypercube vertices, redundant features that are exact
linear combinations of the useful ones, repeated features copied from the
first two groups, and useless pure-noise features. A fraction of labels is
flipped and columns may be shuffled. Eleven parameters control everything;
`sample_params` draws them uniformly from their allowed ranges.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core_data import Dataset, load_csv, save_csv

# (name, low, high) for the integer-valued generator parameters.
PARAM_RANGES = {
    "p2_useful": (4, 20),
    "p3_redundant": (0, 20),
    "p4_repeated": (0, 20),
    "p5_useless": (0, 20),
    "p6_samples_per_cluster": (10, 70),
    "p7_clusters_per_class": (2, 7),
    "p8_seed": (1, 1000),
    "p9_hypercube_factor": (2, 10),
}
# p10 lives on the grid 0.01, 0.02, ..., 0.10; stored in cents.
P10_CENTS_RANGE = (1, 10)

COLUMN_ROLES = ("useful", "redundant", "repeated", "useless")


@dataclass(frozen=True)
class SynthParams:
    """The 11 generator parameters. p1 (number of classes) is fixed at 2."""

    p2_useful: int
    p3_redundant: int
    p4_repeated: int
    p5_useless: int
    p6_samples_per_cluster: int
    p7_clusters_per_class: int
    p8_seed: int
    p9_hypercube_factor: int
    p10_flip_fraction: float
    p11_permute: int
    p1_classes: int = 2

    def __post_init__(self):
        if self.p1_classes != 2:
            raise ValueError("p1 is fixed at 2 classes")
        for name, (lo, hi) in PARAM_RANGES.items():
            v = getattr(self, name)
            if not lo <= v <= hi:
                raise ValueError(f"{name}={v} outside [{lo}, {hi}]")
        cents = round(self.p10_flip_fraction * 100)
        if not (
            P10_CENTS_RANGE[0] <= cents <= P10_CENTS_RANGE[1]
            and abs(self.p10_flip_fraction - cents / 100) < 1e-12
        ):
            raise ValueError(
                f"p10_flip_fraction={self.p10_flip_fraction} not on the 0.01..0.10 grid"
            )
        if self.p11_permute not in (0, 1):
            raise ValueError("p11_permute must be 0 or 1")

    @property
    def n_features(self) -> int:
        return self.p2_useful + self.p3_redundant + self.p4_repeated + self.p5_useless

    @property
    def n_samples(self) -> int:
        return 2 * self.p6_samples_per_cluster * self.p7_clusters_per_class

    @property
    def flip_count(self) -> int:
        # Nearest integer of p10 * S, computed in exact cent arithmetic
        # (half rounds up) so tests can re-derive the count bit-exactly.
        cents = round(self.p10_flip_fraction * 100)
        return (cents * self.n_samples + 50) // 100

    def to_dict(self) -> dict:
        return {
            "p1_classes": self.p1_classes,
            "p2_useful": self.p2_useful,
            "p3_redundant": self.p3_redundant,
            "p4_repeated": self.p4_repeated,
            "p5_useless": self.p5_useless,
            "p6_samples_per_cluster": self.p6_samples_per_cluster,
            "p7_clusters_per_class": self.p7_clusters_per_class,
            "p8_seed": self.p8_seed,
            "p9_hypercube_factor": self.p9_hypercube_factor,
            "p10_flip_fraction": self.p10_flip_fraction,
            "p11_permute": self.p11_permute,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SynthParams":
        return cls(**d)


@dataclass(frozen=True)
class SynthManifest:
    """Generation record enabling structural checks on the emitted dataset.

    column_roles aligns with the dataset's column order as written.
    permutation[j] is the pre-shuffle position of output column j (identity
    when p11 = 0). repeated_sources[i] gives, for the i-th repeated column
    in pre-shuffle order, the pre-shuffle index of the column it copies.
    """

    params: SynthParams
    column_roles: list[str]
    permutation: list[int]
    repeated_sources: list[int]
    flipped_indices: list[int]

    def __post_init__(self):
        n = self.params.n_features
        if len(self.column_roles) != n:
            raise ValueError("column_roles length mismatch")
        if sorted(self.permutation) != list(range(n)):
            raise ValueError("permutation is not a bijection on columns")
        counts = {role: self.column_roles.count(role) for role in COLUMN_ROLES}
        expected = {
            "useful": self.params.p2_useful,
            "redundant": self.params.p3_redundant,
            "repeated": self.params.p4_repeated,
            "useless": self.params.p5_useless,
        }
        if counts != expected:
            raise ValueError(f"role counts {counts} do not match params {expected}")

    def unpermuted_values(self, data: Dataset) -> np.ndarray:
        """Columns of `data` restored to pre-shuffle order."""
        inverse = np.empty(len(self.permutation), dtype=np.int64)
        inverse[np.asarray(self.permutation)] = np.arange(len(self.permutation))
        return data.values[:, inverse]

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "column_roles": list(self.column_roles),
            "permutation": [int(v) for v in self.permutation],
            "repeated_sources": [int(v) for v in self.repeated_sources],
            "flipped_indices": [int(v) for v in self.flipped_indices],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SynthManifest":
        return cls(
            params=SynthParams.from_dict(d["params"]),
            column_roles=list(d["column_roles"]),
            permutation=list(d["permutation"]),
            repeated_sources=list(d["repeated_sources"]),
            flipped_indices=list(d["flipped_indices"]),
        )


def _substream(seed: int, step: int) -> np.random.Generator:
    """Independent RNG for one generation step, derived from the seed.

    Keying each step separately means toggling one step (e.g. the column
    shuffle) cannot perturb the draws of any other step.
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(step,)))


def sample_params(seed: int, p6_max: int = 70) -> SynthParams:
    """Draw one parameter set uniformly from the allowed ranges.

    p6_max (default the full range top) caps the samples-per-cluster draw;
    desk-scale runs lower it to keep dataset sizes small.
    """
    lo6, hi6 = PARAM_RANGES["p6_samples_per_cluster"]
    if not lo6 <= p6_max <= hi6:
        raise ValueError(f"p6_max={p6_max} outside [{lo6}, {hi6}]")
    rng = np.random.default_rng(seed)

    def draw(name: str) -> int:
        lo, hi = PARAM_RANGES[name]
        return int(rng.integers(lo, hi + 1))

    return SynthParams(
        p2_useful=draw("p2_useful"),
        p3_redundant=draw("p3_redundant"),
        p4_repeated=draw("p4_repeated"),
        p5_useless=draw("p5_useless"),
        p6_samples_per_cluster=int(rng.integers(lo6, p6_max + 1)),
        p7_clusters_per_class=draw("p7_clusters_per_class"),
        p8_seed=draw("p8_seed"),
        p9_hypercube_factor=draw("p9_hypercube_factor"),
        p10_flip_fraction=int(rng.integers(P10_CENTS_RANGE[0], P10_CENTS_RANGE[1] + 1)) / 100,
        p11_permute=int(rng.integers(0, 2)),
    )


def _choose_vertices(rng: np.random.Generator, dim: int, count: int) -> np.ndarray:
    """`count` distinct vertices of {0,1}^dim, as a count x dim 0/1 matrix."""
    total = 2**dim
    if count > total:
        raise ValueError(f"cannot place {count} centroids on {total} hypercube vertices")
    chosen: list[int] = []
    seen: set[int] = set()
    while len(chosen) < count:
        code = int(rng.integers(0, total))
        if code not in seen:
            seen.add(code)
            chosen.append(code)
    bits = np.array(
        [[(code >> d) & 1 for d in range(dim)] for code in chosen], dtype=np.float64
    )
    return bits


def synthesize(params: SynthParams) -> tuple[Dataset, SynthManifest]:
    """Generate one dataset plus its manifest.

    Steps (each with its own substream of p8): place 2*p7 class-alternating
    cluster centroids on distinct vertices of {-p9,+p9}^p2, draw p6
    unit-variance Gaussian samples per centroid for the useful block, mix
    the useful block with a uniform[-1,1] matrix for the redundant block,
    copy random useful/redundant columns for the repeated block, add
    Gaussian noise columns for the useless block, flip round(p10*S) labels,
    and optionally shuffle the columns.
    """
    p = params
    n_centroids = 2 * p.p7_clusters_per_class
    s_total = p.n_samples

    bits = _choose_vertices(_substream(p.p8_seed, 0), p.p2_useful, n_centroids)
    centroids = (2 * bits - 1) * p.p9_hypercube_factor
    centroid_class = np.arange(n_centroids) % 2

    noise = _substream(p.p8_seed, 1).standard_normal((s_total, p.p2_useful))
    useful = noise + np.repeat(centroids, p.p6_samples_per_cluster, axis=0)
    labels = np.repeat(centroid_class, p.p6_samples_per_cluster).astype(np.int64)

    blocks = [useful]
    if p.p3_redundant > 0:
        mix = _substream(p.p8_seed, 2).uniform(-1.0, 1.0, (p.p2_useful, p.p3_redundant))
        blocks.append(useful @ mix)
    n_source = p.p2_useful + p.p3_redundant
    repeated_sources: list[int] = []
    if p.p4_repeated > 0:
        source_pool = np.hstack(blocks)
        picks = _substream(p.p8_seed, 3).integers(0, n_source, size=p.p4_repeated)
        repeated_sources = [int(v) for v in picks]
        blocks.append(source_pool[:, picks])
    if p.p5_useless > 0:
        blocks.append(_substream(p.p8_seed, 4).standard_normal((s_total, p.p5_useless)))
    values = np.hstack(blocks)

    flips = p.flip_count
    flipped: list[int] = []
    if flips > 0:
        idx = _substream(p.p8_seed, 5).choice(s_total, size=flips, replace=False)
        flipped = sorted(int(v) for v in idx)
        labels = labels.copy()
        labels[flipped] = 1 - labels[flipped]

    roles = (
        ["useful"] * p.p2_useful
        + ["redundant"] * p.p3_redundant
        + ["repeated"] * p.p4_repeated
        + ["useless"] * p.p5_useless
    )
    if p.p11_permute:
        perm = _substream(p.p8_seed, 6).permutation(p.n_features)
        values = values[:, perm]
        roles = [roles[j] for j in perm]
        permutation = [int(v) for v in perm]
    else:
        permutation = list(range(p.n_features))

    manifest = SynthManifest(
        params=p,
        column_roles=roles,
        permutation=permutation,
        repeated_sources=repeated_sources,
        flipped_indices=flipped,
    )
    return Dataset(values, labels), manifest


def dataset_path(out_dir, index: int) -> Path:
    return Path(out_dir) / f"ds_{index}.csv"


def manifest_path(out_dir, index: int) -> Path:
    return Path(out_dir) / f"ds_{index}.manifest.json"


def param_seed(master_seed: int, index: int) -> int:
    """Per-dataset parameter-sampling seed derived from one master seed."""
    return master_seed * 10**6 + index


def write_pair(out_dir, index: int, data: Dataset, manifest: SynthManifest) -> None:
    save_csv(data, dataset_path(out_dir, index))
    with open(manifest_path(out_dir, index), "w", encoding="utf-8") as fh:
        json.dump(manifest.to_dict(), fh, indent=1)
        fh.write("\n")


def generate_repository(
    count: int, master_seed: int, out_dir, p6_max: int = 70
) -> list[tuple[Dataset, SynthManifest]]:
    """Generate `count` dataset/manifest pairs under out_dir.

    Dataset i draws its parameters with seed master_seed * 10^6 + i, so the
    whole repository is reproducible from one number. Existing pairs are
    reused rather than regenerated, which makes interrupted builds cheap to
    resume (outputs are deterministic, so reuse cannot change results).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    pairs = []
    for i in range(count):
        params = sample_params(param_seed(master_seed, i), p6_max)
        csv_file, man_file = dataset_path(out_dir, i), manifest_path(out_dir, i)
        if csv_file.exists() and man_file.exists():
            with open(man_file, encoding="utf-8") as fh:
                manifest = SynthManifest.from_dict(json.load(fh))
            # Reuse only output of the identical configuration; a stale file
            # from another seed or cap is regenerated.
            if manifest.params == params:
                pairs.append((load_csv(csv_file), manifest))
                continue
        data, manifest = synthesize(params)
        write_pair(out_dir, i, data, manifest)
        pairs.append((data, manifest))
    return pairs

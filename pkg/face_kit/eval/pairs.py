"""Verification pairs over an embedding matrix, and their cosine scores."""

from dataclasses import dataclass, replace

import numpy as np

from face_kit.errors import DataError, ShapeError
from face_kit.numerics import Prng, as_mat, l2_normalize_rows


@dataclass
class PairSet:
    """Pairs (index_a[i], index_b[i]) with ground truth same[i] and optional scores."""

    index_a: np.ndarray
    index_b: np.ndarray
    same: np.ndarray
    scores: np.ndarray | None = None

    def __post_init__(self):
        self.index_a = np.asarray(self.index_a, dtype=np.int64).reshape(-1)
        self.index_b = np.asarray(self.index_b, dtype=np.int64).reshape(-1)
        self.same = np.asarray(self.same, dtype=bool).reshape(-1)
        n = self.same.shape[0]
        if self.index_a.shape[0] != n or self.index_b.shape[0] != n:
            raise ShapeError("pair index arrays and labels differ in length")
        if self.scores is not None:
            self.scores = np.asarray(self.scores, dtype=np.float64).reshape(-1)
            if self.scores.shape[0] != n:
                raise ShapeError(f"{self.scores.shape[0]} scores for {n} pairs")

    @classmethod
    def from_scores(cls, scores, same) -> "PairSet":
        """Pairs known only by their scores (indices are placeholders)."""
        n = len(same)
        return cls(np.zeros(n), np.zeros(n), same, scores)

    def __len__(self) -> int:
        return self.same.shape[0]

    def require_scores(self) -> np.ndarray:
        if self.scores is None:
            raise DataError("pairs have not been scored")
        return self.scores


def score_pairs(embeddings: np.ndarray, pairs: PairSet) -> PairSet:
    """
    Cosine similarity of every pair of embedding rows.

    Raises:
        DataError: If an index is outside the embedding matrix.
    """
    emb = as_mat(embeddings, "embeddings")
    n = emb.shape[0]
    for name, idx in (("index_a", pairs.index_a), ("index_b", pairs.index_b)):
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise DataError(f"{name} out of range for {n} embeddings")
    unit = l2_normalize_rows(emb)
    scores = np.einsum("ij,ij->i", unit[pairs.index_a], unit[pairs.index_b])
    return replace(pairs, scores=scores)


def sample_pairs(labels, rng: Prng, num_pairs: int) -> PairSet:
    """
    Draw num_pairs pairs over labelled rows: the first half same-identity, the rest different.

    Args:
        labels: Class label per row.
        rng: Stream the draws come from.
        num_pairs: Total pair count (even).

    Raises:
        DataError: If no class has two rows or all rows share one class.
    """
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if num_pairs < 2 or num_pairs % 2:
        raise DataError(f"num_pairs must be a positive even number, got {num_pairs}")
    by_class = [np.nonzero(labels == c)[0] for c in np.unique(labels)]
    multi = [rows for rows in by_class if rows.size >= 2]
    if not multi or len(by_class) < 2:
        raise DataError("pair sampling needs a class with two rows and at least two classes")

    half = num_pairs // 2
    index_a, index_b = [], []
    for _ in range(half):
        rows = multi[int(rng.integers(1, len(multi))[0])]
        i, j = rng.permutation(rows.size)[:2]
        index_a.append(rows[i])
        index_b.append(rows[j])
    n = labels.size
    while len(index_a) < num_pairs:
        i, j = (int(v) for v in rng.integers(2, n))
        if labels[i] != labels[j]:
            index_a.append(i)
            index_b.append(j)
    same = np.arange(num_pairs) < half
    return PairSet(np.array(index_a), np.array(index_b), same)

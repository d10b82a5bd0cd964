from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Partition:
    """Hard assignment of ``n`` samples to ``k`` clusters labelled ``0..k-1``."""

    labels: np.ndarray
    k: int

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        """Compress arbitrary integer ids to ``0..k-1`` in order of first appearance."""
        labels = np.asarray(labels).ravel()
        if labels.size == 0:
            raise ValueError("empty partition")
        _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
        order = np.argsort(np.argsort(first))
        codes = order[inverse].astype(np.int64)
        return cls(labels=codes, k=int(first.size))

    def __len__(self) -> int:
        return int(self.labels.size)

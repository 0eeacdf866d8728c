"""Parameter fitting and the BIC score."""

from __future__ import annotations

import math

import numpy as np

from ..errors import EmptyDataset
from .graph import Dag
from .model import Dataset


def _config_index(data: Dataset, parents) -> tuple:
    idx = np.zeros(data.n, dtype=np.int64)
    n_cfg = 1
    for p in parents:
        k = data.size_of(p)
        idx = idx * k + data.column(p)
        n_cfg *= k
    return idx, n_cfg


def counts(data: Dataset, v, parents) -> np.ndarray:
    """Joint counts N(parent configuration, value) as an [n_cfg, |v|] array."""
    idx, n_cfg = _config_index(data, parents)
    k = data.size_of(v)
    return np.bincount(idx * k + data.column(v), minlength=n_cfg * k).reshape(n_cfg, k)


def fit_table(data: Dataset, v, parents, alpha: float = 1.0) -> np.ndarray:
    if data.n == 0:
        raise EmptyDataset("cannot fit a table without data")
    c = counts(data, v, parents).astype(float)
    k = c.shape[1]
    denom = c.sum(axis=1, keepdims=True) + alpha * k
    with np.errstate(invalid="ignore", divide="ignore"):
        table = (c + alpha) / denom
    # an unseen configuration without smoothing carries no information
    table[denom[:, 0] == 0] = 1.0 / k
    return table.reshape(tuple(data.size_of(p) for p in parents) + (k,))


def fit_mle(dag: Dag, data: Dataset, alpha: float = 1.0) -> dict:
    """Laplace-smoothed maximum-likelihood tables for every variable."""
    return {v: fit_table(data, v, dag.parents(v), alpha) for v in dag.nodes}


def local_score(data: Dataset, v, parents) -> float:
    if data.n == 0:
        raise EmptyDataset("cannot score without data")
    c = counts(data, v, parents)
    n_pa = c.sum(axis=1)
    ll = 0.0
    for row, tot in zip(c, n_pa):
        for x in row:
            if x > 0:
                ll += x * math.log(x / tot)
    k = (c.shape[1] - 1) * c.shape[0]
    return float(ll - 0.5 * k * math.log(data.n))


class BicScorer:
    """Decomposable BIC with a per-(variable, parent set) cache."""

    def __init__(self, data: Dataset):
        if data.n == 0:
            raise EmptyDataset("cannot score without data")
        self.data = data
        self._cache = {}
        self.hits = 0
        self.misses = 0

    def local(self, v, parents) -> float:
        # parents are kept in dataset order so equal sets share one entry
        key = (v, tuple(p for p in self.data.variables if p in set(parents)))
        if key in self._cache:
            self.hits += 1
            return self._cache[key]
        self.misses += 1
        s = local_score(self.data, v, key[1])
        self._cache[key] = s
        return s

    def score(self, dag: Dag) -> float:
        return sum(self.local(v, dag.parents(v)) for v in dag.nodes)


def score_bic(dag: Dag, data: Dataset, scorer: BicScorer = None) -> float:
    scorer = scorer or BicScorer(data)
    return scorer.score(dag)

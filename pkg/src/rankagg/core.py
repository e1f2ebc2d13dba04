"""Domain types shared by every other module.

All types are immutable after construction (arrays are stored with the
writeable flag cleared) and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DegenerateLabel

__all__ = [
    "InstanceSet",
    "SampledLabels",
    "EtaTable",
    "JointLabelModel",
    "PriorVector",
    "CostMatrix",
    "Scorer",
    "TableScorer",
    "LinearScorer",
    "MlpScorer",
    "Sum",
    "Product",
    "WeightedSum",
    "Aggregator",
    "PerLabel",
    "LossAgg",
    "LabelAgg",
    "ObjectiveSpec",
    "AggregateDistribution",
    "aggregate_labels",
    "aggregate_distribution",
]

_PROB_TOL = 1e-9


def _frozen_array(values, dtype=float, ndim=None) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"expected {ndim}-dimensional array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class InstanceSet:
    """n x d feature matrix carrying the uniform empirical measure over rows."""

    features: np.ndarray

    def __post_init__(self):
        feats = _frozen_array(self.features, ndim=2)
        if feats.shape[0] < 1 or feats.shape[1] < 1:
            raise ValueError("need at least one row and one column")
        if not np.all(np.isfinite(feats)):
            raise ValueError("features must be finite")
        object.__setattr__(self, "features", feats)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class SampledLabels:
    """n x K binary label matrix."""

    labels: np.ndarray

    def __post_init__(self):
        lab = _frozen_array(self.labels, dtype=np.int64, ndim=2)
        if lab.shape[1] < 1:
            raise ValueError("need at least one label column")
        if not np.isin(lab, (0, 1)).all():
            raise ValueError("labels must be 0/1")
        object.__setattr__(self, "labels", lab)

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    @property
    def K(self) -> int:
        return self.labels.shape[1]


@dataclass(frozen=True)
class EtaTable:
    """n x K table of per-instance positive-class probabilities."""

    eta: np.ndarray

    def __post_init__(self):
        eta = _frozen_array(self.eta, ndim=2)
        if np.any(eta < 0) or np.any(eta > 1):
            raise ValueError("class probabilities must lie in [0, 1]")
        object.__setattr__(self, "eta", eta)

    @property
    def n(self) -> int:
        return self.eta.shape[0]

    @property
    def K(self) -> int:
        return self.eta.shape[1]


class JointLabelModel:
    """Per-instance joint law over the K binary labels.

    Either conditionally independent (given by an EtaTable) or explicit
    (an n x 2^K probability table; column index encodes the label combo in
    binary with label 0 as the most significant bit).
    """

    def __init__(self, *, eta: EtaTable | None = None, table: np.ndarray | None = None, K: int | None = None):
        if (eta is None) == (table is None):
            raise ValueError("provide exactly one of eta or table")
        if eta is not None:
            self._eta = eta
            self._table = None
            self._K = eta.K
            self._n = eta.n
        else:
            if K is None:
                raise ValueError("explicit tables need K")
            tab = _frozen_array(table, ndim=2)
            if tab.shape[1] != 2**K:
                raise ValueError("explicit table must have 2^K columns")
            if np.any(tab < 0):
                raise ValueError("probabilities must be non-negative")
            if np.any(np.abs(tab.sum(axis=1) - 1.0) > _PROB_TOL):
                raise ValueError("explicit table rows must sum to 1")
            self._eta = None
            self._table = tab
            self._K = K
            self._n = tab.shape[0]

    @classmethod
    def from_eta(cls, eta: EtaTable) -> "JointLabelModel":
        return cls(eta=eta)

    @classmethod
    def explicit(cls, table, K: int) -> "JointLabelModel":
        return cls(table=table, K=K)

    @property
    def n(self) -> int:
        return self._n

    @property
    def K(self) -> int:
        return self._K

    @property
    def independent(self) -> bool:
        return self._eta is not None

    def combos(self) -> np.ndarray:
        """2^K x K matrix of label combos in explicit-column order."""
        K = self._K
        idx = np.arange(2**K)
        return (idx[:, None] >> (K - 1 - np.arange(K))) & 1

    def explicit_table(self) -> np.ndarray:
        if self._table is not None:
            return self._table
        eta = self._eta.eta
        combos = self.combos()
        # product over labels of eta or 1-eta per combo column
        tab = np.ones((self._n, 2**self._K))
        for k in range(self._K):
            col = eta[:, k][:, None]
            tab *= np.where(combos[:, k][None, :] == 1, col, 1.0 - col)
        return tab

    def marginal_eta(self) -> EtaTable:
        if self._eta is not None:
            return self._eta
        combos = self.combos()
        return EtaTable(self._table @ combos.astype(float))

    def all_ones_prob(self) -> np.ndarray:
        """P(every label is 1) per instance."""
        if self._eta is not None:
            return self._eta.eta.prod(axis=1)
        return self._table[:, -1].copy()


@dataclass(frozen=True)
class PriorVector:
    """Marginal positive rates per label."""

    pi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pi", _frozen_array(self.pi, ndim=1))

    @classmethod
    def from_labels(cls, labels: SampledLabels) -> "PriorVector":
        return cls(labels.labels.mean(axis=0))

    @classmethod
    def from_eta(cls, eta: EtaTable) -> "PriorVector":
        return cls(eta.eta.mean(axis=0))

    def require_nondegenerate(self) -> np.ndarray:
        bad = np.flatnonzero((self.pi <= 0) | (self.pi >= 1))
        if bad.size:
            raise DegenerateLabel(f"label {bad[0]} has prior {self.pi[bad[0]]}")
        return self.pi


@dataclass(frozen=True)
class CostMatrix:
    """Misranking costs c[y, y'] over an ordinal alphabet {0, ..., L}.

    Only entries with y > y' are ever read.
    """

    costs: np.ndarray

    def __post_init__(self):
        c = _frozen_array(self.costs, ndim=2)
        if c.shape[0] != c.shape[1] or c.shape[0] < 2:
            raise ValueError("costs must be a square matrix of size >= 2")
        if np.any(c < 0):
            raise ValueError("costs must be non-negative")
        object.__setattr__(self, "costs", c)

    @property
    def size(self) -> int:
        return self.costs.shape[0]

    @classmethod
    def uniform(cls, size: int) -> "CostMatrix":
        return cls(np.ones((size, size)))

    @classmethod
    def absdiff(cls, size: int) -> "CostMatrix":
        grid = np.arange(size)
        return cls(np.abs(grid[:, None] - grid[None, :]).astype(float))

    @classmethod
    def custom(cls, costs) -> "CostMatrix":
        return cls(np.asarray(costs, dtype=float))


class Scorer:
    """Maps instances to real scores. Subclasses implement scores()."""

    def scores(self, instances: InstanceSet | None = None) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class TableScorer(Scorer):
    """Explicit score per instance index; +inf entries rank above all finite scores."""

    values: np.ndarray

    def __post_init__(self):
        vals = _frozen_array(self.values, ndim=1)
        if np.any(np.isnan(vals)):
            raise ValueError("scores must not be NaN")
        object.__setattr__(self, "values", vals)

    def scores(self, instances: InstanceSet | None = None) -> np.ndarray:
        if instances is not None and instances.n != self.values.shape[0]:
            raise ValueError("table length does not match instance count")
        return self.values


@dataclass(frozen=True)
class LinearScorer(Scorer):
    weights: np.ndarray
    bias: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "weights", _frozen_array(self.weights, ndim=1))
        object.__setattr__(self, "bias", float(self.bias))

    def scores(self, instances: InstanceSet | None = None) -> np.ndarray:
        if instances is None:
            raise ValueError("linear scorers need features")
        return instances.features @ self.weights + self.bias


@dataclass(frozen=True)
class MlpScorer(Scorer):
    """Fully connected ReLU network with a scalar output head."""

    weights: tuple  # tuple of (in, out) matrices
    biases: tuple  # tuple of (out,) vectors

    def __post_init__(self):
        ws = tuple(_frozen_array(w, ndim=2) for w in self.weights)
        bs = tuple(_frozen_array(b, ndim=1) for b in self.biases)
        if len(ws) != len(bs) or not ws:
            raise ValueError("need matching weight/bias lists")
        if ws[-1].shape[1] != 1:
            raise ValueError("output layer must be scalar")
        object.__setattr__(self, "weights", ws)
        object.__setattr__(self, "biases", bs)

    def scores(self, instances: InstanceSet | None = None) -> np.ndarray:
        if instances is None:
            raise ValueError("MLP scorers need features")
        h = instances.features
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w + b
            if i < last:
                h = np.maximum(h, 0.0)
        return h[:, 0]


@dataclass(frozen=True)
class Sum:
    """Aggregate labels by summation onto {0, ..., K}."""


@dataclass(frozen=True)
class Product:
    """Aggregate labels by their product (logical AND)."""


@dataclass(frozen=True)
class WeightedSum:
    """Aggregate labels by a positive weighted sum, then rank distinct values."""

    alphas: tuple

    def __post_init__(self):
        alphas = tuple(float(a) for a in self.alphas)
        if not alphas or any(a <= 0 for a in alphas):
            raise ValueError("weights must be strictly positive")
        object.__setattr__(self, "alphas", alphas)


Aggregator = Union[Sum, Product, WeightedSum]


@dataclass(frozen=True)
class PerLabel:
    """Objective: bipartite AUC of one label."""

    k: int


@dataclass(frozen=True)
class LossAgg:
    """Objective: weighted sum of per-label AUCs."""

    weights: tuple

    def __post_init__(self):
        w = tuple(float(a) for a in self.weights)
        if not w or any(a <= 0 for a in w):
            raise ValueError("weights must be strictly positive")
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class LabelAgg:
    """Objective: multipartite AUC of the aggregated label."""

    aggregator: Aggregator
    costs: CostMatrix


ObjectiveSpec = Union[PerLabel, LossAgg, LabelAgg]


@dataclass(frozen=True)
class AggregateDistribution:
    """Per-instance law of the aggregated label.

    values holds the ordinal alphabet in increasing order; probs[i, m] is
    the probability instance i aggregates to values[m].
    """

    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values, ndim=1))
        object.__setattr__(self, "probs", _frozen_array(self.probs, ndim=2))

    def mean(self) -> np.ndarray:
        return self.probs @ self.values


def aggregate_labels(labels: SampledLabels, aggregator: Aggregator) -> np.ndarray:
    """Collapse the K binary labels of each row into one ordinal label."""
    lab = labels.labels
    if isinstance(aggregator, Sum):
        return lab.sum(axis=1)
    if isinstance(aggregator, Product):
        return lab.prod(axis=1)
    if isinstance(aggregator, WeightedSum):
        if len(aggregator.alphas) != labels.K:
            raise ValueError("weight count must match K")
        raw = lab @ np.asarray(aggregator.alphas)
        # dense ordinal alphabet over the observed distinct values
        _, ordinal = np.unique(raw, return_inverse=True)
        return ordinal
    raise TypeError(f"unknown aggregator {aggregator!r}")


def _sum_distribution(eta: np.ndarray) -> np.ndarray:
    """Law of the number of positive labels under independence, by convolution."""
    n, K = eta.shape
    probs = np.zeros((n, K + 1))
    probs[:, 0] = 1.0
    for k in range(K):
        p = eta[:, k][:, None]
        nxt = probs * (1.0 - p)
        nxt[:, 1:] += probs[:, :-1] * p
        probs = nxt
    return probs


def _weighted_values(alphas: Sequence[float], K: int) -> tuple[np.ndarray, np.ndarray]:
    """All achievable weighted sums over {0,1}^K and the combo-to-value map."""
    combos = (np.arange(2**K)[:, None] >> (K - 1 - np.arange(K))) & 1
    raw = combos @ np.asarray(alphas, dtype=float)
    # round before dedup so float addition order cannot split one value in two
    keyed = np.round(raw, 12)
    values, inverse = np.unique(keyed, return_inverse=True)
    return values, inverse


def aggregate_distribution(model: JointLabelModel, aggregator: Aggregator = Sum()) -> AggregateDistribution:
    """Per-instance distribution of the aggregated label."""
    if isinstance(aggregator, Sum):
        if model.independent:
            probs = _sum_distribution(model.marginal_eta().eta)
        else:
            tab = model.explicit_table()
            sums = model.combos().sum(axis=1)
            probs = np.zeros((model.n, model.K + 1))
            np.add.at(probs.T, sums, tab.T)
        return AggregateDistribution(np.arange(model.K + 1, dtype=float), probs)
    if isinstance(aggregator, Product):
        ones = model.all_ones_prob()
        return AggregateDistribution(np.array([0.0, 1.0]), np.column_stack([1.0 - ones, ones]))
    if isinstance(aggregator, WeightedSum):
        if len(aggregator.alphas) != model.K:
            raise ValueError("weight count must match K")
        values, inverse = _weighted_values(aggregator.alphas, model.K)
        tab = model.explicit_table()
        probs = np.zeros((model.n, values.shape[0]))
        np.add.at(probs.T, inverse, tab.T)
        return AggregateDistribution(values, probs)
    raise TypeError(f"unknown aggregator {aggregator!r}")

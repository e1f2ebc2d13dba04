"""AUC objectives in empirical and population form, plus Pareto machinery.

Conventions, kept consistent per path:
  - empirical sums range over ordered pairs with i != j (a point never
    ranks against itself);
  - population sums range over all ordered pairs including i = j with
    H(0) = 1/2, matching an expectation over two i.i.d. draws;
  - ties use exact floating-point equality, and +inf scores rank above
    every finite score (ties among +inf entries count 1/2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .core import (
    AggregateDistribution,
    Aggregator,
    CostMatrix,
    EtaTable,
    JointLabelModel,
    LabelAgg,
    LossAgg,
    PerLabel,
    SampledLabels,
    Scorer,
    aggregate_distribution,
    aggregate_labels,
)
from .errors import DegenerateLabel

__all__ = [
    "AucReport",
    "h_matrix",
    "bipartite_auc_empirical",
    "bipartite_auc_population",
    "multipartite_auc",
    "multipartite_auc_population",
    "loss_agg_auc",
    "label_agg_auc",
    "auc_report",
    "pareto_dominates",
    "pareto_front",
    "population_pair_weights",
    "population_objective_value",
]

# above this many matrix cells, binary AUC switches to the rank statistic
_MATRIX_CELL_LIMIT = 4_000_000


def h_matrix(scores: np.ndarray) -> np.ndarray:
    """H(f_i - f_j) for all ordered pairs: 1 if greater, 1/2 on exact ties."""
    s = np.asarray(scores, dtype=float)
    # comparisons (not subtraction) so +inf sentinels never produce NaN
    return (s[:, None] > s[None, :]) + 0.5 * (s[:, None] == s[None, :])


def _scores_array(scores) -> np.ndarray:
    if isinstance(scores, Scorer):
        return np.asarray(scores.scores(), dtype=float)
    return np.asarray(scores, dtype=float)


def bipartite_auc_empirical(scores, labels) -> float:
    """Fraction of (positive, negative) pairs ranked correctly, ties half."""
    s = _scores_array(scores)
    y = np.asarray(labels)
    n_pos = int((y == 1).sum())
    n_neg = int((y == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabel("need at least one positive and one negative")
    if s.shape[0] ** 2 <= _MATRIX_CELL_LIMIT:
        w = np.outer(y == 1, y == 0).astype(float)
        return float((w * h_matrix(s)).sum() / w.sum())
    # rank statistic path: average ranks give exactly the half-tie credit
    ranks = rankdata(s)
    pos_rank_sum = ranks[y == 1].sum()
    return float((pos_rank_sum - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def bipartite_auc_population(scores, eta_column) -> float:
    """Pairwise-weight AUC under per-instance positive probabilities."""
    s = _scores_array(scores)
    eta = np.asarray(eta_column, dtype=float)
    n = eta.shape[0]
    pi = eta.mean()
    if pi <= 0.0 or pi >= 1.0:
        raise DegenerateLabel(f"prior {pi} is degenerate")
    w = np.outer(eta, 1.0 - eta)
    return float((w * h_matrix(s)).sum() / (pi * (1.0 - pi) * n * n))


def _cost_pair_matrix(ordinal: np.ndarray, costs: CostMatrix) -> np.ndarray:
    y = np.asarray(ordinal)
    discordant = y[:, None] > y[None, :]
    return np.where(discordant, costs.costs[y[:, None], y[None, :]], 0.0)


def multipartite_auc(scores, ordinal_labels, costs: CostMatrix) -> float:
    """Cost-weighted pair accuracy over ordinal labels, normalized to [0, 1]."""
    s = _scores_array(scores)
    w = _cost_pair_matrix(ordinal_labels, costs)
    total = w.sum()
    if total == 0.0:
        raise DegenerateLabel("no discordant pair carries positive cost")
    return float((w * h_matrix(s)).sum() / total)


def _population_cost_weights(dist: AggregateDistribution, costs: CostMatrix) -> np.ndarray:
    levels = dist.values.shape[0]
    if costs.size < levels:
        raise ValueError("cost matrix smaller than the aggregate alphabet")
    w = np.zeros((dist.probs.shape[0],) * 2)
    for m in range(levels):
        for mp in range(m):
            c = costs.costs[m, mp]
            if c != 0.0:
                w += c * np.outer(dist.probs[:, m], dist.probs[:, mp])
    return w


def multipartite_auc_population(scores, dist: AggregateDistribution, costs: CostMatrix) -> float:
    s = _scores_array(scores)
    w = _population_cost_weights(dist, costs)
    total = w.sum()
    if total == 0.0:
        raise DegenerateLabel("aggregate label is degenerate under these costs")
    return float((w * h_matrix(s)).sum() / total)


def _per_label_auc(scores, model) -> np.ndarray:
    if isinstance(model, SampledLabels):
        return np.array(
            [bipartite_auc_empirical(scores, model.labels[:, k]) for k in range(model.K)]
        )
    if isinstance(model, EtaTable):
        return np.array(
            [bipartite_auc_population(scores, model.eta[:, k]) for k in range(model.K)]
        )
    if isinstance(model, JointLabelModel):
        return _per_label_auc(scores, model.marginal_eta())
    raise TypeError(f"unsupported label model {model!r}")


def loss_agg_auc(scores, model, weights) -> float:
    """Weighted sum of per-label AUCs (unnormalized, as defined)."""
    a = np.asarray(weights, dtype=float)
    per_label = _per_label_auc(scores, model)
    if a.shape[0] != per_label.shape[0]:
        raise ValueError("weight count must match K")
    return float(a @ per_label)


def label_agg_auc(scores, model, aggregator: Aggregator, costs: CostMatrix) -> float:
    """Multipartite AUC of the aggregated label."""
    if isinstance(model, SampledLabels):
        return multipartite_auc(scores, aggregate_labels(model, aggregator), costs)
    if isinstance(model, EtaTable):
        model = JointLabelModel.from_eta(model)
    if isinstance(model, JointLabelModel):
        return multipartite_auc_population(scores, aggregate_distribution(model, aggregator), costs)
    raise TypeError(f"unsupported label model {model!r}")


@dataclass(frozen=True)
class AucReport:
    """Per-label AUCs with the balance diagnostics used in the sweeps."""

    per_label: np.ndarray
    diff: float | None
    min: float

    def __post_init__(self):
        arr = np.asarray(self.per_label, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "per_label", arr)


def auc_report(scores, model) -> AucReport:
    per_label = _per_label_auc(scores, model)
    diff = float(abs(per_label[0] - per_label[1])) if per_label.shape[0] == 2 else None
    return AucReport(per_label=per_label, diff=diff, min=float(per_label.min()))


def pareto_dominates(g_aucs, f_aucs) -> bool:
    g = np.asarray(g_aucs, dtype=float)
    f = np.asarray(f_aucs, dtype=float)
    if g.shape != f.shape:
        raise ValueError("vectors must have equal length")
    return bool(np.all(g >= f) and np.any(g > f))


def pareto_front(candidates) -> list[int]:
    """Indices of candidates not dominated by any other (duplicates retained)."""
    vecs = [np.asarray(c, dtype=float) for c in candidates]
    if not vecs:
        raise ValueError("need at least one candidate")
    return [
        i
        for i, v in enumerate(vecs)
        if not any(pareto_dominates(w, v) for j, w in enumerate(vecs) if j != i)
    ]


def population_pair_weights(model, objective) -> tuple[np.ndarray, float]:
    """Pair-weight matrix W and normalizer Z for a population objective.

    The objective value of a score vector s is (W * H(s)).sum() / Z, with
    H over all ordered pairs including i = j. This single quadratic form is
    what the exhaustive weak-order maximizer optimizes.
    """
    if isinstance(model, EtaTable):
        model = JointLabelModel.from_eta(model)
    if not isinstance(model, JointLabelModel):
        raise TypeError("population weights need a probability model")
    eta = model.marginal_eta().eta
    n = model.n
    if isinstance(objective, PerLabel):
        col = eta[:, objective.k]
        pi = col.mean()
        if pi <= 0.0 or pi >= 1.0:
            raise DegenerateLabel(f"label {objective.k} has prior {pi}")
        return np.outer(col, 1.0 - col) / (pi * (1.0 - pi) * n * n), 1.0
    if isinstance(objective, LossAgg):
        a = np.asarray(objective.weights, dtype=float)
        if a.shape[0] != model.K:
            raise ValueError("weight count must match K")
        w = np.zeros((n, n))
        for k in range(model.K):
            col = eta[:, k]
            pi = col.mean()
            if pi <= 0.0 or pi >= 1.0:
                raise DegenerateLabel(f"label {k} has prior {pi}")
            w += a[k] * np.outer(col, 1.0 - col) / (pi * (1.0 - pi) * n * n)
        return w, 1.0
    if isinstance(objective, LabelAgg):
        dist = aggregate_distribution(model, objective.aggregator)
        w = _population_cost_weights(dist, objective.costs)
        total = w.sum()
        if total == 0.0:
            raise DegenerateLabel("aggregate label is degenerate under these costs")
        return w, float(total)
    raise TypeError(f"unsupported objective {objective!r}")


def population_objective_value(scores, model, objective) -> float:
    w, z = population_pair_weights(model, objective)
    return float((w * h_matrix(_scores_array(scores))).sum() / z)

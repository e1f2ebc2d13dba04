"""Closed-form optimal scorers and label-dictatorship diagnostics.

Ratio-form scorers use a +inf sentinel when the denominator vanishes;
the metrics module ranks +inf above every finite score and ties +inf
entries with each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .core import (
    CostMatrix,
    EtaTable,
    JointLabelModel,
    PriorVector,
    SampledLabels,
    TableScorer,
)
from .errors import DegenerateLabel, InvalidCosts

__all__ = [
    "alpha_vector",
    "loss_agg_bayes_scorer",
    "label_agg_bayes_scorer_sum",
    "label_agg_bayes_scorer_weighted",
    "label_agg_uniform_cost_scorer_k2",
    "multipartite_bayes_scorer",
    "scale_condition_holds",
    "product_agg_bayes_scorer",
    "DictatorshipReport",
    "dictatorship_analysis",
    "partial_order_over_combos",
]

_SCALE_TOL = 1e-8


def _priors_array(priors, K: int) -> np.ndarray:
    if isinstance(priors, PriorVector):
        pi = priors.pi
    elif isinstance(priors, (SampledLabels, EtaTable)):
        pi = (
            PriorVector.from_labels(priors) if isinstance(priors, SampledLabels) else PriorVector.from_eta(priors)
        ).pi
    else:
        pi = np.asarray(priors, dtype=float)
    if pi.shape[0] != K:
        raise ValueError("prior count must match K")
    bad = np.flatnonzero((pi <= 0.0) | (pi >= 1.0))
    if bad.size:
        raise DegenerateLabel(f"label {bad[0]} has prior {pi[bad[0]]}")
    return pi


def alpha_vector(priors, weights) -> np.ndarray:
    """Per-label influence coefficients a_k / (pi_k (1 - pi_k))."""
    a = np.asarray(weights, dtype=float)
    pi = _priors_array(priors, a.shape[0])
    if np.any(a <= 0):
        raise ValueError("weights must be strictly positive")
    return a / (pi * (1.0 - pi))


def loss_agg_bayes_scorer(eta: EtaTable, priors=None, weights=None) -> TableScorer:
    """Optimal scorer for the weighted sum of per-label AUCs.

    score_i = (1/K) sum_k a_k / (pi_k (1 - pi_k)) * eta_{ik}.
    Priors default to the column means of eta; weights default to 1.
    """
    if priors is None:
        priors = PriorVector.from_eta(eta)
    if weights is None:
        weights = np.ones(eta.K)
    alpha = alpha_vector(priors, weights)
    return TableScorer(eta.eta @ alpha / eta.K)


def label_agg_bayes_scorer_sum(eta: EtaTable) -> TableScorer:
    """Optimal scorer for the sum-aggregated label under absolute-difference costs."""
    return TableScorer(eta.eta.sum(axis=1))


def label_agg_bayes_scorer_weighted(eta: EtaTable, alphas) -> TableScorer:
    """Weighted-sum variant: score_i = sum_k alpha_k * eta_{ik}."""
    a = np.asarray(alphas, dtype=float)
    if a.shape[0] != eta.K or np.any(a <= 0):
        raise ValueError("need strictly positive weights matching K")
    return TableScorer(eta.eta @ a)


def label_agg_uniform_cost_scorer_k2(eta: EtaTable) -> TableScorer:
    """Optimal scorer for the K=2 sum-aggregated label under uniform costs.

    score = (eta1 + eta2 - eta1*eta2) / (1 - eta1*eta2), assuming the two
    labels are conditionally independent; +inf where eta1*eta2 = 1.
    """
    if eta.K != 2:
        raise ValueError("this closed form is specific to K=2")
    e1, e2 = eta.eta[:, 0], eta.eta[:, 1]
    prod = e1 * e2
    denom = 1.0 - prod
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.where(denom > 0.0, (e1 + e2 - prod) / np.where(denom > 0.0, denom, 1.0), np.inf)
    return TableScorer(vals)


def scale_condition_holds(costs: CostMatrix) -> bool:
    """Whether c[y, y'] factorizes as w_y * w_y' * (s_y - s_y') with w > 0.

    Checked constructively: fix the gauge w_0 = 1, s_0 = 0, read
    u_y = w_y * s_y off the first column, then search the affine solution
    set of the remaining bilinear relations (linear in w given u) for a
    strictly positive w via a small linear program. The relations can be
    singular (absolute-difference costs admit a whole line of solutions),
    so a single least-squares pick would wrongly reject valid matrices.
    Entries are verified within relative tolerance 1e-8.
    """
    c = costs.costs
    m = c.shape[0]
    if m <= 2:
        return True
    u = np.concatenate([[0.0], c[1:, 0]])  # u_0 = w_0 * s_0 = 0 by the gauge
    rows, rhs = [], []
    for y in range(2, m):
        for yp in range(1, y):
            # c[y, yp] = w_yp * u_y - w_y * u_yp
            row = np.zeros(m - 1)
            row[yp - 1] += u[y]
            row[y - 1] -= u[yp]
            rows.append(row)
            rhs.append(c[y, yp])
    if not rows:
        return True
    a = np.asarray(rows)
    b = np.asarray(rhs)
    # maximize the smallest weight t subject to the relations; t capped so
    # the program stays bounded when the solution set is a ray
    n_w = m - 1
    objective = np.zeros(n_w + 1)
    objective[-1] = -1.0
    a_ub = np.hstack([-np.eye(n_w), np.ones((n_w, 1))])  # t - w_y <= 0
    result = linprog(
        objective,
        A_ub=a_ub,
        b_ub=np.zeros(n_w),
        A_eq=np.hstack([a, np.zeros((a.shape[0], 1))]),
        b_eq=b,
        bounds=[(None, None)] * n_w + [(None, 1.0)],
    )
    if not result.success or result.x[-1] <= _SCALE_TOL:
        return False
    w = np.concatenate([[1.0], result.x[:n_w]])
    scale = max(1.0, float(np.abs(c).max()))
    for y in range(1, m):
        for yp in range(y):
            pred = w[yp] * u[y] - w[y] * u[yp] if yp > 0 else u[y]
            if abs(pred - c[y, yp]) > _SCALE_TOL * scale:
                return False
    return True


def multipartite_bayes_scorer(class_probs: np.ndarray, costs: CostMatrix) -> TableScorer:
    """Optimal scorer for an ordinal label with class-prob table over {0..L-1}.

    score = sum_{y > 0} c[y, 0] * p_y / sum_{y < L-1} c[L-1, y] * p_y,
    valid for a 3-letter alphabet or whenever the costs factorize on the
    scale condition; +inf where the denominator vanishes.
    """
    p = np.asarray(class_probs, dtype=float)
    if p.ndim != 2:
        raise ValueError("need an n x L class-probability table")
    levels = p.shape[1]
    if costs.size < levels:
        raise ValueError("cost matrix smaller than the alphabet")
    if levels > 3 and not scale_condition_holds(costs):
        raise InvalidCosts("no closed form: costs fail the scale condition for L > 3")
    num = p[:, 1:] @ costs.costs[1:levels, 0]
    den = p[:, :-1] @ costs.costs[levels - 1, : levels - 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), np.inf)
    return TableScorer(vals)


def product_agg_bayes_scorer(model: JointLabelModel) -> TableScorer:
    """Optimal scorer for the product-aggregated (AND) label."""
    return TableScorer(model.all_ones_prob())


@dataclass(frozen=True)
class DictatorshipReport:
    """Which label's signal overrides the other's, if any."""

    dictator: int | None
    violations: tuple


def dictatorship_analysis(alphas, eta: EtaTable | None = None, weights=None) -> DictatorshipReport:
    """Identify the dominating label for K=2 influence coefficients.

    With deterministic eta also checks the implied constraint: every
    instance positive on the dictator label scores above every instance
    negative on it under the loss-agg scorer. Ties in alpha yield None.
    """
    alpha = np.asarray(alphas, dtype=float)
    if alpha.shape[0] != 2:
        raise ValueError("dictatorship analysis is defined for K=2")
    if alpha[0] == alpha[1]:
        return DictatorshipReport(dictator=None, violations=())
    dictator = 0 if alpha[0] > alpha[1] else 1
    violations = []
    if eta is not None:
        if not np.isin(eta.eta, (0.0, 1.0)).all():
            raise ValueError("ordering check needs a deterministic eta table")
        scores = eta.eta @ alpha / eta.K
        pos = np.flatnonzero(eta.eta[:, dictator] == 1.0)
        neg = np.flatnonzero(eta.eta[:, dictator] == 0.0)
        for i in pos:
            for j in neg:
                if scores[i] <= scores[j]:
                    violations.append((int(i), int(j)))
    return DictatorshipReport(dictator=dictator, violations=tuple(violations))


_COMBOS = ((0, 0), (0, 1), (1, 0), (1, 1))


def partial_order_over_combos(method: str, alphas=None) -> frozenset:
    """Strict-order pairs among the 4 deterministic K=2 label combos.

    Returns pairs (lo, hi) meaning combo lo scores strictly below combo hi
    under the named method's optimal scorer; methods: "lossagg" (needs
    alphas), "labelagg_sum", "labelagg_product".
    """
    if method == "lossagg":
        if alphas is None:
            raise ValueError("lossagg needs alpha coefficients")
        a = np.asarray(alphas, dtype=float)
        value = {c: float(c[0] * a[0] + c[1] * a[1]) / 2.0 for c in _COMBOS}
    elif method == "labelagg_sum":
        value = {c: float(c[0] + c[1]) for c in _COMBOS}
    elif method == "labelagg_product":
        value = {c: float(c[0] * c[1]) for c in _COMBOS}
    else:
        raise ValueError(f"unknown method {method!r}")
    return frozenset(
        (lo, hi) for lo in _COMBOS for hi in _COMBOS if value[lo] < value[hi]
    )

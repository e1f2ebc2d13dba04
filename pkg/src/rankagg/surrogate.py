"""Differentiable pairwise relaxations of the AUC objectives and a trainer.

Every objective family reduces to groups of (positive, negative) index
pairs with a group coefficient; the loss is the coefficient-weighted mean
of phi over each group's pair cross product. Gradients flow through the
per-instance scores into Linear or MLP parameters analytically.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import expit

from .core import (
    InstanceSet,
    LabelAgg,
    LinearScorer,
    LossAgg,
    MlpScorer,
    PerLabel,
    SampledLabels,
    Scorer,
    TableScorer,
    aggregate_labels,
)
from .errors import DegenerateLabel, NotTrainable
from .metrics import auc_report

__all__ = [
    "Logistic",
    "Hinge",
    "SurrogateKind",
    "TrainConfig",
    "surrogate_objective",
    "surrogate_gradient",
    "train",
    "init_scorer",
    "scorer_parameters",
]

_CHUNK_CELLS = 1 << 20


@dataclass(frozen=True)
class Logistic:
    """phi(z) = log(1 + exp(-z)), computed branchless via logaddexp."""

    def phi(self, z: np.ndarray) -> np.ndarray:
        return np.logaddexp(0.0, -z)

    def dphi(self, z: np.ndarray) -> np.ndarray:
        return -expit(-z)


@dataclass(frozen=True)
class Hinge:
    """phi(z) = max(0, 1 - z); subgradient 0 at the kink z = 1."""

    def phi(self, z: np.ndarray) -> np.ndarray:
        return np.maximum(0.0, 1.0 - z)

    def dphi(self, z: np.ndarray) -> np.ndarray:
        return -(z < 1.0).astype(float)


SurrogateKind = Logistic | Hinge


def _pair_groups(labels: SampledLabels, objective) -> list[tuple[np.ndarray, np.ndarray, float]]:
    """Decompose an objective into (pos rows, neg rows, coefficient) groups.

    The surrogate loss is sum_g coeff_g * mean over g's pair cross product
    of phi(f_pos - f_neg).
    """
    lab = labels.labels

    def binary_group(column: np.ndarray, what: str) -> tuple[np.ndarray, np.ndarray]:
        pos = np.flatnonzero(column == 1)
        neg = np.flatnonzero(column == 0)
        if pos.size == 0 or neg.size == 0:
            raise DegenerateLabel(f"{what} has a single class")
        return pos, neg

    if isinstance(objective, PerLabel):
        pos, neg = binary_group(lab[:, objective.k], f"label {objective.k}")
        return [(pos, neg, 1.0)]
    if isinstance(objective, LossAgg):
        if len(objective.weights) != labels.K:
            raise ValueError("weight count must match K")
        groups = []
        for k, a_k in enumerate(objective.weights):
            pos, neg = binary_group(lab[:, k], f"label {k}")
            groups.append((pos, neg, float(a_k)))
        return groups
    if isinstance(objective, LabelAgg):
        ordinal = aggregate_labels(labels, objective.aggregator)
        levels = int(ordinal.max()) + 1
        if objective.costs.size < levels:
            raise ValueError("cost matrix smaller than the aggregate alphabet")
        by_level = [np.flatnonzero(ordinal == m) for m in range(levels)]
        raw = []
        for m in range(levels):
            for mp in range(m):
                c = float(objective.costs.costs[m, mp])
                if c > 0.0 and by_level[m].size and by_level[mp].size:
                    mass = c * by_level[m].size * by_level[mp].size
                    raw.append((by_level[m], by_level[mp], mass))
        total = sum(mass for _, _, mass in raw)
        if total == 0.0:
            raise DegenerateLabel("no discordant pair carries positive cost")
        return [(pos, neg, mass / total) for pos, neg, mass in raw]
    raise TypeError(f"unsupported objective {objective!r}")


def _group_loss_grad(scores, pos, neg, kind, want_grad, grad_scores, coeff):
    """Exact mean phi over the full pos x neg cross product, chunked."""
    f_neg = scores[neg]
    rows = max(1, _CHUNK_CELLS // max(1, neg.size))
    total = 0.0
    n_pairs = pos.size * neg.size
    for start in range(0, pos.size, rows):
        block = pos[start : start + rows]
        z = scores[block][:, None] - f_neg[None, :]
        total += float(kind.phi(z).sum())
        if want_grad:
            d = kind.dphi(z) * (coeff / n_pairs)
            np.add.at(grad_scores, block, d.sum(axis=1))
            np.add.at(grad_scores, neg, -d.sum(axis=0))
    return coeff * total / n_pairs


def _sampled_loss_grad(scores, pos, neg, kind, want_grad, grad_scores, coeff, m, rng):
    """Unbiased with-replacement pair sample of size m."""
    i = rng.choice(pos, m)
    j = rng.choice(neg, m)
    z = scores[i] - scores[j]
    if want_grad:
        d = kind.dphi(z) * (coeff / m)
        np.add.at(grad_scores, i, d)
        np.add.at(grad_scores, j, -d)
    return coeff * float(kind.phi(z).mean())


def _loss_and_score_grad(scores, groups, kind, want_grad, budget=None, rng=None):
    grad_scores = np.zeros(scores.shape[0]) if want_grad else None
    n_pairs = sum(pos.size * neg.size for pos, neg, _ in groups)
    loss = 0.0
    if budget is None or n_pairs <= budget:
        for pos, neg, coeff in groups:
            loss += _group_loss_grad(scores, pos, neg, kind, want_grad, grad_scores, coeff)
    else:
        for pos, neg, coeff in groups:
            m = max(1, int(round(budget * pos.size * neg.size / n_pairs)))
            loss += _sampled_loss_grad(scores, pos, neg, kind, want_grad, grad_scores, coeff, m, rng)
    return loss, grad_scores


def scorer_parameters(scorer: Scorer) -> list[np.ndarray]:
    """Writable copies of the trainable parameter arrays."""
    if isinstance(scorer, LinearScorer):
        return [scorer.weights.copy(), np.array([scorer.bias])]
    if isinstance(scorer, MlpScorer):
        params = []
        for w, b in zip(scorer.weights, scorer.biases):
            params.extend([w.copy(), b.copy()])
        return params
    raise NotTrainable(f"{type(scorer).__name__} has no trainable parameters")


def _rebuild(scorer: Scorer, params: list[np.ndarray]) -> Scorer:
    if isinstance(scorer, LinearScorer):
        return LinearScorer(weights=params[0], bias=float(params[1][0]))
    ws = tuple(params[0::2])
    bs = tuple(params[1::2])
    return MlpScorer(weights=ws, biases=bs)


def _forward(scorer: Scorer, feats: np.ndarray):
    """Scores plus the activation cache needed for backprop."""
    if isinstance(scorer, LinearScorer):
        return feats @ scorer.weights + scorer.bias, None
    acts = [feats]
    h = feats
    last = len(scorer.weights) - 1
    for i, (w, b) in enumerate(zip(scorer.weights, scorer.biases)):
        h = h @ w + b
        if i < last:
            h = np.maximum(h, 0.0)
        acts.append(h)
    return h[:, 0], acts


def _backward(scorer: Scorer, feats: np.ndarray, grad_scores: np.ndarray, acts) -> list[np.ndarray]:
    if isinstance(scorer, LinearScorer):
        return [feats.T @ grad_scores, np.array([grad_scores.sum()])]
    grads: list[np.ndarray] = []
    delta = grad_scores[:, None]
    last = len(scorer.weights) - 1
    for i in range(last, -1, -1):
        inp = acts[i]
        grads[:0] = [inp.T @ delta, delta.sum(axis=0)]
        if i > 0:
            delta = (delta @ scorer.weights[i].T) * (acts[i] > 0.0)
    return grads


def surrogate_objective(scorer, instances: InstanceSet, labels: SampledLabels, objective, kind: SurrogateKind) -> float:
    """Exact surrogate loss (full pair enumeration)."""
    scores = scorer.scores(instances) if isinstance(scorer, Scorer) else np.asarray(scorer, dtype=float)
    groups = _pair_groups(labels, objective)
    loss, _ = _loss_and_score_grad(scores, groups, kind, want_grad=False)
    return loss


def surrogate_gradient(scorer: Scorer, instances: InstanceSet, labels: SampledLabels, objective, kind: SurrogateKind) -> list[np.ndarray]:
    """Exact analytic gradient with respect to the scorer parameters."""
    if isinstance(scorer, TableScorer) or not isinstance(scorer, (LinearScorer, MlpScorer)):
        raise NotTrainable("only Linear and MLP scorers are trainable")
    scores, acts = _forward(scorer, instances.features)
    groups = _pair_groups(labels, objective)
    _, grad_scores = _loss_and_score_grad(scores, groups, kind, want_grad=True)
    return _backward(scorer, instances.features, grad_scores, acts)


@dataclass(frozen=True)
class TrainConfig:
    objective: object
    surrogate: SurrogateKind = field(default_factory=Logistic)
    optimizer: str = "adam"  # "adam" or "sgd"
    lr: float = 0.01
    epochs: int = 100
    pair_budget: int = 250_000
    seed: int = 0
    hidden: tuple = ()  # empty for a linear scorer
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.lr < 0:
            raise ValueError("learning rate must be non-negative")
        if self.epochs < 1:
            raise ValueError("need at least one epoch")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")


def init_scorer(d: int, hidden: tuple, seed: int) -> Scorer:
    """Zero-initialized linear scorer, or an MLP with uniform +-1/sqrt(fan_in) init."""
    if not hidden:
        return LinearScorer(weights=np.zeros(d), bias=0.0)
    rng = np.random.default_rng([int(seed), 10])
    sizes = [d, *hidden, 1]
    ws, bs = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        lim = 1.0 / np.sqrt(fan_in)
        ws.append(rng.uniform(-lim, lim, (fan_in, fan_out)))
        bs.append(rng.uniform(-lim, lim, fan_out))
    return MlpScorer(weights=tuple(ws), biases=tuple(bs))


def train(
    instances: InstanceSet,
    labels: SampledLabels,
    config: TrainConfig,
    eval_instances: InstanceSet | None = None,
    eval_labels: SampledLabels | None = None,
) -> tuple[Scorer, list[dict]]:
    """Full-batch training, one step per epoch, deterministic per seed.

    When the pair count exceeds the budget, each step draws a fresh seeded
    pair sample. The trace records the surrogate loss and per-label AUCs
    (train, and eval when given) after every step.
    """
    groups = _pair_groups(labels, config.objective)
    scorer = init_scorer(instances.d, config.hidden, config.seed)
    params = scorer_parameters(scorer)
    rng = np.random.default_rng([int(config.seed), 11])
    m_state = [np.zeros_like(p) for p in params]
    v_state = [np.zeros_like(p) for p in params]
    trace: list[dict] = []
    for epoch in range(config.epochs):
        scores, acts = _forward(scorer, instances.features)
        loss, grad_scores = _loss_and_score_grad(
            scores, groups, config.surrogate, want_grad=True, budget=config.pair_budget, rng=rng
        )
        grads = _backward(scorer, instances.features, grad_scores, acts)
        if config.optimizer == "sgd":
            params = [p - config.lr * g for p, g in zip(params, grads)]
        else:
            t = epoch + 1
            for idx, g in enumerate(grads):
                m_state[idx] = config.beta1 * m_state[idx] + (1 - config.beta1) * g
                v_state[idx] = config.beta2 * v_state[idx] + (1 - config.beta2) * g * g
                m_hat = m_state[idx] / (1 - config.beta1**t)
                v_hat = v_state[idx] / (1 - config.beta2**t)
                params[idx] = params[idx] - config.lr * m_hat / (np.sqrt(v_hat) + config.eps)
        scorer = _rebuild(scorer, params)
        row = {"epoch": epoch, "loss": loss}
        row["train"] = auc_report(scorer.scores(instances), labels)
        if eval_instances is not None and eval_labels is not None:
            row["eval"] = auc_report(scorer.scores(eval_instances), eval_labels)
        trace.append(row)
    return scorer, trace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rankagg import (
    CostMatrix,
    DegenerateLabel,
    EtaTable,
    InstanceSet,
    JointLabelModel,
    PriorVector,
    SampledLabels,
    Sum,
    Product,
    TableScorer,
    WeightedSum,
    aggregate_distribution,
    aggregate_labels,
)

eta_tables = arrays(
    np.float64,
    st.tuples(st.integers(1, 6), st.integers(1, 4)),
    elements=st.floats(0.0, 1.0, allow_nan=False),
).map(EtaTable)


def test_arrays_are_frozen():
    inst = InstanceSet(np.zeros((3, 2)))
    with pytest.raises(ValueError):
        inst.features[0, 0] = 1.0
    eta = EtaTable(np.full((2, 2), 0.5))
    with pytest.raises(ValueError):
        eta.eta[0, 0] = 0.0


def test_sampled_labels_reject_nonbinary():
    with pytest.raises(ValueError):
        SampledLabels(np.array([[0, 2]]))


def test_combos_use_label0_as_most_significant_bit():
    model = JointLabelModel.from_eta(EtaTable(np.full((1, 2), 0.5)))
    assert model.combos().tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]


def test_explicit_table_matches_independent_products():
    eta = EtaTable(np.array([[0.3, 0.9], [0.5, 0.1]]))
    tab = JointLabelModel.from_eta(eta).explicit_table()
    assert tab[0] == pytest.approx([0.7 * 0.1, 0.7 * 0.9, 0.3 * 0.1, 0.3 * 0.9])
    np.testing.assert_allclose(tab.sum(axis=1), 1.0)


def test_marginal_eta_roundtrip():
    eta = EtaTable(np.array([[0.3, 0.9], [0.5, 0.1], [0.0, 1.0]]))
    model = JointLabelModel.explicit(
        JointLabelModel.from_eta(eta).explicit_table(), K=2
    )
    np.testing.assert_allclose(model.marginal_eta().eta, eta.eta, atol=1e-12)


def test_explicit_table_validation():
    with pytest.raises(ValueError):
        JointLabelModel.explicit(np.array([[0.5, 0.6]]), K=1)
    with pytest.raises(ValueError):
        JointLabelModel.explicit(np.array([[0.5, 0.5, 0.0]]), K=2)


@settings(deadline=None)
@given(eta_tables)
def test_aggregate_distribution_rows_are_probability_vectors(eta):
    dist = aggregate_distribution(JointLabelModel.from_eta(eta), Sum())
    assert np.all(dist.probs >= -1e-12)
    np.testing.assert_allclose(dist.probs.sum(axis=1), 1.0, atol=1e-9)


@settings(deadline=None)
@given(eta_tables)
def test_aggregate_mean_equals_probability_sum(eta):
    dist = aggregate_distribution(JointLabelModel.from_eta(eta), Sum())
    np.testing.assert_allclose(dist.mean(), eta.eta.sum(axis=1), atol=1e-9)


def test_deterministic_eta_concentrates_the_aggregate():
    eta = EtaTable(np.array([[1.0, 0.0, 1.0], [0.0, 0.0, 0.0]]))
    dist = aggregate_distribution(JointLabelModel.from_eta(eta), Sum())
    assert dist.probs[0].tolist() == [0.0, 0.0, 1.0, 0.0]
    assert dist.probs[1].tolist() == [1.0, 0.0, 0.0, 0.0]


def test_product_distribution_is_all_ones_probability():
    eta = EtaTable(np.array([[0.5, 0.4]]))
    dist = aggregate_distribution(JointLabelModel.from_eta(eta), Product())
    assert dist.values.tolist() == [0.0, 1.0]
    assert dist.probs[0, 1] == pytest.approx(0.2)


def test_weighted_sum_labels_map_to_dense_ordinals():
    labels = SampledLabels(np.array([[1, 0], [0, 1], [1, 1]]))
    ordinal = aggregate_labels(labels, WeightedSum((2.0, 1.0)))
    # raw values (2, 1, 3) rank to (1, 0, 2)
    assert ordinal.tolist() == [1, 0, 2]


def test_sum_and_product_labels():
    labels = SampledLabels(np.array([[1, 0], [1, 1], [0, 0]]))
    assert aggregate_labels(labels, Sum()).tolist() == [1, 2, 0]
    assert aggregate_labels(labels, Product()).tolist() == [0, 1, 0]


def test_weighted_sum_distribution_covers_achievable_values():
    eta = EtaTable(np.array([[0.5, 0.5]]))
    dist = aggregate_distribution(JointLabelModel.from_eta(eta), WeightedSum((2.0, 1.0)))
    assert dist.values.tolist() == [0.0, 1.0, 2.0, 3.0]
    np.testing.assert_allclose(dist.probs[0], 0.25)


def test_cost_matrix_constructors_and_validation():
    u = CostMatrix.uniform(3)
    assert u.size == 3 and np.all(u.costs == 1.0)
    a = CostMatrix.absdiff(3)
    assert a.costs[2, 0] == 2.0 and a.costs[1, 0] == 1.0
    with pytest.raises(ValueError):
        CostMatrix.custom(np.array([[0.0, -1.0], [1.0, 0.0]]))
    with pytest.raises(ValueError):
        CostMatrix.custom(np.ones((1, 1)))


def test_prior_vector_degenerate_label_raises():
    priors = PriorVector.from_labels(SampledLabels(np.array([[1, 0], [1, 1]])))
    with pytest.raises(DegenerateLabel):
        priors.require_nondegenerate()
    ok = PriorVector(np.array([0.5, 0.25]))
    np.testing.assert_allclose(ok.require_nondegenerate(), [0.5, 0.25])


def test_table_scorer_rejects_nan_and_serves_values():
    scorer = TableScorer(np.array([1.0, np.inf, 0.0]))
    assert scorer.scores()[1] == np.inf
    with pytest.raises(ValueError):
        TableScorer(np.array([np.nan]))

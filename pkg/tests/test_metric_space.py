import numpy as np
import pytest

from conefix import ConeSpec, MetricSpec, check_metric_axioms, componentwise_metric, distance, scalar_metric
from conefix.errors import InvalidArgument


def test_distance_examples():
    s = scalar_metric(2)
    assert np.array_equal(distance((1, 2), (1, 2), s), [0.0])
    assert np.array_equal(distance((0, 0), (3, 4), s), [5.0])
    c = componentwise_metric(2)
    assert np.array_equal(distance((1, 5), (4, 3), c), [3.0, 2.0])


def test_sup_and_weighted_scalar():
    assert distance((0, 0), (3, 4), scalar_metric(2, norm="sup"))[0] == 4
    w = scalar_metric(2, norm="weighted", weights=[3, 1])
    assert distance((0, 0), (1, 2), w)[0] == pytest.approx(np.sqrt(13))


def test_spec_consistency():
    with pytest.raises(InvalidArgument):
        MetricSpec("scalar", 2, ConeSpec(2))
    with pytest.raises(InvalidArgument):
        MetricSpec("componentwise", 2, ConeSpec(1))
    with pytest.raises(InvalidArgument):
        distance((1, 2, 3), (1, 2), componentwise_metric(2))


@pytest.mark.parametrize("metric", [scalar_metric(3), scalar_metric(3, norm="sup"),
                                    componentwise_metric(3)])
def test_axioms_pass_on_random_points(metric, rng):
    pts = rng.normal(size=(50, 3))
    rep = check_metric_axioms(metric, pts)
    assert rep.passed, rep.to_dict()


def test_broken_metric_reports_symmetry_failure(rng):
    metric = scalar_metric(2)
    pts = rng.normal(size=(10, 2))
    rep = check_metric_axioms(metric, pts, distance_fn=lambda x, y: [x[0] - y[0]])
    assert not rep.passed
    assert rep.symmetry_failures


def test_axioms_needs_three_points():
    with pytest.raises(InvalidArgument):
        check_metric_axioms(scalar_metric(1), [[0.0], [1.0]])


def test_symmetry_is_bitwise(rng):
    for metric in (scalar_metric(3), componentwise_metric(3)):
        for _ in range(100):
            x, y = rng.normal(size=3) * 1e3, rng.normal(size=3)
            assert np.array_equal(distance(x, y, metric), distance(y, x, metric))

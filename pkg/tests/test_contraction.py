import numpy as np
import pytest

from conefix import (AffineSingle, BallMap, LinearComparator, TwoBranch, certify,
                     check_uniqueness_condition, componentwise_metric, sample_pairs, scalar_metric)
from conefix.contraction import DEFAULT_L_GRID, hypotheses_hold, verify_certificate
from conefix.errors import InvalidArgument, NoCertificateError

S1 = scalar_metric(1)


def _pairs(T, count=100, box=(-3, 3), seed=0):
    return sample_pairs(T, count, box, seed)


def test_hypotheses_formula():
    assert hypotheses_hold(0.5, 0.2, 1.0)
    assert not hypotheses_hold(0.5, 0.5, 1.0)
    assert not hypotheses_hold(0.4, 0.0, 3.0)


def test_default_grid():
    assert DEFAULT_L_GRID == (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)


def test_linear_map_certificate():
    T = AffineSingle(0.5, [1.7])
    cert = certify(T, S1, _pairs(T))
    assert cert.delta == pytest.approx(0.5, abs=1e-12)
    assert cert.L == 0.0 and cert.kappa == 1.0 and cert.hypotheses_hold


def test_single_valued_L0_is_lipschitz_estimate(rng):
    A = np.array([[0.3, 0.2], [-0.1, 0.4]])
    T = AffineSingle(A, [0.0, 1.0])
    pairs = [(rng.normal(size=2), rng.normal(size=2)) for _ in range(300)]
    cert = certify(T, scalar_metric(2), pairs, L_grid=[0.0])
    ratios = [np.linalg.norm(A @ (x - y)) / np.linalg.norm(x - y) for x, y in pairs]
    assert cert.delta == pytest.approx(max(ratios), rel=1e-12)
    assert cert.delta <= np.linalg.norm(A, 2) + 1e-12


def test_isometry_has_no_certificate():
    T = AffineSingle(1.0, [1.0])
    with pytest.raises(NoCertificateError) as info:
        certify(T, S1, _pairs(T))
    assert info.value.best_delta >= 1
    assert info.value.worst_pair is not None


def test_identical_pair_is_skipped():
    T = AffineSingle(0.5, [0.0])
    pairs = _pairs(T, 20)
    a = certify(T, S1, pairs)
    b = certify(T, S1, pairs + [(np.array([0.3]), np.array([0.3]))])
    assert (a.delta, a.L) == (b.delta, b.L)
    with pytest.raises(InvalidArgument):
        certify(T, S1, [(np.array([1.0]), np.array([1.0]))])


@pytest.mark.parametrize("T, metric", [
    (TwoBranch(0.5, [0], 0.5, [0.25]), S1),
    (BallMap([[0.5, 0.1], [0.0, 0.3]], [1, 0], 0.2), scalar_metric(2)),
    (BallMap(0.4, [1, 0], 0.2), componentwise_metric(2)),
])
def test_certificate_soundness(T, metric):
    pairs = sample_pairs(T, 150, (-3, 3), 1)
    cert = certify(T, metric, pairs)
    assert verify_certificate(cert, T, metric, pairs) == []
    assert all(e["slack"] >= -1e-10 for e in cert.evidence)
    assert cert.hypotheses_hold == hypotheses_hold(cert.delta, cert.L, cert.kappa)


def test_more_samples_never_lower_delta():
    T = BallMap(0.6, [0.2], 0.3)
    pairs = sample_pairs(T, 200, (-3, 3), 2)
    for L in (0.0, 0.3):
        small = certify(T, S1, pairs[:50], L_grid=[L]).delta
        large = certify(T, S1, pairs, L_grid=[L]).delta
        assert large >= small


def test_uniqueness_single_fixed_point():
    T = AffineSingle(0.5, [0.0])
    pairs = [(x, y) for x, y in _pairs(T) if not np.array_equal(x, y)]
    assert check_uniqueness_condition(T, S1, LinearComparator(0.4), pairs).holds
    res = check_uniqueness_condition(T, S1, LinearComparator(0.6), pairs)
    assert not res.holds and res.violating_pair is not None


@pytest.mark.parametrize("c", [0.05, 0.2, 0.4, 0.49, 0.6, 0.9])
def test_uniqueness_two_fixed_points_fails(c):
    T = TwoBranch(0.5, [0.0], 0.5, [0.25])
    res = check_uniqueness_condition(T, S1, LinearComparator(c), [(np.array([0.0]), np.array([0.5]))])
    assert not res.holds
    np.testing.assert_array_equal(res.violating_pair[0], [0.0])


def test_uniqueness_literal_hausdorff_form_misses_two_branch():
    # H(Tx, Ty) = |x - y| / 2 for the two parallel branches, so the literal
    # condition holds for c < 1/2 even though 0 and 1/2 are both fixed
    T = TwoBranch(0.5, [0.0], 0.5, [0.25])
    pair = [(np.array([0.0]), np.array([0.5]))]
    assert check_uniqueness_condition(T, S1, LinearComparator(0.4), pair, comparator="hausdorff").holds
    assert not check_uniqueness_condition(T, S1, LinearComparator(0.6), pair, comparator="hausdorff").holds


def test_uniqueness_rejects_equal_points():
    with pytest.raises(InvalidArgument):
        check_uniqueness_condition(AffineSingle(0.5, [0]), S1, LinearComparator(0.4),
                                   [(np.array([1.0]), np.array([1.0]))])


def test_comparator_domain():
    with pytest.raises(InvalidArgument):
        LinearComparator(0.0)
    assert np.array_equal(LinearComparator(0.5)(np.array([0.0, 2.0])), [0.0, 1.0])

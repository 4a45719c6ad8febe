import numpy as np
import pytest

from phaseret import (
    Autocorrelation,
    ExtremeDistances,
    GoodPairGraph,
    LagSet,
    SparseModelParams,
    SupportSet,
    autocorrelation,
    build_good_pair_graph,
    equivalent,
    extract_extremes,
    lag_set,
    random_sparse_signal,
    recover_support,
    solve_graph,
)
from phaseret.combinatorial import recover_signal
from phaseret.errors import (
    Disconnected,
    NegativeSquare,
    NoCandidate,
    NoOddCycle,
    RecoveryError,
    TooSmall,
)
from phaseret.signals import Signal


def _planted(n, positions, values):
    dense = np.zeros(n)
    dense[list(positions)] = values
    return Signal(n, dense)


# the worked instance used throughout: support {0,1,6,9}, values (2,-1,3,1)
WORKED = _planted(16, (0, 1, 6, 9), (2.0, -1.0, 3.0, 1.0))


def test_lag_set_worked_instance():
    a = autocorrelation(WORKED)
    assert lag_set(a).lags == frozenset({0, 1, 3, 5, 6, 8, 9})


def test_lag_set_zero_and_spike():
    assert lag_set(Autocorrelation(4, np.zeros(4))).lags == frozenset()
    spike = autocorrelation(_planted(4, (2,), (3.0,)))
    assert lag_set(spike).lags == frozenset({0})


def test_extract_extremes_worked_instance():
    ext = extract_extremes(lag_set(autocorrelation(WORKED)))
    assert (ext.d_1k, ext.d_2k, ext.d_12) == (9, 8, 1)
    assert (ext.d_1k_minus_1, ext.d_k_minus_1_k) == (6, 3)
    assert ext.d_2k_minus_1 == 5


def test_extract_extremes_too_small():
    with pytest.raises(TooSmall):
        extract_extremes(LagSet(frozenset({0, 5})))


def test_extract_extremes_no_candidate():
    # distances of {0,2,3,7} are {1,2,3,4,5,7}; every t below 5 has 5-t
    # realized as well, so the end-gap scan cannot terminate
    a = autocorrelation(_planted(8, (0, 2, 3, 7), (1.0, 2.0, -1.0, 3.0)))
    with pytest.raises(NoCandidate):
        extract_extremes(lag_set(a))


def test_recover_support_worked_instance():
    sup = recover_support(autocorrelation(WORKED))
    assert sup.indices == (0, 1, 6, 9)


def test_recover_support_orientation_normalized():
    reversed_x = Signal(16, WORKED.values[::-1].copy())
    sup = recover_support(autocorrelation(reversed_x))
    assert sup.indices == (0, 1, 6, 9)


def test_recover_support_shift_invariant():
    shifted = _planted(20, (4, 5, 10, 13), (2.0, -1.0, 3.0, 1.0))
    assert recover_support(autocorrelation(shifted)).indices == (0, 1, 6, 9)


def test_good_pair_graph_worked_instance_is_complete():
    a = autocorrelation(WORKED)
    graph = build_good_pair_graph(recover_support(a), a)
    weights = {(i, j): w for i, j, w in graph.edges}
    assert weights == pytest.approx(
        {
            (0, 1): -2.0,
            (0, 6): 6.0,
            (0, 9): 2.0,
            (1, 6): -3.0,
            (1, 9): -1.0,
            (6, 9): 3.0,
        }
    )


def test_good_pair_graph_drops_repeated_distances():
    # in {0,1,2} the distance 1 is realized twice, so only (0,2) survives
    x = _planted(5, (0, 1, 2), (1.0, 2.0, 5.0))
    graph = build_good_pair_graph(SupportSet(5, (0, 1, 2)), autocorrelation(x))
    assert [(i, j) for i, j, _ in graph.edges] == [(0, 2)]
    assert graph.edges[0][2] == pytest.approx(5.0)


def test_solve_graph_triangle():
    graph = GoodPairGraph(
        vertices=SupportSet(7, (0, 1, 6)),
        edges=((0, 1, -2.0), (0, 6, 6.0), (1, 6, -3.0)),
    )
    x = solve_graph(graph)
    np.testing.assert_allclose(x.values[[0, 1, 6]], [2.0, -1.0, 3.0])


def test_solve_graph_bipartite_rejected():
    single = GoodPairGraph(
        vertices=SupportSet(4, (0, 3)), edges=((0, 3, 2.0),)
    )
    with pytest.raises(NoOddCycle):
        solve_graph(single)
    path = GoodPairGraph(
        vertices=SupportSet(6, (0, 1, 5)),
        edges=((0, 1, 2.0), (1, 5, 3.0)),
    )
    with pytest.raises(NoOddCycle):
        solve_graph(path)


def test_solve_graph_disconnected():
    graph = GoodPairGraph(
        vertices=SupportSet(10, (0, 1, 2, 9)),
        edges=((0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)),
    )
    with pytest.raises(Disconnected):
        solve_graph(graph)


def test_solve_graph_negative_square():
    graph = GoodPairGraph(
        vertices=SupportSet(3, (0, 1, 2)),
        edges=((0, 1, 1.0), (1, 2, 1.0), (0, 2, -1.0)),
    )
    with pytest.raises(NegativeSquare):
        solve_graph(graph)


def test_graph_validation():
    with pytest.raises(ValueError):
        GoodPairGraph(vertices=SupportSet(4, (0, 1)), edges=((1, 0, 1.0),))
    with pytest.raises(ValueError):
        GoodPairGraph(vertices=SupportSet(4, (0, 1)), edges=((0, 1, 0.0),))
    with pytest.raises(ValueError):
        LagSet(frozenset({-1, 0}))
    with pytest.raises(ValueError):
        ExtremeDistances(d_1k=9, d_2k=8, d_12=2, d_1k_minus_1=6, d_k_minus_1_k=3)


def test_recover_signal_worked_instance_exact():
    x = recover_signal(autocorrelation(WORKED))
    np.testing.assert_allclose(x.values, WORKED.values, atol=1e-9)


def test_recover_signal_three_point():
    x = _planted(6, (0, 2, 5), (1.0, 2.0, 5.0))
    got = recover_signal(autocorrelation(x))
    assert equivalent(got, x, tol=1e-9)


def test_recover_signal_zero():
    got = recover_signal(Autocorrelation(5, np.zeros(5)))
    np.testing.assert_array_equal(got.values, np.zeros(5))


def test_recover_signal_spike():
    x = _planted(6, (3,), (-2.5,))
    got = recover_signal(autocorrelation(x))
    assert equivalent(got, x, tol=1e-9)


def test_recover_signal_two_point():
    x = _planted(4, (0, 3), (3.0, 4.0))
    got = recover_signal(autocorrelation(x))
    assert equivalent(got, x, tol=1e-9)


def test_recover_signal_rejects_bad_lag_structure():
    # the {0,2,3,7} support defeats the end-gap scan: a declared failure
    # is required, a silently wrong signal is not acceptable
    a = autocorrelation(_planted(8, (0, 2, 3, 7), (1.0, 2.0, -1.0, 3.0)))
    with pytest.raises(RecoveryError):
        recover_signal(a)


def test_recover_signal_soundness_on_random_draws():
    # whatever the outcome, a returned signal must reproduce the input
    # autocorrelation; failures must be declared, not wrong
    rng = np.random.default_rng(42)
    returned = 0
    for seed in rng.integers(0, 2**32, size=60):
        x = random_sparse_signal(SparseModelParams(n=256, s=6.0, seed=int(seed)))
        a = autocorrelation(x)
        try:
            got = recover_signal(a)
        except RecoveryError:
            continue
        returned += 1
        back = autocorrelation(got)
        assert float(np.max(np.abs(back.lags - a.lags))) <= 1e-6 * max(
            1.0, a.lags[0]
        )
    assert returned >= 40


def test_recover_signal_round_trip_rate():
    wins = 0
    for trial in range(30):
        x = random_sparse_signal(
            SparseModelParams(n=1024, s=5.0, seed=9000 + trial)
        )
        a = autocorrelation(x)
        try:
            wins += equivalent(recover_signal(a), x, tol=1e-6)
        except RecoveryError:
            pass
    assert wins >= 24


def test_end_gap_collision_probability_bound():
    # the end-gap difference collides with a realized distance with
    # probability O(s^3 / n); measure it directly on the support model
    rng = np.random.default_rng(99)
    n, s = 8192, 10
    hits = 0
    trials = 0
    while trials < 500:
        idx = np.flatnonzero(rng.random(n) < s / n)
        if idx.size < 4:
            continue
        trials += 1
        diff = abs((idx[-1] - idx[-2]) - (idx[1] - idx[0]))
        dists = np.abs(idx[:, None] - idx[None, :]).ravel()
        if diff in set(int(d) for d in dists):
            hits += 1
    assert hits / 500 <= 2 * s**3 / n

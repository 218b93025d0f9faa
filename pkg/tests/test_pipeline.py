import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pdpc import _backend
from pdpc.geometry import DpcParams, UsageError, priority_ranks
from pdpc.oracle import oracle_densities, oracle_dependent, oracle_labels
from pdpc.pipeline import (NOISE, STRATEGIES, compute_densities, find_dependent_points,
                           run_dpc, single_linkage_cluster)

CANON_PARAMS = DpcParams(1.0, 0.0, 5.0)


def test_densities_canonical(backend, canon):
    assert compute_densities(canon, 1.0, backend).tolist() == [3, 2, 2, 2, 2]
    assert compute_densities(canon, 0.5, backend).tolist() == [1] * 5
    assert compute_densities(canon, 100.0, backend).tolist() == [5] * 5


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_dependent_canonical(backend, canon, strategy):
    dep, delta = find_dependent_points(canon, [3, 2, 2, 2, 2], 0, strategy, backend)
    assert dep.tolist() == [-1, 0, 0, 1, 3]
    assert delta.tolist() == [math.inf, 1, 1, math.sqrt(181), 1]


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_single_point(backend, strategy):
    res = run_dpc([[2.0, 3.0]], CANON_PARAMS, strategy, backend=backend)
    assert res.lambda_ids == [None] and res.delta.tolist() == [math.inf]
    assert res.labels.tolist() == [1] and res.centers == [1]


def test_unknown_strategy(canon):
    with pytest.raises(UsageError):
        find_dependent_points(canon, [3, 2, 2, 2, 2], 0, "nope")
    with pytest.raises(UsageError):
        run_dpc(canon, CANON_PARAMS, "nope")


def test_linkage_canonical(backend, canon):
    res = run_dpc(canon, CANON_PARAMS, backend=backend)
    assert res.centers == [1, 4]
    assert res.labels.tolist() == [1, 1, 1, 4, 4]
    assert res.n_clusters == 2 and res.n_noise == 0


def test_linkage_tiny_delta_min(backend, canon):
    res = run_dpc(canon, DpcParams(1.0, 0.0, 0.5), backend=backend)
    assert res.centers == [1, 2, 3, 4, 5]
    assert res.labels.tolist() == [1, 2, 3, 4, 5]


def test_linkage_all_noise(backend, canon):
    res = run_dpc(canon, DpcParams(1.0, 10.0, 5.0), backend=backend)
    assert res.centers == [] and (res.labels == NOISE).all()


def test_params_echoed():
    p = DpcParams(0.02, 20, 0.2)
    X = np.random.default_rng(0).random((300, 3)) * 0.1
    res = run_dpc(X, p)
    assert res.params == p and res.strategy == "priority"
    assert set(res.timings) == {"build", "density", "dependent", "linkage"}


def check_result_invariants(X, res, params):
    n = len(X)
    rank = priority_ranks(res.rho)
    noise = res.rho < params.rho_min
    for i in range(n):
        j = res.dependent[i]
        if j < 0:
            continue
        assert rank[j] < rank[i] and not noise[j]
        d2 = ((X - X[i]) ** 2).sum(axis=1)
        assert res.delta[i] == math.sqrt(((X[i] - X[j]) ** 2).sum())
        assert not (d2[rank < rank[i]] < d2[j]).any()
    for i in np.flatnonzero(~noise):
        j, steps = i, 0
        while res.delta[j] < params.delta_min:
            j = res.dependent[j]
            steps += 1
            assert steps <= n
        assert j + 1 in res.centers
        assert res.labels[i] == res.labels[j]
    centers = np.array(res.centers, dtype=int) - 1
    assert len(set(res.labels[centers].tolist())) == len(centers)
    assert set(res.labels[~noise].tolist()) == set(res.labels[centers].tolist())


@given(st.integers(0, 2**32 - 1))
def test_pipeline_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    X = rng.random((int(rng.integers(1, 200)), int(rng.choice([2, 3]))))
    if seed % 2:
        X = np.round(X * 5) / 5
    params = DpcParams(float(rng.uniform(0.05, 0.4)), float(rng.integers(0, 4)),
                       float(rng.uniform(0.05, 0.5)))
    rho = oracle_densities(X, params.d_cut)
    dep, sq = oracle_dependent(X, rho, params.rho_min)
    labels = oracle_labels(rho, dep, np.sqrt(sq), params.rho_min, params.delta_min)
    for b in _backend.available():
        for s in STRATEGIES:
            res = run_dpc(X, params, s, backend=b)
            assert np.array_equal(res.rho, rho)
            assert np.array_equal(res.dependent, dep)
            assert np.array_equal(res.labels, labels)
    check_result_invariants(X, res, params)


def test_linkage_rejects_inconsistent_links(canon):
    with pytest.raises(UsageError):
        single_linkage_cluster(canon, [3, 2, 2, 2, 2], [-1, -1, 0, 1, 3],
                               [math.inf, 1, 1, 1, 1], CANON_PARAMS)


@pytest.mark.parametrize("threads", [1, 2, 8])
def test_thread_count_does_not_change_output(threads):
    X = np.random.default_rng(9).random((5000, 2))
    p = DpcParams(0.02, 2, 0.05)
    ref = run_dpc(X, p, threads=1)
    res = run_dpc(X, p, threads=threads)
    assert res.threads == threads
    for f in ("rho", "dependent", "delta", "labels"):
        assert np.array_equal(getattr(ref, f), getattr(res, f))

import json

import numpy as np
import pytest

from bmspec.core import cyclic_symmetry_residual, delta
from bmspec.errors import PreconditionError
from bmspec.search import (
    SearchConfig,
    decomposability_search,
    planted_instance,
    random_symmetric_instance,
)
from bmspec.spectral import svd3


def test_delta_is_decomposable():
    for n in (2, 3):
        rep = decomposability_search(delta(n), SearchConfig(restarts=5))
        assert rep.decomposable and rep.residual < 1e-8


def test_planted_instances_are_found():
    rng = np.random.default_rng(0)
    hits = 0
    for _ in range(10):
        A, _, _ = planted_instance(2, rng)
        rep = decomposability_search(A, SearchConfig(restarts=20))
        hits += rep.residual < 1e-6
    assert hits >= 9


def test_planted_larger_size():
    A, params, W = planted_instance(5, np.random.default_rng(1))
    assert A.shape == (5, 5, 5) and params.n == 5
    rep = decomposability_search(A, SearchConfig(restarts=10))
    assert rep.decomposable
    assert np.allclose(rep.W[:4, 4], 0.0) and np.allclose(rep.W[4, :4], 0.0)


def test_random_instances_are_symmetric():
    A = random_symmetric_instance(3, np.random.default_rng(2))
    assert cyclic_symmetry_residual(A) == 0.0


def test_rejects_non_symmetric():
    A = np.random.default_rng(3).standard_normal((2, 2, 2))
    with pytest.raises(PreconditionError):
        decomposability_search(A)


def test_report_is_deterministic_and_serializable():
    A = random_symmetric_instance(2, np.random.default_rng(4))
    cfg = SearchConfig(restarts=4, seed=9)
    a = decomposability_search(A, cfg).to_dict()
    b = decomposability_search(A, cfg).to_dict()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert a["verdict"] in ("decomposable", "not found")


def test_parallel_matches_serial():
    A, _, _ = planted_instance(4, np.random.default_rng(5))
    serial = decomposability_search(A, SearchConfig(restarts=3, seed=1, jobs=1)).to_dict()
    parallel = decomposability_search(A, SearchConfig(restarts=3, seed=1, jobs=2)).to_dict()
    assert serial == parallel


def test_svd3_on_planted_instance():
    A, _, _ = planted_instance(2, np.random.default_rng(6))
    rep = svd3(A, SearchConfig(restarts=10))
    d = rep.to_dict()
    assert len(d["alpha"]) == 2 and len(d["symmetry_residuals"]) == 3
    json.dumps(d)
    assert rep.residual >= 0.0

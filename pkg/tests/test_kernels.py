import importlib
import os
import subprocess
import sys

import numpy as np
import pytest

from fuzzysched.fuzzy import default_engine

from conftest import BACKENDS
from oracles import trapezoid_np


def _random_terms(rng, n, lo=0.0, hi=10.0):
    pts = np.sort(rng.uniform(lo, hi, size=(n, 4)), axis=1)
    # flat tops and vertical edges
    flat = rng.random(n) < 0.3
    pts[flat, 2] = pts[flat, 1]
    edge = rng.random(n) < 0.2
    pts[edge, 1] = pts[edge, 0]
    return pts


def _sampled(params, levels, lo, hi, samples=400_000):
    dx = (hi - lo) / samples
    xs = lo + dx * (np.arange(samples) + 0.5)
    mu = np.zeros(samples)
    for p, h in zip(params, levels):
        mu = np.maximum(mu, np.minimum(h, trapezoid_np(xs, *p)))
    return mu.sum() * dx, (xs * mu).sum() * dx


def test_clipped_centroid_matches_sampling(kernel):
    rng = np.random.default_rng(3)
    for _ in range(60):
        n = int(rng.integers(1, 7))
        params = _random_terms(rng, n)
        levels = rng.uniform(0, 1, n)
        levels[rng.random(n) < 0.2] = 0.0
        levels[rng.random(n) < 0.2] = 1.0
        area, moment = kernel.clipped_centroid(params, levels, 0.0, 10.0)
        s_area, s_moment = _sampled(params, levels, 0.0, 10.0)
        assert area == pytest.approx(s_area, abs=1e-4)
        assert moment == pytest.approx(s_moment, abs=1e-3)


def test_clipped_centroid_respects_universe(kernel):
    params = np.array([[-5.0, 0.0, 0.0, 5.0]])
    area, moment = kernel.clipped_centroid(params, [1.0], 0.0, 10.0)
    assert area == pytest.approx(2.5)
    assert moment / area == pytest.approx(5 / 3)


def test_zero_levels(kernel):
    params = np.array([[0.0, 1.0, 2.0, 3.0]])
    assert kernel.clipped_centroid(params, [0.0], 0.0, 10.0) == (0.0, 0.0)


def test_degree(kernel):
    assert kernel.degree(0, 0, 0, 2.5, 0) == 1.0
    assert kernel.degree(0, 2.5, 2.5, 5, 1.25) == 0.5
    assert kernel.degree(0, 2.5, 2.5, 5, 6) == 0.0


def test_backends_agree():
    if len(BACKENDS) < 2:
        pytest.skip("compiled kernel not built")
    py, cy = (importlib.import_module(m) for m in BACKENDS)
    engine = default_engine()
    args = engine._pack_args()
    X = np.random.default_rng(11).uniform([-1, -1], [11, 30], size=(2000, 2))
    a = py.Model(*args).infer_batch(X)
    b = cy.Model(*args).infer_batch(X)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)
    assert py.Model(*args).levels([4, 9]) == pytest.approx(cy.Model(*args).levels([4, 9]))


def test_model_arity(kernel):
    model = kernel.Model(*default_engine()._pack_args())
    with pytest.raises(ValueError):
        model.infer([1.0])
    with pytest.raises(ValueError):
        model.infer_batch(np.zeros((3, 3)))


def test_pure_python_switch():
    code = "import fuzzysched._core as c; print(c.BACKEND)"
    env = dict(os.environ, FUZZYSCHED_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"

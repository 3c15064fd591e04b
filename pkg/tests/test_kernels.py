import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dashift import _pykernels, kernels

ckernels = pytest.importorskip("dashift._ckernels")


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([kernels.CROSS_ENTROPY, kernels.ZERO_ONE]))
def test_expected_losses_backends_agree(seed, kind):
    rng = np.random.default_rng(seed)
    A, K, P = rng.integers(1, 8), rng.integers(2, 5), rng.integers(1, 6)
    w = rng.random((A, K)) * (rng.random((A, K)) > 0.3)
    w /= max(w.sum(), 1e-12)
    preds = rng.random((P, A, K)) * (rng.random((P, A, K)) > 0.2)
    preds /= np.maximum(preds.sum(axis=2, keepdims=True), 1e-12)
    a = ckernels.expected_losses(w, preds, kind)
    b = _pykernels.expected_losses(w, preds, kind)
    assert np.array_equal(np.isinf(a), np.isinf(b))
    np.testing.assert_allclose(a[np.isfinite(a)], b[np.isfinite(b)], rtol=1e-12, atol=1e-14)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from([0.0, 0.25, 0.5, 1.0, float("inf")]), min_size=2, max_size=6), st.data())
def test_hdh_sup_backends_agree(ra, data):
    rb = data.draw(st.lists(st.sampled_from([0.0, 0.3, 0.7, float("inf")]), min_size=len(ra), max_size=len(ra)))
    a = ckernels.hdh_sup(np.array(ra), np.array(rb))
    b = _pykernels.hdh_sup(np.array(ra), np.array(rb))
    assert a[1] == b[1]
    assert a[0] == pytest.approx(b[0])


def test_hdh_sup_skips_double_infinity():
    value, skipped = _pykernels.hdh_sup(np.array([np.inf, np.inf]), np.array([0.0, 1.0]))
    assert skipped == 1 and value == 0.0


def test_pure_python_switch():
    import os
    import subprocess
    import sys

    env = dict(os.environ, DASHIFT_PURE_PYTHON="1")
    code = ("from dashift import kernels, verify; assert kernels.BACKEND == 'python'; "
            "assert all(r.passed for r in verify.run('hdiv', range(20)))")
    subprocess.run([sys.executable, "-c", code], env=env, check=True)

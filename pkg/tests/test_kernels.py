import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mhdblowup import kernels
from mhdblowup.fields import compile_terms

from strategies import fields

PARAMS = {"a": 0.37, "abar": 1.3, "k": -0.8}
needs_ext = pytest.mark.skipif(kernels.eval_terms_cython is None, reason="compiled kernel not built")


def _points(seed, n=64):
    rng = np.random.default_rng(seed)
    x1, x2, x3 = (rng.uniform(0.2, 1.8, n) for _ in range(3))
    s = rng.uniform(0.05, 1.5, n)
    return x1, x2, x3, s


@needs_ext
@given(fields(max_terms=4, with_t=True), st.integers(0, 2**16))
def test_backends_agree(f, seed):
    coeffs, exps = compile_terms(f, PARAMS)
    x1, x2, x3, s = _points(seed)
    ref = kernels.eval_terms_numpy(coeffs, exps, x1, x2, x3, s, 1.7)
    got = kernels.eval_terms_cython(coeffs, exps, x1, x2, x3, s, 1.7)
    np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-12)


def test_empty_table_is_zero():
    x1, x2, x3, s = _points(0, 5)
    out = kernels.eval_terms(np.empty(0), np.empty((0, 6)), x1, x2, x3, s, 1.0)
    assert np.array_equal(out, np.zeros(5))


def test_backend_selection_env():
    env = dict(os.environ, MHDBLOWUP_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from mhdblowup import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    assert kernels.BACKEND in ("cython", "numpy")

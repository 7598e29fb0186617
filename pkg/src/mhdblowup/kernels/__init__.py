"""Term-table evaluation kernels.

``eval_terms(coeffs, exps, x1, x2, x3, s, tstar)`` sums
``coeffs[j] * x1^e0 * x2^e1 * x3^e2 * R^e3 * s^e4 * tstar^e5`` over the rows of
``exps`` at every point.  The compiled extension is used when it was built;
set ``MHDBLOWUP_PURE_PYTHON=1`` to force the numpy fallback.
"""

import os

from ._pykernel import eval_terms as eval_terms_numpy

try:
    from ._ckernel import eval_terms as eval_terms_cython
except ImportError:  # extension not built
    eval_terms_cython = None

_force_pure = os.environ.get("MHDBLOWUP_PURE_PYTHON", "").lower() in ("1", "true", "yes")
if eval_terms_cython is not None and not _force_pure:
    eval_terms, BACKEND = eval_terms_cython, "cython"
else:
    eval_terms, BACKEND = eval_terms_numpy, "numpy"

__all__ = ["eval_terms", "eval_terms_numpy", "eval_terms_cython", "BACKEND"]

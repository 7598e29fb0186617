import numpy as np


def _power(cache, name, base, e):
    key = (name, e)
    val = cache.get(key)
    if val is None:
        val = base ** int(e) if e == int(e) else np.power(base, e)
        cache[key] = val
    return val


def eval_terms(coeffs, exps, x1, x2, x3, s, tstar):
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    x3 = np.asarray(x3, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    R = x1 * x1 + x2 * x2
    bases = (("x1", x1), ("x2", x2), ("x3", x3), ("R", R), ("s", s))
    out = np.zeros(x1.shape, dtype=np.float64)
    cache: dict = {}
    for j in range(len(coeffs)):
        term = np.full(x1.shape, coeffs[j] * float(tstar) ** exps[j, 5] if exps[j, 5] else coeffs[j])
        for col, (name, base) in enumerate(bases):
            e = float(exps[j, col])
            if e != 0.0:
                term *= _power(cache, name, base, e)
        out += term
    return out

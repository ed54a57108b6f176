"""History-sum kernels with a numba path and a pure-numpy fallback.

Set ``FRACTRACE_DISABLE_NUMBA=1`` before import to force the numpy path.
"""

import os

import numpy as np

from . import _numpy_impl

BACKEND = "numpy"
_impl = _numpy_impl

if os.environ.get("FRACTRACE_DISABLE_NUMBA", "0").lower() not in ("1", "true", "yes"):
    try:
        from . import _numba_impl

        _impl = _numba_impl
        BACKEND = "numba"
    except ImportError:  # pragma: no cover
        pass


def _as2d(values):
    v = np.ascontiguousarray(values, dtype=np.float64)
    if v.ndim == 1:
        return v[:, None], True
    return v.reshape(v.shape[0], -1), False


def _call(name, t, values, alpha):
    if np.iscomplexobj(values):
        return _call(name, t, np.real(values), alpha) + 1j * _call(name, t, np.imag(values), alpha)
    v, flat = _as2d(values)
    out = getattr(_impl, name)(np.ascontiguousarray(t, dtype=np.float64), v, float(alpha))
    return out[:, 0] if flat else out.reshape(np.shape(values))


def rl_apply(t, values, alpha):
    return _call("rl_apply", t, values, alpha)


def adjoint_apply(t, values, alpha):
    return _call("adjoint_apply", t, values, alpha)


def l1_apply(t, values, alpha):
    return _call("l1_apply", t, values, alpha)


def marchaud_apply(t, values, alpha):
    return _call("marchaud_apply", t, values, alpha)

"""Hankel functions of the first kind, orders 0 and 1, real positive argument.

    H_0^(1)(x) = J_0(x) + i Y_0(x)
    H_1^(1)(x) = J_1(x) + i Y_1(x)

These are the only special functions the scattering kernels need. Both
accept scalars or arrays; every element must be finite and strictly
positive (the functions blow up logarithmically at 0 and are not needed
for complex or negative arguments here).
"""

import numpy as np
import scipy.special

from .errors import DomainError


def _validated(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.size == 0:
        raise DomainError("empty argument")
    if not np.all(np.isfinite(arr)):
        raise DomainError("argument must be finite")
    if np.any(arr <= 0.0):
        raise DomainError(f"argument must be > 0, got min {arr.min()}")
    return arr


def hankel1_0(x):
    """H_0^(1)(x) = J_0(x) + i Y_0(x) for x > 0.

    Parameters
    ----------
    x : float or array_like
        Strictly positive argument(s).

    Returns
    -------
    complex or np.ndarray
        Scalar input gives a Python complex; arrays give complex arrays.
    """
    arr = _validated(x)
    out = scipy.special.hankel1(0, arr)
    return complex(out) if np.isscalar(x) or np.ndim(x) == 0 else out


def hankel1_1(x):
    """H_1^(1)(x) = J_1(x) + i Y_1(x) for x > 0.

    Same conventions as :func:`hankel1_0`.
    """
    arr = _validated(x)
    out = scipy.special.hankel1(1, arr)
    return complex(out) if np.isscalar(x) or np.ndim(x) == 0 else out

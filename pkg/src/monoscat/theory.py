"""Structural checks on factorized data operators.

Two facts are verified numerically.

First, a data operator factorized as f = g t g^H with a complex
symmetric (not self-adjoint) middle operator can vanish identically even
though g has full row rank. The standard range identity

    range(f_#^{1/2}) = range(g),   f_# = |Re f| + Im f

then fails: the left side is trivial while the right side is not. A
4-dimensional example suffices; swapping the middle operator for the
identity restores the identity and serves as a control.

Second, a coercivity bound: for matrices t and k acting on the same
space, the best constant c with

    |u|^2 <= c (|t u|^2 + |k u|^2)   for all u

is 1/s_min^2, where s_min is the smallest singular value of the stacked
matrix [t; k]. The bound holds exactly when the stack is injective.
"""

import logging
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionMismatch

logger = logging.getLogger(__name__)

# Relative rank cutoff shared by the range comparisons.
RANK_RTOL: float = 1e-12
# Relative injectivity cutoff for the coercivity stack.
INJECTIVITY_RTOL: float = 1e-12


@dataclass(frozen=True)
class FactorizationTriple:
    """Factorization f = g t g^H of a data operator.

    Attributes
    ----------
    g : np.ndarray, shape (m, n)
        Outer factor (measurement side).
    t : np.ndarray, shape (n, n)
        Middle operator.
    f : np.ndarray, shape (m, m)
        The product g t g^H.
    """

    g: np.ndarray
    t: np.ndarray
    f: np.ndarray


def build_counterexample() -> FactorizationTriple:
    """Factorization with full-rank outer factor but identically zero product.

    g selects the first two coordinates of a 4-dimensional space; t is
    the antidiagonal permutation, which swaps that subspace with its
    complement. The product g t g^H is exactly the 2 x 2 zero matrix
    while g has rank 2.
    """
    g = np.zeros((2, 4), dtype=complex)
    g[0, 0] = 1.0
    g[1, 1] = 1.0
    t = np.zeros((4, 4), dtype=complex)
    for i in range(4):
        t[i, 3 - i] = 1.0
    f = g @ t @ g.conj().T
    return FactorizationTriple(g=g, t=t, f=f)


def _hermitian_abs(a: np.ndarray) -> np.ndarray:
    """|A| for Hermitian A, by eigenvalue magnitude reassembly."""
    w, v = np.linalg.eigh(a)
    return v @ (np.abs(w)[:, None] * v.conj().T)


def _psd_sqrt(a: np.ndarray) -> np.ndarray:
    """Principal square root of a Hermitian PSD matrix (negatives clipped)."""
    w, v = np.linalg.eigh(a)
    return v @ (np.sqrt(np.clip(w, 0.0, None))[:, None] * v.conj().T)


def _range_basis(a: np.ndarray, rel_tol: float) -> np.ndarray:
    """Orthonormal basis of the column space, columns of the result."""
    u, s, _ = np.linalg.svd(a)
    if s.size == 0 or s[0] == 0.0:
        return u[:, :0]
    return u[:, : int(np.sum(s > rel_tol * s[0]))]


def verify_range_identity_failure(
    triple: FactorizationTriple = None, phase: float = 0.0, rel_tol: float = RANK_RTOL
) -> dict:
    """Compare range(g) with range(f_#^{1/2}) for a factorization.

    f_# = |Re(e^{i phase} f)| + Im f, with Re/Im the self-adjoint real
    and imaginary parts. The ranges agree exactly when their dimensions
    match and every column of g lies in the span of f_#^{1/2}.

    Parameters
    ----------
    triple : FactorizationTriple, optional
        Defaults to :func:`build_counterexample`.
    phase : float
        Rotation applied to f before taking the real part.
    rel_tol : float
        Relative rank cutoff.

    Returns
    -------
    dict
        Keys ``rank_g``, ``rank_fsharp_sqrt``, ``identity_holds``. For
        the built-in counterexample: ``{2, 0, False}``.
    """
    if triple is None:
        triple = build_counterexample()
    f = np.asarray(triple.f, dtype=complex)
    if f.ndim != 2 or f.shape[0] != f.shape[1]:
        raise DimensionMismatch(f"f must be square, got shape {f.shape}")
    rot = np.exp(1j * phase) * f
    re_part = linalg.hermitian_part(rot)
    im_part = linalg.hermitian_part(f / 1j)
    f_sharp = _hermitian_abs(re_part) + im_part
    sqrt_f = _psd_sqrt(f_sharp)

    rank_g = linalg.numerical_rank(triple.g, rel_tol)
    rank_sqrt = linalg.numerical_rank(sqrt_f, rel_tol)
    if rank_g != rank_sqrt:
        holds = False
    elif rank_g == 0:
        holds = True
    else:
        basis_g = _range_basis(np.asarray(triple.g, dtype=complex), rel_tol)
        basis_f = _range_basis(sqrt_f, rel_tol)
        residual = basis_g - basis_f @ (basis_f.conj().T @ basis_g)
        holds = bool(np.linalg.norm(residual, 2) < 1e-10)
    return {"rank_g": rank_g, "rank_fsharp_sqrt": rank_sqrt, "identity_holds": holds}


def coercivity_bound(t_mat, k_mat) -> dict:
    """Best constant in |u|^2 <= c (|t u|^2 + |k u|^2).

    Parameters
    ----------
    t_mat, k_mat : array_like
        Matrices with the same number of columns.

    Returns
    -------
    dict
        ``c_best`` (1 / s_min^2 of the stacked matrix, ``inf`` when the
        stack has a kernel) and ``holds`` (stack injective within a
        relative cutoff).
    """
    t_arr = np.atleast_2d(np.asarray(t_mat, dtype=complex))
    k_arr = np.atleast_2d(np.asarray(k_mat, dtype=complex))
    if t_arr.shape[1] != k_arr.shape[1]:
        raise DimensionMismatch(
            f"column counts differ: t has {t_arr.shape[1]}, k has {k_arr.shape[1]}"
        )
    stacked = np.vstack([t_arr, k_arr])
    svals = np.linalg.svd(stacked, compute_uv=False)
    s_min = float(svals[-1])
    s_max = float(svals[0])
    holds = bool(s_max > 0.0 and s_min > INJECTIVITY_RTOL * s_max)
    c_best = float("inf") if s_min == 0.0 else 1.0 / s_min**2
    return {"c_best": c_best, "holds": holds}

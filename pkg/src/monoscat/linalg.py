"""Dense complex linear algebra used by every operator in the package.

Provides the four primitives the scattering and monotonicity code relies
on: a pivot-checked LU solve, the Hermitian part of a square matrix,
Hermitian eigenvalues, and numerical rank.

Hermitian eigenvalues go through the real embedding

    A = X + iY  ->  [[X, -Y], [Y, X]]   (2d x 2d real symmetric)

whose spectrum is that of A with every eigenvalue doubled. The doubled
pairs are collapsed after sorting, and a pair that fails to match within
tolerance raises: the pairing acts as a built-in self-check on the
eigensolve.
"""

import logging
import warnings

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NoConvergence, NotHermitian, SingularMatrix

logger = logging.getLogger(__name__)

# Relative pivot floor for LU: pivots below PIVOT_RTOL * max row 1-norm
# mean the system is numerically singular.
PIVOT_RTOL: float = 1e-14
# Entrywise Hermitian deviation allowed on eigensolver input.
HERMITIAN_RTOL: float = 1e-12
# Allowed mismatch inside one doubled eigenvalue pair of the embedding.
PAIR_RTOL: float = 1e-8


def lu_solve(a: np.ndarray, b: np.ndarray, pivot_rtol: float = PIVOT_RTOL) -> np.ndarray:
    """Solve a x = b by LU with partial pivoting and a pivot check.

    Parameters
    ----------
    a : np.ndarray, shape (n, n)
        Complex (or real) coefficient matrix.
    b : np.ndarray, shape (n,) or (n, k)
        One or many right-hand sides; all columns share one factorization.
    pivot_rtol : float
        Relative pivot floor: a pivot with magnitude below
        ``pivot_rtol * max_i sum_j |a_ij|`` raises SingularMatrix.

    Returns
    -------
    np.ndarray
        Solution with the same shape as ``b``.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"coefficient matrix must be square, got {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise DimensionMismatch(f"rhs length {b.shape[0]} != system size {a.shape[0]}")
    if not np.all(np.isfinite(a)) or not np.all(np.isfinite(b)):
        raise ValueError("non-finite entries in linear system")

    scale = np.abs(a).sum(axis=1).max()  # max row 1-norm
    if scale == 0.0:
        raise SingularMatrix("zero matrix")
    with warnings.catch_warnings():
        # Exact zero pivots surface as our own SingularMatrix below.
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if pivots.min() < pivot_rtol * scale:
        raise SingularMatrix(
            f"pivot {pivots.min():.3e} below {pivot_rtol:.1e} * row norm {scale:.3e}"
        )
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)


def hermitian_part(a: np.ndarray) -> np.ndarray:
    """Return (a + a^H) / 2, exactly Hermitian entrywise.

    IEEE addition commutes, so the direct formula already satisfies
    r[i, j] == conj(r[j, i]) exactly, including a real diagonal.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"hermitian_part needs a square matrix, got {a.shape}")
    return (a + a.conj().T) / 2.0


def hermitian_eigenvalues(
    a: np.ndarray,
    hermitian_rtol: float = HERMITIAN_RTOL,
    pair_rtol: float = PAIR_RTOL,
) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, ascending.

    Parameters
    ----------
    a : np.ndarray, shape (d, d)
        Hermitian to ``hermitian_rtol * max|a|`` entrywise.
    hermitian_rtol, pair_rtol : float
        Input tolerance and doubled-pair self-check tolerance.

    Returns
    -------
    np.ndarray, shape (d,)
        Real eigenvalues sorted ascending.

    Raises
    ------
    NotHermitian
        If the input deviates from its conjugate transpose.
    NoConvergence
        If the underlying solver fails or a doubled pair of the real
        embedding mismatches beyond ``pair_rtol * max|a|``.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"eigenvalue input must be square, got {a.shape}")
    d = a.shape[0]
    if d == 0:
        return np.empty(0)
    amax = np.abs(a).max()
    deviation = np.abs(a - a.conj().T).max()
    if deviation > hermitian_rtol * amax:
        raise NotHermitian(
            f"deviation {deviation:.3e} exceeds {hermitian_rtol:.1e} * max|a| = "
            f"{hermitian_rtol * amax:.3e}"
        )

    x, y = a.real, a.imag
    embedded = np.block([[x, -y], [y, x]])  # (2d, 2d) real symmetric
    try:
        doubled = np.linalg.eigvalsh(embedded)  # ascending (2d,)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc

    pairs = doubled.reshape(d, 2)  # adjacent pairs after sorting
    mismatch = np.abs(pairs[:, 1] - pairs[:, 0]).max()
    if mismatch > pair_rtol * max(amax, 1e-300):
        raise NoConvergence(
            f"doubled-pair mismatch {mismatch:.3e} exceeds {pair_rtol:.1e} * max|a|"
        )
    return pairs.mean(axis=1)


def numerical_rank(a: np.ndarray, rel_tol: float = 1e-12) -> int:
    """Number of singular values above ``rel_tol`` times the largest.

    Singular values are taken as square roots of the eigenvalues of
    a^H a, so the routine shares the Hermitian eigensolver above. The
    Gram product squares the conditioning: eigenvalues below
    n * eps * lambda_max are pure roundoff and are treated as zero, so
    singular values smaller than roughly sqrt(n * eps) relative to the
    largest are not resolvable on this route regardless of ``rel_tol``.
    """
    if rel_tol <= 0:
        raise ValueError(f"rel_tol must be positive, got {rel_tol}")
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise DimensionMismatch(f"numerical_rank needs a matrix, got shape {a.shape}")
    gram = hermitian_part(a.conj().T @ a)  # exact Hermitian
    lam = hermitian_eigenvalues(gram)
    lam_max = lam.max(initial=0.0)
    if lam_max <= 0.0:
        return 0
    noise_floor = gram.shape[0] * np.finfo(float).eps * lam_max
    lam = np.where(lam < noise_floor, 0.0, lam)
    sigma = np.sqrt(lam)
    return int(np.count_nonzero(sigma > rel_tol * np.sqrt(lam_max)))

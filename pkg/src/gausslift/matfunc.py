"""Matrix special functions used by the phase formulas.

Everything here is pure: principal branches throughout, no state.  Branch
continuity along a path is handled by the generator-lifting layer, never here.

The ``complex_det`` / ``complex_trace`` pair evaluates the determinant and
trace of the holomorphic part of a map that commutes with a complex structure
J: in a basis where J takes the standard form ``[[0, I], [-I, 0]]`` such a map
has the block shape ``[[K1, K2], [-K2, K1]]`` and the returned value is
``det(K1 + i K2)`` (resp. the trace).  The value is basis independent.
"""

import numpy as np
import scipy.linalg

from .errors import (
    CommutationError,
    InvalidStructureError,
    MatrixOverflowError,
    SpectrumOnCutError,
)

#: relative tolerance for the [K, J] = 0 check before block extraction
COMMUTATION_RTOL = 1e-8

#: below this norm phi1 switches to its truncated power series
PHI1_SERIES_NORM = 1e-3


def _as_square(a, name):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidStructureError(f"{name} must be a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidStructureError(f"{name} contains non-finite entries")
    return a


def _eig_on_cut(a, include_zero):
    """Return an eigenvalue of ``a`` on the closed negative real axis, or None."""
    vals = np.linalg.eigvals(a)
    scale = max(1.0, np.max(np.abs(vals)))
    for lam in vals:
        if abs(lam) < 1e-12 * scale:
            if include_zero:
                return lam
            continue
        if lam.real < 0 and abs(lam.imag) <= 1e-12 * abs(lam):
            return lam
    return None


def mat_exp(a):
    """Matrix exponential with an explicit overflow check."""
    a = _as_square(a, "mat_exp argument")
    out = scipy.linalg.expm(a)
    if not np.all(np.isfinite(out)):
        raise MatrixOverflowError(
            f"matrix exponential overflowed (argument norm {np.linalg.norm(a):.3g})"
        )
    return out


def mat_log_principal(a):
    """Principal matrix logarithm.

    The spectrum must avoid the closed negative real axis; the offending
    eigenvalue is reported otherwise.
    """
    a = _as_square(a, "mat_log_principal argument")
    bad = _eig_on_cut(a, include_zero=True)
    if bad is not None:
        raise SpectrumOnCutError(
            f"eigenvalue {bad} lies on the logarithm branch cut", eigenvalue=bad
        )
    out = scipy.linalg.logm(a)
    if np.isrealobj(a) and np.iscomplexobj(out):
        if np.max(np.abs(out.imag)) < 1e-12 * max(1.0, np.max(np.abs(out.real))):
            out = out.real
    return out


def mat_sqrt_principal(a):
    """Principal matrix square root (symmetric fast path for symmetric input)."""
    a = _as_square(a, "mat_sqrt_principal argument")
    if np.isrealobj(a) and np.max(np.abs(a - a.T)) < 1e-12 * max(1.0, np.max(np.abs(a))):
        w, v = np.linalg.eigh(a)
        if np.min(w) <= 0:
            raise SpectrumOnCutError(
                f"eigenvalue {np.min(w)} lies on the square-root branch cut",
                eigenvalue=np.min(w),
            )
        return (v * np.sqrt(w)) @ v.T
    bad = _eig_on_cut(a, include_zero=True)
    if bad is not None:
        raise SpectrumOnCutError(
            f"eigenvalue {bad} lies on the square-root branch cut", eigenvalue=bad
        )
    out = scipy.linalg.sqrtm(a)
    if np.isrealobj(a) and np.iscomplexobj(out):
        if np.max(np.abs(out.imag)) < 1e-12 * max(1.0, np.max(np.abs(out.real))):
            out = out.real
    return out


def phi1_entire(k):
    """The entire function (e^K - I) K^{-1}, exact also for singular K.

    Evaluated by the truncated power series sum_j K^j/(j+1)! below
    ``PHI1_SERIES_NORM`` and through the exponential of the augmented block
    matrix [[K, I], [0, 0]] otherwise; both routes avoid forming K^{-1}.
    """
    k = _as_square(k, "phi1_entire argument")
    n = k.shape[0]
    eye = np.eye(n, dtype=k.dtype)
    if np.linalg.norm(k, 2) < PHI1_SERIES_NORM:
        out = eye.copy()
        term = eye.copy()
        for j in range(1, 12):
            term = term @ k / (j + 1)
            out = out + term
            if np.max(np.abs(term)) < 1e-18:
                break
        return out
    aug = np.zeros((2 * n, 2 * n), dtype=np.result_type(k.dtype, float))
    aug[:n, :n] = k
    aug[:n, n:] = eye
    return mat_exp(aug)[:n, n:]


def standardize_complex_structure(j):
    """Basis S with S^{-1} J S in standard form [[0, I], [-I, 0]].

    Columns are (Re v_1..Re v_N, Im v_1..Im v_N) built from the +i
    eigenvectors v of J.
    """
    j = _as_square(j, "complex structure")
    n2 = j.shape[0]
    if n2 % 2:
        raise InvalidStructureError("complex structure must act on even dimension")
    if np.max(np.abs(j @ j + np.eye(n2))) > 1e-8:
        raise InvalidStructureError("matrix does not square to -identity")
    vals, vecs = np.linalg.eig(j)
    plus = [i for i in range(n2) if vals[i].imag > 0]
    if len(plus) != n2 // 2:
        raise InvalidStructureError("complex structure lacks an N-dimensional +i eigenspace")
    v = vecs[:, plus]
    s = np.hstack([v.real, v.imag])
    n = n2 // 2
    jstd = np.zeros((n2, n2))
    jstd[:n, n:] = np.eye(n)
    jstd[n:, :n] = -np.eye(n)
    resid = np.max(np.abs(np.linalg.solve(s, j @ s) - jstd))
    if resid > 1e-8:
        raise InvalidStructureError(f"standardizing basis residual {resid:.3g}")
    return s


def _is_standard_j(j):
    n = j.shape[0] // 2
    jstd = np.zeros_like(j)
    jstd[:n, n:] = np.eye(n)
    jstd[n:, :n] = -np.eye(n)
    return np.array_equal(j, jstd) or np.max(np.abs(j - jstd)) < 1e-14


def complexify(k, j):
    """Holomorphic N x N block K1 + i K2 of a J-commuting map K."""
    k = _as_square(k, "complexify argument")
    j = _as_square(j, "complex structure")
    if k.shape != j.shape:
        raise InvalidStructureError("operand and complex structure differ in shape")
    scale = max(1.0, np.linalg.norm(k) * np.linalg.norm(j))
    resid = np.linalg.norm(k @ j - j @ k)
    if resid > COMMUTATION_RTOL * scale:
        raise CommutationError(
            f"operand does not commute with the complex structure (residual {resid:.3g})"
        )
    n = k.shape[0] // 2
    if _is_standard_j(j):
        ks = k
    else:
        s = standardize_complex_structure(j)
        ks = np.linalg.solve(s, k @ s)
    return ks[:n, :n] + 1j * ks[:n, n:]


def complex_det(k, j):
    """det of the holomorphic block of a J-commuting map (basis independent)."""
    return complex(np.linalg.det(complexify(k, j)))


def complex_trace(k, j):
    """Trace of the holomorphic block of a J-commuting map (basis independent)."""
    return complex(np.trace(complexify(k, j)))


def wrap_angle(x):
    """Reduce an angle (or array of angles) to (-pi, pi]."""
    arr = np.asarray(x, dtype=float)
    out = np.mod(arr, 2.0 * np.pi)
    out = np.where(out > np.pi, out - 2.0 * np.pi, out)
    return float(out) if arr.ndim == 0 else out


def imag_trace_log(a, j):
    """Im of the trace of the principal log of the holomorphic block of ``a``.

    Computed as the sum of principal arguments of the eigenvalues of the
    complexified block, which is the imaginary part of ``complex_trace(log a)``
    without forming a matrix logarithm.  Unreduced: the result can exceed
    (-pi, pi] when several modes contribute.
    """
    ac = complexify(a, j)
    vals = np.linalg.eigvals(ac)
    scale = max(1.0, np.max(np.abs(vals)))
    for lam in vals:
        if abs(lam) < 1e-13 * scale or (lam.real < 0 and abs(lam.imag) <= 1e-13 * abs(lam)):
            raise SpectrumOnCutError(
                f"eigenvalue {lam} lies on the logarithm branch cut", eigenvalue=lam
            )
    return float(np.sum(np.angle(vals)))

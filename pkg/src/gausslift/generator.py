"""Lifting quadratic Hamiltonians (h, f, c) to lifted triples (M, z, Psi).

The phase of the exponentiated quadratic part is obtained by tracking the
continuous square root of the inverse holomorphic determinant along the path
t -> e^{tK}, starting from +1 at t = 0.  A closed form is available as an
accelerated path for diagonalizable generators with purely imaginary spectrum.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import zeta as _riemann_zeta

from .errors import (
    InputError,
    InvalidStructureError,
    NumericalDomainError,
    PathSingularityError,
    ResolventSingularError,
    SpectrumOnCutError,
)
from .matfunc import complex_det, mat_exp, mat_sqrt_principal, phi1_entire
from .metaplectic import cocycle_eta
from .inhomogeneous import LiftedGaussian
from .phase_space import Species, delta_y_z, split_cd

#: spectral radius below which the odd power series for beta is used (its
#: poles sit at 2 pi i k, so the series converges comfortably up to here)
_BETA_SERIES_RADIUS = 4.0

_TRACK_START_STEPS = 64
_TRACK_MAX_STEPS = 2 ** 16
_TRACK_CONVERGENCE = 1e-10
_TRACK_MAX_STEP_ANGLE = np.pi / 4


@dataclass(frozen=True, eq=False)
class QuadraticHamiltonian:
    """Coefficients (h, f, c) of a general quadratic Hamiltonian.

    h is real symmetric for bosons and real antisymmetric for fermions;
    the linear term f exists for bosons only.
    """

    h: np.ndarray
    f: Optional[np.ndarray] = None
    c: float = 0.0
    species: Species = Species.BOSON

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] % 2:
            raise InputError(f"h must be square with even dimension, got {h.shape}")
        scale = max(1.0, np.max(np.abs(h)))
        if self.species is Species.BOSON:
            if np.max(np.abs(h - h.T)) > 1e-12 * scale:
                raise InputError("bosonic h must be symmetric")
        else:
            if np.max(np.abs(h + h.T)) > 1e-12 * scale:
                raise InputError("fermionic h must be antisymmetric")
        f = self.f
        if f is not None:
            f = np.asarray(f, dtype=float)
            if f.shape != (h.shape[0],):
                raise InputError(f"f must have shape {(h.shape[0],)}, got {f.shape}")
            if self.species is Species.FERMION and np.any(f):
                raise InputError("fermions admit no linear term")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "c", float(self.c))

    @property
    def f_or_zero(self):
        return np.zeros(self.h.shape[0]) if self.f is None else self.f

    def scaled(self, t):
        """Parameters of H t, so that e^{-i (Ht)} = e^{-i H t}."""
        return QuadraticHamiltonian(
            h=self.h * t, f=None if self.f is None else self.f * t,
            c=self.c * t, species=self.species,
        )


def _beta_series_coefficients(count=48):
    # coefficient of x^(2k-1) in (x - sinh x)/(4(1 - cosh x)) is
    # k * B_{2k} / (2k)! = 2 k (-1)^{k+1} zeta(2k) / (2 pi)^{2k}
    ks = np.arange(1, count + 1, dtype=float)
    return 2.0 * ks * (-1.0) ** (ks + 1) * _riemann_zeta(2 * ks) / (2 * np.pi) ** (2 * ks)


_BETA_COEFFS = _beta_series_coefficients()


def _beta_function(kmat):
    """(K - sinh K)(I - cosh K)^{-1} / 4 with the removable zero handled."""
    kmat = np.asarray(kmat, dtype=float)
    n = kmat.shape[0]
    eye = np.eye(n)
    rho = float(np.max(np.abs(np.linalg.eigvals(kmat)))) if kmat.any() else 0.0
    if rho < _BETA_SERIES_RADIUS:
        ksq = kmat @ kmat
        acc = _BETA_COEFFS[-1] * eye
        for c in _BETA_COEFFS[-2::-1]:
            acc = c * eye + ksq @ acc
        return kmat @ acc
    import scipy.linalg

    den = eye - scipy.linalg.coshm(kmat)
    if np.linalg.cond(den) > 1e10:
        raise ResolventSingularError(
            "I - cosh K is singular (eigenvalue of K near 2 pi i k) and the "
            "series radius is exceeded"
        )
    num = kmat - scipy.linalg.sinhm(kmat)
    return 0.25 * np.linalg.solve(den, num)


def alpha_beta(kmat):
    """The pair alpha(K) = K (e^K - I)^{-1} and beta(K) = (K - sinh K)(I - cosh K)^{-1}/4.

    alpha is the inverse of the entire function phi1; it fails exactly when
    e^K - I is singular beyond the kernel of K (eigenvalue 2 pi i k, k != 0).
    """
    kmat = np.asarray(kmat, dtype=float)
    p = phi1_entire(kmat)
    sv = np.linalg.svd(p, compute_uv=False)
    if sv[-1] < 1e-12 * max(sv[0], 1.0):
        raise ResolventSingularError(
            "e^K - I is singular beyond ker K (eigenvalue 2 pi i k); no branch of alpha"
        )
    return np.linalg.inv(p), _beta_function(kmat)


def z_from_hf(h, f, k):
    """Displacement of e^{-iH}: z = Omega phi1(-K)^T f with K = Omega h.

    Entire in K, so singular h needs no special handling; agrees with the
    f (e^{-Omega h} - I) h^{-1} contraction whenever h is invertible.
    """
    h = np.asarray(h, dtype=float)
    f = np.zeros(k.dim) if f is None else np.asarray(f, dtype=float)
    if not np.any(f):
        return np.zeros(k.dim)
    kgen = k.omega @ h
    return k.omega @ (phi1_entire(-kgen).T @ f)


def sigma_map(kgen, k):
    """Sigma(K) = Y_{e^K} + 4 beta(K), the quadratic phase kernel of the lift."""
    kgen = np.asarray(kgen, dtype=float)
    m = mat_exp(kgen)
    try:
        y = delta_y_z(m, k).y
    except NumericalDomainError as exc:
        raise ResolventSingularError(
            "first term of Sigma is singular (element unitarily orthogonal to identity)"
        ) from exc
    return y + 4.0 * _beta_function(kgen)


def _holomorphic_det_path_value(kgen, k, t, cache):
    m = cache.get(t)
    if m is None:
        m = mat_exp(t * kgen)
        cache[t] = m
    c = (m - k.j @ m @ k.j) / 2.0
    return complex_det(c, k.j)


class _Refine(Exception):
    def __init__(self, message, t_bad=None):
        super().__init__(message)
        self.t_bad = t_bad


def _tracked_angle(kgen, k, steps, cache):
    ts = [i / steps for i in range(steps + 1)]
    vals = np.array([_holomorphic_det_path_value(kgen, k, t, cache) for t in ts])
    mags = np.abs(vals)
    worst = int(np.argmin(mags))
    if mags[worst] < 1e-10 * max(np.max(mags), 1e-30):
        raise _Refine("determinant nearly vanishes at a sample point", t_bad=ts[worst])
    increments = np.angle(vals[1:] / vals[:-1])
    if np.max(np.abs(increments)) >= _TRACK_MAX_STEP_ANGLE:
        raise _Refine("phase increment exceeds pi/4")
    return float(np.sum(increments))


def vacuum_phase_tracked(kgen, k, steps=_TRACK_START_STEPS):
    """Measured vacuum phase of e^{K-hat} by continuous square-root tracking.

    Tracks the angle of the holomorphic determinant of C_{e^{tK}} along
    t in [0, 1], halves it, and applies the species sign (inverse determinant
    for bosons).  The grid doubles until two consecutive refinements agree to
    1e-10 and every per-step increment stays below pi/4; persistent zeros of
    the determinant raise a path-singularity error.
    """
    kgen = np.asarray(kgen, dtype=float)
    if not kgen.any():
        return 1.0 + 0.0j
    sign = -1.0 if k.species is Species.BOSON else 1.0
    steps = max(int(steps), 4)
    cache = {}
    prev = None
    last_refine = None
    last_zero = None  # (t, steps) of the previous near-zero sample
    while steps <= _TRACK_MAX_STEPS:
        try:
            theta = _tracked_angle(kgen, k, steps, cache)
        except _Refine as exc:
            if exc.t_bad is not None:
                if last_zero is not None and abs(exc.t_bad - last_zero[0]) <= 2.0 / last_zero[1]:
                    raise PathSingularityError(
                        f"determinant vanishes persistently near t = {exc.t_bad:.6g} "
                        "on the tracking path"
                    ) from exc
                last_zero = (exc.t_bad, steps)
            last_refine = exc
            steps *= 2
            prev = None
            continue
        phase = np.exp(0.5j * sign * theta)
        if prev is not None and abs(phase - prev) < _TRACK_CONVERGENCE:
            return complex(phase)
        prev = phase
        steps *= 2
    if last_refine is not None:
        raise PathSingularityError(
            f"phase tracking failed at {_TRACK_MAX_STEPS} steps: {last_refine}"
        )
    raise PathSingularityError("phase tracking did not converge within the step cap")


def vacuum_phase_stable(kgen, k):
    """Closed-form measured phase for diagonalizable, purely imaginary spectrum.

    Builds the adapted complex structure from K by normalizing its eigenvalues
    to +-i (flipping signs where needed to keep -J~ Omega positive definite),
    then evaluates Tr(K J~)/4 + eta(T^{-1} e^K, T)/2 with T = sqrt(-J~ J).
    """
    if k.species is not Species.BOSON:
        raise InputError("the stable closed form is implemented for bosons")
    kgen = np.asarray(kgen, dtype=float)
    vals, vecs = np.linalg.eig(kgen)
    scale = float(np.max(np.abs(vals)))
    if scale == 0.0:
        raise SpectrumOnCutError("zero generator: |K|^{-1} undefined", eigenvalue=0.0)
    if np.max(np.abs(vals.real)) > 1e-9 * scale:
        raise SpectrumOnCutError(
            "spectrum is not purely imaginary", eigenvalue=vals[np.argmax(np.abs(vals.real))]
        )
    if np.min(np.abs(vals)) < 1e-12 * scale:
        raise SpectrumOnCutError("zero eigenvalue: |K|^{-1} undefined", eigenvalue=0.0)
    if np.linalg.cond(vecs) > 1e10:
        raise NumericalDomainError("generator is too close to non-diagonalizable")
    vinv = np.linalg.inv(vecs)
    plus = [i for i in range(len(vals)) if vals[i].imag > 0]
    contributions = []
    for idx in plus:
        contributions.append(2.0 * np.real(1j * np.outer(vecs[:, idx], vinv[idx, :])))
    signs = [1.0] * len(plus)
    jtilde = sum(s * c for s, c in zip(signs, contributions))
    form = -(jtilde @ k.omega)
    for p, idx in enumerate(plus):
        x = np.real(vecs[:, idx])
        y = np.imag(vecs[:, idx])
        block = np.array([[x @ form @ x, x @ form @ y], [y @ form @ x, y @ form @ y]])
        if np.min(np.linalg.eigvalsh((block + block.T) / 2)) <= 0:
            signs[p] = -1.0
    jtilde = sum(s * c for s, c in zip(signs, contributions))
    eye = np.eye(k.dim)
    if np.max(np.abs(jtilde @ jtilde + eye)) > 1e-8:
        raise InvalidStructureError("adapted structure fails J~^2 = -I")
    if np.max(np.abs(jtilde @ k.omega @ jtilde.T - k.omega)) > 1e-8:
        raise InvalidStructureError("adapted structure is not symplectic-compatible")
    form = -(jtilde @ k.omega)
    if np.min(np.linalg.eigvalsh((form + form.T) / 2)) <= 0:
        raise InvalidStructureError("-J~ Omega is not positive definite after sign fixing")
    t_map = mat_sqrt_principal(-(jtilde @ k.j))
    m = mat_exp(kgen)
    t_inv = np.linalg.inv(t_map)
    # Both cocycle corrections of the change of reference structure are needed
    # for cross-method equivalence with the tracked phase; the second vanishes
    # whenever T already commutes the evolution into a passive one.
    arg = 0.25 * np.trace(kgen @ jtilde)
    arg += 0.5 * cocycle_eta(t_inv, m, k)
    arg += 0.5 * cocycle_eta(t_inv @ m, t_map, k)
    return complex(np.exp(1j * arg))


def lift_from_gqh(ham, k, method="tracked", steps=_TRACK_START_STEPS):
    """Lift e^{-iH} for a bosonic H = (h, f, c) to its triple (M, z, Psi).

    M = e^{Omega h}, z = z_from_hf, and Psi conjugates the measured phase:
    Psi = Phi* e^{ic} e^{-i z omega Sigma(K) z / 4}.  ``method`` selects the
    phase engine: "tracked" (default), "stable", or "auto" to try the closed
    form first and fall back to tracking.
    """
    if ham.species is not Species.BOSON or k.species is not Species.BOSON:
        raise InputError("generator lifting covers bosons")
    kgen = k.omega @ ham.h
    m = mat_exp(kgen)
    z = z_from_hf(ham.h, ham.f, k)
    if not kgen.any():
        phase = 1.0 + 0.0j
    elif method == "tracked":
        phase = vacuum_phase_tracked(kgen, k, steps=steps)
    elif method == "stable":
        phase = vacuum_phase_stable(kgen, k)
    elif method == "auto":
        try:
            phase = vacuum_phase_stable(kgen, k)
        except (NumericalDomainError, InvalidStructureError):
            phase = vacuum_phase_tracked(kgen, k, steps=steps)
    else:
        raise InputError(f"unknown phase method {method!r}")
    if np.any(z):
        quad = 0.25 * z @ k.omega_inv @ (sigma_map(kgen, k) @ z)
    else:
        quad = 0.0
    psi = np.conj(phase) * np.exp(1j * (ham.c - quad))
    return LiftedGaussian(m=m, z=z, psi=psi, k=k)


def gqh_overlap_analytic(ham, k, method="tracked"):
    """Full complex <0| e^{-iH} |0>: measured phase times closed-form modulus.

    The modulus is sqrt(e^{-z g (I + delta)^{-1} z} / |complex_det(C_M)|).
    """
    lifted = lift_from_gqh(ham, k, method=method)
    m, z = lifted.m, lifted.z
    delta = delta_y_z(m, k).delta
    zq = z @ k.metric_inv @ np.linalg.solve(np.eye(k.dim) + delta, z)
    c_part, _ = split_cd(m, k)
    modulus = np.sqrt(np.exp(-zq) / abs(complex_det(c_part, k.j)))
    return modulus * np.conj(lifted.psi)

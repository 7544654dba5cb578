"""Inhomogeneous lifted elements (M, z, Psi) and their exact composition.

The stored phase follows the convention that the measured vacuum phase of the
represented unitary is ``Psi*``.  The displacement subgroup stores the operator
prefactor angle ``theta`` directly, so its embedding into lifted triples is
``(z, theta) -> (I, z, e^{-i theta})``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, NumericalDomainError
from .matfunc import imag_trace_log, wrap_angle
from .metaplectic import circle_function, mp_lift
from .phase_space import KahlerStructure, Species, delta_y_z, validate_group_element


@dataclass(frozen=True, eq=False)
class Displacement:
    """Displacement-group element: vector z and prefactor angle theta."""

    z: np.ndarray
    phase: float = 0.0

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        if z.ndim != 1 or not np.all(np.isfinite(z)) or not np.isfinite(self.phase):
            raise InputError("displacement needs a finite vector and angle")
        object.__setattr__(self, "z", z)


@dataclass(frozen=True, eq=False)
class LiftedGaussian:
    """Inhomogeneous element (M, z, Psi); |Psi| = 1, M a group element."""

    m: np.ndarray
    z: np.ndarray
    psi: complex
    k: KahlerStructure = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        z = np.asarray(self.z, dtype=float)
        psi = complex(self.psi)
        ok, residual = validate_group_element(m, self.k, tol=1e-8)
        if not ok:
            raise InputError(f"matrix is not a group element (residual {residual:.3g})")
        if z.shape != (self.k.dim,):
            raise InputError(f"z must have shape {(self.k.dim,)}, got {z.shape}")
        if abs(abs(psi) - 1.0) > 1e-10:
            raise InputError(f"|Psi| = {abs(psi)} is not on the unit circle")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "psi", psi)

    def is_identity(self, tol=0.0):
        return (
            np.max(np.abs(self.m - np.eye(self.k.dim))) <= tol
            and np.max(np.abs(self.z)) <= tol
            and abs(self.psi - 1.0) <= tol
        )


def ig_identity(k):
    return LiftedGaussian(m=np.eye(k.dim), z=np.zeros(k.dim), psi=1.0 + 0.0j, k=k)


def disp_multiply(d1, d2, k):
    """(z1, t1)(z2, t2) = (z1 + z2, t1 + t2 + omega(z1, z2)/2); bosons only."""
    if k.species is not Species.BOSON:
        raise InputError("fermions admit no displacements")
    phase = d1.phase + d2.phase + 0.5 * k.omega_bilinear(d1.z, d2.z)
    return Displacement(z=d1.z + d2.z, phase=phase)


def displacement_to_gaussian(d, k):
    """Embed a displacement as a lifted triple; Psi = e^{-i theta}.

    The conjugation reflects the measured-phase convention: the operator
    e^{i theta} D(z) has vacuum phase e^{i theta}, and the stored Psi is its
    conjugate.
    """
    if k.species is not Species.BOSON:
        raise InputError("fermions admit no displacements")
    return LiftedGaussian(
        m=np.eye(k.dim), z=d.z, psi=np.exp(-1j * d.phase), k=k
    )


def gamma_phase(m, z, k):
    """Displaced-squeezing phase omega(z, Y_M z) / 4."""
    z = np.asarray(z, dtype=float)
    if not np.any(z):
        return 0.0
    y = delta_y_z(np.asarray(m, dtype=float), k).y
    return 0.25 * k.omega_bilinear(z, y @ z)


def dsq_overlap(m, z, k):
    """Full vacuum overlap of D(z) S(T, 1):
    det(I - Y^2)^{1/8} e^{-z g (I+Y) z / 4} e^{i gamma}."""
    m = np.asarray(m, dtype=float)
    z = np.asarray(z, dtype=float)
    y = delta_y_z(m, k).y
    eye = np.eye(k.dim)
    det = np.linalg.det(eye - y @ y)
    if det <= 0:
        raise NumericalDomainError("det(I - Y^2) is not positive")
    quad = 0.25 * z @ k.metric_inv @ ((eye + y) @ z)
    gamma = 0.25 * k.omega_bilinear(z, y @ z)
    return det ** 0.125 * np.exp(-quad) * np.exp(1j * gamma)


def _eta_via_y(m1, m2, k):
    # Result-1 form of the homogeneous cocycle: Im Tr-bar log(I - Y_{M1^-1} Y_{M2}).
    # Y maps exist for every group element, unlike the C^-1 D form.
    y1 = delta_y_z(np.linalg.inv(m1), k).y
    y2 = delta_y_z(m2, k).y
    return imag_trace_log(np.eye(k.dim) - y1 @ y2, k.j)


def zeta_cocycle(m1, z1, m2, z2, k):
    """Inhomogeneous cocycle of Result-type composition:

    eta(M1, M2)/2 + gamma(M1, z1) + gamma(M2, z2)
    - gamma(M1 M2, z1 + M1 z2) - omega(z1, M1 z2)/2,

    with eta evaluated through Y maps.  Unreduced; wrap only in comparisons.
    """
    m1 = np.asarray(m1, dtype=float)
    m2 = np.asarray(m2, dtype=float)
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    eta = _eta_via_y(m1, m2, k)
    m1z2 = m1 @ z2
    zeta = 0.5 * eta
    zeta += gamma_phase(m1, z1, k) + gamma_phase(m2, z2, k)
    zeta -= gamma_phase(m1 @ m2, z1 + m1z2, k)
    zeta -= 0.5 * k.omega_bilinear(z1, m1z2)
    return float(zeta)


def ig_multiply(a, b):
    """(M1, z1, Psi1)(M2, z2, Psi2) = (M1 M2, z1 + M1 z2, Psi1 Psi2 e^{i zeta})."""
    k = a.k
    _check_same_reference(a, b)
    if a.is_identity():
        return b
    if b.is_identity():
        return a
    zeta = zeta_cocycle(a.m, a.z, b.m, b.z, k)
    return LiftedGaussian(
        m=a.m @ b.m,
        z=a.z + a.m @ b.z,
        psi=a.psi * b.psi * np.exp(1j * zeta),
        k=k,
    )


def ig_decompose(u):
    """Split U = e^{i theta} D(z) S(M, psi) with psi the principal lift.

    Returns (theta, z, lifted) with e^{i theta} = Psi* psi e^{-i gamma(M, z)}.
    """
    lifted = mp_lift(u.m, u.k, branch=+1)
    gamma = gamma_phase(u.m, u.z, u.k)
    theta = float(np.angle(np.conj(u.psi) * lifted.psi * np.exp(-1j * gamma)))
    return theta, u.z.copy(), lifted


def ig_from_parts(theta, z, lifted):
    """Rebuild the lifted triple from (theta, z, (M, psi))."""
    gamma = gamma_phase(lifted.m, z, lifted.k)
    psi = lifted.psi * np.exp(-1j * (theta + gamma))
    return LiftedGaussian(m=lifted.m, z=np.asarray(z, dtype=float), psi=psi, k=lifted.k)


def ig_inverse(u):
    """Group inverse: phase solved from U U^{-1} = identity."""
    minv = np.linalg.inv(u.m)
    zinv = -(minv @ u.z)
    zeta = zeta_cocycle(u.m, u.z, minv, zinv, u.k)
    psi = np.conj(u.psi * np.exp(1j * zeta))
    return LiftedGaussian(m=minv, z=zinv, psi=psi, k=u.k)


def sd_commute(m, z):
    """Displacement after pulling the squeezing through: S D(z) = D(Mz) S."""
    return np.asarray(m, dtype=float) @ np.asarray(z, dtype=float)


def _check_same_reference(a, b):
    if a.k is b.k:
        return
    if (
        a.k.species is not b.k.species
        or a.k.dim != b.k.dim
        or np.max(np.abs(a.k.j - b.k.j)) > 1e-12
        or np.max(np.abs(a.k.omega - b.k.omega)) > 1e-12
    ):
        raise InputError("operands carry different Kähler references")


__all__ = [
    "Displacement",
    "LiftedGaussian",
    "circle_function",
    "disp_multiply",
    "displacement_to_gaussian",
    "dsq_overlap",
    "gamma_phase",
    "ig_decompose",
    "ig_from_parts",
    "ig_identity",
    "ig_inverse",
    "ig_multiply",
    "sd_commute",
    "wrap_angle",
    "zeta_cocycle",
]

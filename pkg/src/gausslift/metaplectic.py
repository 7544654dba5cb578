"""Homogeneous double cover: circle function, cocycle, Cartan split, lifts.

Convention, fixed once by the oracle-calibration suite: the circle function is
``phi(M) = complex_det(C_M) / |complex_det(C_M)|`` exactly as written, a lift
stores ``psi`` with ``psi^2 = phi(M)``, and the measured vacuum phase of the
represented operator is ``psi*`` for bosons and ``psi`` for fermions.  The
squared measured phase therefore equals ``phi(M)^(±1)`` with the minus sign
for bosons.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericalDomainError, UnitarilyOrthogonalError
from .matfunc import complex_det, imag_trace_log, mat_sqrt_principal
from .phase_space import KahlerStructure, delta_y_z, split_cd, validate_group_element

#: tolerance for the psi^2 = phi(M) membership check of a lifted element
LIFT_PHASE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class LiftedSymplectic:
    """Double-cover element (M, psi) with psi^2 = phi(M)."""

    m: np.ndarray
    psi: complex
    k: KahlerStructure

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        psi = complex(self.psi)
        ok, residual = validate_group_element(m, self.k, tol=1e-8)
        if not ok:
            raise InputError(f"matrix is not a group element (residual {residual:.3g})")
        if abs(abs(psi) - 1.0) > 1e-10:
            raise InputError(f"|psi| = {abs(psi)} is not on the unit circle")
        phi = circle_function(m, self.k)
        if abs(psi * psi - phi) > LIFT_PHASE_TOL:
            raise InputError(
                f"psi^2 deviates from the circle phase by {abs(psi * psi - phi):.3g}"
            )
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "psi", psi)


def circle_function(m, k):
    """Unit-modulus phase of the holomorphic determinant of C_M."""
    c, _ = split_cd(m, k)
    det = complex_det(c, k.j)
    if abs(det) < 1e-12:
        raise UnitarilyOrthogonalError(
            "holomorphic determinant of C_M vanishes (unitarily orthogonal element)"
        )
    phi = det / abs(det)
    if phi.imag == 0.0:
        phi = complex(phi.real, 0.0)  # normalize -0.0 so sqrt(-1) = +i
    return phi


def cocycle_eta(m1, m2, k):
    """Homogeneous cocycle Im Tr-bar log(I - Z_{M1} Z_{M2^{-1}}).

    Returned unreduced (a sum over modes); reduce mod 2pi only in comparisons.
    Requires both Z maps to exist, i.e. invertible C parts.
    """
    m1 = np.asarray(m1, dtype=float)
    m2 = np.asarray(m2, dtype=float)
    z1 = delta_y_z(m1, k).z
    z2 = delta_y_z(np.linalg.inv(m2), k).z
    if z1 is None or z2 is None:
        raise NumericalDomainError("cocycle undefined: a Z map does not exist (singular C)")
    arg = np.eye(k.dim) - z1 @ z2
    return imag_trace_log(arg, k.j)


def cartan(m, k):
    """Polar-type split M = T u with T = sqrt(delta_M) and u passive."""
    m = np.asarray(m, dtype=float)
    delta = delta_y_z(m, k).delta
    t = mat_sqrt_principal(delta)
    u = np.linalg.solve(t, m)
    return t, u


def mp_lift(m, k, branch=+1):
    """Lift M to (M, psi) with psi = branch * principal sqrt of phi(M)."""
    if branch not in (+1, -1):
        raise InputError("branch must be +1 or -1")
    phi = circle_function(np.asarray(m, dtype=float), k)
    return LiftedSymplectic(m=m, psi=branch * np.sqrt(phi), k=k)


def mp_multiply(a, b):
    """Double-cover product (M1 M2, psi1 psi2 e^{i eta/2})."""
    if a.k is not b.k and (
        a.k.species is not b.k.species
        or a.k.dim != b.k.dim
        or np.max(np.abs(a.k.j - b.k.j)) > 1e-12
        or np.max(np.abs(a.k.omega - b.k.omega)) > 1e-12
    ):
        raise InputError("operands carry different Kähler references")
    eta = cocycle_eta(a.m, b.m, a.k)
    psi = a.psi * b.psi * np.exp(0.5j * eta)
    return LiftedSymplectic(m=a.m @ b.m, psi=psi, k=a.k)

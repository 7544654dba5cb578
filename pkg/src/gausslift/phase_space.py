"""Kähler structures and the J-relative decompositions of group elements.

The real quadrature basis is canonical for storage.  The complex-basis matrix
forms exist only as a conversion view for tests.
"""

import enum
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import InputError, InvalidStructureError, NumericalDomainError


class Species(enum.Enum):
    """Mode statistics: selects commutator (boson) vs anti-commutator (fermion)."""

    BOSON = "boson"
    FERMION = "fermion"


def _np_readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class KahlerStructure:
    """Compatible triple (Omega, G, J) of a 2N-dimensional mode sector.

    Invariants enforced at construction: J^2 = -I, J preserves the fundamental
    form of the species, G Omega^{-1} = -J, and (bosons) -J Omega positive
    definite.
    """

    n_modes: int
    omega: np.ndarray
    metric: np.ndarray
    j: np.ndarray
    species: Species = Species.BOSON
    basis: str = "real"
    omega_inv: np.ndarray = field(init=False, repr=False)
    metric_inv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n2 = 2 * self.n_modes
        omega = _np_readonly(self.omega)
        metric = _np_readonly(self.metric)
        j = _np_readonly(self.j)
        for name, m in (("omega", omega), ("metric", metric), ("j", j)):
            if m.shape != (n2, n2):
                raise InputError(f"{name} must have shape {(n2, n2)}, got {m.shape}")
        if np.max(np.abs(omega + omega.T)) > 1e-12:
            raise InvalidStructureError("omega must be antisymmetric")
        if np.max(np.abs(metric - metric.T)) > 1e-12:
            raise InvalidStructureError("metric must be symmetric")
        if np.min(np.linalg.eigvalsh(metric)) <= 0:
            raise InvalidStructureError("metric must be positive definite")
        if np.max(np.abs(j @ j + np.eye(n2))) > 1e-10:
            raise InvalidStructureError("J^2 = -I violated")
        lam = omega if self.species is Species.BOSON else metric
        if np.max(np.abs(j @ lam @ j.T - lam)) > 1e-10:
            raise InvalidStructureError("J does not preserve the fundamental form")
        omega_inv = np.linalg.inv(omega)
        metric_inv = np.linalg.inv(metric)
        if np.max(np.abs(omega @ metric_inv - j)) > 1e-10:
            raise InvalidStructureError("Kähler relation J = Omega g violated")
        if self.species is Species.BOSON:
            if np.min(np.linalg.eigvalsh(-(j @ omega + omega.T @ j.T) / 2)) <= 0:
                raise InvalidStructureError("-J Omega must be positive definite for bosons")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "metric", metric)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "omega_inv", _np_readonly(omega_inv))
        object.__setattr__(self, "metric_inv", _np_readonly(metric_inv))

    @property
    def dim(self):
        return 2 * self.n_modes

    @property
    def fundamental_form(self):
        """The form preserved by the group: Omega for bosons, G for fermions."""
        return self.omega if self.species is Species.BOSON else self.metric

    def omega_bilinear(self, z1, z2):
        """Symplectic area omega(z1, z2) = z1^T omega^{-1} z2 of two vectors."""
        return float(np.asarray(z1) @ self.omega_inv @ np.asarray(z2))

    def complex_basis_forms(self):
        """(Omega, G, J) matrices in the ladder basis; test-only view."""
        n = self.n_modes
        if not _is_standard(self):
            raise InputError("complex-basis view is defined at the standard structure only")
        eye = np.eye(n)
        zero = np.zeros((n, n))
        omega_c = 1j * np.block([[zero, -eye], [eye, zero]])
        metric_c = np.block([[zero, eye], [eye, zero]]).astype(complex)
        j_c = 1j * np.block([[-eye, zero], [zero, eye]])
        return omega_c, metric_c, j_c


def _is_standard(k):
    n = k.n_modes
    std = standard_symplectic_form(n)
    return (
        np.max(np.abs(k.omega - std)) < 1e-14
        and np.max(np.abs(k.metric - np.eye(2 * n))) < 1e-14
    )


def standard_symplectic_form(n_modes):
    """Omega = [[0, I], [-I, 0]] in the (q_1..q_N, p_1..p_N) ordering."""
    eye = np.eye(n_modes)
    zero = np.zeros((n_modes, n_modes))
    return np.block([[zero, eye], [-eye, zero]])


def standard_kahler(n_modes, species=Species.BOSON):
    """Standard structure: Omega = J = [[0, I], [-I, 0]], G = I."""
    if n_modes < 1:
        raise InputError("mode count must be positive")
    omega = standard_symplectic_form(n_modes)
    return KahlerStructure(
        n_modes=n_modes,
        omega=omega,
        metric=np.eye(2 * n_modes),
        j=omega.copy(),
        species=species,
    )


def validate_group_element(m, k, tol=1e-10):
    """Check M Lambda M^T = Lambda; returns (ok, residual)."""
    m = np.asarray(m, dtype=float)
    if m.shape != (k.dim, k.dim):
        raise InputError(f"group element must have shape {(k.dim, k.dim)}, got {m.shape}")
    lam = k.fundamental_form
    residual = float(np.max(np.abs(m @ lam @ m.T - lam)))
    return residual <= tol, residual


def split_cd(m, k):
    """J-linear and J-antilinear parts: C = (M - JMJ)/2, D = (M + JMJ)/2."""
    m = np.asarray(m, dtype=float)
    jmj = k.j @ m @ k.j
    return (m - jmj) / 2.0, (m + jmj) / 2.0


class DeltaYZ(NamedTuple):
    delta: np.ndarray
    y: np.ndarray
    z: Optional[np.ndarray]


def delta_y_z(m, k):
    """Squeeze-sector maps of a group element.

    delta = -M J M^{-1} J (equals M M^T for bosons at the standard structure),
    y = (I - delta)(I + delta)^{-1}, and z = C^{-1} D when C is invertible.
    A singular C is data, not an error: z is then None.
    """
    m = np.asarray(m, dtype=float)
    n2 = m.shape[0]
    eye = np.eye(n2)
    try:
        minv_j = np.linalg.solve(m, k.j)
    except np.linalg.LinAlgError as exc:
        raise NumericalDomainError("group element is singular") from exc
    delta = -m @ k.j @ minv_j
    ipd = eye + delta
    if np.linalg.cond(ipd) > 1e13:
        raise NumericalDomainError("(I + delta) is numerically singular")
    y = np.linalg.solve(ipd, eye - delta)
    c, d = split_cd(m, k)
    sv = np.linalg.svd(c, compute_uv=False)
    # a (near-)singular C is data, not failure: the Z map simply does not exist
    if sv[-1] < 1e-9 * max(sv[0], 1.0):
        z = None
    else:
        z = np.linalg.solve(c, d)
    return DeltaYZ(delta=delta, y=y, z=z)


def random_group_element(k, rng, scale=1.0):
    """Connected-component sample e^K with K = Omega h (bosons, h symmetric,
    ||h|| <= scale) or K antisymmetric (fermions)."""
    import scipy.linalg

    n2 = k.dim
    a = rng.standard_normal((n2, n2))
    if k.species is Species.BOSON:
        h = (a + a.T) / 2.0
        h *= scale * rng.uniform(0.1, 1.0) / max(np.linalg.norm(h, 2), 1e-12)
        gen = k.omega @ h
    else:
        gen = (a - a.T) / 2.0
        gen *= scale * rng.uniform(0.1, 1.0) / max(np.linalg.norm(gen, 2), 1e-12)
    return scipy.linalg.expm(gen)

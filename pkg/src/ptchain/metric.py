"""Closed-form intertwiners for open chains with nearest-neighbour defects.

For an even chain ``n = 2m`` whose only non-real potentials sit on the two
central sites, the Hermitian matrices

    M(Z) = [[I, conj(Z)/t_m P], [Z/t_m P, I]],   Im Z = gamma,

satisfy ``M H = H^dagger M`` for every real part of ``Z``.  Here ``P`` is the
``m x m`` exchange matrix and ``t_m`` the bond joining the defects.  This module
builds that family, its positive square root, the similar Hermitian
Hamiltonian, the C operator and the reduction to ``ker M`` at the
exceptional point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SpecError
from .lattice import HamiltonianSpec, build_dense, check_pt_symmetry

__all__ = [
    "IntertwinerFamily",
    "intertwiner_nn",
    "omega_sqrt",
    "omega_inverse",
    "EquivalentHermitian",
    "equivalent_hermitian",
    "c_operator",
    "c_eigenspace_bases",
    "metric_transport",
    "kernel_basis",
    "kernel_reduced_hamiltonian",
    "intertwining_residual",
]


def _exchange(m):
    return np.eye(m)[::-1]


def intertwining_residual(M, H) -> float:
    """``||M H - H^dagger M|| / (||M|| ||H||)`` in the spectral norm."""
    M = np.asarray(M)
    H = np.asarray(H)
    num = np.linalg.norm(M @ H - H.conj().T @ M, 2)
    den = np.linalg.norm(M, 2) * np.linalg.norm(H, 2)
    return float(num / den) if den else float(num)


def _nn_defect_data(spec: HamiltonianSpec, tol=1e-12):
    if not spec.is_open:
        raise SpecError("nearest-neighbour intertwiners need an open chain")
    if spec.n % 2:
        raise SpecError("nearest-neighbour intertwiners need even n")
    if not check_pt_symmetry(spec, tol):
        raise SpecError("spec is not PT-symmetric")
    m = spec.n // 2
    scale = max(1.0, max(abs(v) for v in spec.z))
    sites = spec.defect_sites(tol * scale)
    if not set(sites) <= {m, m + 1}:
        raise SpecError(f"non-real potentials at sites {sites}; expected only {m} and {m + 1}")
    t_m = spec.t[m - 1]
    if t_m == 0:
        raise SpecError("the bond between the defects must be nonzero")
    gamma = spec.z[m - 1].imag
    return m, float(t_m), float(gamma)


@dataclass(frozen=True)
class IntertwinerFamily:
    """One member ``M(Z)`` of the intertwiner family.

    Attributes
    ----------
    m : int
        Half the chain length.
    t_m : float
        Bond between the two defect sites.
    Z : complex
        Family parameter; ``Z.imag`` equals the gain of site ``m``.
    matrix : ndarray
        The Hermitian ``2m x 2m`` matrix.
    residual : float
        Relative intertwining residual against the Hamiltonian it was
        built for.
    """

    m: int
    t_m: float
    Z: complex
    matrix: np.ndarray
    residual: float = float("nan")

    @property
    def n(self) -> int:
        return 2 * self.m

    @property
    def ratio(self) -> float:
        return abs(self.Z) / abs(self.t_m)

    @property
    def positive_definite(self) -> bool:
        return self.ratio < 1.0

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])

    @classmethod
    def from_parameters(cls, m, t_m, Z):
        """Build ``M(Z)`` without reference to a Hamiltonian."""
        P = _exchange(m)
        Z = complex(Z)
        I = np.eye(m)
        M = np.block([[I, np.conj(Z) / t_m * P], [Z / t_m * P, I]]).astype(complex)
        return cls(m, float(t_m), Z, M)


def intertwiner_nn(spec: HamiltonianSpec, reZ: float = 0.0) -> IntertwinerFamily:
    """Family member with ``Z = reZ + i gamma`` for a nearest-neighbour defect chain.

    Raises
    ------
    SpecError
        If the chain is not open, not PT-symmetric, has odd length, or
        carries non-real potentials away from the two central sites.
    """
    m, t_m, gamma = _nn_defect_data(spec)
    fam = IntertwinerFamily.from_parameters(m, t_m, complex(reZ, gamma))
    res = intertwining_residual(fam.matrix, build_dense(spec))
    return IntertwinerFamily(fam.m, fam.t_m, fam.Z, fam.matrix, res)


def _k_matrix(fam):
    """``(Re Z sigma_x + Im Z sigma_y) (x) P``."""
    P = _exchange(fam.m)
    Z = fam.Z
    O = np.zeros((fam.m, fam.m))
    return np.block([[O, np.conj(Z) * P], [Z * P, O]]).astype(complex)


def _require_pd(fam, margin=1e-12):
    if fam.ratio >= 1.0 - margin:
        raise SpecError(
            f"|Z|/t_m = {fam.ratio:.16g} is not below 1; the family member is not positive definite"
        )


def _alpha(fam):
    r = fam.ratio
    return np.sqrt(1 + r) + np.sqrt(1 - r)


def omega_sqrt(fam: IntertwinerFamily) -> np.ndarray:
    """Positive square root of ``fam.matrix`` in closed form.

    ``Omega = (alpha/2) I + K / (alpha t_m)`` with
    ``alpha = sqrt(1 + |Z|/t_m) + sqrt(1 - |Z|/t_m)``.
    """
    _require_pd(fam)
    a = _alpha(fam)
    return (a / 2) * np.eye(fam.n) + _k_matrix(fam) / (a * fam.t_m)


def omega_inverse(fam: IntertwinerFamily) -> np.ndarray:
    """Inverse of :func:`omega_sqrt` from the same closed form.

    Flipping the sign of the off-diagonal block and dividing by
    ``sqrt(1 - |Z|^2 / t_m^2)`` inverts ``Omega`` exactly, since the
    block squares to ``|Z|^2 I``.
    """
    _require_pd(fam)
    a = _alpha(fam)
    r = fam.ratio
    return ((a / 2) * np.eye(fam.n) - _k_matrix(fam) / (a * fam.t_m)) / np.sqrt(1 - r * r)


@dataclass(frozen=True)
class EquivalentHermitian:
    """Hermitian Hamiltonian similar to a defect chain.

    Attributes
    ----------
    matrix : ndarray
        Tridiagonal Hermitian ``h`` from the closed form.
    bonds : ndarray
        Upper-diagonal entries ``h[i, i+1]`` (the defect bond may be complex).
    onsite : ndarray
        Real diagonal.
    spec : HamiltonianSpec
        Real, transpose-symmetric version after removing bond phases.
    gauge : ndarray
        Diagonal unitary ``D`` with ``D^dagger h D == build_dense(spec)``.
    similarity_residual : float
        ``||h - Omega H Omega^{-1}|| / ||H||``.
    """

    matrix: np.ndarray
    bonds: np.ndarray
    onsite: np.ndarray
    spec: HamiltonianSpec
    gauge: np.ndarray
    similarity_residual: float


def equivalent_hermitian(spec: HamiltonianSpec, fam: IntertwinerFamily) -> EquivalentHermitian:
    """Hermitian ``h = Omega H Omega^{-1}`` written as a tridiagonal chain.

    Off the defect bond ``t'_i = sqrt(|t_i t_{n-i}|)``.  On it
    ``t'_m = (Re Z / Z) t_m + i (Im Z / Z) sqrt(t_m^2 - |Z|^2)``, placed at
    ``h[m, m+1]`` (1-based) with its conjugate below.  The diagonal is
    ``Re z``.
    """
    m, t_m, _ = _nn_defect_data(spec)
    _require_pd(fam)
    n = spec.n
    t = np.asarray(spec.t, dtype=float)
    bonds = np.sqrt(np.abs(t * t[::-1])).astype(complex)
    Z = fam.Z
    if Z == 0:
        bonds[m - 1] = t_m
    else:
        bonds[m - 1] = (Z.real / Z) * t_m + 1j * (Z.imag / Z) * np.sqrt(t_m**2 - abs(Z) ** 2)
    onsite = np.real(np.asarray(spec.z))
    h = np.diag(onsite).astype(complex)
    idx = np.arange(n - 1)
    h[idx, idx + 1] = bonds
    h[idx + 1, idx] = np.conj(bonds)

    H = build_dense(spec)
    sim = omega_sqrt(fam) @ H @ omega_inverse(fam)
    res = float(np.linalg.norm(h - sim, 2) / max(np.linalg.norm(H, 2), 1e-300))

    phases = np.ones(n, dtype=complex)
    for i in range(n - 1):
        b = bonds[i]
        phases[i + 1] = phases[i] * (np.conj(b) / abs(b) if b != 0 else 1.0)
    D = np.diag(phases)
    real_bonds = tuple(float(abs(b)) for b in bonds)
    gauged = HamiltonianSpec(n, real_bonds, tuple(onsite))
    return EquivalentHermitian(h, bonds, onsite, gauged, D, res)


def c_operator(spec: HamiltonianSpec) -> np.ndarray:
    """The C operator of an unbroken nearest-neighbour defect chain.

    ``C = t_m / sqrt(t_m^2 - gamma^2) * P_n M(i gamma)``, which expands to
    ``(t_m sigma_x (x) P_m + i gamma sigma_z (x) I_m) / sqrt(t_m^2 - gamma^2)``.
    It is an involution commuting with ``H`` and with the antilinear PT map.

    Raises
    ------
    SpecError
        For ``gamma >= t_m``, where no such operator exists.
    """
    m, t_m, gamma = _nn_defect_data(spec)
    if abs(gamma) >= abs(t_m) * (1 - 1e-12):
        raise SpecError("C is undefined at or beyond the exceptional point (gamma >= t_m)")
    P = _exchange(m)
    I = np.eye(m)
    O = np.zeros((m, m))
    sx_p = np.block([[O, P], [P, O]])
    sz_i = np.block([[I, O], [O, -I]])
    return (t_m * sx_p + 1j * gamma * sz_i) / np.sqrt(t_m**2 - gamma**2)


def c_eigenspace_bases(spec: HamiltonianSpec):
    """Column bases of the ``+1`` and ``-1`` eigenspaces of C.

    Column ``k`` is ``t_m e_k + (-i gamma +/- sqrt(t_m^2 - gamma^2)) e_{n+1-k}``
    for ``k = 1..m``.
    """
    m, t_m, gamma = _nn_defect_data(spec)
    n = 2 * m
    root = np.sqrt(complex(t_m**2 - gamma**2))
    out = []
    for sign in (1, -1):
        B = np.zeros((n, m), dtype=complex)
        for k in range(m):
            B[k, k] = t_m
            B[n - 1 - k, k] = -1j * gamma + sign * root
        out.append(B)
    return tuple(out)


def metric_transport(H, M, S):
    """Carry an intertwiner across a similarity.

    Returns ``(S^{-1} H S, S^dagger M S)``; if ``M`` intertwines ``H`` then
    the transported pair intertwines too.
    """
    S = np.asarray(S, dtype=complex)
    try:
        Sinv = np.linalg.inv(S)
    except np.linalg.LinAlgError as exc:
        raise ValueError("similarity is singular") from exc
    if np.linalg.cond(S) > 1e14:
        raise ValueError("similarity is numerically singular")
    return Sinv @ np.asarray(H) @ S, S.conj().T @ np.asarray(M) @ S


def kernel_basis(spec: HamiltonianSpec, tol: float = 1e-12) -> np.ndarray:
    """Orthonormal basis of ``ker M(i gamma)`` at ``gamma = t_m``.

    Column ``j`` is ``(i gamma / (sqrt(2) t_m)) e_j + e_{n+1-j} / sqrt(2)``.
    """
    m, t_m, gamma = _nn_defect_data(spec)
    if abs(gamma - t_m) > tol * abs(t_m):
        raise SpecError("the kernel reduction needs gamma == t_m")
    n = 2 * m
    B = np.zeros((n, m), dtype=complex)
    for j in range(m):
        B[j, j] = 1j * gamma / (np.sqrt(2) * t_m)
        B[n - 1 - j, j] = 1 / np.sqrt(2)
    return B


def kernel_reduced_hamiltonian(spec: HamiltonianSpec, tol: float = 1e-12) -> np.ndarray:
    """Matrix of ``H`` restricted to its invariant subspace ``ker M``.

    The result is the real symmetric ``m x m`` tridiagonal chain with bonds
    ``t_1..t_{m-1}``.  Its diagonal holds the real potentials of sites
    ``1..m``, including the detuning on site ``m``.  Its eigenvalues are
    eigenvalues of ``H``.

    Raises
    ------
    SpecError
        If ``gamma`` differs from ``t_m`` by more than ``tol`` (relative).
    ArithmeticError
        If ``ker M`` is not invariant to rounding level.
    """
    B = kernel_basis(spec, tol)
    H = build_dense(spec)
    R = B.conj().T @ H @ B
    leak = np.linalg.norm(H @ B - B @ R, 2) / max(np.linalg.norm(H, 2), 1e-300)
    if leak > 1e-10:
        raise ArithmeticError(f"ker M is not invariant (leak {leak:.3g})")
    if np.max(np.abs(R.imag)) <= 1e-12 * max(1.0, np.max(np.abs(R))):
        R = R.real
    return R

"""Root finding, eigenvectors, multiplicity clusters and closed-form spectra."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .chebpoly import ComplexPolynomial, cheb_u
from .errors import ConvergenceError, SpecError
from .lattice import HamiltonianSpec, build_dense

__all__ = [
    "roots_aberth",
    "tridiagonal_roots",
    "cluster_roots",
    "refine_clusters",
    "Cluster",
    "PTPhase",
    "SpectrumReport",
    "Eigenvector",
    "spectrum",
    "eigensystem",
    "eigenvector_for",
    "mat2_power_cheb",
    "ssh_transfer_matrix",
    "closed_form_spectrum",
    "solvable_defect",
    "protected_eigenvalues",
    "classify_state",
    "inverse_participation_ratio",
    "multiset_distance",
]

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
_EPS = np.finfo(float).eps


# -- Aberth--Ehrlich ----------------------------------------------------------

def _as_coeffs(p) -> np.ndarray:
    if isinstance(p, ComplexPolynomial):
        return np.array(p.coeffs, dtype=complex)
    return np.atleast_1d(np.asarray(p, dtype=complex)).copy()


class _PolynomialEvaluator:
    """Horner evaluation of a monic polynomial and its derivatives."""

    def __init__(self, c):
        self.coeffs = c  # ascending, monic
        self.degree = len(c) - 1
        self._desc = [c[::-1]]
        self._absdesc = np.abs(c[::-1])

    def _desc_deriv(self, j):
        while len(self._desc) <= j:
            d = self._desc[-1]
            k = len(d) - 1
            self._desc.append(d[:-1] * np.arange(k, 0, -1) if k > 0 else np.zeros(1))
        return self._desc[j]

    def derivs(self, z, order):
        z = np.asarray(z, dtype=complex)
        return np.array([np.polyval(self._desc_deriv(j), z) for j in range(order + 1)])

    def noise(self, z):
        return 4 * (self.degree + 1) * _EPS * np.polyval(self._absdesc, np.abs(z))

    def start_radius(self):
        return 1.0 + float(np.max(np.abs(self.coeffs[:-1])))


class _TridiagonalEvaluator:
    """``det(lambda I - H)`` and its derivatives by the continuant recurrence.

    Differentiating ``theta_k = (x - z_k) theta_{k-1} - t_{k-1}^2 theta_{k-2}``
    gives the same recurrence for every derivative order plus a
    ``j theta_{k-1}^{(j-1)}`` source term.  Evaluating this way avoids the
    cancellation of the expanded monomial form, so multiple roots come out
    split by about ``sqrt(eps)`` instead of much more.
    """

    def __init__(self, spec: HamiltonianSpec):
        self.spec = spec
        self.degree = spec.n
        self.z = np.asarray(spec.z, dtype=complex)
        self.t2 = np.asarray(spec.t, dtype=complex) ** 2
        self.prod_t = complex(np.prod(np.asarray(spec.t, dtype=complex)))

    def _continuant(self, z, order, lo, hi):
        x = np.asarray(z, dtype=complex)
        shape = (order + 1,) + x.shape
        prev = np.zeros(shape, dtype=complex)
        cur = np.zeros_like(prev)
        prev[0] = 1.0
        cur[0] = x - self.z[lo]
        if order >= 1:
            cur[1] = 1.0
        for k in range(lo + 1, hi + 1):
            nxt = np.empty_like(cur)
            a = x - self.z[k]
            nxt[0] = a * cur[0] - self.t2[k - 1] * prev[0]
            for j in range(1, order + 1):
                nxt[j] = a * cur[j] + j * cur[j - 1] - self.t2[k - 1] * prev[j]
            prev, cur = cur, nxt
        return cur

    def derivs(self, z, order):
        sp = self.spec
        if sp.n == 2:
            x = np.asarray(z, dtype=complex)
            lo, up = sp.t[0] + sp.tR, sp.t[0] + sp.tL
            p = [(x - self.z[0]) * (x - self.z[1]) - lo * up, 2 * x - self.z[0] - self.z[1],
                 2 + 0 * x]
            return np.array([p[j] if j < 3 else 0 * x for j in range(order + 1)])
        full = self._continuant(z, order, 0, sp.n - 1)
        if sp.is_open:
            return full
        inner = self._continuant(z, order, 1, sp.n - 2)
        full = full - sp.tL * sp.tR * inner
        full[0] = full[0] - (sp.tL + sp.tR) * self.prod_t
        return full

    def _propagated_error(self, x, lo, hi):
        # first-order rounding error of theta_hi: the local error made at
        # step k reaches the end multiplied by the continuant of the
        # trailing block k+1..hi, computed here by a backward sweep
        m = hi - lo + 1
        a = x[None, :] - self.z[lo:hi + 1, None]
        absa = np.abs(x)[None, :] + np.abs(self.z[lo:hi + 1, None])
        tail = np.empty((m + 1,) + x.shape, dtype=complex)
        tail[m] = 1.0
        tail[m - 1] = a[m - 1]
        for i in range(m - 2, -1, -1):
            tail[i] = a[i] * tail[i + 1] - self.t2[lo + i] * tail[i + 2]
        prev = np.ones_like(x)
        cur = a[0]
        err = _EPS * absa[0] * np.abs(tail[1])
        for i in range(1, m):
            local = absa[i] * np.abs(cur) + np.abs(self.t2[lo + i - 1] * prev)
            err = err + _EPS * local * np.abs(tail[i + 1])
            prev, cur = cur, a[i] * cur - self.t2[lo + i - 1] * prev
        return err

    def noise(self, z):
        x = np.atleast_1d(np.asarray(z, dtype=complex))
        sp = self.spec
        if sp.n == 2:
            scale = np.abs(x) + max(abs(v) for v in (*sp.z, sp.t[0] + abs(sp.tL) + abs(sp.tR)))
            return 8 * _EPS * scale**2
        err = self._propagated_error(x, 0, sp.n - 1)
        if not sp.is_open:
            err = err + abs(sp.tL * sp.tR) * self._propagated_error(x, 1, sp.n - 2)
            err = err + 2 * _EPS * abs((sp.tL + sp.tR) * self.prod_t)
        return 4 * err

    def start_radius(self):
        h = build_dense(self.spec)
        return 1.0 + float(np.max(np.sum(np.abs(h), axis=1)))


def _aberth(ev, tol, max_iter):
    d = ev.degree
    radius = ev.start_radius()
    k = np.arange(d)
    z = radius * np.exp(1j * (2 * np.pi * k / d + GOLDEN_ANGLE * (k + 0.5) / d))
    active = np.ones(d, dtype=bool)
    last_step = np.inf
    for it in range(max_iter):
        pv, dp = ev.derivs(z, 1)
        az = np.abs(z)
        active &= np.abs(pv) > ev.noise(z)
        if not active.any():
            return z
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        s = inv.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            ratio = pv / dp
            step = ratio / (1.0 - ratio * s)
        bad = ~np.isfinite(step)
        step[bad] = 1e-8 * (1 + az[bad]) * np.exp(1j * GOLDEN_ANGLE * (it + 1))
        step[~active] = 0.0
        z = z - step
        mag = np.abs(step) / np.maximum(1.0, np.abs(z))
        last_step = float(np.max(mag))
        active &= mag > tol
        if not active.any():
            return z
    raise ConvergenceError(
        "Aberth iteration did not converge",
        {"iterates": z.copy(), "max_update": last_step, "iterations": max_iter},
    )


def roots_aberth(p, tol: float = 1e-14, max_iter: int = 800) -> np.ndarray:
    """All complex roots of ``p`` by simultaneous Aberth--Ehrlich iteration.

    Parameters
    ----------
    p : ComplexPolynomial or array_like
        Ascending coefficients.
    tol : float
        A root is converged once its update is below ``tol * max(1, |z|)``
        or its residual reaches the rounding level of Horner's scheme.
    max_iter : int
        Iteration budget.

    Returns
    -------
    ndarray of complex
        Roots repeated according to multiplicity (unsorted).  Starting
        points sit on the circle of radius ``1 + max |c_k / c_deg|`` with
        golden-angle offsets, so the output is deterministic.

    Raises
    ------
    ConvergenceError
        If some roots are still moving after ``max_iter`` sweeps.  The
        diagnostic carries the current iterates.
    """
    c = _as_coeffs(p)
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        raise ValueError("the zero polynomial has no roots")
    c = c[: nz[-1] + 1]
    if len(c) < 2:
        raise ValueError("polynomial must have degree >= 1")
    n_zero = int(nz[0])
    c = c[n_zero:] / c[-1]
    d = len(c) - 1
    zeros = np.zeros(n_zero, dtype=complex)
    if d == 0:
        return zeros
    if d == 1:
        return np.concatenate([[-c[0]], zeros])
    return np.concatenate([_aberth(_PolynomialEvaluator(c), tol, max_iter), zeros])


def tridiagonal_roots(spec: HamiltonianSpec, tol: float = 1e-14, max_iter: int = 800) -> np.ndarray:
    """Eigenvalues of ``spec`` by Aberth iteration on the continuant.

    Same iteration as :func:`roots_aberth`.  The determinant and its
    derivative are evaluated by the three-term recurrence, not from
    expanded coefficients.  Start points lie on a circle just outside the
    Gershgorin disc.
    """
    return _aberth(_TridiagonalEvaluator(spec), tol, max_iter)


def _scale(lam) -> float:
    return 1.0 + abs(lam)


def cluster_roots(roots, rel_tol: float = 1e-6) -> list:
    """Group roots closer than ``rel_tol * (1 + |lambda|)`` (single linkage).

    Returns a list of index arrays ordered by their first member.
    """
    r = np.asarray(roots, dtype=complex)
    n = len(r)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(r[i] - r[j]) <= rel_tol * max(_scale(r[i]), _scale(r[j])):
                pi, pj = find(i), find(j)
                if pi != pj:
                    parent[pj] = pi
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [np.array(g) for g in sorted(groups.values(), key=lambda g: g[0])]


@dataclass(frozen=True)
class Cluster:
    """Numerically coincident roots treated as one eigenvalue."""

    value: complex
    algebraic_multiplicity: int
    members: tuple = ()
    geometric_multiplicity: int = 1

    @property
    def defective(self) -> bool:
        return self.algebraic_multiplicity > self.geometric_multiplicity


def _evaluator_for(p):
    if isinstance(p, HamiltonianSpec):
        return _TridiagonalEvaluator(p)
    c = _as_coeffs(p)
    nz = np.nonzero(c)[0]
    c = c[: nz[-1] + 1]
    return _PolynomialEvaluator(c / c[-1])


def _polish(ev, start: complex, k: int, radius: float) -> complex:
    """Newton on the ``(k-1)``-th derivative from ``start``.

    A ``k``-fold root is a simple root of that derivative, so Newton there
    converges quadratically where it would crawl on ``p`` itself.  The
    result is rejected if it wanders outside ``radius``.
    """
    x = complex(start)
    vals = ev.derivs(np.array([x]), k)[:, 0]
    best, best_val = x, abs(vals[k - 1])
    for _ in range(30):
        q, dq = vals[k - 1], vals[k]
        if dq == 0 or not np.isfinite(dq):
            break
        step = q / dq
        x = x - step
        vals = ev.derivs(np.array([x]), k)[:, 0]
        if abs(vals[k - 1]) < best_val:
            best, best_val = x, abs(vals[k - 1])
        if abs(step) <= 4 * _EPS * (1 + abs(x)):
            break
    return best if abs(best - start) <= radius else complex(start)


def refine_clusters(p, roots, rel_tol: float = 1e-6) -> list:
    """Cluster raw roots and polish each cluster centre.

    ``p`` is a polynomial (or coefficient array) or a HamiltonianSpec whose
    determinant is evaluated by recurrence.  Every cluster of size ``k`` is
    replaced by the root of ``p^(k-1)`` nearest to the cluster mean;
    singletons get Newton on ``p``.
    """
    ev = _evaluator_for(p)
    r = np.asarray(roots, dtype=complex)
    groups = cluster_roots(r, rel_tol)
    means = np.array([np.mean(r[idx]) for idx in groups], dtype=complex)
    out = []
    for i, idx in enumerate(groups):
        members = r[idx]
        k = len(members)
        mean = complex(means[i])
        spread = float(np.max(np.abs(members - mean))) if k > 1 else 0.0
        # frozen Aberth iterates can sit well outside rel_tol; any point
        # closer to this cluster than to its neighbours is fair game
        others = np.abs(np.delete(means, i) - mean)
        gap = float(others.min()) if len(others) else np.inf
        radius = max(10 * spread, rel_tol * _scale(mean), 0.3 * gap if np.isfinite(gap) else 0.0)
        out.append(Cluster(_polish(ev, mean, k, radius), k, tuple(complex(m) for m in members)))
    return out


# -- spectra and eigenvectors -------------------------------------------------

class PTPhase(str, enum.Enum):
    UNBROKEN = "unbroken"
    BROKEN = "broken"
    MAXIMALLY_BROKEN = "maximally-broken"


def _sort_key(v: complex):
    return (round(v.real, 10), round(v.imag, 10))


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalues with multiplicity clusters and a PT-phase verdict.

    ``eigenvalues`` repeats each polished cluster value according to its
    algebraic multiplicity, sorted by real then imaginary part.
    """

    eigenvalues: np.ndarray
    clusters: tuple
    phase: PTPhase
    real_count: int
    reality_tol: float = 1e-8

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def gcd_degree(self) -> int:
        """Degree of ``gcd(P, P')`` implied by the clusters."""
        return sum(c.algebraic_multiplicity - 1 for c in self.clusters)

    @property
    def defective_clusters(self) -> list:
        return [c for c in self.clusters if c.defective]


def _is_real(lam: complex, tol: float) -> bool:
    return abs(lam.imag) <= tol * _scale(lam)


def _phase(values, tol):
    real = sum(1 for v in values if _is_real(v, tol))
    if real == len(values):
        return PTPhase.UNBROKEN, real
    if real == 0:
        return PTPhase.MAXIMALLY_BROKEN, real
    return PTPhase.BROKEN, real


def spectrum(spec: HamiltonianSpec, tol_real: float = 1e-8, tol_root: float = 1e-14,
             cluster_tol: float = 1e-6) -> SpectrumReport:
    """Eigenvalues of ``spec`` from the roots of its characteristic polynomial.

    Works on ``H / s`` with ``s`` the largest entry modulus; the determinant
    is evaluated by its continuant recurrence (see
    :func:`tridiagonal_roots`).
    """
    s = max(max(abs(v) for v in (*spec.t, *spec.z, spec.tL, spec.tR)), 1e-300)
    unit = spec.scaled(1.0 / s)
    raw = tridiagonal_roots(unit, tol=tol_root)
    clusters = refine_clusters(unit, raw, cluster_tol)
    geo = _geometric_multiplicities(spec, [c.value * s for c in clusters]) if not spec.is_open else None
    scaled = []
    for i, c in enumerate(clusters):
        g = 1 if geo is None else min(geo[i], c.algebraic_multiplicity)
        scaled.append(Cluster(c.value * s, c.algebraic_multiplicity,
                              tuple(m * s for m in c.members), g))
    scaled.sort(key=lambda c: _sort_key(c.value))
    values = np.array([c.value for c in scaled for _ in range(c.algebraic_multiplicity)])
    phase, real = _phase(values, tol_real)
    return SpectrumReport(values, tuple(scaled), phase, real, tol_real)


@dataclass(frozen=True)
class Eigenvector:
    """Right eigenvector with unit norm and first nonzero entry real positive."""

    components: np.ndarray
    eigenvalue: complex
    residual: float
    ill_conditioned: bool = False
    defective: bool = False


def _normalize(v):
    v = np.asarray(v, dtype=complex)
    nrm = np.linalg.norm(v)
    if nrm == 0 or not np.isfinite(nrm):
        return v
    v = v / nrm
    big = np.abs(v) > 1e-12 * np.max(np.abs(v))
    first = v[np.argmax(big)]
    return v * (abs(first) / first)


def _forward(spec, lam, seed0, seed1, start=0):
    """Run the interior recurrence forward from two seed components.

    Returns the full vector; the prefix is rescaled whenever it grows past
    ``1e100`` (checked every 32 sites) so that edge states cannot overflow.
    """
    n = spec.n
    t, z = spec.t, spec.z
    psi = np.zeros(n, dtype=complex)
    psi[0], psi[1] = seed0, seed1
    for i in range(1, n - 1):
        psi[i + 1] = ((lam - z[i]) * psi[i] - t[i - 1] * psi[i - 1]) / t[i]
        if i % 32 == 0:
            m = np.max(np.abs(psi[: i + 2]))
            if m > 1e100:
                psi[: i + 2] /= m
    return psi


def _backward(spec, lam):
    """Recurrence from the right end seeded by the last row (open chain)."""
    rev = HamiltonianSpec(spec.n, spec.t[::-1], spec.z[::-1])
    seed1 = (lam - rev.z[0]) / rev.t[0]
    return _forward(rev, lam, 1.0, seed1)[::-1]


def _open_chain_vector(spec, lam, h):
    left = _forward(spec, lam, 1.0, (lam - spec.z[0]) / spec.t[0])
    right = _backward(spec, lam)
    best, best_res = None, np.inf
    eye_l = lam * np.eye(spec.n)
    for j in range(spec.n):
        if right[j] == 0 or not np.all(np.isfinite(left[: j + 1])):
            continue
        v = np.concatenate([left[: j + 1], right[j + 1:] * (left[j] / right[j])])
        if not np.all(np.isfinite(v)):
            continue
        v = _normalize(v)
        res = np.linalg.norm(h @ v - eye_l @ v)
        if res < best_res:
            best, best_res = v, res
    return best


def _corner_system(spec, lam):
    """Two-seed shooting: basis solutions of the interior rows and the 2x2
    matrix of the first and last rows acting on the seeds."""
    n = spec.n
    phi1 = _forward(spec, lam, 1.0, 0.0)
    phi2 = _forward(spec, lam, 0.0, 1.0)
    g = np.empty((2, 2), dtype=complex)
    for col, phi in enumerate((phi1, phi2)):
        g[0, col] = (spec.z[0] - lam) * phi[0] + spec.t[0] * phi[1] + spec.tL * phi[n - 1]
        g[1, col] = spec.tR * phi[0] + spec.t[n - 2] * phi[n - 2] + (spec.z[n - 1] - lam) * phi[n - 1]
    return g, phi1, phi2


def _geometric_multiplicities(spec, values, rel=1e-7):
    if spec.n == 2:
        out = []
        h = build_dense(spec)
        for lam in values:
            sv = np.linalg.svd(h - lam * np.eye(2), compute_uv=False)
            out.append(int(np.sum(sv <= rel * max(1.0, sv[0]))))
        return out
    out = []
    for lam in values:
        g, phi1, phi2 = _corner_system(spec, lam)
        scale = max(np.linalg.norm(phi1), np.linalg.norm(phi2), 1.0) * max(1.0, abs(lam))
        sv = np.linalg.svd(g, compute_uv=False)
        out.append(max(1, int(np.sum(sv <= rel * scale))))
    return out


def eigenvector_for(spec: HamiltonianSpec, lam: complex, residual_tol: float = 1e-8) -> list:
    """Eigenvector(s) of ``spec`` at the eigenvalue ``lam`` via recurrences.

    Open chains use the left and right recurrences spliced where the joint
    residual is smallest.  Chains with corners shoot two seed solutions
    through the interior rows and take the null space of the remaining
    2x2 system, which yields two vectors for a doubly degenerate level.
    """
    if any(v == 0 for v in spec.t):
        raise SpecError("eigenvector recurrence needs nonzero tunnellings")
    h = build_dense(spec)
    hn = max(np.linalg.norm(h, 2), 1e-300)
    vecs = []
    if spec.n == 2:
        _, _, vh = np.linalg.svd(h - lam * np.eye(2))
        vecs = [np.conj(vh[-1])]
    elif spec.is_open:
        vecs = [_open_chain_vector(spec, lam, h)]
    else:
        g, phi1, phi2 = _corner_system(spec, lam)
        _, sv, vh = np.linalg.svd(g)
        scale = max(np.linalg.norm(phi1), np.linalg.norm(phi2), 1.0) * max(1.0, abs(lam))
        nulls = [np.conj(vh[-1])]
        if sv[0] <= 1e-7 * scale:
            nulls = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
        vecs = [a * phi1 + b * phi2 for a, b in nulls]
    out = []
    for v in vecs:
        v = _normalize(v)
        res = float(np.linalg.norm(h @ v - lam * v) / hn)
        out.append(Eigenvector(v, complex(lam), res, res > residual_tol))
    return out


def eigensystem(spec: HamiltonianSpec, tol: float = 1e-8, tol_root: float = 1e-14,
                cluster_tol: float = 1e-6, residual_tol: float = 1e-8):
    """Spectrum report plus one eigenvector per distinct eigenvalue.

    Parameters
    ----------
    spec : HamiltonianSpec
    tol : float
        Reality tolerance for the phase verdict, ``|Im| <= tol (1 + |lambda|)``.

    Returns
    -------
    report : SpectrumReport
    vectors : list of Eigenvector
        Eigenvectors in the order of ``report.clusters``; a doubly
        degenerate level of a chain with corners contributes two.
        Vectors whose residual exceeds ``residual_tol`` carry the
        ``ill_conditioned`` flag instead of raising.
    """
    report = spectrum(spec, tol_real=tol, tol_root=tol_root, cluster_tol=cluster_tol)
    vectors = []
    for c in report.clusters:
        for ev in eigenvector_for(spec, c.value, residual_tol):
            vectors.append(Eigenvector(ev.components, ev.eigenvalue, ev.residual,
                                       ev.ill_conditioned, c.defective))
    return report, vectors


def multiset_distance(a, b) -> float:
    """Largest pairing error between two multisets of complex numbers.

    Uses an optimal assignment so that close pairs are matched globally.
    """
    from scipy.optimize import linear_sum_assignment

    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        return np.inf
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(np.max(cost[r, c])) if len(a) else 0.0


# -- 2x2 matrix powers --------------------------------------------------------

class Mat2Power(NamedTuple):
    power: np.ndarray
    sqrt_det: complex
    y: complex


def mat2_power_cheb(A, k: int, return_branch: bool = False):
    """``A**k`` for an invertible 2x2 matrix through Chebyshev polynomials.

    ``A^k = det(A)^{k/2} [-U_{k-2}(y) I + U_{k-1}(y) A / sqrt(det A)]`` with
    ``y = tr(A) / (2 sqrt(det A))`` and the principal square root.  With
    ``return_branch`` the square root and ``y`` are returned alongside.
    """
    A = np.asarray(A, dtype=complex)
    if A.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    if k < 0:
        raise ValueError("k must be non-negative")
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    if det == 0:
        raise ValueError("matrix is singular")
    r = complex(np.sqrt(det))
    y = complex(np.trace(A)) / (2 * r)
    out = r**k * (-cheb_u(k - 2, y) * np.eye(2) + cheb_u(k - 1, y) * A / r)
    if return_branch:
        return Mat2Power(out, r, y)
    return out


def ssh_transfer_matrix(lam, t1, t2):
    """Two-site transfer matrix mapping ``(psi_2, psi_1)`` to ``(psi_4, psi_3)``
    on a chain with vanishing interior potentials."""
    return np.array([[(lam * lam - t2 * t2) / (t1 * t2), -lam / t2],
                     [lam / t2, -t1 / t2]], dtype=complex)


# -- closed forms -------------------------------------------------------------

_SOLVABLE_ROWS = {
    # row: (defect / t for the "+" sign, families, doubled)
    1: (1j, ("jpi/(m+1)",), True),
    2: (-1 + 1j, ("2jpi/(2m+1)",), True),
    3: (1 + 1j, ("(2j-1)pi/(2m+1)",), True),
    4: (np.exp(1j * np.pi / 3), ("jpi/(m+1)", "(2j-1)pi/(2m+1)"), False),
    5: (np.exp(2j * np.pi / 3), ("jpi/(m+1)", "2jpi/(2m+1)"), False),
}


def _family(name, m):
    j = np.arange(1, m + 1)
    if name == "jpi/(m+1)":
        ang = j * np.pi / (m + 1)
    elif name == "2jpi/(2m+1)":
        ang = 2 * j * np.pi / (2 * m + 1)
    else:
        ang = (2 * j - 1) * np.pi / (2 * m + 1)
    return 2 * np.cos(ang)


def solvable_defect(row: int, sign: int = 1) -> complex:
    """Defect potential (in units of ``t``) for a closed-form solvable row."""
    z = complex(_SOLVABLE_ROWS[row][0])
    return z if sign > 0 else z.conjugate()


def closed_form_spectrum(case, *, m=None, t=1.0, z=None, n=None, t1=None, t2=None,
                         z1=0.0, zn=0.0, tL=0.0, tR=0.0, tol=1e-10) -> list:
    """Exact eigenvalues for the solvable cases.

    ``case`` is ``1``..``5`` (equivalently ``"row-1"``...) for a uniform
    chain of ``n = 2m`` sites with nearest-neighbour defects, or
    ``"ssh-exact"`` for an even SSH chain with end defects and
    ``t2^2 = z1 zn - tL tR``, ``tL = -tR``.

    The solvable rows return ``2m`` values: rows 1 to 3 sit on an exceptional
    point and each listed value appears twice.  If ``z`` (defect on site
    ``m``, energy units) is given it must match the row.

    Raises
    ------
    SpecError
        When the supplied parameters violate the case constraint.
    """
    if isinstance(case, str) and case.startswith("row-"):
        case = int(case.split("-")[1])
    if case == "ssh-exact":
        if n is None or n % 2 or t1 is None or t2 is None:
            raise SpecError("ssh-exact needs even n, t1 and t2")
        c = z1 * zn - tL * tR
        if abs(t2 * t2 - c) > tol * max(1.0, t2 * t2):
            raise SpecError("ssh-exact requires t2^2 == z1 zn - tL tR")
        if abs(tL + tR) > tol * max(1.0, abs(tL)):
            raise SpecError("ssh-exact requires tL == -tR")
        k = n // 2
        mus = [abs(t1 + t2 * np.exp(2j * np.pi * j / n)) for j in range(1, k)]
        delta = (z1 + zn) / 2
        root = np.sqrt(complex(t1 * t1 - t2 * t2 + delta * delta))
        vals = [complex(v) for mu in mus for v in (mu, -mu)] + [delta + root, delta - root]
        return sorted(vals, key=_sort_key)
    if case not in _SOLVABLE_ROWS:
        raise SpecError(f"unknown closed-form case {case!r}")
    if m is None or m < 1:
        raise SpecError("solvable rows need m >= 1")
    zplus, families, doubled = _SOLVABLE_ROWS[case]
    if z is not None:
        zp = complex(z) / t
        if min(abs(zp - zplus), abs(zp - np.conj(zplus))) > tol:
            raise SpecError(f"defect {z!r} does not satisfy solvable row {case}")
    vals = np.concatenate([_family(f, m) for f in families]) * t
    if doubled:
        vals = np.repeat(vals, 2)
    return sorted((complex(v) for v in vals), key=_sort_key)


def protected_eigenvalues(n: int, m: int, detuned: bool, t: float = 1.0) -> list:
    """Eigenvalues that survive every defect strength on a uniform chain.

    ``g = gcd(2m, n+1)`` without detuning and ``gcd(m, n+1)`` with it; the
    protected values are ``2 t cos(pi k / g)`` for ``k = 1..g-1``.
    """
    g = math.gcd(m, n + 1) if detuned else math.gcd(2 * m, n + 1)
    vals = [2 * t * math.cos(math.pi * k / g) for k in range(1, g)]
    return [0.0 if abs(v) < 1e-15 * t else v for v in vals]


def classify_state(lam, t1: float, t2: float) -> str:
    """``"edge"`` when ``|Q(lambda)| > 1`` else ``"bulk"``."""
    q = (lam * lam - t1 * t1 - t2 * t2) / (2 * t1 * t2)
    return "edge" if abs(q) > 1 else "bulk"


def inverse_participation_ratio(psi) -> float:
    p = np.abs(np.asarray(psi)) ** 2
    p = p / p.sum()
    return float(np.sum(p * p))

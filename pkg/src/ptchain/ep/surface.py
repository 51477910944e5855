"""Exceptional-point surface of SSH chains with end defects.

Energies are in units of ``t2`` (set to 1); the grid runs over
``t1 / t2`` and ``Delta / t2`` with ``z1 = Delta + i gamma``,
``zn = conj(z1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from ..chebpoly import charpoly_ssh
from ..errors import AmbiguousClusterError, ConvergenceError
from ..lattice import HamiltonianSpec
from ..spectra import tridiagonal_roots
from .algebra import log_discriminant
from .contour import EPPoint, PuiseuxFit, splitting_fit
from .order import ep_order

__all__ = [
    "SurfaceResult",
    "ssh_charpoly_real",
    "disc_sign",
    "ssh_threshold_gamma",
    "refine_ssh_ep3",
    "ssh_ep4_points",
    "ssh_splitting_fit",
    "ep_surface_ssh",
]


def ssh_charpoly_real(n, t1, delta, gamma, tL=0.0, tR=0.0):
    """Real characteristic polynomial of the PT-symmetric SSH chain (``t2 = 1``)."""
    z1 = complex(delta, gamma)
    return charpoly_ssh(n, t1, 1.0, z1, z1.conjugate(), tL, tR).real_part()


def disc_sign(n, t1, delta, gamma, tL=0.0, tR=0.0) -> int:
    """Sign of the discriminant: ``(-1)^(number of complex pairs)``."""
    phase, logabs = log_discriminant(ssh_charpoly_real(n, t1, delta, gamma, tL, tR))
    if logabs == -np.inf:
        return 0
    return 1 if phase.real > 0 else -1


def ssh_threshold_gamma(n, t1, delta, gamma_min=1e-10, gamma_max=10.0, samples=120,
                        rtol=1e-13, tL=0.0, tR=0.0) -> float:
    """First ``gamma`` where the discriminant changes sign; ``inf`` if none."""
    grid = np.geomspace(gamma_min, gamma_max, samples)
    prev_g, prev_s = grid[0], disc_sign(n, t1, delta, grid[0], tL, tR)
    for g in grid[1:]:
        s = disc_sign(n, t1, delta, g, tL, tR)
        if s != prev_s:
            lo, hi = prev_g, g
            while hi - lo > rtol * hi:
                mid = 0.5 * (lo + hi)
                if disc_sign(n, t1, delta, mid, tL, tR) == prev_s:
                    lo = mid
                else:
                    hi = mid
            return 0.5 * (lo + hi)
        prev_g, prev_s = g, s
    return math.inf


def _ssh_spec(n, t1, delta, gamma):
    z1 = complex(delta, gamma)
    return HamiltonianSpec.ssh(n, t1, 1.0, z1, z1.conjugate())


def _pair_eigenvalue(n, t1, delta, gamma):
    roots = tridiagonal_roots(_ssh_spec(n, t1, delta, gamma))
    d = np.abs(roots[:, None] - roots[None, :])
    np.fill_diagonal(d, np.inf)
    i, j = np.unravel_index(np.argmin(d), d.shape)
    return complex(0.5 * (roots[i] + roots[j]))


def refine_ssh_ep3(n, t1, lam, delta, gamma, tol=1e-12, max_iter=60):
    """Newton on ``P = P' = P'' = 0`` in ``(lambda, Delta, gamma)`` at fixed ``t1``.

    Parameter derivatives are central differences.

    Raises
    ------
    ConvergenceError
        If the scaled residual stays above ``tol``.
    """
    def F(v):
        p = ssh_charpoly_real(n, t1, v[1], v[2])
        return np.array([p(v[0]).real, p.deriv(1)(v[0]).real, p.deriv(2)(v[0]).real]), p

    v = np.array([lam, delta, gamma], dtype=float)
    res = np.inf
    for _ in range(max_iter):
        f, p = F(v)
        scale = 1 + float(np.max(np.abs(p.coeffs))) * (1 + abs(v[0])) ** n
        res = float(np.max(np.abs(f)) / scale)
        if res < tol:
            return tuple(float(c) for c in v)
        J = np.empty((3, 3))
        J[:, 0] = [p.deriv(1)(v[0]).real, p.deriv(2)(v[0]).real, p.deriv(3)(v[0]).real]
        for j in (1, 2):
            h = 1e-7 * (1 + abs(v[j]))
            e = np.zeros(3)
            e[j] = h
            J[:, j] = (F(v + e)[0] - F(v - e)[0]) / (2 * h)
        try:
            v = v - np.linalg.solve(J, f)
        except np.linalg.LinAlgError:
            break
    raise ConvergenceError("SSH EP3 Newton did not converge", {"point": v, "residual": res})


def ssh_splitting_fit(n, t1, delta, gamma, lambda0, direction=(0.0, 1.0), h_grid=None,
                      k_near: int = 2) -> PuiseuxFit:
    """Eigenvalue splitting exponent when ``(Delta, gamma)`` moves along ``direction``."""
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    return splitting_fit(lambda h: _ssh_spec(n, t1, delta + h * u[0], gamma + h * u[1]),
                         lambda0, h_grid, k_near)


def _even_parts(n, t1):
    # at Delta = 0 and no corners, P = A + c B with c = gamma^2
    a = charpoly_ssh(n, t1, 1.0, 0.0, 0.0).real_part()
    b = charpoly_ssh(n, t1, 1.0, 1j, -1j).real_part() - a
    return a, b


def _ep4_function(n, t1):
    a, b = _even_parts(n, t1)
    return (a(0.0) * b.deriv(2)(0.0) - a.deriv(2)(0.0) * b(0.0)).real


def ssh_ep4_points(n: int, t1_range=(0.2, 3.0), samples: int = 400) -> list:
    """Fourth-order EPs at ``Delta = 0``, ``lambda = 0`` (even n, no corners).

    With ``Delta = 0`` the characteristic polynomial is even in lambda and
    affine in ``c = gamma^2``, ``P = A + c B``.  A quadruple zero root
    needs ``A(0) + c B(0) = 0`` and ``A''(0) + c B''(0) = 0``, i.e. a
    zero of ``A(0) B''(0) - A''(0) B(0)`` in ``t1`` with ``c > 0``.
    Returns ``EPPoint`` objects with ``t1_over_t2`` set and order from
    :func:`ep_order`.
    """
    if n % 2:
        raise ValueError("EP4 search needs even n")
    ts = np.linspace(*t1_range, samples)
    vals = [_ep4_function(n, t) for t in ts]
    out = []
    for i in range(samples - 1):
        if np.sign(vals[i]) == np.sign(vals[i + 1]) or vals[i] == 0:
            continue
        t1 = optimize.brentq(lambda t: _ep4_function(n, t), ts[i], ts[i + 1], xtol=1e-15)
        a, b = _even_parts(n, t1)
        c = -(a(0.0) / b(0.0)).real
        if c <= 0:
            continue
        g = math.sqrt(c)
        try:
            order = ep_order(_ssh_spec(n, t1, 0.0, g), 0.0, tol=1e-3).order
        except (AmbiguousClusterError, ValueError):
            order = 0
        out.append(EPPoint(0.0, g, 0j, order, "cusp", None, None, float(t1)))
    return out


@dataclass(frozen=True)
class SurfaceResult:
    """``gamma_EP`` sampled on a ``(t1/t2, Delta/t2)`` grid.

    ``gamma[i, j]`` belongs to ``ratios[i]`` and ``deltas[j]``; ``inf``
    marks rays without an EP below ``gamma_max``.  ``eigenvalue`` holds
    the coalescing eigenvalue and ``order`` its EP order (0: unresolved).
    """

    n: int
    ratios: np.ndarray
    deltas: np.ndarray
    gamma: np.ndarray
    eigenvalue: np.ndarray
    order: np.ndarray
    ridges: tuple = field(default=())
    ep4: tuple = field(default=())

    def rows(self):
        """``(t1_over_t2, delta, gamma, order)`` tuples in grid order."""
        for i, r in enumerate(self.ratios):
            for j, d in enumerate(self.deltas):
                yield float(r), float(d), float(self.gamma[i, j]), int(self.order[i, j])


def _node(args):
    n, t1, delta, gamma_max = args
    g = ssh_threshold_gamma(n, t1, delta, gamma_max=gamma_max)
    if not np.isfinite(g):
        return g, complex("nan"), 0
    lam = _pair_eigenvalue(n, t1, delta, g)
    order = 0
    for tol in (1e-5, 1e-3):
        try:
            order = ep_order(_ssh_spec(n, t1, delta, g), lam, tol=tol).order
            break
        except AmbiguousClusterError:
            continue
        except ValueError:
            break
    return g, lam, order


def _ridges(n, ratios, deltas, gamma, lam):
    """EP3 points seeded where the third-nearest root meets the pair."""
    found = []
    for i, t1 in enumerate(ratios):
        for j in range(len(deltas) - 1):
            g0, g1 = gamma[i, j], gamma[i, j + 1]
            if not (np.isfinite(g0) and np.isfinite(g1)):
                continue
            s0 = ssh_charpoly_real(n, t1, deltas[j], g0).deriv(2)(lam[i, j].real).real
            s1 = ssh_charpoly_real(n, t1, deltas[j + 1], g1).deriv(2)(lam[i, j + 1].real).real
            if np.sign(s0) == np.sign(s1):
                continue
            seed = (0.5 * (lam[i, j] + lam[i, j + 1]).real, 0.5 * (deltas[j] + deltas[j + 1]),
                    0.5 * (g0 + g1))
            try:
                lam3, d3, g3 = refine_ssh_ep3(n, t1, *seed)
            except ConvergenceError:
                continue
            if not (deltas[j] - 1e-9 <= d3 <= deltas[j + 1] + 1e-9) or g3 <= 0:
                continue
            try:
                order = ep_order(_ssh_spec(n, t1, d3, g3), lam3, tol=1e-3).order
            except (AmbiguousClusterError, ValueError):
                continue
            if order >= 3:
                found.append(EPPoint(d3, g3, complex(lam3), order, "cusp", None, None,
                                     float(t1)))
    return found


def ep_surface_ssh(n: int, ratios, deltas, *, gamma_max: float = 10.0, ridges: bool = True,
                   ep4: bool = True, jobs: int = 1) -> SurfaceResult:
    """Sample ``gamma_EP(t1/t2, Delta/t2)`` for the SSH chain with end defects.

    Each node bisects in gamma on the sign of the discriminant of the
    characteristic polynomial.  EP3 ridge points come from sign changes of
    ``P''`` at the coalescing eigenvalue between neighbouring nodes,
    solved exactly and confirmed by :func:`ep_order`.  EP4 points at
    ``Delta = 0`` come from :func:`ssh_ep4_points` over the ratio range.
    """
    if n % 2:
        raise ValueError("ep_surface_ssh needs even n")
    ratios = np.asarray(ratios, dtype=float)
    deltas = np.asarray(deltas, dtype=float)
    tasks = [(n, float(r), float(d), gamma_max) for r in ratios for d in deltas]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_node, tasks))
    else:
        results = [_node(t) for t in tasks]
    shape = (len(ratios), len(deltas))
    gamma = np.array([r[0] for r in results]).reshape(shape)
    lam = np.array([r[1] for r in results]).reshape(shape)
    order = np.array([r[2] for r in results]).reshape(shape)
    ridge_pts = tuple(_ridges(n, ratios, deltas, gamma, lam)) if ridges else ()
    ep4_pts = ()
    if ep4 and len(ratios):
        lo, hi = float(ratios.min()), float(ratios.max())
        if hi > lo:
            ep4_pts = tuple(ssh_ep4_points(n, (lo, hi)))
    return SurfaceResult(n, ratios, deltas, gamma, lam, order, ridge_pts, ep4_pts)

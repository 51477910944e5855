"""EP contours of the uniform chain with end defects and their cusps.

Coordinates are dimensionless (``t = 1``): ``z1' = Delta + i gamma =
r exp(i theta)`` on site 1 and its conjugate on site n.  Eigenvalues are
reported as energies ``lambda / t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from ..chebpoly import cheb_u_poly
from ..errors import AmbiguousClusterError, ConvergenceError
from ..lattice import HamiltonianSpec
from ..spectra import tridiagonal_roots
from .indicator import _dense, _p_value, _quadratic, auto_dps, ep_indicator
from .order import ep_order

__all__ = [
    "EPPoint",
    "EPContour",
    "end_defect_spec",
    "ray_crossings",
    "ep_radius",
    "coalescing_eigenvalue",
    "PuiseuxFit",
    "puiseux_fit",
    "puiseux_tau",
    "splitting_fit",
    "refine_ep3",
    "cusp_direction",
    "find_cusps",
    "ep_contour",
    "DEFAULT_H_GRID",
]

DEFAULT_H_GRID = np.logspace(-7, -3, 9)


@dataclass(frozen=True)
class EPPoint:
    """An exceptional point in the (Delta, gamma) plane."""

    delta: float
    gamma: float
    eigenvalue: complex
    order: int
    kind: str = "regular"
    theta: float | None = None
    indicator: float | None = None
    t1_over_t2: float | None = None

    @property
    def radius(self) -> float:
        return math.hypot(self.delta, self.gamma)


@dataclass(frozen=True)
class EPContour:
    """EP points ordered by ``theta`` in ``(0, pi)`` plus detected cusps."""

    n: int
    points: tuple
    cusps: tuple
    diagnostics: tuple = field(default=())

    @property
    def thetas(self) -> np.ndarray:
        return np.array([p.theta for p in self.points])

    @property
    def radii(self) -> np.ndarray:
        return np.array([p.radius for p in self.points])

    def mirrored(self) -> "EPContour":
        """Append the ``theta -> -theta`` half (swapped gain and loss)."""
        lower = [EPPoint(p.delta, -p.gamma, p.eigenvalue.conjugate(), p.order, p.kind,
                         -p.theta, p.indicator) for p in reversed(self.points)]
        return EPContour(self.n, tuple(lower) + self.points, self.cusps, self.diagnostics)


def end_defect_spec(n: int, z1p: complex, t: float = 1.0) -> HamiltonianSpec:
    """Uniform chain with ``z1 = t z1'`` on site 1 and its conjugate on site n."""
    z = [0j] * n
    z[0] = complex(z1p) * t
    z[-1] = z[0].conjugate()
    return HamiltonianSpec(n, (float(t),) * (n - 1), tuple(z))


def _indicator_many(n, z):
    """Vectorized float indicator with per-point dense fallback."""
    z = np.asarray(z, dtype=complex)
    s, pq = 2 * z.real, np.abs(z) ** 2 + 0j
    c2, c1, c0 = _quadratic(n, s, pq)
    scale = n + 1 + n * np.abs(s) + (n - 1) * np.abs(pq)
    p1, pm1 = _p_value(n, s, pq, 1.0), _p_value(n, s, pq, -1.0)
    root = np.sqrt(c1 * c1 - 4 * c2 * c0)
    with np.errstate(all="ignore"):
        bp, bm = (-c1 + root) / (2 * c2), (-c1 - root) / (2 * c2)
        val = _p_value(n, s, pq, bp) * _p_value(n, s, pq, bm) * pq**n / ((1 - pq) * p1 * pm1)
    bad = ((np.abs(c2) <= 1e-6 * (np.abs(c1) + np.abs(c0))) | (np.abs(1 - pq) <= 1e-6)
           | (np.abs(p1) <= 1e-6 * scale) | (np.abs(pm1) <= 1e-6 * scale) | ~np.isfinite(val))
    for i in np.flatnonzero(bad):
        val[i] = _dense(n, z[i], z[i].conjugate(), False)
    return val.real


def _safe_indicator(n, z, dps):
    if abs(abs(z) - 1.0) < 1e-15:
        z = z * (1 + 2e-15)
    return ep_indicator(n, z, dps=dps)


def _ray_rmax(n, theta):
    return 4.0 * max(2.0, abs(math.sin(theta)) ** (-1.0 / max(n - 1, 1)))


def ray_crossings(n: int, theta: float, rmax: float | None = None, samples: int = 400) -> list:
    """Brackets ``(r_lo, r_hi)`` where the indicator changes sign on a ray."""
    rmax = _ray_rmax(n, theta) if rmax is None else rmax
    rs = np.geomspace(1e-2, rmax, samples)
    z = rs * np.exp(1j * theta)
    v = np.sign(_indicator_many(n, z))
    for i in np.flatnonzero(np.abs(z.real) > 3):
        v[i] = np.sign(_safe_indicator(n, z[i], auto_dps(n, z[i].real)))
    idx = np.flatnonzero((v[:-1] * v[1:]) < 0)
    return [(float(rs[i]), float(rs[i + 1])) for i in idx]


def ep_radius(n: int, theta: float, rtol: float = 1e-14, rmax: float | None = None,
              diagnostics: list | None = None) -> float:
    """``r_EP(theta)``: first indicator sign change along the ray.

    Returns ``nan`` (and records a diagnostic) if the ray has no crossing.
    More than one crossing is also recorded; the innermost is used.
    """
    brackets = ray_crossings(n, theta, rmax)
    if not brackets:
        if diagnostics is not None:
            diagnostics.append(f"theta={theta:.17g}: no sign change on ray")
        return math.nan
    if len(brackets) > 1 and diagnostics is not None:
        diagnostics.append(f"theta={theta:.17g}: {len(brackets)} sign changes on ray")
    lo, hi = brackets[0]
    dps = auto_dps(n, hi * math.cos(theta))
    e = np.exp(1j * theta)

    def f(r):
        return _safe_indicator(n, r * e, dps)

    flo = np.sign(f(lo))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = np.sign(f(mid))
        if fm == 0:
            return mid
        if fm == flo:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rtol * hi:
            break
    return 0.5 * (lo + hi)


def coalescing_eigenvalue(n: int, z1p: complex, k: int = 2) -> complex:
    """Mean of the ``k`` mutually closest eigenvalues (energy units)."""
    roots = tridiagonal_roots(end_defect_spec(n, z1p))
    best, best_val = np.inf, 0j
    for i in range(len(roots)):
        d = np.abs(roots - roots[i])
        near = np.argsort(d)[:k]
        spread = d[near].max()
        if spread < best:
            best, best_val = spread, complex(np.mean(roots[near]))
    return best_val


@dataclass(frozen=True)
class PuiseuxFit:
    """Log-log fit of the eigenvalue splitting against the perturbation size.

    ``tau`` assumes the square-root law ``|d lambda| = tau h^(1/2)``;
    ``exponent`` is the free slope and ``k_estimate`` the nearest of
    1, 2, 3 to ``1 / exponent`` (None if none is within 0.15).
    """

    tau: float
    exponent: float
    intercept: float
    residual: float
    k_estimate: int | None
    h: np.ndarray
    splitting: np.ndarray


def _direction(n, theta, r, direction):
    if isinstance(direction, (complex, float, int)) and not isinstance(direction, bool):
        u = complex(direction)
    elif direction == "radial":
        u = np.exp(1j * theta)
    elif direction == "tangential":
        d = 1e-5
        zp = ep_radius(n, theta + d) * np.exp(1j * (theta + d))
        zm = ep_radius(n, theta - d) * np.exp(1j * (theta - d))
        u = (zp - zm) / (2 * d)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return u / abs(u)


def puiseux_fit(n: int, theta: float | None = None, *, h_grid=None, direction="radial",
                point: complex | None = None, eigenvalue: complex | None = None,
                k_near: int = 2) -> PuiseuxFit:
    """Fit ``|d lambda| ~ h^e`` for perturbations ``z1' -> z1' + h u``.

    The base point is ``r_EP(theta) exp(i theta)`` unless ``point`` gives
    ``z1'`` directly.  ``|d lambda|`` is the largest distance from the EP
    eigenvalue among its ``k_near`` nearest perturbed eigenvalues.
    """
    h = np.asarray(DEFAULT_H_GRID if h_grid is None else h_grid, dtype=float)
    if point is None:
        r = ep_radius(n, theta)
        point = r * np.exp(1j * theta)
    else:
        point = complex(point)
        theta = math.atan2(point.imag, point.real) if theta is None else theta
    lam0 = coalescing_eigenvalue(n, point) if eigenvalue is None else complex(eigenvalue)
    u = _direction(n, theta, abs(point), direction)
    return splitting_fit(lambda hh: end_defect_spec(n, point + hh * u), lam0, h, k_near)


def splitting_fit(make_spec, lambda0: complex, h_grid=None, k_near: int = 2) -> PuiseuxFit:
    """Log-log fit of eigenvalue splitting for any one-parameter family.

    ``make_spec(h)`` returns the perturbed HamiltonianSpec; the splitting
    is the distance from ``lambda0`` to its ``k_near``-th nearest root.
    """
    h = np.asarray(DEFAULT_H_GRID if h_grid is None else h_grid, dtype=float)
    lam0 = complex(lambda0)
    split = np.empty_like(h)
    for i, hi in enumerate(h):
        roots = tridiagonal_roots(make_spec(hi))
        split[i] = np.sort(np.abs(roots - lam0))[k_near - 1]
    lh, ls = np.log(h), np.log(split)
    slope, icpt = np.polyfit(lh, ls, 1)
    resid = float(np.sqrt(np.mean((ls - (slope * lh + icpt)) ** 2)))
    tau = float(np.exp(np.mean(ls - 0.5 * lh)))
    k_est = None
    if slope > 0:
        inv = 1.0 / slope
        if round(inv) in (1, 2, 3) and abs(inv - round(inv)) < 0.15:
            k_est = int(round(inv))
    return PuiseuxFit(tau, float(slope), float(icpt), resid, k_est, h, split)


def puiseux_tau(n: int, theta: float, h_grid=None) -> PuiseuxFit:
    """Radial Puiseux fit at ``(theta, r_EP(theta))``; ``.tau`` is the coefficient."""
    return puiseux_fit(n, theta, h_grid=h_grid, direction="radial")


def refine_ep3(n: int, x0: float, delta: float, gamma: float, tol: float = 1e-13,
               max_iter: int = 50):
    """Newton on ``P = P' = P'' = 0`` in ``(x, Delta', gamma')``.

    ``x = lambda / 2t``.  Returns the converged ``(x, Delta', gamma')``.

    Raises
    ------
    ConvergenceError
        If the residual does not drop below ``tol``.
    """
    un, un1, un2 = cheb_u_poly(n), cheb_u_poly(n - 1), cheb_u_poly(n - 2)
    d = [[p.deriv(j) if j else p for j in range(4)] for p in (un, un1, un2)]
    v = np.array([x0, delta, gamma], dtype=float)
    res = np.inf
    for _ in range(max_iter):
        x, D, g = v
        s, pq = 2 * D, D * D + g * g
        F = np.array([(d[0][j](x) - s * d[1][j](x) + pq * d[2][j](x)).real for j in range(3)])
        J = np.empty((3, 3))
        for j in range(3):
            J[j, 0] = (d[0][j + 1](x) - s * d[1][j + 1](x) + pq * d[2][j + 1](x)).real
            J[j, 1] = (-2 * d[1][j](x) + 2 * D * d[2][j](x)).real
            J[j, 2] = (2 * g * d[2][j](x)).real
        scale = 1 + abs(d[0][0](x)) + abs(s * d[1][0](x)) + abs(pq * d[2][0](x))
        res = float(np.max(np.abs(F)) / scale)
        if res < tol:
            return tuple(float(c) for c in v)
        try:
            step = np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            break
        v = v - step
    raise ConvergenceError("EP3 Newton did not converge", {"point": v, "residual": res})


def cusp_direction(theta: float) -> complex:
    """Perturbation direction used to measure the exponent at a cusp.

    The radial direction is nearly tangent to the kernel of ``p0'`` close
    to a cusp (and exactly so at ``theta = pi/2`` for odd n, where the
    zero mode survives), so it shows ``1/2`` there.  Rotating by ``pi/4``
    gives a generic direction.
    """
    return complex(np.exp(1j * (theta + math.pi / 4)))


def _cusp_point(n, theta, tau_grid_bracket, h_grid, cusp_exponent):
    a, b, c = tau_grid_bracket

    def neg_tau(th):
        return -puiseux_fit(n, th, h_grid=h_grid).tau

    try:
        res = optimize.minimize_scalar(neg_tau, bracket=(a, b, c), method="golden",
                                       options={"xtol": 1e-6})
        th = float(res.x)
    except ValueError:
        th = b
    r = ep_radius(n, th)
    z = r * np.exp(1j * th)
    lam = coalescing_eigenvalue(n, z, k=3)
    try:
        x, D, g = refine_ep3(n, lam.real / 2, z.real, z.imag)
    except ConvergenceError:
        return None
    zc = complex(D, g)
    th_c = math.atan2(g, D)
    if not 0 < th_c < math.pi:
        return None
    fit = puiseux_fit(n, th_c, point=zc, eigenvalue=2 * x, h_grid=h_grid,
                      direction=cusp_direction(th_c))
    if fit.exponent >= cusp_exponent:
        return None
    return EPPoint(D, g, complex(2 * x), 3, "cusp", th_c, None), fit


def _fine_bracket(n, lo, hi, h_grid, samples=17):
    ths = np.linspace(lo, hi, samples)
    taus = [puiseux_fit(n, th, h_grid=h_grid).tau for th in ths]
    i = int(np.clip(np.argmax(taus), 1, samples - 2))
    return ths[i - 1], ths[i], ths[i + 1]


def find_cusps(n: int, thetas, taus, eigenvalues=None, h_grid=None,
               cusp_exponent: float = 0.47, jump_factor: float = 4.0):
    """Cusps from the tau profile along the contour.

    Seeds are strict local maxima of ``tau`` and, when ``eigenvalues`` is
    given, grid intervals where the EP eigenvalue jumps by more than
    ``jump_factor`` times the median step (the tau peak can be narrower
    than the grid).  Each seed is sharpened by golden-section search on
    tau and solved exactly for a triple root; it is kept only if the
    exponent along :func:`cusp_direction` is below ``cusp_exponent``.
    Returns ``[(EPPoint, PuiseuxFit)]`` sorted by theta.
    """
    thetas, taus = np.asarray(thetas), np.asarray(taus)
    brackets = []
    for i in range(1, len(thetas) - 1):
        if taus[i] > taus[i - 1] and taus[i] >= taus[i + 1]:
            brackets.append((thetas[i - 1], thetas[i], thetas[i + 1]))
    if eigenvalues is not None and len(thetas) > 2:
        steps = np.abs(np.diff(np.asarray(eigenvalues)))
        med = np.median(steps)
        for i in np.flatnonzero(steps > jump_factor * med):
            if not any(a <= thetas[i] and thetas[i + 1] <= c for a, _, c in brackets):
                brackets.append(_fine_bracket(n, thetas[i], thetas[i + 1], h_grid))
    found = []
    for br in brackets:
        hit = _cusp_point(n, br[1], br, h_grid, cusp_exponent)
        if hit is None:
            continue
        if all(abs(hit[0].theta - p.theta) > 1e-6 for p, _ in found):
            found.append(hit)
    found.sort(key=lambda pf: pf[0].theta)
    return found


def _boundary_kind(lam, tol=1e-6):
    return "boundary-case" if abs(abs(lam.real) - 2.0) < tol and abs(lam.imag) < tol else "regular"


def _order_of(n, z, lam, diagnostics, th):
    for tol in (1e-5, 1e-3):
        try:
            return ep_order(end_defect_spec(n, z), lam, tol=tol).order
        except AmbiguousClusterError:
            continue
        except ValueError as exc:
            diagnostics.append(f"theta={th:.17g}: order check failed ({exc})")
            return 0
    diagnostics.append(f"theta={th:.17g}: ambiguous root cluster")
    return 0


def _mirror(p: EPPoint) -> EPPoint:
    return EPPoint(-p.delta, p.gamma, -p.eigenvalue.conjugate(), p.order, p.kind,
                   math.pi - p.theta, p.indicator)


def ep_contour(n: int, theta_grid=None, tol: float = 1e-14, *, cusps: bool = True,
               orders: bool = True, h_grid=None) -> EPContour:
    """Trace ``r_EP(theta)`` for ``theta`` in ``(0, pi)``.

    Rays with ``theta <= pi/2`` are solved; the rest follow from the
    reflection ``Delta -> -Delta``, which maps ``r(theta)`` to
    ``r(pi - theta)`` and eigenvalues to ``-conj(lambda)``.  The default
    grid has 181 points, symmetric about ``pi/2``.

    Parameters
    ----------
    n : int
        Chain length, at least 3.
    theta_grid : array_like, optional
        Angles in ``(0, pi)``.
    tol : float
        Relative bisection tolerance on ``r``.
    cusps : bool
        Run the cusp detector.
    orders : bool
        Re-check every point with :func:`ep_order`.
    """
    if n < 3:
        raise ValueError("ep_contour needs n >= 3")
    if theta_grid is None:
        theta_grid = np.linspace(0, math.pi, 183)[1:-1]
    thetas = np.sort(np.asarray(theta_grid, dtype=float))
    diagnostics = []
    # fold onto (0, pi/2]; keys are rounded so th and pi - th share a solve
    folded = {}
    for th in thetas:
        f = min(th, math.pi - th)
        folded.setdefault(np.round(f, 14), float(f))

    solved, taus = {}, {}
    for key, f in folded.items():
        r = ep_radius(n, f, tol, diagnostics=diagnostics)
        if not np.isfinite(r):
            continue
        z = r * np.exp(1j * f)
        lam = coalescing_eigenvalue(n, z)
        order = _order_of(n, z, lam, diagnostics, f) if orders else 2
        ind = _safe_indicator(n, z, auto_dps(n, z.real))
        solved[key] = EPPoint(z.real, z.imag, lam, order, _boundary_kind(lam), float(f), ind)
        if cusps:
            taus[f] = puiseux_fit(n, f, point=z, eigenvalue=lam, h_grid=h_grid).tau

    points = []
    for th in thetas:
        f = np.round(min(th, math.pi - th), 14)
        if f not in solved:
            continue
        p = solved[f]
        points.append(p if th <= math.pi / 2 else _mirror(p))

    cusp_points = ()
    if cusps and taus:
        half = sorted(taus)
        mirror = [math.pi - f for f in reversed(half) if f < math.pi / 2 - 1e-12]
        prof_t = np.array(half + mirror)
        tail = [f for f in reversed(half) if f < math.pi / 2 - 1e-12]
        prof_v = np.array([taus[f] for f in half] + [taus[f] for f in tail])
        prof_l = np.array([solved[np.round(f, 14)].eigenvalue for f in half]
                          + [-solved[np.round(f, 14)].eigenvalue.conjugate() for f in tail])
        # candidates on the lower half (and pi/2 itself); mirror the rest
        upto = len(half) + (1 if len(half) < len(prof_t) else 0)
        found = find_cusps(n, prof_t[:upto], prof_v[:upto], prof_l[:upto], h_grid)
        out = [p for p, _ in found if p.theta <= math.pi / 2 + 1e-9]
        out += [_mirror(p) for p in out if p.theta < math.pi / 2 - 1e-9]
        cusp_points = tuple(sorted(out, key=lambda p: p.theta))
    return EPContour(n, tuple(points), cusp_points, tuple(diagnostics))

"""Order of an exceptional point and local branching behaviour."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

from ..errors import AmbiguousClusterError
from ..lattice import HamiltonianSpec, build_dense
from ..spectra import _evaluator_for, _polish, tridiagonal_roots

__all__ = [
    "OrderResult",
    "ep_order",
    "DegenerateDirectionError",
    "branch_order",
    "local_coefficient_gradients",
    "singular_point_kind",
]


@dataclass(frozen=True)
class OrderResult:
    """Multiplicity data for the eigenvalue cluster nearest ``lambda0``.

    ``int(result)`` is the algebraic multiplicity.  ``order`` is the number
    of coalescing eigenvectors, which equals the algebraic multiplicity
    when a single Jordan block is present and is 1 for semisimple clusters.
    """

    eigenvalue: complex
    algebraic_multiplicity: int
    geometric_multiplicity: int
    hermitian: bool
    window: tuple

    @property
    def is_ep(self) -> bool:
        return (not self.hermitian and self.algebraic_multiplicity >= 2
                and self.geometric_multiplicity < self.algebraic_multiplicity)

    @property
    def order(self) -> int:
        if not self.is_ep:
            return 1
        return self.algebraic_multiplicity - self.geometric_multiplicity + 1

    def __int__(self) -> int:
        return self.algebraic_multiplicity


def ep_order(spec: HamiltonianSpec, lambda0: complex, tol: float = 1e-4,
             gap: float = 10.0) -> OrderResult:
    """Count the roots of ``det(lambda - H)`` clustered at ``lambda0``.

    A root belongs to the cluster when its distance from ``lambda0`` is at
    most ``tol * (s + |lambda0|)`` with ``s`` the largest matrix entry.  A
    ``k``-fold root perturbed by ``eps`` splits by ``eps^(1/k)``, so ``tol``
    must exceed that splitting.

    Raises
    ------
    AmbiguousClusterError
        When some root lies between ``tol`` and ``gap * tol``: the cluster
        boundary is not resolved.
    ValueError
        When no root is within ``tol``.
    """
    s = max(max(abs(v) for v in (*spec.t, *spec.z, spec.tL, spec.tR)), 1e-300)
    unit = spec.scaled(1.0 / s)
    roots = tridiagonal_roots(unit) * s
    lam0 = complex(lambda0)
    rel = np.abs(roots - lam0) / (s + abs(lam0))
    window = (tol, gap * tol)
    between = (rel > tol) & (rel <= gap * tol)
    if between.any():
        raise AmbiguousClusterError(
            f"{int(between.sum())} root(s) between {tol:g} and {gap * tol:g} relative distance",
            window=window,
        )
    inside = rel <= tol
    k = int(inside.sum())
    if k == 0:
        raise ValueError(f"no eigenvalue within relative distance {tol:g} of {lam0}")
    members = roots[inside]
    centre = complex(np.mean(members))
    spread = float(np.max(np.abs(members - centre)))
    value = _polish(_evaluator_for(unit), centre / s, k, max(10 * spread / s, tol)) * s

    h = build_dense(spec)
    hermitian = bool(np.allclose(h, h.conj().T, rtol=0, atol=1e-14 * s))
    if hermitian:
        geo = k
    else:
        sv = np.linalg.svd(h - value * np.eye(spec.n), compute_uv=False)
        thr = max(1e3 * np.finfo(float).eps, 10 * spread / s) * np.linalg.norm(h, 2)
        geo = max(1, int(np.sum(sv <= thr)))
        geo = min(geo, k)
    return OrderResult(value, k, geo, hermitian, window)


class DegenerateDirectionError(ArithmeticError):
    """Every directional derivative of the local coefficients vanishes."""

    def __init__(self, message, products=None):
        super().__init__(message)
        self.products = products


def branch_order(gradients, u, rtol: float = 1e-8) -> Fraction:
    """Puiseux exponent of the eigenvalues along direction ``u``.

    ``gradients[i]`` is the parameter gradient of the coefficient ``p_i``
    of the local polynomial ``delta^k + p_{k-1} delta^{k-1} + ... + p_0``
    at an EP of order ``k = len(gradients)``, where all ``p_i`` vanish.
    The first ``i`` with ``p_i' . u != 0`` gives the exponent
    ``1 / (k - i)``: ``1/3``, ``1/2`` or ``1`` for ``k = 3``.

    Raises
    ------
    DegenerateDirectionError
        If all products vanish to ``rtol``.
    """
    g = np.atleast_2d(np.asarray(gradients))
    u = np.asarray(u)
    k = g.shape[0]
    products = g @ u
    for i, (p, row) in enumerate(zip(products, g)):
        if abs(p) > rtol * max(np.linalg.norm(row) * np.linalg.norm(u), 1e-300):
            return Fraction(1, k - i)
    raise DegenerateDirectionError("direction annihilates every coefficient gradient", products)


def local_coefficient_gradients(poly_of_params, params, lambda0, k: int, step: float = 1e-6):
    """Central-difference gradients of ``p_i = P^(i)(lambda0) / i!``, ``i < k``.

    ``poly_of_params(params)`` must return a ComplexPolynomial in lambda.
    Returns a ``(k, len(params))`` complex array.
    """
    params = np.asarray(params, dtype=float)
    out = np.zeros((k, len(params)), dtype=complex)
    for j in range(len(params)):
        e = np.zeros_like(params)
        e[j] = step
        hi, lo = poly_of_params(params + e), poly_of_params(params - e)
        for i in range(k):
            d_hi = hi.deriv(i)(lambda0) if i else hi(lambda0)
            d_lo = lo.deriv(i)(lambda0) if i else lo(lambda0)
            out[i, j] = (d_hi - d_lo) / (2 * step * factorial(i))
    return out


def singular_point_kind(f, point, h: float = 1e-4, rtol: float = 1e-6) -> str:
    """Classify a point of the real curve ``f(x, y) = 0``.

    Returns ``"regular"`` when the gradient is nonzero, otherwise
    ``"crunode"`` (saddle: two branches cross), ``"acnode"`` (extremum:
    isolated point) or ``"cusp"`` (degenerate Hessian).
    """
    x, y = map(float, point)
    f0 = f(x, y)
    fx = (f(x + h, y) - f(x - h, y)) / (2 * h)
    fy = (f(x, y + h) - f(x, y - h)) / (2 * h)
    fxx = (f(x + h, y) - 2 * f0 + f(x - h, y)) / h**2
    fyy = (f(x, y + h) - 2 * f0 + f(x, y - h)) / h**2
    fxy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4 * h * h)
    curv = max(abs(fxx), abs(fyy), abs(fxy), 1e-300)
    if np.hypot(fx, fy) > 1e3 * h * curv:
        return "regular"
    det = fxx * fyy - fxy * fxy
    if abs(det) <= rtol * curv * curv:
        return "cusp"
    return "crunode" if det < 0 else "acnode"

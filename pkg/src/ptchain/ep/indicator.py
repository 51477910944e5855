"""Exceptional-point indicator for the uniform chain with end defects.

Everything here is dimensionless: energies in units of ``t``, the spectral
variable ``x = lambda / (2t)`` and defects ``z' = z / t`` on sites 1 and n.
The characteristic polynomial is then
``P(x) = U_n(x) - (z1' + zn') U_{n-1}(x) + z1' zn' U_{n-2}(x)``.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np

from ..chebpoly import ComplexPolynomial, cheb_u, cheb_u_poly
from ..errors import SpecError
from .algebra import log_discriminant

__all__ = [
    "critical_chain_poly",
    "ep_indicator",
    "indicator_constant",
    "threshold_gamma",
    "asymptotic_threshold",
    "auto_dps",
]

# relative size below which the quadratic route is abandoned for the
# dense discriminant
_FALLBACK_REL = 1e-6


def critical_chain_poly(n: int, z1p: complex, znp: complex | None = None) -> ComplexPolynomial:
    """``P_{n,1}(x)`` as a polynomial in ``x = lambda / 2t``."""
    if n < 2:
        raise SpecError("need n >= 2")
    z1p = complex(z1p)
    znp = z1p.conjugate() if znp is None else complex(znp)
    p = cheb_u_poly(n) - (z1p + znp) * cheb_u_poly(n - 1)
    return p + (z1p * znp) * cheb_u_poly(n - 2)


def _p_value(n, s, pq, x):
    return cheb_u(n, x) - s * cheb_u(n - 1, x) + pq * cheb_u(n - 2, x)


def indicator_constant(n: int) -> float:
    """``c_n = (-1)^n (2^{n-2} / n)^n``: signed indicator over discriminant."""
    return (-1) ** n * (2.0 ** (n - 2) / n) ** n


def _quadratic(n, s, pq):
    c2 = 4 * n * pq
    c1 = -s * (1 - pq) - 2 * n * s * pq - 2 * n * s
    c0 = (1 - pq) * (2 * pq + (n + 1) * (1 - pq)) + n * s * s
    return c2, c1, c0


def _dense(n, z1p, znp, raw):
    phase, logabs = log_discriminant(critical_chain_poly(n, z1p, znp))
    cn = indicator_constant(n)
    if logabs == -np.inf:
        return 0j
    val = phase * math.copysign(1.0, cn) * math.exp(logabs + math.log(abs(cn)))
    if raw:
        s, pq = z1p + znp, z1p * znp
        val *= (1 - pq) * _p_value(n, s, pq, 1.0) * _p_value(n, s, pq, -1.0) / pq**n
    return val


def ep_indicator(n: int, z1p: complex, znp: complex | None = None, *, raw: bool = False,
                 dps: int | None = None):
    """Sign-changing exceptional-point indicator of the critical chain.

    With ``B(x) = c2 x^2 + c1 x + c0`` and roots ``b+-``, the raw indicator
    is ``P(b+) P(b-)``.  The default (signed) value multiplies this by
    ``(z1' zn')^n / ((1 - z1' zn') P(1) P(-1))``, which turns it into
    ``c_n * prod_{i<j} (x_i - x_j)^2``; see :func:`indicator_constant`.
    Its sign is ``(-1)^n`` times ``(-1)^(number of complex pairs)`` for PT
    inputs, so it flips exactly where a pair of eigenvalues meets.

    Near the exclusion set (``z1' zn' = 0``, ``P(+-1) = 0``, or
    ``z1' zn'`` close to 1) the dense Sylvester discriminant is used.

    Parameters
    ----------
    n : int
        Chain length.
    z1p, znp : complex
        Scaled end defects; ``znp`` defaults to ``conj(z1p)``.
    raw : bool
        Return ``P(b+) P(b-)`` instead of the signed value.
    dps : int, optional
        Evaluate in mpmath with this many digits.

    Returns
    -------
    float or complex
        Real for PT inputs.

    Raises
    ------
    SpecError
        If ``z1' zn' == 1`` exactly.
    """
    pt = znp is None
    z1p = complex(z1p)
    znp = z1p.conjugate() if znp is None else complex(znp)
    pq = z1p * znp
    if pq == 1:
        raise SpecError("z1' zn' = 1 is the exactly solvable case")
    if dps is not None:
        val = _indicator_mp(n, z1p, znp, raw, dps)
    else:
        val = _indicator_float(n, z1p, znp, raw)
    return float(val.real) if pt else complex(val)


def _indicator_float(n, z1p, znp, raw):
    s, pq = z1p + znp, z1p * znp
    c2, c1, c0 = _quadratic(n, s, pq)
    scale = n + 1 + n * abs(s) + (n - 1) * abs(pq)
    p1, pm1 = _p_value(n, s, pq, 1.0), _p_value(n, s, pq, -1.0)
    if (abs(c2) <= _FALLBACK_REL * (abs(c1) + abs(c0))
            or abs(1 - pq) <= _FALLBACK_REL
            or abs(p1) <= _FALLBACK_REL * scale
            or abs(pm1) <= _FALLBACK_REL * scale):
        return complex(_dense(n, z1p, znp, raw))
    root = np.sqrt(complex(c1 * c1 - 4 * c2 * c0))
    bp, bm = (-c1 + root) / (2 * c2), (-c1 - root) / (2 * c2)
    val = _p_value(n, s, pq, bp) * _p_value(n, s, pq, bm)
    if not raw:
        val = val * pq**n / ((1 - pq) * p1 * pm1)
    return complex(val)


def _indicator_mp(n, z1p, znp, raw, dps):
    with mpmath.workdps(dps):
        a, b = mpmath.mpc(z1p), mpmath.mpc(znp)
        s, pq = a + b, a * b
        c2, c1, c0 = _quadratic(n, s, pq)
        root = mpmath.sqrt(c1 * c1 - 4 * c2 * c0)
        bp, bm = (-c1 + root) / (2 * c2), (-c1 - root) / (2 * c2)
        val = _p_value(n, s, pq, bp) * _p_value(n, s, pq, bm)
        if not raw:
            val = val * pq**n / ((1 - pq) * _p_value(n, s, pq, 1) * _p_value(n, s, pq, -1))
        return complex(val)


def asymptotic_threshold(n: int, delta: float, t: float = 1.0) -> float:
    """Large-detuning threshold ``gamma_EP ~ t^{n-1} / Delta^{n-2}``.

    For ``n = 2`` the detuning drops out and the threshold is ``t``.
    """
    if n == 2:
        return float(t)
    return float(t ** (n - 1) / abs(delta) ** (n - 2))


def auto_dps(n: int, delta: float) -> int | None:
    """mpmath precision needed at detuning ``delta`` (None: doubles suffice)."""
    if abs(delta) <= 3:
        return None
    return int(40 + 4 * n * math.log10(abs(delta)))


def _bisect_sign(f, lo, hi, flo, rtol, max_iter=200):
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if np.sign(fm) == flo:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rtol * hi:
            break
    return 0.5 * (lo + hi)


def threshold_gamma(n: int, delta: float = 0.0, *, gamma_max: float | None = None,
                    rtol: float = 1e-14, dps: int | None = None, samples: int = 240) -> float:
    """Smallest ``gamma' > 0`` where the indicator changes sign at fixed ``delta'``.

    The search runs over a geometric grid up to ``gamma_max`` and then
    bisects on the sign.  Returns ``inf`` when no crossing is found.
    ``dps`` defaults to :func:`auto_dps`.
    """
    if dps is None:
        dps = auto_dps(n, delta)
    guess = asymptotic_threshold(n, max(abs(delta), 1.0))
    lo = min(1e-3, guess * 1e-3)
    hi = gamma_max if gamma_max is not None else max(10.0, 10 * guess)

    def f(g):
        z = complex(delta, g)
        if z * z.conjugate() == 1:
            z = complex(delta, g * (1 + 1e-15))
        return ep_indicator(n, z, dps=dps)

    grid = np.geomspace(lo, hi, samples)
    prev_g, prev_v = grid[0], np.sign(f(grid[0]))
    for g in grid[1:]:
        v = np.sign(f(g))
        if v != prev_v and v != 0 and prev_v != 0:
            return float(_bisect_sign(f, prev_g, g, prev_v, rtol))
        if v == 0:
            return float(g)
        prev_g, prev_v = g, v
    return math.inf

"""Resultants and discriminants."""

from __future__ import annotations

import math

import numpy as np

from ..chebpoly import ComplexPolynomial

__all__ = [
    "sylvester_matrix",
    "resultant",
    "log_resultant",
    "discriminant",
    "log_discriminant",
    "cubic_discriminant",
]


def _coeffs(p) -> np.ndarray:
    if isinstance(p, ComplexPolynomial):
        c = np.array(p.coeffs, dtype=complex)
    else:
        c = np.trim_zeros(np.atleast_1d(np.asarray(p, dtype=complex)), "b")
    if c.size == 0 or not np.any(c):
        raise ValueError("resultant of the zero polynomial is undefined")
    return c


def sylvester_matrix(p, q) -> np.ndarray:
    """Sylvester matrix of two polynomials given in ascending coefficients."""
    a, b = _coeffs(p)[::-1], _coeffs(q)[::-1]
    m, n = len(a) - 1, len(b) - 1
    S = np.zeros((m + n, m + n), dtype=complex)
    for i in range(n):
        S[i, i:i + m + 1] = a
    for i in range(m):
        S[n + i, i:i + n + 1] = b
    return S


def log_resultant(p, q) -> tuple:
    """``(phase, log|Res|)`` of the monic-normalized resultant.

    ``Res(p, q) = prod_i q(x_i)`` over the roots ``x_i`` of ``p``.  The
    log form survives magnitudes far outside the double range.
    """
    a, b = _coeffs(p), _coeffs(q)
    m, n = len(a) - 1, len(b) - 1
    if m == 0:
        return 1.0 + 0j, 0.0
    if n == 0:
        v = complex(b[0])
        return v / abs(v), m * math.log(abs(v))
    phase, logabs = np.linalg.slogdet(sylvester_matrix(a / a[-1], b))
    return complex(phase), float(logabs)


def resultant(p, q) -> complex:
    """Monic-normalized resultant ``prod_i q(x_i)`` with ``p(x_i) = 0``.

    Vanishes exactly when ``p`` and ``q`` share a root.

    Examples
    --------
    >>> abs(resultant([-1, 0, 1], [-1, 1]))
    0.0
    """
    phase, logabs = log_resultant(p, q)
    if logabs == -np.inf:
        return 0j
    return phase * math.exp(logabs)


def log_discriminant(p) -> tuple:
    """``(phase, log|disc|)`` with ``disc = prod_{i<j} (x_i - x_j)^2``."""
    c = _coeffs(p)
    d = len(c) - 1
    if d < 1:
        raise ValueError("discriminant needs degree >= 1")
    dp = c[1:] * np.arange(1, d + 1)
    phase, logabs = log_resultant(c, dp)
    # prod_i p'(x_i) = (-1)^{d(d-1)/2} lead^d disc for monic-normalized p
    lead = complex(c[-1])
    phase = phase * (-1) ** (d * (d - 1) // 2) * (lead / abs(lead)) ** (-d)
    return phase, logabs - d * math.log(abs(lead))


def discriminant(p) -> complex:
    """``prod_{i<j} (x_i - x_j)^2`` over the roots of ``p``."""
    phase, logabs = log_discriminant(p)
    if logabs == -np.inf:
        return 0j
    return phase * math.exp(logabs)


def cubic_discriminant(p0, p1, p2, p3):
    """Discriminant of ``p0 + p1 x + p2 x^2 + p3 x^3``.

    ``p1^2 p2^2 - 4 p0 p2^3 - 4 p1^3 p3 + 18 p0 p1 p2 p3 - 27 p0^2 p3^2``,
    zero exactly when the cubic has a repeated root.
    """
    return (p1 * p1 * p2 * p2 - 4 * p0 * p2**3 - 4 * p1**3 * p3
            + 18 * p0 * p1 * p2 * p3 - 27 * p0 * p0 * p3 * p3)

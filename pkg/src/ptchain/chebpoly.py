"""Chebyshev polynomials and closed-form characteristic polynomials.

Polynomials are stored in the monomial basis with ascending coefficients.
Chebyshev U is extended to negative index by ``U_{-1} = 0`` and
``U_{-2} = -1``, which keeps the three-term recurrence valid for every
shift and lets the defect formulas run unchanged at their edge cases.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import SpecError
from .lattice import HamiltonianSpec, build_dense

__all__ = [
    "ComplexPolynomial",
    "cheb_u",
    "cheb_t",
    "cheb_u_poly",
    "cheb_t_poly",
    "charpoly_uniform_defects",
    "charpoly_ssh",
    "charpoly_tridiagonal",
    "charpoly_oracle",
    "alt_poly_ssh",
]


class ComplexPolynomial:
    """Dense polynomial with complex coefficients in ascending order.

    Trailing (highest-degree) exact zeros are trimmed on construction.  The
    coefficient array is read-only, so instances behave as values.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex)).copy()
        nz = np.nonzero(c)[0]
        c = c[: nz[-1] + 1] if nz.size else c[:1] * 0
        c.setflags(write=False)
        self._c = c

    @classmethod
    def from_roots(cls, roots, leading=1.0):
        return cls(leading * npoly.polyfromroots(np.asarray(roots, dtype=complex)))

    @classmethod
    def monomial(cls, k, coef=1.0):
        c = np.zeros(k + 1, dtype=complex)
        c[k] = coef
        return cls(c)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        return len(self._c) - 1 if np.any(self._c) else -1

    @property
    def leading(self) -> complex:
        return complex(self._c[-1])

    def is_zero(self) -> bool:
        return not np.any(self._c)

    def __call__(self, x):
        """Horner evaluation.  Works for scalars, arrays and mpmath numbers."""
        if isinstance(x, np.ndarray):
            return npoly.polyval(x, self._c)
        acc = 0
        for c in self._c[::-1]:
            acc = acc * x + complex(c)
        return acc

    def deriv(self, k=1) -> "ComplexPolynomial":
        if k == 0:
            return self
        if self.degree < k:
            return ComplexPolynomial([0.0])
        return ComplexPolynomial(npoly.polyder(self._c, k))

    def monic(self) -> "ComplexPolynomial":
        if self.is_zero():
            raise ZeroDivisionError("zero polynomial has no monic form")
        return ComplexPolynomial(self._c / self._c[-1])

    def compose(self, inner: "ComplexPolynomial") -> "ComplexPolynomial":
        """``self(inner(x))`` by Horner's scheme on polynomials."""
        acc = ComplexPolynomial([0.0])
        for c in self._c[::-1]:
            acc = acc * inner + c
        return acc

    def scale_variable(self, s) -> "ComplexPolynomial":
        """``self(s * x)``."""
        return ComplexPolynomial(self._c * s ** np.arange(len(self._c)))

    def max_imag(self) -> float:
        return float(np.max(np.abs(self._c.imag)))

    def real_part(self) -> "ComplexPolynomial":
        return ComplexPolynomial(self._c.real)

    def norm(self) -> float:
        return float(np.max(np.abs(self._c)))

    # arithmetic
    def _coerce(self, other):
        if isinstance(other, ComplexPolynomial):
            return other._c
        return np.asarray([other], dtype=complex)

    def __add__(self, other):
        return ComplexPolynomial(npoly.polyadd(self._c, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return ComplexPolynomial(npoly.polysub(self._c, self._coerce(other)))

    def __rsub__(self, other):
        return ComplexPolynomial(npoly.polysub(self._coerce(other), self._c))

    def __neg__(self):
        return ComplexPolynomial(-self._c)

    def __mul__(self, other):
        if isinstance(other, ComplexPolynomial):
            return ComplexPolynomial(npoly.polymul(self._c, other._c))
        return ComplexPolynomial(self._c * complex(other))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return ComplexPolynomial(self._c / complex(scalar))

    def __pow__(self, k: int):
        out = ComplexPolynomial([1.0])
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, ComplexPolynomial):
            return NotImplemented
        return self._c.shape == other._c.shape and bool(np.all(self._c == other._c))

    def __hash__(self):
        return hash(self._c.tobytes())

    def allclose(self, other, rtol=1e-9, atol=0.0) -> bool:
        a, b = self._c, other._c
        m = max(len(a), len(b))
        a = np.pad(a, (0, m - len(a)))
        b = np.pad(b, (0, m - len(b)))
        scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-300)
        return bool(np.max(np.abs(a - b)) <= rtol * scale + atol)

    def __repr__(self):
        return f"ComplexPolynomial({self._c.tolist()!r})"


# -- Chebyshev values ---------------------------------------------------------

def cheb_u(n: int, x):
    """Second-kind Chebyshev value ``U_n(x)`` for ``n >= -2``.

    Uses the forward recurrence ``U_k = 2x U_{k-1} - U_{k-2}``; any scalar
    type with ``+`` and ``*`` works (complex, numpy arrays, mpmath).
    """
    if n < -2:
        raise ValueError("cheb_u is defined for n >= -2")
    if n == -2:
        return -1 + 0 * x
    prev, cur = 0 * x, 1 + 0 * x  # U_{-1}, U_0
    if n == -1:
        return prev
    for _ in range(n):
        prev, cur = cur, 2 * x * cur - prev
    return cur


def cheb_t(n: int, x):
    """First-kind Chebyshev value ``T_n(x)``; ``T_{-n} = T_n``."""
    n = abs(n)
    prev, cur = 1 + 0 * x, x
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, 2 * x * cur - prev
    return cur


@lru_cache(maxsize=256)
def _cheb_u_coeffs(n: int) -> tuple:
    if n == -2:
        return (-1.0,)
    if n == -1:
        return (0.0,)
    prev = np.zeros(1)
    cur = np.ones(1)
    for _ in range(n):
        nxt = np.zeros(len(cur) + 1)
        nxt[1:] += 2 * cur
        nxt[: len(prev)] -= prev
        prev, cur = cur, nxt
    return tuple(cur)


def cheb_u_poly(n: int) -> ComplexPolynomial:
    """Monomial coefficients of ``U_n`` (``n >= -2``)."""
    if n < -2:
        raise ValueError("cheb_u_poly is defined for n >= -2")
    return ComplexPolynomial(_cheb_u_coeffs(n))


def cheb_t_poly(n: int) -> ComplexPolynomial:
    n = abs(n)
    prev = np.array([1.0])
    cur = np.array([0.0, 1.0])
    if n == 0:
        return ComplexPolynomial(prev)
    for _ in range(n - 1):
        nxt = np.zeros(len(cur) + 1)
        nxt[1:] += 2 * cur
        nxt[: len(prev)] -= prev
        prev, cur = cur, nxt
    return ComplexPolynomial(cur)


def _cheb_u_of_poly(n: int, q: ComplexPolynomial):
    """``[U_{-2}(q), ..., U_n(q)]`` as polynomials in the variable of ``q``."""
    out = [ComplexPolynomial([-1.0]), ComplexPolynomial([0.0])]
    two_q = 2 * q
    for _ in range(n + 1):
        out.append(two_q * out[-1] - out[-2])
    return out


# -- characteristic polynomials ----------------------------------------------

def charpoly_uniform_defects(n: int, m: int, zp_m: complex, zp_mbar: complex) -> ComplexPolynomial:
    """Rescaled characteristic polynomial of a uniform chain with one defect pair.

    Returns ``P(x) = U_n - (z_m + z_mbar) U_{n-m} U_{m-1}
    + z_m z_mbar U_{n-2m} U_{m-1}^2`` where the defect potentials are in
    units of the bond ``t`` and eigenvalues are ``lambda = 2 t x``.
    """
    if not 1 <= m <= n // 2:
        raise SpecError(f"defect index m={m} outside 1..{n // 2}")
    um1 = cheb_u_poly(m - 1)
    return (
        cheb_u_poly(n)
        - (zp_m + zp_mbar) * cheb_u_poly(n - m) * um1
        + (zp_m * zp_mbar) * cheb_u_poly(n - 2 * m) * um1 * um1
    )


def _ssh_q_poly(t1, t2):
    return ComplexPolynomial([-(t1 * t1 + t2 * t2) / (2 * t1 * t2), 0.0, 1.0 / (2 * t1 * t2)])


def charpoly_ssh(n: int, t1: float, t2: float, z1=0.0, zn=0.0, tL=0.0, tR=0.0) -> ComplexPolynomial:
    """Monic ``det(lambda I - H)`` of an SSH chain with end defects and corners.

    Assembled from the Chebyshev-in-``Q`` closed forms with
    ``Q = (lambda^2 - t1^2 - t2^2) / (2 t1 t2)`` composed into ``lambda``.
    Bond ``i`` carries ``t1`` for odd ``i`` and ``t2`` for even ``i``.
    """
    if not (t1 > 0 and t2 > 0):
        raise SpecError("SSH tunnellings must be positive")
    lam = ComplexPolynomial([0.0, 1.0])
    q = _ssh_q_poly(t1, t2)
    c = z1 * zn - tL * tR
    s = z1 + zn
    k = n // 2
    us = _cheb_u_of_poly(k, q)

    def u(j):
        return us[j + 2]

    if n % 2 == 0:
        p = (
            u(k)
            + (c / t2**2) * u(k - 2)
            + ((t2**2 - lam * s + c) / (t1 * t2)) * u(k - 1)
            - (tL + tR) / t2
        )
        return (p * (t1 * t2) ** k).monic()
    # odd n = 2k + 1: site 1 sits on a t1 bond, site n on a t2 bond
    p = (
        (lam - s) * u(k)
        - (tL + tR)
        + ((lam * c - z1 * t1**2 - zn * t2**2) / (t1 * t2)) * u(k - 1)
    )
    return (p * (t1 * t2) ** k).monic()


def charpoly_tridiagonal(spec: HamiltonianSpec) -> ComplexPolynomial:
    """Monic ``det(lambda I - H)`` via the continuant recurrence.

    Corners enter through
    ``det = theta_n - tL tR theta_{2..n-1} - (tL + tR) prod(t)`` for
    ``n >= 3``; for ``n == 2`` they are folded into the bond.
    """
    n = spec.n
    z = spec.z
    bonds = list(spec.t)
    if n == 2:
        lo = bonds[0] + spec.tR
        up = bonds[0] + spec.tL
        lam = ComplexPolynomial([0.0, 1.0])
        return (lam - z[0]) * (lam - z[1]) - lo * up
    lam = ComplexPolynomial([0.0, 1.0])

    def continuant(lo_idx, hi_idx):
        # sites lo_idx..hi_idx inclusive, 0-based
        prev = ComplexPolynomial([1.0])
        cur = lam - z[lo_idx]
        for k in range(lo_idx + 1, hi_idx + 1):
            prev, cur = cur, (lam - z[k]) * cur - (bonds[k - 1] ** 2) * prev
        return cur

    full = continuant(0, n - 1)
    if spec.is_open:
        return full
    inner = continuant(1, n - 2)
    prod_t = complex(np.prod(np.asarray(bonds, dtype=complex)))
    return full - (spec.tL * spec.tR) * inner - (spec.tL + spec.tR) * prod_t


def charpoly_oracle(spec: HamiltonianSpec) -> ComplexPolynomial:
    """Characteristic polynomial by the Faddeev--LeVerrier trace recursion.

    Independent of the continuant and Chebyshev constructions; cost is
    ``O(n^4)`` so the size is capped at 64.
    """
    n = spec.n
    if n > 64:
        raise SpecError("charpoly_oracle is limited to n <= 64")
    a = build_dense(spec)
    c = np.zeros(n + 1, dtype=complex)
    c[n] = 1.0
    mk = np.zeros_like(a)
    eye = np.eye(n)
    for k in range(1, n + 1):
        mk = a @ mk + c[n - k + 1] * eye
        c[n - k] = -np.trace(a @ mk) / k
    return ComplexPolynomial(c)


def alt_poly_ssh(lam, n, t1, t2, z1=0.0, zn=0.0, tL=0.0, tR=0.0):
    """Even-``n`` SSH characteristic function in the T/U form.

    Equals ``det(lambda I - H) / (t1 t2)^k`` for ``n = 2k``.  This is the
    form whose signs at the interval endpoints drive the real-eigenvalue
    brackets.
    """
    if n % 2:
        raise SpecError("the T/U form needs even n")
    k = n // 2
    q = (lam * lam - t1 * t1 - t2 * t2) / (2 * t1 * t2)
    c = z1 * zn - tL * tR
    uk1 = cheb_u(k - 1, q)
    return (
        cheb_t(k, q) * (1 - c / t2**2)
        - (tL + tR) / t2
        + (1 + c / t2**2) * q * uk1
        + (t2**2 - lam * (z1 + zn) + c) / (t1 * t2) * uk1
    )

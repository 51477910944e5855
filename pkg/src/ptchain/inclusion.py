"""Eigenvalue inclusion certificates for SSH chains with end defects.

Two kinds of statements are produced:

* real intervals whose endpoints carry opposite signs of the (real)
  characteristic polynomial, so they contain an odd number of real
  eigenvalues;
* a union of four Cassini ovals containing the whole spectrum, whose
  disconnected pieces each hold at least one eigenvalue.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .chebpoly import alt_poly_ssh
from .errors import SpecError
from .lattice import HamiltonianSpec
from .spectra import refine_clusters, tridiagonal_roots

__all__ = [
    "mu",
    "IntervalCertificate",
    "bracket_real_eigenvalues",
    "outer_inequality",
    "CassiniOval",
    "CassiniUnion",
    "cassini_union",
    "broken_phase_certificate",
    "unbroken_sufficient",
    "ssh_parameters",
]


def mu(j: int, n: int, t1: float, t2: float) -> float:
    """``|t1 + t2 exp(2 pi i j / n)|``."""
    if not 0 <= j <= n:
        raise ValueError("mu needs 0 <= j <= n")
    return float(abs(t1 + t2 * np.exp(2j * np.pi * j / n)))


def ssh_parameters(spec: HamiltonianSpec, tol=1e-12):
    """Return ``(t1, t2, z1, zn, tL, tR)`` for an SSH chain with end defects.

    Raises
    ------
    SpecError
        If the bonds do not alternate or an interior potential is nonzero.
    """
    n = spec.n
    if n < 3:
        raise SpecError("SSH helpers need n >= 3")
    t1, t2 = spec.t[0], spec.t[1]
    for i, v in enumerate(spec.t):
        want = t1 if i % 2 == 0 else t2
        if abs(v - want) > tol * max(1.0, abs(want)):
            raise SpecError("bonds do not alternate t1, t2, t1, ...")
    if any(abs(v) > tol for v in spec.z[1:-1]):
        raise SpecError("interior onsite potentials must vanish")
    if not (isinstance(t1, float) and isinstance(t2, float) and t1 > 0 and t2 > 0):
        raise SpecError("SSH tunnellings must be positive reals")
    return t1, t2, spec.z[0], spec.z[-1], complex(spec.tL), complex(spec.tR)


@dataclass(frozen=True)
class IntervalCertificate:
    """A real interval certified to contain real eigenvalues.

    Attributes
    ----------
    lo, hi : float
        Open interval ``(lo, hi)``.
    guaranteed_count : int
        What the endpoint signs prove: at least one (an odd number).
    count : int
        Number of real eigenvalues found inside by polished root finding;
        always odd, matching the sign change.
    witness : tuple
        Signs of the characteristic function at ``lo`` and ``hi``.
    labels : tuple of str
        ``"inner j=<j>"`` and/or ``"I(+1,-1)"``-style names.
    inequality : dict
        For outer labels, ``{label: (printed, corrected)}``: the printed
        inequality and the sign-consistent one (see
        :func:`outer_inequality`).
    """

    lo: float
    hi: float
    guaranteed_count: int
    count: int
    witness: tuple
    labels: tuple
    inequality: dict = field(default_factory=dict)

    def contains(self, x) -> bool:
        return self.lo < x < self.hi


def outer_inequality(spec_or_params, s1: int, s2: int, corrected: bool = True) -> float:
    """Left side of the outer-interval criterion (certified when ``>= 0``).

    ``1 + k (1 + s2 t2/t1) ((Delta - s t2)^2 + gamma^2 - tL tR)
    / (t2^2 - Delta^2 - gamma^2 + tL tR)``.  The corrected form uses
    ``s = s1 * s2``, which is what the endpoint signs imply.  The printed
    form uses ``s = s1``; it agrees for ``s2 = +1`` only.
    """
    if isinstance(spec_or_params, HamiltonianSpec):
        n = spec_or_params.n
        t1, t2, z1, zn, tL, tR = ssh_parameters(spec_or_params)
    else:
        n, t1, t2, z1, zn, tL, tR = spec_or_params
    k = n // 2
    c = (z1 * zn - tL * tR).real
    delta = ((z1 + zn) / 2).real
    s = s1 * s2 if corrected else s1
    num = c - 2 * s * delta * t2 + t2 * t2
    return 1 + k * (1 + s2 * t2 / t1) * num / (t2 * t2 - c)


def _sign(v, scale):
    if abs(v) <= 1e-12 * scale:
        return 0
    return 1 if v > 0 else -1


def bracket_real_eigenvalues(spec: HamiltonianSpec, tol_real: float = 1e-8) -> list:
    """Interval certificates for an even SSH chain with ``tL = -tR``.

    Candidate intervals are ``(mu_{j+1}, mu_j)`` and its mirror for
    ``j = 1..k-1``, plus ``(mu_1, t1 + t2)`` and its mirror.  The last
    inner pair coincides with the outer intervals ``I(+-1, -1)``.
    A candidate is kept only when the characteristic function has opposite
    nonzero signs at its endpoints.

    Raises
    ------
    SpecError
        For odd ``n``, ``tL != -tR``, or the exactly solvable case
        ``t2^2 == z1 zn - tL tR``.
    """
    n = spec.n
    if n % 2 or n < 4:
        raise SpecError("bracketing needs even n >= 4")
    t1, t2, z1, zn, tL, tR = ssh_parameters(spec)
    if abs(tL + tR) > 1e-12 * max(1.0, abs(tL)):
        raise SpecError("bracketing needs tL == -tR")
    c = z1 * zn - tL * tR
    if abs(t2 * t2 - c) <= 1e-12 * max(1.0, t2 * t2):
        raise SpecError("t2^2 == z1 zn - tL tR: use closed_form_spectrum('ssh-exact')")
    k = n // 2

    def f(lam):
        return complex(alt_poly_ssh(lam, n, t1, t2, z1, zn, tL, tR)).real

    scale = max(1.0, abs(c) / t2**2, abs(z1) * (t1 + t2) / (t1 * t2)) * k
    mus = [mu(j, n, t1, t2) for j in range(k + 1)]

    candidates = []  # (lo, hi, labels)
    for j in range(1, k):
        lab = f"inner j={j}"
        pos = (mus[j + 1], mus[j])
        neg = (-mus[j], -mus[j + 1])
        pos_labels, neg_labels = [lab], [lab]
        if j == k - 1:
            # I(s1, -1) spans s1 (t1 - t2) .. s1 sgn(t1 - t2) mu_{k-1}
            if t1 > t2:
                pos_labels.append("I(+1,-1)")
                neg_labels.append("I(-1,-1)")
            elif t1 < t2:
                pos_labels.append("I(-1,-1)")
                neg_labels.append("I(+1,-1)")
        candidates.append((pos[0], pos[1], tuple(pos_labels)))
        candidates.append((neg[0], neg[1], tuple(neg_labels)))
    candidates.append((mus[1], t1 + t2, ("I(+1,+1)",)))
    candidates.append((-(t1 + t2), -mus[1], ("I(-1,+1)",)))

    roots = None
    certs = []
    for lo, hi, labels in candidates:
        if not hi > lo:
            continue
        a, b = _sign(f(lo), scale), _sign(f(hi), scale)
        if a == 0 or b == 0 or a == b:
            continue
        if roots is None:
            roots = _real_roots(spec, tol_real)
        count = int(np.sum((roots > lo) & (roots < hi)))
        if count % 2 == 0:
            raise ArithmeticError(
                f"sign change on ({lo}, {hi}) but {count} real roots found inside"
            )
        ineq = {}
        for lab in labels:
            if lab.startswith("I("):
                s1 = 1 if lab[2] == "+" else -1
                s2 = 1 if lab[5] == "+" else -1
                params = (n, t1, t2, z1, zn, tL, tR)
                ineq[lab] = (
                    outer_inequality(params, s1, s2, corrected=False) >= 0,
                    outer_inequality(params, s1, s2, corrected=True) >= 0,
                )
        certs.append(IntervalCertificate(float(lo), float(hi), 1, count, (a, b), labels, ineq))
    return certs


def _real_roots(spec, tol_real):
    s = max(max(abs(v) for v in (*spec.t, *spec.z, spec.tL, spec.tR)), 1e-300)
    unit = spec.scaled(1.0 / s)
    clusters = refine_clusters(unit, tridiagonal_roots(unit))
    vals = []
    for c in clusters:
        v = c.value * s
        if abs(v.imag) <= tol_real * (1 + abs(v)):
            vals.extend([v.real] * c.algebraic_multiplicity)
    return np.array(vals)


@dataclass(frozen=True)
class CassiniOval:
    """``{w : |w - w1| |w - w2| <= b}``."""

    w1: complex
    w2: complex
    b: float

    def contains(self, w):
        w = np.asarray(w)
        return np.abs(w - self.w1) * np.abs(w - self.w2) <= self.b

    def bounding_box(self):
        r = np.sqrt(self.b)
        xs = [self.w1.real - r, self.w1.real + r, self.w2.real - r, self.w2.real + r]
        ys = [self.w1.imag - r, self.w1.imag + r, self.w2.imag - r, self.w2.imag + r]
        return min(xs), max(xs), min(ys), max(ys)


@dataclass(frozen=True)
class CassiniUnion:
    """Four ovals plus a pixel labelling of their union.

    ``labels[iy, ix]`` is 0 outside the union and a component id otherwise;
    pixel centres are ``xs[ix] + 1j * ys[iy]``.
    """

    ovals: tuple
    xs: np.ndarray
    ys: np.ndarray
    labels: np.ndarray
    n_components: int

    def contains(self, w):
        w = np.asarray(w)
        out = np.zeros(w.shape, dtype=bool)
        for o in self.ovals:
            out |= o.contains(w)
        return out

    def component_of(self, w) -> int:
        """Component id of the pixel nearest ``w`` (0 if outside the union)."""
        if not self.contains(w):
            return 0
        ix = int(np.clip(np.searchsorted(self.xs, w.real), 1, len(self.xs) - 1))
        iy = int(np.clip(np.searchsorted(self.ys, w.imag), 1, len(self.ys) - 1))
        best, best_d = 0, np.inf
        for dy in range(-3, 3):
            for dx in range(-3, 3):
                jx, jy = ix + dx, iy + dy
                if 0 <= jx < len(self.xs) and 0 <= jy < len(self.ys) and self.labels[jy, jx]:
                    d = abs(self.xs[jx] + 1j * self.ys[jy] - w)
                    if d < best_d:
                        best, best_d = int(self.labels[jy, jx]), d
        return best


def cassini_union(spec: HamiltonianSpec, resolution: int = 400) -> CassiniUnion:
    """The four-oval inclusion region of an SSH chain with end defects.

    Ovals are ``C(0, 0; (t1+t2)^2)``, ``C(0, zn; (t1+t2) R_n)``,
    ``C(z1, 0; (t1+t2) R_1)`` and ``C(z1, zn; R_1 R_n)`` with end-row sums
    ``R_1 = t1 + |tL|`` and ``R_n = t_{n-1} + |tR|``.  Connected
    components are labelled on a ``resolution x resolution`` grid over the
    bounding box.
    """
    t1, t2, z1, zn, tL, tR = ssh_parameters(spec)
    inner = t1 + t2
    r1 = abs(spec.t[0]) + abs(tL)
    rn = abs(spec.t[-1]) + abs(tR)
    ovals = (
        CassiniOval(0j, 0j, inner * inner),
        CassiniOval(0j, complex(zn), inner * rn),
        CassiniOval(complex(z1), 0j, inner * r1),
        CassiniOval(complex(z1), complex(zn), r1 * rn),
    )
    boxes = np.array([o.bounding_box() for o in ovals])
    x0, x1 = boxes[:, 0].min(), boxes[:, 1].max()
    y0, y1 = boxes[:, 2].min(), boxes[:, 3].max()
    pad = 0.01 * max(x1 - x0, y1 - y0)
    xs = np.linspace(x0 - pad, x1 + pad, resolution)
    ys = np.linspace(y0 - pad, y1 + pad, resolution)
    W = xs[None, :] + 1j * ys[:, None]
    mask = np.zeros(W.shape, dtype=bool)
    for o in ovals:
        mask |= o.contains(W)
    labels, count = ndimage.label(mask, structure=np.ones((3, 3), dtype=int))
    return CassiniUnion(ovals, xs, ys, labels, int(count))


def broken_phase_certificate(spec: HamiltonianSpec) -> bool:
    """Sufficient test for at least two non-real eigenvalues.

    True when both ``(|z1|^2 - (t1+t2)^2) gamma > |z1| (t1+|tL|)(t1+|tR|)``
    and ``2 (t1 + t2) < |z1| + sqrt(|z1|^2 - 4 t1^2 - 4 min(|tL|, |tR|)^2)``
    hold, with ``gamma = Im z1``.  False means nothing.
    """
    t1, t2, z1, zn, tL, tR = ssh_parameters(spec)
    a = abs(z1)
    gamma = z1.imag
    first = (a * a - (t1 + t2) ** 2) * gamma > a * (t1 + abs(tL)) * (t1 + abs(tR))
    disc = a * a - 4 * t1 * t1 - 4 * min(abs(tL), abs(tR)) ** 2
    if disc < 0:
        return False
    second = 2 * (t1 + t2) < a + np.sqrt(disc)
    return bool(first and second)


def unbroken_sufficient(spec: HamiltonianSpec) -> bool:
    """``Delta^2 + gamma^2 - tL tR <= t2^2 <= t1^2`` (all eigenvalues real)."""
    t1, t2, z1, zn, tL, tR = ssh_parameters(spec)
    c = (z1 * zn - tL * tR).real
    return bool(c <= t2 * t2 <= t1 * t1)

"""Tridiagonal tight-binding Hamiltonians with corner couplings.

A chain of ``n`` sites is described by its bonds ``t[0..n-2]``, onsite
potentials ``z[0..n-1]`` and two corner couplings: ``tL`` at matrix entry
(1, n) and ``tR`` at (n, 1).  Public site indices are 1-based; the tuples are
stored 0-based.

When ``n == 2`` the corners land on the same entries as the single bond and
are added to it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import SpecError

__all__ = [
    "HamiltonianSpec",
    "DefectConfig",
    "ParityOperator",
    "build_dense",
    "check_pt_symmetry",
    "is_centrohermitian",
    "transpose_symmetrize",
    "spec_from_dict",
    "spec_to_dict",
    "load_spec",
    "dump_spec",
]


def _as_number(value, what):
    """Convert a JSON-ish scalar (number or ``[re, im]``) to a Python number."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise SpecError(f"{what}: expected [re, im], got {value!r}")
        value = complex(float(value[0]), float(value[1]))
    try:
        c = complex(value)
    except (TypeError, ValueError) as exc:
        raise SpecError(f"{what}: not a number: {value!r}") from exc
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise SpecError(f"{what}: non-finite value {value!r}")
    return c.real if c.imag == 0 else c


@dataclass(frozen=True)
class HamiltonianSpec:
    """Immutable description of a tridiagonal Hamiltonian with corners.

    Attributes
    ----------
    n : int
        Number of sites, at least 2.
    t : tuple
        The ``n - 1`` nearest-neighbour bonds.  They are normally real.
        Complex values are accepted so that similarity-reduced chains can
        be represented.
    z : tuple of complex
        Onsite potentials.
    tL, tR : complex
        Corner couplings placed at entries (1, n) and (n, 1).
    """

    n: int
    t: tuple
    z: tuple
    tL: complex = 0.0
    tR: complex = 0.0

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise SpecError(f"n must be an integer >= 2, got {self.n!r}")
        t = tuple(_as_number(v, "t") for v in self.t)
        z = tuple(complex(_as_number(v, "z")) for v in self.z)
        if len(t) != self.n - 1:
            raise SpecError(f"expected {self.n - 1} tunnellings, got {len(t)}")
        if len(z) != self.n:
            raise SpecError(f"expected {self.n} onsite potentials, got {len(z)}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "tL", _as_number(self.tL, "tL"))
        object.__setattr__(self, "tR", _as_number(self.tR, "tR"))

    # -- constructors -------------------------------------------------------
    @classmethod
    def uniform(cls, n, t=1.0, z=None, tL=0.0, tR=0.0):
        """Chain with every bond equal to ``t`` (default onsite zero)."""
        z = [0.0] * n if z is None else list(z)
        return cls(n, (t,) * (n - 1), tuple(z), tL, tR)

    @classmethod
    def ssh(cls, n, t1, t2, z1=0.0, zn=0.0, tL=0.0, tR=0.0):
        """SSH chain with end defects.

        Bond ``i`` (1-based) is ``t1`` for odd ``i`` and ``t2`` for even
        ``i``; the interior onsite potentials vanish.
        """
        t = tuple(t1 if i % 2 == 1 else t2 for i in range(1, n))
        z = [0.0] * n
        z[0] = z1
        z[-1] = zn
        return cls(n, t, tuple(z), tL, tR)

    @classmethod
    def with_defect(cls, n, defect: "DefectConfig", t=1.0, background=None):
        """Chain with bonds ``t`` (scalar or sequence) and one defect pair."""
        return defect.expand(n, t, background=background)

    # -- views --------------------------------------------------------------
    @property
    def is_open(self) -> bool:
        return self.tL == 0 and self.tR == 0

    @property
    def has_real_tunnelling(self) -> bool:
        return all(isinstance(v, float) for v in self.t)

    @property
    def nonzero_tunnelling(self) -> bool:
        return all(v != 0 for v in self.t)

    @property
    def corners_antisymmetric(self) -> bool:
        """True when ``tL == -tR`` (the closed-chain case of the SSH bracketing)."""
        return self.tL == -self.tR

    def defect_sites(self, tol=0.0):
        """1-based sites whose potential has an imaginary part above ``tol``."""
        return [k + 1 for k, v in enumerate(self.z) if abs(v.imag) > tol]

    def matrix(self):
        return build_dense(self)

    def scaled(self, factor):
        """Spec with every entry multiplied by ``factor``."""
        return HamiltonianSpec(
            self.n,
            tuple(v * factor for v in self.t),
            tuple(v * factor for v in self.z),
            self.tL * factor,
            self.tR * factor,
        )

    def replace(self, **changes):
        data = dict(n=self.n, t=self.t, z=self.z, tL=self.tL, tR=self.tR)
        data.update(changes)
        return HamiltonianSpec(**data)


@dataclass(frozen=True)
class DefectConfig:
    """A gain/loss defect pair ``z_m = delta + i gamma`` on sites m and n+1-m."""

    m: int
    delta: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise SpecError(f"defect site must be a positive integer, got {self.m!r}")
        if self.gamma < 0:
            raise SpecError("gamma must be non-negative (swap the sites instead)")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "delta", float(self.delta))
        object.__setattr__(self, "gamma", float(self.gamma))

    @property
    def z_gain(self) -> complex:
        return complex(self.delta, self.gamma)

    def expand(self, n, t=1.0, background=None, tL=0.0, tR=0.0) -> HamiltonianSpec:
        """Materialize the defect on an ``n``-site chain.

        ``t`` is either a single bond value or a sequence of ``n - 1`` bonds.
        ``background`` optionally supplies real potentials for the other
        sites.
        """
        if self.m > n // 2:
            raise SpecError(f"defect site m={self.m} exceeds floor(n/2)={n // 2}")
        bonds = (t,) * (n - 1) if np.isscalar(t) else tuple(t)
        z = [0.0] * n if background is None else [complex(v) for v in background]
        if len(z) != n:
            raise SpecError("background potential has the wrong length")
        z[self.m - 1] = self.z_gain
        z[n - self.m] = self.z_gain.conjugate()
        return HamiltonianSpec(n, bonds, tuple(z), tL, tR)


@dataclass(frozen=True)
class ParityOperator:
    """Site reflection ``k -> n + 1 - k``."""

    n: int

    def index(self, k: int) -> int:
        if not 1 <= k <= self.n:
            raise IndexError(k)
        return self.n + 1 - k

    def apply(self, v):
        return np.asarray(v)[..., ::-1].copy()

    __call__ = apply

    def matrix(self):
        return np.eye(self.n)[::-1].copy()


def build_dense(spec: HamiltonianSpec) -> np.ndarray:
    """Dense complex matrix of ``spec``."""
    n = spec.n
    h = np.zeros((n, n), dtype=complex)
    h[np.arange(n), np.arange(n)] = spec.z
    idx = np.arange(n - 1)
    h[idx, idx + 1] = spec.t
    h[idx + 1, idx] = spec.t
    h[0, n - 1] += spec.tL
    h[n - 1, 0] += spec.tR
    return h


def is_centrohermitian(h, tol=1e-12) -> bool:
    """``H[p, q] == conj(H[n+1-p, n+1-q])`` entrywise within ``tol``."""
    h = np.asarray(h)
    flipped = np.conj(h[::-1, ::-1])
    scale = max(1.0, float(np.max(np.abs(h))))
    return bool(np.max(np.abs(h - flipped)) <= tol * scale)


def check_pt_symmetry(spec: HamiltonianSpec, tol=1e-12) -> bool:
    """PT symmetry of ``spec``: mirrored bonds, conjugate-mirrored potentials,
    and ``tL == conj(tR)``; bonds must be real."""
    n = spec.n
    scale = max(1.0, max(abs(v) for v in (*spec.t, *spec.z, spec.tL, spec.tR)))
    lim = tol * scale
    t = spec.t
    for k in range(n - 1):
        if abs(complex(t[k]).imag) > lim or abs(t[k] - t[n - 2 - k]) > lim:
            return False
    for k in range(n):
        if abs(spec.z[k] - spec.z[n - 1 - k].conjugate()) > lim:
            return False
    if n == 2:
        # corners share entries with the bond
        return is_centrohermitian(build_dense(spec), tol)
    return abs(complex(spec.tL) - complex(spec.tR).conjugate()) <= lim


def transpose_symmetrize(t_lower: Sequence, t_upper: Sequence, z: Sequence):
    """Reduce a general open tridiagonal matrix to transpose-symmetric form.

    Parameters
    ----------
    t_lower, t_upper : sequence
        Sub- and super-diagonals, ``H[k+1, k]`` and ``H[k, k+1]``.
    z : sequence
        Diagonal.

    Returns
    -------
    spec : HamiltonianSpec
        Chain with bonds ``sqrt(t_lower * t_upper)`` (principal branch).
    S : ndarray
        Diagonal similarity with ``inv(S) @ H @ S == build_dense(spec)``.
    """
    lo = np.asarray(t_lower, dtype=complex)
    up = np.asarray(t_upper, dtype=complex)
    if lo.shape != up.shape or len(z) != len(lo) + 1:
        raise SpecError("inconsistent diagonal lengths")
    prod = lo * up
    if np.any(prod == 0):
        raise SpecError("every bond needs a nonzero product t_lower * t_upper")
    bonds = np.sqrt(prod)
    s = np.ones(len(z), dtype=complex)
    for k in range(len(lo)):
        s[k + 1] = s[k] * bonds[k] / up[k]
    bonds_out = tuple(b.real if b.imag == 0 else complex(b) for b in bonds)
    spec = HamiltonianSpec(len(z), bonds_out, tuple(z))
    if np.all(s.imag == 0):
        s = s.real
    return spec, np.diag(s)


# -- JSON -------------------------------------------------------------------

def _num_to_json(v):
    c = complex(v)
    return [c.real, c.imag]


def spec_to_dict(spec: HamiltonianSpec) -> dict:
    """Full (non-shorthand) JSON form."""
    t = [v if isinstance(v, float) else _num_to_json(v) for v in spec.t]
    return {
        "n": spec.n,
        "t": t,
        "z": [_num_to_json(v) for v in spec.z],
        "tL": _num_to_json(spec.tL),
        "tR": _num_to_json(spec.tR),
    }


def spec_from_dict(data: dict) -> HamiltonianSpec:
    """Parse either the full form or the ``t1/t2/defect`` shorthand."""
    if not isinstance(data, dict):
        raise SpecError("spec must be a JSON object")
    if "n" not in data:
        raise SpecError("spec needs an 'n' field")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise SpecError("'n' must be an integer")
    tL = _as_number(data.get("tL", 0.0), "tL")
    tR = _as_number(data.get("tR", 0.0), "tR")
    if "t" in data:
        z = data.get("z", [0.0] * n)
        return HamiltonianSpec(n, tuple(data["t"]), tuple(z), tL, tR)
    if "t1" not in data:
        raise SpecError("spec needs either 't' or the 't1' shorthand")
    t1 = float(data["t1"])
    t2 = float(data.get("t2", t1))
    bonds = tuple(t1 if i % 2 == 1 else t2 for i in range(1, n))
    z = [0.0] * n
    defect = data.get("defect")
    if defect is not None:
        try:
            cfg = DefectConfig(defect["m"], defect.get("delta", 0.0), defect.get("gamma", 0.0))
        except (KeyError, TypeError) as exc:
            raise SpecError(f"malformed defect block: {defect!r}") from exc
        return cfg.expand(n, bonds, tL=tL, tR=tR)
    return HamiltonianSpec(n, bonds, tuple(z), tL, tR)


def load_spec(path_or_text) -> HamiltonianSpec:
    """Read a spec from a path, an open file, or a JSON string."""
    if hasattr(path_or_text, "read"):
        text = path_or_text.read()
    else:
        s = str(path_or_text)
        if s.lstrip()[:1] in ("{", "["):
            text = s
        else:
            with open(s, encoding="utf-8") as fh:
                text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc}") from exc
    return spec_from_dict(data)


def dump_spec(spec: HamiltonianSpec, **json_kwargs) -> str:
    return json.dumps(spec_to_dict(spec), **json_kwargs)

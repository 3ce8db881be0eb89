"""Long-run equilibria and their stability at a fixed parameter point."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from innovgeo.core import (
    InnovationSpec,
    ModelParams,
    delta_v,
    delta_v_prime,
)
from innovgeo.errors import AsymptoteError, GridTooCoarse, InvalidEquilibrium
from innovgeo.roots import bracketed_root
from innovgeo.thresholds import asym_stability_G, b_hat

STABILITY_TOL = 1e-9
DEFAULT_GRID = 2000
CORNER_GAP = 1e-12
# near a pitchfork Delta_v is flat, so a residual test alone stops far from the root
ROOT_FTOL = 0.0


class Kind(str, enum.Enum):
    SYMMETRIC = "symmetric"
    ASYMMETRIC = "asymmetric"
    AGGLOMERATION = "agglomeration"


class Stability(str, enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


def _verdict(decisive: float, stable_if_negative: bool, tol: float = STABILITY_TOL) -> Stability:
    if abs(decisive) <= tol:
        return Stability.MARGINAL
    if (decisive < 0) == stable_if_negative:
        return Stability.STABLE
    return Stability.UNSTABLE


@dataclass(frozen=True)
class Equilibrium:
    """One rest point of the migration dynamics.

    Corners are always listed; a corner with ``Delta_v(1) < 0`` is not an
    equilibrium in the strict sense and carries ``stability=UNSTABLE``.
    ``derivative`` is Delta_v'(z*) for interior points and Delta_v(1) (the
    deciding quantity) for corners.
    """

    z_star: float
    kind: Kind
    stability: Stability
    residual: float
    derivative: Optional[float]

    @property
    def is_equilibrium(self) -> bool:
        if self.kind is Kind.AGGLOMERATION:
            return self.stability is not Stability.UNSTABLE
        return True

    @property
    def stable(self) -> bool:
        return self.stability is Stability.STABLE


@dataclass(frozen=True)
class EquilibriumSet:
    params: ModelParams
    spec: str
    equilibria: tuple
    interior_count_upper_half: int
    grid_n: int

    def upper(self) -> list[Equilibrium]:
        """Equilibria with ``z* >= 1/2``."""
        return [e for e in self.equilibria if e.z_star >= 0.5]

    def of_kind(self, kind: Kind) -> list[Equilibrium]:
        return [e for e in self.equilibria if e.kind is kind]

    def stable(self) -> list[Equilibrium]:
        return [e for e in self.equilibria if e.stable]

    @property
    def symmetric(self) -> Equilibrium:
        return self.of_kind(Kind.SYMMETRIC)[0]

    @property
    def corner(self) -> Equilibrium:
        """The z = 1 corner."""
        return [e for e in self.equilibria if e.z_star == 1.0][0]

    def asymmetric_upper(self) -> list[Equilibrium]:
        return [e for e in self.upper() if e.kind is Kind.ASYMMETRIC]


def _first_cell_root(f, d_half: float, z1: float, f1: float):
    """Root between 1/2 and the first grid point, where Delta_v(1/2) = 0 hides the bracket."""
    if d_half == 0 or f1 == 0 or (d_half > 0) == (f1 > 0):
        return None
    step = z1 - 0.5
    while step > 1e-13:
        step /= 4
        left = 0.5 + step
        fl = f(left)
        if fl != 0 and (fl > 0) == (d_half > 0):
            return bracketed_root(f, left, z1, fl, f1, ftol=ROOT_FTOL)
    return None


def find_equilibria(spec: InnovationSpec, params: ModelParams, grid_n: int = DEFAULT_GRID) -> EquilibriumSet:
    """All rest points on [0, 1] with stability verdicts.

    Scans Delta_v on a uniform grid over [1/2, 1], refines every sign change,
    checks the corner by the sign of Delta_v(1) and mirrors to [0, 1/2).
    """
    if grid_n < 100:
        raise ValueError("grid_n must be at least 100")
    f = lambda z: float(delta_v(spec, params, z))
    zs = np.linspace(0.5, 1.0, grid_n + 1)
    fs = np.asarray(delta_v(spec, params, zs), dtype=float)
    d_half = float(delta_v_prime(spec, params, 0.5))

    roots = []
    first = _first_cell_root(f, d_half, zs[1], fs[1])
    if first is not None:
        roots.append(first)
    for i in range(1, grid_n):
        a, b = fs[i], fs[i + 1]
        if a == 0:
            roots.append(float(zs[i]))
        elif a * b < 0:
            roots.append(bracketed_root(f, float(zs[i]), float(zs[i + 1]), float(a), float(b), ftol=ROOT_FTOL))
    # a root that cannot be separated from z = 1 in double precision belongs to the corner
    roots = sorted(r for r in roots if r < 1.0 - CORNER_GAP)
    cell = 0.5 / grid_n
    for r0, r1 in zip(roots, roots[1:]):
        if r1 - r0 < cell:
            warnings.warn(
                f"two equilibria {r0:.12g} and {r1:.12g} within one grid cell; increase grid_n",
                GridTooCoarse,
                stacklevel=2,
            )

    eqs = [
        Equilibrium(0.5, Kind.SYMMETRIC, _verdict(d_half, True), 0.0, d_half),
    ]
    for r in roots:
        d = float(delta_v_prime(spec, params, r))
        res = abs(f(r))
        eqs.append(Equilibrium(r, Kind.ASYMMETRIC, _verdict(d, True), res, d))
        eqs.append(Equilibrium(1.0 - r, Kind.ASYMMETRIC, _verdict(d, True), res, d))

    dv1 = float(fs[-1])
    corner = _verdict(dv1, stable_if_negative=False)
    eqs.append(Equilibrium(1.0, Kind.AGGLOMERATION, corner, 0.0, dv1))
    eqs.append(Equilibrium(0.0, Kind.AGGLOMERATION, corner, 0.0, dv1))
    eqs.sort(key=lambda e: e.z_star)

    count = len(roots) + (1 if corner is not Stability.UNSTABLE else 0)
    return EquilibriumSet(params, spec.label, tuple(eqs), count, grid_n)


class LambdaStar(NamedTuple):
    value: float
    valid: bool


def _log_ratio(z, phi):
    return math.log((z * (phi - 1) + 1) / (z * (1 - phi) + phi))


def lambda_star(params: ModelParams, z: float) -> LambdaStar:
    """Immobile-worker mass that makes ``z`` an interior equilibrium.

    ``params.lam`` is ignored.  ``valid`` is True iff the value is positive.
    """
    s, g, b, p = params.sigma, params.gamma, params.b, params.phi
    if abs(b - b_hat(p)) < 1e-12:
        raise AsymptoteError(f"b={b} sits on the asymptote b_hat={b_hat(p)}")
    b1 = g * (s - 1) * (2 * z - 1)
    b2 = p**2 * (2 * b * (z - 1) * z + b - z**2 + z - 1) + (1 - 2 * b) * (z - 1) * z + b * p
    b3 = s * (z * (p - 1) + 1) * (z * (p - 1) - p)
    b4 = g * (s - 1) * (2 * z - 1) * (b * (p + 1) ** 2 - p**2 - 1)
    value = -2 * (b1 * b2 + b3 * _log_ratio(z, p)) / b4
    return LambdaStar(value, value > 0)


def asymmetric_stability(params: ModelParams, z: float) -> Stability:
    """Stability of the asymmetric equilibrium at ``z`` on the curve lambda = lambda*(z)."""
    ls = lambda_star(params, z)
    if not ls.valid:
        raise InvalidEquilibrium(f"lambda*({z}) = {ls.value} is not positive")
    return _verdict(asym_stability_G(params, z), stable_if_negative=True)

"""Primitive functions of the two-region model.

Everything here is a pure function of its arguments.  ``z`` is the share of
mobile scientists living in region 1; region 2 hosts ``1 - z``.  Functions
that take ``z`` accept either a float or a numpy array and return the same
shape.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import Callable, Literal, Optional, Union

import numpy as np

from innovgeo.errors import DomainError, ParameterError, SpecMismatch

ArrayLike = Union[float, np.ndarray]

FD_STEP = 1e-6
CUSTOM_SAMPLES = 1001


@dataclass(frozen=True)
class ModelParams:
    """Parameter point ``(mu, sigma, lambda, gamma, b, phi)``.

    ``lam`` is the mass of immobile workers (``lambda`` is reserved in
    Python).  ``mu`` defaults to 1 because it only scales the utility
    differential.
    """

    sigma: float
    lam: float
    gamma: float
    b: float
    phi: float
    mu: float = 1.0

    def __post_init__(self):
        checks = [
            ("mu", self.mu > 0, "mu must be positive"),
            ("sigma", self.sigma > 1, "sigma must exceed 1"),
            ("lambda", self.lam > 0, "lambda must be positive"),
            ("gamma", self.gamma > 0, "gamma must be positive"),
            ("b", 0 < self.b < 1, "b must lie in (0,1)"),
            ("phi", 0 < self.phi < 1, "phi must lie in (0,1)"),
        ]
        for name, ok, message in checks:
            value = getattr(self, "lam" if name == "lambda" else name)
            if not (isinstance(value, (int, float, np.floating)) and math.isfinite(value)):
                raise ParameterError(name, f"{name} must be a finite number, got {value!r}")
            if not ok:
                raise ParameterError(name, f"{message} (got {value!r})")

    def replace(self, **changes) -> "ModelParams":
        if "lambda" in changes:
            changes["lam"] = changes.pop("lambda")
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return {
            "mu": self.mu,
            "sigma": self.sigma,
            "lambda": self.lam,
            "gamma": self.gamma,
            "b": self.b,
            "phi": self.phi,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        d = dict(d)
        if "lambda" in d:
            d["lam"] = d.pop("lambda")
        return cls(**d)


@dataclass(frozen=True)
class DiagnosticConstants:
    """Level constants that cancel out of the utility differential.

    Only :func:`innovation_probability` reads them.
    """

    A: float = 1.0
    a: float = 2.0
    alpha: float = 1.0
    beta: float = 1.0
    B_bar: float = 2.0

    def __post_init__(self):
        if not self.A > 0:
            raise ParameterError("A", "A must be positive")
        if not self.a > 1:
            raise ParameterError("a", "quality level a must exceed 1")
        if not self.alpha > 0:
            raise ParameterError("alpha", "alpha must be positive")
        if not self.beta > 0:
            raise ParameterError("beta", "beta must be positive")

    def check_endowment(self, mu: float) -> None:
        if not self.B_bar > mu:
            raise ParameterError("B_bar", f"B_bar must exceed mu={mu}")


class SpecKind(str, enum.Enum):
    ADDITIVE = "additive"
    COBB_DOUGLAS = "cobb-douglas"
    CUSTOM = "custom"


@dataclass(frozen=True)
class InnovationSpec:
    """Regional-interaction function ``g`` entering the innovation odds.

    Use :data:`ADDITIVE`, :data:`COBB_DOUGLAS` or :meth:`custom`.  A custom
    ``g`` is a function of ``z`` alone, so the related-variety regime it
    represents is declared through ``b`` at construction and ``params.b`` is
    ignored when evaluating it.
    """

    kind: SpecKind
    g: Optional[Callable] = dataclasses.field(default=None, compare=False)
    dg: Optional[Callable] = dataclasses.field(default=None, compare=False)
    b: Optional[float] = None
    name: str = ""

    @classmethod
    def custom(
        cls,
        g: Callable,
        b: float,
        dg: Optional[Callable] = None,
        name: str = "custom",
    ) -> "InnovationSpec":
        spec = cls(SpecKind.CUSTOM, g=g, dg=dg, b=b, name=name)
        spec._validate_custom()
        return spec

    def _validate_custom(self):
        if self.g is None:
            raise ParameterError("g", "custom spec needs a function g")
        if not 0 < self.b < 1:
            raise ParameterError("b", "b must lie in (0,1)")
        z = np.linspace(0.0, 1.0, CUSTOM_SAMPLES)
        values = _call(self.g, z)
        if not np.all(np.isfinite(values)) or values.min() < 0 or values.max() > 1:
            raise ParameterError("g", "g must map [0,1] into [0,1]")
        upper = z[z >= 0.5]
        slope = self.weight_prime(upper, self.b)
        if self.b < 0.5 and not np.all(slope < 0):
            raise ParameterError("g", "g must be decreasing on [1/2,1] when b < 1/2")
        if self.b > 0.5 and not np.all(slope > 0):
            raise ParameterError("g", "g must be increasing on [1/2,1] when b > 1/2")

    @property
    def label(self) -> str:
        return self.name or self.kind.value

    def weight(self, z: ArrayLike, b: float) -> ArrayLike:
        """g(z): region-1 interaction weight."""
        if self.kind is SpecKind.ADDITIVE:
            return b * z + (1 - b) * (1 - z)
        if self.kind is SpecKind.COBB_DOUGLAS:
            return np.power(z, b) * np.power(1 - z, 1 - b)
        return _call(self.g, z)

    def weight_prime(self, z: ArrayLike, b: float) -> ArrayLike:
        if self.kind is SpecKind.ADDITIVE:
            return (2 * b - 1) + 0 * np.asarray(z, dtype=float)
        if self.kind is SpecKind.COBB_DOUGLAS:
            z = np.asarray(z, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.power(z, b) * np.power(1 - z, 1 - b) * (b / z - (1 - b) / (1 - z))
        if self.dg is not None:
            return _call(self.dg, z)
        return derivative(lambda x: _call(self.g, x), z)


def _call(f: Callable, z: ArrayLike) -> ArrayLike:
    if np.ndim(z) == 0:
        return float(f(float(z)))
    z = np.asarray(z, dtype=float)
    try:
        out = np.asarray(f(z), dtype=float)
        if out.shape == z.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([float(f(float(x))) for x in z.ravel()]).reshape(z.shape)


ADDITIVE = InnovationSpec(SpecKind.ADDITIVE)
COBB_DOUGLAS = InnovationSpec(SpecKind.COBB_DOUGLAS)


def spec_from_name(name: str) -> InnovationSpec:
    key = name.lower().replace("_", "-")
    if key == "additive":
        return ADDITIVE
    if key in ("cobb-douglas", "cobbdouglas", "cd"):
        return COBB_DOUGLAS
    raise ValueError(f"unknown spec {name!r}; custom specs are library-only")


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def _shares(z: ArrayLike, region: int):
    z = np.asarray(z, dtype=float)
    if region == 1:
        return z, 1 - z
    if region == 2:
        return 1 - z, z
    raise ValueError("region must be 1 or 2")


def innovation_weight(spec: InnovationSpec, params: ModelParams, z: ArrayLike, region: int = 1):
    """Interaction weight ``g_i``; region 2 evaluates ``g(1 - z)``."""
    zi, _ = _shares(z, region)
    return _scalar(spec.weight(zi, params.b))


def innovation_probability(
    spec: InnovationSpec,
    params: ModelParams,
    z: ArrayLike,
    region: int,
    diag: DiagnosticConstants,
):
    """Instantaneous innovation probability and whether the unit cap binds."""
    raw = np.asarray(innovation_weight(spec, params, z, region)) * params.gamma * diag.A / diag.a
    capped = raw > 1
    value = np.minimum(raw, 1.0)
    if np.ndim(value) == 0:
        return float(value), bool(capped)
    return value, capped


def wage(spec: InnovationSpec, params: ModelParams, z: ArrayLike, region: int = 1):
    """Zero-profit nominal wage of scientists in ``region``."""
    zi, zj = _shares(z, region)
    phi = params.phi
    if phi <= 0:
        raise DomainError("freeness of trade must be positive")
    half = params.lam / 2
    market = (half + zi) / (zi + phi * zj) + phi * (half + zj) / (phi * zi + zj)
    g = spec.weight(zi, params.b)
    return _scalar(params.mu * params.gamma / params.sigma * g * market)


def delta_v(spec: InnovationSpec, params: ModelParams, z: ArrayLike):
    """Indirect-utility differential v1(z) - v2(z)."""
    z = np.asarray(z, dtype=float)
    phi = params.phi
    w1 = wage(spec, params, z, 1)
    w2 = wage(spec, params, z, 2)
    living = params.mu / (params.sigma - 1) * np.log((z + phi * (1 - z)) / ((1 - z) + phi * z))
    return _scalar(w1 - w2 + living)


def derivative(f: Callable, x: ArrayLike, h: float = FD_STEP, lo: float = 0.0, hi: float = 1.0):
    """Central difference of ``f`` at ``x``, second-order one-sided at the box edges."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.empty_like(x)
    left = x - h < lo
    right = x + h > hi
    mid = ~(left | right)
    if mid.any():
        xm = x[mid]
        out[mid] = (f(xm + h) - f(xm - h)) / (2 * h)
    if left.any():
        xl = x[left]
        out[left] = (-3 * f(xl) + 4 * f(xl + h) - f(xl + 2 * h)) / (2 * h)
    if right.any():
        xr = x[right]
        out[right] = (3 * f(xr) - 4 * f(xr - h) + f(xr - 2 * h)) / (2 * h)
    return float(out[0]) if scalar else out


def quartic_coefficients(params: ModelParams) -> tuple:
    """Coefficients ``(a1, ..., a5)`` of the numerator quartic, raw layout.

    The raw polynomial reads
    ``a1 z^4 + a2 b z^3 - 2(1-phi) a3 z^2 + 2(1-phi) a4 z + a5`` and carries
    ``mu`` inside ``a1`` and ``a2``.  Cross-checking against finite
    differences shows that form is not the derivative numerator; see
    :func:`quartic_polynomial` for the form that is.
    """
    s, lam, g, b, p, mu = params.sigma, params.lam, params.gamma, params.b, params.phi, params.mu
    a1 = 4 * (1 - 2 * b) * g * mu * (s - 1) * (p - 1) ** 3 * (p + 1)
    a2 = 8 * (2 * b - 1) * g * mu * (s - 1) * (p - 1) ** 3 * (p + 1)
    a3 = (
        g * (s - 1) * (
            b * (p + 1) * ((lam - 2) * p**2 - lam + 18 * p - 4)
            - p * (lam * (p - 1) * p + lam + 6 * p)
            + lam - 8 * p + 2
        )
        + s * (p + 1) * (p - 1) ** 2
    )
    a4 = (
        g * (s - 1) * (
            lam * (p - 1) * (b * (p + 1) ** 2 - p**2 - 1)
            + 2 * p * (b * (p + 1) * (p + 5) - p * (p + 2) - 3)
        )
        + s * (p + 1) * (p - 1) ** 2
    )
    a5 = (
        g * (s - 1) * (
            lam * (p**2 + 1) * (b * (p + 1) ** 2 - p**2 - 1)
            + 2 * p * (b * (p**3 + 3 * p**2 + p - 1) - p * (p**2 + p + 1) + 1)
        )
        - 2 * s * p * (p**2 - 1)
    )
    return a1, a2, a3, a4, a5


def quartic_polynomial(params: ModelParams, raw: bool = False) -> np.ndarray:
    """Power-basis coefficients of P(z), highest degree first.

    With ``raw=True`` the coefficients are assembled in the raw layout, extra
    ``b`` on the cubic term and ``mu`` inside ``a1``/``a2`` included.  The
    default drops both, which is the combination that agrees with finite
    differences of :func:`delta_v` for every ``mu``.
    """
    a1, a2, a3, a4, a5 = quartic_coefficients(params)
    p = params.phi
    if raw:
        cubic = a2 * params.b
    else:
        a1 = a1 / params.mu
        cubic = a2 / params.mu
    return np.array([a1, cubic, -2 * (1 - p) * a3, 2 * (1 - p) * a4, a5])


def _quartic_denominator(params: ModelParams, z):
    p, s = params.phi, params.sigma
    return 2 * (s - 1) * s * (z * (p - 1) + 1) ** 2 * (z * (1 - p) + p) ** 2


Method = Literal["analytic", "fd", "auto"]


def delta_v_prime(
    spec: InnovationSpec,
    params: ModelParams,
    z: ArrayLike,
    method: Method = "auto",
    raw: bool = False,
):
    """dDelta_v/dz by the closed-form quartic (additive only) or finite differences.

    ``auto`` picks the quartic for the additive spec and finite differences
    otherwise.
    """
    if method == "auto":
        method = "analytic" if spec.kind is SpecKind.ADDITIVE else "fd"
    if method == "analytic":
        if spec.kind is not SpecKind.ADDITIVE:
            raise SpecMismatch(f"analytic derivative needs the additive spec, got {spec.label}")
        z = np.asarray(z, dtype=float)
        P = np.polyval(quartic_polynomial(params, raw=raw), z)
        return _scalar(params.mu * P / _quartic_denominator(params, z))
    if method == "fd":
        return derivative(lambda x: delta_v(spec, params, x), z)
    raise ValueError(f"unknown method {method!r}")


def d_delta_v_db(params: ModelParams, z: ArrayLike):
    """Partial derivative of the additive Delta_v with respect to b."""
    z = np.asarray(z, dtype=float)
    g, mu, lam, s, p = params.gamma, params.mu, params.lam, params.sigma, params.phi
    num = g * mu * (2 * z - 1) * (p + 1) * (lam - 4 * z**2 + p * (lam + 4 * (z - 1) * z + 2) + 4 * z)
    den = 2 * s * (z * (p - 1) + 1) * (z * (1 - p) + p)
    return _scalar(num / den)

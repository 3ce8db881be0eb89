"""Closed-form critical values for the additive model.

Conditions are returned as plain floats; root-valued thresholds carry an
:class:`Existence` flag so boundary cases are visible instead of being
silently counted on one side.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from innovgeo.core import (
    ADDITIVE,
    InnovationSpec,
    ModelParams,
    delta_v,
    derivative,
)
from innovgeo.errors import NotABreakPoint
from innovgeo.roots import bracketed_root

log = logging.getLogger(__name__)

PHI_MIN = 1e-4
PHI_MAX = 1 - 1e-4
GUARD = 1e-12
TOL = 1e-9


class Existence(str, enum.Enum):
    EXISTS = "exists"
    ABSENT = "absent"
    BOUNDARY = "boundary"


def _strict(lo: float, x: float, hi: float) -> Existence:
    """Classify ``x`` against the open interval ``(lo, hi)`` with a guard band."""
    if x is None or not math.isfinite(x):
        return Existence.ABSENT
    if lo + GUARD < x < hi - GUARD:
        return Existence.EXISTS
    if abs(x - lo) <= GUARD or abs(x - hi) <= GUARD:
        return Existence.BOUNDARY
    return Existence.ABSENT


def _log_ratio(z, phi):
    return np.log((z * (phi - 1) + 1) / (z * (1 - phi) + phi))


# -- agglomeration ---------------------------------------------------------


def sustain_condition(params: ModelParams, phi: Optional[float] = None) -> float:
    """S(phi); agglomeration is stable iff positive.  Equals Delta_v(1) / mu."""
    p = params.phi if phi is None else phi
    g, b, lam, s = params.gamma, params.b, params.lam, params.sigma
    first = g * ((b - 1) * (lam + 2) * p**2 + 2 * b * (lam + 1) * p + (b - 1) * lam) / (2 * s * p)
    return first - np.log(p) / (s - 1)


def sustain_limit_at_one(params: ModelParams) -> float:
    return params.gamma * (2 * params.b - 1) * (params.lam + 1) / params.sigma


def sustain_peak(params: ModelParams) -> float:
    """Interior maximiser phi+ of S; may exceed 1, in which case S rises on all of (0, 1)."""
    g, b, lam, s = params.gamma, params.b, params.lam, params.sigma
    root = math.sqrt(g**2 * (b - 1) ** 2 * lam * (lam + 2) / s**2 + 1 / (s - 1) ** 2)
    return s * (1 / (s - 1) - root) / (g * (b - 1) * (lam + 2))


def sustain_points(params: ModelParams) -> list[float]:
    """Roots of S in (0, 1), ascending.  At most two; S is unimodal."""
    f = lambda p: float(sustain_condition(params, p))
    peak = min(max(sustain_peak(params), PHI_MIN), PHI_MAX)
    roots = []
    for lo, hi in ((PHI_MIN, peak), (peak, PHI_MAX)):
        if hi <= lo:
            continue
        flo, fhi = f(lo), f(hi)
        if flo == 0 and lo == peak and roots:
            continue
        if flo * fhi < 0 or fhi == 0:
            roots.append(bracketed_root(f, lo, hi, flo, fhi, ftol=1e-15, xtol=1e-15))
        elif flo == 0 and lo == PHI_MIN:
            roots.append(lo)
    return sorted(set(roots))


def agglomeration_b_threshold(params: ModelParams) -> tuple[float, bool]:
    """``(b_s, phi > lambda/(lambda+2))``.  For b > b_s agglomeration is stable."""
    lam, p = params.lam, params.phi
    b_s = ((lam + 2) * p**2 + lam) / ((p + 1) * ((lam + 2) * p + lam))
    return b_s, p > lam / (lam + 2)


# -- symmetric dispersion -------------------------------------------------


def break_condition(params: ModelParams, phi: Optional[float] = None) -> float:
    """B(phi); symmetric dispersion is stable iff negative.

    ``Delta_v'(1/2) = 2 mu B / (sigma (sigma - 1) (1 + phi)^2)``.
    """
    p = params.phi if phi is None else phi
    g, b, lam, s = params.gamma, params.b, params.lam, params.sigma
    return g * (s - 1) * (2 * b * (lam + 1) * (p + 1) ** 2 - (2 * lam + 3) * p**2 - 2 * lam - 1) + 2 * s * (1 - p**2)


def break_b_bar(params: ModelParams) -> float:
    lam, p = params.lam, params.phi
    return ((2 * lam + 3) * p**2 + 2 * lam + 1) / (2 * (lam + 1) * (p + 1) ** 2)


def break_b_window(params: ModelParams) -> tuple[float, float]:
    """``(b1, b2)``: the break point phi_b1 lies in (0, 1) iff b in [b1, b2) and gamma is in its window."""
    g, lam, s = params.gamma, params.lam, params.sigma
    lead = g * (2 * lam + 1) * (s - 1) - 2 * s
    b1 = lead * (g * (2 * lam + 3) * (s - 1) + 2 * s) / (8 * g**2 * (lam + 1) ** 2 * (s - 1) ** 2)
    b2 = lead / (2 * g * (lam + 1) * (s - 1))
    return b1, b2


def break_gamma_window(params: ModelParams) -> tuple[float, float]:
    lam, s = params.lam, params.sigma
    return 2 * s / ((2 * lam + 1) * (s - 1)), 1.0


def break_point_formulas(params: ModelParams) -> tuple[float, float]:
    """Closed-form ``(phi_b1, phi_b2)``; NaN when the discriminant is negative."""
    g, b, lam, s = params.gamma, params.b, params.lam, params.sigma
    disc = g**2 * (s - 1) ** 2 * (8 * b * (lam + 1) ** 2 - 4 * lam**2 - 8 * lam - 3) + 4 * g * s * (s - 1) + 4 * s**2
    if disc < 0:
        return math.nan, math.nan
    root = math.sqrt(disc)
    lin = 2 * b * g * (lam + 1) * (s - 1)
    den = g * (s - 1) * (2 * b * (lam + 1) - 2 * lam - 3) - 2 * s
    return (root - lin) / den, -(root + lin) / den


@dataclass(frozen=True)
class BreakPoints:
    phi_b1: float
    phi_b2: float
    exists_b1: Existence
    exists_b2: Existence
    b1: float
    b2: float
    gamma_window: tuple
    gamma_in_window: Existence
    b_in_window: Existence
    certificate_agrees: bool

    @property
    def points(self) -> list[float]:
        out = []
        if self.exists_b1 is Existence.EXISTS:
            out.append(self.phi_b1)
        if self.exists_b2 is Existence.EXISTS:
            out.append(self.phi_b2)
        return sorted(out)


def break_points(params: ModelParams) -> BreakPoints:
    """Break points of symmetric dispersion with their existence certificate.

    Existence is decided by where the closed-form roots fall.  The explicit
    window conditions on ``gamma`` and ``b`` are evaluated too, and a
    disagreement with the direct answer is logged.
    """
    pb1, pb2 = break_point_formulas(params)
    e1 = _strict(0.0, pb1, 1.0)
    e2 = _strict(0.0, pb2, 1.0)
    b1, b2 = break_b_window(params)
    glo, ghi = break_gamma_window(params)
    g_ok = _strict(glo, params.gamma, ghi)
    if params.b < b1 - GUARD or params.b >= b2 + GUARD:
        b_ok = Existence.ABSENT
    elif abs(params.b - b1) <= GUARD or abs(params.b - b2) <= GUARD:
        b_ok = Existence.BOUNDARY
    else:
        b_ok = Existence.EXISTS
    certified = g_ok is Existence.EXISTS and b_ok is Existence.EXISTS
    agrees = certified == (e1 is Existence.EXISTS)
    if not agrees and Existence.BOUNDARY not in (g_ok, b_ok, e1):
        log.info(
            "break-point certificate (gamma %s, b %s) disagrees with direct root phi_b1=%r at %s",
            g_ok.value, b_ok.value, pb1, params,
        )
    return BreakPoints(pb1, pb2, e1, e2, b1, b2, (glo, ghi), g_ok, b_ok, agrees)


# -- asymmetric dispersion ------------------------------------------------


@dataclass(frozen=True)
class AsymThresholds:
    b_hat: float
    b_underline: float
    b_tilde: float
    gamma_c: float
    lambda_positive: bool


def b_hat(phi: float) -> float:
    return (1 + phi**2) / (1 + phi) ** 2


def asym_thresholds(params: ModelParams, z: float) -> AsymThresholds:
    """b_hat, b_underline, b_tilde and gamma_c at ``z`` in (1/2, 1].

    ``lambda_positive`` reports whether ``b`` sits in ``(max(0, b_tilde), b_hat)``,
    the band where the inverse-equilibrium curve is admissible.
    """
    p, g, s = params.phi, params.gamma, params.sigma
    L = float(_log_ratio(z, p))
    q = (z - 1) * z * (p**2 - 1) + p**2
    bh = b_hat(p)
    bu = q / (2 * (z - 1) * z * (p**2 - 1) + p * (p + 1))
    lin = g * (s - 1) * (2 * z - 1)
    bt = (lin * q - s * (z * (p - 1) + 1) * (z * (p - 1) - p) * L) / (lin * (p + 1) * (2 * (z - 1) * z * (p - 1) + p))
    gc = s * (z * (1 - p) - 1) * (z * (1 - p) + p) * L / ((s - 1) * (2 * z - 1) * q)
    ok = max(0.0, bt) < params.b < bh
    return AsymThresholds(bh, bu, bt, gc, ok)


def asym_stability_G(params: ModelParams, z):
    """G(z); an asymmetric equilibrium on the curve lambda = lambda*(z) is stable iff G < 0."""
    p, g, s, b = params.phi, params.gamma, params.sigma, params.b
    z = np.asarray(z, dtype=float)
    G = (2 * z - 1) * (p**2 - 1) * ((2 * b - 1) * g * (s - 1) * (1 - 2 * z) ** 2 - s) + s * (
        2 * z**2 * (p - 1) ** 2 - 2 * z * (p - 1) ** 2 + p**2 + 1
    ) * _log_ratio(z, p)
    return float(G) if G.ndim == 0 else G


def asym_b_critical(params: ModelParams, z, raw: bool = False):
    """b_c(z, phi): G > 0 below it, G < 0 above it.

    Obtained by solving ``G = 0`` for ``b``.  ``raw=True`` returns the
    variant with the opposite sign on the log term, which does not zero
    ``G``; it is kept as a negative control.
    """
    p, g, s = params.phi, params.gamma, params.sigma
    z = np.asarray(z, dtype=float)
    curv = 2 * z**2 * (p - 1) ** 2 - 2 * z * (p - 1) ** 2 + p**2 + 1
    sign = -1.0 if raw else 1.0
    num = (2 * z - 1) * (1 - p**2) * (s + g * (s - 1) * (1 - 2 * z) ** 2) + sign * s * curv * _log_ratio(z, p)
    bc = num / (2 * g * (s - 1) * (2 * z - 1) ** 3 * (1 - p**2))
    return float(bc) if bc.ndim == 0 else bc


# -- pitchfork ------------------------------------------------------------


class Criticality(str, enum.Enum):
    SUPERCRITICAL = "supercritical"
    SUBCRITICAL = "subcritical"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class PitchforkReport:
    phi_b: float
    xi: float
    criticality: Criticality
    f_z: float
    f_zz: float
    f_phi: float
    f_phiz: float
    f_zzz: float
    branch_side: str  # "right" or "left" of phi_b in phi

    @property
    def conditions_hold(self) -> bool:
        scale = max(1.0, abs(self.f_phiz))
        return (
            abs(self.f_z) < 1e-6 * scale
            and abs(self.f_zz) < 1e-4 * scale
            and abs(self.f_phi) < 1e-9
            and abs(self.f_phiz) > 1e-6
        )


def xi_value(params: ModelParams, phi: float) -> tuple[float, float]:
    """``(xi, magnitude)``; the magnitude is the sum of absolute terms, for scaling."""
    g, s, b, lam = params.gamma, params.sigma, params.b, params.lam
    t1 = 3 * g * (s - 1) * (b * (phi + 1) ** 2 - phi**2 - 1) * (lam * (phi - 1) + 2 * phi)
    t2 = s * (phi - 1) ** 2 * (phi + 1)
    return t1 - t2, abs(t1) + abs(t2)


def pitchfork_classify(params: ModelParams, phi_b: float, spec: InnovationSpec = ADDITIVE) -> PitchforkReport:
    """Criticality of the pitchfork at a break point, with the derivative checks.

    ``f(z; phi) = Delta_v``.  Derivatives are taken by finite differences
    around ``z = 1/2``.  Which side of ``phi_b`` the asymmetric branches
    occupy follows from the signs of ``f_phiz`` and ``f_zzz``.
    """
    at = params.replace(phi=phi_b)
    if abs(break_condition(at)) >= TOL:
        raise NotABreakPoint(f"B({phi_b!r}) = {break_condition(at)!r} is not zero")
    xi, mag = xi_value(params, phi_b)
    if abs(xi) < TOL * (1 + mag):
        crit = Criticality.DEGENERATE
    elif xi > 0:
        crit = Criticality.SUPERCRITICAL
    else:
        crit = Criticality.SUBCRITICAL

    f = lambda z, p=phi_b: delta_v(spec, params.replace(phi=p), z)
    fz = lambda p: derivative(lambda z: f(z, p), 0.5)
    h = 1e-3
    zz = np.array([0.5 - 2 * h, 0.5 - h, 0.5, 0.5 + h, 0.5 + 2 * h])
    vals = f(zz)
    f_zz = (vals[3] - 2 * vals[2] + vals[1]) / h**2
    f_zzz = (vals[4] - 2 * vals[3] + 2 * vals[1] - vals[0]) / (2 * h**3)
    hp = 1e-5
    f_phi = (f(0.5, phi_b + hp) - f(0.5, phi_b - hp)) / (2 * hp)
    f_phiz = (fz(phi_b + hp) - fz(phi_b - hp)) / (2 * hp)
    # branches z - 1/2 ~ sqrt(-f_phiz (phi - phi_b) * 6 / f_zzz)
    side = "right" if f_phiz * f_zzz < 0 else "left"
    return PitchforkReport(phi_b, xi, crit, fz(phi_b), float(f_zz), float(f_phi), float(f_phiz), float(f_zzz), side)


# -- general interaction function -----------------------------------------


@dataclass(frozen=True)
class GeneralBreakPoints:
    phi_b1: float
    phi_b2: float
    exists_b1: Existence
    exists_b2: Existence
    kappa: float
    g_half: float
    g_prime_half: float
    g_b: tuple  # g_b evaluated at (phi_b1, phi_b2)


def general_break_points(spec: InnovationSpec, params: ModelParams) -> GeneralBreakPoints:
    """Break points for an arbitrary interaction function from g(1/2) and g'(1/2)."""
    gh = float(spec.weight(0.5, params.b))
    gp = float(spec.weight_prime(0.5, params.b))
    g, lam, s = params.gamma, params.lam, params.sigma
    disc = 2 * g**2 * gh * (lam + 1) ** 2 * (s - 1) ** 2 * gp + (g * gh * (s - 1) + s) ** 2
    kappa = 2 * math.sqrt(disc) if disc >= 0 else math.nan
    lead = g * (lam + 1) * (s - 1) * (gp + 2 * gh)
    den = 2 * (g * gh * (lam + 2) * (s - 1) + s) - g * (lam + 1) * (s - 1) * gp
    p1 = (lead - kappa) / den
    p2 = (lead + kappa) / den

    def g_b(pb):
        if not math.isfinite(pb):
            return math.nan
        d = g * (s - 1) * (2 * lam * (pb - 1) + 3 * pb - 1)
        return -s * (pb + 1) / d if d != 0 else math.inf

    e1, e2 = _strict(0.0, p1, 1.0), _strict(0.0, p2, 1.0)
    return GeneralBreakPoints(p1, p2, e1, e2, kappa, gh, gp, (g_b(p1), g_b(p2)))


# -- report ---------------------------------------------------------------


@dataclass(frozen=True)
class ThresholdReport:
    params: ModelParams
    z: float
    asym: AsymThresholds
    sustain_value: float
    b_s: float
    b_s_below_half: bool
    sustain_points: list
    sustain_peak: float
    break_value: float
    b_bar: float
    breaks: BreakPoints
    b_c: float
    pitchforks: list = field(default_factory=list)
    general: Optional[GeneralBreakPoints] = None

    def flat(self) -> dict:
        """Flat key/value view used by the CLI."""
        bp = self.breaks
        out = {
            "z": self.z,
            "b_hat": self.asym.b_hat,
            "b_underline": self.asym.b_underline,
            "b_tilde": self.asym.b_tilde,
            "gamma_c": self.asym.gamma_c,
            "lambda_star_positive": self.asym.lambda_positive,
            "sustain_value": self.sustain_value,
            "b_s": self.b_s,
            "phi_above_lambda_ratio": self.b_s_below_half,
            "sustain_peak": self.sustain_peak,
            "sustain_points": list(self.sustain_points),
            "n_sustain_points": len(self.sustain_points),
            "break_value": self.break_value,
            "b_bar": self.b_bar,
            "phi_b1": bp.phi_b1,
            "phi_b1_exists": bp.exists_b1.value,
            "phi_b2": bp.phi_b2,
            "phi_b2_exists": bp.exists_b2.value,
            "b1": bp.b1,
            "b2": bp.b2,
            "gamma_window_lo": bp.gamma_window[0],
            "gamma_window_hi": bp.gamma_window[1],
            "gamma_in_window": bp.gamma_in_window.value,
            "b_in_window": bp.b_in_window.value,
            "certificate_agrees": bp.certificate_agrees,
            "b_c": self.b_c,
        }
        for i, pf in enumerate(self.pitchforks, 1):
            out[f"pitchfork{i}_phi"] = pf.phi_b
            out[f"pitchfork{i}_xi"] = pf.xi
            out[f"pitchfork{i}_class"] = pf.criticality.value
            out[f"pitchfork{i}_side"] = pf.branch_side
        if self.general is not None:
            gb = self.general
            out.update(
                {
                    "phi_b1_G": gb.phi_b1,
                    "phi_b1_G_exists": gb.exists_b1.value,
                    "phi_b2_G": gb.phi_b2,
                    "phi_b2_G_exists": gb.exists_b2.value,
                    "kappa": gb.kappa,
                    "g_b1": gb.g_b[0],
                    "g_b2": gb.g_b[1],
                }
            )
        return out


def threshold_report(params: ModelParams, z: float = 0.75, spec: InnovationSpec = ADDITIVE) -> ThresholdReport:
    """Evaluate every threshold at one parameter point.

    ``z`` is the state at which the z-dependent thresholds (b_hat family
    and ``b_c``) are evaluated.
    """
    bp = break_points(params)
    pitchforks = []
    for pb in bp.points:
        try:
            pitchforks.append(pitchfork_classify(params, pb))
        except NotABreakPoint:  # pragma: no cover - closed-form roots are exact to rounding
            log.warning("closed-form break point %r failed back-substitution", pb)
    b_s, above = agglomeration_b_threshold(params)
    return ThresholdReport(
        params=params,
        z=z,
        asym=asym_thresholds(params, z),
        sustain_value=float(sustain_condition(params)),
        b_s=b_s,
        b_s_below_half=above,
        sustain_points=sustain_points(params),
        sustain_peak=sustain_peak(params),
        break_value=float(break_condition(params)),
        b_bar=break_b_bar(params),
        breaks=bp,
        b_c=asym_b_critical(params, z) if 0.5 < z < 1 else math.nan,
        pitchforks=pitchforks,
        general=general_break_points(spec, params),
    )

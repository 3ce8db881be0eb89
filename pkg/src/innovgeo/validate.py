"""Cross-validation invariants evaluated at a parameter point and random perturbations of it."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from innovgeo.core import (
    InnovationSpec,
    ModelParams,
    SpecKind,
    d_delta_v_db,
    delta_v,
    delta_v_prime,
    derivative,
)
from innovgeo.equilibria import find_equilibria
from innovgeo import thresholds as th

SIGN_BAND = 1e-9
Z_SAMPLES = np.linspace(0.02, 0.98, 97)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def perturbations(params: ModelParams, n: int, rng: np.random.Generator) -> list[ModelParams]:
    """``n`` random admissible points scattered around ``params``."""
    logit = lambda x: math.log(x / (1 - x))
    expit = lambda y: 1 / (1 + math.exp(-y))
    out = []
    for _ in range(n):
        e = rng.normal(size=6)
        out.append(
            ModelParams(
                sigma=1 + (params.sigma - 1) * math.exp(0.2 * e[0]),
                lam=params.lam * math.exp(0.3 * e[1]),
                gamma=params.gamma * math.exp(0.1 * e[2]),
                b=min(max(expit(logit(params.b) + 0.3 * e[3]), 1e-6), 1 - 1e-6),
                phi=min(max(expit(logit(params.phi) + 0.5 * e[4]), 1e-4), 1 - 1e-4),
                mu=params.mu * math.exp(0.2 * e[5]),
            )
        )
    return out


def _antisymmetry(spec, p, raw):
    err = np.max(np.abs(delta_v(spec, p, Z_SAMPLES) + delta_v(spec, p, 1 - Z_SAMPLES)))
    return err < 1e-12 * max(1.0, p.mu), f"max |dv(z)+dv(1-z)| = {err:.3g}"


def _derivative(spec, p, raw):
    if spec.kind is not SpecKind.ADDITIVE:
        return True, "finite differences only for this spec"
    a = delta_v_prime(spec, p, Z_SAMPLES, method="analytic", raw=raw)
    f = delta_v_prime(spec, p, Z_SAMPLES, method="fd")
    rel = np.max(np.abs(a - f) / np.maximum(np.abs(f), 1e-3 * np.max(np.abs(f))))
    return rel < 1e-6, f"max relative error {rel:.3g}"


def _db(spec, p, raw):
    if spec.kind is not SpecKind.ADDITIVE:
        return True, "additive only"
    lo, hi = 1e-7, 1 - 1e-7
    fd = derivative(lambda b: np.array([float(delta_v(spec, p.replace(b=float(x)), Z_SAMPLES[10])) for x in np.atleast_1d(b)]),
                    p.b, lo=lo, hi=hi)
    an = float(d_delta_v_db(p, Z_SAMPLES[10]))
    err = abs(an - fd)
    return err < 1e-6 * max(1.0, abs(an)), f"|analytic - fd| = {err:.3g}"


def _back_substitution(spec, p, raw):
    worst = 0.0
    if spec.kind is SpecKind.ADDITIVE:
        for pb in th.break_points(p).points:
            worst = max(worst, abs(th.break_condition(p, pb)))
        for ps in th.sustain_points(p):
            worst = max(worst, abs(th.sustain_condition(p, ps)))
    else:
        gb = th.general_break_points(spec, p)
        for pb, ex in ((gb.phi_b1, gb.exists_b1), (gb.phi_b2, gb.exists_b2)):
            if ex is th.Existence.EXISTS:
                worst = max(worst, abs(float(delta_v_prime(spec, p.replace(phi=pb), 0.5))))
    return worst < 1e-9, f"max residual {worst:.3g}"


def _count_bound(spec, p, raw):
    if spec.kind is not SpecKind.ADDITIVE:
        return True, "additive only"
    n = find_equilibria(spec, p, grid_n=1000).interior_count_upper_half
    return n <= 2, f"{n} equilibria in (1/2, 1]"


def _sign_identities(spec, p, raw):
    if spec.kind is not SpecKind.ADDITIVE:
        return True, "additive only"
    bad = []
    dv1, S = float(delta_v(spec, p, 1.0)), th.sustain_condition(p)
    if abs(S) > SIGN_BAND and abs(dv1) > SIGN_BAND and (dv1 > 0) != (S > 0):
        bad.append(f"dv(1)={dv1:.3g} vs S={S:.3g}")
    d, B = float(delta_v_prime(spec, p, 0.5)), th.break_condition(p)
    if abs(B) > SIGN_BAND and abs(d) > SIGN_BAND and (d > 0) != (B > 0):
        bad.append(f"dv'(1/2)={d:.3g} vs B={B:.3g}")
    return not bad, "; ".join(bad) or "signs agree"


def _corner_identity(spec, p, raw):
    if spec.kind is not SpecKind.COBB_DOUGLAS:
        return True, "cobb-douglas only"
    got = float(delta_v(spec, p, 1.0))
    want = p.mu * math.log(p.phi) / (p.sigma - 1)
    err = abs(got - want)
    return err < 1e-12, f"dv(1)={got:.12g}, mu ln(phi)/(sigma-1)={want:.12g}"


CHECKS: dict[str, Callable] = {
    "antisymmetry": _antisymmetry,
    "derivative-agreement": _derivative,
    "db-derivative": _db,
    "threshold-back-substitution": _back_substitution,
    "count-bound": _count_bound,
    "sign-identities": _sign_identities,
    "cobb-douglas-corner": _corner_identity,
}


def run_suite(
    spec: InnovationSpec,
    params: ModelParams,
    n_perturb: int = 100,
    seed: int = 42,
    raw_quartic: bool = False,
) -> list[CheckResult]:
    """One result per invariant, aggregated over the point and its perturbations.

    ``raw_quartic`` routes the analytic derivative through the raw quartic
    layout; it exists so the derivative check can be seen to fail.
    """
    rng = np.random.default_rng(seed)
    points = [params] + perturbations(params, n_perturb, rng)
    results = []
    for name, check in CHECKS.items():
        failure = None
        for p in points:
            ok, detail = check(spec, p, raw_quartic)
            if not ok:
                failure = f"{detail} at {p.as_dict()}"
                break
        results.append(CheckResult(name, failure is None, failure or f"{len(points)} points"))
    return results

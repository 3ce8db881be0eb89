"""Bracketed scalar root finding."""

from __future__ import annotations

import math
from typing import Callable


def bracketed_root(
    f: Callable[[float], float],
    a: float,
    b: float,
    fa: float | None = None,
    fb: float | None = None,
    ftol: float = 1e-12,
    xtol: float = 1e-14,
    maxiter: int = 200,
) -> float:
    """Root of ``f`` on a sign-change bracket ``[a, b]``.

    Takes a secant step whenever it lands strictly inside the current
    bracket and shrinks it by at least a half every other iteration;
    otherwise bisects.  Stops when ``|f| < ftol`` or the bracket is
    narrower than ``xtol``.
    """
    fa = f(a) if fa is None else fa
    fb = f(b) if fb is None else fb
    if fa == 0:
        return a
    if fb == 0:
        return b
    if math.copysign(1, fa) == math.copysign(1, fb):
        raise ValueError(f"no sign change on [{a}, {b}]")
    best, fbest = (a, fa) if abs(fa) < abs(fb) else (b, fb)
    force_bisect = False
    for _ in range(maxiter):
        if abs(fbest) < ftol or abs(b - a) < xtol:
            break
        width = abs(b - a)
        x = 0.5 * (a + b)
        if not force_bisect:
            secant = b - fb * (b - a) / (fb - fa)
            if min(a, b) < secant < max(a, b):
                x = secant
        fx = f(x)
        if abs(fx) < abs(fbest):
            best, fbest = x, fx
        if fx == 0:
            return x
        if math.copysign(1, fx) == math.copysign(1, fa):
            a, fa = x, fx
        else:
            b, fb = x, fx
        # secant steps that fail to halve the bracket are followed by a bisection
        force_bisect = not force_bisect and abs(b - a) > 0.5 * width
    return best


def bisect(f: Callable[[float], float], a: float, b: float, xtol: float = 1e-13, maxiter: int = 200) -> float:
    """Plain bisection; slow but independent of any interpolation logic."""
    fa = f(a)
    if fa == 0:
        return a
    if f(b) == 0:
        return b
    for _ in range(maxiter):
        m = 0.5 * (a + b)
        if b - a < xtol:
            return m
        fm = f(m)
        if fm == 0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def sign_change_roots(f: Callable[[float], float], lo: float, hi: float, n: int = 400) -> list[float]:
    """All roots of ``f`` on ``[lo, hi]`` that show up as sign changes on an ``n``-cell grid."""
    xs = [lo + (hi - lo) * i / n for i in range(n + 1)]
    fs = [f(x) for x in xs]
    out = []
    for i in range(n):
        if fs[i] == 0:
            out.append(xs[i])
        elif fs[i] * fs[i + 1] < 0:
            out.append(bracketed_root(f, xs[i], xs[i + 1], fs[i], fs[i + 1]))
    if fs[n] == 0:
        out.append(xs[n])
    return out

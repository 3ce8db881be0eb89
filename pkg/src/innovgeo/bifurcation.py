"""One-parameter sweeps: branches, events and scenario classification.

A sweep evaluates :func:`find_equilibria` along a grid in ``phi`` or ``b``,
refines intervals where the equilibrium structure changes, links interior
roots into branches and attaches break, sustain and limit points.  Only the
upper half ``z >= 1/2`` is tracked; the lower half is its mirror image.
"""

from __future__ import annotations

import enum
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from innovgeo.core import ADDITIVE, InnovationSpec, ModelParams, SpecKind, delta_v, delta_v_prime
from innovgeo.equilibria import DEFAULT_GRID, EquilibriumSet, Kind, Stability, find_equilibria
from innovgeo.errors import DomainError, LinkingAmbiguity, NotABreakPoint, Unclassified
from innovgeo.roots import bracketed_root
from innovgeo import thresholds as th

log = logging.getLogger(__name__)

PARAM_MIN = 1e-4
PARAM_MAX = 1 - 1e-4
SWEEP_GRID = 400
MAX_GRID = 4000
CONTINUITY = 0.02  # largest z step allowed between linked points
AMBIGUITY = 1e-3  # roots closer than this trigger refinement
AMBIGUITY_FATAL = 1e-4  # ...and closer than this after refinement are reported
JUMP = 0.05  # displacement that counts as a discontinuous transition
LIMIT_TOL = 1e-8


class EventKind(str, enum.Enum):
    BREAK = "BreakPoint"
    SUSTAIN = "SustainPoint"
    LIMIT = "LimitPoint"
    APPEARS = "BranchAppears"
    DISAPPEARS = "BranchDisappears"


@dataclass(frozen=True)
class Event:
    kind: EventKind
    location: float
    z_location: float
    criticality: Optional[str] = None
    residuals: Optional[tuple] = None
    branches: tuple = ()


@dataclass(frozen=True)
class BranchPoint:
    param: float
    z: float
    stability: Stability


@dataclass
class Branch:
    kind: Kind
    points: list
    start: Optional[int] = None  # event index, None for the grid boundary
    end: Optional[int] = None

    @property
    def params(self) -> np.ndarray:
        return np.array([p.param for p in self.points])

    @property
    def zs(self) -> np.ndarray:
        return np.array([p.z for p in self.points])


@dataclass(frozen=True)
class Regime:
    lo: float
    hi: float
    label: str


@dataclass(frozen=True)
class Transition:
    location: float
    before: str
    after: str
    jump: bool


@dataclass
class BifurcationDiagram:
    spec: str
    base: ModelParams
    swept: str
    grid: np.ndarray
    branches: list
    events: list
    regimes: list
    transitions: list
    ambiguities: list = field(default_factory=list)

    def events_of(self, kind: EventKind) -> list[Event]:
        return [e for e in self.events if e.kind is kind]

    @property
    def regime_sequence(self) -> list[str]:
        return [r.label for r in self.regimes]

    def rows(self):
        """``(param, branch_id, kind, z, stable)`` tuples in branch order."""
        for i, br in enumerate(self.branches):
            for p in br.points:
                yield p.param, i, br.kind.value, p.z, p.stability is Stability.STABLE


# -- grid evaluation --------------------------------------------------------


@dataclass(frozen=True)
class _Slice:
    param: float
    sym: Stability
    corner: Stability
    d_half: float
    dv1: float
    roots: tuple  # ((z, Stability), ...) in (1/2, 1), ascending

    @property
    def signature(self) -> tuple:
        return (self.sym, self.corner, tuple(s for _, s in self.roots))

    @property
    def label(self) -> str:
        parts = []
        if self.sym is Stability.STABLE:
            parts.append("Sym")
        n = sum(1 for _, s in self.roots if s is Stability.STABLE)
        if n:
            parts.append("Asym" if n == 1 else f"Asym{n}")
        if self.corner is Stability.STABLE:
            parts.append("Agg")
        return "+".join(parts) or "None"

    def stable_z(self) -> list[float]:
        out = [0.5] if self.sym is Stability.STABLE else []
        out += [z for z, s in self.roots if s is Stability.STABLE]
        if self.corner is Stability.STABLE:
            out.append(1.0)
        return out


def _at(base: ModelParams, swept: str, value: float) -> ModelParams:
    return base.replace(**{swept: float(value)})


def _slice(spec: InnovationSpec, base: ModelParams, swept: str, value: float, eq_grid: int) -> _Slice:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        es: EquilibriumSet = find_equilibria(spec, _at(base, swept, value), grid_n=eq_grid)
    for w in caught:
        log.debug("%s=%r: %s", swept, value, w.message)
    roots = tuple((e.z_star, e.stability) for e in es.asymmetric_upper())
    sym, corner = es.symmetric, es.corner
    return _Slice(float(value), sym.stability, corner.stability, sym.derivative, corner.derivative, roots)


def _pairs(a: _Slice, b: _Slice) -> list[tuple[int, int]]:
    """Match interior roots of adjacent slices.

    Simple roots cannot cross without colliding, so equal counts are paired
    in order.  Otherwise (a fold, pitchfork or corner exchange lies in
    between) roots are matched greedily by nearest z within the continuity
    threshold.
    """
    if len(a.roots) == len(b.roots):
        return [(i, i) for i in range(len(a.roots))]
    cand = sorted(
        (abs(za - zb), i, j)
        for i, (za, _) in enumerate(a.roots)
        for j, (zb, _) in enumerate(b.roots)
    )
    used_a, used_b, out = set(), set(), []
    for d, i, j in cand:
        if d >= CONTINUITY:
            break
        if i in used_a or j in used_b:
            continue
        used_a.add(i)
        used_b.add(j)
        out.append((i, j))
    return sorted(out)


def _max_jump(a: _Slice, b: _Slice) -> float:
    return max((abs(a.roots[i][0] - b.roots[j][0]) for i, j in _pairs(a, b)), default=0.0)


def _crowded(s: _Slice, gap: float) -> bool:
    """Two interior roots closer than ``gap``; roots near 1/2 or 1 are pitchfork or corner exchanges."""
    zs = [z for z, _ in s.roots]
    return any(z1 - z0 < gap for z0, z1 in zip(zs, zs[1:]))


def _needs_refinement(a: _Slice, b: _Slice) -> bool:
    if a.signature != b.signature:
        return True
    if _crowded(a, AMBIGUITY) or _crowded(b, AMBIGUITY):
        return True
    return _max_jump(a, b) >= CONTINUITY


def _refined_slices(spec, base, swept, lo, hi, n_grid, max_grid, eq_grid) -> list[_Slice]:
    grid = np.linspace(lo, hi, n_grid)
    slices = [_slice(spec, base, swept, v, eq_grid) for v in grid]
    min_width = (hi - lo) * 1e-7
    budget = max_grid - n_grid
    stack = [(i, i + 1) for i in range(n_grid - 1)]
    extra = []
    pending = {i: s for i, s in enumerate(slices)}
    # depth-first bisection of every interval whose ends disagree
    while stack and budget > 0:
        ia, ib = stack.pop()
        a, b = pending[ia], pending[ib]
        if b.param - a.param <= 2 * min_width or not _needs_refinement(a, b):
            continue
        mid = _slice(spec, base, swept, 0.5 * (a.param + b.param), eq_grid)
        key = len(pending)
        pending[key] = mid
        extra.append(mid)
        budget -= 1
        stack.append((ia, key))
        stack.append((key, ib))
    if not budget:
        log.info("refinement budget of %d grid points exhausted", max_grid)
    return sorted(slices + extra, key=lambda s: s.param)


# -- branch assembly -------------------------------------------------------


def _fixed_branch(kind: Kind, slices: list[_Slice]) -> Branch:
    z = 0.5 if kind is Kind.SYMMETRIC else 1.0
    pts = [BranchPoint(s.param, z, s.sym if kind is Kind.SYMMETRIC else s.corner) for s in slices]
    return Branch(kind, pts)


def _link(slices: list[_Slice]) -> tuple[list[Branch], list[tuple]]:
    """Interior branches plus a log of (param, z) pairs that stayed ambiguous."""
    open_: dict[int, Branch] = {}
    done: list[Branch] = []
    ambiguous = []
    prev = None
    for s in slices:
        nxt: dict[int, Branch] = {}
        matched = dict(_pairs(prev, s)) if prev is not None else {}
        for i, j in matched.items():
            br = open_.pop(i)
            z, st = s.roots[j]
            br.points.append(BranchPoint(s.param, z, st))
            nxt[j] = br
        done.extend(open_.values())
        for j, (z, st) in enumerate(s.roots):
            if j not in nxt:
                nxt[j] = Branch(Kind.ASYMMETRIC, [BranchPoint(s.param, z, st)])
        if prev is not None and len(matched) > 1:
            zs = sorted(s.roots[j][0] for j in matched.values())
            for z0, z1 in zip(zs, zs[1:]):
                if z1 - z0 < AMBIGUITY_FATAL:
                    ambiguous.append((s.param, z0, z1))
        open_, prev = nxt, s
    done.extend(open_.values())
    done.sort(key=lambda b: (b.points[0].param, b.points[0].z))
    return done, ambiguous


# -- events -----------------------------------------------------------------


def _scan_roots(slices: list[_Slice], attr: str, f) -> list[float]:
    out = []
    for a, b in zip(slices, slices[1:]):
        fa, fb = getattr(a, attr), getattr(b, attr)
        if fa == 0:
            out.append(a.param)
        elif fa * fb < 0:
            out.append(bracketed_root(f, a.param, b.param, fa, fb))
    return out


def _dv_prime(spec, params, z):
    return float(delta_v_prime(spec, params, z))


def limit_point(spec: InnovationSpec, base: ModelParams, swept: str, z0: float, v0: float,
                maxiter: int = 60) -> Optional[tuple[float, float, float, float]]:
    """Solve ``Delta_v = Delta_v' = 0`` for ``(z, swept value)`` by damped Newton.

    Returns ``(value, z, |Delta_v|, |Delta_v'|)`` or ``None`` when the
    iteration leaves the admissible box or stalls above tolerance.
    """

    def F(x):
        z, v = x
        p = _at(base, swept, v)
        return np.array([float(delta_v(spec, p, z)), _dv_prime(spec, p, z)])

    def inside(x):
        return 0.5 < x[0] < 1.0 and PARAM_MIN / 2 < x[1] < 1 - PARAM_MIN / 2

    x = np.array([z0, v0], dtype=float)
    try:
        fx = F(x)
        for _ in range(maxiter):
            if abs(fx[0]) < 1e-13 and abs(fx[1]) < 1e-11:
                break
            h = 1e-6
            J = np.empty((2, 2))
            for k in range(2):
                e = np.zeros(2)
                e[k] = h
                J[:, k] = (F(x + e) - F(x - e)) / (2 * h)
            try:
                step = np.linalg.solve(J, -fx)
            except np.linalg.LinAlgError:
                return None
            t, norm = 1.0, np.linalg.norm(fx)
            while t > 1e-6:
                cand = x + t * step
                if inside(cand):
                    fc = F(cand)
                    if np.linalg.norm(fc) < norm:
                        x, fx = cand, fc
                        break
                t /= 2
            else:
                break
    except (DomainError, ValueError):
        return None
    if not inside(x) or abs(fx[0]) >= LIMIT_TOL or abs(fx[1]) >= LIMIT_TOL:
        return None
    if x[0] - 0.5 < AMBIGUITY or 1 - x[0] < AMBIGUITY:
        return None  # converged onto a break or sustain point
    return float(x[1]), float(x[0]), float(abs(fx[0])), float(abs(fx[1]))


def _fold_seeds(branches: list[Branch], lo: float, hi: float, step: float) -> list[tuple]:
    """Pairs of interior branches that end (or start) together away from z = 1/2 and z = 1."""
    seeds = []
    for which in ("start", "end"):
        ends = []
        for i, br in enumerate(branches):
            if br.kind is not Kind.ASYMMETRIC:
                continue
            pt = br.points[0] if which == "start" else br.points[-1]
            if min(pt.param - lo, hi - pt.param) < step / 2:
                continue
            ends.append((pt.param, pt.z, i))
        ends.sort()
        used = set()
        for a in range(len(ends)):
            for b in range(a + 1, len(ends)):
                (pa, za, ia), (pb, zb, ib) = ends[a], ends[b]
                if ia in used or ib in used or abs(pa - pb) > 1e-12:
                    continue
                zl, zh = sorted((za, zb))
                if zl - 0.5 < AMBIGUITY or 1 - zh < AMBIGUITY:
                    continue
                used.update((ia, ib))
                seeds.append((pa, 0.5 * (za + zb), (ia, ib), which))
        # a partner that only exists between two grid points leaves a lone end
        for p, z, i in ends:
            if i not in used and z - 0.5 > AMBIGUITY and 1 - z > AMBIGUITY:
                seeds.append((p, z, (i,), which))
    return seeds


def _analytic_events(spec, base, swept, slices) -> list[Event]:
    lo, hi = slices[0].param, slices[-1].param
    events = []
    if swept == "phi" and spec.kind is SpecKind.ADDITIVE:
        bp = th.break_points(base)
        for pb in bp.points:
            if lo <= pb <= hi:
                try:
                    crit = th.pitchfork_classify(base, pb).criticality.value
                except NotABreakPoint:
                    crit = None
                events.append(Event(EventKind.BREAK, pb, 0.5, crit))
        for ps in th.sustain_points(base):
            if lo <= ps <= hi:
                events.append(Event(EventKind.SUSTAIN, ps, 1.0))
        return events
    fb = lambda v: _dv_prime(spec, _at(base, swept, v), 0.5)
    fs = lambda v: float(delta_v(spec, _at(base, swept, v), 1.0))
    for v in _scan_roots(slices, "d_half", fb):
        events.append(Event(EventKind.BREAK, v, 0.5, None))
    for v in _scan_roots(slices, "dv1", fs):
        events.append(Event(EventKind.SUSTAIN, v, 1.0))
    return events


def _criticality_from_branches(ev: Event, branches: list[Branch], step: float) -> Optional[str]:
    """Stable branches leaving z = 1/2 mark a supercritical pitchfork, unstable ones a subcritical one."""
    near = []
    for br in branches:
        if br.kind is not Kind.ASYMMETRIC:
            continue
        for pt in (br.points[0], br.points[-1]):
            if abs(pt.param - ev.location) <= 2 * step and pt.z - 0.5 < 0.05:
                near.append(pt.stability)
    if not near:
        return None
    return th.Criticality.SUPERCRITICAL.value if near[0] is Stability.STABLE else th.Criticality.SUBCRITICAL.value


def _decided(slices: list[_Slice]) -> list[_Slice]:
    """Drop slices that sit on a bifurcation point (some verdict is marginal)."""
    keep = [
        s for s in slices
        if Stability.MARGINAL not in (s.sym, s.corner) and all(st is not Stability.MARGINAL for _, st in s.roots)
    ]
    return keep or slices


def _transitions(slices: list[_Slice]) -> list[Transition]:
    slices = _decided(slices)
    out = []
    for a, b in zip(slices, slices[1:]):
        if a.label == b.label:
            continue
        after = b.stable_z()
        lost = [z for z in a.stable_z() if not any(abs(z - w) < JUMP for w in after)]
        jump = bool(lost) and bool(after)
        out.append(Transition(0.5 * (a.param + b.param), a.label, b.label, jump))
    return out


def _regimes(slices: list[_Slice], events: list[Event]) -> list[Regime]:
    slices = _decided(slices)
    marks = sorted(e.location for e in events)

    def snap(a: float, b: float) -> float:
        inside = [m for m in marks if a <= m <= b]
        return inside[0] if len(inside) == 1 else 0.5 * (a + b)

    out, start = [], slices[0].param
    for a, b in zip(slices, slices[1:]):
        if a.label != b.label:
            cut = snap(a.param, b.param)
            out.append(Regime(start, cut, a.label))
            start = cut
    out.append(Regime(start, slices[-1].param, slices[-1].label))
    # a slice sitting on an event can yield a regime whose cuts both snap to it
    merged: list[Regime] = []
    for r in out:
        if r.hi - r.lo <= 0 and len(out) > 1:
            continue
        if merged and merged[-1].label == r.label:
            merged[-1] = Regime(merged[-1].lo, r.hi, r.label)
        elif merged and merged[-1].hi != r.lo:
            merged.append(Regime(merged[-1].hi, r.hi, r.label))
        else:
            merged.append(r)
    return merged


def sweep(
    spec: InnovationSpec,
    params_base: ModelParams,
    swept: str = "phi",
    range_: tuple[float, float] = (PARAM_MIN, PARAM_MAX),
    n_grid: int = SWEEP_GRID,
    max_grid: int = MAX_GRID,
    eq_grid: int = DEFAULT_GRID // 2,
) -> BifurcationDiagram:
    """Bifurcation diagram of ``spec`` over ``swept`` in ``range_``."""
    if swept not in ("phi", "b"):
        raise ValueError("swept must be 'phi' or 'b'")
    lo, hi = map(float, range_)
    if not (PARAM_MIN <= lo < hi <= PARAM_MAX):
        raise ValueError(f"range must satisfy {PARAM_MIN} <= lo < hi <= {PARAM_MAX} (got {range_})")
    if n_grid < 50:
        raise ValueError("n_grid must be at least 50")
    max_grid = max(max_grid, n_grid)

    slices = _refined_slices(spec, params_base, swept, lo, hi, n_grid, max_grid, eq_grid)
    grid = np.array([s.param for s in slices])
    step = (hi - lo) / (n_grid - 1)

    interior, ambiguous = _link(slices)
    for param, z0, z1 in ambiguous:
        warnings.warn(f"branches at z={z0:.6g} and z={z1:.6g} within 1e-4 at {swept}={param:.6g}",
                      LinkingAmbiguity, stacklevel=2)
    branches = [_fixed_branch(Kind.SYMMETRIC, slices), _fixed_branch(Kind.AGGLOMERATION, slices)] + interior
    offset = 2

    events = _analytic_events(spec, params_base, swept, slices)
    for k, ev in enumerate(events):
        if ev.kind is EventKind.BREAK and ev.criticality is None:
            events[k] = Event(ev.kind, ev.location, ev.z_location,
                              _criticality_from_branches(ev, branches, step))

    fine = float(np.min(np.diff(grid)))
    for v, z, pair, which in _fold_seeds(interior, lo, hi, fine):
        # the fold lies between this end point and its neighbour on the grid
        k = int(np.searchsorted(grid, v))
        nb = grid[k - 1] if which == "start" and k > 0 else grid[min(k + 1, len(grid) - 1)]
        found = limit_point(spec, params_base, swept, z, 0.5 * (v + nb))
        if found is None:
            found = limit_point(spec, params_base, swept, z, v)
        if found is None:
            log.info("limit-point Newton failed from seed %s=%r, z=%r", swept, v, z)
            continue
        loc, zl, r0, r1 = found
        if any(e.kind is EventKind.LIMIT and abs(e.location - loc) < 1e-7 and abs(e.z_location - zl) < 1e-5
               for e in events):
            continue
        events.append(Event(EventKind.LIMIT, loc, zl, None, (r0, r1), tuple(i + offset for i in pair)))

    events.sort(key=lambda e: e.location)
    _attach_endpoints(branches, events, lo, hi, fine)
    events.sort(key=lambda e: e.location)
    return BifurcationDiagram(
        spec=spec.label,
        base=params_base,
        swept=swept,
        grid=grid,
        branches=branches,
        events=events,
        regimes=_regimes(slices, events),
        transitions=_transitions(slices),
        ambiguities=ambiguous,
    )


def _attach_endpoints(branches: list[Branch], events: list[Event], lo: float, hi: float, fine: float) -> None:
    """Point branch ends at the event that explains them, creating Appears/Disappears events otherwise."""
    for idx, br in enumerate(branches):
        if br.kind is not Kind.ASYMMETRIC:
            continue
        for which in ("start", "end"):
            pt = br.points[0] if which == "start" else br.points[-1]
            if min(pt.param - lo, hi - pt.param) < fine / 2:
                continue
            hit = None
            for k, ev in enumerate(events):
                if ev.kind is EventKind.LIMIT and idx in ev.branches:
                    hit = k
                elif ev.kind in (EventKind.BREAK, EventKind.SUSTAIN):
                    close_z = abs(pt.z - ev.z_location) < 0.05
                    if close_z and abs(pt.param - ev.location) < 4 * fine + 1e-9:
                        hit = k
                if hit is not None:
                    break
            if hit is None:
                kind = EventKind.APPEARS if which == "start" else EventKind.DISAPPEARS
                events.append(Event(kind, pt.param, pt.z, branches=(idx,)))
                hit = len(events) - 1
            if which == "start":
                br.start = hit
            else:
                br.end = hit
    # indices must survive the caller's re-sort, so store events by identity
    order = sorted(range(len(events)), key=lambda k: events[k].location)
    remap = {old: new for new, old in enumerate(order)}
    for br in branches:
        br.start = remap.get(br.start) if br.start is not None else None
        br.end = remap.get(br.end) if br.end is not None else None


# -- regimes and taxonomy -------------------------------------------------


def hysteresis_windows(diagram: BifurcationDiagram) -> list[tuple[float, float]]:
    """Maximal intervals where two or more stable equilibria (up to mirroring) coexist."""
    out = []
    for r in diagram.regimes:
        multi = "+" in r.label or r.label.startswith("Asym") and r.label[4:5].isdigit()
        if not multi:
            continue
        if out and abs(out[-1][1] - r.lo) < 1e-15:
            out[-1] = (out[-1][0], r.hi)
        else:
            out.append((r.lo, r.hi))
    return out


SCENARIOS = {
    "i": "scenario (i): smooth re-dispersion from asymmetric dispersion",
    "ii": "scenario (ii): discontinuous re-dispersion from asymmetric equilibrium",
    "iii": "scenario (iii): discontinuous re-dispersion with an interior agglomeration window",
    "iv": "scenario (iv): sudden re-dispersion from full agglomeration to symmetric dispersion",
    "v": "scenario (v): no symmetric dispersion at low integration; asymmetric dispersion then agglomeration",
    "vi": "scenario (vi): supercritical pitchfork towards agglomeration",
    "detached-agglomeration": "detached agglomeration branch surrounded by symmetric dispersion",
    "agglomeration-then-jump": "smooth agglomeration followed by a jump to symmetric dispersion",
    "symmetric-throughout": "symmetric dispersion stable for every value",
    "no-stable": "no stable equilibria",
    "subcritical-no-stable-above": "subcritical pitchfork with no stable equilibrium above the break point",
    "symmetric-unstable-window": "symmetric dispersion stable below the first and above the second break point",
    "pitchfork-then-fold": "supercritical pitchfork whose asymmetric branch ends in a saddle-node",
}


@dataclass(frozen=True)
class Classification:
    key: str
    label: str
    regimes: tuple
    features: tuple


def _has(label: str, part: str) -> bool:
    return part in label.split("+") or (part == "Asym" and label.startswith("Asym"))


def classify_scenario(diagram: BifurcationDiagram) -> Classification:
    """Match the regime sequence of a ``phi`` sweep against the scenario taxonomy."""
    if diagram.swept != "phi":
        raise ValueError("classification needs a sweep over phi")
    seq = diagram.regime_sequence
    first, last = seq[0], seq[-1]
    features = []
    limits = diagram.events_of(EventKind.LIMIT)
    if limits:
        features.append("limit-point")
    if hysteresis_windows(diagram):
        features.append("hysteresis")
    if any(t.jump for t in diagram.transitions):
        features.append("discontinuous-transition")
    agg_runs = [i for i, r in enumerate(seq) if _has(r, "Agg")]
    if any(r == "Agg" for r in seq[1:-1]):
        features.append("interior-agglomeration-window")

    def done(key):
        return Classification(key, SCENARIOS[key], tuple(seq), tuple(features))

    if all(r == "Sym" for r in seq):
        return done("symmetric-throughout")

    if "None" in seq:
        if last == "None" and not any(_has(r, "Sym") for r in seq):
            return done("no-stable")
        if seq == ["Sym", "None"]:
            return done("subcritical-no-stable-above")
        if seq == ["Sym", "None", "Sym"]:
            return done("symmetric-unstable-window")
        if seq[0] == "Sym" and last == "None" and all(r in ("Sym", "Asym", "None") for r in seq):
            return done("pitchfork-then-fold")
        raise Unclassified(seq)

    if not _has(first, "Sym"):
        if _has(last, "Agg") and not _has(last, "Sym"):
            return done("v")
        if last == "Sym" and agg_runs:
            # blocks of regimes separated by plain symmetric dispersion
            blocks, cur = [], []
            for r in seq:
                if r == "Sym":
                    if cur:
                        blocks.append(cur)
                    cur = []
                else:
                    cur.append(r)
            if any(_has(r, "Agg") for blk in blocks[1:] for r in blk):
                return done("detached-agglomeration")
            if "Agg" in blocks[0] and blocks[0][-1] == "Sym+Agg":
                return done("agglomeration-then-jump")
        raise Unclassified(seq)

    if first == "Sym":
        if _has(last, "Agg") and not _has(last, "Sym"):
            if any(r == "Asym" for r in seq) and not any(t.jump for t in diagram.transitions):
                return done("vi")
            raise Unclassified(seq)
        if last == "Sym":
            if not agg_runs:
                if not any(_has(r, "Asym") for r in seq):
                    raise Unclassified(seq)
                exit_ = [t for t in diagram.transitions if _has(t.before, "Asym") and not _has(t.after, "Asym")]
                return done("ii" if exit_ and exit_[-1].jump else "i")
            if "Agg" in seq:
                after = seq[agg_runs[-1] + 1 :]
                if any(_has(r, "Asym") for r in after):
                    return done("iii")
                return done("iv")
    raise Unclassified(seq)

import numpy as np
import pytest

from conftest import REFERENCE, fixture_sweep
from innovgeo.bifurcation import (
    EventKind,
    classify_scenario,
    hysteresis_windows,
    limit_point,
    sweep,
)
from innovgeo.core import ADDITIVE, COBB_DOUGLAS, ModelParams, delta_v, delta_v_prime
from innovgeo.errors import Unclassified
from innovgeo.fixtures import fixture, names
from innovgeo.thresholds import break_condition, break_points, sustain_condition, sustain_points

WORKING = [
    "scenario-i-sigma47",
    "scenario-ii-sigma47",
    "scenario-iii-sigma47",
    "scenario-iv-sigma47",
    "scenario-v",
    "scenario-vi",
    "scenario-vi-gamma09",
    "detached-agglomeration",
    "agglomeration-then-jump",
    "integration-path",
]


@pytest.mark.parametrize("name", WORKING)
def test_fixture_classifies(name):
    assert classify_scenario(fixture_sweep(name)).key == fixture(name).expected


def test_fixture_registry():
    assert set(WORKING) <= set(names())
    with pytest.raises(KeyError, match="choose from"):
        fixture("nope")


def test_integration_path_limit_point():
    d = fixture_sweep("integration-path")
    pb2 = break_points(d.base).phi_b2
    (lp,) = d.events_of(EventKind.LIMIT)
    assert pb2 < lp.location < 1
    assert lp.location == pytest.approx(0.40298, abs=1e-5)
    assert max(abs(r) for r in lp.residuals) < 1e-8
    p = d.base.replace(phi=lp.location)
    assert abs(float(delta_v(ADDITIVE, p, lp.z_location))) < 1e-8
    assert abs(float(delta_v_prime(ADDITIVE, p, lp.z_location))) < 1e-8
    (window,) = [w for w in hysteresis_windows(d) if w[0] > 0.39]
    assert window == pytest.approx((pb2, lp.location), abs=1e-5)


def test_events_match_closed_forms():
    d = fixture_sweep("integration-path")
    got = sorted(e.location for e in d.events_of(EventKind.BREAK))
    assert got == pytest.approx(break_points(d.base).points, abs=1e-8)
    for e in d.events_of(EventKind.BREAK):
        assert abs(break_condition(d.base, e.location)) < 1e-9
    got = sorted(e.location for e in d.events_of(EventKind.SUSTAIN))
    assert got == pytest.approx(sustain_points(d.base), abs=1e-8)
    for e in d.events_of(EventKind.SUSTAIN):
        assert abs(sustain_condition(d.base, e.location)) < 1e-9


def test_criticality_matches_branches():
    d = fixture_sweep("integration-path")
    crit = [e.criticality for e in sorted(d.events_of(EventKind.BREAK), key=lambda e: e.location)]
    assert crit == ["supercritical", "subcritical"]


def test_agglomeration_jump_hysteresis_window():
    d = fixture_sweep("agglomeration-then-jump")
    pb2 = break_points(d.base).phi_b2
    ps2 = sustain_points(d.base)[-1]
    assert (pb2, ps2) in [pytest.approx(w, abs=1e-6) for w in hysteresis_windows(d)]


def test_detached_branch_is_not_linked_to_events():
    d = fixture_sweep("detached-agglomeration")
    seq = d.regime_sequence
    assert seq[0].startswith("Asym") and seq[-1] == "Sym"
    i = seq.index("Sym")
    assert any("Agg" in r for r in seq[i:])


@pytest.mark.parametrize("name", ["integration-path", "scenario-iii-sigma47", "detached-agglomeration"])
def test_grid_doubling_keeps_regimes(name):
    assert fixture_sweep(name, 800).regime_sequence == fixture_sweep(name).regime_sequence


def test_limit_point_newton():
    d = fixture_sweep("integration-path")
    lp = d.events_of(EventKind.LIMIT)[0]
    again = limit_point(ADDITIVE, d.base, "phi", lp.z_location + 0.01, lp.location - 1e-3)
    assert again is not None
    value, z, r0, r1 = again
    assert value == pytest.approx(lp.location, abs=1e-9)
    assert max(r0, r1) < 1e-8


def test_stable_branch_direction():
    # just past a supercritical break point the stable branch moves away from 1/2
    d = fixture_sweep("integration-path")
    pb1 = break_points(d.base).phi_b1
    asym = [b for b in d.branches if b.kind.value == "asymmetric" and b.points[0].param < pb1 + 0.01]
    assert asym
    for br in asym:
        near = [p for p in br.points if p.param < pb1 + 0.02]
        assert all(p.param > pb1 - 1e-9 for p in near)


def test_rows_shape():
    d = fixture_sweep("scenario-vi")
    rows = list(d.rows())
    assert rows and all(len(r) == 5 for r in rows)
    assert {r[2] for r in rows} == {"symmetric", "asymmetric", "agglomeration"}


def test_b_sweep():
    d = sweep(ADDITIVE, ModelParams(sigma=8, lam=2, gamma=1, b=0.5, phi=0.3), "b", n_grid=200)
    assert d.swept == "b"
    assert d.regimes[0].lo == pytest.approx(1e-4)
    with pytest.raises(ValueError):
        classify_scenario(d)


def test_bad_range():
    with pytest.raises(ValueError):
        sweep(ADDITIVE, REFERENCE, "phi", range_=(0.5, 0.2))
    with pytest.raises(ValueError):
        sweep(ADDITIVE, REFERENCE, "sigma")


class TestCobbDouglasInterior:
    """Interior structure of the six reference panels; the corner is left to the acceptance suite."""

    @staticmethod
    def interior(b):
        d = sweep(COBB_DOUGLAS, ModelParams(sigma=8, lam=4, gamma=1, b=b, phi=0.5), "phi")
        out = []
        for r in d.regimes:
            parts = [x for x in r.label.split("+") if x != "Agg"] or ["None"]
            label = "+".join(parts)
            if not out or out[-1] != label:
                out.append(label)
        return out

    @pytest.mark.parametrize("b", [0.1, 0.44])
    def test_symmetric_only(self, b):
        assert self.interior(b) == ["Sym"]

    def test_unstable_window(self):
        assert self.interior(0.45) == ["Sym", "None", "Sym"]

    def test_subcritical(self):
        assert self.interior(0.5) == ["Sym", "None"]

    def test_pitchfork_then_fold(self):
        seq = self.interior(0.65)
        assert seq[0] == "Sym" and seq[-1] == "None" and any(s.startswith("Asym") for s in seq)

    def test_no_interior_stable(self):
        assert self.interior(0.75)[-1] == "None"


def test_sigma8_scenarios_are_flat():
    # the sigma = 8 tuples for (i)-(iv) never leave symmetric dispersion
    for name in ("scenario-i", "scenario-ii", "scenario-iii", "scenario-iv"):
        assert classify_scenario(fixture_sweep(name)).key == "symmetric-throughout"


def test_unclassified_raises():
    d = fixture_sweep("scenario-vi")
    d2 = type(d)(d.spec, d.base, d.swept, d.grid, d.branches, d.events, [d.regimes[0].__class__(0.1, 0.2, "Sym"), d.regimes[0].__class__(0.2, 0.3, "Sym+Agg")], [])
    with pytest.raises(Unclassified):
        classify_scenario(d2)

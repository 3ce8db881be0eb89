import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from scipy.optimize import brentq

from conftest import model_params
from innovgeo.core import ADDITIVE, COBB_DOUGLAS, InnovationSpec, ModelParams, delta_v, delta_v_prime
from innovgeo.errors import NotABreakPoint
from innovgeo.thresholds import (
    Criticality,
    Existence,
    agglomeration_b_threshold,
    asym_b_critical,
    asym_stability_G,
    asym_thresholds,
    b_hat,
    break_b_bar,
    break_b_window,
    break_condition,
    break_points,
    general_break_points,
    pitchfork_classify,
    sustain_condition,
    sustain_limit_at_one,
    sustain_points,
    threshold_report,
    xi_value,
)


def test_b_hat():
    assert b_hat(0.5) == pytest.approx(5 / 9, abs=1e-15)


def test_b_window_example():
    b1, b2 = break_b_window(ModelParams(sigma=8, lam=2, gamma=1, b=0.4, phi=0.5))
    assert b1 == pytest.approx(19 * 65 / 3528, abs=1e-12)
    assert b2 == pytest.approx(19 / 42, abs=1e-12)


def test_break_condition_negative_everywhere():
    p = ModelParams(sigma=8, lam=2, gamma=1, b=0.33, phi=0.5)
    assert all(break_condition(p, x) < 0 for x in np.linspace(1e-4, 1 - 1e-4, 999))
    assert break_points(p).points == []


@given(model_params())
def test_b_bar_implies_unstable(p):
    bb = break_b_bar(p)
    assume(bb + 1e-6 < 1)
    q = p.replace(b=min(bb + max(1e-6, 0.5 * (1 - bb)), 1 - 1e-9))
    assert break_condition(q) > 0


class TestBreakPoints:
    def test_two_break_points_below_half(self):
        p = ModelParams(sigma=5, lam=2, gamma=1, b=0.342, phi=0.3)
        bp = break_points(p)
        assert bp.exists_b1 is Existence.EXISTS and bp.exists_b2 is Existence.EXISTS
        assert bp.gamma_in_window is Existence.BOUNDARY  # gamma = 1 is the open upper end
        assert bp.phi_b2 == pytest.approx(0.40103, abs=1e-5)
        for pb in bp.points:
            assert abs(break_condition(p, pb)) < 1e-9
            assert brentq(lambda x: break_condition(p, x), pb - 0.01, pb + 0.01, xtol=1e-14) == pytest.approx(pb, abs=1e-8)

    def test_single_break_point_above_half(self):
        p = ModelParams(sigma=8, lam=20, gamma=1, b=0.7, phi=0.3)
        bp = break_points(p)
        assert bp.exists_b1 is Existence.EXISTS
        assert bp.exists_b2 is not Existence.EXISTS

    def test_general_matches_closed_form(self, rng):
        for _ in range(100):
            p = ModelParams(sigma=rng.uniform(1.5, 10), lam=rng.uniform(0.1, 6), gamma=rng.uniform(0.2, 2),
                            b=rng.uniform(0.01, 0.99), phi=0.5)
            bp = break_points(p)
            for spec in (ADDITIVE, COBB_DOUGLAS):
                gb = general_break_points(spec, p)
                if math.isfinite(bp.phi_b1):
                    assert sorted([gb.phi_b1, gb.phi_b2]) == pytest.approx(sorted([bp.phi_b1, bp.phi_b2]), abs=1e-10)

    def test_cobb_douglas_break_point_zeroes_slope(self):
        p = ModelParams(sigma=5, lam=2, gamma=1, b=0.342, phi=0.3)
        gb = general_break_points(COBB_DOUGLAS, p)
        assert abs(float(delta_v_prime(COBB_DOUGLAS, p.replace(phi=gb.phi_b1), 0.5))) < 1e-9

    def test_increasing_weight_rules_out_second_break(self):
        spec = InnovationSpec.custom(lambda z: 0.6 * z**2 + 0.2 * (1 - z) ** 2, b=0.7)
        gb = general_break_points(spec, ModelParams(sigma=8, lam=2, gamma=1, b=0.7, phi=0.5))
        assert gb.exists_b2 is not Existence.EXISTS


class TestSustain:
    def test_limit_at_one(self):
        p = ModelParams(sigma=8, lam=2, gamma=1, b=0.3, phi=0.5)
        assert sustain_condition(p, 1.0) == pytest.approx(sustain_limit_at_one(p), abs=1e-15)

    def test_equals_corner_differential(self, rng):
        for _ in range(100):
            p = ModelParams(sigma=rng.uniform(1.5, 10), lam=rng.uniform(0.1, 6), gamma=rng.uniform(0.2, 2),
                            b=rng.uniform(0.01, 0.99), phi=rng.uniform(0.01, 0.99), mu=rng.uniform(0.3, 3))
            assert float(delta_v(ADDITIVE, p, 1.0)) == pytest.approx(p.mu * sustain_condition(p), rel=1e-10, abs=1e-13)

    def test_single_root_above_half(self):
        p = ModelParams(sigma=5, lam=2, gamma=1, b=0.6, phi=0.5)
        roots = sustain_points(p)
        assert len(roots) == 1
        assert sustain_condition(p, roots[0] - 1e-3) < 0 < sustain_condition(p, roots[0] + 1e-3)

    def test_two_roots_below_half(self):
        p = ModelParams(sigma=5, lam=2, gamma=1, b=0.342, phi=0.5)
        lo, hi = sustain_points(p)
        assert sustain_condition(p, (lo + hi) / 2) > 0
        assert sustain_condition(p, lo / 2) < 0 and sustain_condition(p, (hi + 1) / 2) < 0

    def test_b_half_root_at_one(self):
        p = ModelParams(sigma=5, lam=2, gamma=1, b=0.5, phi=0.5)
        assert sustain_limit_at_one(p) == 0
        assert all(r < 1 for r in sustain_points(p))

    @given(model_params())
    def test_roots_back_substitute(self, p):
        roots = sustain_points(p)
        assert len(roots) <= 2
        for r in roots:
            assert abs(sustain_condition(p, r)) < 1e-9
        if p.b > 0.5 and sustain_limit_at_one(p) > 0:
            assert len(roots) == 1

    @given(model_params())
    def test_b_s(self, p):
        b_s, above = agglomeration_b_threshold(p)
        assert above == (p.phi > p.lam / (p.lam + 2))
        if above:
            assert b_s < 0.5
        assume(b_s < 1 - 1e-6)
        q = p.replace(b=(b_s + 1) / 2)
        assert sustain_condition(q) > 0


class TestAsymmetric:
    def test_ordering(self, rng):
        for _ in range(200):
            p = ModelParams(sigma=rng.uniform(1.5, 10), lam=1, gamma=rng.uniform(0.2, 2), b=0.3, phi=rng.uniform(0.01, 0.99))
            t = asym_thresholds(p, rng.uniform(0.51, 0.99))
            assert t.b_tilde < t.b_underline < t.b_hat

    def test_b_tilde_negative_for_small_gamma(self, rng):
        for _ in range(100):
            p = ModelParams(sigma=rng.uniform(1.5, 10), lam=1, gamma=1, b=0.3, phi=rng.uniform(0.01, 0.99))
            z = rng.uniform(0.51, 0.99)
            gc = asym_thresholds(p, z).gamma_c
            g = 0.5 * min(1.0, gc)
            assert asym_thresholds(p.replace(gamma=g), z).b_tilde < 0

    def test_b_c_separates_signs_of_G(self, rng):
        for _ in range(200):
            p = ModelParams(sigma=rng.uniform(1.5, 10), lam=1, gamma=rng.uniform(0.2, 2), b=0.3, phi=rng.uniform(0.01, 0.95))
            z = rng.uniform(0.55, 0.99)
            bc = asym_b_critical(p, z)
            assert bc < 0.5
            if 1e-3 < bc:
                assert asym_stability_G(p.replace(b=bc - 1e-3), z) > 0
            if bc + 1e-3 > 0:
                assert asym_stability_G(p.replace(b=min(bc + 1e-3, 0.99)), z) < 0

    def test_b_c_limit(self):
        p = ModelParams(sigma=8, lam=1, gamma=1, b=0.3, phi=1 - 1e-6)
        assert asym_b_critical(p, 0.8) == pytest.approx(0.5, abs=1e-4)

    def test_raw_b_c_does_not_zero_G(self):
        p = ModelParams(sigma=8, lam=1, gamma=1, b=0.3, phi=0.4)
        bc = asym_b_critical(p, 0.8)
        raw = asym_b_critical(p, 0.8, raw=True)
        assert abs(asym_stability_G(p.replace(b=bc), 0.8)) < 1e-10
        assert not 0 < raw < 0.5


class TestPitchfork:
    def test_requires_break_point(self):
        with pytest.raises(NotABreakPoint):
            pitchfork_classify(ModelParams(sigma=5, lam=2, gamma=1, b=0.342, phi=0.3), 0.2)

    def test_reference_point(self):
        p = ModelParams(sigma=5, lam=2, gamma=1, b=0.342, phi=0.3)
        bp = break_points(p)
        first = pitchfork_classify(p, bp.phi_b1)
        second = pitchfork_classify(p, bp.phi_b2)
        assert first.conditions_hold and second.conditions_hold
        assert first.criticality is Criticality.SUPERCRITICAL
        assert second.criticality is Criticality.SUBCRITICAL

    @pytest.mark.parametrize("b", [0.7, 0.9])
    def test_localized_spillovers_supercritical(self, b):
        p = ModelParams(sigma=8, lam=4, gamma=1, b=b, phi=0.5)
        xi, _ = xi_value(p, break_points(p).phi_b1)
        assert xi > 0

    def test_leftward_shift(self):
        p = ModelParams(sigma=8, lam=4, gamma=1, b=0.7, phi=0.5)
        assert break_points(p.replace(b=0.9)).phi_b1 < break_points(p).phi_b1


def test_report_flat():
    rep = threshold_report(ModelParams(sigma=5, lam=2, gamma=1, b=0.342, phi=0.3), spec=COBB_DOUGLAS)
    flat = rep.flat()
    assert flat["pitchfork1_class"] == "supercritical"
    assert flat["b_hat"] == pytest.approx(b_hat(0.3))
    assert "phi_b1_G" in flat

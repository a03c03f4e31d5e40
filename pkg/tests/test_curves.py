import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from t1helix.curves import (FIXTURES, BasePath, CurveSample, CurveSpec, Family, FiberRule,
                            TransportedField, acceleration_square, arclength_reparam,
                            causal_character, circle_check, fixture_sample, is_constant,
                            make_fixture, parallel_transport, pseudo_arc_reparam, relative_spread)
from t1helix.errors import (CausalTypeChanges, NonConstantSpeed, NotNull, NullCurve, NullGeodesic,
                            UnknownFixture)
from t1helix.gnat import MetricParams
from t1helix.surfaces import SurfaceKind, SurfaceModel, inner

SPHERE = SurfaceModel(SurfaceKind.SPHERE)


def _latitude_source(theta0, omega, psi0=0.0, rate=0.0):
    """Latitude circle with V at angle ψ0 + rate·t from ∂θ."""
    def source(tt):
        tt = np.asarray(tt, dtype=float)
        x = np.stack([np.full_like(tt, theta0), omega * tt], -1)
        psi = psi0 + rate * tt
        V = np.stack([np.cos(psi), np.sin(psi) / math.sin(theta0)], -1)
        return x, V
    return source


@pytest.fixture(scope="module")
def fig2():
    return fixture_sample("fig2-oblique")


class TestFixtures:
    @pytest.mark.parametrize("name", sorted(FIXTURES))
    def test_base_on_quadric(self, name):
        s = fixture_sample(name)
        X = s.surface.embed(s.x)
        err = np.max(np.abs(s.surface.ambient_inner(X, X) - s.surface.quadric_value))
        assert err < 1e-10, f"{name}: quadric defect {err:.2e}"

    @pytest.mark.parametrize("name", sorted(FIXTURES))
    def test_fiber_is_unit(self, name):
        s = fixture_sample(name)
        assert np.max(s.unit_defect) < 1e-10, f"{name}: max |g(V,V) − 1| = {np.max(s.unit_defect):.2e}"

    def test_arguments_are_parsed(self):
        spec = make_fixture("timelike-geodesic(0.5)")
        assert spec.name == "timelike-geodesic(0.5)"
        assert make_fixture(" horizontal-helix ( 0.7 ) ").name == "horizontal-helix(0.7)"

    @pytest.mark.parametrize("name", ["no-such-curve", "fig2-oblique(", "FIG2-OBLIQUE"])
    def test_unknown(self, name):
        with pytest.raises(UnknownFixture):
            make_fixture(name)

    def test_spacelike_needs_large_rho(self):
        with pytest.raises(ValueError):
            make_fixture("spacelike-geodesic(0.5)")

    def test_spec_validation(self):
        spec = make_fixture("fig2-oblique")
        kw = dict(name="x", family=Family.OBLIQUE, surface=spec.surface, params=spec.params,
                  base=spec.base, fiber=spec.fiber)
        with pytest.raises(ValueError):
            CurveSpec(**kw, window=(0.0, 1.0), samples=63)
        with pytest.raises(ValueError):
            CurveSpec(**kw, window=(1.0, 1.0))

    def test_oblique_rule_needs_spacelike_velocity(self):
        from t1helix.curves import build_sample
        surf = SurfaceModel(SurfaceKind.DESITTER)
        base = BasePath(lambda t: np.stack([np.asarray(t, float), 0 * np.asarray(t, float)], -1))
        spec = CurveSpec("timelike", Family.OBLIQUE, surf, MetricParams(1.0, 0.0, 3.0), base,
                         FiberRule("oblique"), (0.0, 1.0), 64)
        with pytest.raises(ValueError):
            build_sample(spec)


class TestSample:
    def test_grid(self, fig2):
        assert fig2.n == 256
        assert fig2.t[0] == 0.0 and fig2.t[-1] == pytest.approx(2 * math.pi)
        assert fig2.core.size > 200

    def test_sigma(self, fig2):
        assert np.allclose(fig2.sigma, 0.5, atol=1e-10)

    def test_covariant_derivative_of_parallel_field(self):
        s = fixture_sample("kk-horizontal-circle")
        assert np.max(np.abs(s.derivs.Vd[s.core])) < 1e-9

    def test_table_speed_matches_fig2(self, fig2):
        # fig2 rebuilt from samples: the oblique fiber ẋ/√σ is ψ = π/2
        t = np.linspace(0.0, 2 * math.pi, 2001)
        x, V = _latitude_source(math.pi / 4, 1.0, psi0=math.pi / 2)(t)
        tab = CurveSample.from_table(SPHERE, fig2.params, t, x, V)
        c = tab.core
        assert np.allclose(tab.speed2[c], 2.5, atol=1e-9)

    def test_from_table_requires_uniform_grid(self):
        t = np.array([0.0, 0.1, 0.3] + [0.3 + 0.1 * k for k in range(1, 70)])
        x, V = _latitude_source(1.0, 1.0)(t)
        with pytest.raises(ValueError):
            CurveSample.from_table(SPHERE, MetricParams(1.0, 0.0, 3.0), t, x, V)

    def test_table_cannot_be_reevaluated(self):
        t = np.linspace(0, 1, 80)
        x, V = _latitude_source(1.0, 1.0)(t)
        tab = CurveSample.from_table(SPHERE, MetricParams(1.0, 0.0, 3.0), t, x, V)
        with pytest.raises(ValueError):
            tab.evaluate(0.5)

    def test_with_params_keeps_geometry(self, fig2):
        other = fig2.with_params(MetricParams(2.0, 0.0, 3.0))
        assert np.array_equal(other.x, fig2.x) and other.params.a == 2.0


class TestConstancy:
    def test_relative_spread(self):
        assert relative_spread([2.0, 2.0, 2.0]) == 0.0
        assert relative_spread([1.0, 3.0]) == pytest.approx(0.5)
        assert relative_spread([np.nan, np.nan]) == math.inf

    def test_floor_protects_zero_mean(self):
        assert is_constant([1e-14, -1e-14], floor=1.0)
        assert not is_constant([1e-14, -1e-14])


class TestCausalCharacter:
    @pytest.mark.parametrize("name,expected", [("fig2-oblique", 1), ("timelike-geodesic", -1),
                                               ("null-oblique", 0), ("lightlike-geodesic", 0)])
    def test_fixture_character(self, name, expected):
        s = fixture_sample(name)
        assert set(causal_character(s.params, s)[s.core]) == {expected}
        assert causal_character(s.params, s, t=float(s.t[s.n // 2])) == expected

    def test_other_params(self, fig2):
        # a + c < 0 makes the horizontal part timelike on the sphere
        p = MetricParams(-1.0, -1.0, 1.0)
        assert set(causal_character(p, fig2)[fig2.core]) == {-1}

    def test_type_change_rejected(self):
        p = MetricParams(1.0, 0.0, -5.0)
        s = CurveSample.from_source(SPHERE, p, _latitude_source(math.pi / 2, 1.0, rate=1.0),
                                    (0.0, math.pi), 128)
        signs = causal_character(p, s)[s.core]
        assert 1 in signs and -1 in signs
        with pytest.raises(CausalTypeChanges):
            arclength_reparam(p, s)


class TestArcLength:
    def test_source_route(self, fig2):
        r = arclength_reparam(fig2.params, fig2)
        c = r.core
        assert np.max(np.abs(r.speed2[c] - 1.0)) < 1e-9
        assert r.meta["scale"] == pytest.approx(math.sqrt(2.5), rel=1e-10)
        assert r.t[-1] == pytest.approx(2 * math.pi * math.sqrt(2.5), rel=1e-10)

    def test_table_route(self):
        p = MetricParams(1.0, 0.0, 3.0)
        t = np.linspace(0.0, 2.0, 801)
        # latitude circle with a speed-up so the weight is not constant
        src = _latitude_source(1.0, 1.0, psi0=0.3)
        x, V = src(t + 0.2 * t**2)
        tab = CurveSample.from_table(SPHERE, p, t, x, V)
        r = arclength_reparam(p, tab)
        c = r.core
        assert np.max(np.abs(r.speed2[c] - 1.0)) < 1e-5

    def test_null_rejected(self):
        s = fixture_sample("null-oblique")
        with pytest.raises(NullCurve):
            arclength_reparam(s.params, s)


class TestPseudoArc:
    def test_slowed_null_curve(self):
        s = fixture_sample("null-oblique")
        src, T = s.source, s.t[-1]
        slow = CurveSample.from_source(s.surface, s.params, lambda tt: src(0.5 * tt),
                                       (0.0, 2 * T), 256)
        assert np.max(np.abs(acceleration_square(slow)[slow.core] - 1 / 16)) < 1e-6
        r = pseudo_arc_reparam(s.params, slow)
        err = np.max(np.abs(acceleration_square(r)[r.core] - 1.0))
        assert err < 1e-5, f"G̃(λ'',λ'') − 1 = {err:.2e}"
        assert r.t[-1] == pytest.approx(T, rel=1e-8)

    def test_non_null_rejected(self, fig2):
        with pytest.raises(NotNull):
            pseudo_arc_reparam(fig2.params, fig2)

    def test_null_geodesic_rejected(self):
        s = fixture_sample("lightlike-geodesic")
        with pytest.raises(NullGeodesic):
            pseudo_arc_reparam(s.params, s)


class TestCircles:
    def test_fig2_base(self, fig2):
        rep = circle_check(fig2.surface, fig2)
        assert rep.is_circle and rep.eps_prime == 1
        assert rep.K == pytest.approx(0.5, abs=1e-9)
        assert rep.K_prime == pytest.approx(-0.5, abs=1e-8)
        assert rep.sigma == pytest.approx(0.5, abs=1e-12)

    @given(st.floats(0.3, 1.4), st.floats(0.5, 2.0))
    @settings(max_examples=20, deadline=None)
    def test_latitudes(self, theta0, omega):
        # ẍ = −sinθ₀cosθ₀ω² ∂θ and x⃛ = −cos²θ₀ω² ẋ
        s = CurveSample.from_source(SPHERE, MetricParams(1.0, 0.0, 3.0),
                                    _latitude_source(theta0, omega), (0.0, 1.0), 64)
        rep = circle_check(SPHERE, s)
        assert rep.is_circle
        assert rep.K == pytest.approx(math.sin(theta0) * math.cos(theta0) * omega**2, rel=1e-7)
        assert rep.K_prime == pytest.approx(-(math.cos(theta0) * omega) ** 2, rel=1e-6)

    def test_geodesic_is_not_a_circle(self):
        s = fixture_sample("timelike-geodesic")
        rep = circle_check(s.surface, s)
        assert not rep.is_circle and rep.eps_prime == 0

    def test_nonconstant_speed(self):
        s = fixture_sample("oblique-nonconstant-speed")
        with pytest.raises(NonConstantSpeed):
            circle_check(s.surface, s)


class TestParallelTransport:
    THETA0 = math.pi / 3

    def _closed_form(self, t):
        # transported unit vector rotates by −cosθ₀·t against the orthonormal frame
        _, V = _latitude_source(self.THETA0, 1.0, psi0=0.4, rate=-math.cos(self.THETA0))(t)
        return V

    def _path(self):
        th = self.THETA0
        return BasePath(lambda t: np.stack(np.broadcast_arrays(np.full_like(np.asarray(t, float), th),
                                                               np.asarray(t, float)), -1),
                        lambda t: np.stack(np.broadcast_arrays(np.zeros_like(np.asarray(t, float)),
                                                               np.ones_like(np.asarray(t, float))), -1))

    def test_rk4_matches_holonomy(self):
        t = np.linspace(0.0, 2 * math.pi, 2001)
        exact = self._closed_form(t)
        V = parallel_transport(SPHERE, self._path(), t, exact[0])
        assert np.max(np.abs(V - exact)) < 1e-10

    def test_rk4_order(self):
        errs = []
        for n in (101, 201):
            t = np.linspace(0.0, 2 * math.pi, n)
            V = parallel_transport(SPHERE, self._path(), t, self._closed_form(t[0]))
            errs.append(np.max(np.abs(V[-1] - self._closed_form(t[-1]))))
        assert 12 < errs[0] / errs[1] < 20, f"error ratio {errs[0] / errs[1]:.2f}"

    def test_dense_transport(self):
        field = TransportedField(SPHERE, self._path(), 1.0, self._closed_form(1.0), (0.0, 3.0))
        t = np.linspace(0.0, 3.0, 31)
        assert np.max(np.abs(field(t) - self._closed_form(t))) < 1e-10

    def test_unit_length_preserved(self):
        t = np.linspace(0.0, 2 * math.pi, 401)
        V = parallel_transport(SPHERE, self._path(), t, self._closed_form(0.0))
        x = self._path().pos(t)
        assert np.max(np.abs(inner(SPHERE.metric(x), V, V) - 1.0)) < 1e-8

"""Levi-Civita connection of (T₁M, G̃) and derivatives of curves λ = (x, V).

The connection formulas hold on the standing setting of the theory, where the
base curvature satisfies κ = (a+c)/a.  Along a curve, horizontal and tangential
fields are built from base fields, so ∇̃ reduces to base covariant derivatives
plus the algebraic terms returned by :func:`nabla_tilde`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChartExit, InvalidCase, PointOutsideChart, StepUnstable
from .gnat import MetricParams, T1Vec, UnitTangentPoint, frame_norm, g_tilde, tangential_lift
from .surfaces import SurfaceModel, contract_gamma, inner


def _s(k):
    return np.asarray(k, dtype=float)[..., None]


def nabla_tilde(params: MetricParams, pt: UnitTangentPoint, case: str, X, Y, DXY=None) -> T1Vec:
    """One of ∇̃_{X^h}Y^h, ∇̃_{X^h}Y^t, ∇̃_{X^t}Y^h, ∇̃_{X^t}Y^t.

    ``DXY`` is the base covariant derivative ∇_X Y; only the hh and ht cases use it.
    """
    a, ac, d, ph = params.a, params.a + params.c, params.d, params.phi
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    u = pt.u
    Xu, Yu, XY = pt.dot(X, u), pt.dot(Y, u), pt.dot(X, Y)
    zero = np.zeros(np.broadcast_shapes(X.shape, Y.shape, u.shape))
    if case in ("hh", "ht"):
        if DXY is None:
            raise InvalidCase(f"case {case} needs the base derivative ∇_X Y")
        DXY = np.asarray(DXY, dtype=float)
    if case == "hh":
        tang = _s(-ph / (2 * a) * Yu) * X + _s((ac - d) / (2 * a) * Xu) * Y
        return T1Vec(DXY + zero, tangential_lift(tang, pt))
    if case in ("ht", "th"):
        lin = Xu if case == "ht" else Yu
        other = Y if case == "ht" else X
        horiz = (_s((d - ac) / (2 * ac) * lin) * other + _s(0.5 * XY) * u
                 - _s(d / (2 * ac) * Xu * Yu) * u)
        if case == "ht":
            return T1Vec(horiz, tangential_lift(DXY + zero, pt))
        return T1Vec(horiz, zero)
    if case == "tt":
        return T1Vec(zero, tangential_lift(_s(-Yu) * X, pt))
    raise InvalidCase(f"unknown case {case!r}; expected hh, ht, th or tt")


def along_curve(params: MetricParams, pt: UnitTangentPoint, xd, Vd, A: T1Vec,
                DA_h, DA_t) -> T1Vec:
    """∇̃_{λ'} A for A = A_h^h + A_t^t along λ, given base derivatives ∇_ẋ A_h, ∇_ẋ A_t.

    λ' = ẋ^h + V̇^t, and the tangential lift is linear over functions, so the
    result is the sum of the four cases evaluated on the component fields.
    """
    return (nabla_tilde(params, pt, "hh", xd, A.horiz, DA_h)
            + nabla_tilde(params, pt, "th", Vd, A.horiz)
            + nabla_tilde(params, pt, "ht", xd, A.tang, DA_t)
            + nabla_tilde(params, pt, "tt", Vd, A.tang))


@dataclass(frozen=True)
class CurveDerivatives:
    """Base data of λ = (x, V) at one or many parameter values.

    ``xdd`` = ∇_ẋ ẋ, ``xddd`` = ∇_ẋ ẍ, ``Vd`` = ∇_ẋ V, ``Vdd`` = ∇_ẋ V̇, ``Vddd`` = ∇_ẋ V̈.
    """

    x: np.ndarray
    xd: np.ndarray
    xdd: np.ndarray
    xddd: np.ndarray
    V: np.ndarray
    Vd: np.ndarray
    Vdd: np.ndarray
    Vddd: np.ndarray

    def point(self, surface: SurfaceModel, tol: float = 1e-8) -> UnitTangentPoint:
        return UnitTangentPoint.at(surface, self.x, self.V, tol=tol)

    def __getitem__(self, idx) -> "CurveDerivatives":
        return CurveDerivatives(*(getattr(self, f)[idx] for f in self.__dataclass_fields__))


def velocity(derivs: CurveDerivatives) -> T1Vec:
    """λ' = ẋ^h + (∇_ẋ V)^t."""
    return T1Vec(derivs.xd, derivs.Vd)


def _pt(surface, derivs) -> UnitTangentPoint:
    g = surface.metric(derivs.x)
    return UnitTangentPoint(derivs.x, derivs.V, g)


def curve_acceleration(params: MetricParams, surface: SurfaceModel,
                       derivs: CurveDerivatives) -> T1Vec:
    """λ'' = ∇̃_{λ'}λ' in closed form (valid for any curve with g(V, V) = 1)."""
    pt = _pt(surface, derivs)
    a, ac, d = params.a, params.a + params.c, params.d
    xV, xVd = pt.dot(derivs.xd, derivs.V), pt.dot(derivs.xd, derivs.Vd)
    horiz = derivs.xdd + _s((d - ac) / ac * xV) * derivs.Vd + _s(xVd) * derivs.V
    tang = tangential_lift(derivs.Vdd - _s(d / a * xV) * derivs.xd, pt)
    return T1Vec(horiz, tang)


def curve_jerk(params: MetricParams, surface: SurfaceModel, derivs: CurveDerivatives) -> T1Vec:
    """λ⁽³⁾ = ∇̃_{λ'}λ'' for an arbitrary curve.

    Writes λ'' = H^h + T^t with base fields H, T, differentiates them along x
    with the product rule, and applies :func:`along_curve`.
    """
    pt = _pt(surface, derivs)
    a, ac, d = params.a, params.a + params.c, params.d
    k1 = (d - ac) / ac
    dot = pt.dot
    xd, xdd, xddd = derivs.xd, derivs.xdd, derivs.xddd
    V, Vd, Vdd, Vddd = derivs.V, derivs.Vd, derivs.Vdd, derivs.Vddd

    xV, xVd = dot(xd, V), dot(xd, Vd)
    xV_dot = dot(xdd, V) + xVd
    xVd_dot = dot(xdd, Vd) + dot(xd, Vdd)
    H = xdd + _s(k1 * xV) * Vd + _s(xVd) * V
    DH = xddd + _s(k1 * xV_dot) * Vd + _s(k1 * xV) * Vdd + _s(xVd_dot) * V + _s(xVd) * Vd

    VddV = dot(Vdd, V)
    T = Vdd - _s(VddV) * V - _s(d / a) * (_s(xV) * xd - _s(xV**2) * V)
    DT = (Vddd - _s(dot(Vddd, V) + dot(Vdd, Vd)) * V - _s(VddV) * Vd
          - _s(d / a) * (_s(xV_dot) * xd + _s(xV) * xdd
                         - _s(2 * xV * xV_dot) * V - _s(xV**2) * Vd))
    return along_curve(params, pt, xd, Vd, T1Vec(H, T), DH, DT)


def helix_jerk_formula(params: MetricParams, surface: SurfaceModel,
                       derivs: CurveDerivatives) -> T1Vec:
    """λ⁽³⁾ in the closed form obtained when g(ẋ, V) is constant.

    θ is read as ε√|φ| g(ẋ, V) at each sample.  Agrees with :func:`curve_jerk`
    on helices; on other curves the two differ by terms in d/dt g(ẋ, V).
    """
    pt = _pt(surface, derivs)
    a, ac, d = params.a, params.a + params.c, params.d
    al, ph, eps, sq = params.alpha, abs(params.phi), params.eps, params.sqrt_abs_phi
    dot = pt.dot
    xd, xdd, xddd = derivs.xd, derivs.xdd, derivs.xddd
    V, Vd, Vdd, Vddd = derivs.V, derivs.Vd, derivs.Vdd, derivs.Vddd
    th = eps * sq * dot(xd, V)
    xVd = dot(xd, Vd)
    dxVd = dot(xdd, Vd) + dot(xd, Vdd)

    coef_V = (1.5 * dxVd - eps * d * th / (2 * a * sq) * dot(xd, xd)
              + eps * (2 * d - ac) / (2 * ac * sq) * th * dot(Vd, Vd)
              + eps * d**2 * th**3 / (2 * al * ph * sq))
    horiz = (xddd - _s(d * (d - ac) / (2 * al * ph) * th**2) * xd
             + _s(3 * eps * (d - ac) / (2 * ac * sq) * th) * Vdd
             + _s(xVd) * Vd + _s(coef_V) * V)
    tang = (_s(eps * (ac - 3 * d) / (2 * a * sq) * th) * xdd + Vddd
            + _s(eps * (ac - d) / (2 * a * sq) * th * xVd) * V
            - _s(dot(Vdd, V) + ((ac - d) ** 2 - 2 * ac * d) / (2 * al * ph) * th**2) * Vd)
    return T1Vec(horiz, tangential_lift(tang, pt))


def geodesic_residual(params: MetricParams, surface: SurfaceModel, derivs: CurveDerivatives):
    """Frame norm of λ''; zero exactly on T₁M geodesics."""
    return frame_norm(params, _pt(surface, derivs), curve_acceleration(params, surface, derivs))


def geodesic_system_residual(params: MetricParams, surface: SurfaceModel,
                             derivs: CurveDerivatives):
    """Base-level residuals of the reduced geodesic system for helices (θ read per sample).

    Returns the two vectors ẍ − ε(a+c−d)θV̇/((a+c)√|φ|) + g(V̇, ẋ)V and the part of
    V̈ − εdθẋ/(a√|φ|) tangent to the unit circle, whose vanishing characterises
    geodesics with g(V, V̇) = 0.  The projection matters when ẋ has a component
    along V, as for the geodesic flow V = ẋ.
    """
    g = surface.metric(derivs.x)
    a, ac, d = params.a, params.a + params.c, params.d
    eps, sq = params.eps, params.sqrt_abs_phi
    th = eps * sq * inner(g, derivs.xd, derivs.V)
    r1 = (derivs.xdd - _s(eps * (ac - d) / (ac * sq) * th) * derivs.Vd
          + _s(inner(g, derivs.Vd, derivs.xd)) * derivs.V)
    pt = UnitTangentPoint(derivs.x, derivs.V, g)
    r2 = tangential_lift(derivs.Vdd - _s(eps * d / (a * sq) * th) * derivs.xd, pt)
    return r1, r2


# -- geodesic integration ------------------------------------------------------------


@dataclass(frozen=True)
class GeodesicSolution:
    """RK4 samples of (x, ẋ, V, ∇_ẋ V) on a uniform grid."""

    t: np.ndarray
    x: np.ndarray
    xd: np.ndarray
    V: np.ndarray
    Vd: np.ndarray


def _geodesic_rhs(params: MetricParams, surface: SurfaceModel, y):
    x, xd, V, W = y[0:2], y[2:4], y[4:6], y[6:8]
    g = surface.metric(x)
    gam = surface.christoffels(x)
    ac, a, d = params.a + params.c, params.a, params.d
    xV = inner(g, xd, V)
    acc_cov = -(d - ac) / ac * xV * W - inner(g, xd, W) * V
    perp = xd - xV * V
    Vdd_cov = d / a * xV * perp - inner(g, W, W) * V
    return np.concatenate([
        xd,
        acc_cov - contract_gamma(gam, xd, xd),
        W - contract_gamma(gam, xd, V),
        Vdd_cov - contract_gamma(gam, xd, W),
    ])


def _project(surface: SurfaceModel, y):
    x, V, W = y[0:2], y[4:6], y[6:8]
    g = surface.metric(x)
    V = V / np.sqrt(inner(g, V, V))
    W = W - inner(g, W, V) * V
    return np.concatenate([x, y[2:4], V, W])


def integrate_t1_geodesic(params: MetricParams, surface: SurfaceModel, init, t_span,
                          step: float = 1e-3, renormalize: bool = True) -> GeodesicSolution:
    """Fixed-step RK4 for ∇̃_{λ'}λ' = 0 written as a first-order system in chart coordinates.

    ``init`` = (x₀, ẋ₀, V₀, V̇₀) with V̇₀ = ∇_ẋV at t₀.  The system is
    ∇_ẋẋ = −((d−(a+c))/(a+c)) g(ẋ,V) V̇ − g(ẋ,V̇) V and
    ∇_ẋV̇ = (d/a) g(ẋ,V)(ẋ − g(ẋ,V)V) − g(V̇,V̇) V.
    """
    params.require_nondegenerate()
    t0, t1 = map(float, t_span)
    n = int(round((t1 - t0) / step))
    if n < 1:
        raise ValueError("t_span must contain at least one step")
    h = (t1 - t0) / n
    y = np.concatenate([np.asarray(v, dtype=float) for v in init])
    g0 = surface.metric(y[0:2])
    if abs(inner(g0, y[4:6], y[4:6]) - 1) > 1e-8 or abs(inner(g0, y[4:6], y[6:8])) > 1e-8:
        raise ValueError("initial data must satisfy g(V,V) = 1 and g(V, V̇) = 0")
    out = np.empty((n + 1, 8))
    out[0] = y
    f = lambda z: _geodesic_rhs(params, surface, z)  # noqa: E731
    for i in range(n):
        try:
            k1 = f(y)
            k2 = f(y + 0.5 * h * k1)
            k3 = f(y + 0.5 * h * k2)
            k4 = f(y + h * k3)
            y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(y)):
                raise StepUnstable(f"non-finite state at step {i + 1}")
            if renormalize:
                y = _project(surface, y)
        except PointOutsideChart as exc:
            raise ChartExit(f"trajectory left the chart near t={t0 + i * h:.6g}: {exc}") from exc
        out[i + 1] = y
    t = t0 + h * np.arange(n + 1)
    return GeodesicSolution(t, out[:, 0:2], out[:, 2:4], out[:, 4:6], out[:, 6:8])


def speed_squared(params: MetricParams, surface: SurfaceModel, derivs: CurveDerivatives):
    """G̃(λ', λ') = (a+c) g(ẋ,ẋ) + d g(ẋ,V)² + a g(V̇,V̇)."""
    pt = _pt(surface, derivs)
    lam1 = velocity(derivs)
    return g_tilde(params, pt, lam1, lam1)

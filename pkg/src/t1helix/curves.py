"""Curves λ = (x, V) on T₁M: construction, sampling, reparametrization, analysis.

A curve is sampled either from a closed-form source t ↦ (x(t), V(t)) or from a
table on a uniform grid.  Derivatives use 5-point central differences.  With a
closed-form source every grid point gets its own stencil of 17 evaluations
spaced by ``fd_step``, which is enough for four nested derivatives and loses no
samples at the window ends.  Tables are differentiated along the grid itself;
each derivative level marks two more samples at either end as NaN.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_simpson, solve_ivp
from scipy.interpolate import PchipInterpolator, make_interp_spline

from .connection import CurveDerivatives, along_curve, velocity
from .errors import (CausalTypeChanges, ChartExit, NonConstantSpeed, NotNull, NullCurve,
                     NullGeodesic, PointOutsideChart, UnknownFixture)
from .gnat import MetricParams, T1Vec, UnitTangentPoint, g_tilde
from .surfaces import SurfaceKind, SurfaceModel, contract_gamma, inner

FD_STEP = 5e-3
STENCIL_HALF = 8
CAUSAL_ZERO = 1e-9
CONSTANCY_TOL = 1e-6
EDGE = 2


class Family(str, Enum):
    VERTICAL = "Vertical"
    HORIZONTAL = "HorizontalLift"
    OBLIQUE = "Oblique"
    GEODESIC = "T1Geodesic"
    CUSTOM = "Custom"


def relative_spread(values, floor: float = 1e-12) -> float:
    """std / max(|mean|, floor) over the finite entries."""
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v)]
    if v.size == 0:
        return math.inf
    return float(np.std(v)) / max(abs(float(np.mean(v))), floor)


def is_constant(values, tol: float = CONSTANCY_TOL, floor: float = 1e-12) -> bool:
    """Constancy detector: std / max(|mean|, floor) < tol."""
    return relative_spread(values, floor) < tol


def base_norm(g, X):
    """Positive-definite size of a base vector: √(Xᵀ|g|X) with |g| from the eigen-decomposition."""
    w, Q = np.linalg.eigh(g)
    absg = np.einsum("...ij,...j,...kj->...ik", Q, np.abs(w), Q)
    return np.sqrt(np.abs(inner(absg, X, X)))


# -- curve descriptions -----------------------------------------------------------------


@dataclass(frozen=True)
class BasePath:
    """Base curve x(t) in chart coordinates, with optional closed-form velocity."""

    pos: Callable
    vel: Callable | None = None

    def velocity(self, t):
        if self.vel is not None:
            return self.vel(t)
        h = 1e-4
        t = np.asarray(t, dtype=float)
        return (self.pos(t - 2 * h) - 8 * self.pos(t - h) + 8 * self.pos(t + h)
                - self.pos(t + 2 * h)) / (12 * h)


@dataclass(frozen=True)
class FiberRule:
    """How V is obtained along the base path.

    kind: ``oblique`` (V = sign·ẋ/√σ), ``parallel`` (transport of ``seed`` from the
    window start, or the closed form ``fn`` when given), ``explicit`` (``fn``).
    """

    kind: str
    sign: float = 1.0
    seed: tuple | None = None
    fn: Callable | None = None


@dataclass(frozen=True)
class CurveSpec:
    name: str
    family: Family
    surface: SurfaceModel
    params: MetricParams
    base: BasePath
    fiber: FiberRule
    window: tuple[float, float]
    samples: int = 256
    fd_step: float = FD_STEP
    period: float | None = None
    notes: str = ""

    def __post_init__(self):
        if self.samples < 64:
            raise ValueError(f"need at least 64 samples, got {self.samples}")
        if not self.window[1] > self.window[0]:
            raise ValueError(f"empty window {self.window}")


def _oblique_field(surface: SurfaceModel, base: BasePath, sign: float):
    def V(t):
        x, v = base.pos(t), base.velocity(t)
        sig = inner(surface.metric(x), v, v)
        if np.any(sig <= 0):
            raise ValueError("oblique fiber rule needs a spacelike base velocity")
        return sign * v / np.sqrt(sig)[..., None]
    return V


class TransportedField:
    """Parallel transport of a seed vector along a closed-form base path.

    The transport ODE dV/dt = −Γ(ẋ, V) is solved once with a high-order adaptive
    integrator and evaluated through its dense output.
    """

    def __init__(self, surface: SurfaceModel, base: BasePath, t0: float, seed, span):
        self.surface, self.base = surface, base
        lo, hi = span

        def rhs(t, y):
            x = base.pos(np.array(t))
            return -contract_gamma(surface.christoffels(x), base.velocity(np.array(t)), y)

        kw = dict(method="DOP853", rtol=1e-13, atol=1e-14, dense_output=True)
        seed = np.asarray(seed, dtype=float)
        self._fwd = solve_ivp(rhs, (t0, hi), seed, **kw) if hi > t0 else None
        self._bwd = solve_ivp(rhs, (t0, lo), seed, **kw) if lo < t0 else None
        self.t0, self.seed = t0, seed

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        flat = t.reshape(-1)
        out = np.empty(flat.shape + (2,))
        for i, ti in enumerate(flat):
            if ti >= self.t0:
                out[i] = self._fwd.sol(ti) if self._fwd is not None else self.seed
            else:
                out[i] = self._bwd.sol(ti)
        return out.reshape(t.shape + (2,))


def fiber_field(spec: CurveSpec) -> Callable:
    rule = spec.fiber
    if rule.kind == "oblique":
        return _oblique_field(spec.surface, spec.base, rule.sign)
    if rule.fn is not None and rule.kind in ("parallel", "explicit"):
        return rule.fn
    if rule.kind == "parallel":
        if rule.seed is None:
            raise ValueError("parallel fiber rule needs a seed vector")
        margin = (STENCIL_HALF + 2) * spec.fd_step
        span = (spec.window[0] - margin, spec.window[1] + margin)
        return TransportedField(spec.surface, spec.base, spec.window[0], rule.seed, span)
    raise ValueError(f"unknown fiber rule {rule.kind!r}")


# -- sampled curves ----------------------------------------------------------------------


def _d(a, h):
    out = np.full_like(a, np.nan)
    out[:, 2:-2] = (a[:, :-4] - 8 * a[:, 1:-3] + 8 * a[:, 3:-1] - a[:, 4:]) / (12 * h)
    return out


class CurveSample:
    """A sampled curve with cached covariant derivatives.

    Attributes ``t``, ``x``, ``V`` and ``derivs`` refer to the nominal grid.  The
    private layout arrays have shape (B, L, ...) and are differentiated along
    axis 1; ``_center`` extracts grid values from them.
    """

    def __init__(self, surface: SurfaceModel, params: MetricParams, t, x_layout, V_layout,
                 h: float, mode: str, family: Family = Family.CUSTOM, source=None,
                 meta: dict | None = None):
        self.surface, self.params = surface, params
        self.t = np.asarray(t, dtype=float)
        self.h, self.mode, self.family = h, mode, Family(family)
        self.source = source
        self.meta = dict(meta or {})
        self._xL = np.asarray(x_layout, dtype=float)
        self._VL = np.asarray(V_layout, dtype=float)
        self._build()

    # construction helpers

    @classmethod
    def from_source(cls, surface, params, source, window, n, fd_step=FD_STEP,
                    family=Family.CUSTOM, meta=None) -> "CurveSample":
        t = np.linspace(window[0], window[1], n)
        offs = fd_step * np.arange(-STENCIL_HALF, STENCIL_HALF + 1)
        tt = t[:, None] + offs[None, :]
        x, V = source(tt)
        return cls(surface, params, t, x, V, fd_step, "stencil", family, source, meta)

    @classmethod
    def from_table(cls, surface, params, t, x, V, family=Family.CUSTOM, meta=None) -> "CurveSample":
        t = np.asarray(t, dtype=float)
        h = t[1] - t[0]
        if not np.allclose(np.diff(t), h, rtol=1e-9, atol=0):
            raise ValueError("table samples must be uniform in t")
        return cls(surface, params, t, np.asarray(x)[None], np.asarray(V)[None], h, "grid",
                   family, None, meta)

    def _center(self, a):
        if self.mode == "stencil":
            return a[:, STENCIL_HALF]
        return a[0]

    def _build(self):
        try:
            g = self.surface.metric(self._xL)
            gam = self.surface.christoffels(self._xL)
        except PointOutsideChart as exc:
            raise ChartExit(str(exc)) from exc
        h = self.h
        xd = _d(self._xL, h)
        self._gL, self._gamL, self._xdL = g, gam, xd
        cov = self.cov
        Vd = cov(self._VL)
        xdd = cov(xd)
        Vdd = cov(Vd)
        self.layout = CurveDerivatives(self._xL, xd, xdd, cov(xdd), self._VL, Vd, Vdd, cov(Vdd))
        self.derivs = CurveDerivatives(*(self._center(getattr(self.layout, f))
                                         for f in CurveDerivatives.__dataclass_fields__))
        self.g = self._center(g)

    def cov(self, W):
        """Base covariant derivative ∇_ẋ W of a layout field."""
        return _d(W, self.h) + contract_gamma(self._gamL, self._xdL, W)

    def ddt(self, f):
        """Plain derivative of a layout scalar or array, returned on the grid."""
        return self._center(_d(np.asarray(f, dtype=float), self.h))

    def nabla(self, A: T1Vec) -> T1Vec:
        """∇̃_{λ'} A of a layout field A, returned on the grid (finite-difference route)."""
        L = self.layout
        pt = UnitTangentPoint(L.x, L.V, self._gL)
        out = along_curve(self.params, pt, L.xd, L.Vd, A, self.cov(A.horiz), self.cov(A.tang))
        return T1Vec(self._center(out.horiz), self._center(out.tang))

    # grid quantities

    @property
    def x(self):
        return self.derivs.x

    @property
    def V(self):
        return self.derivs.V

    @property
    def n(self) -> int:
        return self.t.size

    @property
    def point(self) -> UnitTangentPoint:
        return UnitTangentPoint(self.derivs.x, self.derivs.V, self.g)

    @property
    def layout_point(self) -> UnitTangentPoint:
        return UnitTangentPoint(self.layout.x, self.layout.V, self._gL)

    @property
    def core(self) -> np.ndarray:
        """Indices used for statistics: finite third derivatives, two samples trimmed each end."""
        ok = np.all(np.isfinite(self.derivs.Vddd), axis=-1) & np.all(
            np.isfinite(self.derivs.xddd), axis=-1)
        ok[:EDGE] = False
        ok[-EDGE:] = False
        return np.nonzero(ok)[0]

    @property
    def sigma(self):
        return inner(self.g, self.derivs.xd, self.derivs.xd)

    @property
    def speed2(self):
        """G̃(λ', λ') per sample."""
        v = velocity(self.derivs)
        return g_tilde(self.params, self.point, v, v)

    @property
    def unit_defect(self):
        return np.abs(inner(self.g, self.V, self.V) - 1.0)

    def with_params(self, params: MetricParams) -> "CurveSample":
        return CurveSample(self.surface, params, self.t, self._xL, self._VL, self.h, self.mode,
                           self.family, self.source, self.meta)

    def evaluate(self, tt):
        """(x, V) at arbitrary parameters; needs a closed-form source."""
        if self.source is None:
            raise ValueError("table samples cannot be re-evaluated")
        return self.source(tt)


def build_sample(spec: CurveSpec, params: MetricParams | None = None) -> CurveSample:
    params = spec.params if params is None else params
    Vf = fiber_field(spec)
    base = spec.base

    def source(tt):
        return base.pos(tt), Vf(tt)

    meta = {"fixture": spec.name, "fiber": spec.fiber.kind, "period": spec.period}
    sample = CurveSample.from_source(spec.surface, params, source, spec.window, spec.samples,
                                     spec.fd_step, spec.family, meta)
    if spec.fiber.kind == "oblique" and np.max(sample.unit_defect) > 1e-10:
        raise ValueError("oblique fiber is not unit length")
    return sample


# -- causal character and reparametrization ------------------------------------------------


def causal_character(params: MetricParams, sample: CurveSample, t: float | None = None):
    """Sign of G̃(λ', λ') per sample (or at the grid point nearest t); |value| < 1e−9 maps to 0."""
    s2 = sample.with_params(params).speed2 if params != sample.params else sample.speed2
    # samples without a derivative (table edges) report 0
    sign = np.where(np.abs(np.nan_to_num(s2)) < CAUSAL_ZERO, 0, np.sign(np.nan_to_num(s2))).astype(int)
    if t is None:
        return sign
    return int(sign[int(np.argmin(np.abs(sample.t - t)))])


def _inverse_map(t, s, constant: bool):
    """t(s) from samples of a monotone s(t)."""
    if constant:
        rate = (s[-1] - s[0]) / (t[-1] - t[0])
        return lambda q: t[0] + (np.asarray(q) - s[0]) / rate
    return PchipInterpolator(s, t, extrapolate=True)


def _reparam(sample: CurveSample, weight_fn, label: str) -> CurveSample:
    t = sample.t
    if sample.source is not None:
        fine = np.linspace(t[0], t[-1], 8 * (t.size - 1) + 1)
        probe = CurveSample.from_source(sample.surface, sample.params, sample.source,
                                        (t[0], t[-1]), fine.size, sample.h, sample.family)
        w = weight_fn(probe)
    else:
        fine, w = t, weight_fn(sample)
        keep = np.isfinite(w)
        fine, w = fine[keep], w[keep]
    constant = is_constant(w, 1e-12)
    if sample.source is not None and not constant:
        # degree-7 splines keep t(s) smooth enough for the third-derivative stencil
        S = make_interp_spline(fine, w, k=7).antiderivative()
        s = S(fine) - S(fine[0])
        inv = make_interp_spline(s, fine, k=7)
    else:
        s = cumulative_simpson(w, x=fine, initial=0.0)
        inv = _inverse_map(fine, s, constant)
    s_grid = np.linspace(0.0, s[-1], t.size)
    meta = dict(sample.meta, reparam=label, scale=float(s[-1] / (fine[-1] - fine[0])))
    if sample.source is not None:
        src = sample.source

        def source(ss):
            return src(inv(ss))
        return CurveSample.from_source(sample.surface, sample.params, source,
                                       (0.0, float(s[-1])), t.size, sample.h, sample.family, meta)
    tq = inv(s_grid)
    x = PchipInterpolator(t, sample.x)(tq)
    V = PchipInterpolator(t, sample.V)(tq)
    V = V / np.sqrt(inner(sample.surface.metric(x), V, V))[..., None]
    return CurveSample.from_table(sample.surface, sample.params, s_grid, x, V, sample.family, meta)


def arclength_reparam(params: MetricParams, sample: CurveSample) -> CurveSample:
    """Resample with |G̃(λ', λ')| = 1 on a uniform grid in arc length."""
    if params != sample.params:
        sample = sample.with_params(params)
    sign = causal_character(params, sample)[sample.core]
    if np.any(sign == 0):
        raise NullCurve("curve has null samples; use the pseudo-arc parameter")
    if np.unique(sign).size > 1:
        raise CausalTypeChanges("causal character changes along the window")
    return _reparam(sample, lambda c: np.sqrt(np.abs(c.speed2)), "arclength")


def acceleration_square(sample: CurveSample):
    from .connection import curve_acceleration
    acc = curve_acceleration(sample.params, sample.surface, sample.derivs)
    return g_tilde(sample.params, sample.point, acc, acc)


def pseudo_arc_reparam(params: MetricParams, sample: CurveSample) -> CurveSample:
    """Resample so that G̃(λ'', λ'') = 1, using dp/dt = G̃(λ'', λ'')^{1/4}."""
    if params != sample.params:
        sample = sample.with_params(params)
    core = sample.core
    s2 = sample.speed2[core]
    scale = max(1.0, float(np.max(np.abs(velocity(sample.derivs).horiz[core]))))
    if np.max(np.abs(s2)) > 1e-8 * scale**2:
        raise NotNull(f"max |G̃(λ',λ')| = {np.max(np.abs(s2)):.3e}")
    a2 = acceleration_square(sample)[core]
    if np.min(a2) <= 1e-9:
        kind = "timelike" if np.min(a2) < -1e-9 else "lightlike or zero"
        raise NullGeodesic(f"acceleration is {kind} (min G̃(λ'',λ'') = {np.min(a2):.3e})")
    return _reparam(sample, lambda c: np.abs(acceleration_square(c)) ** 0.25, "pseudo-arc")


# -- base-curve analysis -----------------------------------------------------------------------


def parallel_transport(surface: SurfaceModel, path: BasePath, t_grid, v0) -> np.ndarray:
    """Classical RK4 for dV/dt = −Γ(ẋ, V) on the given uniform grid."""
    t_grid = np.asarray(t_grid, dtype=float)
    V = np.empty((t_grid.size, 2))
    V[0] = v0

    def f(t, y):
        try:
            x = path.pos(np.array(t))
            return -contract_gamma(surface.christoffels(x), path.velocity(np.array(t)), y)
        except PointOutsideChart as exc:
            raise ChartExit(str(exc)) from exc

    for i in range(t_grid.size - 1):
        t, h, y = t_grid[i], t_grid[i + 1] - t_grid[i], V[i]
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h / 2 * k1)
        k3 = f(t + h / 2, y + h / 2 * k2)
        k4 = f(t + h, y + h * k3)
        V[i + 1] = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return V


@dataclass(frozen=True)
class CircleReport:
    is_circle: bool
    K: float
    eps_prime: int
    K_prime: float
    sigma: float
    residual: float


def circle_check(surface: SurfaceModel, sample: CurveSample, tol: float = CONSTANCY_TOL) -> CircleReport:
    """Decide whether the base curve is a pseudo-Riemannian circle."""
    core = sample.core
    D = sample.derivs[core]
    g = sample.g[core]
    sig = inner(g, D.xd, D.xd)
    if not is_constant(sig, tol):
        raise NonConstantSpeed("base curve does not have constant speed")
    acc2 = inner(g, D.xdd, D.xdd)
    mean_acc2 = float(np.mean(acc2))
    K = math.sqrt(abs(mean_acc2))
    Kp = float(np.mean(inner(g, D.xddd, D.xd) / sig))
    res = float(np.max(base_norm(g, D.xddd - Kp * D.xd)))
    scale = max(1.0, float(np.max(base_norm(g, D.xddd))))
    nonzero = K > 1e-6 * max(1.0, float(np.mean(np.abs(sig))))
    is_circle = bool(nonzero and is_constant(acc2, tol) and res < 1e-5 * scale)
    return CircleReport(is_circle, K, int(np.sign(mean_acc2)) if nonzero else 0, Kp,
                        float(np.mean(sig)), res)


# -- fixtures --------------------------------------------------------------------------------


def _ambient_path(surface: SurfaceModel, X, Xd):
    """Chart-coordinate path from ambient closed forms X(t), Ẋ(t)."""
    def pos(t):
        return surface.chart_coords(X(np.asarray(t, dtype=float)))

    def vel(t):
        t = np.asarray(t, dtype=float)
        return surface.chart_vector(pos(t), Xd(t))
    return BasePath(pos, vel)


def _ambient_field(surface: SurfaceModel, path: BasePath, Vamb):
    def V(t):
        t = np.asarray(t, dtype=float)
        return surface.chart_vector(path.pos(t), Vamb(t))
    return V


def _stack(*cols):
    return np.stack(np.broadcast_arrays(*cols), axis=-1)


def _latitude(theta0: float, omega: float, phi0: float = 0.0) -> BasePath:
    return BasePath(lambda t: _stack(np.full_like(np.asarray(t, float), theta0), phi0 + omega * np.asarray(t, float)),
                    lambda t: _stack(np.zeros_like(np.asarray(t, float)), np.full_like(np.asarray(t, float), omega)))


def _constant_field(v):
    v = np.asarray(v, dtype=float)
    return lambda t: np.broadcast_to(v, np.shape(t) + (2,)).copy()


def _fig1(args):
    surface = SurfaceModel(SurfaceKind.ANTIDESITTER, 1.0)
    path = _ambient_path(surface, lambda t: _stack(np.sinh(t), np.cosh(t), 0 * t),
                         lambda t: _stack(np.cosh(t), np.sinh(t), 0 * t))
    return CurveSpec("fig1-timelike", Family.GEODESIC, surface, MetricParams(1.0, -2.0, 5.0),
                     path, FiberRule("oblique", 1.0), (-1.0, 1.0), 201,
                     notes="timelike geodesic of the de Sitter point set, metric reversed so V = ẋ is unit")


def _lightlike(args):
    delta = float(args[0]) if args else 1.0
    beta = float(args[1]) if len(args) > 1 else 0.0
    surface = SurfaceModel(SurfaceKind.DESITTER, 1.0)
    path = _ambient_path(surface, lambda t: _stack(delta * t, 1 + 0 * t, delta * t),
                         lambda t: _stack(delta + 0 * t, 0 * t, delta + 0 * t))
    x0 = np.array([0.0, 1.0, 0.0])
    k = np.array([delta, 0.0, delta])
    v = np.array([np.sinh(beta), 0.0, np.cosh(beta)])
    c = float(np.sum(surface.ambient_metric * v * k))

    def Vamb(t):
        t = np.asarray(t, dtype=float)[..., None]
        return v - c * (t * x0 + 0.5 * t**2 * k)

    return CurveSpec(f"lightlike-geodesic({delta:g})", Family.HORIZONTAL, surface,
                     MetricParams(1.0, 0.0, 0.0), path,
                     FiberRule("parallel", fn=_ambient_field(surface, path, Vamb)), (-1.0, 1.0), 201)


def _timelike(args):
    delta = float(args[0]) if args else 0.0
    r = math.sqrt(1 + delta**2)
    surface = SurfaceModel(SurfaceKind.DESITTER, 1.0)
    path = _ambient_path(surface, lambda t: _stack(r * np.sinh(t), np.cosh(t), delta * np.sinh(t)),
                         lambda t: _stack(r * np.cosh(t), np.sinh(t), delta * np.cosh(t)))
    v0 = np.array([delta, 0.0, r])
    return CurveSpec(f"timelike-geodesic({delta:g})", Family.HORIZONTAL, surface,
                     MetricParams(1.0, 0.0, 3.0), path,
                     FiberRule("parallel", fn=_ambient_field(surface, path, lambda t: np.broadcast_to(
                         v0, np.shape(t) + (3,)))), (-1.0, 1.0), 201,
                     notes="V is the constant ambient normal, parallel along the geodesic")


def _spacelike(args):
    rho = float(args[0]) if args else 2.0
    if abs(rho) <= 1:
        raise ValueError("spacelike geodesic needs |rho| > 1")
    q = math.sqrt(rho**2 - 1)
    surface = SurfaceModel(SurfaceKind.DESITTER, 1.0)
    path = _ambient_path(surface, lambda t: _stack(q * np.sin(t), np.cos(t), rho * np.sin(t)),
                         lambda t: _stack(q * np.cos(t), -np.sin(t), rho * np.cos(t)))
    return CurveSpec(f"spacelike-geodesic({rho:g})", Family.GEODESIC, surface,
                     MetricParams(1.0, 0.0, 3.0), path, FiberRule("oblique", 1.0), (-1.0, 1.0), 201,
                     notes="V = ẋ, the unit spacelike tangent (the normal seed is timelike)")


def _fig2(args):
    surface = SurfaceModel(SurfaceKind.SPHERE, 1.0)
    return CurveSpec("fig2-oblique", Family.OBLIQUE, surface, MetricParams(1.0, 0.0, 3.0),
                     _latitude(math.pi / 4, 1.0), FiberRule("oblique", 1.0), (0.0, 2 * math.pi),
                     256, period=2 * math.pi)


def _great_circle_lift(params: MetricParams, beta: float, name: str):
    """Horizontal lift of the equator with a parallel field at angle β, unit speed in T₁M."""
    surface = SurfaceModel.from_curvature(SurfaceKind.SPHERE, (params.a + params.c) / params.a)
    R = surface.radius
    s = 1.0 / math.sqrt((params.a + params.c) + params.d * math.cos(beta) ** 2)
    path = _latitude(math.pi / 2, s / R)
    V = _constant_field([math.sin(beta) / R, math.cos(beta) / R])
    return CurveSpec(name, Family.HORIZONTAL, surface, params, path, FiberRule("parallel", fn=V),
                     (0.0, 2 * math.pi * R / s), 256, period=2 * math.pi * R / s)


def _hor_helix(args):
    beta = float(args[0]) if args else math.pi / 3
    return _great_circle_lift(MetricParams(1.0, 0.0, 3.0), beta, f"horizontal-helix({beta:g})")


def _hor_helix_flat(args):
    p = MetricParams(1.0, 0.0, 3.0)
    beta = math.acos(math.sqrt((p.a + p.c) / p.d))
    return _great_circle_lift(p, beta, "horizontal-helix-untwisted")


def _obl_flat(args):
    """Oblique circle with σ = θ²/φ and θ² = φ/(2d), unit speed in T₁M (a=1, c=0, d=3)."""
    p = MetricParams(1.0, 0.0, 3.0)
    sigma = 1.0 / (2 * p.d)
    K2 = (2 * p.d - p.phi) / (4 * p.a * p.d**2)
    kg = math.sqrt(K2) / sigma
    theta0 = math.atan(1.0 / kg)  # cot θ₀ = k_g on the unit sphere
    omega = math.sqrt(sigma) / math.sin(theta0)
    surface = SurfaceModel(SurfaceKind.SPHERE, 1.0)
    return CurveSpec("oblique-untwisted", Family.OBLIQUE, surface, p, _latitude(theta0, omega),
                     FiberRule("oblique", 1.0), (0.0, 2 * math.pi / omega), 256,
                     period=2 * math.pi / omega)


def _null_oblique(args):
    p = MetricParams(-0.5, 1.5, 1.0)
    surface = SurfaceModel.from_curvature(SurfaceKind.HYPERBOLIC, (p.a + p.c) / p.a)
    R = surface.radius
    sigma = p.eps / (2 * p.d)
    # geodesic circle r = r0 with g(ẍ, ẍ) = 1: unit-speed curvature coth(r0)/R = 1/σ
    r0 = math.atanh(sigma / R)
    omega = math.sqrt(sigma) / (R * math.sinh(r0))
    return CurveSpec("null-oblique", Family.OBLIQUE, surface, p, _latitude(r0, omega),
                     FiberRule("oblique", 1.0), (0.0, 2 * math.pi / omega), 256,
                     period=2 * math.pi / omega)


def _null_horizontal(args):
    """Horizontal lift of a timelike geodesic with g(ẋ, V) = 1/(2|d|), pseudo-arc in t.

    With φ = −4α and g(ẋ, V) = 1/(2|d|), pseudo-arc normalization forces |d| = 1/2.
    """
    p = MetricParams(-0.5, 1.0, 0.5)
    surface = SurfaceModel.from_curvature(SurfaceKind.ANTIDESITTER, (p.a + p.c) / p.a)
    R = surface.radius
    q = 1.0 / (2 * abs(p.d))
    sigma = -p.d * q**2 / (p.a + p.c)
    omega = math.sqrt(-sigma) / R
    # ρ = 0 is a timelike geodesic; V = cosh β ∂ρ/R + sinh β ∂τ/R has g(ẋ, V) = −ω R sinh β
    beta = math.asinh(-q / (omega * R))
    path = BasePath(lambda t: _stack(0 * np.asarray(t, float), omega * np.asarray(t, float)),
                    lambda t: _stack(0 * np.asarray(t, float), omega + 0 * np.asarray(t, float)))
    V = _constant_field([math.cosh(beta) / R, math.sinh(beta) / R])
    return CurveSpec("null-horizontal", Family.HORIZONTAL, surface, p, path,
                     FiberRule("parallel", fn=V), (0.0, 2.0), 201)


def _kk_circle(args):
    theta0 = math.pi / 4
    surface = SurfaceModel(SurfaceKind.SPHERE, 1.0)

    def V(t):
        t = np.asarray(t, dtype=float)
        psi = math.pi / 2 - math.cos(theta0) * t
        return _stack(np.cos(psi), np.sin(psi) / math.sin(theta0))

    return CurveSpec("kk-horizontal-circle", Family.HORIZONTAL, surface, MetricParams(1.0, 0.0, 0.0),
                     _latitude(theta0, 1.0), FiberRule("parallel", fn=V), (0.0, 2 * math.pi), 256,
                     period=2 * math.pi)


def _oblique_nonconstant(args):
    """V = ẋ/√σ along a wobbling base curve: speed and geodesic curvature both vary."""
    amp = float(args[0]) if args else 0.2
    surface = SurfaceModel(SurfaceKind.SPHERE, 1.0)
    base = BasePath(lambda t: _stack(math.pi / 4 + amp * np.sin(t), np.asarray(t, float)),
                    lambda t: _stack(amp * np.cos(t), np.ones_like(np.asarray(t, float))))
    return CurveSpec("oblique-nonconstant-speed", Family.OBLIQUE, surface,
                     MetricParams(1.0, 0.0, 3.0), base, FiberRule("oblique", 1.0),
                     (0.0, 2 * math.pi), 256)


def _normal_lift_circle(args):
    """Latitude circle with V its unit normal: a Legendre geodesic of T₁M over a non-geodesic base."""
    theta0 = float(args[0]) if args else math.pi / 4
    surface = SurfaceModel(SurfaceKind.SPHERE, 1.0)
    omega = 1.0 / math.sin(theta0)
    return CurveSpec("normal-lift-circle", Family.CUSTOM, surface, MetricParams(1.0, 0.0, 3.0),
                     _latitude(theta0, omega), FiberRule("explicit", fn=_constant_field([1.0, 0.0])),
                     (0.0, 2 * math.pi / omega), 256, period=2 * math.pi / omega)


def _null_legendre(args):
    """Non-vertical null curve with θ = 0: a horocycle of H²(−2) with V its unit normal."""
    p = MetricParams(-0.5, 1.5, 1.0)
    surface = SurfaceModel.from_curvature(SurfaceKind.HYPERBOLIC, (p.a + p.c) / p.a)
    R = surface.radius
    # horocycle in the hyperboloid model: X(t) = R(1 + t²/2, t²/2, t) with speed R
    Xf = lambda t: R * _stack(1 + t**2 / 2, t**2 / 2, t)  # noqa: E731
    Xd = lambda t: R * _stack(t, t, 1 + 0 * t)  # noqa: E731
    # unit normal inside the tangent plane
    Nf = lambda t: _stack(t**2 / 2, t**2 / 2 - 1, t)  # noqa: E731
    path = _ambient_path(surface, Xf, Xd)
    return CurveSpec("null-legendre", Family.CUSTOM, surface, p, path,
                     FiberRule("explicit", fn=_ambient_field(surface, path, Nf)), (0.5, 1.5), 201,
                     fd_step=2e-3)


def _vertical(args):
    rate = float(args[0]) if args else 1.0
    surface = SurfaceModel(SurfaceKind.SPHERE, 1.0)
    x0 = np.array([math.pi / 3, 0.0])
    base = BasePath(lambda t: np.broadcast_to(x0, np.shape(t) + (2,)).copy(),
                    lambda t: np.zeros(np.shape(t) + (2,)))

    def V(t):
        t = np.asarray(t, dtype=float)
        return _stack(np.cos(rate * t), np.sin(rate * t) / math.sin(x0[0]))

    return CurveSpec(f"vertical({rate:g})", Family.VERTICAL, surface, MetricParams(1.0, 0.0, 3.0),
                     base, FiberRule("explicit", fn=V), (0.0, 2 * math.pi / abs(rate)), 256,
                     period=2 * math.pi / abs(rate))


FIXTURES = {
    "fig1-timelike": _fig1,
    "lightlike-geodesic": _lightlike,
    "timelike-geodesic": _timelike,
    "spacelike-geodesic": _spacelike,
    "fig2-oblique": _fig2,
    "horizontal-helix": _hor_helix,
    "horizontal-helix-untwisted": _hor_helix_flat,
    "oblique-untwisted": _obl_flat,
    "null-oblique": _null_oblique,
    "null-horizontal": _null_horizontal,
    "kk-horizontal-circle": _kk_circle,
    "oblique-nonconstant-speed": _oblique_nonconstant,
    "null-legendre": _null_legendre,
    "normal-lift-circle": _normal_lift_circle,
    "vertical": _vertical,
}

_NAME = re.compile(r"^\s*([a-z0-9-]+)\s*(?:\(([^)]*)\))?\s*$")


def make_fixture(name: str) -> CurveSpec:
    m = _NAME.match(name)
    if not m or m.group(1) not in FIXTURES:
        raise UnknownFixture(f"unknown fixture {name!r}; known: {', '.join(sorted(FIXTURES))}")
    args = [a for a in (m.group(2) or "").split(",") if a.strip()]
    return FIXTURES[m.group(1)](args)


def fixture_sample(name: str, params: MetricParams | None = None) -> CurveSample:
    return build_sample(make_fixture(name), params)

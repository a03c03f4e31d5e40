"""Helix detection and classification against the closed-form helix families.

A curve λ = (x, V) is a helix (direction the geodesic vector field) when its
slant θ = G̃(λ', ξ̃) = ε√|φ| g(ẋ, V) is constant.  ``classify`` measures the
family, causal type and torsion, checks every hypothesis of the one applicable
characterization and compares its predicted constants with the measured ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .connection import geodesic_residual, velocity
from .curves import CurveSample, base_norm, circle_check, is_constant, relative_spread
from .errors import (AmbiguousFamily, LightlikeNormal, NonConstantSpeed, NotAHelix,
                     UnnormalizedCurve, ZeroTorsion)
from .frenet import CartanData, FrenetData, cartan_apparatus, frenet_apparatus
from .gnat import MetricParams, T1Vec, frame_norm, g_tilde, reeb_field
from .surfaces import SurfaceModel, inner

HYP_TOL = 1e-6
FAMILY_TOL = 1e-7
GEODESIC_TOL = 1e-6
MATCH_TOL = 1e-4
NORMALIZED_TOL = 1e-6


class Theorem(str, Enum):
    GEOD = "Geod"
    HOR0 = "Hor0"
    HORT = "HorT"
    OBL0 = "Obl0"
    OBLT = "OblT"
    NULLHOR = "NullHor"
    NULLOBL = "NullObl"
    NONE = "None"


@dataclass
class Check:
    name: str
    passed: bool
    residual: float

    def to_json(self) -> dict:
        return {"name": self.name, "pass": bool(self.passed), "residual": float(self.residual)}


def _check(name: str, residual: float, tol: float) -> Check:
    residual = float(residual)
    return Check(name, bool(np.isfinite(residual) and residual < tol), residual)


def _flag(name: str, ok: bool, residual: float = 0.0) -> Check:
    return Check(name, bool(ok), float(residual))


@dataclass
class HelixReport:
    theta: np.ndarray
    theta_mean: float
    theta_constant: bool
    family: str
    causal: int
    torsion: str
    matched_theorem: Theorem = Theorem.NONE
    checks: list = field(default_factory=list)
    predicted: dict = field(default_factory=dict)
    measured: dict = field(default_factory=dict)
    branch_signs: dict = field(default_factory=dict)
    constants_match: bool | None = None
    f2: np.ndarray | None = None
    h1: np.ndarray | None = None
    ode_residual: float | None = None
    notes: list = field(default_factory=list)

    @property
    def is_helix(self) -> bool:
        return self.theta_constant

    @property
    def hypotheses_pass(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "theta": {"series": [float(v) for v in self.theta], "mean": self.theta_mean,
                      "constant": self.theta_constant},
            "family": self.family,
            "causal": self.causal,
            "torsion": self.torsion,
            "helix": self.theta_constant,
            "matched_theorem": self.matched_theorem.value,
            "checks": [c.to_json() for c in self.checks],
            "predicted": dict(self.predicted),
            "measured": dict(self.measured),
            "branch_signs": dict(self.branch_signs),
            "constants_match": self.constants_match,
            "ode_residual": self.ode_residual,
            "notes": list(self.notes),
        }


# -- slant ------------------------------------------------------------------------------------


def slant_function(params: MetricParams, sample: CurveSample) -> np.ndarray:
    """θ(t) = G̃(λ', ξ̃) per sample."""
    pt = sample.point
    return g_tilde(params, pt, velocity(sample.derivs), reeb_field(params, pt))


def slant_closed_form(params: MetricParams, sample: CurveSample) -> np.ndarray:
    """ε√|φ| g(ẋ, V), the same quantity without the metric on T₁M."""
    return params.eps * params.sqrt_abs_phi * inner(sample.g, sample.derivs.xd, sample.V)


def _theta_constant(theta, core, tol: float) -> bool:
    return is_constant(theta[core], tol, floor=1.0)


def is_helix(params: MetricParams, sample: CurveSample, tol: float = HYP_TOL) -> tuple[bool, float]:
    theta = slant_function(params, sample)
    core = sample.core
    return _theta_constant(theta, core, tol), float(np.mean(theta[core]))


# -- auxiliary functions ------------------------------------------------------------------------


def _base_products(sample: CurveSample):
    D, g = sample.derivs, sample.g
    return {
        "xdd_Vd": inner(g, D.xdd, D.Vd),
        "Vdd_xd": inner(g, D.Vdd, D.xd),
        "Vd_Vd": inner(g, D.Vd, D.Vd),
        "xd_V": inner(g, D.xd, D.V),
        "sigma": inner(g, D.xd, D.xd),
    }


def f2(params: MetricParams, sample: CurveSample, frenet: FrenetData) -> np.ndarray:
    """The W₂-component of ξ̃ for curves of non-zero torsion, from base data."""
    tau, kappa = frenet.tau, frenet.kappa
    if np.any(np.abs(tau[frenet.core]) < HYP_TOL):
        raise ZeroTorsion("f₂ needs τ ≠ 0 on the whole window")
    b = _base_products(sample)
    th = slant_function(params, sample)
    el, e1, eps = frenet.eps_lambda, frenet.eps1, params.eps
    phi, d, al = params.phi, params.d, params.alpha
    return (-el * th * kappa / tau
            + e1 * phi / (2 * kappa * tau * params.sqrt_abs_phi) * (b["xdd_Vd"] - b["Vdd_xd"])
            - e1 * th / (kappa * tau) * b["Vd_Vd"]
            + e1 * d * th / (2 * al * kappa * tau) * (el - eps * th**2))


def f2_frame(params: MetricParams, sample: CurveSample, frenet: FrenetData) -> np.ndarray:
    """ε₂ G̃(ξ̃, W₂), the frame-decomposition route to f₂."""
    pt = sample.point
    return frenet.eps2 * g_tilde(params, pt, reeb_field(params, pt), frenet.W2)


def h1(params: MetricParams, sample: CurveSample, cartan: CartanData | None = None) -> np.ndarray:
    """The T-component of ξ̃ for a pseudo-arc null curve, from base data."""
    if cartan is None:
        cartan = cartan_apparatus(params, sample)
    b = _base_products(sample)
    th = slant_function(params, sample)
    eps, d, al = params.eps, params.d, params.alpha
    return (eps * params.sqrt_abs_phi / 2 * (b["xdd_Vd"] - b["Vdd_xd"]) - th * b["Vd_Vd"]
            - eps * d / (2 * al) * th**3 - cartan.kappa * th)


def h1_frame(params: MetricParams, sample: CurveSample, cartan: CartanData) -> np.ndarray:
    """G̃(ξ̃, N), the frame-decomposition route to h₁."""
    pt = sample.point
    return g_tilde(params, pt, reeb_field(params, pt), cartan.N)


def helix_ode_residual(params: MetricParams, sample: CurveSample, frenet=None) -> float:
    """Max frame norm of the helix differential equation matching the curve type."""
    ok, _ = is_helix(params, sample)
    if not ok:
        raise NotAHelix("θ is not constant along the window")
    pt = sample.point
    core = sample.core
    th = slant_function(params, sample)
    Vh = T1Vec(sample.V, np.zeros_like(sample.V))
    T = velocity(sample.derivs)
    if frenet is None:
        null = abs(float(np.mean(sample.speed2[core]))) < 1e-6
        frenet = cartan_apparatus(params, sample) if null else frenet_apparatus(params, sample)
    s = params.sqrt_abs_phi
    if isinstance(frenet, CartanData):
        h = h1(params, sample, frenet)
        lhs = frenet.jerk * (s * th) + T * (s * (frenet.kappa * th - h)) + Vh
    else:
        F = frenet
        k, kp, tau = F.kappa, F.kappa_prime, F.tau
        acc, jerk = F.acc, F.jerk
        if np.max(np.abs(tau[core])) < HYP_TOL:
            lhs = jerk - acc * (kp / k) + T * (F.eps1 * F.eps_lambda * k**2)
        else:
            f = f2(params, sample, F)
            e12 = F.eps1 * F.eps2
            lhs = (jerk * (e12 * f / (k * tau)) - acc * (e12 * kp * f / (k**2 * tau))
                   - T * (F.eps_lambda * th - F.eps_lambda * F.eps2 * k * f / tau) + Vh * (1 / s))
    return float(np.max(frame_norm(params, pt, lhs)[core]))


# -- classification -----------------------------------------------------------------------------


def _family(sample: CurveSample, tol: float = FAMILY_TOL) -> str:
    core = sample.core
    g = sample.g[core]
    xd = base_norm(g, sample.derivs.xd[core])
    Vd = base_norm(g, sample.derivs.Vd[core])
    scale = max(1.0, float(np.max(xd)), float(np.max(Vd)))
    if np.max(xd) < tol * scale:
        return "Vertical"
    if np.max(Vd) < tol * scale:
        return "Horizontal"
    if np.min(xd) < tol * scale or np.min(Vd) < tol * scale:
        raise AmbiguousFamily("ẋ or ∇V vanishes on part of the window only")
    return "Oblique"


def _signed_match(predicted: float, measured: float, tol: float):
    """Compare |predicted| with |measured|; return (match, branch sign)."""
    ok = abs(abs(predicted) - abs(measured)) < tol
    if abs(predicted) < tol or abs(measured) < tol:
        return ok, 1
    return ok, int(np.sign(predicted) * np.sign(measured))


def _sqrt_pos(x: float) -> float:
    return math.sqrt(x) if x > 0 else math.nan


def _parallel_residual(sample: CurveSample) -> float:
    c = sample.core
    return float(np.max(base_norm(sample.g[c], sample.derivs.Vd[c])))


def _base_geodesic_residual(sample: CurveSample) -> float:
    c = sample.core
    return float(np.max(base_norm(sample.g[c], sample.derivs.xdd[c])))


def _oblique_fiber_residual(sample: CurveSample, sigma: float) -> float:
    """min over ± of max ‖V ∓ ẋ/√σ‖."""
    c = sample.core
    if sigma <= 0:
        return math.inf
    g, V, xd = sample.g[c], sample.V[c], sample.derivs.xd[c]
    return min(float(np.max(base_norm(g, V - s * xd / math.sqrt(sigma)))) for s in (1.0, -1.0))


def _curvature_check(params: MetricParams, surface: SurfaceModel) -> Check:
    target = (params.a + params.c) / params.a
    return _check("base_curvature_equals_(a+c)/a", abs(surface.gauss_curvature - target),
                  1e-9 * max(1.0, abs(target)))


def _mean(x, core) -> float:
    return float(np.mean(np.asarray(x)[core]))


def classify(params: MetricParams, sample: CurveSample, tol: float = HYP_TOL,
             match_tol: float = MATCH_TOL) -> HelixReport:
    """Match a normalized curve against the helix characterizations."""
    if params != sample.params:
        sample = sample.with_params(params)
    core = sample.core
    pt = sample.point
    theta = slant_function(params, sample)
    th_const = _theta_constant(theta, core, tol)
    th_mean = _mean(theta, core)
    family = _family(sample)
    s2 = _mean(sample.speed2, core)
    causal = 0 if abs(s2) < 1e-9 else int(np.sign(s2))
    report = HelixReport(theta, th_mean, th_const, family, causal, "unknown")

    if family == "Vertical":
        report.torsion = "n/a"
        report.notes.append("vertical curves are helices with θ = 0")
        return report

    geo = float(np.max(geodesic_residual(params, sample.surface, sample.derivs)[core]))
    if geo < GEODESIC_TOL:
        report.torsion = "geodesic"
        return _classify_geodesic(params, sample, report, geo, tol)

    if causal != 0 and abs(abs(s2) - 1.0) > NORMALIZED_TOL:
        raise UnnormalizedCurve(f"G̃(λ',λ') = {s2:.6g}; reparametrize by arc length first")
    if not th_const:
        report.checks.append(_flag("theta_constant", False, relative_spread(theta[core], 1.0)))
        report.notes.append("θ varies along the curve: not a helix")
        return report

    if causal == 0:
        return _classify_null(params, sample, report, tol, match_tol)
    try:
        F = frenet_apparatus(params, sample)
    except LightlikeNormal as exc:
        report.notes.append(str(exc))
        return report
    return _classify_frenet(params, sample, report, F, tol, match_tol)


def _classify_geodesic(params, sample, report: HelixReport, geo: float, tol: float) -> HelixReport:
    c = sample.core
    g = sample.g[c]
    xd = sample.derivs.xd[c]
    checks = [
        _check("t1_geodesic_residual", geo, GEODESIC_TOL),
        _check("base_geodesic_residual", _base_geodesic_residual(sample), 1e-6),
        _flag("base_non_constant", float(np.min(base_norm(g, xd))) > 1e-6, float(np.min(base_norm(g, xd)))),
        _check("V_parallel_residual", _parallel_residual(sample), 1e-6),
        _flag("theta_constant", report.theta_constant, relative_spread(report.theta[c], 1.0)),
    ]
    sig = inner(g, xd, xd)
    if report.causal == 0:
        checks.append(_flag("kaluza_klein_d_zero", params.d == 0, abs(params.d)))
        checks.append(_check("base_lightlike", float(np.max(np.abs(sig))), 1e-9))
        report.notes.append("lightlike geodesic helices need d = 0; the no-lightlike-helix claim for "
                            "d ≠ 0 is read as a statement about geodesics")
    else:
        # which branch makes the geodesic a helix: Legendre, d = 0, or V along ẋ
        legendre = abs(report.theta_mean)
        xV = inner(g, xd, sample.V[c])
        tangent = float(np.max(base_norm(g, xd - xV[:, None] * sample.V[c])))
        branches = {"legendre": legendre < tol, "kaluza_klein": params.d == 0,
                    "fiber_along_velocity": tangent < 1e-6}
        report.branch_signs["geodesic_branches"] = [k for k, v in branches.items() if v]
        checks.append(_flag("helix_branch", any(branches.values()),
                            min(legendre, abs(params.d), tangent)))
    report.checks = checks
    if all(ch.passed for ch in checks):
        report.matched_theorem = Theorem.GEOD
    elif report.theta_constant:
        report.notes.append("geodesic with constant θ whose base data fall outside the "
                            "geodesic-helix characterization")
    if report.causal == 0 and abs(report.theta_mean) < tol:
        report.notes.append("null Legendre geodesic: no Cartan frame exists, so the "
                            "non-geodesic null classification does not apply")
    return report


def _finish(report: HelixReport, theorem: Theorem, checks, predicted: dict, measured: dict,
            match_tol: float) -> HelixReport:
    report.checks = checks
    report.measured = measured
    if not all(ch.passed for ch in checks):
        report.notes.append(f"{theorem.value} hypotheses fail; no constants predicted")
        return report
    report.matched_theorem = theorem
    report.predicted = predicted
    matches = []
    for key, value in predicted.items():
        ok, sign = _signed_match(value, measured[key], match_tol)
        matches.append(ok)
        report.branch_signs[key] = sign
    report.constants_match = all(matches)
    return report


def _classify_frenet(params, sample, report, F: FrenetData, tol, match_tol) -> HelixReport:
    core = F.core
    a, ac, d = params.a, params.a + params.c, params.d
    al, phi, eps = params.alpha, params.phi, params.eps
    el, e1, e2 = F.eps_lambda, F.eps1, F.eps2
    th = report.theta_mean
    kappa, tau = F.kappa_mean, F.tau_mean
    zero_tau = float(np.max(np.abs(F.tau[core]))) < tol
    report.torsion = "zero" if zero_tau else "nonzero"
    measured = {"kappa": kappa} if zero_tau else {"kappa": kappa, "tau": tau}
    b = _base_products(sample)
    xV = _mean(b["xd_V"], core)
    sig = b["sigma"][core]
    sigma = float(np.mean(sig))
    common = [_curvature_check(params, sample.surface),
              _flag("theta_constant", True, relative_spread(report.theta[core], 1.0)),
              _flag("d_nonzero", d != 0, abs(d)),
              _check("kappa_constant", relative_spread(F.kappa[core]), tol)]
    if not zero_tau:
        common.append(_check("tau_constant", relative_spread(F.tau[core]), tol))

    if report.family == "Horizontal":
        geo = _base_geodesic_residual(sample)
        if zero_tau:
            checks = common + [
                _flag("a+c-d_nonzero", ac != d, abs(ac - d)),
                _check("base_geodesic", geo, 1e-6),
                _check("xV_squared_equals_eps_lambda_over_2d",
                       abs(xV**2 - el / (2 * d)) / abs(el / (2 * d)) if d else math.inf, tol),
            ]
            pred = {"kappa": _sqrt_pos((d - ac) / (4 * e1 * al))}
            checks.append(_flag("kappa_real", np.isfinite(pred["kappa"])))
            return _finish(report, Theorem.HOR0, checks, pred, measured, match_tol)
        crit = e2 * (eps - el * th**2)
        checks = common + [
            _check("4alpha_equals_phi", abs(4 * al - phi) / max(abs(phi), 1e-300), 1e-12),
            _flag("eps2_(eps-eps_lambda_theta^2)_positive", crit > 0, crit),
            _flag("eps_lambda_eps1_equals_eps2", el * e1 == e2),
            _check("base_geodesic", geo, 1e-6),
            _flag("base_non_degenerate", bool(np.min(np.abs(sig)) > 1e-9), float(np.min(np.abs(sig)))),
        ]
        pred = {"kappa": 2 * th * d / phi * _sqrt_pos(crit), "tau": eps * el - 2 * d * th**2 / phi}
        report.f2 = f2(params, sample, F)
        report.ode_residual = helix_ode_residual(params, sample, F)
        return _finish(report, Theorem.HORT, checks, pred, measured, match_tol)

    # oblique
    try:
        circ = circle_check(sample.surface, sample, tol)
        circle_ok, circle_res = circ.is_circle, circ.residual
    except NonConstantSpeed:
        circle_ok, circle_res = False, math.inf
    sigma_rel = abs(sigma - eps * th**2 / phi) / max(abs(sigma), 1e-300)
    obl = [
        _flag("base_constant_speed", is_constant(sig, tol), relative_spread(sig)),
        _flag("base_spacelike_circle", circle_ok and sigma > 0, circle_res),
        _check("sigma_equals_eps_theta^2_over_phi", sigma_rel, tol),
        _check("V_equals_pm_xdot_over_sqrt_sigma", _oblique_fiber_residual(sample, sigma), 1e-6),
    ]
    if zero_tau:
        pred = {"kappa": _sqrt_pos(-d * (ac - d) / (2 * e1 * el * al * abs(phi)))}
        checks = common + obl + [_flag("kappa_real", np.isfinite(pred["kappa"]))]
        report.ode_residual = helix_ode_residual(params, sample, F)
        return _finish(report, Theorem.OBL0, checks, pred, measured, match_tol)
    crit = e2 * (eps - el * th**2)
    checks = common + obl + [
        _flag("eps1_eps2_alpha_positive", e1 * e2 * al > 0, e1 * e2 * al),
        _flag("eps_eps_lambda_equals_1", eps * el == 1),
        _flag("eps2_(eps-eps_lambda_theta^2)_positive", crit > 0, crit),
    ]
    pred = {"kappa": d * th * _sqrt_pos(e1 * (1 - th**2) / (al * phi)),
            "tau": (eps * phi - 2 * el * d * th**2) / (2 * math.sqrt(abs(al * phi)))}
    report.f2 = f2(params, sample, F)
    report.ode_residual = helix_ode_residual(params, sample, F)
    return _finish(report, Theorem.OBLT, checks, pred, measured, match_tol)


def _classify_null(params, sample, report, tol, match_tol) -> HelixReport:
    C = cartan_apparatus(params, sample)
    core = C.core
    a, ac, d = params.a, params.a + params.c, params.d
    al, phi, eps = params.alpha, params.phi, params.eps
    report.torsion = "null"
    kappa = C.kappa_mean
    measured = {"kappa": kappa}
    b = _base_products(sample)
    xV = _mean(b["xd_V"], core)
    sig = b["sigma"][core]
    sigma = float(np.mean(sig))
    report.h1 = h1(params, sample, C)
    report.ode_residual = helix_ode_residual(params, sample, C)
    if abs(report.theta_mean) < tol:
        report.checks = [_flag("legendre_null_is_vertical", False, abs(report.theta_mean))]
        report.notes.append("a null Legendre helix must be vertical; this curve is not")
        return report
    common = [_curvature_check(params, sample.surface),
              _flag("theta_constant", True, relative_spread(report.theta[core], 1.0)),
              _check("kappa_constant", relative_spread(C.kappa[core]), tol)]
    if report.family == "Horizontal":
        geo = _base_geodesic_residual(sample)
        acc = inner(sample.g[core], sample.derivs.xdd[core], sample.derivs.xdd[core])
        geodesic_branch = geo < 1e-6 and float(np.min(np.abs(sig))) > 1e-9
        lightlike_branch = (abs(ac - 3 * d) < 1e-12 * max(1.0, abs(d))
                            and float(np.max(np.abs(acc))) < 1e-9 and geo > 1e-6)
        checks = common + [
            _flag("d_nonzero", d != 0, abs(d)),
            _check("phi_equals_-4alpha", abs(phi + 4 * al) / max(abs(phi), 1e-300), 1e-12),
            _check("xV_equals_1_over_2|d|", abs(xV - 1 / (2 * abs(d))) * 2 * abs(d) if d else math.inf, tol),
            _flag("base_geodesic_or_lightlike_acceleration", geodesic_branch or lightlike_branch, geo),
        ]
        report.branch_signs["base_branch"] = "geodesic" if geodesic_branch else (
            "lightlike_acceleration" if lightlike_branch else "none")
        pred = {"kappa": -d * ac / abs(d * phi) if d else math.nan}
        return _finish(report, Theorem.NULLHOR, checks, pred, measured, match_tol)
    try:
        circ = circle_check(sample.surface, sample, tol)
        circle_ok, circle_res = circ.is_circle, circ.residual
    except NonConstantSpeed:
        circle_ok, circle_res = False, math.inf
    target = eps / (2 * d) if d else math.nan
    fiber = math.inf
    if sigma > 0 and 2 * eps * d > 0:
        c = core
        fiber = min(float(np.max(base_norm(sample.g[c], sample.V[c] - s * math.sqrt(2 * eps * d)
                                           * sample.derivs.xd[c]))) for s in (1.0, -1.0))
    checks = common + [
        _flag("d_equals_a+c_nonzero", d != 0 and math.isclose(d, ac, rel_tol=1e-12), abs(d - ac)),
        _check("sigma_equals_eps_over_2d", abs(sigma - target) / abs(target) if d else math.inf, tol),
        _check("V_equals_pm_sqrt(2 eps d)_xdot", fiber, 1e-6),
        _flag("base_circle", circle_ok, circle_res),
    ]
    pred = {"kappa": eps / 2}
    return _finish(report, Theorem.NULLOBL, checks, pred, measured, match_tol)


def analyze(params: MetricParams, sample: CurveSample, tol: float = HYP_TOL,
            match_tol: float = MATCH_TOL) -> HelixReport:
    """Normalize (arc length or pseudo-arc) when needed, then classify."""
    from .curves import arclength_reparam, pseudo_arc_reparam
    from .errors import NullGeodesic
    if params != sample.params:
        sample = sample.with_params(params)
    core = sample.core
    geo = float(np.max(geodesic_residual(params, sample.surface, sample.derivs)[core]))
    s2 = sample.speed2[core]
    if geo >= GEODESIC_TOL and np.max(np.abs(sample.derivs.xd[core])) > 0:
        if np.max(np.abs(s2)) < 1e-9:
            try:
                sample = pseudo_arc_reparam(params, sample)
            except NullGeodesic:
                pass
        elif np.max(np.abs(np.abs(s2) - 1)) > NORMALIZED_TOL:
            sample = arclength_reparam(params, sample)
    elif np.max(np.abs(sample.derivs.xd[core])) == 0 and np.max(np.abs(np.abs(s2) - 1)) > NORMALIZED_TOL:
        sample = arclength_reparam(params, sample)
    return classify(params, sample, tol, match_tol)


# -- parameter admissibility -----------------------------------------------------------------


def theorem_admissibility(params: MetricParams) -> dict:
    """Parameter-only necessary conditions of each characterization."""
    a, ac, d = params.a, params.a + params.c, params.d
    al, phi = params.alpha, params.phi
    return {
        "Geod": True,
        "Hor0": d != 0 and ac != d,
        "HorT": d != 0 and math.isclose(4 * al, phi, rel_tol=1e-12, abs_tol=1e-14),
        "Obl0": d != 0 and ac != d,
        "OblT": d != 0,
        "NullHor": d != 0 and math.isclose(phi, -4 * al, rel_tol=1e-12, abs_tol=1e-14),
        "NullObl": d != 0 and math.isclose(d, ac, rel_tol=1e-12),
    }

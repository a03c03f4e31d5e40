"""Named verification suites run by ``t1helix verify``.

Each check returns a residual compared against a tolerance (scaled by
``--tol-scale``) or a pass flag.  Checks are independent and may run in
parallel; results are always reported sorted by name.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable

import numpy as np

from .connection import integrate_t1_geodesic, geodesic_residual
from .curves import build_sample, make_fixture, relative_spread
from .gnat import (MetricParams, StructureClass, T1Vec, UnitTangentPoint, eta_form, frame_norm,
                   g_tilde, phi_tensor, reeb_field, signature_case, structure_class,
                   t1_signature, tangential_lift)
from .helix import Theorem, analyze, slant_closed_form
from .surfaces import SurfaceKind, SurfaceModel, inner

SUITES = ("structure", "theorem1", "theorem2", "theorem3", "theorem4", "theorem5", "theorem6",
          "theorem7")
STRUCTURE_POINTS = 1000


@dataclass(frozen=True)
class CheckSpec:
    name: str
    fn: Callable
    tol: float | None = None  # None: fn returns (passed, residual)


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    tol: float | None
    runtime: float
    error: str | None = None

    def to_json(self, timing: bool = False) -> dict:
        out = {"name": self.name, "pass": self.passed, "residual": self.residual, "tol": self.tol}
        if self.error:
            out["error"] = self.error
        if timing:
            out["runtime"] = self.runtime
        return out


@dataclass
class SuiteResult:
    suite: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_json(self, timing: bool = False) -> dict:
        return {"suite": self.suite, "pass": self.passed,
                "checks": [c.to_json(timing) for c in self.checks]}


def thread_count() -> int:
    raw = os.environ.get("T1HELIX_THREADS", "")
    try:
        cap = int(raw)
    except ValueError:
        cap = os.cpu_count() or 1
    return max(1, cap)


def _run_one(spec: CheckSpec, tol_scale: float) -> CheckResult:
    t0 = time.perf_counter()
    try:
        out = spec.fn()
        if spec.tol is None:
            passed, residual = out
            tol = None
        else:
            residual = float(out)
            tol = spec.tol * tol_scale
            passed = bool(np.isfinite(residual) and residual < tol)
        return CheckResult(spec.name, bool(passed), float(residual), tol, time.perf_counter() - t0)
    except Exception as exc:  # a crashing check is a failed check
        return CheckResult(spec.name, False, math.nan, spec.tol, time.perf_counter() - t0,
                           f"{type(exc).__name__}: {exc}")


def run_suite(name: str, tol_scale: float = 1.0, seed: int = 0, threads: int | None = None) -> SuiteResult:
    if name == "all":
        specs = [s for suite in SUITES for s in _SUITE_BUILDERS[suite](seed)]
    elif name in _SUITE_BUILDERS:
        specs = _SUITE_BUILDERS[name](seed)
    else:
        raise KeyError(f"unknown suite {name!r}; known: all, {', '.join(SUITES)}")
    threads = thread_count() if threads is None else threads
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda s: _run_one(s, tol_scale), specs))
    else:
        results = [_run_one(s, tol_scale) for s in specs]
    return SuiteResult(name, sorted(results, key=lambda r: r.name))


# -- structure ------------------------------------------------------------------------------


def random_structure_params(rng, kind: str) -> MetricParams:
    """Contact (α > 0) or paracontact (α < 0) parameters with |φ| = 4|α|."""
    while True:
        a = rng.choice([-1.0, 1.0]) * rng.uniform(0.2, 3.0)
        ac = rng.choice([-1.0, 1.0]) * rng.uniform(0.2, 3.0)
        al = a * ac
        if (kind == "contact") != (al > 0):
            continue
        phi = rng.choice([-1.0, 1.0]) * 4 * abs(al)
        return MetricParams(a, ac - a, phi - ac)


def random_point(rng, lorentzian: bool) -> UnitTangentPoint:
    """A unit vector u over a diagonal metric of the given signature."""
    l1, l2 = rng.uniform(0.3, 3.0, size=2)
    psi = rng.uniform(-2.0, 2.0) if lorentzian else rng.uniform(0, 2 * math.pi)
    if lorentzian:
        g = np.diag([-l1, l2])
        u = np.array([math.sinh(psi) / math.sqrt(l1), math.cosh(psi) / math.sqrt(l2)])
    else:
        g = np.diag([l1, l2])
        u = np.array([math.cos(psi) / math.sqrt(l1), math.sin(psi) / math.sqrt(l2)])
    return UnitTangentPoint(rng.normal(size=2), u, g)


def random_t1_vector(rng, pt: UnitTangentPoint) -> T1Vec:
    return T1Vec(rng.normal(size=2), tangential_lift(rng.normal(size=2), pt))


def _structure_samples(seed: int, n: int = STRUCTURE_POINTS):
    rng = np.random.default_rng(seed)
    for i in range(n):
        kind = "contact" if i % 2 == 0 else "paracontact"
        p = random_structure_params(rng, kind)
        pt = random_point(rng, lorentzian=bool(rng.integers(2)))
        yield p, pt, random_t1_vector(rng, pt), random_t1_vector(rng, pt)


def _structure_sign(p: MetricParams) -> float:
    return -1.0 if structure_class(p) is StructureClass.CONTACT else 1.0


def phi_squared_residual(seed: int = 0, n: int = STRUCTURE_POINTS) -> float:
    """max ‖φ̃²Z − s(Z − η̃(Z)ξ̃)‖ / ‖Z‖ with s = −1 (contact) or +1 (paracontact)."""
    worst = 0.0
    for p, pt, Z, _ in _structure_samples(seed, n):
        s = _structure_sign(p)
        lhs = phi_tensor(p, pt, phi_tensor(p, pt, Z))
        rhs = (Z - reeb_field(p, pt) * eta_form(p, pt, Z)) * s
        worst = max(worst, float(frame_norm(p, pt, lhs - rhs) / frame_norm(p, pt, Z)))
    return worst


def compatibility_residual(seed: int = 0, n: int = STRUCTURE_POINTS) -> float:
    """max |G̃(φ̃Z, φ̃W) + s(G̃(Z,W) − ε η̃(Z)η̃(W))| / (‖Z‖‖W‖)."""
    worst = 0.0
    for p, pt, Z, W in _structure_samples(seed, n):
        s = _structure_sign(p)
        lhs = g_tilde(p, pt, phi_tensor(p, pt, Z), phi_tensor(p, pt, W))
        rhs = -s * (g_tilde(p, pt, Z, W) - p.eps * eta_form(p, pt, Z) * eta_form(p, pt, W))
        scale = frame_norm(p, pt, Z) * frame_norm(p, pt, W)
        worst = max(worst, float(abs(lhs - rhs) / scale))
    return worst


def reeb_unit_residual(seed: int = 0, n: int = STRUCTURE_POINTS) -> float:
    """max |G̃(ξ̃,ξ̃) − ε| and |η̃(ξ̃) − 1|; exact up to rounding in u and √|φ|."""
    worst = 0.0
    for p, pt, _, _ in _structure_samples(seed, n):
        xi = reeb_field(p, pt)
        worst = max(worst, abs(float(g_tilde(p, pt, xi, xi)) - p.eps),
                    abs(float(eta_form(p, pt, xi)) - 1.0))
    return worst


def signature_mismatches(seed: int = 0, n: int = STRUCTURE_POINTS) -> tuple[bool, float]:
    """Eigenvalue counts of G̃ against the case table, over generic nondegenerate params."""
    rng = np.random.default_rng(seed + 1)
    bad = covered = 0
    for _ in range(n):
        a, ac, d = rng.normal(size=3) * 2
        p = MetricParams(a, ac - a, d)
        if not p.nondegenerate:
            continue
        for base in ((2, 0), (1, 1)):
            case, sig = signature_case(p, base)
            if case is None:
                continue
            covered += 1
            bad += t1_signature(p, base) != sig
    return bad == 0 and covered > 0, float(bad)


def _structure(seed):
    return [
        CheckSpec("structure.phi_squared", lambda: phi_squared_residual(seed), 1e-12),
        CheckSpec("structure.compatibility", lambda: compatibility_residual(seed), 1e-10),
        CheckSpec("structure.reeb_unit", lambda: reeb_unit_residual(seed), 1e-13),
        CheckSpec("structure.signature_oracle", lambda: signature_mismatches(seed)),
    ]


# -- fixture checks ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def fixture_report(name: str, params: tuple | None = None):
    p = MetricParams(*params) if params else None
    sample = build_sample(make_fixture(name), p)
    return sample, analyze(sample.params, sample)


def _matches(name: str, theorem: Theorem):
    def fn():
        rep = fixture_report(name)[1]
        return rep.matched_theorem is theorem, 0.0 if rep.matched_theorem is theorem else 1.0
    return fn


def _constants_match(name: str):
    def fn():
        rep = fixture_report(name)[1]
        return rep.constants_match is True, _constant_gap(rep)
    return fn


def _constant_gap(rep) -> float:
    if not rep.predicted:
        return math.nan
    return max(abs(abs(rep.predicted[k]) - abs(rep.measured[k])) for k in rep.predicted)


def _measured(name: str, key: str, target: float, absolute: bool = False):
    def fn():
        value = fixture_report(name)[1].measured.get(key, math.nan)
        return abs((abs(value) if absolute else value) - target)
    return fn


def _is_none(name: str):
    def fn():
        rep = fixture_report(name)[1]
        return rep.matched_theorem is Theorem.NONE, 0.0 if rep.matched_theorem is Theorem.NONE else 1.0
    return fn


def fig1_geodesic_residual(params: tuple | None = None) -> float:
    sample, _ = fixture_report("fig1-timelike", params)
    return float(np.max(geodesic_residual(sample.params, sample.surface, sample.derivs)[sample.core]))


def integration_error(name: str = "timelike-geodesic(0.5)", step: float = 1e-3) -> float:
    """Max chart error of RK4 from the fixture's initial data against its closed form on [0, 1]."""
    spec = replace(make_fixture(name), window=(0.0, 1.0), samples=1001)
    s = build_sample(spec)
    D = s.derivs
    sol = integrate_t1_geodesic(s.params, s.surface, (D.x[0], D.xd[0], D.V[0], D.Vd[0]), (0.0, 1.0), step)
    return float(max(np.max(np.abs(sol.x - s.x)), np.max(np.abs(sol.V - s.V))))


def kaluza_klein_theta_drift(step: float = 1e-3, boost: float = 0.7) -> float:
    """θ drift of the integrated geodesic with d = 0 and a generic parallel V on 𝕊²₁."""
    p = MetricParams(1.0, 0.0, 0.0)
    spec = replace(make_fixture("timelike-geodesic(0.5)"), window=(0.0, 1.0), samples=101)
    s = build_sample(spec, p)
    x0, xd0, n = s.x[0], s.derivs.xd[0], s.V[0]
    v = math.cosh(boost) * n + math.sinh(boost) * xd0
    sol = integrate_t1_geodesic(p, s.surface, (x0, xd0, v, np.zeros(2)), (0.0, 1.0), step)
    g = s.surface.metric(sol.x)
    theta = p.eps * p.sqrt_abs_phi * inner(g, sol.xd, sol.V)
    return float(np.max(theta) - np.min(theta))


FIG1_PARAMS = ((1.0, -2.0, 5.0), (1.0, 0.0, 3.0), (2.0, 1.0, -1.0), (-1.0, 3.0, 0.5))


def _theorem1(seed):
    specs = [CheckSpec(f"theorem1.fig1_geodesic_residual{p}", (lambda p=p: fig1_geodesic_residual(p)), 1e-6)
             for p in FIG1_PARAMS]
    specs += [CheckSpec(f"theorem1.{n}_classified_geod", _matches(n, Theorem.GEOD))
              for n in ("fig1-timelike", "lightlike-geodesic", "timelike-geodesic", "spacelike-geodesic")]
    specs += [
        CheckSpec("theorem1.integration_closed_form", integration_error, 1e-6),
        CheckSpec("theorem1.kaluza_klein_theta_drift", kaluza_klein_theta_drift, 1e-6),
    ]
    return specs


def _theorem2(seed):
    n = "horizontal-helix-untwisted"
    return [CheckSpec("theorem2.untwisted_horizontal_classified_hor0", _matches(n, Theorem.HOR0)),
            CheckSpec("theorem2.untwisted_horizontal_constants", _constants_match(n))]


def _theorem3(seed):
    n = "horizontal-helix"
    return [CheckSpec("theorem3.horizontal_helix_classified_hort", _matches(n, Theorem.HORT)),
            CheckSpec("theorem3.horizontal_helix_constants", _constants_match(n)),
            CheckSpec("theorem3.kaluza_klein_circle_is_none", _is_none("kk-horizontal-circle"))]


def fig2_theta_drift() -> float:
    sample, rep = fixture_report("fig2-oblique")
    th = rep.theta[sample.core]
    return float(relative_spread(th))


def fig2_theta_error() -> float:
    sample = fixture_report("fig2-oblique")[0]
    return float(np.max(np.abs(slant_closed_form(sample.params, sample)[sample.core] - math.sqrt(2))))


def fig2_sigma_error() -> float:
    sample = fixture_report("fig2-oblique")[0]
    return float(np.max(np.abs(sample.sigma[sample.core] - 0.5)))


def _theorem4(seed):
    f = "fig2-oblique"
    return [
        CheckSpec("theorem4.fig2_theta_is_sqrt2", fig2_theta_error, 1e-8),
        CheckSpec("theorem4.fig2_theta_drift", fig2_theta_drift, 1e-8),
        CheckSpec("theorem4.fig2_sigma_is_half", fig2_sigma_error, 1e-10),
        CheckSpec("theorem4.fig2_kappa_is_sqrt3_over_2", _measured(f, "kappa", math.sqrt(3) / 2), 1e-4),
        CheckSpec("theorem4.fig2_tau_is_zero", _measured(f, "tau", 0.0), 1e-4),
        CheckSpec("theorem4.fig2_classified_obl0", _matches(f, Theorem.OBL0)),
        CheckSpec("theorem4.untwisted_oblique_classified_obl0", _matches("oblique-untwisted", Theorem.OBL0)),
        CheckSpec("theorem4.untwisted_oblique_constants", _constants_match("oblique-untwisted")),
    ]


def _theorem5(seed):
    f = "fig2-oblique"

    def not_helix():
        rep = fixture_report("oblique-nonconstant-speed")[1]
        return (not rep.is_helix and rep.matched_theorem is Theorem.NONE,
                relative_spread(rep.theta, 1.0))

    return [CheckSpec("theorem5.fig2_classified_oblt", _matches(f, Theorem.OBLT)),
            CheckSpec("theorem5.fig2_constants", _constants_match(f)),
            CheckSpec("theorem5.nonconstant_speed_not_helix", not_helix)]


def _theorem6(seed):
    n = "null-horizontal"
    return [CheckSpec("theorem6.null_horizontal_classified_nullhor", _matches(n, Theorem.NULLHOR)),
            CheckSpec("theorem6.null_horizontal_kappa_magnitude", _measured(n, "kappa", 0.5, absolute=True),
                      1e-3)]


def _theorem7(seed):
    n = "null-oblique"
    return [CheckSpec("theorem7.null_oblique_classified_nullobl", _matches(n, Theorem.NULLOBL)),
            CheckSpec("theorem7.null_oblique_kappa_is_half", _measured(n, "kappa", 0.5), 1e-3),
            CheckSpec("theorem7.null_legendre_rejected", _is_none("null-legendre"))]


_SUITE_BUILDERS = {
    "structure": _structure,
    "theorem1": _theorem1,
    "theorem2": _theorem2,
    "theorem3": _theorem3,
    "theorem4": _theorem4,
    "theorem5": _theorem5,
    "theorem6": _theorem6,
    "theorem7": _theorem7,
}

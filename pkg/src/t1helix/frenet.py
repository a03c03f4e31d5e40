"""Frenet frames of non-null curves and Cartan frames of null curves in T₁M.

Frenet equations (arc length, T = λ'):

    ∇̃_T T  = ε₁ κ W₁
    ∇̃_T W₁ = −ε_λ κ T − ε₂ τ W₂
    ∇̃_T W₂ = ε₁ τ W₁

Cartan equations (pseudo-arc, W = λ'', N = −λ''' − κλ'):

    ∇̃_T T = W,   ∇̃_T W = −κ T − N,   ∇̃_T N = κ W

Frames are built from the closed-form covariant derivatives.  Equation
residuals use an independent route: finite differences of the frame fields
along the sample's stencil, pushed through the connection along the curve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .connection import CurveDerivatives, curve_acceleration, curve_jerk, velocity
from .curves import CurveSample, is_constant
from .errors import FrameDegenerate, LightlikeNormal, NotNull, NotPseudoArc
from .gnat import (MetricParams, T1Vec, UnitTangentPoint, adapted_coefficients,
                   adapted_gram_diagonal, frame_norm, from_adapted, g_tilde)

TOL_FRAME = 1e-7
LIGHTLIKE_RATIO = 1e-9
NULL_TOL = 1e-6
PSEUDO_ARC_TOL = 1e-5


def _sign(x):
    return np.where(np.asarray(x) >= 0, 1.0, -1.0)


def frame_gram(params: MetricParams, frame, pt: UnitTangentPoint) -> np.ndarray:
    """Pairwise G̃ inner products of a list of T1Vec fields, shape (..., k, k)."""
    k = len(frame)
    rows = [[g_tilde(params, pt, frame[i], frame[j]) for j in range(k)] for i in range(k)]
    return np.moveaxis(np.array(rows, dtype=float), (0, 1), (-2, -1))


def _binormal(params: MetricParams, pt: UnitTangentPoint, T: T1Vec, W1: T1Vec, orientation: float):
    """Unit G̃-normal to T and W₁ with det[T, W₁, W₂] > 0 in the adapted basis."""
    D = adapted_gram_diagonal(params, pt)
    cT = adapted_coefficients(params, pt, T)
    cW = adapted_coefficients(params, pt, W1)
    c = np.cross(D * cT, D * cW)
    n2 = np.sum(D * c * c, axis=-1)
    eps2 = _sign(n2)
    with np.errstate(invalid="ignore", divide="ignore"):
        c = c / np.sqrt(np.abs(n2))[..., None]
        # stencil points may be degenerate; NaNs there never reach the core statistics
        det = np.linalg.det(np.nan_to_num(np.stack([cT, cW, c], axis=-2)))
    c = c * (_sign(det) * orientation)[..., None]
    return from_adapted(pt, c), eps2


def _frenet_frame(params, surface, D: CurveDerivatives, pt: UnitTangentPoint, orientation):
    T = velocity(D)
    acc = curve_acceleration(params, surface, D)
    jerk = curve_jerk(params, surface, D)
    eps_l = _sign(g_tilde(params, pt, T, T))
    a2 = g_tilde(params, pt, acc, acc)
    eps1 = _sign(a2)
    kappa = np.sqrt(np.abs(a2))
    W1 = acc / (eps1 * kappa)
    W2, eps2 = _binormal(params, pt, T, W1, orientation)
    tau = -g_tilde(params, pt, jerk, W2) / (eps1 * kappa)
    return dict(T=T, W1=W1, W2=W2, kappa=kappa, tau=tau, eps_l=eps_l, eps1=eps1, eps2=eps2,
                acc=acc, jerk=jerk)


@dataclass
class FrenetData:
    t: np.ndarray
    T: T1Vec
    W1: T1Vec
    W2: T1Vec
    kappa: np.ndarray
    tau: np.ndarray
    eps_lambda: int
    eps1: int
    eps2: int
    residuals: dict
    gram_residual: float
    core: np.ndarray
    kappa_prime: np.ndarray | None = None
    acc: T1Vec | None = None
    jerk: T1Vec | None = None

    @property
    def kappa_mean(self) -> float:
        return float(np.mean(self.kappa[self.core]))

    @property
    def tau_mean(self) -> float:
        return float(np.mean(self.tau[self.core]))

    def to_json(self) -> dict:
        c = self.core
        return {"kappa": self.kappa[c].tolist(), "tau": self.tau[c].tolist(),
                "eps": [self.eps_lambda, self.eps1, self.eps2], "residuals": dict(self.residuals),
                "gram_residual": self.gram_residual}


def _common_sign(values, name: str) -> int:
    v = np.unique(values)
    if v.size != 1:
        raise FrameDegenerate(f"{name} changes sign along the window")
    return int(v[0])


def frenet_apparatus(params: MetricParams, sample: CurveSample, tol_frame: float = TOL_FRAME,
                     orientation: float = 1.0) -> FrenetData:
    """Frenet frame, curvature and torsion of an arc-length non-null sample."""
    if params != sample.params:
        sample = sample.with_params(params)
    core = sample.core
    surface = sample.surface
    pt = sample.point
    T = velocity(sample.derivs)
    s2 = g_tilde(params, pt, T, T)[core]
    if np.any(np.abs(s2) < 1e-9):
        raise NotNull("Frenet apparatus needs a non-null curve")
    acc = curve_acceleration(params, surface, sample.derivs)
    size = frame_norm(params, pt, acc)[core]
    if np.min(size) < tol_frame:
        raise FrameDegenerate(f"min ‖λ''‖ = {np.min(size):.3e} below {tol_frame:g}: geodesic or near-geodesic")
    a2 = g_tilde(params, pt, acc, acc)[core]
    if np.any(np.abs(a2) < LIGHTLIKE_RATIO * size**2):
        raise LightlikeNormal("λ'' is lightlike somewhere: Frenet theory does not apply")

    F = _frenet_frame(params, surface, sample.derivs, pt, orientation)
    eps_l = _common_sign(F["eps_l"][core], "ε_λ")
    eps1 = _common_sign(F["eps1"][core], "ε₁")
    eps2 = _common_sign(F["eps2"][core], "ε₂")

    # finite-difference route on the stencil layout
    L = _frenet_frame(params, surface, sample.layout, sample.layout_point, orientation)
    dT, dW1, dW2 = sample.nabla(L["T"]), sample.nabla(L["W1"]), sample.nabla(L["W2"])
    k, tau = F["kappa"], F["tau"]
    r1 = dT - F["W1"] * (eps1 * k)
    r2 = dW1 + F["T"] * (eps_l * k) + F["W2"] * (eps2 * tau)
    r3 = dW2 - F["W1"] * (eps1 * tau)
    res = {name: float(np.max(frame_norm(params, pt, r)[core]))
           for name, r in (("T", r1), ("W1", r2), ("W2", r3))}
    G = frame_gram(params, [F["T"], F["W1"], F["W2"]], pt)[core]
    gram_res = float(np.max(np.abs(G - np.diag([eps_l, eps1, eps2]))))
    return FrenetData(sample.t, F["T"], F["W1"], F["W2"], k, tau, eps_l, eps1, eps2, res,
                      gram_res, core, sample.ddt(L["kappa"]), F["acc"], F["jerk"])


@dataclass
class CartanData:
    t: np.ndarray
    T: T1Vec
    W: T1Vec
    N: T1Vec
    kappa: np.ndarray
    residuals: dict
    gram_residuals: dict
    core: np.ndarray
    jerk: T1Vec | None = None

    @property
    def kappa_mean(self) -> float:
        return float(np.mean(self.kappa[self.core]))

    def to_json(self) -> dict:
        return {"kappa_lightlike": self.kappa[self.core].tolist(),
                "residuals": dict(self.residuals), "gram_residuals": dict(self.gram_residuals)}


def _cartan_frame(params, surface, D: CurveDerivatives, pt: UnitTangentPoint):
    T = velocity(D)
    W = curve_acceleration(params, surface, D)
    J = curve_jerk(params, surface, D)
    kappa = 0.5 * g_tilde(params, pt, J, J)
    N = -J - T * kappa
    return T, W, N, kappa


def cartan_apparatus(params: MetricParams, sample: CurveSample) -> CartanData:
    """Cartan frame and lightlike curvature of a pseudo-arc null sample."""
    if params != sample.params:
        sample = sample.with_params(params)
    core = sample.core
    surface = sample.surface
    pt = sample.point
    T, W, N, kappa = _cartan_frame(params, surface, sample.derivs, pt)
    tt = g_tilde(params, pt, T, T)[core]
    if np.max(np.abs(tt)) > NULL_TOL:
        raise NotNull(f"max |G̃(λ',λ')| = {np.max(np.abs(tt)):.3e}")
    ww = g_tilde(params, pt, W, W)[core]
    if np.max(np.abs(ww - 1.0)) > PSEUDO_ARC_TOL:
        raise NotPseudoArc(f"max |G̃(λ'',λ'') − 1| = {np.max(np.abs(ww - 1.0)):.3e}")

    LT, LW, LN, _ = _cartan_frame(params, surface, sample.layout, sample.layout_point)
    dT, dW, dN = sample.nabla(LT), sample.nabla(LW), sample.nabla(LN)
    r1 = dT - W
    r2 = dW + T * kappa + N
    r3 = dN - W * kappa
    res = {name: float(np.max(frame_norm(params, pt, r)[core]))
           for name, r in (("T", r1), ("W", r2), ("N", r3))}

    gram = {
        "TT": g_tilde(params, pt, T, T),
        "NN": g_tilde(params, pt, N, N),
        "TW": g_tilde(params, pt, T, W),
        "NW": g_tilde(params, pt, N, W),
        "TN": g_tilde(params, pt, T, N) - 1.0,
        "WW": g_tilde(params, pt, W, W) - 1.0,
    }
    gram = {k: float(np.max(np.abs(v[core]))) for k, v in gram.items()}
    # second Cartan equation read as a curvature: κ = −G̃(∇̃_T W + N, N)
    kappa_alt = -g_tilde(params, pt, dW + N, N)
    res["kappa_consistency"] = float(np.max(np.abs(kappa_alt - kappa)[core]))
    return CartanData(sample.t, T, W, N, kappa, res, gram, core, -N - T * kappa)


def constant_curvatures(data) -> dict:
    out = {"kappa_constant": is_constant(data.kappa[data.core])}
    if isinstance(data, FrenetData):
        tau = data.tau[data.core]
        out["tau_constant"] = bool(np.max(np.abs(tau)) < 1e-6 or is_constant(tau))
    return out

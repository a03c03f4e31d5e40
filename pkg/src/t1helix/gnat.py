"""Kaluza-Klein type g-natural metrics on the unit tangent bundle T₁M.

A tangent vector of T₁M at (x, u) is written X^h + Y^t with X, Y ∈ T_xM and
g(Y, u) = 0.  With constants a, c, d (and b = 0) the metric reads

    G̃(X₁^h, X₂^h) = (a+c) g(X₁, X₂) + d g(X₁, u) g(X₂, u)
    G̃(X^h, Y^t)   = 0
    G̃(Y₁^t, Y₂^t) = a g(Y₁, Y₂) − a g(Y₁, u) g(Y₂, u)

and the derived constants are α = a(a+c), φ = a+c+d, ε = sign φ.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateMetric
from .surfaces import SurfaceModel, inner

UNIT_TOL = 1e-10


@dataclass(frozen=True)
class MetricParams:
    a: float
    c: float
    d: float
    b: float = 0.0

    def __post_init__(self):
        if self.b != 0:
            raise ValueError("only Kaluza-Klein type metrics (b = 0) are supported")
        for name in ("a", "c", "d"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def alpha(self) -> float:
        return self.a * (self.a + self.c)

    @property
    def phi(self) -> float:
        return self.a + self.c + self.d

    @property
    def eps(self) -> int:
        return 1 if self.phi > 0 else -1

    @property
    def sqrt_abs_phi(self) -> float:
        return math.sqrt(abs(self.phi))

    @property
    def nondegenerate(self) -> bool:
        return self.alpha != 0 and self.phi != 0

    def require_nondegenerate(self) -> "MetricParams":
        if not self.nondegenerate:
            raise DegenerateMetric(f"alpha={self.alpha}, phi={self.phi}: G̃ is degenerate")
        return self

    def as_dict(self) -> dict:
        return {"a": self.a, "c": self.c, "d": self.d, "alpha": self.alpha,
                "phi": self.phi, "epsilon": self.eps}


def _scalar(k):
    """Broadcast a scalar or an array of scalars against vectors (..., 2)."""
    return np.asarray(k, dtype=float)[..., None]


@dataclass(frozen=True)
class UnitTangentPoint:
    """A point (x, u) of T₁M; ``g`` caches the base metric at x."""

    base: np.ndarray
    u: np.ndarray
    g: np.ndarray

    @classmethod
    def at(cls, surface: SurfaceModel, base, u, tol: float = UNIT_TOL) -> "UnitTangentPoint":
        base = surface.check_point(base)
        u = np.asarray(u, dtype=float)
        g = surface.metric(base)
        norm = inner(g, u, u)
        if np.any(np.abs(norm - 1.0) > tol):
            raise ValueError(f"u is not unit: max |g(u,u) - 1| = {np.max(np.abs(norm - 1.0)):.3e}")
        return cls(base, u, g)

    def dot(self, X, Y):
        return inner(self.g, X, Y)

    def lift(self, X) -> np.ndarray:
        return tangential_lift(X, self)

    def normal(self) -> np.ndarray:
        """Unit vector w ⟂ u with det[u, w] > 0 in chart components."""
        gu = np.einsum("...ij,...j->...i", self.g, self.u)
        w = np.stack([-gu[..., 1], gu[..., 0]], axis=-1)
        return w / np.sqrt(np.abs(self.dot(w, w)))[..., None]


@dataclass(frozen=True)
class T1Vec:
    """X^h + Y^t, stored as the pair (horiz = X, tang = Y)."""

    horiz: np.ndarray
    tang: np.ndarray

    @classmethod
    def zeros(cls, shape=()) -> "T1Vec":
        return cls(np.zeros(tuple(shape) + (2,)), np.zeros(tuple(shape) + (2,)))

    def __add__(self, other: "T1Vec") -> "T1Vec":
        return T1Vec(self.horiz + other.horiz, self.tang + other.tang)

    def __sub__(self, other: "T1Vec") -> "T1Vec":
        return T1Vec(self.horiz - other.horiz, self.tang - other.tang)

    def __neg__(self) -> "T1Vec":
        return T1Vec(-self.horiz, -self.tang)

    def __mul__(self, k) -> "T1Vec":
        k = _scalar(k)
        return T1Vec(k * self.horiz, k * self.tang)

    __rmul__ = __mul__

    def __truediv__(self, k) -> "T1Vec":
        return self * (1.0 / np.asarray(k, dtype=float))

    def __getitem__(self, idx) -> "T1Vec":
        return T1Vec(self.horiz[idx], self.tang[idx])


def tangential_lift(X, pt: UnitTangentPoint) -> np.ndarray:
    """X − g(X, u) u: the component of X tangent to the unit circle of T_xM."""
    X = np.asarray(X, dtype=float)
    return X - _scalar(pt.dot(X, pt.u)) * pt.u


def g_tilde(params: MetricParams, pt: UnitTangentPoint, Z1: T1Vec, Z2: T1Vec):
    a, ac, d = params.a, params.a + params.c, params.d
    X1u, X2u = pt.dot(Z1.horiz, pt.u), pt.dot(Z2.horiz, pt.u)
    Y1u, Y2u = pt.dot(Z1.tang, pt.u), pt.dot(Z2.tang, pt.u)
    return (ac * pt.dot(Z1.horiz, Z2.horiz) + d * X1u * X2u
            + a * pt.dot(Z1.tang, Z2.tang) - a * Y1u * Y2u)


# -- adapted orthonormal frame -------------------------------------------------


def adapted_coefficients(params: MetricParams, pt: UnitTangentPoint, Z: T1Vec) -> np.ndarray:
    """Components of Z in the basis (w^h, u^h, w^t), with w = ``pt.normal()``."""
    w = pt.normal()
    sw = pt.dot(w, w)
    return np.stack([pt.dot(Z.horiz, w) * sw, pt.dot(Z.horiz, pt.u), pt.dot(Z.tang, w) * sw],
                    axis=-1)


def adapted_gram_diagonal(params: MetricParams, pt: UnitTangentPoint) -> np.ndarray:
    """G̃ is diagonal in (w^h, u^h, w^t); returns the three diagonal entries."""
    w = pt.normal()
    sw = pt.dot(w, w)
    ones = np.ones_like(sw)
    return np.stack([(params.a + params.c) * sw, params.phi * ones, params.a * sw], axis=-1)


def from_adapted(pt: UnitTangentPoint, coeffs) -> T1Vec:
    w = pt.normal()
    coeffs = np.asarray(coeffs, dtype=float)
    return T1Vec(_scalar(coeffs[..., 0]) * w + _scalar(coeffs[..., 1]) * pt.u,
                 _scalar(coeffs[..., 2]) * w)


def frame_norm(params: MetricParams, pt: UnitTangentPoint, Z: T1Vec):
    """Positive-definite size of Z: coefficient norm in a G̃-orthonormal frame.

    The basis (w^h, u^h, w^t) is G̃-orthogonal with entries D; rescaling to unit
    length gives coefficients c_i √|D_i|, whose squares are summed.
    """
    coeffs = adapted_coefficients(params, pt, Z)
    D = adapted_gram_diagonal(params, pt)
    return np.sqrt(np.sum(coeffs**2 * np.abs(D), axis=-1))


# -- signature -----------------------------------------------------------------


def _reference_point(base_signature) -> UnitTangentPoint:
    """A point with an orthonormal chart frame of the given signature, u spacelike."""
    p, q = base_signature
    if (p, q) == (2, 0):
        g = np.eye(2)
    elif (p, q) == (1, 1):
        g = np.diag([-1.0, 1.0])
    else:
        raise ValueError(f"base signature must be (2, 0) or (1, 1), got {base_signature}")
    return UnitTangentPoint(np.zeros(2), np.array([0.0, 1.0]), g)


def adapted_gram(params: MetricParams, base_signature) -> np.ndarray:
    """3×3 Gram matrix of G̃ in the basis {e₁^h, u^h, e₂^t}, e₁ ⟂ u, u = e₂."""
    pt = _reference_point(base_signature)
    e1 = np.array([1.0, 0.0])
    z = np.zeros(2)
    basis = [T1Vec(e1, z), T1Vec(pt.u, z), T1Vec(z, e1)]
    return np.array([[g_tilde(params, pt, A, B) for B in basis] for A in basis])


def t1_signature(params: MetricParams, base_signature) -> tuple[int, int]:
    """(positive, negative) eigenvalue counts of G̃."""
    params.require_nondegenerate()
    gram = adapted_gram(params, base_signature)
    ev = np.linalg.eigvalsh(gram)
    scale = max(1.0, float(np.max(np.abs(ev))))
    if np.any(np.abs(ev) < 1e-14 * scale):
        raise DegenerateMetric(f"G̃ has a null direction (eigenvalues {ev})")
    return int(np.sum(ev > 0)), int(np.sum(ev < 0))


def signature_case(params: MetricParams, base_signature, n: int = 2):
    """Case number and signature from the closed-form case table, or (None, None).

    k is the number of negative directions of the base metric.  The first case
    additionally needs φ > 0; with α > 0, a+c > 0 and φ < 0 no case applies.
    """
    k = base_signature[1]
    al, ph, ac, a = params.alpha, params.phi, params.a + params.c, params.a
    if al > 0 and ac > 0 and a > 0 and ph > 0:
        return 1, (2 * n - 2 * k - 1, 2 * k)
    if al > 0 and ph > 0 and ac < 0 and a < 0:
        return 2, (2 * k + 1, 2 * n - 2 * k - 2)
    if al > 0 and ph < 0 and ac < 0 and a < 0:
        return 3, (2 * k, 2 * n - 2 * k - 1)
    if al < 0 and ph > 0:
        return 4, (n, n - 1)
    if al < 0 and ph < 0:
        return 5, (n - 1, n)
    return None, None


# -- (para)contact structure -----------------------------------------------------


class StructureClass(str, Enum):
    CONTACT = "ContactPseudoMetric"
    PARACONTACT = "ParacontactMetric"
    NEITHER = "Neither"


def _close(x: float, y: float) -> bool:
    return math.isclose(x, y, rel_tol=1e-12, abs_tol=1e-14)


def structure_class(params: MetricParams) -> StructureClass:
    if params.alpha > 0 and _close(abs(params.phi), 4 * params.alpha):
        return StructureClass.CONTACT
    if params.alpha < 0 and _close(abs(params.phi), -4 * params.alpha):
        return StructureClass.PARACONTACT
    return StructureClass.NEITHER


def k_contact_check(params: MetricParams, surface: SurfaceModel) -> bool:
    """True iff the base curvature equals (a+c)/a."""
    return _close(surface.gauss_curvature, (params.a + params.c) / params.a)


def reeb_field(params: MetricParams, pt: UnitTangentPoint) -> T1Vec:
    u = np.asarray(pt.u, dtype=float)
    return T1Vec(u / params.sqrt_abs_phi, np.zeros_like(u))


def eta_form(params: MetricParams, pt: UnitTangentPoint, Z: T1Vec):
    return params.sqrt_abs_phi * pt.dot(Z.horiz, pt.u)


def phi_tensor(params: MetricParams, pt: UnitTangentPoint, Z: T1Vec) -> T1Vec:
    s = params.sqrt_abs_phi
    a, ac = params.a, params.a + params.c
    return T1Vec(-s / (2 * ac) * tangential_lift(Z.tang, pt),
                 s / (2 * a) * tangential_lift(Z.horiz, pt))


def structure_report(params: MetricParams, surface: SurfaceModel | None = None) -> dict:
    cls = structure_class(params)
    k = None
    if surface is not None and cls is not StructureClass.NEITHER:
        k = k_contact_check(params, surface)
    return {"alpha": params.alpha, "phi": params.phi, "epsilon": params.eps,
            "class": cls.value, "k_contact": k}

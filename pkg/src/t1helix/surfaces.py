"""Constant-curvature surfaces M²(κ) in explicit coordinate charts.

Every model is a quadric in a flat ambient space of some signature, scaled by a
radius R so that the Gaussian curvature is ±1/R².  Charts are diagonal:

=================  ===========  ==================================  ==========
kind               coords       metric                              κ
=================  ===========  ==================================  ==========
Sphere             (θ, φ)       R² diag(1, sin²θ)                   +1/R²
HyperbolicPlane    (r, φ)       R² diag(1, sinh²r)                  −1/R²
DeSitter2          (θ, φ)       R² diag(−1, cosh²θ)                 +1/R²
AntiDeSitter2      (ρ, τ)       R² diag(1, −cosh²ρ)                 −1/R²
=================  ===========  ==================================  ==========

AntiDeSitter2 is the de Sitter point set with the metric reversed: the same map f
into ℝ³ with ambient metric diag(1, −1, −1).  Reversing the metric flips the sign
of the curvature and swaps timelike and spacelike directions, so a unit timelike
geodesic of 𝕊²₁ becomes a unit spacelike geodesic here.

The sphere's polar axis is the second ambient coordinate, so that the circle
(cos t, 1, sin t)/√2 is the latitude θ = π/4.  The de Sitter chart is
f(θ, φ) = R(sinh θ, cosh θ sin φ, cosh θ cos φ) in Minkowski space diag(−1, 1, 1).

Points and vectors are plain arrays whose last axis has length 2; every
function broadcasts over leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateMetric, InsufficientSamples, NoEmbedding, PointOutsideChart

SINGULAR_GUARD = 1e-6


class SurfaceKind(str, Enum):
    SPHERE = "Sphere"
    HYPERBOLIC = "HyperbolicPlane"
    DESITTER = "DeSitter2"
    ANTIDESITTER = "AntiDeSitter2"


@dataclass(frozen=True)
class Chart:
    names: tuple[str, str]
    lower: tuple[float, float]
    upper: tuple[float, float]
    periodic: tuple[bool, bool]
    singular: tuple[tuple[int, float], ...] = ()  # (axis, value) pairs


_CHARTS = {
    SurfaceKind.SPHERE: Chart(("theta", "phi"), (0.0, -np.inf), (np.pi, np.inf),
                              (False, True), ((0, 0.0), (0, np.pi))),
    SurfaceKind.HYPERBOLIC: Chart(("r", "phi"), (0.0, -np.inf), (np.inf, np.inf),
                                  (False, True), ((0, 0.0),)),
    SurfaceKind.DESITTER: Chart(("theta", "phi"), (-np.inf, -np.inf), (np.inf, np.inf),
                                (False, True)),
    SurfaceKind.ANTIDESITTER: Chart(("rho", "tau"), (-np.inf, -np.inf), (np.inf, np.inf),
                                    (False, True)),
}

_AMBIENT = {
    SurfaceKind.SPHERE: np.array([1.0, 1.0, 1.0]),
    SurfaceKind.HYPERBOLIC: np.array([-1.0, 1.0, 1.0]),
    SurfaceKind.DESITTER: np.array([-1.0, 1.0, 1.0]),
    SurfaceKind.ANTIDESITTER: np.array([1.0, -1.0, -1.0]),
}


def inner(g, X, Y):
    """g(X, Y) for metric arrays (..., 2, 2) and vectors (..., 2)."""
    return np.einsum("...i,...ij,...j->...", X, g, Y)


def contract_gamma(gam, X, Y):
    """Γ^k_ij X^i Y^j."""
    return np.einsum("...kij,...i,...j->...k", gam, X, Y)


def christoffels_from_metric(g, dg):
    """Levi-Civita symbols Γ[k, i, j] from g_ij and dg[l, i, j] = ∂_l g_ij."""
    ginv = np.linalg.inv(g)
    # lowered symbols Γ_lij = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
    low = 0.5 * (np.einsum("...ijl->...lij", dg) + np.einsum("...jil->...lij", dg) - dg)
    return np.einsum("...kl,...lij->...kij", ginv, low)


@dataclass(frozen=True)
class SurfaceModel:
    """A constant-curvature pseudo-Riemannian surface in a fixed chart."""

    kind: SurfaceKind
    radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", SurfaceKind(self.kind))
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"radius must be positive, got {self.radius}")

    @classmethod
    def from_curvature(cls, kind, kappa: float) -> "SurfaceModel":
        kind = SurfaceKind(kind)
        positive = kind in (SurfaceKind.SPHERE, SurfaceKind.DESITTER)
        if kappa == 0 or (kappa > 0) != positive:
            raise ValueError(f"{kind.value} cannot carry curvature {kappa}")
        return cls(kind, 1.0 / np.sqrt(abs(kappa)))

    @property
    def gauss_curvature(self) -> float:
        sign = 1.0 if self.kind in (SurfaceKind.SPHERE, SurfaceKind.DESITTER) else -1.0
        return sign / self.radius**2

    @property
    def base_signature(self) -> tuple[int, int]:
        if self.kind in (SurfaceKind.SPHERE, SurfaceKind.HYPERBOLIC):
            return (2, 0)
        return (1, 1)

    @property
    def chart(self) -> Chart:
        return _CHARTS[self.kind]

    @property
    def ambient_metric(self) -> np.ndarray:
        return _AMBIENT[self.kind]

    @property
    def quadric_value(self) -> float:
        """⟨f, f⟩ in the ambient metric for every point f of the model."""
        sign = 1.0 if self.kind in (SurfaceKind.SPHERE, SurfaceKind.DESITTER) else -1.0
        return sign * self.radius**2

    # -- chart checks -------------------------------------------------------

    def check_point(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.shape[-1] != 2:
            raise PointOutsideChart(f"chart points have 2 coordinates, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise PointOutsideChart("non-finite chart coordinates")
        ch = self.chart
        for axis in range(2):
            if ch.periodic[axis]:
                continue
            c = p[..., axis]
            if np.any(c <= ch.lower[axis]) or np.any(c >= ch.upper[axis]):
                raise PointOutsideChart(
                    f"{ch.names[axis]} outside ({ch.lower[axis]}, {ch.upper[axis]})")
        for axis, value in ch.singular:
            if np.any(np.abs(p[..., axis] - value) < SINGULAR_GUARD):
                raise PointOutsideChart(f"{ch.names[axis]} within guard band of {value}")
        return p

    # -- metric -------------------------------------------------------------

    def _diag(self, p):
        """Diagonal metric entries (E, G) and their derivatives along the first coordinate."""
        s = p[..., 0]
        R2 = self.radius**2
        if self.kind is SurfaceKind.SPHERE:
            E, G, dG = np.ones_like(s), np.sin(s) ** 2, np.sin(2 * s)
        elif self.kind is SurfaceKind.HYPERBOLIC:
            E, G, dG = np.ones_like(s), np.sinh(s) ** 2, np.sinh(2 * s)
        elif self.kind is SurfaceKind.DESITTER:
            E, G, dG = -np.ones_like(s), np.cosh(s) ** 2, np.sinh(2 * s)
        else:
            E, G, dG = np.ones_like(s), -np.cosh(s) ** 2, -np.sinh(2 * s)
        return R2 * E, R2 * G, R2 * dG

    def metric(self, p) -> np.ndarray:
        """Metric components g_ij at p, shape (..., 2, 2)."""
        p = self.check_point(p)
        E, G, _ = self._diag(p)
        out = np.zeros(p.shape[:-1] + (2, 2))
        out[..., 0, 0] = E
        out[..., 1, 1] = G
        return out

    def metric_derivatives(self, p) -> np.ndarray:
        """dg[..., l, i, j] = ∂_l g_ij in closed form."""
        p = self.check_point(p)
        _, _, dG = self._diag(p)
        out = np.zeros(p.shape[:-1] + (2, 2, 2))
        out[..., 0, 1, 1] = dG
        return out

    def christoffels(self, p) -> np.ndarray:
        """Γ[..., k, i, j] of the Levi-Civita connection at p."""
        g = self.metric(p)
        det = np.linalg.det(g)
        if np.any(np.abs(det) < 1e-12 * self.radius**4):
            raise DegenerateMetric("metric determinant vanishes")
        return christoffels_from_metric(g, self.metric_derivatives(p))

    # -- embedding ----------------------------------------------------------

    def embed(self, p) -> np.ndarray:
        """Point of the model quadric in ℝ³ with metric ``ambient_metric``."""
        p = self.check_point(p)
        s, w = p[..., 0], p[..., 1]
        R = self.radius
        if self.kind is SurfaceKind.SPHERE:
            X = (np.sin(s) * np.cos(w), np.cos(s), np.sin(s) * np.sin(w))
        elif self.kind is SurfaceKind.HYPERBOLIC:
            X = (np.cosh(s), np.sinh(s) * np.cos(w), np.sinh(s) * np.sin(w))
        elif self.kind in (SurfaceKind.DESITTER, SurfaceKind.ANTIDESITTER):
            X = (np.sinh(s), np.cosh(s) * np.sin(w), np.cosh(s) * np.cos(w))
        else:  # pragma: no cover - every kind above has an embedding
            raise NoEmbedding(self.kind.value)
        return R * np.stack(X, axis=-1)

    def embed_jacobian(self, p) -> np.ndarray:
        """J[..., A, i] = ∂ embed^A / ∂ p^i."""
        p = self.check_point(p)
        s, w = p[..., 0], p[..., 1]
        z = np.zeros_like(s)
        if self.kind is SurfaceKind.SPHERE:
            ds = (np.cos(s) * np.cos(w), -np.sin(s), np.cos(s) * np.sin(w))
            dw = (-np.sin(s) * np.sin(w), z, np.sin(s) * np.cos(w))
        elif self.kind is SurfaceKind.HYPERBOLIC:
            ds = (np.sinh(s), np.cosh(s) * np.cos(w), np.cosh(s) * np.sin(w))
            dw = (z, -np.sinh(s) * np.sin(w), np.sinh(s) * np.cos(w))
        else:
            ds = (np.cosh(s), np.sinh(s) * np.sin(w), np.sinh(s) * np.cos(w))
            dw = (z, np.cosh(s) * np.cos(w), -np.cosh(s) * np.sin(w))
        return self.radius * np.stack([np.stack(ds, -1), np.stack(dw, -1)], axis=-1)

    def chart_vector(self, p, X_ambient) -> np.ndarray:
        """Chart components of an ambient vector tangent to the model at p."""
        J = self.embed_jacobian(p)
        cov = np.einsum("...Ai,A,...A->...i", J, self.ambient_metric, X_ambient)
        return np.einsum("...ij,...j->...i", np.linalg.inv(self.metric(p)), cov)

    def chart_coords(self, X) -> np.ndarray:
        """Inverse of :meth:`embed` (angles returned in (−π, π])."""
        X = np.asarray(X, dtype=float) / self.radius
        if self.kind is SurfaceKind.SPHERE:
            s = np.arccos(np.clip(X[..., 1], -1.0, 1.0))
            w = np.arctan2(X[..., 2], X[..., 0])
        elif self.kind is SurfaceKind.HYPERBOLIC:
            s = np.arccosh(np.maximum(X[..., 0], 1.0))
            w = np.arctan2(X[..., 2], X[..., 1])
        else:
            s = np.arcsinh(X[..., 0])
            w = np.arctan2(X[..., 1], X[..., 2])
        return np.stack([s, w], axis=-1)

    def ambient_inner(self, X, Y) -> np.ndarray:
        return np.sum(self.ambient_metric * X * Y, axis=-1)


# -- numerical oracles --------------------------------------------------------


def metric_fd(surface: SurfaceModel, p, h: float | None = None) -> np.ndarray:
    """∂_l g_ij by 5-point central differences of the sampled metric."""
    p = np.asarray(p, dtype=float)
    h = 1e-4 * surface.radius if h is None else h
    out = np.zeros(p.shape[:-1] + (2, 2, 2))
    for l in range(2):
        e = np.zeros(2)
        e[l] = h
        out[..., l, :, :] = (surface.metric(p - 2 * e) - 8 * surface.metric(p - e)
                             + 8 * surface.metric(p + e) - surface.metric(p + 2 * e)) / (12 * h)
    return out


def gauss_curvature_numeric(surface: SurfaceModel, p, h: float | None = None) -> np.ndarray:
    """Gaussian curvature R_1212 / det g using only sampled metric values."""
    p = np.asarray(p, dtype=float)
    h = 1e-3 * surface.radius if h is None else h

    def gamma_at(q):
        return christoffels_from_metric(surface.metric(q), metric_fd(surface, q, h * 0.1))

    gam = gamma_at(p)
    dgam = np.zeros(p.shape[:-1] + (2, 2, 2, 2))  # [m, k, i, j] = ∂_m Γ^k_ij
    for m in range(2):
        e = np.zeros(2)
        e[m] = h
        dgam[..., m, :, :, :] = (gamma_at(p - 2 * e) - 8 * gamma_at(p - e)
                                 + 8 * gamma_at(p + e) - gamma_at(p + 2 * e)) / (12 * h)
    # R^a_{b c d} with (b, c, d) = (1, 0, 1) in zero-based indices
    a_vec = (dgam[..., 0, :, 1, 1] - dgam[..., 1, :, 0, 1]
             + np.einsum("...ae,...e->...a", gam[..., :, 0, :], gam[..., :, 1, 1])
             - np.einsum("...ae,...e->...a", gam[..., :, 1, :], gam[..., :, 0, 1]))
    g = surface.metric(p)
    return np.einsum("...a,...a->...", g[..., 0, :], a_vec) / np.linalg.det(g)


def fd_derivative(values, h: float) -> np.ndarray:
    """5-point central difference along axis 0; the two end samples on each side are NaN."""
    values = np.asarray(values, dtype=float)
    out = np.full_like(values, np.nan)
    if values.shape[0] >= 5:
        out[2:-2] = (values[:-4] - 8 * values[1:-3] + 8 * values[3:-1] - values[4:]) / (12 * h)
    return out


def base_cov_deriv(surface: SurfaceModel, x, W, t_grid, t: float) -> np.ndarray:
    """∇_ẋ W at parameter t for a path and field sampled on a uniform grid."""
    t_grid = np.asarray(t_grid, dtype=float)
    x = np.asarray(x, dtype=float)
    W = np.asarray(W, dtype=float)
    if t_grid.size < 5:
        raise InsufficientSamples("need at least 5 samples")
    h = t_grid[1] - t_grid[0]
    i = int(round((t - t_grid[0]) / h))
    if i < 2 or i > t_grid.size - 3 or abs(t_grid[i] - t) > 1e-9 * max(1.0, abs(h)):
        raise InsufficientSamples(f"t={t} is not an interior grid point")
    sl = slice(i - 2, i + 3)
    xd = fd_derivative(x[sl], h)[2]
    Wd = fd_derivative(W[sl], h)[2]
    return Wd + contract_gamma(surface.christoffels(x[i]), xd, W[i])

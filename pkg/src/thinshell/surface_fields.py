"""Fields defined on a surface, backed by smooth ambient extensions.

Tangential derivatives of these fields are extension independent, so any
convenient smooth formula in the ambient coordinates will do. Thickness
profiles for shells are surface scalars; tangential test vector fields
are surface vectors whose tangency is enforced by projection.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np
import sympy as sp

from .ambient import XS, AmbientScalar, AmbientVector
from .surface import SurfacePoints, chart_gradient, chart_jacobian


class SurfaceScalar:
    """Scalar on the surface with ambient gradient and hessian access."""

    def __init__(self, ambient: AmbientScalar, label: str = ""):
        self.ambient = ambient
        self.label = label or str(ambient.expr)

    @staticmethod
    def from_expr(expr, label: str = "") -> "SurfaceScalar":
        return SurfaceScalar(AmbientScalar.from_expr(expr), label)

    @staticmethod
    def constant(c: float) -> "SurfaceScalar":
        return SurfaceScalar.from_expr(sp.Float(c), label=f"const:{c}")

    @staticmethod
    def linear_z(a: float, b: float) -> "SurfaceScalar":
        return SurfaceScalar.from_expr(sp.Float(a) + sp.Float(b) * XS[2], label=f"linear_z:{a},{b}")

    def values(self, pts: SurfacePoints) -> np.ndarray:
        return self.ambient.val(pts.y)

    def ambient_gradient(self, pts: SurfacePoints) -> np.ndarray:
        return self.ambient.grad(pts.y)

    def ambient_hessian(self, pts: SurfacePoints) -> np.ndarray:
        return self.ambient.hess(pts.y)

    def grad_gamma(self, pts: SurfacePoints) -> np.ndarray:
        g = pts.geom
        return np.einsum("nij,nj->ni", g.tangent_projector, self.ambient_gradient(pts))


class SurfaceVector:
    """Vector field on the surface with ambient jacobian access.

    Not necessarily tangential; use ``tangential_part`` for projected
    fields. ``grad_gamma`` returns the matrix D_i v_j with projected rows.
    """

    def __init__(self, ambient: AmbientVector, label: str = ""):
        self.ambient = ambient
        self.label = label or "vector"

    @staticmethod
    def from_exprs(exprs: Sequence, label: str = "") -> "SurfaceVector":
        return SurfaceVector(AmbientVector.from_exprs(exprs), label)

    def values(self, pts: SurfacePoints) -> np.ndarray:
        return self.ambient.val(pts.y)

    def ambient_jacobian(self, pts: SurfacePoints) -> np.ndarray:
        return self.ambient.jac(pts.y)

    def grad_gamma(self, pts: SurfacePoints) -> np.ndarray:
        g = pts.geom
        return np.einsum("nik,nkj->nij", g.tangent_projector, self.ambient_jacobian(pts))


class TangentialVector:
    """Projection P q of an ambient vector field onto the tangent plane.

    Tangency holds exactly. The surface gradient uses the product rule with
    the exact chart derivatives of the projector, so no finite differences
    enter at first order.
    """

    def __init__(self, ambient: AmbientVector, label: str = ""):
        self.ambient = ambient
        self.label = label or "tangential"

    @staticmethod
    def from_exprs(exprs: Sequence, label: str = "") -> "TangentialVector":
        return TangentialVector(AmbientVector.from_exprs(exprs), label)

    def values(self, pts: SurfacePoints) -> np.ndarray:
        g = pts.geom
        return np.einsum("nij,nj->ni", g.tangent_projector, self.ambient.val(pts.y))

    def grad_gamma(self, pts: SurfacePoints) -> np.ndarray:
        g = pts.geom
        q = self.ambient.val(pts.y)
        jq = self.ambient.jac(pts.y)
        dn = g.normal_chart_derivs                  # (N, 2, 3)
        # d_a (P q) = (d_a P) q + P (d_a q), with d_a P from the normal.
        dP_q = -(np.einsum("naj,nj->na", dn, q))[:, :, None] * g.normal[:, None, :] - (
            np.einsum("nj,nj->n", g.normal, q)
        )[:, None, None] * dn
        dq = np.einsum("nad,ndj->naj", g.tangents, jq)
        P_dq = np.einsum("njk,nak->naj", g.tangent_projector, dq)
        dv = dP_q + P_dq                            # (N, 2, 3)
        coeff = np.einsum("nab,nbj->naj", g.metric_inv, dv)
        return np.einsum("nai,naj->nij", g.tangents, coeff)


class SurfaceScalarFn:
    """Surface scalar given only by values; derivatives via chart FD."""

    def __init__(self, fn: Callable[[SurfacePoints], np.ndarray], label: str = "fn"):
        self._fn = fn
        self.label = label

    def values(self, pts: SurfacePoints) -> np.ndarray:
        return self._fn(pts)

    def grad_gamma(self, pts: SurfacePoints) -> np.ndarray:
        return chart_gradient(pts.surface, self._fn, pts)


class SurfaceVectorFn:
    """Surface vector given only by values; derivatives via chart FD."""

    def __init__(self, fn: Callable[[SurfacePoints], np.ndarray], label: str = "fn"):
        self._fn = fn
        self.label = label

    def values(self, pts: SurfacePoints) -> np.ndarray:
        return self._fn(pts)

    def grad_gamma(self, pts: SurfacePoints) -> np.ndarray:
        return chart_jacobian(pts.surface, self._fn, pts)


_SCALAR_REGISTRY: dict[str, Callable[..., SurfaceScalar]] = {}


def register_scalar(name: str, builder: Callable[..., SurfaceScalar]) -> None:
    """Register a custom thickness profile for config-file selection."""
    _SCALAR_REGISTRY[name] = builder


def parse_scalar(spec: "str | float | SurfaceScalar") -> SurfaceScalar:
    """Parse a thickness-profile spec.

    Accepted forms: a number, ``"const:c"``, ``"linear_z:a,b"`` meaning
    a + b*x3, or a registered custom name.
    """
    if isinstance(spec, SurfaceScalar):
        return spec
    if isinstance(spec, (int, float)):
        return SurfaceScalar.constant(float(spec))
    if not isinstance(spec, str):
        raise TypeError(f"cannot interpret scalar spec {spec!r}")
    head, _, rest = spec.partition(":")
    if head == "const":
        return SurfaceScalar.constant(float(rest))
    if head == "linear_z":
        a, b = (float(v) for v in rest.split(","))
        return SurfaceScalar.linear_z(a, b)
    if head in _SCALAR_REGISTRY:
        return _SCALAR_REGISTRY[head](rest) if rest else _SCALAR_REGISTRY[head]()
    raise ValueError(f"unknown scalar spec {spec!r}")

"""Fields on a thin shell, evaluated in pullback coordinates.

A volume field is sampled at a batch of surface points together with
signed offsets r along the normal, where r has shape (N,) or (N, K).
Outputs carry the shape of r plus component axes. Gradient convention:
grad[..., i] = d_i phi for scalars, grad[..., i, j] = d_i u_j for vectors,
hess[..., i, j(, k)] = d_i d_j phi(_k).

Analytic ambient fields carry exact derivatives. Pullback-composite
fields get exact first derivatives through the normal-coordinate chain
rule whenever their surface part has exact tangential derivatives, and
fall back to fourth-order finite differences otherwise. Hessians of
composite fields are finite-difference completions and must be enabled
explicitly.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .ambient import AmbientScalar, AmbientVector
from .charts import FD_OFFSETS, FD_WEIGHTS
from .surface import SurfacePoints

__all__ = [
    "CapabilityError",
    "VolumeField",
    "AmbientField",
    "ConstantExtension",
    "SeparableField",
    "PullbackField",
    "positions",
    "bc",
    "resolvent",
    "shifted_projector",
    "divergence_values",
    "curl_values",
    "strain_values",
    "normal_derivative_values",
    "second_normal_derivative_values",
]


class CapabilityError(RuntimeError):
    """A field lacks the derivative order the operation requires."""


def bc(arr: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Broadcast a per-point array (N, ...) against offsets of shape (N, K)."""
    if r.ndim == 2:
        return np.asarray(arr)[:, None, ...]
    return np.asarray(arr)


def positions(pts: SurfacePoints, r: np.ndarray) -> np.ndarray:
    """Ambient positions y + r n(y), shape r.shape + (3,)."""
    g = pts.geom
    return bc(pts.y, r) + r[..., None] * bc(g.normal, r)


def resolvent(pts: SurfacePoints, r: np.ndarray) -> np.ndarray:
    """Inverse of (I - r W), shape r.shape + (3, 3)."""
    W = bc(pts.geom.weingarten, r)
    M = np.eye(3) - r[..., None, None] * W
    return np.linalg.inv(M)


def shifted_projector(pts: SurfacePoints, r: np.ndarray) -> np.ndarray:
    """(I - r W) P, the matrix weighting gradients inside averaged derivatives."""
    g = pts.geom
    W = bc(g.weingarten, r)
    M = np.eye(3) - r[..., None, None] * W
    return M @ bc(g.tangent_projector, r)


class VolumeField:
    """Base class; subclasses implement values and (usually) gradients."""

    vector: bool = False
    label: str = "field"

    def values(self, pts: SurfacePoints, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def gradients(self, pts: SurfacePoints, r: np.ndarray) -> np.ndarray:
        raise CapabilityError(f"{self.label} has no gradient access")

    def hessians(self, pts: SurfacePoints, r: np.ndarray) -> np.ndarray:
        raise CapabilityError(
            f"{self.label} has no hessian access; second-order norms are unavailable"
        )

    @property
    def has_hessian(self) -> bool:
        return False

    def __add__(self, other: "VolumeField") -> "VolumeField":
        return LinearCombination([(1.0, self), (1.0, other)])

    def __sub__(self, other: "VolumeField") -> "VolumeField":
        return LinearCombination([(1.0, self), (-1.0, other)])

    def __rmul__(self, c: float) -> "VolumeField":
        return LinearCombination([(float(c), self)])


class LinearCombination(VolumeField):
    def __init__(self, terms):
        flat = []
        for c, f in terms:
            if isinstance(f, LinearCombination):
                flat.extend((c * ci, fi) for ci, fi in f.terms)
            else:
                flat.append((c, f))
        self.terms = flat
        self.vector = flat[0][1].vector
        if any(f.vector != self.vector for _, f in flat):
            raise ValueError("cannot combine scalar and vector fields")
        self.label = " + ".join(f"{c:g}*{f.label}" for c, f in flat)

    def values(self, pts, r):
        return sum(c * f.values(pts, r) for c, f in self.terms)

    def gradients(self, pts, r):
        return sum(c * f.gradients(pts, r) for c, f in self.terms)

    def hessians(self, pts, r):
        return sum(c * f.hessians(pts, r) for c, f in self.terms)

    @property
    def has_hessian(self):
        return all(f.has_hessian for _, f in self.terms)


class AmbientField(VolumeField):
    """A smooth ambient field restricted to the shell. Fully analytic."""

    def __init__(self, ambient, label: str = ""):
        self.ambient = ambient
        self.vector = isinstance(ambient, AmbientVector)
        self.label = label or ("ambient vector" if self.vector else "ambient scalar")

    @staticmethod
    def scalar(expr, label: str = "") -> "AmbientField":
        return AmbientField(AmbientScalar.from_expr(expr), label)

    @staticmethod
    def vector_field(exprs, label: str = "") -> "AmbientField":
        return AmbientField(AmbientVector.from_exprs(exprs), label)

    def values(self, pts, r):
        return self.ambient.val(positions(pts, r))

    def gradients(self, pts, r):
        x = positions(pts, r)
        return self.ambient.jac(x) if self.vector else self.ambient.grad(x)

    def hessians(self, pts, r):
        return self.ambient.hess(positions(pts, r))

    @property
    def has_hessian(self):
        return True


class _FDHessianMixin:
    """Hessians by the chain rule applied to the field's own gradients."""

    _hessian_enabled = False
    _hessian_step = 1e-3

    @property
    def has_hessian(self) -> bool:
        return self._hessian_enabled

    def hessians(self, pts, r):
        if not self._hessian_enabled:
            raise CapabilityError(
                f"{self.label}: hessian access disabled; wrap with allow_fd_hessian"
            )
        comps = (3, 3) if self.vector else (3,)
        return _chain_rule_derivative(
            self._shell, pts, r, self.gradients, comps, h=self._hessian_step
        )


def _tangential_chart_derivative(pts, r, fn, h):
    """Chart-direction derivatives of fn(pts, r) at frozen r.

    Returns a two-element list of arrays shaped like the output of ``fn``,
    one per chart axis, using fourth-order stencils with per-point step
    scaling.
    """
    t = pts.geom.tangents
    scale = 1.0 / np.maximum(np.linalg.norm(t, axis=-1), 1e-8)  # (N, 2)
    outs = []
    for axis in (0, 1):
        ha = h * scale[:, axis]
        acc = None
        for off, wgt in zip(FD_OFFSETS, FD_WEIGHTS):
            ds = np.zeros_like(pts.s)
            ds[:, axis] = off * ha
            term = wgt * np.asarray(fn(pts.displaced(ds), r))
            acc = term if acc is None else acc + term
        div = ha.reshape((ha.shape[0],) + (1,) * (acc.ndim - 1))
        outs.append(acc / div)
    return outs


def _chain_rule_derivative(shell, pts, r, fn, comps: tuple[int, ...], h: float = 1e-4):
    """Ambient derivative of a pullback map via the normal-coordinate chain rule.

    ``fn(pts, r)`` returns an array of shape r.shape + comps. The result has
    shape r.shape + (3,) + comps, the new axis indexing the ambient
    derivative direction: the resolvent of the shape operator applied to
    the frozen-offset tangential gradient, plus the normal times the
    radial derivative.
    """
    g = pts.geom
    d_chart = _tangential_chart_derivative(pts, r, fn, h)
    stacked = np.stack(d_chart, axis=r.ndim)                    # r.shape + (2,) + comps
    flat = stacked.reshape(r.shape + (2, -1))                   # (..., 2, C)
    ci = bc(g.metric_inv, r)
    coeffs = np.einsum("...ab,...bc->...ac", ci, flat)          # (..., 2, C)
    tang = bc(g.tangents, r)
    gy = np.einsum("...ai,...ac->...ic", tang, coeffs)          # (..., 3, C)

    hr = h * max(shell.radial_scale, 1e-6)
    acc = None
    for off, wgt in zip(FD_OFFSETS, FD_WEIGHTS):
        term = wgt * np.asarray(fn(pts, r + off * hr))
        acc = term if acc is None else acc + term
    dr = (acc / hr).reshape(r.shape + (1, -1))                  # (..., 1, C)

    Rinv = resolvent(pts, r)
    out = np.einsum("...ik,...kc->...ic", Rinv, gy)             # (..., 3, C)
    n = bc(g.normal, r)
    out = out + n[..., :, None] * dr
    return out.reshape(r.shape + (3,) + comps)


class PullbackField(_FDHessianMixin, VolumeField):
    """A field given by its pullback values, differentiated numerically."""

    def __init__(self, shell, value_fn: Callable, vector: bool, label: str = "pullback",
                 allow_fd_hessian: bool = False, chart_step: float = 1e-4):
        self._shell = shell
        self._fn = value_fn
        self.vector = vector
        self.label = label
        self._hessian_enabled = allow_fd_hessian
        self._chart_step = chart_step

    def values(self, pts, r):
        return self._fn(pts, r)

    def gradients(self, pts, r):
        comps = (3,) if self.vector else ()
        return _chain_rule_derivative(self._shell, pts, r, self._fn, comps, h=self._chart_step)


class ConstantExtension(_FDHessianMixin, VolumeField):
    """Extension of a surface field along normal lines; r-independent values.

    The ambient gradient is exact: the resolvent of the shape operator
    applied to the tangential gradient of the surface field.
    """

    def __init__(self, shell, sfield, vector: bool | None = None, allow_fd_hessian: bool = True):
        self._shell = shell
        self.sfield = sfield
        probe = np.atleast_1d(sfield.values(shell.qpts))
        self.vector = (probe.ndim == 2) if vector is None else vector
        self.label = f"extension({getattr(sfield, 'label', 'surface field')})"
        self._hessian_enabled = allow_fd_hessian

    def values(self, pts, r):
        vals = self.sfield.values(pts)
        out = bc(vals, r)
        target = r.shape + ((3,) if self.vector else ())
        return np.broadcast_to(out, target).copy()

    def gradients(self, pts, r):
        Rinv = resolvent(pts, r)
        grad = bc(self.sfield.grad_gamma(pts), r)
        if self.vector:
            return np.einsum("...ik,...kj->...ij", Rinv, grad)
        return np.einsum("...ik,...k->...i", Rinv, grad)


class SeparableField(_FDHessianMixin, VolumeField):
    """Product of a surface field and a smooth radial profile.

    The profile is a numpy Polynomial in r; first derivatives are exact.
    """

    def __init__(self, shell, sfield, profile, vector: bool | None = None,
                 allow_fd_hessian: bool = True, label: str = ""):
        self._shell = shell
        self.sfield = sfield
        self.profile = profile
        self._dprofile = profile.deriv()
        probe = np.atleast_1d(sfield.values(shell.qpts))
        self.vector = (probe.ndim == 2) if vector is None else vector
        self.label = label or f"separable({getattr(sfield, 'label', 'surface')})"
        self._hessian_enabled = allow_fd_hessian

    def values(self, pts, r):
        rho = self.profile(r)
        base = bc(self.sfield.values(pts), r)
        if self.vector:
            return base * rho[..., None]
        return np.broadcast_to(base, r.shape).copy() * rho

    def gradients(self, pts, r):
        Rinv = resolvent(pts, r)
        grad = bc(self.sfield.grad_gamma(pts), r)
        rho = self.profile(r)
        drho = self._dprofile(r)
        n = bc(pts.geom.normal, r)
        base = bc(self.sfield.values(pts), r)
        if self.vector:
            tangential = np.einsum("...ik,...kj->...ij", Rinv, grad) * rho[..., None, None]
            radial = n[..., :, None] * (base * drho[..., None])[..., None, :]
            return tangential + radial
        tangential = np.einsum("...ik,...k->...i", Rinv, grad) * rho[..., None]
        radial = n * (np.broadcast_to(base, r.shape) * drho)[..., None]
        return tangential + radial


# ----------------------------------------------------------------------
# Pointwise calculus on gradients
# ----------------------------------------------------------------------

def divergence_values(field: VolumeField, pts, r) -> np.ndarray:
    G = field.gradients(pts, r)
    return np.trace(G, axis1=-2, axis2=-1)


def curl_values(field: VolumeField, pts, r) -> np.ndarray:
    G = field.gradients(pts, r)
    return np.stack(
        [
            G[..., 1, 2] - G[..., 2, 1],
            G[..., 2, 0] - G[..., 0, 2],
            G[..., 0, 1] - G[..., 1, 0],
        ],
        axis=-1,
    )


def strain_values(field: VolumeField, pts, r) -> np.ndarray:
    G = field.gradients(pts, r)
    return 0.5 * (G + np.swapaxes(G, -1, -2))


def normal_derivative_values(field: VolumeField, pts, r) -> np.ndarray:
    G = field.gradients(pts, r)
    n = bc(pts.geom.normal, r)
    if field.vector:
        return np.einsum("...i,...ij->...j", n, G)
    return np.einsum("...i,...i->...", n, G)


def second_normal_derivative_values(field: VolumeField, pts, r) -> np.ndarray:
    """d^2/dr^2 of the pullback; from the hessian when available, else FD."""
    if field.has_hessian:
        H = field.hessians(pts, r)
        n = bc(pts.geom.normal, r)
        if field.vector:
            return np.einsum("...i,...j,...ijk->...k", n, n, H)
        return np.einsum("...i,...j,...ij->...", n, n, H)
    shell = getattr(field, "_shell", None)
    hr = 1e-4 * (shell.radial_scale if shell is not None else 1.0)
    weights = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
    offsets = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    acc = None
    for off, wgt in zip(offsets, weights):
        term = wgt * field.values(pts, r + off * hr)
        acc = term if acc is None else acc + term
    return acc / hr**2

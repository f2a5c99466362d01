"""Norms over a shell, its boundary sheets, and the base surface.

Volume norms integrate with the exact radial volume factor; the sup norm
is approximated by sampling on a refined grid, which is documented
behavior rather than a true supremum. Surface Sobolev norms accept any
object with ``values`` and, for first order, ``grad_gamma``; second-order
surface norms use chart finite differences of the gradient.
"""

from __future__ import annotations

import numpy as np

from .shell import Shell
from .surface import SurfacePoints
from .volume_fields import CapabilityError, VolumeField, normal_derivative_values

__all__ = ["NormSuite"]


class NormSuite:
    """Norm evaluators bound to one shell."""

    def __init__(self, shell: Shell):
        self.shell = shell
        self.surface = shell.surface
        self._dense = None

    # ------------------------------------------------------------------
    # Volume norms
    # ------------------------------------------------------------------
    def lp_volume(self, field: VolumeField, p: float = 2.0) -> float:
        q = self.shell.qpts
        vals = field.values(q, self.shell.r_nodes)
        mag = np.abs(vals) if not field.vector else np.linalg.norm(vals, axis=-1)
        return self.shell.volume_integral(mag**p) ** (1.0 / p)

    def gradient_lp_volume(self, field: VolumeField, p: float = 2.0) -> float:
        q = self.shell.qpts
        G = field.gradients(q, self.shell.r_nodes)
        mag = np.sqrt(np.sum(G * G, axis=tuple(range(2, G.ndim))))
        return self.shell.volume_integral(mag**p) ** (1.0 / p)

    def hessian_lp_volume(self, field: VolumeField, p: float = 2.0) -> float:
        if not field.has_hessian:
            raise CapabilityError(
                f"{field.label}: second-order norm requested but the field "
                "has no hessian access"
            )
        q = self.shell.qpts
        H = field.hessians(q, self.shell.r_nodes)
        mag = np.sqrt(np.sum(H * H, axis=tuple(range(2, H.ndim))))
        return self.shell.volume_integral(mag**p) ** (1.0 / p)

    def sobolev_volume(self, field: VolumeField, order: int, p: float = 2.0) -> float:
        """W^{order,p} norm over the shell, order 0, 1, or 2."""
        terms = [self.lp_volume(field, p) ** p]
        if order >= 1:
            terms.append(self.gradient_lp_volume(field, p) ** p)
        if order >= 2:
            terms.append(self.hessian_lp_volume(field, p) ** p)
        return float(sum(terms)) ** (1.0 / p)

    def normal_derivative_lp(self, field: VolumeField, p: float = 2.0) -> float:
        q = self.shell.qpts
        vals = normal_derivative_values(field, q, self.shell.r_nodes)
        mag = np.abs(vals) if not field.vector else np.linalg.norm(vals, axis=-1)
        return self.shell.volume_integral(mag**p) ** (1.0 / p)

    def linf_volume(self, field: VolumeField, refine: int = 2) -> float:
        """Sup norm approximated on a refine-times-denser sampling grid."""
        pts, r = self._dense_grid(refine)
        vals = field.values(pts, r)
        mag = np.abs(vals) if not field.vector else np.linalg.norm(vals, axis=-1)
        return float(np.max(mag))

    def inner_volume(self, f1: VolumeField, f2: VolumeField, flat: bool = False) -> float:
        """L^2 inner product over the shell; ``flat`` drops the volume factor."""
        q = self.shell.qpts
        v1 = f1.values(q, self.shell.r_nodes)
        v2 = f2.values(q, self.shell.r_nodes)
        prod = v1 * v2 if not f1.vector else np.einsum("...i,...i->...", v1, v2)
        if flat:
            return self.shell.volume_integral_flat(prod)
        return self.shell.volume_integral(prod)

    def _dense_grid(self, refine: int):
        if self._dense is not None and self._dense[0] == refine:
            return self._dense[1], self._dense[2]
        nt, np_ = self.surface.resolution
        nt, np_ = refine * nt, refine * np_
        u = np.linspace(-1.0, 1.0, nt + 2)[1:-1]
        if self.surface.name == "torus":
            th = 2.0 * np.pi * np.arange(nt) / nt
        else:
            th = np.arccos(u)
        ph = 2.0 * np.pi * np.arange(np_) / np_
        TH, PH = np.meshgrid(th, ph, indexing="ij")
        s = np.column_stack([TH.ravel(), PH.ravel()])
        pts = self.surface.points(self.surface.quad_chart, s)
        g0 = self.shell.config.g0.values(pts)
        g1 = self.shell.config.g1.values(pts)
        eps = self.shell.config.epsilon
        frac = np.linspace(0.0, 1.0, 2 * self.shell.config.radial_nodes)
        r = eps * (g0[:, None] + (g1 - g0)[:, None] * frac[None, :])
        self._dense = (refine, pts, r)
        return pts, r

    # ------------------------------------------------------------------
    # Boundary norms
    # ------------------------------------------------------------------
    def lp_boundary(self, field: VolumeField, side: int, p: float = 2.0) -> float:
        q = self.shell.qpts
        rb = self.shell.boundary_radius(q, side)
        vals = field.values(q, rb)
        mag = np.abs(vals) if not field.vector else np.linalg.norm(vals, axis=-1)
        return self.shell.boundary_integral(mag**p, side) ** (1.0 / p)

    # ------------------------------------------------------------------
    # Surface norms
    # ------------------------------------------------------------------
    def _surface_mag(self, arr: np.ndarray) -> np.ndarray:
        if arr.ndim == 1:
            return np.abs(arr)
        return np.sqrt(np.sum(arr * arr, axis=tuple(range(1, arr.ndim))))

    def lp_surface(self, sfield, p: float = 2.0) -> float:
        q = self.shell.qpts
        mag = self._surface_mag(np.asarray(sfield.values(q)))
        return float(np.sum(self.surface.quad_weights * mag**p)) ** (1.0 / p)

    def w1p_surface(self, sfield, p: float = 2.0) -> float:
        q = self.shell.qpts
        v = self._surface_mag(np.asarray(sfield.values(q)))
        gmag = self._surface_mag(np.asarray(sfield.grad_gamma(q)))
        total = np.sum(self.surface.quad_weights * (v**p + gmag**p))
        return float(total) ** (1.0 / p)

    def w2p_surface(self, sfield, p: float = 2.0) -> float:
        q = self.shell.qpts
        v = self._surface_mag(np.asarray(sfield.values(q)))
        gmag = self._surface_mag(np.asarray(sfield.grad_gamma(q)))
        if hasattr(sfield, "hess_gamma"):
            h = np.asarray(sfield.hess_gamma(q))
        else:
            h = self._fd_surface_hessian(sfield, q)
        hmag = self._surface_mag(h)
        total = np.sum(self.surface.quad_weights * (v**p + gmag**p + hmag**p))
        return float(total) ** (1.0 / p)

    def _fd_surface_hessian(self, sfield, q: SurfacePoints) -> np.ndarray:
        # Tangential derivative of the (tensor-valued) gradient field by
        # chart FD; a larger step since the inner gradient may itself be FD.
        from .charts import FD_OFFSETS, FD_WEIGHTS

        g = q.geom
        scale = 1.0 / np.maximum(np.linalg.norm(g.tangents, axis=-1), 1e-8)
        derivs = []
        for axis in (0, 1):
            ha = 1e-3 * scale[:, axis]
            acc = None
            for off, wgt in zip(FD_OFFSETS, FD_WEIGHTS):
                ds = np.zeros_like(q.s)
                ds[:, axis] = off * ha
                term = wgt * np.asarray(sfield.grad_gamma(q.displaced(ds)))
                acc = term if acc is None else acc + term
            derivs.append(acc / ha.reshape((-1,) + (1,) * (acc.ndim - 1)))
        d = np.stack(derivs, axis=1)                  # (N, 2) + tail
        tail = d.shape[2:]
        flat = d.reshape(len(q), 2, -1)
        coeffs = np.einsum("nab,nbc->nac", g.metric_inv, flat)
        out = np.einsum("nai,nac->nic", g.tangents, coeffs)
        return out.reshape((len(q), 3) + tail)

    def sobolev_surface(self, sfield, order: int, p: float = 2.0) -> float:
        if order == 0:
            return self.lp_surface(sfield, p)
        if order == 1:
            return self.w1p_surface(sfield, p)
        if order == 2:
            return self.w2p_surface(sfield, p)
        raise ValueError("order must be 0, 1, or 2")

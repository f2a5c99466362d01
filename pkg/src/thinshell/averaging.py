"""Thin-direction operators: averages, impermeable extension, decomposition.

The average of a shell field at a surface point is the plain mean of the
pullback over the local radial interval, using the same Gauss nodes as
the volume quadrature so that averaging commutes with discretization.
The impermeable extension lifts a tangential surface field into the
shell with zero normal flux through both boundary sheets, via a
corrector built from the boundary tilt fields.
"""

from __future__ import annotations

import numpy as np

from .shell import Shell
from .surface import SurfacePoints, chart_jacobian
from .volume_fields import (
    VolumeField,
    _FDHessianMixin,
    _chain_rule_derivative,
    bc,
    resolvent,
    shifted_projector,
)

__all__ = [
    "thin_average",
    "thin_average_tangential",
    "average_gradient",
    "AveragedField",
    "TangentialAverage",
    "PsiField",
    "psi_gradient_corrector",
    "impermeable_extension",
    "EepsField",
    "decompose",
    "GField",
    "blended_frames",
]


def thin_average(shell: Shell, field: VolumeField, pts: SurfacePoints) -> np.ndarray:
    """Mean of the pullback along the local radial interval, (N,) or (N, 3)."""
    r, v = shell.radial_rule(pts)
    _, _, g = shell.g_values(pts)
    vals = field.values(pts, r)
    width = shell.config.epsilon * g
    if field.vector:
        return np.einsum("nk,nkj->nj", v, vals) / width[:, None]
    return np.einsum("nk,nk->n", v, vals) / width


def thin_average_tangential(shell: Shell, field: VolumeField, pts: SurfacePoints) -> np.ndarray:
    """Tangential projection of the componentwise average."""
    avg = thin_average(shell, field, pts)
    return np.einsum("nij,nj->ni", pts.geom.tangent_projector, avg)


def psi_gradient_corrector(shell: Shell, pts: SurfacePoints, r: np.ndarray) -> np.ndarray:
    """Corrector weighting the normal derivative inside averaged gradients.

    Interpolates the tangential gradients of the two thickness profiles
    across the radial interval; vanishing when both profiles are constant.
    """
    g0, g1, g = shell.g_values(pts)
    eps = shell.config.epsilon
    d0 = shell.config.g0.grad_gamma(pts)
    d1 = shell.config.g1.grad_gamma(pts)
    c1 = (r - eps * bc(g0, r)) / bc(g, r)
    c0 = (eps * bc(g1, r) - r) / bc(g, r)
    return c1[..., None] * bc(d1, r) + c0[..., None] * bc(d0, r)


def average_gradient(shell: Shell, field: VolumeField, pts: SurfacePoints) -> np.ndarray:
    """Tangential gradient of the averaged field, via the exact identity.

    Combines the average of the shifted-projector-weighted ambient
    gradient with the average of the normal derivative times the
    thickness corrector. Scalars give (N, 3); vectors (N, 3, 3) with
    out[n, i, j] the i-th tangential derivative of component j.
    """
    r, v = shell.radial_rule(pts)
    _, _, g = shell.g_values(pts)
    width = shell.config.epsilon * g
    grads = field.gradients(pts, r)
    B = shifted_projector(pts, r)
    psi = psi_gradient_corrector(shell, pts, r)
    n = bc(pts.geom.normal, r)
    if field.vector:
        core = np.einsum("nkim,nkmj->nkij", B, grads)
        dn = np.einsum("nki,nkij->nkj", n, grads)
        core = core + psi[..., :, None] * dn[..., None, :]
        return np.einsum("nk,nkij->nij", v, core) / width[:, None, None]
    core = np.einsum("nkim,nkm->nki", B, grads)
    dn = np.einsum("nki,nki->nk", n, grads)
    core = core + psi * dn[..., None]
    return np.einsum("nk,nki->ni", v, core) / width[:, None]


class AveragedField:
    """The averaged field as a surface field, with exact tangential gradient."""

    def __init__(self, shell: Shell, field: VolumeField):
        self.shell = shell
        self.field = field
        self.vector = field.vector
        self.label = f"average({field.label})"

    def values(self, pts: SurfacePoints) -> np.ndarray:
        return thin_average(self.shell, self.field, pts)

    def grad_gamma(self, pts: SurfacePoints) -> np.ndarray:
        return average_gradient(self.shell, self.field, pts)


class TangentialAverage:
    """Projected average of a vector shell field, as a tangential surface field."""

    def __init__(self, shell: Shell, field: VolumeField):
        if not field.vector:
            raise ValueError("tangential average needs a vector field")
        self.shell = shell
        self.field = field
        self.label = f"tangential_average({field.label})"

    def values(self, pts: SurfacePoints) -> np.ndarray:
        return thin_average_tangential(self.shell, self.field, pts)

    def grad_gamma(self, pts: SurfacePoints) -> np.ndarray:
        # Product rule through the projector: the chart derivative of the
        # projector contributes W_ij (n.m) + n_j (W m)_i.
        g = pts.geom
        m = thin_average(self.shell, self.field, pts)
        davg = average_gradient(self.shell, self.field, pts)
        W, n, P = g.weingarten, g.normal, g.tangent_projector
        n_dot_m = np.einsum("nj,nj->n", n, m)
        Wm = np.einsum("nik,nk->ni", W, m)
        return (
            W * n_dot_m[:, None, None]
            + np.einsum("ni,nj->nij", Wm, n)
            + np.einsum("nik,nkj->nij", davg, P)
        )


class PsiField(VolumeField):
    """Corrector making constant extensions impermeable; exact gradient.

    Its pullback interpolates the boundary tilt fields of the two sheets
    across the radial interval, scaled by the thickness.
    """

    vector = True

    def __init__(self, shell: Shell):
        self.shell = shell
        self.label = "impermeability corrector"

    def _pieces(self, pts: SurfacePoints):
        shell = self.shell
        tau0 = shell.tangential_shift(pts, 0)
        tau1 = shell.tangential_shift(pts, 1)
        return tau0, tau1

    def values(self, pts: SurfacePoints, r: np.ndarray) -> np.ndarray:
        shell = self.shell
        g0, g1, g = shell.g_values(pts)
        eps = shell.config.epsilon
        tau0, tau1 = self._pieces(pts)
        c1 = (r - eps * bc(g0, r)) / bc(g, r)
        c0 = (eps * bc(g1, r) - r) / bc(g, r)
        return c1[..., None] * bc(tau1, r) + c0[..., None] * bc(tau0, r)

    def gradients(self, pts: SurfacePoints, r: np.ndarray) -> np.ndarray:
        shell = self.shell
        eps = shell.config.epsilon
        g0, g1, g = shell.g_values(pts)
        tau0, tau1 = self._pieces(pts)
        Rinv = resolvent(pts, r)
        n = bc(pts.geom.normal, r)

        def ext_grad_vec(mat):
            return np.einsum("...ik,...kj->...ij", Rinv, bc(mat, r))

        def ext_grad_scal(vec):
            return np.einsum("...ik,...k->...i", Rinv, bc(vec, r))

        dg0 = ext_grad_scal(shell.config.g0.grad_gamma(pts))
        dg1 = ext_grad_scal(shell.config.g1.grad_gamma(pts))
        dg = dg1 - dg0
        dtau0 = ext_grad_vec(self._grad_gamma_shift(pts, 0))
        dtau1 = ext_grad_vec(self._grad_gamma_shift(pts, 1))

        gb = bc(g, r)
        vals = self.values(pts, r)
        w1 = r - eps * bc(g0, r)
        w0 = eps * bc(g1, r) - r
        t0 = bc(tau0, r)
        t1 = bc(tau1, r)
        inner = (
            (n - eps * dg0)[..., :, None] * t1[..., None, :]
            + w1[..., None, None] * dtau1
            + (eps * dg1 - n)[..., :, None] * t0[..., None, :]
            + w0[..., None, None] * dtau0
        )
        return -dg[..., :, None] * vals[..., None, :] / gb[..., None, None] + inner / gb[..., None, None]

    def _grad_gamma_shift(self, pts: SurfacePoints, side: int) -> np.ndarray:
        key = ("grad_gamma_shift", id(self.shell.config), side)
        if key not in pts.cache:
            pts.cache[key] = chart_jacobian(
                pts.surface, lambda p: self.shell.tangential_shift(p, side), pts
            )
        return pts.cache[key]


class EepsField(_FDHessianMixin, VolumeField):
    """Impermeable extension of a tangential surface field.

    Adds a normal component proportional to the corrector so the result
    has zero flux through both boundary sheets.
    """

    vector = True

    def __init__(self, shell: Shell, v, validate: bool = True, allow_fd_hessian: bool = True):
        self._shell = shell
        self.shell = shell
        self.v = v
        self.psi = PsiField(shell)
        self.label = f"impermeable_extension({getattr(v, 'label', 'v')})"
        self._hessian_enabled = allow_fd_hessian
        if validate:
            qp = shell.qpts
            flux = np.einsum("ni,ni->n", v.values(qp), qp.geom.normal)
            if np.max(np.abs(flux)) > 1e-10:
                raise ValueError("impermeable extension needs a tangential input field")

    def values(self, pts: SurfacePoints, r: np.ndarray) -> np.ndarray:
        vbar = bc(self.v.values(pts), r)
        psi = self.psi.values(pts, r)
        n = bc(pts.geom.normal, r)
        coef = np.einsum("...j,...j->...", vbar, psi)
        target = r.shape + (3,)
        return np.broadcast_to(vbar, target) + coef[..., None] * n

    def gradients(self, pts: SurfacePoints, r: np.ndarray) -> np.ndarray:
        Rinv = resolvent(pts, r)
        gv = bc(self.v.grad_gamma(pts), r)
        grad_vbar = np.einsum("...ik,...kj->...ij", Rinv, gv)
        psi = self.psi.values(pts, r)
        grad_psi = self.psi.gradients(pts, r)
        vbar = bc(self.v.values(pts), r)
        n = bc(pts.geom.normal, r)
        W = bc(pts.geom.weingarten, r)
        grad_nbar = -np.einsum("...ik,...kj->...ij", Rinv, W)
        coef = np.einsum("...j,...j->...", vbar, psi)
        dcoef = np.einsum("...ij,...j->...i", grad_vbar, psi) + np.einsum(
            "...ij,...j->...i", grad_psi, vbar
        )
        return grad_vbar + dcoef[..., :, None] * n[..., None, :] + coef[..., None, None] * grad_nbar


def impermeable_extension(shell: Shell, v) -> EepsField:
    """Lift a tangential surface field into the shell with zero boundary flux."""
    return EepsField(shell, v)


def decompose(shell: Shell, u: VolumeField) -> tuple[EepsField, VolumeField]:
    """Split a shell vector field into its averaged part and the remainder.

    The averaged part is the impermeable extension of the tangential
    average; the remainder is the exact pointwise difference.
    """
    ua = EepsField(shell, TangentialAverage(shell, u), validate=False)
    ur = u - ua
    ur.label = f"residual({u.label})"
    return ua, ur


def blended_frames(shell: Shell, pts: SurfacePoints, r: np.ndarray):
    """Radially interpolated boundary normals, friction blend, and shape blend.

    Returns (n_blend, friction_blend, W_blend) with shapes
    (..., 3), (..., 3), (..., 3, 3).
    """
    eps = shell.config.epsilon
    nu = shell.config.nu
    g0, g1, g = shell.g_values(pts)
    c1 = (r - eps * bc(g0, r)) / (eps * bc(g, r))
    c0 = (eps * bc(g1, r) - r) / (eps * bc(g, r))
    n0 = shell.boundary_normal(pts, 0)
    n1 = shell.boundary_normal(pts, 1)
    W0 = _extended_boundary_weingarten(shell, pts, r, 0)
    W1 = _extended_boundary_weingarten(shell, pts, r, 1)
    n_blend = c1[..., None] * bc(n1, r) - c0[..., None] * bc(n0, r)
    fric = (
        c1[..., None] * (shell.config.gamma1 / nu) * bc(n1, r)
        + c0[..., None] * (shell.config.gamma0 / nu) * bc(n0, r)
    )
    W_blend = c1[..., None, None] * W1 - c0[..., None, None] * W0
    return n_blend, fric, W_blend


def _extended_boundary_weingarten(shell: Shell, pts: SurfacePoints, r: np.ndarray, side: int) -> np.ndarray:
    """Shape operator of a boundary sheet extended along normal lines.

    Built from the extension of the sheet normal: project out the normal
    direction and differentiate the constant extension exactly.
    """
    key = ("grad_gamma_neps", id(shell.config), side)
    if key not in pts.cache:
        pts.cache[key] = chart_jacobian(
            pts.surface, lambda p: shell.boundary_normal(p, side), pts
        )
    gn = pts.cache[key]
    Rinv = resolvent(pts, r)
    grad_next = np.einsum("...ik,...kj->...ij", Rinv, bc(gn, r))
    ne = bc(shell.boundary_normal(pts, side), r)
    proj = np.eye(3) - ne[..., :, None] * ne[..., None, :]
    return -np.einsum("...ik,...kj->...ij", proj, grad_next)


class GField(VolumeField):
    """Curl-compensation field used in curl-curl integration by parts.

    Twice the blended boundary normal crossed with the blended shape
    operator applied to the field, plus the friction blend crossed with
    the field.
    """

    vector = True

    def __init__(self, shell: Shell, u: VolumeField):
        self._shell = shell
        self.shell = shell
        self.u = u
        self.label = f"curl_compensation({u.label})"

    def values(self, pts: SurfacePoints, r: np.ndarray) -> np.ndarray:
        n_blend, fric, W_blend = blended_frames(self.shell, pts, r)
        uv = self.u.values(pts, r)
        Wu = np.einsum("...ij,...j->...i", W_blend, uv)
        return 2.0 * np.cross(n_blend, Wu) + np.cross(fric, uv)

    def gradients(self, pts: SurfacePoints, r: np.ndarray) -> np.ndarray:
        return _chain_rule_derivative(self._shell, pts, r, self.values, (3,))

"""Closed surfaces: atlases, quadrature, and pointwise differential geometry.

The built-in surfaces are the unit sphere, a torus, and a radially
perturbed sphere. Each carries one chart used for quadrature (spectrally
accurate for smooth integrands) plus, for the sphere-like surfaces, two
stereographic cap charts used only for pointwise evaluation near the
poles of the angular chart.

All geometry is evaluated in batches: an (N, 2) array of chart parameters
produces (N, ...) arrays of normals, projectors, shape operators, and
curvatures. The matrix convention follows grad(u)[i, j] = d_i u_j, so the
tangential gradient of a vector field has rows projected onto the tangent
plane.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import sympy as sp

from .charts import (
    FD_OFFSETS,
    FD_WEIGHTS,
    Chart,
    ImmersionError,
    chart_from_exprs,
    validate_chart,
)

__all__ = [
    "Surface",
    "SurfacePoints",
    "GeometryPack",
    "OutOfTubularNeighborhood",
    "make_surface",
    "geometry_at",
    "tangential_gradient",
    "tangential_jacobian",
    "surface_divergence",
    "tangential_hessian",
    "closest_point",
    "surface_integral",
    "chart_gradient",
    "chart_jacobian",
]


class OutOfTubularNeighborhood(RuntimeError):
    """Closest-point iteration failed or the point is too far from the surface."""


@dataclass
class SurfacePoints:
    """A batch of points on a surface.

    Attributes
    ----------
    surface : Surface
    chart_id : int or (N,) int array
        Single chart for the whole batch (the common, fast case) or one
        chart per point, as produced by closest-point projection near the
        seams of the atlas.
    s : (N, 2) chart parameters
    y : (N, 3) embedded positions, y = mu(s)
    """

    surface: "Surface"
    chart_id: "int | np.ndarray"
    s: np.ndarray
    y: np.ndarray
    _geom: "GeometryPack | None" = field(default=None, repr=False)
    cache: dict = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return self.s.shape[0]

    @property
    def homogeneous(self) -> bool:
        return isinstance(self.chart_id, (int, np.integer))

    @property
    def chart(self) -> Chart:
        if not self.homogeneous:
            raise ValueError("batch spans several charts")
        return self.surface.charts[self.chart_id]

    @property
    def geom(self) -> "GeometryPack":
        if self._geom is None:
            self._geom = self.surface.geometry(self)
        return self._geom

    def displaced(self, ds: np.ndarray) -> "SurfacePoints":
        """New points at wrapped chart parameters s + ds (no geometry cache)."""
        chart = self.chart
        s = chart.wrap(self.s + ds)
        return SurfacePoints(self.surface, self.chart_id, s, chart.embed(s))


@dataclass
class GeometryPack:
    """Pointwise surface geometry at a batch of points.

    normal : (N, 3) outward unit normal
    tangent_projector : (N, 3, 3) projector onto the tangent plane
    normal_projector : (N, 3, 3) projector onto the normal line
    weingarten : (N, 3, 3) shape operator, symmetric, annihilates the normal
    mean_curvature : (N,) trace of the shape operator
    principal_curvatures : (N, 2) nonzero eigenvalues of the shape operator,
        sorted ascending; on the unit sphere both equal -1
    tangents : (N, 2, 3) chart tangent vectors
    metric : (N, 2, 2) first fundamental form
    metric_inv, metric_det : inverse and determinant of the metric
    second_form : (N, 2, 2) normal component of the chart second derivatives
    normal_chart_derivs : (N, 2, 3) chart derivatives of the unit normal
    """

    y: np.ndarray
    normal: np.ndarray
    tangent_projector: np.ndarray
    normal_projector: np.ndarray
    weingarten: np.ndarray
    mean_curvature: np.ndarray
    principal_curvatures: np.ndarray
    tangents: np.ndarray
    metric: np.ndarray
    metric_inv: np.ndarray
    metric_det: np.ndarray
    second_form: np.ndarray
    normal_chart_derivs: np.ndarray


def _inv22(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    inv = np.empty_like(m)
    inv[..., 0, 0] = m[..., 1, 1]
    inv[..., 1, 1] = m[..., 0, 0]
    inv[..., 0, 1] = -m[..., 0, 1]
    inv[..., 1, 0] = -m[..., 1, 0]
    return inv / det[..., None, None], det


class Surface:
    """A closed oriented surface with an atlas and a fixed quadrature rule."""

    def __init__(
        self,
        name: str,
        charts: list[Chart],
        orient_signs: list[float],
        quad_chart: int,
        quad_s: np.ndarray,
        quad_w: np.ndarray,
        chart_router: Callable[[np.ndarray], np.ndarray],
        chart_coords: Callable[[int, np.ndarray], np.ndarray],
        resolution: tuple[int, int],
    ):
        self.name = name
        self.charts = charts
        self.orient_signs = orient_signs
        self.quad_chart = quad_chart
        self.resolution = resolution
        self._chart_router = chart_router
        self._chart_coords = chart_coords
        self._quad = SurfacePoints(self, quad_chart, quad_s, charts[quad_chart].embed(quad_s))
        self.quad_weights = quad_w
        # Tubular radius from the measured curvature extremes.
        kmax = float(np.max(np.abs(self.geometry(self._quad).principal_curvatures)))
        self.tubular_radius = 0.4 / max(kmax, 1e-12)

    # ------------------------------------------------------------------
    # Point construction
    # ------------------------------------------------------------------
    def points(self, chart_id: int, s: np.ndarray) -> SurfacePoints:
        chart = self.charts[chart_id]
        s = chart.wrap(np.atleast_2d(np.asarray(s, dtype=float)))
        return SurfacePoints(self, chart_id, s, chart.embed(s))

    def quad_points(self) -> SurfacePoints:
        return self._quad

    def locate(self, y: np.ndarray) -> SurfacePoints:
        """Express on-surface points in the preferred chart for their region."""
        y = np.atleast_2d(np.asarray(y, dtype=float))
        ids = self._chart_router(y)
        if np.all(ids == ids[0]):
            return self.points(int(ids[0]), self._chart_coords(int(ids[0]), y))
        # Mixed batch: the quadrature chart covers everything but isolated
        # points, so pin the whole batch there.
        return self.points(self.quad_chart, self._chart_coords(self.quad_chart, y))

    # ------------------------------------------------------------------
    # Geometry
    # ------------------------------------------------------------------
    def geometry(self, pts: SurfacePoints) -> GeometryPack:
        if pts.homogeneous:
            return self._geometry_chart(int(pts.chart_id), pts.s, pts.y)
        ids = np.asarray(pts.chart_id)
        packs: dict[int, GeometryPack] = {}
        order = np.empty(len(pts), dtype=int)
        for cid in np.unique(ids):
            mask = ids == cid
            packs[int(cid)] = self._geometry_chart(int(cid), pts.s[mask], pts.y[mask])
        merged = {}
        for name in GeometryPack.__dataclass_fields__:
            arrs = None
            for cid in np.unique(ids):
                part = getattr(packs[int(cid)], name)
                if arrs is None:
                    arrs = np.empty((len(pts),) + part.shape[1:], dtype=part.dtype)
                arrs[ids == cid] = part
            merged[name] = arrs
        return GeometryPack(**merged)

    def _geometry_chart(self, chart_id: int, s: np.ndarray, y: np.ndarray) -> GeometryPack:
        chart = self.charts[chart_id]
        sign = self.orient_signs[chart_id]
        pts = SurfacePoints(self, chart_id, s, y)
        jac = chart.jacobian(pts.s)            # (N, 2, 3)
        hess = chart.hessian(pts.s)            # (N, 2, 2, 3)
        t1, t2 = jac[:, 0, :], jac[:, 1, :]
        cross = np.cross(t1, t2)
        cn = np.linalg.norm(cross, axis=-1)
        if np.any(cn < 1e-14):
            raise ImmersionError(f"degenerate chart jacobian on {chart.name!r}")
        n = sign * cross / cn[:, None]

        metric = np.einsum("nad,nbd->nab", jac, jac)
        metric_inv, metric_det = _inv22(metric)
        second = np.einsum("nabd,nd->nab", hess, n)

        # Chart derivatives of the unit normal, exact given second derivatives.
        dc = np.stack(
            [
                np.cross(hess[:, a, 0, :], t2) + np.cross(t1, hess[:, a, 1, :])
                for a in (0, 1)
            ],
            axis=1,
        )  # (N, 2, 3) derivatives of the unnormalized cross product
        proj = dc - (np.einsum("nad,nd->na", dc, cross / cn[:, None]))[..., None] * (
            cross / cn[:, None]
        )[:, None, :]
        dn = sign * proj / cn[:, None, None]

        # Shape operator W = -Grad_surface(n): rows span the tangent plane.
        coeff = np.einsum("nab,nbd->nad", metric_inv, dn)  # (N, 2, 3)
        W = -np.einsum("nai,nad->nid", jac, coeff)

        P = np.eye(3)[None, :, :] - n[:, :, None] * n[:, None, :]
        Q = n[:, :, None] * n[:, None, :]
        H = np.trace(W, axis1=-2, axis2=-1)

        # Principal curvatures: eigenvalues of the second form expressed in an
        # orthonormal tangent basis (Cholesky of the metric). Stable at
        # umbilic points where the naive characteristic-polynomial route
        # loses half the digits to cancellation.
        la = np.sqrt(metric[:, 0, 0])
        lc = metric[:, 0, 1] / la
        lb = np.sqrt(np.maximum(metric[:, 1, 1] - lc**2, 1e-300))
        i00 = 1.0 / la
        i10 = -lc / (la * lb)
        i11 = 1.0 / lb
        # M = Linv @ second @ Linv.T with Linv = [[i00, 0], [i10, i11]]
        m00 = i00 * i00 * second[:, 0, 0]
        m01 = i00 * (i10 * second[:, 0, 0] + i11 * second[:, 0, 1])
        m11 = (
            i10 * i10 * second[:, 0, 0]
            + 2.0 * i10 * i11 * second[:, 0, 1]
            + i11 * i11 * second[:, 1, 1]
        )
        mean = 0.5 * (m00 + m11)
        spread = np.hypot(0.5 * (m00 - m11), m01)
        kappa = np.stack([mean - spread, mean + spread], axis=-1)

        return GeometryPack(
            y=pts.y,
            normal=n,
            tangent_projector=P,
            normal_projector=Q,
            weingarten=W,
            mean_curvature=H,
            principal_curvatures=kappa,
            tangents=jac,
            metric=metric,
            metric_inv=metric_inv,
            metric_det=metric_det,
            second_form=second,
            normal_chart_derivs=dn,
        )

    def validate(self, probes_per_chart: int = 25) -> None:
        """Run the chart derivative consistency checks on interior probes."""
        rng = np.random.default_rng(0)
        for cid, chart in enumerate(self.charts):
            (l0, h0), (l1, h1) = chart.bounds
            pad0 = 0.0 if chart.periodic[0] else 0.1 * (h0 - l0)
            pad1 = 0.0 if chart.periodic[1] else 0.1 * (h1 - l1)
            s = np.column_stack(
                [
                    rng.uniform(l0 + pad0, h0 - pad0, probes_per_chart),
                    rng.uniform(l1 + pad1, h1 - pad1, probes_per_chart),
                ]
            )
            validate_chart(chart, s)


# ----------------------------------------------------------------------
# Pointwise operations
# ----------------------------------------------------------------------

def geometry_at(surface: Surface, pts: SurfacePoints) -> GeometryPack:
    """Geometry pack at a batch of surface points."""
    return pts.geom


def tangential_gradient(surface: Surface, fld, pts: SurfacePoints) -> np.ndarray:
    """Surface gradient of a scalar field, an (N, 3) tangential vector.

    ``fld`` must expose ``ambient_gradient(pts)``; the result is the ambient
    gradient projected onto the tangent plane and is independent of the
    choice of extension.
    """
    g = pts.geom
    return np.einsum("nij,nj->ni", g.tangent_projector, fld.ambient_gradient(pts))


def tangential_jacobian(surface: Surface, fld, pts: SurfacePoints) -> np.ndarray:
    """Surface gradient matrix of a vector field: out[n, i, j] = D_i v_j."""
    g = pts.geom
    return np.einsum("nik,nkj->nij", g.tangent_projector, fld.ambient_jacobian(pts))


def surface_divergence(surface: Surface, fld, pts: SurfacePoints) -> np.ndarray:
    """Trace of the surface gradient matrix of a vector field."""
    return np.trace(tangential_jacobian(surface, fld, pts), axis1=-2, axis2=-1)


def tangential_hessian(surface: Surface, fld, pts: SurfacePoints) -> np.ndarray:
    """Iterated weak tangential derivatives D_i D_j of a scalar field.

    Uses exact chart calculus: the surface gradient of the (already
    tangential) gradient field, requiring the field's ambient gradient and
    hessian.
    """
    g = pts.geom
    grad = fld.ambient_gradient(pts)           # (N, 3)
    hess = fld.ambient_hessian(pts)            # (N, 3, 3)
    # Chart derivatives of the tangential gradient field v = P grad:
    # d_a P = -(d_a n) (x) n - n (x) (d_a n), a symmetric matrix.
    dn = g.normal_chart_derivs                 # (N, 2, 3)
    dP = -(dn[:, :, :, None] * g.normal[:, None, None, :]) - (
        g.normal[:, None, :, None] * dn[:, :, None, :]
    )                                          # (N, 2, 3, 3)
    dgrad = np.einsum("naji,ni->naj", dP, grad) + np.einsum(
        "nji,nik,nak->naj", g.tangent_projector, hess, g.tangents
    )
    coeff = np.einsum("nab,nbj->naj", g.metric_inv, dgrad)
    return np.einsum("nai,naj->nij", g.tangents, coeff)


# ----------------------------------------------------------------------
# Chart finite-difference calculus for fields without ambient derivatives
# ----------------------------------------------------------------------

def _fd_scale(pts: SurfacePoints) -> np.ndarray:
    t = pts.geom.tangents
    return 1.0 / np.maximum(np.linalg.norm(t, axis=-1), 1e-8)  # (N, 2)


def chart_gradient(surface: Surface, fn: Callable[[SurfacePoints], np.ndarray], pts: SurfacePoints, h: float = 1e-4) -> np.ndarray:
    """Surface gradient of a scalar-valued point function via chart FD."""
    g = pts.geom
    scale = _fd_scale(pts)
    derivs = []
    for axis in (0, 1):
        ha = h * scale[:, axis]
        acc = None
        for off, wgt in zip(FD_OFFSETS, FD_WEIGHTS):
            ds = np.zeros_like(pts.s)
            ds[:, axis] = off * ha
            term = wgt * np.asarray(fn(pts.displaced(ds)))
            acc = term if acc is None else acc + term
        derivs.append(acc / ha)
    d = np.stack(derivs, axis=1)               # (N, 2)
    coeff = np.einsum("nab,nb->na", g.metric_inv, d)
    return np.einsum("nai,na->ni", g.tangents, coeff)


def chart_jacobian(surface: Surface, fn: Callable[[SurfacePoints], np.ndarray], pts: SurfacePoints, h: float = 1e-4) -> np.ndarray:
    """Surface gradient matrix of a vector-valued point function via chart FD.

    Returns out[n, i, j] = D_i (fn_j).
    """
    g = pts.geom
    scale = _fd_scale(pts)
    derivs = []
    for axis in (0, 1):
        ha = h * scale[:, axis]
        acc = None
        for off, wgt in zip(FD_OFFSETS, FD_WEIGHTS):
            ds = np.zeros_like(pts.s)
            ds[:, axis] = off * ha
            term = wgt * np.asarray(fn(pts.displaced(ds)))
            acc = term if acc is None else acc + term
        derivs.append(acc / ha[:, None])
    d = np.stack(derivs, axis=1)               # (N, 2, 3)
    coeff = np.einsum("nab,nbj->naj", g.metric_inv, d)
    return np.einsum("nai,naj->nij", g.tangents, coeff)


# ----------------------------------------------------------------------
# Integration and closest point
# ----------------------------------------------------------------------

def surface_integral(surface: Surface, fn) -> float:
    """Quadrature of a scalar function over the surface.

    ``fn`` is either a callable on SurfacePoints or an array of node values.
    """
    vals = fn(surface.quad_points()) if callable(fn) else np.asarray(fn)
    return float(np.sum(surface.quad_weights * vals))


def closest_point(surface: Surface, x: np.ndarray, max_iter: int = 50, gtol: float = 1e-12):
    """Project ambient points onto the surface.

    Returns ``(pts, d)`` where ``pts`` are the footpoints and ``d`` the
    signed distances, positive on the outward side. Raises
    ``OutOfTubularNeighborhood`` when Newton fails to converge or the final
    distance exceeds the tubular radius.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    nodes = surface.quad_points()
    # Seed from the nearest quadrature node, then move to the preferred
    # chart for that region so polar points use the cap charts.
    d2 = np.sum((x[:, None, :] - nodes.y[None, :, :]) ** 2, axis=-1)
    seed_y = nodes.y[np.argmin(d2, axis=1)]
    ids = surface._chart_router(seed_y)

    out_s = np.zeros((x.shape[0], 2))
    out_y = np.empty_like(x)
    out_cid = np.zeros(x.shape[0], dtype=int)
    for cid in np.unique(ids):
        mask = ids == cid
        s = surface._chart_coords(int(cid), seed_y[mask])
        s = _newton_project(surface, int(cid), s, x[mask], max_iter, gtol)
        out_s[mask] = s
        out_cid[mask] = cid
        out_y[mask] = surface.charts[int(cid)].embed(s)

    if np.all(out_cid == out_cid[0]):
        pts = SurfacePoints(surface, int(out_cid[0]), out_s, out_y)
    else:
        pts = SurfacePoints(surface, out_cid, out_s, out_y)
    diff = x - pts.y
    dist = np.linalg.norm(diff, axis=-1)
    d = np.where(np.einsum("ni,ni->n", diff, pts.geom.normal) >= 0.0, dist, -dist)
    if np.any(np.abs(d) > surface.tubular_radius):
        raise OutOfTubularNeighborhood("point outside the tubular neighborhood")
    return pts, d


def _newton_project(surface, cid, s, x, max_iter, gtol):
    chart = surface.charts[cid]
    s = chart.wrap(np.array(s, copy=True))
    scale = np.maximum(np.linalg.norm(x, axis=-1), 1.0)

    def objective(si):
        return 0.5 * np.sum((x - chart.embed(si)) ** 2, axis=-1)

    f = objective(s)
    for _ in range(max_iter):
        jac = chart.jacobian(s)
        hess = chart.hessian(s)
        mu = chart.embed(s)
        res = x - mu
        grad = -np.einsum("nad,nd->na", jac, res)
        gn = np.linalg.norm(grad, axis=-1)
        active = gn > gtol * scale
        if not np.any(active):
            break
        Hs = np.einsum("nad,nbd->nab", jac, jac) - np.einsum("nabd,nd->nab", hess, res)
        # Solve the 2x2 Newton system in closed form.
        det = Hs[:, 0, 0] * Hs[:, 1, 1] - Hs[:, 0, 1] * Hs[:, 1, 0]
        bad = np.abs(det) < 1e-300
        det = np.where(bad, 1.0, det)
        step = np.empty_like(grad)
        step[:, 0] = -(Hs[:, 1, 1] * grad[:, 0] - Hs[:, 0, 1] * grad[:, 1]) / det
        step[:, 1] = -(-Hs[:, 1, 0] * grad[:, 0] + Hs[:, 0, 0] * grad[:, 1]) / det
        # Gradient descent fallback where the Hessian is singular.
        step[bad] = -grad[bad]
        # Damped update: halve the step until the objective decreases.
        lam = np.where(active, 1.0, 0.0)
        for _ in range(25):
            s_try = chart.wrap(s + lam[:, None] * step)
            f_try = objective(s_try)
            worse = active & (f_try > f + 1e-15 * scale**2)
            if not np.any(worse):
                break
            lam = np.where(worse, 0.5 * lam, lam)
        s = chart.wrap(s + lam[:, None] * step)
        f = objective(s)
    else:
        jac = chart.jacobian(s)
        res = x - chart.embed(s)
        grad = -np.einsum("nad,nd->na", jac, res)
        if np.any(np.linalg.norm(grad, axis=-1) > 10.0 * gtol * scale):
            raise OutOfTubularNeighborhood("closest-point Newton iteration did not converge")
    return s


# ----------------------------------------------------------------------
# Built-in surfaces
# ----------------------------------------------------------------------

def _sphere_like_charts(radius_expr_of_unit, name_prefix: str):
    """Angular chart plus two stereographic caps for a radial graph surface.

    ``radius_expr_of_unit`` maps three sympy expressions for a unit vector
    to the radius expression evaluated there.
    """
    th, ph = sp.symbols("th ph", real=True)
    u = [sp.sin(th) * sp.cos(ph), sp.sin(th) * sp.sin(ph), sp.cos(th)]
    rho = radius_expr_of_unit(u)
    main = chart_from_exprs(
        f"{name_prefix}:angles",
        [rho * c for c in u],
        (th, ph),
        bounds=((0.0, np.pi), (0.0, 2.0 * np.pi)),
        periodic=(False, True),
    )

    s1, s2 = sp.symbols("s1 s2", real=True)
    q = s1**2 + s2**2
    caps = []
    for pole, zsign in (("north", 1), ("south", -1)):
        uc = [2 * s1 / (1 + q), 2 * s2 / (1 + q), sp.Integer(zsign) * (1 - q) / (1 + q)]
        rc = radius_expr_of_unit(uc)
        caps.append(
            chart_from_exprs(
                f"{name_prefix}:cap_{pole}",
                [rc * c for c in uc],
                (s1, s2),
                bounds=((-0.8, 0.8), (-0.8, 0.8)),
                periodic=(False, False),
            )
        )
    return main, caps[0], caps[1]


def _sphere_router(y: np.ndarray) -> np.ndarray:
    z = y[:, 2] / np.linalg.norm(y, axis=-1)
    ids = np.zeros(y.shape[0], dtype=int)
    ids[z > 0.9] = 1
    ids[z < -0.9] = 2
    return ids


def _sphere_coords(cid: int, y: np.ndarray) -> np.ndarray:
    u = y / np.linalg.norm(y, axis=-1, keepdims=True)
    if cid == 0:
        th = np.arccos(np.clip(u[:, 2], -1.0, 1.0))
        ph = np.mod(np.arctan2(u[:, 1], u[:, 0]), 2.0 * np.pi)
        return np.column_stack([th, ph])
    zsign = 1.0 if cid == 1 else -1.0
    denom = 1.0 + zsign * u[:, 2]
    return np.column_stack([u[:, 0] / denom, u[:, 1] / denom])


def _angular_quadrature(main_chart: Chart, n_theta: int, n_phi: int):
    """Gauss-Legendre in cos(theta) times periodic trapezoid in phi."""
    u, wu = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(u)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    TH, PH = np.meshgrid(theta, phi, indexing="ij")
    s = np.column_stack([TH.ravel(), PH.ravel()])
    jac = main_chart.jacobian(s)
    metric = np.einsum("nad,nbd->nab", jac, jac)
    det = metric[:, 0, 0] * metric[:, 1, 1] - metric[:, 0, 1] ** 2
    area = np.sqrt(det)
    sin_t = np.sin(s[:, 0])
    w = np.repeat(wu, n_phi) * (2.0 * np.pi / n_phi) * area / sin_t
    return s, w


def _torus_quadrature(chart: Chart, n_theta: int, n_phi: int):
    th = 2.0 * np.pi * np.arange(n_theta) / n_theta
    ph = 2.0 * np.pi * np.arange(n_phi) / n_phi
    TH, PH = np.meshgrid(th, ph, indexing="ij")
    s = np.column_stack([TH.ravel(), PH.ravel()])
    jac = chart.jacobian(s)
    metric = np.einsum("nad,nbd->nab", jac, jac)
    det = metric[:, 0, 0] * metric[:, 1, 1] - metric[:, 0, 1] ** 2
    w = np.sqrt(det) * (2.0 * np.pi / n_theta) * (2.0 * np.pi / n_phi)
    return s, w


def _orient_signs(charts, outward_fn, probes):
    """Per-chart sign making the raw cross-product normal point outward."""
    signs = []
    for cid, chart in enumerate(charts):
        s = np.atleast_2d(probes[cid])
        y = chart.embed(s)
        jac = chart.jacobian(s)
        cr = np.cross(jac[:, 0, :], jac[:, 1, :])
        n = cr / np.linalg.norm(cr, axis=-1, keepdims=True)
        signs.append(1.0 if outward_fn(y, n)[0] > 0 else -1.0)
    return signs


def make_surface(name: str, n_theta: int = 24, n_phi: int = 48, **params) -> Surface:
    """Construct a built-in surface.

    Parameters
    ----------
    name : "sphere", "torus", or "perturbed_sphere"
    n_theta, n_phi : quadrature resolution
    params : shape parameters; torus takes ``major``/``minor`` (default 2,
        0.5), the perturbed sphere takes ``amplitude`` (default 0.1)
    """
    if name == "sphere":
        main, cap_n, cap_s = _sphere_like_charts(lambda u: sp.Integer(1), "sphere")
        charts = [main, cap_n, cap_s]
        s, w = _angular_quadrature(main, n_theta, n_phi)
        outward = lambda y, n: np.einsum("ni,ni->n", y, n)
        probes = [np.array([[1.1, 0.7]]), np.array([[0.1, 0.2]]), np.array([[0.1, 0.2]])]
        signs = _orient_signs(charts, outward, probes)
        return Surface("sphere", charts, signs, 0, s, w, _sphere_router, _sphere_coords, (n_theta, n_phi))

    if name == "perturbed_sphere":
        amp = float(params.get("amplitude", 0.1))
        main, cap_n, cap_s = _sphere_like_charts(
            lambda u: 1 + sp.Float(amp) * u[0], "perturbed_sphere"
        )
        charts = [main, cap_n, cap_s]
        s, w = _angular_quadrature(main, n_theta, n_phi)
        outward = lambda y, n: np.einsum("ni,ni->n", y, n)
        probes = [np.array([[1.1, 0.7]]), np.array([[0.1, 0.2]]), np.array([[0.1, 0.2]])]
        signs = _orient_signs(charts, outward, probes)
        return Surface(
            "perturbed_sphere", charts, signs, 0, s, w, _sphere_router, _sphere_coords, (n_theta, n_phi)
        )

    if name == "torus":
        major = float(params.get("major", 2.0))
        minor = float(params.get("minor", 0.5))
        th, ph = sp.symbols("th ph", real=True)
        ring = major + minor * sp.cos(th)
        chart = chart_from_exprs(
            "torus:angles",
            [ring * sp.cos(ph), ring * sp.sin(ph), minor * sp.sin(th)],
            (th, ph),
            bounds=((0.0, 2.0 * np.pi), (0.0, 2.0 * np.pi)),
            periodic=(True, True),
        )
        s, w = _torus_quadrature(chart, n_theta, n_phi)

        def torus_router(y):
            return np.zeros(y.shape[0], dtype=int)

        def torus_coords(cid, y):
            ph_ = np.mod(np.arctan2(y[:, 1], y[:, 0]), 2.0 * np.pi)
            rxy = np.hypot(y[:, 0], y[:, 1])
            th_ = np.mod(np.arctan2(y[:, 2], rxy - major), 2.0 * np.pi)
            return np.column_stack([th_, ph_])

        def outward(y, n):
            c = np.column_stack([major * np.cos(np.arctan2(y[:, 1], y[:, 0])),
                                 major * np.sin(np.arctan2(y[:, 1], y[:, 0])),
                                 np.zeros(y.shape[0])])
            return np.einsum("ni,ni->n", y - c, n)

        signs = _orient_signs([chart], outward, [np.array([[0.3, 0.9]])])
        return Surface("torus", [chart], signs, 0, s, w, torus_router, torus_coords, (n_theta, n_phi))

    raise ValueError(f"unknown surface {name!r}")

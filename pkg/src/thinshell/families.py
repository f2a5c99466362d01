"""Deterministic test-field families with verified structural tags.

Each family is a named list of shell-bound field builders. Tags declare
the structure the members guarantee (tangential on the surface,
impermeable, divergence free, slip conditions), and binding a family to a
shell verifies the tags numerically before any check runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import sympy as sp

from .ambient import X1, X2, X3, rho_expr
from .shell import Shell
from .surface_fields import SurfaceScalar, TangentialVector
from .volume_fields import (
    AmbientField,
    PullbackField,
    VolumeField,
    bc,
    divergence_values,
    strain_values,
)
from .averaging import EepsField

__all__ = ["FieldFamily", "UnsupportedConfiguration", "make_family", "surface_scalar_family"]


class UnsupportedConfiguration(RuntimeError):
    """A family was requested on a surface or shell it does not support."""


TAGS = ("tangential", "impermeable", "divfree", "slip", "unconstrained")


@dataclass(frozen=True)
class FieldFamily:
    name: str
    tags: frozenset
    builders: tuple

    def members(self, shell: Shell, validate: bool = True) -> list:
        fields = [b(shell) for b in self.builders]
        if validate:
            for f in fields:
                _validate_tags(shell, f, self.tags)
        return fields


def _validate_tags(shell: Shell, field, tags: frozenset) -> None:
    q = shell.qpts
    if "tangential" in tags and not isinstance(field, VolumeField):
        flux = np.einsum("ni,ni->n", field.values(q), q.geom.normal)
        if np.max(np.abs(flux)) > 1e-10:
            raise ValueError(f"{field.label}: tangential tag violated")
        return
    if "impermeable" in tags:
        for side in (0, 1):
            rb = shell.boundary_radius(q, side)
            flux = np.einsum(
                "ni,ni->n", field.values(q, rb), shell.boundary_normal(q, side)
            )
            if np.max(np.abs(flux)) > 1e-10:
                raise ValueError(f"{field.label}: impermeable tag violated on sheet {side}")
    if "divfree" in tags:
        div = divergence_values(field, q, shell.r_nodes)
        scale = max(1.0, float(np.max(np.abs(field.values(q, shell.r_nodes)))))
        if np.max(np.abs(div)) > 1e-9 * scale:
            raise ValueError(f"{field.label}: divergence-free tag violated")
    if "slip" in tags:
        worst = slip_residual(shell, field)
        if worst > 1e-8:
            raise ValueError(f"{field.label}: slip tag violated (residual {worst:.2e})")


def slip_residual(shell: Shell, field: VolumeField) -> float:
    """Worst residual of the traction condition on both boundary sheets."""
    q = shell.qpts
    nu = shell.config.nu
    worst = 0.0
    for side, gamma in ((0, shell.config.gamma0), (1, shell.config.gamma1)):
        rb = shell.boundary_radius(q, side)
        D = strain_values(field, q, rb)
        ne = shell.boundary_normal(q, side)
        P = np.eye(3)[None] - ne[:, :, None] * ne[:, None, :]
        traction = 2.0 * nu * np.einsum("nij,nj->ni", P @ D, ne)
        resid = traction + gamma * field.values(q, rb)
        worst = max(worst, float(np.max(np.linalg.norm(resid, axis=-1))))
    return worst


# ----------------------------------------------------------------------
# Concrete constructions
# ----------------------------------------------------------------------

def _rotation_axes(surface_name: str, rng: np.random.Generator, count: int) -> list[np.ndarray]:
    if surface_name == "sphere":
        axes = [np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0])]
        while len(axes) < count:
            a = rng.normal(size=3)
            axes.append(a / np.linalg.norm(a))
        return axes[:count]
    if surface_name == "torus":
        return [np.array([0.0, 0.0, 1.0])] * count
    if surface_name == "perturbed_sphere":
        return [np.array([1.0, 0.0, 0.0])] * count
    raise UnsupportedConfiguration(f"no rotation axes for surface {surface_name!r}")


def _rotation_field(axis: np.ndarray, profile=None) -> AmbientField:
    a1, a2, a3 = (sp.Float(v) for v in axis)
    w = (a2 * X3 - a3 * X2, a3 * X1 - a1 * X3, a1 * X2 - a2 * X1)
    if profile is not None:
        w = tuple(profile * c for c in w)
    return AmbientField.vector_field(w, label=f"rotation({axis.round(3)})")


def _require_spherical_constant_shell(shell: Shell, kind: str) -> tuple[float, float]:
    cfg = shell.config
    const = (
        not cfg.g0.ambient.expr.free_symbols and not cfg.g1.ambient.expr.free_symbols
    )
    if shell.surface.name != "sphere" or not const:
        raise UnsupportedConfiguration(
            f"{kind} fields need the sphere with constant thickness profiles"
        )
    g0 = float(cfg.g0.ambient.expr)
    g1 = float(cfg.g1.ambient.expr)
    return 1.0 + cfg.epsilon * g0, 1.0 + cfg.epsilon * g1


def _slip_profile(shell: Shell) -> sp.Expr:
    """Quadratic radial profile meeting the traction conditions exactly."""
    r0, r1 = _require_spherical_constant_shell(shell, "slip_shell")
    cfg = shell.config
    s0 = cfg.gamma0 / cfg.nu
    s1 = cfg.gamma1 / cfg.nu
    h = r1 - r0
    c1 = s0
    c2 = -((s1 * (1.0 + s0 * h)) + s0) / (2.0 * h + s1 * h * h)
    rho = rho_expr()
    return 1 + sp.Float(c1) * (rho - r0) + sp.Float(c2) * (rho - r0) ** 2


def _neumann_profile(shell: Shell, scale: float = 1.0) -> sp.Expr:
    """Profile with vanishing radial derivative at both sheets (zero friction)."""
    r0, r1 = _require_spherical_constant_shell(shell, "slip_shell")
    rho = rho_expr()
    # Antiderivative of (rho - r0)(rho - r1), normalized to stay order one.
    f = rho**3 / 3 - (r0 + r1) * rho**2 / 2 + r0 * r1 * rho
    f_at_r0 = r0**3 / 3.0 - (r0 + r1) * r0**2 / 2.0 + r0 * r1 * r0
    return 1 + sp.Float(scale) * (f - sp.Float(f_at_r0)) / sp.Float((r1 - r0) ** 2)


def _poloidal_field(shell: Shell, axis: int = 2) -> AmbientField:
    """Divergence-free slip field with a nonzero normal component.

    The curl of q(rho) * x_axis * (axis x position); the quartic q solves
    the impermeability and traction conditions on both sheets.
    """
    r0, r1 = _require_spherical_constant_shell(shell, "poloidal_shell")
    cfg = shell.config
    s0 = cfg.gamma0 / cfg.nu
    s1 = cfg.gamma1 / cfg.nu
    # Constraints on the quartic q(rho):
    #   q(r0) = q(r1) = 0
    #   r q'' + (4 - s0 r) q' = 0  at r0
    #   r q'' + (4 + s1 r) q' = 0  at r1
    # Solved in the scaled variable xi = (rho - mid)/half, which keeps the
    # constraint matrix well conditioned on thin intervals.
    rm = 0.5 * (r0 + r1)
    hh = 0.5 * (r1 - r0)

    def qrow(xi):
        return [xi**k for k in range(5)]

    def drow(xi):
        return [(k * xi ** (k - 1) if k >= 1 else 0.0) for k in range(5)]

    def ddrow(xi):
        return [(k * (k - 1) * xi ** (k - 2) if k >= 2 else 0.0) for k in range(5)]

    rows = [qrow(-1.0), qrow(1.0)]
    for xi, r, coef in ((-1.0, r0, 4.0 - s0 * r0), (1.0, r1, 4.0 + s1 * r1)):
        rows.append([r * dd + coef * hh * d for dd, d in zip(ddrow(xi), drow(xi))])
    A = np.array(rows)
    _, _, vh = np.linalg.svd(A)
    coeffs = vh[-1]
    # Normalize so the peak swirl amplitude |q'(rho)| * rho^2 is order one.
    xi_grid = np.linspace(-1.0, 1.0, 33)
    dq = sum(k * c * xi_grid ** (k - 1) for k, c in enumerate(coeffs) if k >= 1)
    peak = np.max(np.abs(dq)) / hh * rm**2
    coeffs = coeffs / (np.sign(dq[len(dq) // 2] + dq[-1]) * peak)
    rho = rho_expr()
    xi_expr = (rho - sp.Float(rm)) / sp.Float(hh)
    q = sum(sp.Float(c) * xi_expr**k for k, c in enumerate(coeffs))
    xs = [X1, X2, X3]
    e = [sp.Integer(0)] * 3
    e[axis] = sp.Integer(1)
    axis_cross = (
        e[1] * X3 - e[2] * X2,
        e[2] * X1 - e[0] * X3,
        e[0] * X2 - e[1] * X1,
    )
    pot = [q * xs[axis] * c for c in axis_cross]
    u = (
        sp.diff(pot[2], X2) - sp.diff(pot[1], X3),
        sp.diff(pot[0], X3) - sp.diff(pot[2], X1),
        sp.diff(pot[1], X1) - sp.diff(pot[0], X2),
    )
    return AmbientField.vector_field(u, label=f"poloidal(axis={axis})")


def _tangential_polynomials(rng: np.random.Generator, count: int) -> list[TangentialVector]:
    out = []
    for k in range(count):
        C = rng.uniform(-1.0, 1.0, size=(3, 4))
        comps = [
            sp.Float(C[i, 0]) + sp.Float(C[i, 1]) * X1 + sp.Float(C[i, 2]) * X2 + sp.Float(C[i, 3]) * X3
            for i in range(3)
        ]
        out.append(TangentialVector.from_exprs(comps, label=f"tangential[{k}]"))
    return out


def _trig_scalar(rng: np.random.Generator, k: int) -> sp.Expr:
    c = rng.uniform(-1.0, 1.0, size=4)
    p = rng.uniform(0.0, 2.0, size=3)
    return (
        sp.Float(c[0]) * sp.sin(X1 + sp.Float(p[0]))
        + sp.Float(c[1]) * sp.cos(2 * X2 + sp.Float(p[1]))
        + sp.Float(c[2]) * sp.sin(X3 + sp.Float(p[2])) * sp.cos(X1)
        + sp.Float(c[3]) * X3**2
    )


def _normal_bump(shell: Shell, amplitude: float) -> PullbackField:
    """A normal-direction field vanishing on both sheets, order epsilon."""

    def value_fn(pts, r):
        g0, g1, g = shell.g_values(pts)
        eps = shell.config.epsilon
        chi = (r - eps * bc(g0, r)) * (eps * bc(g1, r) - r) / (eps * bc(g, r))
        n = bc(pts.geom.normal, r)
        return amplitude * chi[..., None] * n

    return PullbackField(
        shell, value_fn, vector=True, label="normal_bump", allow_fd_hessian=True
    )


# ----------------------------------------------------------------------
# Family constructors
# ----------------------------------------------------------------------

def make_family(kind: str, seed: int = 0, count: int = 3, **params) -> FieldFamily:
    """Build a named family of deterministic test fields.

    Kinds: rigid_rotation, killing_sphere, slip_shell, poloidal_shell,
    impermeable_generic, tangential_harmonics, unconstrained_smooth,
    unconstrained_scalar.
    """
    rng = np.random.default_rng(seed)

    if kind in ("rigid_rotation", "killing_sphere"):
        def builder(axis):
            return lambda shell: _rotation_field(
                np.asarray(axis)
                if shell.surface.name == "sphere"
                else _rotation_axes(shell.surface.name, rng, 1)[0]
            )
        axes = [np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]),
                np.array([0.6, -0.8, 0.0])]
        builders = tuple(builder(a) for a in axes[:count])
        return FieldFamily(kind, frozenset({"divfree", "impermeable", "slip"}), builders)

    if kind == "slip_shell":
        def rot_slip(axis):
            return lambda shell: _rotation_field(np.asarray(axis), _slip_profile(shell))

        def rot_neumann(axis, scale):
            def build(shell):
                if shell.config.gamma0 != 0.0 or shell.config.gamma1 != 0.0:
                    return _rotation_field(np.asarray(axis), _slip_profile(shell))
                return _rotation_field(np.asarray(axis), _neumann_profile(shell, scale))
            return build

        builders = (
            rot_slip([0.0, 0.0, 1.0]),
            rot_slip([1.0, 0.0, 0.0]),
            rot_neumann([0.0, 0.6, 0.8], 1.0),
        )
        return FieldFamily(kind, frozenset({"divfree", "impermeable", "slip"}), builders[:max(count, 1)])

    if kind == "poloidal_shell":
        builders = tuple(
            (lambda ax: lambda shell: _poloidal_field(shell, axis=ax))(ax)
            for ax in (2, 0, 1)[:count]
        )
        return FieldFamily(kind, frozenset({"divfree", "impermeable", "slip"}), builders)

    if kind == "impermeable_generic":
        vs = _tangential_polynomials(rng, count)
        amps = rng.uniform(0.5, 1.5, size=count)

        def builder(v, amp):
            def build(shell):
                f = EepsField(shell, v) + _normal_bump(shell, amp)
                f.label = f"impermeable({v.label})"
                return f
            return build

        builders = tuple(builder(v, a) for v, a in zip(vs, amps))
        return FieldFamily(kind, frozenset({"impermeable"}), builders)

    if kind == "tangential_harmonics":
        vs = _tangential_polynomials(rng, count)
        return FieldFamily(kind, frozenset({"tangential"}), tuple((lambda vv: lambda shell: vv)(v) for v in vs))

    if kind == "unconstrained_smooth":
        exprs = [
            tuple(_trig_scalar(rng, 3 * k + i) for i in range(3)) for k in range(count)
        ]
        builders = tuple(
            (lambda es, i: lambda shell: AmbientField.vector_field(es, label=f"smooth[{i}]"))(es, i)
            for i, es in enumerate(exprs)
        )
        return FieldFamily(kind, frozenset({"unconstrained"}), builders)

    if kind == "unconstrained_scalar":
        exprs = [_trig_scalar(rng, k) for k in range(count)]
        builders = tuple(
            (lambda e, i: lambda shell: AmbientField.scalar(e, label=f"scalar[{i}]"))(e, i)
            for i, e in enumerate(exprs)
        )
        return FieldFamily(kind, frozenset({"unconstrained"}), builders)

    raise ValueError(f"unknown family kind {kind!r}")


def surface_scalar_family(seed: int = 0, count: int = 3) -> list[SurfaceScalar]:
    """Smooth surface scalars with roughly zero mean, for surface-norm checks."""
    rng = np.random.default_rng(seed)
    out = [SurfaceScalar.from_expr(X3, "z")]
    for k in range(count - 1):
        c = rng.uniform(-1.0, 1.0, size=3)
        expr = (
            sp.Float(c[0]) * X1 * X2
            + sp.Float(c[1]) * sp.sin(2 * X3)
            + sp.Float(c[2]) * (X1**2 - X2**2)
        )
        out.append(SurfaceScalar.from_expr(expr, f"harmonicish[{k}]"))
    return out[:count]

"""Parametrized surface patches with symbolically generated derivatives.

A chart is a smooth map from a rectangle in the parameter plane into R^3.
Charts are built from sympy expressions so that first and second
derivatives of the map are exact; anything requiring third derivatives of
the parametrization falls back to finite differences elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import sympy as sp


class ImmersionError(RuntimeError):
    """Raised when a chart degenerates (vanishing tangent cross product)."""


def _vectorized(fn: Callable, shape_tail: tuple[int, ...]) -> Callable:
    """Wrap a lambdified component function so it always returns arrays.

    sympy.lambdify collapses constant expressions to Python scalars; this
    re-broadcasts them against the input shape.
    """

    def call(s1: np.ndarray, s2: np.ndarray) -> np.ndarray:
        out = fn(s1, s2)
        return np.broadcast_to(np.asarray(out, dtype=float), s1.shape).copy()

    return call


def _lambdify_stack(exprs: Sequence, syms) -> Callable:
    """Lambdify a flat list of expressions into one (N, len(exprs)) callable."""
    fns = [_vectorized(sp.lambdify(syms, e, modules="numpy"), ()) for e in exprs]

    def call(s: np.ndarray) -> np.ndarray:
        s1, s2 = s[..., 0], s[..., 1]
        return np.stack([f(s1, s2) for f in fns], axis=-1)

    return call


@dataclass(frozen=True)
class Chart:
    """One smooth parametrized patch of a closed surface.

    Attributes
    ----------
    name : str
        Identifier used in diagnostics.
    bounds : ((lo, hi), (lo, hi))
        Parameter rectangle. Open at the ends for non-periodic axes.
    periodic : (bool, bool)
        Whether each parameter axis wraps around.
    """

    name: str
    bounds: tuple[tuple[float, float], tuple[float, float]]
    periodic: tuple[bool, bool]
    _map: Callable
    _jac: Callable
    _hess: Callable

    def embed(self, s: np.ndarray) -> np.ndarray:
        """Map parameters (N, 2) to points in R^3, shape (N, 3)."""
        return self._map(s)

    def jacobian(self, s: np.ndarray) -> np.ndarray:
        """First derivatives of the map, shape (N, 2, 3)."""
        return self._jac(s)

    def hessian(self, s: np.ndarray) -> np.ndarray:
        """Second derivatives of the map, shape (N, 2, 2, 3)."""
        return self._hess(s)

    def wrap(self, s: np.ndarray) -> np.ndarray:
        """Fold periodic coordinates back into the base interval."""
        out = np.array(s, dtype=float, copy=True)
        for axis in (0, 1):
            if self.periodic[axis]:
                lo, hi = self.bounds[axis]
                out[..., axis] = lo + np.mod(out[..., axis] - lo, hi - lo)
        return out


def chart_from_exprs(
    name: str,
    exprs: Sequence,
    syms,
    bounds: tuple[tuple[float, float], tuple[float, float]],
    periodic: tuple[bool, bool] = (False, False),
) -> Chart:
    """Build a chart from three sympy expressions in two parameters."""
    if len(exprs) != 3:
        raise ValueError("a chart needs exactly three component expressions")
    d1 = [[sp.diff(e, v) for e in exprs] for v in syms]
    d2 = [[[sp.diff(e, v, w) for e in exprs] for w in syms] for v in syms]

    map_fn = _lambdify_stack(exprs, syms)
    jac_fns = [_lambdify_stack(row, syms) for row in d1]
    hess_fns = [[_lambdify_stack(d2[a][b], syms) for b in range(2)] for a in range(2)]

    def jac(s: np.ndarray) -> np.ndarray:
        return np.stack([jac_fns[0](s), jac_fns[1](s)], axis=-2)

    def hess(s: np.ndarray) -> np.ndarray:
        rows = [
            np.stack([hess_fns[a][0](s), hess_fns[a][1](s)], axis=-2)
            for a in range(2)
        ]
        return np.stack(rows, axis=-3)

    return Chart(name=name, bounds=bounds, periodic=periodic, _map=map_fn, _jac=jac, _hess=hess)


# Stencil for fourth-order central differences used throughout the package.
FD_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])
FD_WEIGHTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0


def chart_fd_directional(chart: Chart, s: np.ndarray, fn: Callable, axis: int, h: float) -> np.ndarray:
    """Fourth-order central difference of ``fn`` along one parameter axis.

    ``fn`` maps an (N, 2) parameter array to an array whose leading axis has
    length N. Periodic axes wrap automatically through ``chart.wrap``.
    """
    acc = None
    for off, wgt in zip(FD_OFFSETS, FD_WEIGHTS):
        sd = np.array(s, copy=True)
        sd[..., axis] += off * h
        term = wgt * np.asarray(fn(chart.wrap(sd)))
        acc = term if acc is None else acc + term
    return acc / h


def validate_chart(chart: Chart, s: np.ndarray, rel_tol: float = 1e-6) -> float:
    """Check provided derivatives against central differences of the map.

    Returns the worst relative deviation; raises ``ImmersionError`` if the
    tangent vectors are degenerate at any probe.
    """
    jac = chart.jacobian(s)
    scale = max(float(np.max(np.linalg.norm(jac, axis=-1))), 1e-30)
    worst = 0.0
    for axis in (0, 1):
        fd = chart_fd_directional(chart, s, chart.embed, axis, h=1e-5)
        worst = max(worst, float(np.max(np.abs(fd - jac[:, axis, :]))) / scale)
    cross = np.cross(jac[:, 0, :], jac[:, 1, :])
    if np.any(np.linalg.norm(cross, axis=-1) < 1e-12 * scale**2):
        raise ImmersionError(f"chart {chart.name!r} degenerates inside its domain")
    if worst > rel_tol:
        raise ValueError(
            f"chart {chart.name!r} derivatives disagree with finite differences "
            f"(relative error {worst:.3e})"
        )
    return worst

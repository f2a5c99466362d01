"""Smooth fields on R^3 with exact derivatives, generated from sympy.

Every analytic test field in the package is specified as a sympy
expression in the ambient coordinates; value, gradient, and hessian
callables are lambdified lazily on first use, since hessians of composite
expressions are expensive to compile and many fields never need them.
The matrix convention is grad[i, j] = d_i u_j and
hess[i, j, k] = d_i d_j u_k.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np
import sympy as sp

X1, X2, X3 = sp.symbols("x1 x2 x3", real=True)
XS = (X1, X2, X3)


def _lambdify_component(expr) -> Callable:
    fn = sp.lambdify(XS, expr, modules="numpy")

    def call(x: np.ndarray) -> np.ndarray:
        out = fn(x[..., 0], x[..., 1], x[..., 2])
        return np.broadcast_to(np.asarray(out, dtype=float), x.shape[:-1]).copy()

    return call


def _lambdify_tensor(exprs: np.ndarray) -> Callable:
    """Lambdify an object array of expressions into one stacked callable.

    Compiled as a single function with common-subexpression elimination;
    derivative tensors of composite fields share most of their work.
    """
    shape = exprs.shape
    fn = sp.lambdify(XS, list(exprs.ravel()), modules="numpy", cse=True)

    def call(x: np.ndarray) -> np.ndarray:
        outs = fn(x[..., 0], x[..., 1], x[..., 2])
        cols = [
            np.broadcast_to(np.asarray(o, dtype=float), x.shape[:-1]) for o in outs
        ]
        return np.stack(cols, axis=-1).reshape(x.shape[:-1] + shape)

    return call


class AmbientScalar:
    """A smooth scalar on R^3 with exact first and second derivatives."""

    def __init__(self, expr):
        self.expr = sp.sympify(expr)
        self._val = None
        self._grad = None
        self._hess = None

    @staticmethod
    def from_expr(expr) -> "AmbientScalar":
        return AmbientScalar(expr)

    def val(self, x: np.ndarray) -> np.ndarray:
        if self._val is None:
            self._val = _lambdify_component(self.expr)
        return self._val(x)

    def grad(self, x: np.ndarray) -> np.ndarray:
        if self._grad is None:
            g = np.array([sp.diff(self.expr, v) for v in XS], dtype=object)
            self._grad = _lambdify_tensor(g)
        return self._grad(x)

    def hess(self, x: np.ndarray) -> np.ndarray:
        if self._hess is None:
            h = np.array(
                [[sp.diff(self.expr, v, w) for w in XS] for v in XS], dtype=object
            )
            self._hess = _lambdify_tensor(h)
        return self._hess(x)


class AmbientVector:
    """A smooth vector field on R^3 with exact first and second derivatives."""

    def __init__(self, exprs: Sequence):
        self.exprs = tuple(sp.sympify(e) for e in exprs)
        if len(self.exprs) != 3:
            raise ValueError("a vector field needs three components")
        self._val = None
        self._jac = None
        self._hess = None

    @staticmethod
    def from_exprs(exprs: Sequence) -> "AmbientVector":
        return AmbientVector(exprs)

    def val(self, x: np.ndarray) -> np.ndarray:
        if self._val is None:
            self._val = _lambdify_tensor(np.array(self.exprs, dtype=object))
        return self._val(x)

    def jac(self, x: np.ndarray) -> np.ndarray:
        """jac[..., i, j] = d_i v_j."""
        if self._jac is None:
            j = np.array(
                [[sp.diff(e, v) for e in self.exprs] for v in XS], dtype=object
            )
            self._jac = _lambdify_tensor(j)
        return self._jac(x)

    def hess(self, x: np.ndarray) -> np.ndarray:
        """hess[..., i, j, k] = d_i d_j v_k."""
        if self._hess is None:
            h = np.array(
                [[[sp.diff(e, v, w) for e in self.exprs] for w in XS] for v in XS],
                dtype=object,
            )
            self._hess = _lambdify_tensor(h)
        return self._hess(x)


def rho_expr():
    """Distance from the origin as a sympy expression."""
    return sp.sqrt(X1**2 + X2**2 + X3**2)


def rotation_exprs(axis: Sequence[float]):
    """Components of axis x position, the velocity of a rigid rotation."""
    a1, a2, a3 = (sp.Float(v) for v in axis)
    return (a2 * X3 - a3 * X2, a3 * X1 - a1 * X3, a1 * X2 - a2 * X1)


def poly_expr(coeffs: Sequence[float], var) -> object:
    """Polynomial in ``var`` with ascending coefficients."""
    out = sp.Integer(0)
    for k, c in enumerate(coeffs):
        out = out + sp.Float(c) * var**k
    return out

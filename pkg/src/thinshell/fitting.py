"""Log-log exponent fitting and the sliding-window integral bound."""

from __future__ import annotations

import numpy as np

__all__ = ["fit_exponent", "gronwall_bound"]


def fit_exponent(samples) -> tuple[float, float]:
    """Least-squares slope of log(value) against log(scale).

    ``samples`` is a sequence of (scale, value) pairs with positive values,
    at least three of them. Returns (slope, residual) where the residual is
    the worst absolute deviation of the fitted line in log space.
    """
    pts = [(float(e), float(v)) for e, v in samples]
    if len(pts) < 3:
        raise ValueError("need at least three samples to fit an exponent")
    if any(e <= 0 or v <= 0 for e, v in pts):
        raise ValueError("exponent fitting needs positive scales and values")
    x = np.log([e for e, _ in pts])
    y = np.log([v for _, v in pts])
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.max(np.abs(slope * x + intercept - y)))
    return float(slope), residual


def gronwall_bound(z, xi, zeta, t, t1: float, t2: float) -> tuple[float, bool]:
    """Sliding-window integral bound for a function with controlled growth.

    Given samples of z, xi, zeta on the uniform grid ``t``, computes

        ((t2 - t1)^(-1) * int z + int zeta) * exp(int xi)

    over [t1, t2] by trapezoid quadrature and reports whether z(t2) stays
    below it. Endpoints must lie on the grid range with t1 < t2.
    """
    t = np.asarray(t, dtype=float)
    z = np.asarray(z, dtype=float)
    xi = np.asarray(xi, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    if not (t[0] <= t1 < t2 <= t[-1]):
        raise ValueError("window endpoints must satisfy t[0] <= t1 < t2 <= t[-1]")

    def window_integral(vals: np.ndarray) -> float:
        grid = np.clip(t, t1, t2)
        return float(np.trapezoid(np.interp(grid, t, vals), grid))

    mean_z = window_integral(z) / (t2 - t1)
    bound = (mean_z + window_integral(zeta)) * np.exp(window_integral(xi))
    z_end = float(np.interp(t2, t, z))
    return float(bound), bool(z_end <= bound * (1.0 + 1e-12))

"""Classical two-variable analog of the identification problem.

The system ``dx/dt = alpha x + gamma' y'``, ``dy'/dt = delta x + beta y'``
is rescaled to ``dx/dt = alpha x + gamma y``, ``dy/dt = sign * gamma x + beta y``
with ``gamma = sqrt(gamma' |delta|)`` and ``sign = sign(delta)``.  Only ``x`` is
observed; its first three time derivatives for two or more initial values of
``x`` (with ``y`` fixed) determine ``alpha``, ``gamma``, the sign, ``beta`` and
the initial ``y``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import mpmath
import numpy as np
import scipy.linalg

from .errors import NotNormalizableError


@dataclass
class ClassicalSystem:
    alpha: float
    beta: float
    gamma_prime: float
    delta: float

    def matrix(self) -> np.ndarray:
        return np.array([[self.alpha, self.gamma_prime], [self.delta, self.beta]], dtype=float)


@dataclass
class ClassicalCanonical:
    alpha: float
    beta: float
    gamma: float
    sign: int

    def matrix(self) -> np.ndarray:
        return np.array([[self.alpha, self.gamma], [self.sign * self.gamma, self.beta]], dtype=float)


@dataclass
class ClassicalReconstruction:
    alpha: float
    beta: float | None
    gamma: float
    sign: int | None
    y0: float | None
    undetermined: list[str] = field(default_factory=list)
    residual: float = 0.0

    @property
    def canonical(self) -> ClassicalCanonical:
        if self.undetermined:
            raise ValueError(f"parameters undetermined: {self.undetermined}")
        return ClassicalCanonical(self.alpha, self.beta, self.gamma, self.sign)


def classical_normalize(system: ClassicalSystem) -> ClassicalCanonical:
    gp, d = system.gamma_prime, system.delta
    if gp == 0 or d == 0:
        raise NotNormalizableError("gamma' and delta must both be nonzero")
    if gp < 0:
        gp, d = -gp, -d
    return ClassicalCanonical(system.alpha, system.beta, float(np.sqrt(gp * abs(d))), 1 if d > 0 else -1)


def hidden_scale(system: ClassicalSystem) -> float:
    """Factor ``c`` with ``y = c y'`` (negative when the sign of ``y'`` was flipped)."""
    gp, d = system.gamma_prime, system.delta
    if gp == 0 or d == 0:
        raise NotNormalizableError("gamma' and delta must both be nonzero")
    c = float(np.sqrt(abs(gp) / abs(d)))
    return c if gp > 0 else -c


def classical_derivatives(c: ClassicalCanonical, x0: float, y0: float) -> tuple[float, float, float]:
    a, b, g, s = c.alpha, c.beta, c.gamma, c.sign
    dx = a * x0 + g * y0
    d2x = a**2 * x0 + s * g**2 * x0 + g * (a + b) * y0
    d3x = (a**3 + s * 2 * a * g**2) * x0 + s * g**2 * b * x0 + (a**2 * g + a * b * g + b**2 * g + s * g**3) * y0
    return dx, d2x, d3x


def trajectory(matrix: np.ndarray, x0: float, y0: float, dps: int | None = None) -> Callable:
    """Exact ``x(t)`` of the linear system; in mpmath at ``dps`` digits when given."""
    if dps is None:
        m = np.asarray(matrix, dtype=float)
        init = np.array([x0, y0], dtype=float)
        return lambda t: float((scipy.linalg.expm(m * t) @ init)[0])

    def x_of_t(t):
        with mpmath.workdps(dps):
            m = mpmath.matrix([[mpmath.mpf(v) for v in row] for row in np.asarray(matrix, dtype=float)])
            init = mpmath.matrix([mpmath.mpf(x0), mpmath.mpf(y0)])
            return (mpmath.expm(m * t) * init)[0]

    return x_of_t


def finite_difference_derivatives(x_of_t: Callable, step: float = 1e-4) -> tuple[float, float, float]:
    """Central differences at ``t = 0`` for the first three derivatives.

    Arithmetic follows the number type returned by ``x_of_t``, so an mpmath
    trajectory keeps the differences free of double-precision cancellation.
    """
    if not isinstance(x_of_t(0), mpmath.mpf):
        return _central_differences(x_of_t, step)
    # the samples carry extra digits; difference them at matching precision
    with mpmath.workdps(FD_DPS):
        return _central_differences(x_of_t, mpmath.mpf(step))


FD_DPS = 40


def _central_differences(x_of_t: Callable, h) -> tuple[float, float, float]:
    xm2, xm1, x0, xp1, xp2 = (x_of_t(k * h) for k in (-2, -1, 0, 1, 2))
    d1 = (xp1 - xm1) / (2 * h)
    d2 = (xp1 - 2 * x0 + xm1) / h**2
    d3 = (xp2 - 2 * xp1 + 2 * xm1 - xm2) / (2 * h**3)
    return float(d1), float(d2), float(d3)


def classical_reconstruct(samples, eps: float = 1e-12) -> ClassicalReconstruction:
    """Recover the normalized system and ``y0`` from derivative data.

    ``samples`` holds ``(x0, dx, d2x, d3x)`` rows for at least two distinct
    ``x0`` sharing the same hidden ``y0``.  Each derivative is fitted linearly
    in ``x0``; slopes give parameters, intercepts give ``y0``.
    """
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] != 4:
        raise ValueError("samples must be rows of (x0, dx, d2x, d3x)")
    if len(np.unique(data[:, 0])) < 2:
        raise ValueError("need at least two distinct x0 values")
    design = np.column_stack([data[:, 0], np.ones(len(data))])
    coef, *_ = np.linalg.lstsq(design, data[:, 1:], rcond=None)
    fit_resid = float(np.max(np.abs(design @ coef - data[:, 1:])))
    (s1, s2, s3), (i1, i2, i3) = coef

    alpha = s1
    pm_gamma_sq = s2 - alpha**2
    scale = max(1.0, abs(alpha), abs(s2) ** 0.5)
    if abs(pm_gamma_sq) <= eps * scale**2:
        return ClassicalReconstruction(
            alpha, None, 0.0, None, None,
            undetermined=["beta", "sign", "y0"],
            residual=max(fit_resid, abs(i1), abs(i2), abs(i3)),
        )
    sign = 1 if pm_gamma_sq > 0 else -1
    gamma = float(np.sqrt(abs(pm_gamma_sq)))
    beta = (s3 - alpha**3 - sign * 2 * alpha * gamma**2) / (sign * gamma**2)
    y0 = i1 / gamma
    resid = max(
        fit_resid,
        abs(i2 - gamma * (alpha + beta) * y0),
        abs(i3 - (alpha**2 * gamma + alpha * beta * gamma + beta**2 * gamma + sign * gamma**3) * y0),
    )
    return ClassicalReconstruction(alpha, beta, gamma, sign, y0, residual=resid)

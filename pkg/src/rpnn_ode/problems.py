"""Benchmark stiff initial-value problems with analytic Jacobians.

Four classic stiff IVPs are provided through :func:`make_benchmark`:

* ``prothero_robinson`` -- scalar y' = lam*(y - sin x) + cos x on [0, 2*pi];
  the exact solution is sin(x) regardless of lam.
* ``van_der_pol`` -- relaxation oscillator, first-order form, on [0, 3*mu]
  ([0, 30] for mu = 1).
* ``rober`` -- three-species autocatalytic kinetics on [0, 40].
* ``hires`` -- eight-equation plant-physiology kinetics on [0, 321.8122].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import NumericError

RhsFn = Callable[[float, np.ndarray], np.ndarray]
JacFn = Callable[[float, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class OdeProblem:
    """First-order system y' = f(x, y) with y(x0) = alpha, posed on [x0, x_end].

    ``rhs`` maps (x, y) to an (m,) vector and ``ode_jacobian`` to the (m, m)
    matrix of partials d f_i / d y_k.  ``analytic``, when present, maps an
    array of abscissae to a (len(x), m) array of exact solution values.
    Instances are immutable and safe to share between threads.
    """

    name: str
    m: int
    x0: float
    x_end: float
    alpha: np.ndarray
    rhs: RhsFn
    ode_jacobian: JacFn
    analytic: Optional[Callable[[np.ndarray], np.ndarray]] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"system dimension must be >= 1, got {self.m}")
        if not self.x_end > self.x0:
            raise ValueError(f"x_end must exceed x0, got [{self.x0}, {self.x_end}]")
        alpha = np.atleast_1d(np.asarray(self.alpha, dtype=float))
        if alpha.shape != (self.m,):
            raise ValueError(f"alpha must have shape ({self.m},), got {alpha.shape}")
        object.__setattr__(self, "alpha", alpha)


def rhs_eval(problem: OdeProblem, x: float, y: np.ndarray) -> np.ndarray:
    """Evaluate f(x, y) with shape and finiteness checks."""
    y = np.asarray(y, dtype=float)
    if y.shape != (problem.m,):
        raise ValueError(f"state must have shape ({problem.m},), got {y.shape}")
    out = np.asarray(problem.rhs(x, y), dtype=float)
    if out.shape != (problem.m,):
        raise ValueError(f"rhs returned shape {out.shape}, expected ({problem.m},)")
    if not np.all(np.isfinite(out)):
        raise NumericError(f"rhs of {problem.name!r} returned non-finite values at x={x}")
    return out


def jacobian_eval(problem: OdeProblem, x: float, y: np.ndarray) -> np.ndarray:
    """Evaluate the (m, m) matrix d f_i / d y_k with shape and finiteness checks."""
    y = np.asarray(y, dtype=float)
    if y.shape != (problem.m,):
        raise ValueError(f"state must have shape ({problem.m},), got {y.shape}")
    out = np.asarray(problem.ode_jacobian(x, y), dtype=float)
    if out.shape != (problem.m, problem.m):
        raise ValueError(
            f"ode_jacobian returned shape {out.shape}, expected ({problem.m}, {problem.m})"
        )
    if not np.all(np.isfinite(out)):
        raise NumericError(f"ode_jacobian of {problem.name!r} returned non-finite values at x={x}")
    return out


def _prothero_robinson(lam: float) -> OdeProblem:
    if lam >= 0:
        raise ValueError(f"lambda must be negative, got {lam}")

    def rhs(x, y):
        return np.array([lam * (y[0] - math.sin(x)) + math.cos(x)])

    def jac(x, y):
        return np.array([[lam]])

    def analytic(xs):
        return np.sin(np.asarray(xs, dtype=float))[..., None]

    return OdeProblem(
        name="prothero_robinson",
        m=1,
        x0=0.0,
        x_end=2.0 * math.pi,
        alpha=np.array([0.0]),
        rhs=rhs,
        ode_jacobian=jac,
        analytic=analytic,
        params={"lambda": lam},
    )


def _van_der_pol(mu: float) -> OdeProblem:
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")

    def rhs(x, y):
        return np.array([y[1], mu * (1.0 - y[0] ** 2) * y[1] - y[0]])

    def jac(x, y):
        return np.array(
            [
                [0.0, 1.0],
                [-2.0 * mu * y[0] * y[1] - 1.0, mu * (1.0 - y[0] ** 2)],
            ]
        )

    # Interval spans roughly three relaxation periods T ~ mu*(3 - 2*ln 2);
    # the mildly stiff mu=1 case conventionally uses [0, 30] instead.
    x_end = 30.0 if mu == 1 else 3.0 * mu
    return OdeProblem(
        name="van_der_pol",
        m=2,
        x0=0.0,
        x_end=x_end,
        alpha=np.array([2.0, 0.0]),
        rhs=rhs,
        ode_jacobian=jac,
        params={"mu": mu},
    )


def _rober() -> OdeProblem:
    k1, k2, k3 = 0.04, 1.0e4, 3.0e7

    def rhs(x, y):
        r1 = k1 * y[0]
        r2 = k2 * y[1] * y[2]
        r3 = k3 * y[1] ** 2
        return np.array([-r1 + r2, r1 - r2 - r3, r3])

    def jac(x, y):
        return np.array(
            [
                [-k1, k2 * y[2], k2 * y[1]],
                [k1, -k2 * y[2] - 2.0 * k3 * y[1], -k2 * y[1]],
                [0.0, 2.0 * k3 * y[1], 0.0],
            ]
        )

    return OdeProblem(
        name="rober",
        m=3,
        x0=0.0,
        x_end=40.0,
        alpha=np.array([1.0, 0.0, 0.0]),
        rhs=rhs,
        ode_jacobian=jac,
        params={"k1": k1, "k2": k2, "k3": k3},
    )


def _hires() -> OdeProblem:
    def rhs(x, y):
        y1, y2, y3, y4, y5, y6, y7, y8 = y
        return np.array(
            [
                -1.71 * y1 + 0.43 * y2 + 8.32 * y3 + 0.0007,
                1.71 * y1 - 8.75 * y2,
                -10.03 * y3 + 0.43 * y4 + 0.035 * y5,
                8.32 * y2 + 1.71 * y3 - 1.12 * y4,
                -1.745 * y5 + 0.43 * y6 + 0.43 * y7,
                -280.0 * y6 * y8 + 0.69 * y4 + 1.71 * y5 - 0.43 * y6 + 0.69 * y7,
                280.0 * y6 * y8 - 1.81 * y7,
                -280.0 * y6 * y8 + 1.81 * y7,
            ]
        )

    def jac(x, y):
        y6, y8 = y[5], y[7]
        J = np.zeros((8, 8))
        J[0, 0], J[0, 1], J[0, 2] = -1.71, 0.43, 8.32
        J[1, 0], J[1, 1] = 1.71, -8.75
        J[2, 2], J[2, 3], J[2, 4] = -10.03, 0.43, 0.035
        J[3, 1], J[3, 2], J[3, 3] = 8.32, 1.71, -1.12
        J[4, 4], J[4, 5], J[4, 6] = -1.745, 0.43, 0.43
        J[5, 3], J[5, 4] = 0.69, 1.71
        J[5, 5], J[5, 6], J[5, 7] = -280.0 * y8 - 0.43, 0.69, -280.0 * y6
        J[6, 5], J[6, 6], J[6, 7] = 280.0 * y8, -1.81, 280.0 * y6
        J[7, 5], J[7, 6], J[7, 7] = -280.0 * y8, 1.81, -280.0 * y6
        return J

    return OdeProblem(
        name="hires",
        m=8,
        x0=0.0,
        x_end=321.8122,
        alpha=np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0057]),
        rhs=rhs,
        ode_jacobian=jac,
    )


_ALIASES = {
    "prothero_robinson": "prothero_robinson",
    "pr": "prothero_robinson",
    "van_der_pol": "van_der_pol",
    "vdp": "van_der_pol",
    "rober": "rober",
    "hires": "hires",
}

BENCHMARK_NAMES = ("prothero_robinson", "van_der_pol", "rober", "hires")

DEFAULT_LAMBDA = -1.0e5
DEFAULT_MU = 1000.0


def make_benchmark(name: str, **params) -> OdeProblem:
    """Build one of the four benchmark problems by name.

    ``prothero_robinson`` accepts ``lam`` (default -1e5, must be negative) and
    ``van_der_pol`` accepts ``mu`` (default 1000, must be positive); the other
    problems take no parameters.  Unknown names or parameters raise ValueError.
    """
    key = _ALIASES.get(str(name).lower())
    if key is None:
        raise ValueError(f"unknown benchmark problem {name!r}; choose from {BENCHMARK_NAMES}")
    if key == "prothero_robinson":
        lam = params.pop("lam", DEFAULT_LAMBDA)
        _reject_extra(key, params)
        return _prothero_robinson(float(lam))
    if key == "van_der_pol":
        mu = params.pop("mu", DEFAULT_MU)
        _reject_extra(key, params)
        return _van_der_pol(float(mu))
    _reject_extra(key, params)
    return _rober() if key == "rober" else _hires()


def _reject_extra(name: str, params: dict) -> None:
    if params:
        raise ValueError(f"unexpected parameters for {name!r}: {sorted(params)}")

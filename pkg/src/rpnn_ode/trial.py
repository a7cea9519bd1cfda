"""Per-segment trial functions.

The trial solution on a segment is psi_i(x) = alpha_i + (x - x_start)*N_i(x)
with N_i a linear combination of the segment's Gaussian bumps.  The ramp
factor makes psi match the segment's initial values at x_start exactly, for
any weights, so training only has to care about the differential equation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import RbfSegmentBasis, rbf_dx, rbf_value

_CHUNK = 4096  # bound on points expanded to (chunk, h, m) scratch at once


@dataclass
class SegmentSolution:
    """One trained interval: fixed basis, start state, output weights.

    ``weights`` has shape (h, m); column i holds the output weights of
    component i.  Weights are mutated during training and treated as
    immutable afterwards.
    """

    basis: RbfSegmentBasis
    alpha: np.ndarray
    weights: np.ndarray
    x_stop: float

    def __post_init__(self):
        self.alpha = np.atleast_1d(np.asarray(self.alpha, dtype=float))
        self.weights = np.asarray(self.weights, dtype=float)
        h, m = self.basis.h, self.basis.m
        if self.alpha.shape != (m,):
            raise ValueError(f"alpha must have shape ({m},), got {self.alpha.shape}")
        if self.weights.shape != (h, m):
            raise ValueError(f"weights must have shape ({h}, {m}), got {self.weights.shape}")
        if not self.x_stop > self.x_start:
            raise ValueError(f"x_stop {self.x_stop} must exceed x_start {self.x_start}")
        if abs((self.x_stop - self.x_start) - self.basis.width) > 1e-9 * self.basis.width:
            raise ValueError("segment endpoints are inconsistent with the basis width")

    @property
    def x_start(self) -> float:
        return self.basis.x_start


def _combine(seg: SegmentSolution, xs: np.ndarray, derivative: bool) -> np.ndarray:
    """Evaluate psi or dpsi/dx at a 1-d array of points, chunked."""
    out = np.empty((len(xs), seg.basis.m))
    for lo in range(0, len(xs), _CHUNK):
        chunk = xs[lo : lo + _CHUNK]
        ramp = (chunk - seg.x_start)[:, None]
        g = seg.basis.gaussians(chunk)
        n_vals = (g * seg.weights).sum(axis=1)
        if derivative:
            gx = seg.basis.gaussians_dx(chunk)
            out[lo : lo + _CHUNK] = n_vals + ramp * (gx * seg.weights).sum(axis=1)
        else:
            out[lo : lo + _CHUNK] = seg.alpha + ramp * n_vals
    return out


def trial_eval(seg: SegmentSolution, x) -> np.ndarray:
    """Trial solution at x: (m,) for scalar x, (k, m) for an array of k points.

    Points outside [x_start, x_stop] are permitted; the Gaussian tails decay
    smoothly, so extrapolation is well defined.
    """
    xs = np.asarray(x, dtype=float)
    if xs.ndim == 0:
        return _combine(seg, xs[None], derivative=False)[0]
    return _combine(seg, xs, derivative=False)


def trial_dx(seg: SegmentSolution, x) -> np.ndarray:
    """d psi / dx at x, same shape conventions as :func:`trial_eval`."""
    xs = np.asarray(x, dtype=float)
    if xs.ndim == 0:
        return _combine(seg, xs[None], derivative=True)[0]
    return _combine(seg, xs, derivative=True)


def _check_indices(seg: SegmentSolution, j: int, i: int) -> None:
    if not (0 <= j < seg.basis.h and 0 <= i < seg.basis.m):
        raise ValueError(
            f"index out of range: j={j}, i={i} for h={seg.basis.h}, m={seg.basis.m}"
        )


def trial_dw(seg: SegmentSolution, x: float, j: int, i: int) -> float:
    """d psi_i / d w_ji at x (0-based node j, component i).

    Linear in the weights, so the value is independent of the current weights.
    """
    _check_indices(seg, j, i)
    b = seg.basis
    g = rbf_value(b.centers[j], b.biases[j, i], b.inv_sq_widths[j, i], x)
    return (x - seg.x_start) * g


def trial_dxdw(seg: SegmentSolution, x: float, j: int, i: int) -> float:
    """Mixed derivative d^2 psi_i / (dx dw_ji) at x (0-based indices)."""
    _check_indices(seg, j, i)
    b = seg.basis
    c, bias, isw = b.centers[j], b.biases[j, i], b.inv_sq_widths[j, i]
    return rbf_value(c, bias, isw, x) + (x - seg.x_start) * rbf_dx(c, bias, isw, x)

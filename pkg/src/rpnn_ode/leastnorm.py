"""Minimum-norm least-squares solves via a rank-truncated SVD pseudoinverse.

The Gauss-Newton systems solved here are underdetermined (more weights than
residuals) and often numerically rank deficient, so the step is computed as
the minimum-2-norm solution of the least-squares problem restricted to the
singular directions above a cutoff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError

_EPS = float(np.finfo(np.float64).eps)


@dataclass(frozen=True)
class TruncationRule:
    """Singular-value cutoff policy.

    mode "relative": cutoff = epsilon * sigma_max, with epsilon defaulting to
    max(rows, cols) * machine epsilon when left unset (the conventional
    default pseudoinverse tolerance).  mode "absolute": cutoff = epsilon.
    Singular values strictly above the cutoff are kept; a zero matrix
    therefore has effective rank 0 under either mode.
    """

    mode: str = "relative"
    epsilon: float | None = None

    def __post_init__(self):
        if self.mode not in ("relative", "absolute"):
            raise ValueError(f"mode must be 'relative' or 'absolute', got {self.mode!r}")
        if self.epsilon is None:
            if self.mode == "absolute":
                raise ValueError("absolute mode requires an explicit epsilon")
        elif self.epsilon < 0:
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon}")

    def cutoff(self, shape: tuple[int, int], singular_values: np.ndarray) -> float:
        if self.mode == "absolute":
            return float(self.epsilon)
        rel = max(shape) * _EPS if self.epsilon is None else self.epsilon
        sigma_max = float(singular_values[0]) if len(singular_values) else 0.0
        return rel * sigma_max


DEFAULT_TRUNCATION = TruncationRule()


def _svd(a: np.ndarray):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise NumericError("matrix contains non-finite entries")
    try:
        return np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericError(f"SVD failed: {exc}") from exc


def truncated_pinv_solve(a: np.ndarray, b: np.ndarray, rule: TruncationRule = DEFAULT_TRUNCATION) -> np.ndarray:
    """Minimum-norm solution of the rank-truncated least-squares problem.

    Computes x = V_r diag(1/s_r) U_r^T b where only singular triplets with
    s > cutoff are retained.  For consistent full-rank systems this is the
    exact solution; otherwise it minimizes the residual over the retained
    subspace and has the smallest 2-norm among all such minimizers.
    """
    b = np.asarray(b, dtype=float)
    u, s, vt = _svd(a)
    if b.shape != (a.shape[0],):
        raise ValueError(f"b must have shape ({a.shape[0]},), got {b.shape}")
    keep = s > rule.cutoff(a.shape, s)
    if not np.any(keep):
        return np.zeros(a.shape[1])
    return vt[keep].T @ ((u[:, keep].T @ b) / s[keep])


def effective_rank(a: np.ndarray, rule: TruncationRule = DEFAULT_TRUNCATION) -> int:
    """Number of singular values above the rule's cutoff."""
    _, s, _ = _svd(a)
    return int(np.count_nonzero(s > rule.cutoff(np.asarray(a).shape, s)))

"""Reference training losses and their closed-form gradients.

These exist to pin down scoring semantics, not to train anything: a
framework-free statement of binary cross-entropy, soft Dice loss, and
their convex blend, each with an analytic gradient that finite
differences can check.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch
from .types import as_grid, as_values

DEFAULT_CLAMP_EPS = 1e-7
DEFAULT_DICE_EPS = 1e-6

LOSS_KINDS = ("bce", "dice", "hybrid")


def _pair(pred, target) -> tuple[np.ndarray, np.ndarray]:
    p = as_values(pred)
    y = as_grid(target).astype(np.float64)
    if p.shape != y.shape:
        raise DimensionMismatch(f"pred {p.shape} vs target {y.shape}")
    if p.min() < 0.0 or p.max() > 1.0:
        raise ValueError("predicted probabilities must lie in [0, 1]")
    return p, y


def _check_clamp(clamp_eps: float) -> None:
    if not 0.0 < clamp_eps < 0.5:
        raise ValueError(f"clamp_eps must be in (0, 0.5), got {clamp_eps}")


def bce_loss(pred, target, clamp_eps: float = DEFAULT_CLAMP_EPS) -> float:
    """Mean binary cross-entropy with probabilities clamped away from 0/1.

    Clamping to [clamp_eps, 1-clamp_eps] keeps the log finite for
    saturated predictions.
    """
    _check_clamp(clamp_eps)
    p, y = _pair(pred, target)
    pc = np.clip(p, clamp_eps, 1.0 - clamp_eps)
    return float(-np.mean(y * np.log(pc) + (1.0 - y) * np.log(1.0 - pc)))


def dice_loss(pred, target, eps: float = DEFAULT_DICE_EPS) -> float:
    """Soft Dice loss: 1 - (2*sum(p*y) + eps) / (sum(p) + sum(y) + eps).

    The same eps smooths numerator and denominator. eps may be 0 as
    long as the denominator stays positive.
    """
    if eps < 0.0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    p, y = _pair(pred, target)
    denom = p.sum() + y.sum() + eps
    if denom == 0.0:
        raise ValueError("both inputs empty and eps=0: Dice loss undefined")
    return float(1.0 - (2.0 * (p * y).sum() + eps) / denom)


def hybrid_loss(pred, target, alpha: float,
                clamp_eps: float = DEFAULT_CLAMP_EPS,
                eps: float = DEFAULT_DICE_EPS) -> float:
    """alpha * BCE + (1 - alpha) * Dice loss, alpha in [0, 1]."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    return alpha * bce_loss(pred, target, clamp_eps) + (1.0 - alpha) * dice_loss(
        pred, target, eps
    )


def _bce_gradient(p: np.ndarray, y: np.ndarray, clamp_eps: float) -> np.ndarray:
    pc = np.clip(p, clamp_eps, 1.0 - clamp_eps)
    grad = -(y / pc - (1.0 - y) / (1.0 - pc)) / p.size
    # Where the clamp is active the loss is locally constant in p.
    inside = (p > clamp_eps) & (p < 1.0 - clamp_eps)
    return np.where(inside, grad, 0.0)


def _dice_gradient(p: np.ndarray, y: np.ndarray, eps: float) -> np.ndarray:
    num = 2.0 * (p * y).sum() + eps
    denom = p.sum() + y.sum() + eps
    if denom == 0.0:
        raise ValueError("both inputs empty and eps=0: Dice loss undefined")
    # d/dp_i of (1 - num/denom): numerator grows by 2*y_i, denominator by 1.
    return -(2.0 * y * denom - num) / (denom * denom)


def loss_gradient(loss_kind: str, pred, target, *,
                  alpha: float | None = None,
                  clamp_eps: float = DEFAULT_CLAMP_EPS,
                  eps: float = DEFAULT_DICE_EPS) -> np.ndarray:
    """Analytic d(loss)/d(pred), same shape as pred, float64."""
    if loss_kind not in LOSS_KINDS:
        raise ValueError(f"loss_kind must be one of {LOSS_KINDS}, got {loss_kind!r}")
    _check_clamp(clamp_eps)
    if eps < 0.0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    p, y = _pair(pred, target)
    if loss_kind == "bce":
        return _bce_gradient(p, y, clamp_eps)
    if loss_kind == "dice":
        return _dice_gradient(p, y, eps)
    if alpha is None or not 0.0 <= alpha <= 1.0:
        raise ValueError(f"hybrid gradient needs alpha in [0, 1], got {alpha}")
    return alpha * _bce_gradient(p, y, clamp_eps) + (1.0 - alpha) * _dice_gradient(
        p, y, eps
    )

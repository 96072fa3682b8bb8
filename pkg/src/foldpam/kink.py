"""Two-segment ("kink") detection on force-strain curves.

A kink splits a curve into two near-linear regions. The detector fits a
single least-squares line and the best continuous two-segment line, with the
breakpoint searched exhaustively over interior samples, and flags a kink when
the split both explains the data much better and changes the slope
substantially.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted, check_X_y, column_or_1d

from .curves import ForceStrainCurve
from .errors import DomainError

__all__ = ["KinkReport", "KinkDetector", "detect_kink", "MIN_POINTS"]

MIN_POINTS = 8


@dataclass(frozen=True)
class KinkReport:
    has_kink: bool
    eps_break: float
    slope_low: float
    slope_high: float
    sse_ratio: float

    def to_dict(self) -> dict:
        return {
            "has_kink": self.has_kink,
            "eps_break": self.eps_break,
            "slope_low": self.slope_low,
            "slope_high": self.slope_high,
            "sse_ratio": self.sse_ratio,
        }


def _lstsq_sse(design: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    return coef, float(resid @ resid)


class KinkDetector(RegressorMixin, BaseEstimator):
    """Continuous two-segment line fit with a kink decision.

    Parameters
    ----------
    sse_ratio_threshold : float
        A kink needs ``SSE_two / SSE_one`` at or below this value.
    min_slope_change : float
        A kink needs ``|s_high - s_low| / max(|s_low|, |s_high|)`` at or above
        this value.
    min_segment : int
        Fewest samples on each side of the breakpoint.
    """

    def __init__(self, sse_ratio_threshold=0.5, min_slope_change=0.25, min_segment=3):
        self.sse_ratio_threshold = sse_ratio_threshold
        self.min_slope_change = min_slope_change
        self.min_segment = min_segment

    def fit(self, X, y):
        X, y = check_X_y(X, y, ensure_2d=False, y_numeric=True)
        x = column_or_1d(X)
        if x.size < MIN_POINTS:
            raise DomainError(f"kink detection needs at least {MIN_POINTS} points, got {x.size}")
        order = np.argsort(x, kind="stable")
        x, y = x[order], y[order]

        ones = np.ones_like(x)
        line_coef, sse_one = _lstsq_sse(np.column_stack([ones, x]), y)

        best = None
        k = max(int(self.min_segment), 2)
        for i in range(k - 1, x.size - k):
            xb = x[i]
            design = np.column_stack([ones, x, np.maximum(x - xb, 0.0)])
            coef, sse = _lstsq_sse(design, y)
            if best is None or sse < best[2] - 1e-15 * max(sse, 1.0):
                best = (xb, coef, sse)
        xb, coef, sse_two = best

        scale = float(y @ y) or 1.0
        if sse_one <= 1e-24 * scale:
            ratio = 1.0
        else:
            ratio = sse_two / sse_one
        slope_low = float(coef[1])
        slope_high = float(coef[1] + coef[2])
        denom = max(abs(slope_low), abs(slope_high))
        change = abs(slope_high - slope_low) / denom if denom > 0.0 else 0.0

        self.line_coef_ = line_coef
        self.hinge_coef_ = coef
        self.n_features_in_ = 1
        self.sse_one_ = sse_one
        self.sse_two_ = sse_two
        has_kink = ratio <= self.sse_ratio_threshold and change >= self.min_slope_change
        self.report_ = KinkReport(bool(has_kink), float(xb), slope_low, slope_high, float(ratio))
        return self

    def predict(self, X):
        """Two-segment fit evaluated at ``X``."""
        check_is_fitted(self, "report_")
        x = column_or_1d(np.asarray(X, dtype=float).reshape(-1))
        c = self.hinge_coef_
        return c[0] + c[1] * x + c[2] * np.maximum(x - self.report_.eps_break, 0.0)


def detect_kink(curve: ForceStrainCurve, **params) -> KinkReport:
    """Kink report for a curve; keyword arguments go to :class:`KinkDetector`."""
    if len(curve) < MIN_POINTS:
        raise DomainError(f"kink detection needs at least {MIN_POINTS} points, got {len(curve)}")
    return KinkDetector(**params).fit(curve.strain, curve.force).report_

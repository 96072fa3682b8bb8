"""Interpolated empirical force model ``force = S(fr, eps, P)``.

A family of force-strain curves measured (or modelled) at one reference
pressure is resampled onto a shared strain grid. Queries blend the two
neighbouring fold-ratio members linearly at the requested strain and scale
the result by ``P / P_ref``. The scaling is exact for the analytic models and
an approximation for measured data.
"""

from __future__ import annotations

import json
import math

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .curves import ForceStrainCurve
from .errors import DomainError, OutOfRangeError

__all__ = ["SurrogateModel", "build_surrogate", "surrogate_force"]

_GRID_POINTS = 512


class SurrogateModel(RegressorMixin, BaseEstimator):
    """Bilinear force surrogate over fold ratio and strain.

    ``fit(X, y)`` takes rows ``(fold_ratio, strain)`` and forces at ``p_ref``;
    rows sharing a fold ratio form one member curve. ``predict`` accepts
    ``(fold_ratio, strain)`` or ``(fold_ratio, strain, pressure)`` rows.
    """

    def __init__(self, p_ref=12.4e3, n_strain=_GRID_POINTS):
        self.p_ref = p_ref
        self.n_strain = n_strain

    # ------------------------------------------------------------- fitting

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        if X.shape[1] != 2:
            raise DomainError("fit expects (fold_ratio, strain) columns")
        if not self.p_ref > 0.0:
            raise DomainError(f"p_ref must be positive, got {self.p_ref!r}")
        frs = np.unique(X[:, 0])
        if frs.size < 2:
            raise DomainError("a surrogate needs at least two fold ratios")
        members = []
        for fr in frs:
            rows = X[:, 0] == fr
            strain, force = X[rows, 1], y[rows]
            order = np.argsort(strain, kind="stable")
            strain, force = strain[order], force[order]
            if np.any(np.diff(strain) <= 0.0):
                raise DomainError(f"member fr={fr:g} has repeated strains")
            members.append((strain, force))

        lo = min(s[0] for s, _ in members)
        hi = max(s[-1] for s, _ in members)
        grid = np.linspace(lo, hi, int(self.n_strain))
        forces = np.vstack(
            [np.interp(grid, s, f, left=f[0], right=0.0) for s, f in members]
        )
        self.fold_ratios_ = frs
        self.strain_grid_ = grid
        self.forces_ = forces
        self.member_max_strain_ = np.array([s[-1] for s, _ in members])
        self.n_features_in_ = 2
        return self

    @classmethod
    def from_curves(cls, curves, p_ref=None, n_strain=_GRID_POINTS) -> "SurrogateModel":
        curves = list(curves)
        if len(curves) < 2:
            raise DomainError("a surrogate needs at least two curves")
        pressures = {c.pressure for c in curves}
        if len(pressures) > 1:
            raise DomainError(f"mixed-pressure family: {sorted(pressures)}")
        if p_ref is None:
            p_ref = pressures.pop()
        elif not math.isclose(pressures.pop(), p_ref, rel_tol=1e-12):
            raise DomainError("curve pressure differs from p_ref")
        frs = [c.fold_ratio for c in curves]
        if any(fr is None for fr in frs):
            raise DomainError("every surrogate curve needs a fold ratio")
        if len(set(frs)) != len(frs):
            raise DomainError(f"duplicate fold ratios in {sorted(frs)}")
        X = np.vstack([np.column_stack([np.full(len(c), c.fold_ratio), c.strain]) for c in curves])
        y = np.concatenate([c.force for c in curves])
        return cls(p_ref=p_ref, n_strain=n_strain).fit(X, y)

    # ------------------------------------------------------------- queries

    def _cell(self, fr: float) -> tuple[int, float]:
        frs = self.fold_ratios_
        if not frs[0] - 1e-12 <= fr <= frs[-1] + 1e-12:
            raise OutOfRangeError(
                f"fold ratio {fr!r} outside the surrogate hull [{frs[0]:g}, {frs[-1]:g}]"
            )
        i = int(np.clip(np.searchsorted(frs, fr, side="right") - 1, 0, frs.size - 2))
        t = (fr - frs[i]) / (frs[i + 1] - frs[i])
        return i, min(max(t, 0.0), 1.0)

    def _row(self, fr: float) -> np.ndarray:
        i, t = self._cell(fr)
        return (1.0 - t) * self.forces_[i] + t * self.forces_[i + 1]

    def force(self, fr: float, eps: float, P: float | None = None) -> float:
        """Force at one ``(fr, eps, P)``; ``P`` defaults to ``p_ref``."""
        check_is_fitted(self, "forces_")
        grid = self.strain_grid_
        if not grid[0] - 1e-12 <= eps <= grid[-1] + 1e-12:
            raise OutOfRangeError(
                f"strain {eps!r} outside the surrogate range [{grid[0]:g}, {grid[-1]:g}]"
            )
        scale = 1.0 if P is None else float(P) / self.p_ref
        if P is not None and not float(P) > 0.0:
            raise DomainError(f"pressure must be positive, got {P!r}")
        return float(np.interp(eps, grid, self._row(fr))) * scale

    def predict(self, X):
        check_is_fitted(self, "forces_")
        X = check_array(X)
        if X.shape[1] not in (2, 3):
            raise DomainError("predict expects (fold_ratio, strain[, pressure]) columns")
        if X.shape[1] == 2:
            return np.array([self.force(fr, e) for fr, e in X])
        return np.array([self.force(fr, e, p) for fr, e, p in X])

    def zero_force_strain(self, fr: float) -> float:
        """Smallest grid strain where the blended force reaches zero."""
        check_is_fitted(self, "forces_")
        row = self._row(fr)
        zero = np.flatnonzero(row <= 0.0)
        return float(self.strain_grid_[zero[0]] if zero.size else self.strain_grid_[-1])

    def strain_range(self, fr: float) -> tuple[float, float]:
        return float(self.strain_grid_[0]), self.zero_force_strain(fr)

    def curve(self, fr: float, P: float | None = None, n: int | None = None, label=None):
        """Member-like curve at ``fr`` up to its zero-force strain."""
        lo, hi = self.strain_range(fr)
        P = self.p_ref if P is None else float(P)
        grid = self.strain_grid_
        if n is None:
            strain = grid[grid <= hi]
        else:
            strain = np.linspace(lo, hi, n)
        force = np.array([self.force(fr, e, P) for e in strain])
        if label is None:
            label = f"fr={fr:g}"
        return ForceStrainCurve(strain, force, P, label, fr)

    # ------------------------------------------------------- serialization

    def to_dict(self) -> dict:
        check_is_fitted(self, "forces_")
        return {
            "p_ref_pa": self.p_ref,
            "fold_ratios": self.fold_ratios_.tolist(),
            "strain_grid": self.strain_grid_.tolist(),
            "forces_n": self.forces_.tolist(),
            "member_max_strain": self.member_max_strain_.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "SurrogateModel":
        grid = np.asarray(doc["strain_grid"], dtype=float)
        model = cls(p_ref=float(doc["p_ref_pa"]), n_strain=grid.size)
        model.fold_ratios_ = np.asarray(doc["fold_ratios"], dtype=float)
        model.strain_grid_ = grid
        model.forces_ = np.asarray(doc["forces_n"], dtype=float)
        model.member_max_strain_ = np.asarray(doc["member_max_strain"], dtype=float)
        model.n_features_in_ = 2
        return model


def build_surrogate(curves, P_ref: float | None = None) -> SurrogateModel:
    """Surrogate from a per-fold-ratio family sharing one pressure."""
    return SurrogateModel.from_curves(curves, p_ref=P_ref)


def surrogate_force(s: SurrogateModel, fr: float, eps: float, P: float) -> float:
    return s.force(fr, eps, P)

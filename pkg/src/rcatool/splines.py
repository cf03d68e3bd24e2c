"""Penalized cubic B-spline terms and backfitting for additive models.

Each regression term is a univariate B-spline with knots at empirical
quantiles of its input, fitted by penalized least squares. The penalty is
second differences of the coefficients plus a small ridge, so the fitted
function shrinks to zero (not to a line) as the penalty grows. Multi-term
models are estimated by backfitting.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import BSpline
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import DimensionMismatch

BACKFIT_MAX_SWEEPS = 100
BACKFIT_RTOL = 1e-8
RIDGE_EPS = 1e-3


@dataclass
class SplineTerm:
    """One fitted univariate function, evaluable out of sample."""

    parent: str
    knots: np.ndarray
    degree: int
    coef: np.ndarray
    offset: float = 0.0  # training mean of the raw spline values
    constant: bool = False

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.constant:
            return np.zeros_like(x)
        lo, hi = self.knots[self.degree], self.knots[-self.degree - 1]
        clipped = np.clip(x, lo, hi)
        spl = BSpline(self.knots, self.coef, self.degree, extrapolate=False)
        return np.nan_to_num(spl(clipped)) - self.offset


@dataclass
class AdditiveModel:
    target: str
    terms: list[SplineTerm]
    intercept: float
    rss: float
    tss: float = 0.0
    n_obs: int = 0

    def predict(self, columns: dict[str, np.ndarray]) -> np.ndarray:
        n = len(next(iter(columns.values()))) if columns else 0
        out = np.full(n, self.intercept)
        for term in self.terms:
            out = out + term(columns[term.parent])
        return out


def _knot_vector(x: np.ndarray, basis_size: int) -> tuple[np.ndarray, int]:
    """Quantile-spaced knots; degrades gracefully on heavily tied inputs."""
    degree = min(3, basis_size - 1)
    n_interior = basis_size - degree - 1
    lo, hi = float(x.min()), float(x.max())
    span = hi - lo if hi > lo else 1.0
    lo -= 1e-8 * span
    hi += 1e-8 * span
    if n_interior > 0:
        qs = np.linspace(0, 1, n_interior + 2)[1:-1]
        interior = np.quantile(x, qs)
        interior = np.clip(interior, lo, hi)
        # strictly increasing interior knots; ties collapse the basis
        interior = np.unique(interior)
        interior = interior[(interior > lo) & (interior < hi)]
    else:
        interior = np.array([])
    return np.concatenate(
        [np.full(degree + 1, lo), interior, np.full(degree + 1, hi)]
    ), degree


def _design_matrix(x: np.ndarray, knots: np.ndarray, degree: int) -> np.ndarray:
    lo, hi = knots[degree], knots[-degree - 1]
    xc = np.clip(x, lo, hi)
    return BSpline.design_matrix(xc, knots, degree).toarray()


def _penalty(n_basis: int) -> np.ndarray:
    if n_basis < 3:
        return np.eye(n_basis)
    d2 = np.diff(np.eye(n_basis), n=2, axis=0)
    return d2.T @ d2 + RIDGE_EPS * np.eye(n_basis)


class _TermSmoother:
    """Precomputed penalized least-squares solver for one spline term."""

    def __init__(self, parent: str, x: np.ndarray, basis_size: int, lam: float):
        self.parent = parent
        self.x = x
        self.constant = bool(np.ptp(x) == 0)
        if self.constant:
            return
        self.knots, self.degree = _knot_vector(x, basis_size)
        self.design = _design_matrix(x, self.knots, self.degree)
        self.lam_penalty = lam * _penalty(self.design.shape[1])
        gram = self.design.T @ self.design + self.lam_penalty
        try:
            self._factor = cho_factor(gram)
            self._gram = None
        except LinAlgError:
            self._factor = None
            self._gram = gram

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        if self._factor is not None:
            return cho_solve(self._factor, rhs)
        return np.linalg.lstsq(self._gram, rhs, rcond=None)[0]


def fit_additive(
    y: np.ndarray,
    parents: list[tuple[str, np.ndarray]],
    basis_size: int = 10,
    ridge_lambda: float = 1.0,
    target: str = "",
) -> AdditiveModel:
    """Backfit an additive spline model of y on the parent columns.

    With no parents the model is the sample mean. Constant parents fit as
    the zero function (with a warning) rather than failing.
    """
    y = np.asarray(y, dtype=float)
    n = len(y)
    for pid, col in parents:
        if len(col) != n:
            raise DimensionMismatch(f"parent {pid}: {len(col)} rows, target has {n}")
    smoothers = []
    for pid, col in parents:
        col = np.asarray(col, dtype=float)
        sm = _TermSmoother(pid, col, basis_size, ridge_lambda)
        if sm.constant:
            warnings.warn(f"parent {pid} is constant; term fitted as zero")
        smoothers.append(sm)
    return backfit(y, smoothers, target=target)


def backfit(
    y: np.ndarray, smoothers: list[_TermSmoother], target: str = ""
) -> AdditiveModel:
    """Backfitting over prebuilt term smoothers (shared across fits)."""
    y = np.asarray(y, dtype=float)
    n = len(y)
    intercept = float(y.mean()) if n else 0.0
    tss = float(np.sum((y - intercept) ** 2))
    if not smoothers:
        return AdditiveModel(target, [], intercept, rss=tss, tss=tss, n_obs=n)

    active = [sm for sm in smoothers if not sm.constant]
    fitted = {id(sm): np.zeros(n) for sm in active}
    coefs = {id(sm): None for sm in active}
    residual = y - intercept

    # joint penalized solve as the starting point; backfitting then only
    # needs a sweep or two to certify its own fixed point
    if len(active) > 1:
        designs = [sm.design for sm in active]
        sizes = [d.shape[1] for d in designs]
        x_full = np.hstack(designs)
        gram = x_full.T @ x_full
        off = 0
        for sm, sz in zip(active, sizes):
            gram[off : off + sz, off : off + sz] += sm.lam_penalty
            off += sz
        try:
            c = cho_solve(cho_factor(gram), x_full.T @ residual)
        except LinAlgError:
            c = np.linalg.lstsq(gram, x_full.T @ residual, rcond=None)[0]
        off = 0
        for sm, sz in zip(active, sizes):
            vals = sm.design @ c[off : off + sz]
            vals -= vals.mean()
            fitted[id(sm)] = vals
            off += sz
        residual = y - intercept - sum(fitted.values())

    rss = float(np.sum(residual**2))
    for _ in range(BACKFIT_MAX_SWEEPS):
        for sm in active:
            partial = residual + fitted[id(sm)]
            coef = sm.solve(sm.design.T @ partial)
            vals = sm.design @ coef
            vals -= vals.mean()
            coefs[id(sm)] = coef
            residual = partial - vals
            fitted[id(sm)] = vals
        new_rss = float(np.sum(residual**2))
        if rss > 0 and abs(rss - new_rss) < BACKFIT_RTOL * max(rss, 1.0):
            rss = new_rss
            break
        rss = new_rss

    terms = []
    for sm in smoothers:
        if sm.constant:
            terms.append(
                SplineTerm(sm.parent, np.array([]), 0, np.array([]), constant=True)
            )
        else:
            coef = coefs[id(sm)]
            if coef is None:  # loop always runs, but keep the fallback total
                coef = np.zeros(sm.design.shape[1])
            raw_mean = float((sm.design @ coef).mean())
            terms.append(
                SplineTerm(sm.parent, sm.knots, sm.degree, coef, offset=raw_mean)
            )
    return AdditiveModel(target, terms, intercept, rss=rss, tss=tss, n_obs=n)

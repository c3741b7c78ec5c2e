"""Standardization, thin eigendecomposition and the canonical transform.

The fitting code works on a standardized predictor matrix whose cross-product
has unit diagonal: each column is centered and divided by its centered norm,
so X'X is the sample correlation matrix of the raw predictors.  The
eigendecomposition of X'X is always obtained through a thin SVD of X itself;
the p-by-p cross-product is never formed.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConstantColumn, DimensionMismatch, RankZero

__all__ = [
    "DesignMatrix",
    "EigenSystem",
    "CanonicalModel",
    "standardize",
    "eigendecompose",
    "to_canonical",
    "back_transform",
]


@dataclass(frozen=True)
class DesignMatrix:
    """A predictor matrix together with the transform that standardized it.

    ``values`` holds the standardized data when ``standardized`` is True.
    ``column_means`` and ``column_scales`` record the training transform so
    the identical mapping can be applied to new rows.
    """

    values: np.ndarray
    column_means: np.ndarray
    column_scales: np.ndarray
    standardized: bool = True

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def p(self):
        return self.values.shape[1]

    def transform(self, X_new):
        """Apply the stored centering and scaling to new raw rows."""
        X_new = np.asarray(X_new, dtype=np.float64)
        if X_new.ndim != 2 or X_new.shape[1] != self.p:
            raise DimensionMismatch(
                f"expected a 2-d array with {self.p} columns, got shape {X_new.shape}"
            )
        return (X_new - self.column_means) / self.column_scales

    @classmethod
    def prestandardized(cls, values):
        """Wrap an already-standardized matrix (identity transform)."""
        values = np.ascontiguousarray(values, dtype=np.float64)
        p = values.shape[1]
        return cls(
            values=values,
            column_means=np.zeros(p),
            column_scales=np.ones(p),
            standardized=True,
        )


@dataclass(frozen=True)
class EigenSystem:
    """Nonzero eigenpairs of X'X for a standardized design.

    ``Q`` is p-by-t with orthonormal columns, ``eigenvalues`` is descending
    and strictly above ``zero_threshold``.  Eigenvector signs are fixed so
    the largest-magnitude entry of each column is positive.
    """

    Q: np.ndarray
    eigenvalues: np.ndarray
    zero_threshold: float

    @property
    def p(self):
        return self.Q.shape[0]

    @property
    def t(self):
        return self.Q.shape[1]


@dataclass(frozen=True)
class CanonicalModel:
    """Component scores Z = XQ plus the eigensystem that produced them."""

    Z: np.ndarray
    eigen: EigenSystem

    @property
    def n(self):
        return self.Z.shape[0]

    @property
    def t(self):
        return self.Z.shape[1]

    @property
    def p(self):
        return self.eigen.p


def standardize(X):
    """Center each column and scale it to unit norm.

    After the transform every column has mean zero and squared norm one, so
    the cross-product matrix equals the sample correlation matrix (the scale
    divisor is the centered column norm, i.e. sd * sqrt(n - 1)).

    Raises ConstantColumn for any zero-variance column.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d array, got shape {X.shape}")
    # exact constancy test: mean subtraction alone can leave roundoff dust
    bad = np.flatnonzero(X.min(axis=0) == X.max(axis=0))
    if bad.size:
        raise ConstantColumn(bad[0])
    means = X.mean(axis=0)
    centered = X - means
    scales = np.sqrt(np.sum(centered * centered, axis=0))
    return DesignMatrix(
        values=centered / scales,
        column_means=means,
        column_scales=scales,
        standardized=True,
    )


def _fix_signs(Q):
    # orient each eigenvector so its largest-magnitude entry is positive
    anchor = np.argmax(np.abs(Q), axis=0)
    signs = np.where(Q[anchor, np.arange(Q.shape[1])] < 0.0, -1.0, 1.0)
    return Q * signs


def eigendecompose(X, zero_threshold=None):
    """Thin eigendecomposition of X'X via the SVD of a standardized design.

    Eigenvalues are the squared singular values of X, returned in descending
    order with anything at or below the threshold dropped.  The default
    threshold is lambda_max * max(n, p) * machine epsilon.

    Raises RankZero when nothing survives the threshold.
    """
    if not isinstance(X, DesignMatrix):
        raise TypeError("eigendecompose expects a DesignMatrix")
    if not X.standardized:
        raise ValueError("design matrix must be standardized first")
    _, s, Vt = np.linalg.svd(X.values, full_matrices=False)
    evals = s * s
    if evals.size == 0 or evals[0] == 0.0:
        raise RankZero("design matrix has no nonzero singular values")
    if zero_threshold is None:
        zero_threshold = evals[0] * max(X.n, X.p) * np.finfo(np.float64).eps
    keep = evals > zero_threshold
    if not keep.any():
        raise RankZero(f"no eigenvalue exceeds threshold {zero_threshold:g}")
    Q = _fix_signs(Vt[keep].T)
    return EigenSystem(
        Q=np.ascontiguousarray(Q),
        eigenvalues=evals[keep].copy(),
        zero_threshold=float(zero_threshold),
    )


def to_canonical(X, eigen):
    """Project a standardized design onto its components: Z = XQ."""
    if not isinstance(X, DesignMatrix):
        raise TypeError("to_canonical expects a DesignMatrix")
    if eigen.p != X.p:
        raise DimensionMismatch(
            f"eigensystem built for p={eigen.p}, design has p={X.p}"
        )
    return CanonicalModel(Z=X.values @ eigen.Q, eigen=eigen)


def back_transform(alpha, eigen):
    """Map canonical coefficients back to predictor space: beta = Q alpha."""
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.shape != (eigen.t,):
        raise DimensionMismatch(
            f"alpha has shape {alpha.shape}, expected ({eigen.t},)"
        )
    return eigen.Q @ alpha

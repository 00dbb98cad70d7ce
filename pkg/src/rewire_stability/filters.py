"""Polynomial spectral graph filters and their stability bound."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .shift import NORM_TOL, ShiftOperator, spectral_norm


class FilterError(ValueError):
    pass


@dataclass(frozen=True)
class PolynomialFilter:
    """``g(lambda) = sum_k coefficients[k] * lambda**k``."""

    coefficients: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        if not coeffs:
            raise FilterError("a filter needs at least one coefficient")
        if not all(np.isfinite(coeffs)):
            raise FilterError(f"non-finite filter coefficient in {coeffs}")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    @classmethod
    def parse(cls, text: str) -> PolynomialFilter:
        """Parse ``"theta0,theta1,...,thetaK"``."""
        try:
            return cls(tuple(float(tok) for tok in text.split(",")))
        except ValueError:
            raise FilterError(f"cannot parse filter coefficients {text!r}") from None

    @classmethod
    def monomial(cls, k: int) -> PolynomialFilter:
        return cls((0.0,) * k + (1.0,))

    def __call__(self, lam):
        """Evaluate on scalars or arrays of eigenvalues."""
        return np.polynomial.polynomial.polyval(lam, self.coefficients)

    def format(self) -> str:
        return ",".join(f"{c:.17g}" for c in self.coefficients)


def apply_filter(f: PolynomialFilter, s: ShiftOperator, x) -> np.ndarray:
    """``g(S) x`` by Horner's rule on matrix-vector products.

    ``x`` may be a single signal or an ``n x d`` stack of signals.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[0] != s.n:
        raise FilterError(f"signal has {x.shape[0]} rows, operator has {s.n} nodes")
    theta = f.coefficients
    y = theta[-1] * x
    for c in reversed(theta[:-1]):
        y = s.matrix @ y + c * x
    return y


def filter_matrix(f: PolynomialFilter, s: ShiftOperator) -> np.ndarray:
    n = s.n
    power = np.eye(n)
    out = f.coefficients[0] * power
    for c in f.coefficients[1:]:
        power = power @ s.matrix
        out = out + c * power
    return 0.5 * (out + out.T)


def _check_pair(s: ShiftOperator, sp: ShiftOperator) -> None:
    if s.n != sp.n:
        raise FilterError(f"operators have different sizes ({s.n} vs {sp.n})")
    if s.gamma != sp.gamma:
        raise FilterError(f"operators use different gamma ({s.gamma} vs {sp.gamma})")


def filter_distance(
    f: PolynomialFilter, s: ShiftOperator, sp: ShiftOperator, tol: float = NORM_TOL
) -> float:
    """``||g(S) - g(S_p)||_2``."""
    _check_pair(s, sp)
    return spectral_norm(filter_matrix(f, s) - filter_matrix(f, sp), tol=tol)


def prop1_bound(f: PolynomialFilter, e_norm2: float) -> float:
    """``sum_{k>=1} k |theta_k| * ||E||_2``; the constant term never contributes."""
    if e_norm2 < 0:
        raise FilterError(f"error norm must be nonnegative, got {e_norm2}")
    return filter_constant(f) * e_norm2


def filter_constant(f: PolynomialFilter) -> float:
    return float(sum(k * abs(c) for k, c in enumerate(f.coefficients)))

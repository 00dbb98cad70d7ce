"""Fixed-weight SGCN and GCN forward passes with their logit-distance bounds.

Weights are never trained here: the same parameters are run on the original
and the rewired graph, which is the setting the bounds are stated for.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import Graph
from .perturbation import RewiringSummary, rewiring_bound
from .shift import NORM_TOL, ShiftOperator, operator_norm

FEATURE_NORM_TOL = 1e-9


class ModelError(ValueError):
    pass


def check_features(x) -> np.ndarray:
    """Validate that every column of ``x`` has unit Euclidean norm."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ModelError(f"feature matrix must be 2-D, got shape {x.shape}")
    norms = np.linalg.norm(x, axis=0)
    bad = np.flatnonzero(np.abs(norms - 1.0) > FEATURE_NORM_TOL)
    if bad.size:
        raise ModelError(
            f"feature column {bad[0]} has norm {norms[bad[0]]:.12g}; columns must have unit norm"
        )
    return x


def random_features(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    x = rng.standard_normal((n, d))
    return x / np.linalg.norm(x, axis=0)


def gaussian_weights(shape: tuple[int, int], rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal(shape) / np.sqrt(shape[0])


@dataclass(frozen=True, eq=False)
class SgcnModel:
    power: int
    theta: np.ndarray

    def __post_init__(self):
        if self.power < 1:
            raise ModelError(f"SGCN power must be at least 1, got {self.power}")
        theta = np.asarray(self.theta, dtype=float)
        if theta.ndim != 2 or not np.all(np.isfinite(theta)):
            raise ModelError("SGCN weights must be a finite 2-D matrix")
        object.__setattr__(self, "theta", theta)


@dataclass(frozen=True, eq=False)
class GcnModel:
    layers: tuple[np.ndarray, ...]

    def __post_init__(self):
        layers = tuple(np.asarray(w, dtype=float) for w in self.layers)
        if not layers:
            raise ModelError("GCN needs at least one layer")
        for i, w in enumerate(layers):
            if w.ndim != 2 or not np.all(np.isfinite(w)):
                raise ModelError(f"layer {i} weights must be a finite 2-D matrix")
            if i and layers[i - 1].shape[1] != w.shape[0]:
                raise ModelError(
                    f"layer {i} expects width {w.shape[0]}, previous layer emits "
                    f"{layers[i - 1].shape[1]}"
                )
        object.__setattr__(self, "layers", layers)

    @property
    def depth(self) -> int:
        return len(self.layers)


def _check_operator(s: ShiftOperator, x: np.ndarray, in_dim: int) -> None:
    if s.gamma != 1.0:
        raise ModelError(f"GCN models use the gamma=1 operator, got gamma={s.gamma}")
    if x.shape[0] != s.n:
        raise ModelError(f"features have {x.shape[0]} rows, operator has {s.n} nodes")
    if x.shape[1] != in_dim:
        raise ModelError(f"features have {x.shape[1]} columns, weights expect {in_dim}")


def sgcn_logits(m: SgcnModel, s: ShiftOperator, x) -> np.ndarray:
    """Pre-softmax SGCN output ``S^K X Theta``."""
    x = check_features(x)
    _check_operator(s, x, m.theta.shape[0])
    h = x
    for _ in range(m.power):
        h = s.matrix @ h
    return h @ m.theta


def gcn_forward(m: GcnModel, s: ShiftOperator, x, all_layers: bool = False):
    """Run ``X_l = relu(S X_{l-1} Theta_l)`` for every layer.

    Returns the final representation, or the list ``[X_0, ..., X_L]`` when
    ``all_layers`` is set.
    """
    x = check_features(x)
    _check_operator(s, x, m.layers[0].shape[0])
    out = [x]
    for w in m.layers:
        out.append(np.maximum(s.matrix @ out[-1] @ w, 0.0))
    return out if all_layers else out[-1]


def softmax_rows(logits) -> np.ndarray:
    z = np.asarray(logits, dtype=float)
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _nonneg(**values) -> None:
    for name, v in values.items():
        if v < 0:
            raise ModelError(f"{name} must be nonnegative, got {v}")


def prop2_bound(d: int, power: int, e_norm2: float, theta_norm2: float) -> float:
    """SGCN logit bound ``sqrt(d) K ||E||_2 ||Theta||_2``."""
    _nonneg(d=d, power=power, e_norm2=e_norm2, theta_norm2=theta_norm2)
    return float(np.sqrt(d) * power * e_norm2 * theta_norm2)


def prop3_bound(d: int, depth: int, e_norm2: float, theta_norms: Sequence[float]) -> float:
    """GCN output bound ``sqrt(d) L ||E||_2 prod_l ||Theta_l||_2``."""
    _nonneg(d=d, depth=depth, e_norm2=e_norm2)
    for t in theta_norms:
        _nonneg(theta_norm=t)
    return float(np.sqrt(d) * depth * e_norm2 * np.prod(theta_norms))


def corollary_bound(
    g: Graph, summary: RewiringSummary, d: int, depth: int, theta_norms: Sequence[float]
) -> float:
    """``prop3_bound`` with ``||E||_2`` replaced by the gamma=1 rewiring bound.

    With ``depth = K`` and a single weight norm this is the SGCN analogue.
    """
    return prop3_bound(d, depth, rewiring_bound(g, summary, 1.0), theta_norms)


def weight_norms(m: SgcnModel | GcnModel, tol: float = NORM_TOL) -> list[float]:
    layers = [m.theta] if isinstance(m, SgcnModel) else m.layers
    return [operator_norm(w, tol=tol) for w in layers]

"""Complex-domain simultaneous perturbation stochastic approximation.

The optimizer walks an unnormalized complex iterate z with the update
z_{k+1} = z_k - a_k g_k, where g_k is a two-point stochastic estimate
of the conjugate (Wirtinger) gradient of the objective:

    g_i = (f(z + c_k D) - f(z - c_k D)) / (2 c_k conj(D_i))

with perturbation entries D_i drawn i.i.d. uniform from {1, -1, i, -i}.
Averaged over D this matches d f / d conj(z_i) up to O(c_k^2).  Gains
decay as a_k = a / (10 k + 1 + A)^s and c_k = b / (10 k + 1)^r with the
iteration count starting at k = 1.

No normalization happens here; callers decide when to project the
iterate back to the unit sphere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateIterate, DimensionMismatch

# Magnitude-1 perturbation alphabet; conj maps each value to 1/value.
_PERTURBATION_VALUES = np.array([1.0, -1.0, 1.0j, -1.0j], dtype=np.complex128)

# Asymptotic step-size tuning by decade of the per-measurement shot
# count: heavier sampling noise wants a larger smoothing gain b.
B_BY_DECADE = {1: 0.35, 2: 0.30, 3: 0.07, 4: 0.06, 5: 0.03}

_DEGENERATE_NORM = 1e-12


@dataclass(frozen=True)
class GainParams:
    """Gain schedule coefficients (a, A, s) for a_k and (b, r) for c_k."""

    a: float = 3.0
    A: float = 0.0
    s: float = 1.0
    b: float = 0.35
    r: float = 1.0 / 6.0

    def __post_init__(self):
        for name in ("a", "s", "b", "r"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0.0):
                raise ValueError(f"gain {name} must be finite and positive, got {val!r}")
        if not (math.isfinite(self.A) and self.A >= 0.0):
            raise ValueError(f"gain A must be finite and non-negative, got {self.A!r}")

    @classmethod
    def for_shots(
        cls,
        n_est: int,
        *,
        a: float = 3.0,
        A: float = 0.0,
        s: float = 1.0,
        r: float = 1.0 / 6.0,
    ) -> "GainParams":
        """Gains with b picked from the tuning table for ``n_est`` shots.

        The table is indexed by the nearest decade on a log scale,
        clamped to the tabulated range 10..10^5; a half-decade tie
        rounds up.
        """
        if n_est < 1:
            raise ValueError(f"n_est must be positive, got {n_est}")
        decade = int(math.floor(math.log10(n_est) + 0.5))
        decade = min(max(decade, 1), 5)
        return cls(a=a, A=A, s=s, b=B_BY_DECADE[decade], r=r)


def gains_at(params: GainParams, k: int) -> tuple[float, float]:
    """Step sizes (a_k, c_k) for iteration k >= 1."""
    if k < 1:
        raise ValueError(f"iteration index starts at 1, got {k}")
    a_k = params.a / (10.0 * k + 1.0 + params.A) ** params.s
    c_k = params.b / (10.0 * k + 1.0) ** params.r
    return a_k, c_k


def sample_perturbation(d: int, rng: np.random.Generator) -> np.ndarray:
    """Vector of d i.i.d. draws from {1, -1, i, -i}."""
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    return _PERTURBATION_VALUES[rng.integers(0, 4, size=d)]


def perturbed_guesses(
    z: np.ndarray, c_k: float, delta: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """The pair z +/- c_k * delta evaluated by the two-point estimator."""
    z = np.asarray(z, dtype=np.complex128)
    delta = np.asarray(delta, dtype=np.complex128)
    if z.shape != delta.shape:
        raise DimensionMismatch(f"shapes differ: {z.shape} vs {delta.shape}")
    if not (math.isfinite(c_k) and c_k > 0.0):
        raise ValueError(f"c_k must be finite and positive, got {c_k!r}")
    offset = c_k * delta
    return z + offset, z - offset


def gradient_estimate(
    f_plus: float, f_minus: float, c_k: float, delta: np.ndarray
) -> np.ndarray:
    """Two-point estimate of the conjugate gradient, componentwise.

    Dividing by conj(delta_i) is exact since every entry has unit
    modulus.
    """
    if not (math.isfinite(c_k) and c_k > 0.0):
        raise ValueError(f"c_k must be finite and positive, got {c_k!r}")
    delta = np.asarray(delta, dtype=np.complex128)
    return ((f_plus - f_minus) / (2.0 * c_k)) / np.conj(delta)


def update(z: np.ndarray, a_k: float, gradient: np.ndarray) -> np.ndarray:
    """Descent step z - a_k * gradient.

    Raises DegenerateIterate when the step lands at (numerically) zero,
    where the iterate no longer points anywhere on the sphere.
    """
    z = np.asarray(z, dtype=np.complex128)
    gradient = np.asarray(gradient, dtype=np.complex128)
    if z.shape != gradient.shape:
        raise DimensionMismatch(f"shapes differ: {z.shape} vs {gradient.shape}")
    out = z - a_k * gradient
    if float(np.linalg.norm(out)) < _DEGENERATE_NORM:
        raise DegenerateIterate("update collapsed the iterate to the zero vector")
    return out
